#pragma once

#include <stdexcept>
#include <string>

namespace aggfield {

/// Raised when a model parameter violates a precondition of the model itself
/// (as opposed to a numerical failure).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// alpha <= -1: the (1/4 - x)^alpha factor is not integrable.
class InvalidExponent : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Shape function vanishes at 1/4 or is negative somewhere on the support.
class InvalidShape : public ModelError {
 public:
  using ModelError::ModelError;
};

/// |theta| >= 1/4: the four-neighbour equation has no stationary solution.
class NonStationary : public ModelError {
 public:
  using ModelError::ModelError;
};

/// The aggregated field does not exist in L2 (alpha <= 0).
class NonExistence : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Requested an operation outside the parameter range it is defined for.
class OutOfRange : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Spectral density evaluated where it is infinite.
class Divergence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The transformed quadrature route is not valid at this frequency.
class RouteInvalid : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough usable data for an estimate (empty inputs, too few bins).
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aggfield
