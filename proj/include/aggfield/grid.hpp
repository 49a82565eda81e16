#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace aggfield {

/// Torus dimensions. The first index runs along the first lattice
/// coordinate (lag operator L1), the second along L2.
struct LatticeSpec {
  int n1{0};
  int n2{0};

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
  }
  void validate() const {
    if (n1 < 2 || n2 < 2) {
      throw std::invalid_argument("lattice: n1 and n2 must be >= 2");
    }
  }
  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

/// Dense row-major n1 x n2 grid.
template <typename T>
class Grid2D {
 public:
  Grid2D() = default;
  explicit Grid2D(LatticeSpec lattice, T fill = T{})
      : lattice_(lattice), data_(lattice.size(), fill) {}
  Grid2D(LatticeSpec lattice, std::vector<T> data)
      : lattice_(lattice), data_(std::move(data)) {
    if (data_.size() != lattice_.size()) {
      throw std::invalid_argument("Grid2D: data size does not match lattice");
    }
  }

  [[nodiscard]] const LatticeSpec& lattice() const { return lattice_; }
  [[nodiscard]] int n1() const { return lattice_.n1; }
  [[nodiscard]] int n2() const { return lattice_.n2; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }

  /// Periodic access: indices are reduced modulo the torus dimensions.
  [[nodiscard]] const T& wrapped(int i, int j) const {
    return (*this)(wrap(i, lattice_.n1), wrap(j, lattice_.n2));
  }

  [[nodiscard]] std::span<T> values() { return data_; }
  [[nodiscard]] std::span<const T> values() const { return data_; }
  [[nodiscard]] std::vector<T>& storage() { return data_; }
  [[nodiscard]] const std::vector<T>& storage() const { return data_; }

  static int wrap(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
  }

 private:
  [[nodiscard]] std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(lattice_.n2) +
           static_cast<std::size_t>(j);
  }

  LatticeSpec lattice_{};
  std::vector<T> data_;
};

using RealGrid = Grid2D<double>;

/// Signed Fourier index in (-n/2, n/2] for bin k of an n-point transform.
inline int signed_index(int k, int n) { return 2 * k > n ? k - n : k; }

}  // namespace aggfield
