#include "aggfield/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace aggfield::fft {

namespace {

enum class Kind { c2c_forward, c2c_backward, r2c, c2r };

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, Kind>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

// Plans are made on scratch buffers with FFTW_UNALIGNED and only ever run
// through the new-array execute functions, which FFTW documents as
// thread-safe. Planning itself is serialized.
fftw_plan plan_for(LatticeSpec lattice, Kind kind) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  const auto key = std::make_tuple(lattice.n1, lattice.n2, kind);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  const int n1 = lattice.n1;
  const int n2 = lattice.n2;
  const std::size_t full = lattice.size();
  const std::size_t half = static_cast<std::size_t>(n1) * (n2 / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  switch (kind) {
    case Kind::c2c_forward:
    case Kind::c2c_backward: {
      auto* a = fftw_alloc_complex(full);
      auto* b = fftw_alloc_complex(full);
      plan = fftw_plan_dft_2d(n1, n2, a, b,
                              kind == Kind::c2c_forward ? FFTW_FORWARD : FFTW_BACKWARD,
                              flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::r2c: {
      auto* a = fftw_alloc_real(full);
      auto* b = fftw_alloc_complex(half);
      plan = fftw_plan_dft_r2c_2d(n1, n2, a, b, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case Kind::c2r: {
      auto* a = fftw_alloc_complex(half);
      auto* b = fftw_alloc_real(full);
      plan = fftw_plan_dft_c2r_2d(n1, n2, a, b, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
  }
  if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
  c.plans.emplace(key, plan);
  return plan;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

void check_size(std::size_t got, std::size_t want) {
  if (got != want) throw std::invalid_argument("fft: input size does not match lattice");
}

}  // namespace

std::vector<Complex> forward(std::span<const Complex> in, LatticeSpec lattice) {
  check_size(in.size(), lattice.size());
  std::vector<Complex> src(in.begin(), in.end());
  std::vector<Complex> out(lattice.size());
  fftw_execute_dft(plan_for(lattice, Kind::c2c_forward), as_fftw(src.data()),
                   as_fftw(out.data()));
  return out;
}

std::vector<Complex> backward(std::span<const Complex> in, LatticeSpec lattice) {
  check_size(in.size(), lattice.size());
  std::vector<Complex> src(in.begin(), in.end());
  std::vector<Complex> out(lattice.size());
  fftw_execute_dft(plan_for(lattice, Kind::c2c_backward), as_fftw(src.data()),
                   as_fftw(out.data()));
  return out;
}

std::vector<Complex> forward_r2c(std::span<const double> in, LatticeSpec lattice) {
  check_size(in.size(), lattice.size());
  std::vector<double> src(in.begin(), in.end());
  std::vector<Complex> out(static_cast<std::size_t>(lattice.n1) * (lattice.n2 / 2 + 1));
  fftw_execute_dft_r2c(plan_for(lattice, Kind::r2c), src.data(), as_fftw(out.data()));
  return out;
}

std::vector<Complex> forward_real(std::span<const double> in, LatticeSpec lattice) {
  const auto half = forward_r2c(in, lattice);
  const int n1 = lattice.n1;
  const int n2 = lattice.n2;
  const int hw = n2 / 2 + 1;
  std::vector<Complex> out(lattice.size());
  for (int k1 = 0; k1 < n1; ++k1) {
    for (int k2 = 0; k2 < n2; ++k2) {
      Complex v;
      if (k2 < hw) {
        v = half[static_cast<std::size_t>(k1) * hw + k2];
      } else {
        const int m1 = (n1 - k1) % n1;
        v = std::conj(half[static_cast<std::size_t>(m1) * hw + (n2 - k2)]);
      }
      out[static_cast<std::size_t>(k1) * n2 + k2] = v;
    }
  }
  return out;
}

std::vector<double> backward_c2r(std::vector<Complex> half, LatticeSpec lattice) {
  check_size(half.size(), static_cast<std::size_t>(lattice.n1) * (lattice.n2 / 2 + 1));
  std::vector<double> out(lattice.size());
  fftw_execute_dft_c2r(plan_for(lattice, Kind::c2r), as_fftw(half.data()), out.data());
  return out;
}

}  // namespace aggfield::fft
