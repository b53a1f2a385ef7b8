#pragma once

// Dense double kernels used by diffusion and the energy computations. Each has
// a scalar reference and vector variants selected once at runtime; setting
// PLH_FORCE_SCALAR in the environment pins the scalar path.

#include <cstddef>
#include <string_view>

namespace plh::kernels {

enum class Backend { scalar, avx2, neon };

struct Table {
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

Backend active_backend();
std::string_view backend_name(Backend b);
bool backend_available(Backend b);
/// Throws ContractError when the backend is not available on this machine.
const Table& table(Backend b);
/// Switches the process-wide backend (tests and benchmarks).
void set_backend(Backend b);
const Table& active();

inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  active().gemv(a, rows, cols, x, y);
}

namespace detail {
extern const Table scalar_table;
const Table* avx2_table();  // nullptr when not compiled in
const Table* neon_table();
}  // namespace detail

}  // namespace plh::kernels
