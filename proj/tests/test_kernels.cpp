#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "plh/errors.hpp"
#include "plh/kernels.hpp"

using namespace plh;
using kernels::Backend;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<Backend> available() {
  std::vector<Backend> out;
  for (auto b : {Backend::scalar, Backend::avx2, Backend::neon})
    if (kernels::backend_available(b)) out.push_back(b);
  return out;
}

}  // namespace

TEST_CASE("scalar backend is always present") {
  CHECK(kernels::backend_available(Backend::scalar));
  CHECK(kernels::backend_name(Backend::scalar) == "scalar");
  MESSAGE("active backend: " << kernels::backend_name(kernels::active_backend()));
}

TEST_CASE("vector backends agree with the scalar reference") {
  const auto& ref = kernels::table(Backend::scalar);
  std::mt19937_64 rng(3);
  for (auto b : available()) {
    CAPTURE(kernels::backend_name(b));
    const auto& t = kernels::table(b);
    // Lengths around the vector widths and unroll factors exercise the tails.
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1001}) {
      const auto x = random_vector(rng, n), y = random_vector(rng, n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
      CHECK(std::abs(t.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <=
            1e-14 * (mag + 1.0));

      auto y1 = y, y2 = y;
      t.axpy(0.37, x.data(), y1.data(), n);
      ref.axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

      const std::size_t rows = n % 13 + 1;
      const auto a = random_vector(rng, rows * n);
      std::vector<double> g1(rows), g2(rows);
      t.gemv(a.data(), rows, n, x.data(), g1.data());
      ref.gemv(a.data(), rows, n, x.data(), g2.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(g1[r] - g2[r]) <= 1e-13 * (n + 1.0));
    }
  }
}

TEST_CASE("backend switching") {
  const auto before = kernels::active_backend();
  kernels::set_backend(Backend::scalar);
  CHECK(kernels::active_backend() == Backend::scalar);
  const double x[] = {1, 2, 3}, y[] = {4, 5, 6};
  CHECK(kernels::dot(x, y, 3) == 32.0);
  for (auto b : {Backend::avx2, Backend::neon})
    if (!kernels::backend_available(b)) CHECK_THROWS_AS(kernels::set_backend(b), ContractError);
  kernels::set_backend(before);
  CHECK(kernels::dot(x, y, 3) == 32.0);
}

TEST_CASE("environment override pins the scalar path") {
  if (std::getenv("PLH_FORCE_SCALAR")) CHECK(kernels::active_backend() == Backend::scalar);
}
