#include "plh/diffusion.hpp"

#include <cmath>
#include <random>
#include <string>

#include "plh/kernels.hpp"

namespace plh {

FeatureBundle FeatureBundle::zeros(std::size_t dim, std::size_t channels) {
  return {dim, channels, std::vector<double>(dim * channels, 0.0)};
}

FeatureBundle FeatureBundle::random(std::size_t dim, std::size_t channels, std::uint64_t seed) {
  auto x = zeros(dim, channels);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (auto& v : x.values) v = normal(rng);
  return x;
}

void FeatureBundle::validate() const {
  if (values.size() != dim * channels)
    throw ContractError("features: expected " + std::to_string(dim * channels) + " values, got " +
                        std::to_string(values.size()));
  for (double v : values)
    if (!std::isfinite(v)) throw ContractError("features: non-finite entry");
}

namespace {

void require_match(const FeatureBundle& x, const AssembledLaplacian<double>& l) {
  x.validate();
  if (x.dim != l.dim())
    throw ContractError("features have dimension " + std::to_string(x.dim) +
                        " but the Laplacian acts on " + std::to_string(l.dim()));
}

void apply(const AssembledLaplacian<double>& l, std::span<const double> x, std::span<double> y) {
  kernels::gemv(l.matrix.data.data(), l.dim(), l.dim(), x.data(), y.data());
}

}  // namespace

double dirichlet_energy(const FeatureBundle& x, const AssembledLaplacian<double>& l) {
  require_match(x, l);
  std::vector<double> lx(x.dim);
  double e = 0.0;
  for (std::size_t c = 0; c < x.channels; ++c) {
    apply(l, x.channel(c), lx);
    e += kernels::dot(x.channel(c).data(), lx.data(), x.dim);
  }
  return e;
}

double lambda_max(const AssembledLaplacian<double>& l, std::size_t max_iterations, double tol) {
  const std::size_t n = l.dim();
  if (n == 0) return 0.0;
  // A fixed, generic start vector keeps the estimate reproducible.
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(1.0 + 7.0 * i);
  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const double norm = std::sqrt(kernels::dot(x.data(), x.data(), n));
    if (norm == 0.0) return 0.0;
    for (auto& v : x) v /= norm;
    apply(l, x, y);
    const double next = kernels::dot(x.data(), y.data(), n);
    std::swap(x, y);
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) return next;
    lambda = next;
  }
  return lambda;
}

DiffusionResult diffuse(const FeatureBundle& x, const AssembledLaplacian<double>& l, double alpha,
                        std::size_t steps) {
  require_match(x, l);
  const double lmax = lambda_max(l);
  if (!(alpha > 0.0) || (lmax > 0.0 && !(alpha * lmax < 2.0)))
    throw ContractError("diffusion step alpha=" + std::to_string(alpha) +
                        " must lie in (0, 2/lambda_max) with lambda_max=" + std::to_string(lmax));
  DiffusionResult r{x, {}};
  r.energy.reserve(steps + 1);
  r.energy.push_back(dirichlet_energy(r.features, l));
  std::vector<double> lx(x.dim);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t c = 0; c < x.channels; ++c) {
      auto xc = r.features.channel(c);
      apply(l, xc, lx);
      kernels::axpy(-alpha, lx.data(), xc.data(), x.dim);
    }
    r.energy.push_back(dirichlet_energy(r.features, l));
  }
  return r;
}

FeatureBundle message_pass(const FeatureBundle& x, const AssembledLaplacian<double>& l) {
  require_match(x, l);
  auto out = FeatureBundle::zeros(x.dim, x.channels);
  for (std::size_t c = 0; c < x.channels; ++c) apply(l, x.channel(c), out.channel(c));
  return out;
}

}  // namespace plh
