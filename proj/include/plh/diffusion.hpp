#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "plh/local_sheaf.hpp"

namespace plh {

/// `channels` copies of a vector over the coordinates of an assembled
/// Laplacian. Channel c occupies values[c * dim, (c + 1) * dim).
struct FeatureBundle {
  std::size_t dim = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  static FeatureBundle zeros(std::size_t dim, std::size_t channels);
  /// Standard normal entries from mt19937_64(seed).
  static FeatureBundle random(std::size_t dim, std::size_t channels, std::uint64_t seed);

  std::span<double> channel(std::size_t c) { return {values.data() + c * dim, dim}; }
  std::span<const double> channel(std::size_t c) const { return {values.data() + c * dim, dim}; }

  /// Throws ContractError on a size mismatch or a non-finite entry.
  void validate() const;
  bool operator==(const FeatureBundle&) const = default;
};

/// Sum over channels of x^T L x.
double dirichlet_energy(const FeatureBundle& x, const AssembledLaplacian<double>& l);

/// Largest eigenvalue of the symmetric PSD operator by power iteration.
double lambda_max(const AssembledLaplacian<double>& l, std::size_t max_iterations = 10000,
                  double tol = 1e-13);

struct DiffusionResult {
  FeatureBundle features;
  std::vector<double> energy;  // before step 0, then after every step
};

/// Explicit Euler steps x <- x - alpha L x. Requires 0 < alpha < 2 / lambda_max.
DiffusionResult diffuse(const FeatureBundle& x, const AssembledLaplacian<double>& l, double alpha,
                        std::size_t steps);

/// L x on every channel; with a lifespan-weighted operator this is one round
/// of message passing.
FeatureBundle message_pass(const FeatureBundle& x, const AssembledLaplacian<double>& l);

template <class Field>
FeatureBundle message_pass(const FeatureBundle& x, const Filtration& f,
                           const std::vector<LocalStalk<typename Field::Scalar>>& stalks,
                           const std::vector<SheafLaplacianBlock<typename Field::Scalar>>& blocks,
                           int k, LaplacianMode mode) {
  return message_pass(x, to_double(assemble_laplacian(f, stalks, blocks, k, mode)));
}

}  // namespace plh
