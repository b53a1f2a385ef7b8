#pragma once

// Sign-equivariant layers on stalk vectors and the hypernetwork that produces
// their weights from persistence descriptors. Forward passes and exact
// derivatives only; training lives outside the library.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plh/local_sheaf.hpp"

namespace plh {

enum class Activation { identity, tanh, sigmoid };

double activate(Activation a, double x);
double activate_derivative(Activation a, double x);
std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);

/// Fully connected network with `activation` on hidden layers and a linear
/// output. Parameters are stored layer by layer, weights (row-major,
/// out x in) before biases.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<std::size_t> widths, Activation activation);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and zero biases, drawn
  /// from mt19937_64(seed) as (bits >> 11) * 2^-53.
  static Mlp seeded(std::vector<std::size_t> widths, Activation activation, std::uint64_t seed);
  /// The default descriptor network: widths 6-16-16-1, tanh.
  static Mlp default_psi(std::uint64_t seed = 0x5eed);

  const std::vector<std::size_t>& widths() const { return widths_; }
  Activation activation() const { return activation_; }
  std::size_t parameter_count() const;
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  void set_parameters(std::vector<double> p);

  std::vector<double> forward(std::span<const double> input) const;
  /// Directional derivative of the output along (d_input, d_params); either
  /// direction may be empty, meaning zero.
  std::vector<double> jvp(std::span<const double> input, std::span<const double> d_input,
                          std::span<const double> d_params) const;

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<std::size_t> widths_;
  Activation activation_ = Activation::tanh;
  std::vector<double> params_;
};

/// (order, birth, death) of one stalk class; deaths are clamped to a finite
/// horizon so every descriptor is a finite network input.
struct Descriptor {
  double order = 0.0;
  double birth = 0.0;
  double death = 0.0;
  bool operator==(const Descriptor&) const = default;
};

template <class S>
std::vector<Descriptor> stalk_descriptors(const LocalStalk<S>& stalk, int k, double horizon);

using DescriptorFunction = std::function<double(const Descriptor&, const Descriptor&)>;

/// W[i][j] = psi(d_i, d_j), row-major n x n.
std::vector<double> hypernet_weights(const std::vector<Descriptor>& d, const DescriptorFunction& psi);
/// The MLP sees (k_i, s_i, t_i, k_j, s_j, t_j).
std::vector<double> hypernet_weights(const std::vector<Descriptor>& d, const Mlp& psi);

/// psi(x) = x o rho(|x|). Throws ContractError when rho changes the dimension.
std::vector<double> sign_equivariant_layer(
    std::span<const double> x,
    const std::function<std::vector<double>(std::span<const double>)>& rho);

/// rho(y) = act(W y + bias) with W row-major n x n.
struct GainMap {
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::tanh;

  std::size_t dim() const { return bias.size(); }
  std::vector<double> operator()(std::span<const double> y) const;
};

std::vector<double> sign_equivariant_layer(std::span<const double> x, const GainMap& rho);

/// The layer with W generated by psi from the stalk descriptors.
struct PsiLayer {
  Mlp psi;
  std::vector<double> bias;  // per coordinate; empty means zero
  Activation activation = Activation::tanh;

  GainMap gains(const std::vector<Descriptor>& d) const;
  std::vector<double> forward(std::span<const double> x, const std::vector<Descriptor>& d) const;
  /// Derivative along (dx, d_params of psi).
  std::vector<double> jvp(std::span<const double> x, const std::vector<Descriptor>& d,
                          std::span<const double> dx, std::span<const double> d_params) const;
};

/// d(value)/d(edge weight) for the simplex's filtration value: 1 on the
/// heaviest edge (ties go to the lexicographically largest edge), indexed by
/// position in graph.edges. Empty for vertices.
SparseVector<double> value_gradient(const WeightedGraph& graph, const Filtration& f, Index simplex);

struct FiltrationGradient {
  SparseVector<double> birth;
  std::optional<SparseVector<double>> death;  // nullopt: the class is essential
  bool essential() const { return !death.has_value(); }
};

template <class S>
FiltrationGradient filtration_gradient(const WeightedGraph& graph, const Filtration& f,
                                       const PersistentCocycle<S>& cocycle);

}  // namespace plh
