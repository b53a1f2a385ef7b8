#include "plh/nn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

namespace plh {

double activate(Activation a, double x) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::tanh: return std::tanh(x);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "identity";
}

Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ContractError("unknown activation '" + name + "'");
}

// --- Mlp ---------------------------------------------------------------------------

Mlp::Mlp(std::vector<std::size_t> widths, Activation activation)
    : widths_(std::move(widths)), activation_(activation) {
  if (widths_.size() < 2) throw ContractError("Mlp: need at least input and output widths");
  for (auto w : widths_)
    if (w == 0) throw ContractError("Mlp: zero width");
  params_.assign(parameter_count(), 0.0);
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) n += widths_[l + 1] * (widths_[l] + 1);
  return n;
}

Mlp Mlp::seeded(std::vector<std::size_t> widths, Activation activation, std::uint64_t seed) {
  Mlp m(std::move(widths), activation);
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < m.widths_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.widths_[l]));
    for (std::size_t i = 0; i < m.widths_[l + 1] * m.widths_[l]; ++i)
      m.params_[p++] = (2.0 * unit() - 1.0) * bound;
    p += m.widths_[l + 1];  // biases stay zero
  }
  return m;
}

Mlp Mlp::default_psi(std::uint64_t seed) { return seeded({6, 16, 16, 1}, Activation::tanh, seed); }

void Mlp::set_parameters(std::vector<double> p) {
  if (p.size() != parameter_count())
    throw ContractError("Mlp: expected " + std::to_string(parameter_count()) + " parameters, got " +
                        std::to_string(p.size()));
  params_ = std::move(p);
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  return jvp(input, {}, {});
}

std::vector<double> Mlp::jvp(std::span<const double> input, std::span<const double> d_input,
                             std::span<const double> d_params) const {
  if (widths_.empty()) throw ContractError("Mlp: uninitialised network");
  if (input.size() != widths_[0])
    throw ContractError("Mlp: input has size " + std::to_string(input.size()) + ", expected " +
                        std::to_string(widths_[0]));
  if (!d_input.empty() && d_input.size() != input.size())
    throw ContractError("Mlp: input direction has the wrong size");
  if (!d_params.empty() && d_params.size() != params_.size())
    throw ContractError("Mlp: parameter direction has the wrong size");
  const bool tangent = !d_input.empty() || !d_params.empty();

  std::vector<double> x(input.begin(), input.end());
  std::vector<double> dx(x.size(), 0.0);
  if (!d_input.empty()) dx.assign(d_input.begin(), d_input.end());

  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double* w = params_.data() + p;
    const double* b = w + out * in;
    const double* dw = d_params.empty() ? nullptr : d_params.data() + p;
    const double* db = dw ? dw + out * in : nullptr;
    std::vector<double> z(out), dz(out, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      double s = b[i], ds = db ? db[i] : 0.0;
      for (std::size_t j = 0; j < in; ++j) {
        s += w[i * in + j] * x[j];
        if (tangent) ds += w[i * in + j] * dx[j] + (dw ? dw[i * in + j] * x[j] : 0.0);
      }
      z[i] = s;
      dz[i] = ds;
    }
    p += out * (in + 1);
    if (l + 2 < widths_.size())
      for (std::size_t i = 0; i < out; ++i) {
        dz[i] *= activate_derivative(activation_, z[i]);
        z[i] = activate(activation_, z[i]);
      }
    x = std::move(z);
    dx = std::move(dz);
  }
  return tangent ? dx : x;
}

// --- descriptors and hypernetwork ----------------------------------------------------

template <class S>
std::vector<Descriptor> stalk_descriptors(const LocalStalk<S>& stalk, int k, double horizon) {
  std::vector<Descriptor> out;
  for (Index i : stalk.basis(k)) {
    const auto& c = stalk.cocycles[i];
    out.push_back({static_cast<double>(c.order), c.birth, std::min(c.death, horizon)});
  }
  return out;
}

template std::vector<Descriptor> stalk_descriptors(const LocalStalk<mpq_class>&, int, double);
template std::vector<Descriptor> stalk_descriptors(const LocalStalk<double>&, int, double);

std::vector<double> hypernet_weights(const std::vector<Descriptor>& d,
                                     const DescriptorFunction& psi) {
  const std::size_t n = d.size();
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = psi(d[i], d[j]);
  return w;
}

namespace {

std::array<double, 6> psi_input(const Descriptor& a, const Descriptor& b) {
  return {a.order, a.birth, a.death, b.order, b.birth, b.death};
}

}  // namespace

std::vector<double> hypernet_weights(const std::vector<Descriptor>& d, const Mlp& psi) {
  if (psi.widths().front() != 6 || psi.widths().back() != 1)
    throw ContractError("hypernet_weights: psi must map 6 inputs to 1 output");
  return hypernet_weights(d, [&](const Descriptor& a, const Descriptor& b) {
    const auto in = psi_input(a, b);
    return psi.forward(in)[0];
  });
}

// --- sign-equivariant layers ----------------------------------------------------------

std::vector<double> sign_equivariant_layer(
    std::span<const double> x,
    const std::function<std::vector<double>(std::span<const double>)>& rho) {
  std::vector<double> ax(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ax[i] = std::abs(x[i]);
  auto g = rho(ax);
  if (g.size() != x.size())
    throw ContractError("sign_equivariant_layer: rho returned " + std::to_string(g.size()) +
                        " gains for a vector of size " + std::to_string(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) g[i] *= x[i];
  return g;
}

std::vector<double> GainMap::operator()(std::span<const double> y) const {
  const std::size_t n = dim();
  if (y.size() != n || weights.size() != n * n)
    throw ContractError("GainMap: shape mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = bias[i];
    for (std::size_t j = 0; j < n; ++j) s += weights[i * n + j] * y[j];
    out[i] = activate(activation, s);
  }
  return out;
}

std::vector<double> sign_equivariant_layer(std::span<const double> x, const GainMap& rho) {
  return sign_equivariant_layer(x, [&](std::span<const double> y) { return rho(y); });
}

GainMap PsiLayer::gains(const std::vector<Descriptor>& d) const {
  GainMap g;
  g.weights = hypernet_weights(d, psi);
  g.bias = bias.empty() ? std::vector<double>(d.size(), 0.0) : bias;
  if (g.bias.size() != d.size()) throw ContractError("PsiLayer: bias has the wrong size");
  g.activation = activation;
  return g;
}

std::vector<double> PsiLayer::forward(std::span<const double> x,
                                      const std::vector<Descriptor>& d) const {
  if (x.size() != d.size()) throw ContractError("PsiLayer: feature and descriptor sizes differ");
  return sign_equivariant_layer(x, gains(d));
}

std::vector<double> PsiLayer::jvp(std::span<const double> x, const std::vector<Descriptor>& d,
                                  std::span<const double> dx,
                                  std::span<const double> d_params) const {
  const std::size_t n = d.size();
  if (x.size() != n || (!dx.empty() && dx.size() != n))
    throw ContractError("PsiLayer: feature and descriptor sizes differ");
  const GainMap g = gains(d);
  std::vector<double> dw(n * n, 0.0);
  if (!d_params.empty())
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto in = psi_input(d[i], d[j]);
        dw[i * n + j] = psi.jvp(in, {}, d_params)[0];
      }
  // psi(x)_i = x_i act(z_i), z = W|x| + b, d|x_j| = sign(x_j) dx_j.
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = g.bias[i], dz = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::abs(x[j]);
      z += g.weights[i * n + j] * a;
      dz += dw[i * n + j] * a;
      if (!dx.empty()) dz += g.weights[i * n + j] * (x[j] < 0 ? -dx[j] : x[j] > 0 ? dx[j] : 0.0);
    }
    const double di = dx.empty() ? 0.0 : dx[i];
    out[i] = di * activate(activation, z) + x[i] * activate_derivative(activation, z) * dz;
  }
  return out;
}

// --- filtration gradients -------------------------------------------------------------

SparseVector<double> value_gradient(const WeightedGraph& graph, const Filtration& f,
                                    Index simplex) {
  const auto& vs = f.simplex(simplex).vertices;
  if (vs.size() < 2) return {};
  std::map<std::pair<Vertex, Vertex>, Index> edge_of;
  for (Index e = 0; e < graph.edges.size(); ++e) {
    const auto& we = graph.edges[e];
    edge_of[{std::min(we.u, we.v), std::max(we.u, we.v)}] = e;
  }
  std::optional<Index> best;
  std::pair<Vertex, Vertex> best_key;
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      const auto it = edge_of.find({vs[a], vs[b]});
      if (it == edge_of.end()) throw LookupError("value_gradient: simplex edge missing from graph");
      const double w = graph.edges[it->second].weight;
      if (!best || w > graph.edges[*best].weight ||
          (w == graph.edges[*best].weight && it->first > best_key)) {
        best = it->second;
        best_key = it->first;
      }
    }
  return {{*best, 1.0}};
}

template <class S>
FiltrationGradient filtration_gradient(const WeightedGraph& graph, const Filtration& f,
                                       const PersistentCocycle<S>& cocycle) {
  FiltrationGradient g;
  g.birth = value_gradient(graph, f, cocycle.birth_index);
  if (cocycle.death_index) g.death = value_gradient(graph, f, *cocycle.death_index);
  return g;
}

template FiltrationGradient filtration_gradient(const WeightedGraph&, const Filtration&,
                                                const PersistentCocycle<mpq_class>&);
template FiltrationGradient filtration_gradient(const WeightedGraph&, const Filtration&,
                                                const PersistentCocycle<double>&);

}  // namespace plh
