#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "plh/diffusion.hpp"
#include "plh/fixtures.hpp"
#include "plh/nn.hpp"
#include "plh/oracle.hpp"
#include "support.hpp"

using namespace plh;

namespace {

struct Operator {
  Filtration f;
  std::vector<LocalStalk<mpq_class>> stalks;
  AssembledLaplacian<mpq_class> exact;
  AssembledLaplacian<double> l;
};

Operator slice_operator(const WeightedGraph& g, int max_dim, int k) {
  Operator op;
  op.f = build_flag_complex(g, max_dim);
  op.stalks = compute_all_stalks(op.f, max_dim - 1, 1, ExactField{});
  op.exact = assemble_laplacian(op.f, op.stalks, k, LaplacianMode::slice(op.f.max_value()),
                                ExactField{});
  op.l = to_double(op.exact);
  return op;
}

std::vector<double> times(const AssembledLaplacian<double>& l, const std::vector<double>& x) {
  std::vector<double> y(l.dim(), 0.0);
  for (std::size_t i = 0; i < l.dim(); ++i)
    for (std::size_t j = 0; j < l.dim(); ++j) y[i] += l.matrix.at(i, j) * x[j];
  return y;
}

double norm(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Orthonormal kernel basis from the exact nullspace.
std::vector<std::vector<double>> kernel_basis(const AssembledLaplacian<mpq_class>& l) {
  const auto n = oracle::nullspace(support::to_oracle(l.matrix.data, l.dim(), l.dim()));
  std::vector<std::vector<double>> basis;
  for (std::size_t c = 0; c < n.cols; ++c) {
    std::vector<double> v(n.rows);
    for (std::size_t r = 0; r < n.rows; ++r) v[r] = n.at(r, c).get_d();
    for (const auto& b : basis) {
      double d = 0;
      for (std::size_t i = 0; i < v.size(); ++i) d += v[i] * b[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
    }
    const double nv = norm(v);
    for (auto& x : v) x /= nv;
    basis.push_back(v);
  }
  return basis;
}

std::size_t numerical_rank(std::vector<std::vector<double>> vs, double tol) {
  std::size_t rank = 0;
  std::vector<std::vector<double>> kept;
  for (auto v : vs) {
    for (const auto& b : kept) {
      double d = 0;
      for (std::size_t i = 0; i < v.size(); ++i) d += v[i] * b[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
    }
    const double nv = norm(v);
    if (nv > tol) {
      for (auto& x : v) x /= nv;
      kept.push_back(v);
      ++rank;
    }
  }
  return rank;
}

const WeightedGraph kTwoCycles = fixtures::disjoint_union(fixtures::cycle(4), fixtures::cycle(4));

}  // namespace

TEST_CASE("Dirichlet energy") {
  const auto op = slice_operator(fixtures::cycle(4), 2, 1);
  REQUIRE(op.l.dim() == 4);
  CHECK(dirichlet_energy(FeatureBundle::zeros(4, 2), op.l) == 0.0);
  auto indicator = FeatureBundle::zeros(4, 1);
  indicator.values[0] = 1.0;
  CHECK(dirichlet_energy(indicator, op.l) == doctest::Approx(2.0));
  const auto kernel = kernel_basis(op.exact);
  REQUIRE(kernel.size() == 1);
  FeatureBundle k{4, 1, kernel[0]};
  CHECK(std::abs(dirichlet_energy(k, op.l)) < 1e-15);
  CHECK_THROWS_AS(dirichlet_energy(FeatureBundle::zeros(3, 1), op.l), ContractError);
  FeatureBundle bad{4, 1, {0, 0, NAN, 0}};
  CHECK_THROWS_AS(dirichlet_energy(bad, op.l), ContractError);
}

TEST_CASE("power iteration") {
  const auto op = slice_operator(fixtures::cycle(4), 2, 1);
  CHECK(lambda_max(op.l) == doctest::Approx(4.0).epsilon(1e-10));
  const auto oct = slice_operator(fixtures::octahedron(), 3, 2);
  // Largest Rayleigh quotient over the exact eigenvectors is bounded by it.
  const double lm = lambda_max(oct.l);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(oct.l.dim());
    for (auto& v : x) v = normal(rng);
    const auto y = times(oct.l, x);
    double q = 0;
    for (std::size_t i = 0; i < x.size(); ++i) q += x[i] * y[i];
    CHECK(q <= lm * norm(x) * norm(x) * (1 + 1e-9));
  }
}

TEST_CASE("diffusion on C4 converges monotonically to the kernel") {
  const auto op = slice_operator(fixtures::cycle(4), 2, 1);
  const auto x0 = FeatureBundle::random(4, 1, 42);
  const double alpha = 0.9 / lambda_max(op.l);
  const auto r = diffuse(x0, op.l, alpha, 500);
  REQUIRE(r.energy.size() == 501);
  for (std::size_t s = 1; s < r.energy.size(); ++s) CHECK(r.energy[s] <= r.energy[s - 1]);
  CHECK(r.energy.back() < 1e-10);

  // The limit is the orthogonal projection onto the kernel.
  const auto kernel = kernel_basis(op.exact);
  double c = 0;
  for (std::size_t i = 0; i < 4; ++i) c += kernel[0][i] * x0.values[i];
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.features.values[i] == doctest::Approx(c * kernel[0][i]));

  const auto slow = diffuse(x0, op.l, 0.3, 500);
  CHECK(norm(times(op.l, slow.features.values)) < 1e-6);
}

TEST_CASE("diffusion limit dimension matches Betti numbers") {
  struct Case {
    WeightedGraph g;
    int max_dim, k;
    std::size_t beta;
  };
  for (const auto& c : {Case{fixtures::cycle(4), 2, 1, 1}, Case{kTwoCycles, 2, 1, 2},
                        Case{fixtures::octahedron(), 3, 2, 1}}) {
    const auto op = slice_operator(c.g, c.max_dim, c.k);
    const auto x0 = FeatureBundle::random(op.l.dim(), 6, 9);
    const auto r = diffuse(x0, op.l, 0.9 / lambda_max(op.l), 2000);
    std::vector<std::vector<double>> limits;
    for (std::size_t ch = 0; ch < 6; ++ch) {
      const auto xc = r.features.channel(ch);
      limits.emplace_back(xc.begin(), xc.end());
      CHECK(norm(times(op.l, limits.back())) < 1e-9);
    }
    CHECK(numerical_rank(limits, 1e-6) == c.beta);
  }
}

TEST_CASE("diffusion preconditions and fixed points") {
  const auto op = slice_operator(fixtures::cycle(4), 2, 1);
  const double lm = lambda_max(op.l);
  const auto x0 = FeatureBundle::random(4, 1, 1);
  CHECK_THROWS_AS(diffuse(x0, op.l, 0.0, 1), ContractError);
  CHECK_THROWS_AS(diffuse(x0, op.l, 2.0 / lm * 1.01, 1), ContractError);
  CHECK_THROWS_AS(diffuse(FeatureBundle::zeros(5, 1), op.l, 0.1, 1), ContractError);

  const auto kernel = kernel_basis(op.exact);
  // The exact kernel vector has entries +-1/2, so L x vanishes exactly.
  FeatureBundle k{4, 1, kernel[0]};
  CHECK(diffuse(k, op.l, 0.1, 100).features == k);
}

TEST_CASE("sign-equivariant layer") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  for (std::size_t n = 1; n <= 8; ++n)
    for (int draw = 0; draw < 100; ++draw) {
      GainMap rho;
      rho.weights.resize(n * n);
      rho.bias.resize(n);
      for (auto& w : rho.weights) w = normal(rng);
      for (auto& b : rho.bias) b = normal(rng);
      std::vector<double> x(n);
      for (auto& v : x) v = normal(rng);
      const auto y = sign_equivariant_layer(x, rho);
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        auto dx = x;
        for (std::size_t i = 0; i < n; ++i)
          if (mask >> i & 1) dx[i] = -dx[i];
        const auto dy = sign_equivariant_layer(dx, rho);
        for (std::size_t i = 0; i < n; ++i)
          CHECK(std::abs(dy[i] - ((mask >> i & 1) ? -y[i] : y[i])) <= 1e-12);
      }
    }

  GainMap one{std::vector<double>(9, 0.0), std::vector<double>(3, 1.0), Activation::identity};
  const std::vector<double> x{0.5, -2.0, 3.0};
  CHECK(sign_equivariant_layer(x, one) == x);
  CHECK(sign_equivariant_layer(std::vector<double>(3, 0.0), GainMap{std::vector<double>(9, 1.0),
                                                                     std::vector<double>(3, 1.0),
                                                                     Activation::tanh}) ==
        std::vector<double>(3, 0.0));
  CHECK_THROWS_AS(sign_equivariant_layer(x, [](std::span<const double>) {
                    return std::vector<double>(2, 1.0);
                  }),
                  ContractError);
}

TEST_CASE("hypernetwork weights") {
  const std::vector<Descriptor> d{{1, 0.5, 2.0}, {2, 1.0, 3.0}};
  CHECK(hypernet_weights(d, [](const Descriptor&, const Descriptor&) { return 0.0; }) ==
        std::vector<double>(4, 0.0));
  const auto w = hypernet_weights(
      d, [](const Descriptor& a, const Descriptor& b) { return a.order * b.order; });
  CHECK(w == std::vector<double>{1, 2, 2, 4});
  CHECK(hypernet_weights({}, Mlp::default_psi()).empty());

  const auto psi = Mlp::default_psi();
  CHECK(psi.parameter_count() == 6 * 16 + 16 + 16 * 16 + 16 + 16 + 1);
  CHECK(psi == Mlp::default_psi());
  CHECK_FALSE(psi == Mlp::default_psi(1));

  // Identical descriptor lists at different vertices share their weights.
  const auto f = build_flag_complex(fixtures::octahedron(), 3);
  const auto stalks = compute_all_stalks(f, 2, 1, ExactField{});
  const auto w0 = hypernet_weights(stalk_descriptors(stalks[0], 2, f.max_value()), psi);
  for (const auto& s : stalks)
    CHECK(hypernet_weights(stalk_descriptors(s, 2, f.max_value()), psi) == w0);

  // Permuting descriptors permutes rows and columns.
  const std::vector<Descriptor> e{{1, 0.25, 1.0}, {1, 0.5, 4.0}, {2, 1.0, 4.0}};
  const std::vector<std::size_t> perm{2, 0, 1};
  std::vector<Descriptor> ep;
  for (auto p : perm) ep.push_back(e[p]);
  const auto we = hypernet_weights(e, psi), wp = hypernet_weights(ep, psi);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(wp[i * 3 + j] == we[perm[i] * 3 + perm[j]]);
}

TEST_CASE("MLP and layer directional derivatives") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal;
  const auto psi = Mlp::default_psi();
  PsiLayer layer{psi, {0.1, -0.2, 0.3, 0.05}, Activation::tanh};
  const std::vector<Descriptor> d{{1, 0.5, 2}, {1, 1, 3}, {2, 0.25, 3}, {1, 2, 3}};
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> in(6), din(6), dp(psi.parameter_count());
    for (auto& v : in) v = normal(rng);
    for (auto& v : din) v = normal(rng);
    for (auto& v : dp) v = normal(rng);
    auto shifted = [&](double s) {
      Mlp m = psi;
      for (std::size_t i = 0; i < dp.size(); ++i) m.parameters()[i] += s * dp[i];
      std::vector<double> x = in;
      for (std::size_t i = 0; i < 6; ++i) x[i] += s * din[i];
      return m.forward(x)[0];
    };
    const double fd = (shifted(h) - shifted(-h)) / (2 * h);
    const double an = psi.jvp(in, din, dp)[0];
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));

    std::vector<double> x(4), dx(4);
    for (auto& v : x) v = normal(rng);
    for (auto& v : dx) v = normal(rng);
    auto layer_at = [&](double s) {
      PsiLayer l = layer;
      for (std::size_t i = 0; i < dp.size(); ++i) l.psi.parameters()[i] += s * dp[i];
      std::vector<double> xs = x;
      for (std::size_t i = 0; i < 4; ++i) xs[i] += s * dx[i];
      return l.forward(xs, d);
    };
    const auto plus = layer_at(h), minus = layer_at(-h);
    const auto jvp = layer.jvp(x, d, dx, dp);
    std::vector<double> diff(4), fdv(4);
    for (std::size_t i = 0; i < 4; ++i) {
      fdv[i] = (plus[i] - minus[i]) / (2 * h);
      diff[i] = fdv[i] - jvp[i];
    }
    CHECK(norm(diff) <= 1e-6 * std::max(1.0, norm(jvp)));
  }
}

TEST_CASE("filtration gradient fixtures") {
  const auto g = fixtures::unit_square();
  const auto f = build_flag_complex(g, 2);
  const auto d = persistent_cohomology(f, 1, ExactField{});
  const auto h1 = d.of_order(1);
  REQUIRE(h1.size() == 1);
  const auto grad = filtration_gradient(g, f, *h1[0]);
  REQUIRE(grad.birth.size() == 1);
  REQUIRE(grad.death);
  REQUIRE(grad.death->size() == 1);
  const auto& birth_edge = g.edges[grad.birth[0].index];
  const auto& death_edge = g.edges[(*grad.death)[0].index];
  CHECK(birth_edge.weight == 1.0);
  CHECK(grad.birth[0].value == 1.0);
  // Among the four unit sides the class is born with the last one, 23.
  CHECK(std::min(birth_edge.u, birth_edge.v) == 2);
  CHECK(std::max(birth_edge.u, birth_edge.v) == 3);
  CHECK(death_edge.weight == doctest::Approx(std::sqrt(2.0)));

  for (const auto* c : d.of_order(0)) {
    const auto g0 = filtration_gradient(g, f, *c);
    CHECK(g0.birth.empty());
    if (c->essential()) CHECK(g0.essential());
  }
}

TEST_CASE("filtration gradient matches central differences") {
  const auto corpus = support::load_corpus("tiefree_graphs.json");
  REQUIRE(corpus.graphs.size() == 50);
  const double h = 1e-5;
  std::size_t nonzero = 0;
  for (const auto& g : corpus.graphs) {
    const auto f = build_flag_complex(g, corpus.max_dim);
    const auto d = persistent_cohomology(f, corpus.max_dim - 1, FloatField{});
    for (Index e = 0; e < g.edges.size(); ++e) {
      auto gp = g, gm = g;
      gp.edges[e].weight += h;
      gm.edges[e].weight -= h;
      const auto fp = build_flag_complex(gp, corpus.max_dim);
      const auto fm = build_flag_complex(gm, corpus.max_dim);
      REQUIRE(fp.simplices() == f.simplices());
      REQUIRE(fm.simplices() == f.simplices());
      const auto dp = persistent_cohomology(fp, corpus.max_dim - 1, FloatField{});
      const auto dm = persistent_cohomology(fm, corpus.max_dim - 1, FloatField{});
      REQUIRE(dp.classes.size() == d.classes.size());
      for (std::size_t i = 0; i < d.classes.size(); ++i) {
        const auto& c = d.classes[i];
        REQUIRE(dp.classes[i].birth_index == c.birth_index);
        REQUIRE(dm.classes[i].birth_index == c.birth_index);
        const auto grad = filtration_gradient(g, f, c);
        auto entry = [&](const SparseVector<double>& v) {
          const double* x = find_entry(v, e);
          return x ? *x : 0.0;
        };
        const double fd_birth = (dp.classes[i].birth - dm.classes[i].birth) / (2 * h);
        CHECK(std::abs(fd_birth - entry(grad.birth)) <=
              1e-4 * std::max(1.0, std::abs(entry(grad.birth))));
        if (!c.essential()) {
          REQUIRE(grad.death);
          const double fd_death = (dp.classes[i].death - dm.classes[i].death) / (2 * h);
          CHECK(std::abs(fd_death - entry(*grad.death)) <=
                1e-4 * std::max(1.0, std::abs(entry(*grad.death))));
          if (entry(*grad.death) != 0) ++nonzero;
        } else {
          CHECK(grad.essential());
        }
      }
    }
  }
  CHECK(nonzero > 50);
}

TEST_CASE("message passing") {
  SUBCASE("empty stalks") {
    const auto f = build_flag_complex(fixtures::complete(3), 2);
    const auto stalks = compute_all_stalks(f, 1, 1, ExactField{});
    const auto blocks = compute_all_blocks(f, stalks, 1, ExactField{});
    const auto y = message_pass<ExactField>(FeatureBundle::zeros(0, 2), f, stalks, blocks, 1,
                                            LaplacianMode::weighted());
    CHECK(y.values.empty());
  }
  SUBCASE("C4 matches the hand-assembled operator") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    const auto stalks = compute_all_stalks(f, 1, 1, ExactField{});
    const auto blocks = compute_all_blocks(f, stalks, 1, ExactField{});
    // Every stalk and atom lives on [1, inf), so each atom enters with weight 1.
    double hand[4][4] = {};
    for (const auto& b : blocks) {
      REQUIRE(b.atoms.size() == 1);
      const double a = b.atoms[0].v_a[0].value.get_d(), c = b.atoms[0].v_b[0].value.get_d();
      hand[b.u][b.u] += a * a;
      hand[b.v][b.v] += c * c;
      hand[b.u][b.v] += a * c;
      hand[b.v][b.u] += a * c;
    }
    const auto y = message_pass<ExactField>(FeatureBundle{4, 1, {1, 1, 1, 1}}, f, stalks, blocks,
                                            1, LaplacianMode::weighted());
    for (std::size_t i = 0; i < 4; ++i) {
      double expect = 0;
      for (std::size_t j = 0; j < 4; ++j) expect += hand[i][j];
      CHECK(y.values[i] == expect);
    }
  }
  SUBCASE("channels are independent") {
    const auto op = slice_operator(kTwoCycles, 2, 1);
    const auto one = FeatureBundle::random(op.l.dim(), 1, 3);
    FeatureBundle two{one.dim, 2, one.values};
    two.values.insert(two.values.end(), one.values.begin(), one.values.end());
    const auto y1 = message_pass(one, op.l), y2 = message_pass(two, op.l);
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < one.dim; ++i) CHECK(y2.channel(c)[i] == y1.values[i]);
  }
}
