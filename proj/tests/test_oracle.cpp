#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "plh/fixtures.hpp"
#include "plh/oracle.hpp"
#include "support.hpp"

using namespace plh;
using support::sx;

namespace {

SimplexSubset closed_of(const Filtration& f, std::vector<std::vector<Vertex>> tuples) {
  std::vector<Index> ids;
  for (auto& t : tuples) ids.push_back(f.index_of(sx(t)));
  std::sort(ids.begin(), ids.end());
  return closure(f, SimplexSubset::make(f, ids));
}

SimplexSubset vstar(const Filtration& f, std::vector<Vertex> vs) { return vertex_star(f, vs); }

std::size_t kernel_dim(const oracle::DenseMatrix& m) { return m.cols - oracle::rank(m); }

}  // namespace

TEST_CASE("dense linear algebra") {
  oracle::DenseMatrix m(2, 3);
  m.at(0, 0) = 1;
  m.at(0, 1) = 2;
  m.at(1, 0) = 2;
  m.at(1, 1) = 4;
  m.at(1, 2) = 1;
  CHECK(oracle::rank(m) == 2);
  const auto n = oracle::nullspace(m);
  REQUIRE(n.cols == 1);
  const auto z = oracle::multiply(m, n);
  for (const auto& x : z.data) CHECK(x == 0);
  CHECK(oracle::multiply(m, m.transpose()).symmetric());
  CHECK_THROWS_AS(oracle::multiply(m, m), ContractError);
}

TEST_CASE("Betti fixtures") {
  const auto c4 = build_flag_complex(fixtures::cycle(4), 2);
  CHECK(oracle::betti_dense(c4, 1.0, 0) == 1);
  CHECK(oracle::betti_dense(c4, 1.0, 1) == 1);
  CHECK(oracle::betti_dense(c4, 0.0, 0) == 4);
  const auto oct = build_flag_complex(fixtures::octahedron(), 3);
  CHECK(oracle::betti_dense(oct, 1.0, 0) == 1);
  CHECK(oracle::betti_dense(oct, 1.0, 1) == 0);
  CHECK(oracle::betti_dense(oct, 1.0, 2) == 1);
  const auto point = build_flag_complex(WeightedGraph{1, {}}, 1);
  CHECK(oracle::betti_dense(point, 0.0, 0) == 1);
  CHECK(oracle::betti_dense(point, -1.0, 0) == 0);
  const auto k4 = build_flag_complex(fixtures::complete(4), 3);
  for (int k = 1; k <= 2; ++k) CHECK(oracle::betti_dense(k4, 1.0, k) == 0);
  const auto two = build_flag_complex(fixtures::disjoint_union(fixtures::cycle(4), fixtures::cycle(4)), 2);
  CHECK(oracle::betti_dense(two, 1.0, 0) == 2);
  CHECK(oracle::betti_dense(two, 1.0, 1) == 2);
}

TEST_CASE("relative Betti fixtures") {
  SUBCASE("K3 relative to the edge opposite a vertex") {
    const auto f = build_flag_complex(fixtures::complete(3), 2);
    const auto a = closed_of(f, {{1, 2}});
    for (int k = 0; k <= 2; ++k) CHECK(oracle::relative_betti_dense(f, 1.0, a, k) == 0);
  }
  SUBCASE("closed star of a C4 vertex relative to its endpoints") {
    // cl st v in C4 is the path 1-0-3; relabelled as 0-1-2 with endpoints 0, 2.
    const auto f = build_flag_complex(fixtures::path(3), 2);
    const auto a = closed_of(f, {{0}, {2}});
    CHECK(oracle::relative_betti_dense(f, 1.0, a, 1) == 1);
    CHECK(oracle::relative_betti_dense(f, 1.0, a, 0) == 0);
  }
  SUBCASE("empty subcomplex gives absolute Betti numbers") {
    const auto corpus = support::load_corpus("random_graphs.json");
    for (std::size_t g = 0; g < corpus.graphs.size(); g += 20) {
      const auto f = build_flag_complex(corpus.graphs[g], corpus.max_dim);
      const auto empty = SimplexSubset::make(f, {});
      for (double t : f.critical_values())
        for (int k = 0; k <= 2; ++k)
          CHECK(oracle::relative_betti_dense(f, t, empty, k) == oracle::betti_dense(f, t, k));
    }
  }
  SUBCASE("non-closed subsets are rejected") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    const auto edge = SimplexSubset::make(f, {f.index_of(sx({0, 1}))});
    CHECK_THROWS_AS(oracle::relative_betti_dense(f, 1.0, edge, 1), ContractError);
    const auto vertex = SimplexSubset::make(f, {f.index_of(sx({0}))});
    CHECK_THROWS_AS(oracle::local_betti_dense(f, 1.0, vertex, 1), ContractError);
  }
}

TEST_CASE("Hodge Laplacian") {
  SUBCASE("graph Laplacian in degree 0") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    const auto l = oracle::hodge_laplacian_dense(f, 1.0, 0);
    REQUIRE(l.rows == 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const bool adjacent = (i + 1) % 4 == j || (j + 1) % 4 == i;
        CHECK(l.at(i, j) == (i == j ? 2 : adjacent ? -1 : 0));
      }
  }
  SUBCASE("kernel equals Betti") {
    for (const auto& fx : fixtures::golden()) {
      CAPTURE(fx.name);
      const auto f = build_flag_complex(fx.graph, fx.max_dim);
      for (double t : f.critical_values())
        for (int k = 0; k < fx.max_dim; ++k) {
          const auto l = oracle::hodge_laplacian_dense(f, t, k);
          CHECK(l.symmetric());
          CHECK(kernel_dim(l) == static_cast<std::size_t>(oracle::betti_dense(f, t, k)));
        }
    }
  }
}

TEST_CASE("Mayer-Vietoris exactness") {
  SUBCASE("A equals B") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    for (int k = 0; k <= 1; ++k) CHECK(oracle::check_mayer_vietoris(f, vstar(f, {0}), vstar(f, {0}), k).exact());
  }
  SUBCASE("C4 opposite stars") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    for (int k = 0; k <= 1; ++k) {
      const auto r = oracle::check_mayer_vietoris(f, vstar(f, {0}), vstar(f, {2}), k);
      CHECK(r.exact());
    }
  }
  SUBCASE("octahedron adjacent stars") {
    const auto f = build_flag_complex(fixtures::octahedron(), 3);
    for (int k = 0; k <= 2; ++k)
      CHECK(oracle::check_mayer_vietoris(f, vstar(f, {0}), vstar(f, {2}), k).exact());
  }
  SUBCASE("random graphs and open pairs") {
    const auto corpus = support::load_corpus("random_graphs.json");
    std::mt19937_64 rng(11);
    for (std::size_t g = 0; g < corpus.graphs.size(); g += 8) {
      const auto f = build_flag_complex(corpus.graphs[g], corpus.max_dim);
      const auto n = static_cast<Vertex>(f.vertex_count());
      std::vector<Vertex> a{static_cast<Vertex>(rng() % n)}, b{static_cast<Vertex>(rng() % n)};
      if (rng() % 2) b.push_back(static_cast<Vertex>(rng() % n));
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      const auto crit = f.critical_values();
      const double t = crit[rng() % crit.size()];
      for (int k = 0; k <= 1; ++k)
        CHECK(oracle::check_mayer_vietoris(f, vstar(f, a), vstar(f, b), k, t).exact());
    }
  }
  SUBCASE("non-open inputs are rejected") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    const auto vertex = SimplexSubset::make(f, {f.index_of(sx({0}))});
    CHECK_THROWS_AS(oracle::check_mayer_vietoris(f, vertex, vstar(f, {1}), 0), ContractError);
  }
}

TEST_CASE("restriction theorems") {
  SUBCASE("unit square: the class killed by the diagonal") {
    const auto f = build_flag_complex(fixtures::unit_square(), 2);
    const auto r = oracle::check_theorem_dies_earlier(f, vstar(f, {0}), 1);
    CHECK(r.pass);
    CHECK(r.hypothesis_fired >= 1);
    CHECK(r.steps_checked == f.size() - 1);
    CHECK(oracle::check_theorem_appears_earlier(f, vstar(f, {0}), 1).pass);
  }
  SUBCASE("C4") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    for (Vertex v = 0; v < 4; ++v) {
      CHECK(oracle::check_theorem_dies_earlier(f, vstar(f, {v}), 1).pass);
      const auto r = oracle::check_theorem_appears_earlier(f, vstar(f, {v}), 1);
      CHECK(r.pass);
      CHECK_FALSE(r.counterexample);
    }
  }
  SUBCASE("vacuous: K3 has no k=1 classes") {
    const auto f = build_flag_complex(fixtures::complete(3), 2);
    const auto r = oracle::check_theorem_dies_earlier(f, vstar(f, {0}), 1);
    CHECK(r.pass);
  }
  SUBCASE("non-open subsets are rejected") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    const auto vertex = SimplexSubset::make(f, {f.index_of(sx({0}))});
    CHECK_THROWS_AS(oracle::check_theorem_dies_earlier(f, vertex, 1), ContractError);
    CHECK_THROWS_AS(oracle::check_theorem_appears_earlier(f, vertex, 1), ContractError);
  }
}

TEST_CASE("excision") {
  SUBCASE("octahedron") {
    const auto f = build_flag_complex(fixtures::octahedron(), 3);
    for (Vertex v = 0; v < 6; ++v) {
      const auto r = oracle::excision_check(f, v, 2);
      CHECK(r.pass);
      REQUIRE(r.thresholds.size() == 2);
      CHECK(r.full.back() == 1);
      CHECK(r.local.back() == 1);
    }
  }
  SUBCASE("K3") {
    const auto f = build_flag_complex(fixtures::complete(3), 2);
    for (int k = 1; k <= 2; ++k) {
      const auto r = oracle::excision_check(f, 0, k);
      CHECK(r.pass);
      for (int x : r.full) CHECK(x == 0);
    }
    const auto r0 = oracle::excision_check(f, 0, 0);
    CHECK(r0.pass);
    CHECK(r0.full.back() == 0);
  }
  SUBCASE("isolated vertex") {
    const auto f = build_flag_complex(WeightedGraph{2, {}}, 1);
    const auto r = oracle::excision_check(f, 0, 0);
    CHECK(r.pass);
    CHECK(r.full == std::vector<int>{1});
    CHECK(r.local == std::vector<int>{1});
  }
  SUBCASE("unknown vertex") {
    const auto f = build_flag_complex(fixtures::cycle(4), 2);
    CHECK_THROWS_AS(oracle::excision_check(f, 9, 0), LookupError);
  }
}
