#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "plh/fixtures.hpp"
#include "plh/linalg.hpp"
#include "plh/oracle.hpp"
#include "plh/persistence.hpp"

using namespace plh;

namespace {

template <class S>
SparseColumnMatrix<S> from_dense(const std::vector<std::vector<long>>& rows) {
  const Index r = rows.size(), c = r ? rows[0].size() : 0;
  SparseColumnMatrix<S> m(r, c);
  for (Index j = 0; j < c; ++j) {
    SparseVector<S> col;
    for (Index i = 0; i < r; ++i)
      if (rows[i][j] != 0) col.push_back({i, S(rows[i][j])});
    m.set_column(j, col);
  }
  return m;
}

oracle::DenseMatrix to_oracle(const SparseColumnMatrix<mpq_class>& m) {
  oracle::DenseMatrix d(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (const auto& e : m.column(j)) d.at(e.index, j) = e.value;
  return d;
}

// Vertex-by-edge boundary of a graph, edges in the given order, rows by vertex id.
SparseColumnMatrix<mpq_class> graph_boundary(const WeightedGraph& g) {
  SparseColumnMatrix<mpq_class> m(g.vertex_count, g.edges.size());
  for (Index j = 0; j < g.edges.size(); ++j) {
    auto [a, b] = std::minmax(g.edges[j].u, g.edges[j].v);
    m.set_column(j, {{a, mpq_class(-1)}, {b, mpq_class(1)}});
  }
  return m;
}

std::vector<std::vector<long>> random_dense(std::mt19937_64& rng, int r, int c, double density) {
  std::uniform_int_distribution<long> val(-3, 3);
  std::bernoulli_distribution keep(density);
  std::vector<std::vector<long>> out(r, std::vector<long>(c, 0));
  for (auto& row : out)
    for (auto& x : row)
      if (keep(rng)) x = val(rng);
  return out;
}

}  // namespace

TEST_CASE("identity reduces to itself") {
  const auto id = SparseColumnMatrix<mpq_class>::identity(5);
  const auto red = reduce(id, ExactField{});
  CHECK(red.reduced == id);
  CHECK(red.transform == id);
  CHECK(red.rank() == 5);
}

TEST_CASE("single edge boundary is already reduced") {
  const auto m = from_dense<mpq_class>({{-1}, {1}});
  const auto red = reduce(m, ExactField{});
  CHECK(red.reduced == m);
  CHECK(red.transform == SparseColumnMatrix<mpq_class>::identity(1));
  CHECK(red.pivot_row[0] == 1);
  CHECK(red.column_with_pivot(1) == 0);
}

TEST_CASE("triangle boundary has one zero column carrying the cycle") {
  const auto m = graph_boundary(fixtures::complete(3));
  const auto red = reduce(m, ExactField{});
  CHECK(red.rank() == 2);
  CHECK(red.rank() == oracle::rank(to_oracle(m)));
  Index zero_col = kNoIndex;
  for (Index j = 0; j < 3; ++j)
    if (!red.pivot_of(j)) zero_col = j;
  REQUIRE(zero_col != kNoIndex);
  const auto& v = red.transform.column(zero_col);
  REQUIRE(v.size() == 3);
  for (const auto& e : v) CHECK(abs(e.value) == 1);
  CHECK(multiply(m, red.transform).column(zero_col).empty());
}

TEST_CASE("rank fixtures") {
  CHECK(rank(SparseColumnMatrix<mpq_class>(3, 4), ExactField{}) == 0);
  CHECK(rank(SparseColumnMatrix<double>::identity(6), FloatField{}) == 6);
  CHECK(rank(graph_boundary(fixtures::cycle(4)), ExactField{}) == 3);
  CHECK(oracle::rank(to_oracle(graph_boundary(fixtures::cycle(4)))) == 3);
}

TEST_CASE("restrict_rows_cols") {
  const auto m = graph_boundary(fixtures::complete(3));
  CHECK(restrict_rows_cols(m, {0, 1, 2}, {0, 1, 2}) == m);
  const auto none = restrict_rows_cols(m, {}, {});
  CHECK(none.rows() == 0);
  CHECK(none.cols() == 0);
  CHECK_THROWS_AS(restrict_rows_cols(m, {3}, {0}), ContractError);
  CHECK_THROWS_AS(restrict_rows_cols(m, {0}, {7}), ContractError);

  // Coboundary delta^0 of K3 restricted to st(v0) equals the relative
  // coboundary built directly from the definition.
  const auto f = build_flag_complex(fixtures::complete(3), 2);
  const auto all = whole(f);
  const auto st = star(f, Simplex{{0}});
  const auto full = coboundary_matrix<mpq_class>(f, 0, all);
  std::vector<Index> keep_rows, keep_cols;
  for (Index r = 0; r < full.row_simplex.size(); ++r)
    if (st.contains(full.row_simplex[r])) keep_rows.push_back(r);
  for (Index c = 0; c < full.column_simplex.size(); ++c)
    if (st.contains(full.column_simplex[c])) keep_cols.push_back(c);
  const auto restricted = restrict_rows_cols(full.matrix, keep_rows, keep_cols);
  // Directly: the only vertex in st(v0) is v0; its coboundary is -[01] - [02].
  REQUIRE(restricted.cols() == 1);
  REQUIRE(restricted.rows() == 2);
  CHECK(restricted.column(0) ==
        SparseVector<mpq_class>{{0, mpq_class(-1)}, {1, mpq_class(-1)}});
  CHECK(restricted == coboundary_matrix<mpq_class>(f, 0, st).matrix);
}

TEST_CASE("random matrices: R = M V, V unit upper triangular, pivots distinct") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + trial % 9, c = 1 + (trial * 7) % 11;
    const auto dense = random_dense(rng, r, c, 0.4);
    const auto m = from_dense<mpq_class>(dense);
    const auto red = reduce(m, ExactField{});
    CHECK(multiply(m, red.transform) == red.reduced);
    std::set<Index> pivots;
    for (Index j = 0; j < m.cols(); ++j) {
      const auto& v = red.transform.column(j);
      REQUIRE(!v.empty());
      CHECK(v.back().index == j);
      CHECK(v.back().value == 1);
      if (auto p = red.pivot_of(j)) {
        CHECK(pivots.insert(*p).second);
        CHECK(red.reduced.column(j).back().index == *p);
      } else {
        CHECK(red.reduced.column(j).empty());
      }
    }
    CHECK(red.rank() == oracle::rank(to_oracle(m)));
    CHECK(rank(m.transpose(), ExactField{}) == red.rank());

    // Float carrier: same pivots; residual within 8 eps ||M||.
    const auto mf = from_dense<double>(dense);
    const FloatField ff;
    const auto redf = reduce(mf, ff);
    CHECK(redf.pivot_row == red.pivot_row);
    const auto mv = multiply(mf, redf.transform);
    double norm = 0.0;
    for (Index j = 0; j < mf.cols(); ++j)
      for (const auto& e : mf.column(j)) norm = std::max(norm, std::abs(e.value));
    for (Index j = 0; j < mf.cols(); ++j) {
      std::vector<double> a(mf.rows(), 0.0);
      for (const auto& e : mv.column(j)) a[e.index] += e.value;
      for (const auto& e : redf.reduced.column(j)) a[e.index] -= e.value;
      double scale = 0.0;
      for (const auto& e : redf.transform.column(j)) scale = std::max(scale, std::abs(e.value));
      for (double x : a) CHECK(std::abs(x) <= 8 * ff.eps * norm * std::max(1.0, scale));
    }
  }
}

TEST_CASE("V is invertible") {
  std::mt19937_64 rng(5);
  const auto m = from_dense<mpq_class>(random_dense(rng, 8, 10, 0.5));
  const auto v = reduce(m, ExactField{}).transform;
  auto dense = to_oracle(v);
  CHECK(oracle::rank(dense) == v.cols());
  // Back substitution for V x = e_i succeeds.
  for (Index i = 0; i < v.cols(); ++i) {
    std::vector<mpq_class> x(v.cols(), 0), rhs(v.cols(), 0);
    rhs[i] = 1;
    for (Index j = v.cols(); j-- > 0;) {
      mpq_class acc = rhs[j];
      for (Index l = j + 1; l < v.cols(); ++l) acc -= dense.at(j, l) * x[l];
      REQUIRE(dense.at(j, j) != 0);
      x[j] = acc / dense.at(j, j);
    }
    for (Index row = 0; row < v.cols(); ++row) {
      mpq_class s = 0;
      for (Index l = 0; l < v.cols(); ++l) s += dense.at(row, l) * x[l];
      CHECK(s == rhs[row]);
    }
  }
}

TEST_CASE("clearing gives identical pivots and zero columns") {
  std::mt19937_64 rng(9);
  const auto m = from_dense<mpq_class>(random_dense(rng, 6, 8, 0.5));
  const auto plain = reduce(m, ExactField{});
  // Clear every zero column using its own kernel vector.
  ReduceOptions<mpq_class> opts;
  for (Index j = 0; j < m.cols(); ++j)
    if (!plain.pivot_of(j)) opts.cleared.emplace_back(j, plain.transform.column(j));
  const auto cleared = reduce(m, ExactField{}, opts);
  CHECK(cleared.pivot_row == plain.pivot_row);
  CHECK(multiply(m, cleared.transform) == cleared.reduced);
}

TEST_CASE("float reduction reports ill-conditioning") {
  SparseColumnMatrix<double> m(2, 2);
  m.set_column(0, {{0, 1e-6}, {1, 1e-6}});
  m.set_column(1, {{0, 1.0}, {1, 1e6}});
  CHECK_THROWS_AS(reduce(m, FloatField{}), IllConditionedError);
  SparseColumnMatrix<mpq_class> exact(2, 2);
  exact.set_column(0, {{0, mpq_class(1e-6)}, {1, mpq_class(1e-6)}});
  exact.set_column(1, {{0, mpq_class(1)}, {1, mpq_class(1000000)}});
  const auto red = reduce(exact, ExactField{});
  CHECK(red.rank() == 2);
  CHECK(multiply(exact, red.transform) == red.reduced);
}

TEST_CASE("set_column contract") {
  SparseColumnMatrix<double> m(3, 1);
  CHECK_THROWS_AS(m.set_column(0, {{1, 1.0}, {0, 1.0}}), ContractError);
  CHECK_THROWS_AS(m.set_column(0, {{3, 1.0}}), ContractError);
  CHECK_THROWS_AS(m.set_column(0, {{0, 0.0}}), ContractError);
  CHECK_THROWS_AS(m.set_column(1, {}), ContractError);
}

TEST_CASE("MatrixMarket dump") {
  const auto m = from_dense<mpq_class>({{1, 0}, {0, -2}});
  std::ostringstream os;
  write_matrix_market(os, m);
  CHECK(os.str() ==
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 -2\n");
}
