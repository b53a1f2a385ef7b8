#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "plh/complex.hpp"
#include "plh/persistence.hpp"

namespace plh {

/// Persistent local cohomology of one vertex: the classes of
/// H^k(S_t, S_t \ st v) for 1 <= k <= max_order, indices global. Order 0 is
/// left out; the only local H^0 classes are transient ones that record the
/// vertex being isolated before its first edge arrives.
template <class S>
struct LocalStalk {
  Vertex vertex = 0;
  int max_order = 0;
  std::vector<PersistentCocycle<S>> cocycles;  // sorted by (order, birth_index)
  Truncation truncation;

  /// Positions in `cocycles` of the order-k classes, in stored order.
  std::vector<Index> basis(int k) const {
    std::vector<Index> out;
    for (Index i = 0; i < cocycles.size(); ++i)
      if (cocycles[i].order == k) out.push_back(i);
    return out;
  }
  std::size_t dim(int k) const { return basis(k).size(); }
};

template <class Field>
LocalStalk<typename Field::Scalar> compute_stalk(const Filtration& f, Vertex v, int max_order,
                                                 int rings, const Field& field);

/// Stalks for every vertex, computed on `threads` workers; result is indexed
/// by vertex and independent of the thread count.
template <class Field>
std::vector<LocalStalk<typename Field::Scalar>> compute_all_stalks(const Filtration& f,
                                                                   int max_order, int rings,
                                                                   const Field& field,
                                                                   unsigned threads = 1);

enum class RowGroup { d_cochain = 1, a_coboundary = 2, b_coboundary = 3 };

struct ColumnSource {
  bool from_stalk = false;
  Index simplex = 0;     // (k-1)-simplex of D' for coboundary columns
  Vertex owner = 0;      // stalk columns: u or v
  Index local_index = 0; // stalk columns: position in the owner's order-k basis
};

/// Rows are ordered by (simplex index descending, row group), so the lowest
/// nonzero of a reduced column is the earliest simplex that violates it.
template <class S>
struct ExtendedCoboundaryMatrix {
  Vertex u = 0;
  Vertex v = 0;
  int order = 0;
  SparseColumnMatrix<S> matrix;
  std::vector<Index> row_simplex;
  std::vector<RowGroup> row_group;
  std::vector<ColumnSource> columns;
  Index d_columns = 0;  // columns [0, d_columns) form the D' coboundary block

  Index ab_columns() const { return columns.size() - d_columns; }
};

template <class S>
ExtendedCoboundaryMatrix<S> build_extended_matrix(const LocalStalk<S>& stalk_u,
                                                  const LocalStalk<S>& stalk_v,
                                                  const Filtration& f, int k);

template <class S>
struct LaplacianAtom {
  SparseVector<S> v_a;  // over u's order-k basis
  SparseVector<S> v_b;  // over v's order-k basis
  double start = 0.0;
  double end = kInfinity;
};

struct Interval {
  double start = 0.0;
  double end = 0.0;
  bool empty() const { return !(start < end); }
  double length() const { return empty() ? 0.0 : end - start; }
  bool contains(double t) const { return start <= t && t < end; }
};

template <class S>
struct SheafLaplacianBlock {
  Vertex u = 0;
  Vertex v = 0;
  int order = 0;
  std::size_t dim_u = 0;
  std::size_t dim_v = 0;
  std::vector<Interval> life_u;  // lifespans of u's order-k classes
  std::vector<Interval> life_v;
  std::vector<LaplacianAtom<S>> atoms;

  /// Interval of entry (a, b) of atom i: the atom interval cut by both lifespans.
  Interval entry_interval(Index atom, Index a, Index b) const;
};

template <class Field>
SheafLaplacianBlock<typename Field::Scalar> sheaf_laplacian_block(
    const LocalStalk<typename Field::Scalar>& stalk_u,
    const LocalStalk<typename Field::Scalar>& stalk_v, const Filtration& f, int k,
    const Field& field);

/// Dense row-major matrix.
template <class S>
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<S> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, S(0)) {}
  S& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const S& at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool operator==(const DenseMatrix&) const = default;
};

/// Sum over atoms alive at t of v_a|_t (v_b|_t)^T, dim_u x dim_v.
template <class S>
DenseMatrix<S> laplacian_at_time(const SheafLaplacianBlock<S>& block, double t);

struct LaplacianMode {
  enum class Kind { slice, weighted } kind = Kind::slice;
  double time = 0.0;  // slice only

  static LaplacianMode slice(double t) { return {Kind::slice, t}; }
  static LaplacianMode weighted() { return {Kind::weighted, 0.0}; }
};

/// The order-k classes of all stalks laid out vertex by vertex.
struct StalkLayout {
  std::vector<std::size_t> offsets;  // per vertex, plus a final total
  std::size_t total() const { return offsets.empty() ? 0 : offsets.back(); }
};

template <class S>
StalkLayout stalk_layout(const std::vector<LocalStalk<S>>& stalks, int k);

/// Slice mode acts on the classes alive at the slice time (`coords` lists
/// their positions in the full layout) and equals delta^T delta for that
/// slice. Weighted mode acts on every coordinate and scales entry (p, q) of
/// each atom contribution by |I_atom n I_p n I_q| / |I_p|.
template <class S>
struct AssembledLaplacian {
  int order = 0;
  LaplacianMode mode;
  StalkLayout layout;
  std::vector<Index> coords;
  DenseMatrix<S> matrix;

  std::size_t dim() const { return coords.size(); }
};

/// Blocks for every edge {u, v} (u < v) of the complex, in edge order.
template <class Field>
std::vector<SheafLaplacianBlock<typename Field::Scalar>> compute_all_blocks(
    const Filtration& f, const std::vector<LocalStalk<typename Field::Scalar>>& stalks, int k,
    const Field& field, unsigned threads = 1);

template <class S>
AssembledLaplacian<S> assemble_laplacian(const Filtration& f,
                                         const std::vector<LocalStalk<S>>& stalks,
                                         const std::vector<SheafLaplacianBlock<S>>& blocks,
                                         int k, LaplacianMode mode);

/// Convenience: blocks are computed first.
template <class Field>
AssembledLaplacian<typename Field::Scalar> assemble_laplacian(
    const Filtration& f, const std::vector<LocalStalk<typename Field::Scalar>>& stalks, int k,
    LaplacianMode mode, const Field& field, unsigned threads = 1);

AssembledLaplacian<double> to_double(const AssembledLaplacian<mpq_class>& l);
inline const AssembledLaplacian<double>& to_double(const AssembledLaplacian<double>& l) {
  return l;
}

}  // namespace plh
