#pragma once

// Sparse column-major matrices over a pluggable field and the left-to-right
// column reduction used by every persistence computation in the library.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "plh/errors.hpp"
#include "plh/field.hpp"

namespace plh {

using Index = std::size_t;
inline constexpr Index kNoIndex = std::numeric_limits<Index>::max();

template <class S>
struct Entry {
  Index index;
  S value;

  bool operator==(const Entry&) const = default;
};

/// Sorted by index, no stored zeros.
template <class S>
using SparseVector = std::vector<Entry<S>>;

template <class S>
const S* find_entry(const SparseVector<S>& v, Index i) {
  auto it = std::lower_bound(v.begin(), v.end(), i,
                             [](const Entry<S>& e, Index k) { return e.index < k; });
  return (it != v.end() && it->index == i) ? &it->value : nullptr;
}

template <class S>
class SparseColumnMatrix {
 public:
  SparseColumnMatrix() = default;
  SparseColumnMatrix(Index rows, Index cols) : rows_(rows), columns_(cols) {}

  static SparseColumnMatrix identity(Index n) {
    SparseColumnMatrix m(n, n);
    for (Index i = 0; i < n; ++i) m.columns_[i].push_back({i, S(1)});
    return m;
  }

  Index rows() const { return rows_; }
  Index cols() const { return columns_.size(); }

  const SparseVector<S>& column(Index j) const { return columns_.at(j); }

  /// Replaces column j. Entries must be strictly increasing, in range and nonzero.
  void set_column(Index j, SparseVector<S> col) {
    if (j >= columns_.size()) throw ContractError("set_column: column index out of range");
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i].index >= rows_) throw ContractError("set_column: row index out of range");
      if (i > 0 && col[i - 1].index >= col[i].index)
        throw ContractError("set_column: row indices must be strictly increasing");
      if (col[i].value == 0) throw ContractError("set_column: stored zero");
    }
    columns_[j] = std::move(col);
  }

  Index nonzeros() const {
    Index n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
  }

  /// Transpose, used by tests and the oracle-facing rank checks.
  SparseColumnMatrix transpose() const {
    SparseColumnMatrix t(cols(), rows_);
    for (Index j = 0; j < cols(); ++j)
      for (const auto& e : columns_[j]) t.columns_[e.index].push_back({j, e.value});
    return t;
  }

  bool operator==(const SparseColumnMatrix&) const = default;

 private:
  Index rows_ = 0;
  std::vector<SparseVector<S>> columns_;
};

template <class S>
struct Reduction {
  SparseColumnMatrix<S> reduced;    // R
  SparseColumnMatrix<S> transform;  // V, with R = M V
  std::vector<Index> pivot_row;     // per column; kNoIndex for zero columns
  std::vector<Index> pivot_owner;   // per row; kNoIndex if no column has that pivot

  std::optional<Index> pivot_of(Index col) const {
    return pivot_row[col] == kNoIndex ? std::nullopt : std::optional<Index>(pivot_row[col]);
  }
  std::optional<Index> column_with_pivot(Index row) const {
    return pivot_owner[row] == kNoIndex ? std::nullopt : std::optional<Index>(pivot_owner[row]);
  }
  Index rank() const {
    return static_cast<Index>(std::count_if(pivot_row.begin(), pivot_row.end(),
                                            [](Index r) { return r != kNoIndex; }));
  }
};

template <class S>
struct ReduceOptions {
  /// Columns known in advance to reduce to zero ("clearing"). Each entry gives
  /// the column index and the transform column stored for it: a kernel vector
  /// of M whose largest index is that column. Sorted by column.
  std::vector<std::pair<Index, SparseVector<S>>> cleared;
};

namespace detail {

inline double max_magnitude(const SparseVector<double>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e.value));
  return m;
}

// target - coeff * source, exact.
inline SparseVector<mpq_class> combine(const ExactField&, const SparseVector<mpq_class>& target,
                                       const mpq_class& coeff,
                                       const SparseVector<mpq_class>& source) {
  SparseVector<mpq_class> out;
  out.reserve(target.size() + source.size());
  auto a = target.begin();
  auto b = source.begin();
  while (a != target.end() || b != source.end()) {
    if (b == source.end() || (a != target.end() && a->index < b->index)) {
      out.push_back(*a++);
    } else if (a == target.end() || b->index < a->index) {
      out.push_back({b->index, -coeff * b->value});
      ++b;
    } else {
      mpq_class v = a->value - coeff * b->value;
      if (sgn(v) != 0) out.push_back({a->index, std::move(v)});
      ++a;
      ++b;
    }
  }
  return out;
}

// target - coeff * source in binary64. Entries at or below eps times the
// operand scale are treated as cancelled.
inline SparseVector<double> combine(const FloatField& field, const SparseVector<double>& target,
                                    double coeff, const SparseVector<double>& source) {
  const double scale = std::max(max_magnitude(target), std::abs(coeff) * max_magnitude(source));
  const double tol = field.eps * scale;
  SparseVector<double> out;
  out.reserve(target.size() + source.size());
  auto push = [&](Index i, double v) {
    if (std::abs(v) > tol) out.push_back({i, v});
  };
  auto a = target.begin();
  auto b = source.begin();
  while (a != target.end() || b != source.end()) {
    if (b == source.end() || (a != target.end() && a->index < b->index)) {
      push(a->index, a->value);
      ++a;
    } else if (a == target.end() || b->index < a->index) {
      push(b->index, -coeff * b->value);
      ++b;
    } else {
      push(a->index, a->value - coeff * b->value);
      ++a;
      ++b;
    }
  }
  return out;
}

inline void check_conditioning(const ExactField&, const SparseVector<mpq_class>&) {}

inline void check_conditioning(const FloatField& field, const SparseVector<double>& v) {
  const double limit = 1.0 / field.eps;
  for (const auto& e : v)
    if (!(std::abs(e.value) <= limit))
      throw IllConditionedError("float reduction produced an entry of magnitude " +
                                std::to_string(e.value) + " beyond 1/eps");
}

}  // namespace detail

/// Standard column reduction: columns left to right, each column's lowest
/// nonzero (largest row index) is eliminated against the earlier column that
/// owns that pivot until it is new or the column vanishes.
template <class Field>
Reduction<typename Field::Scalar> reduce(const SparseColumnMatrix<typename Field::Scalar>& m,
                                         const Field& field,
                                         const ReduceOptions<typename Field::Scalar>& options = {}) {
  using S = typename Field::Scalar;
  const Index n = m.cols();
  Reduction<S> out;
  out.reduced = SparseColumnMatrix<S>(m.rows(), n);
  out.transform = SparseColumnMatrix<S>(n, n);
  out.pivot_row.assign(n, kNoIndex);
  out.pivot_owner.assign(m.rows(), kNoIndex);

  std::vector<SparseVector<S>> r_cols(n);
  std::vector<SparseVector<S>> v_cols(n);
  auto cleared = options.cleared.begin();

  for (Index j = 0; j < n; ++j) {
    while (cleared != options.cleared.end() && cleared->first < j) ++cleared;
    if (cleared != options.cleared.end() && cleared->first == j) {
      v_cols[j] = cleared->second;
      continue;
    }
    SparseVector<S> r = m.column(j);
    if constexpr (std::is_same_v<S, double>) {
      // Drop input entries that are already within tolerance of zero.
      const double tol = field.eps * detail::max_magnitude(r);
      std::erase_if(r, [&](const Entry<S>& e) { return std::abs(e.value) <= tol; });
    }
    SparseVector<S> v{{j, field.one()}};
    while (!r.empty()) {
      const Index low = r.back().index;
      const Index owner = out.pivot_owner[low];
      if (owner == kNoIndex) break;
      const S coeff = S(r.back().value / r_cols[owner].back().value);
      r = detail::combine(field, r, coeff, r_cols[owner]);
      // The pivot entry cancels by construction; remove any rounding residue.
      if (!r.empty() && r.back().index == low) r.pop_back();
      v = detail::combine(field, v, coeff, v_cols[owner]);
      detail::check_conditioning(field, r);
      detail::check_conditioning(field, v);
    }
    if (!r.empty()) {
      out.pivot_row[j] = r.back().index;
      out.pivot_owner[r.back().index] = j;
    }
    r_cols[j] = std::move(r);
    v_cols[j] = std::move(v);
  }
  for (Index j = 0; j < n; ++j) {
    out.reduced.set_column(j, std::move(r_cols[j]));
    out.transform.set_column(j, std::move(v_cols[j]));
  }
  return out;
}

template <class Field>
Index rank(const SparseColumnMatrix<typename Field::Scalar>& m, const Field& field) {
  return reduce(m, field).rank();
}

/// Submatrix on the given row and column index sets; survivors are
/// re-enumerated in their original order. Duplicates are ignored.
template <class S>
SparseColumnMatrix<S> restrict_rows_cols(const SparseColumnMatrix<S>& m,
                                         std::vector<Index> keep_rows,
                                         std::vector<Index> keep_cols) {
  auto normalize = [](std::vector<Index>& v, Index bound, const char* what) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (!v.empty() && v.back() >= bound)
      throw ContractError(std::string("restrict_rows_cols: ") + what + " index out of range");
  };
  normalize(keep_rows, m.rows(), "row");
  normalize(keep_cols, m.cols(), "column");
  std::vector<Index> new_row(m.rows(), kNoIndex);
  for (Index i = 0; i < keep_rows.size(); ++i) new_row[keep_rows[i]] = i;

  SparseColumnMatrix<S> out(keep_rows.size(), keep_cols.size());
  for (Index j = 0; j < keep_cols.size(); ++j) {
    SparseVector<S> col;
    for (const auto& e : m.column(keep_cols[j]))
      if (new_row[e.index] != kNoIndex) col.push_back({new_row[e.index], e.value});
    out.set_column(j, std::move(col));
  }
  return out;
}

/// Sparse product a * b; exact for rationals, plain accumulation for floats.
template <class S>
SparseColumnMatrix<S> multiply(const SparseColumnMatrix<S>& a, const SparseColumnMatrix<S>& b) {
  if (a.cols() != b.rows()) throw ContractError("multiply: inner dimension mismatch");
  SparseColumnMatrix<S> out(a.rows(), b.cols());
  std::vector<S> acc(a.rows(), S(0));
  std::vector<char> touched(a.rows(), 0);
  for (Index j = 0; j < b.cols(); ++j) {
    std::vector<Index> rows;
    for (const auto& eb : b.column(j))
      for (const auto& ea : a.column(eb.index)) {
        if (!touched[ea.index]) {
          touched[ea.index] = 1;
          rows.push_back(ea.index);
        }
        acc[ea.index] += ea.value * eb.value;
      }
    std::sort(rows.begin(), rows.end());
    SparseVector<S> col;
    for (Index r : rows) {
      if (acc[r] != 0) col.push_back({r, acc[r]});
      acc[r] = S(0);
      touched[r] = 0;
    }
    out.set_column(j, std::move(col));
  }
  return out;
}

/// MatrixMarket coordinate dump (1-based, general) for external checkers.
template <class S>
void write_matrix_market(std::ostream& os, const SparseColumnMatrix<S>& m) {
  char buf[64];
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonzeros() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
    for (const auto& e : m.column(j)) {
      std::snprintf(buf, sizeof buf, "%.17g", to_double(e.value));
      os << e.index + 1 << ' ' << j + 1 << ' ' << buf << '\n';
    }
}

}  // namespace plh
