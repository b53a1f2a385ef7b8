#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "plh/complex.hpp"
#include "plh/linalg.hpp"

namespace plh {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

template <class S>
struct PersistentCocycle {
  int order = 0;
  double birth = 0.0;
  double death = kInfinity;
  Index birth_index = 0;
  std::optional<Index> death_index;
  SparseVector<S> representative;  // over k-simplices, global indices
  SparseVector<S> coboundary;      // over (k+1)-simplices, global indices

  bool essential() const { return !death_index.has_value(); }
  /// Death with essential classes clamped to `horizon` (t-plus).
  double finite_death(double horizon) const { return essential() ? horizon : death; }
  bool alive_at(double t) const { return birth <= t && t < death; }
};

/// Every pairing produced by a reduction, including zero-length ones.
struct PairRecord {
  int order = 0;
  Index birth_index = 0;
  std::optional<Index> death_index;

  bool operator==(const PairRecord&) const = default;
};

template <class S>
struct Diagram {
  int max_order = 0;
  double horizon = 0.0;  // largest filtration value
  std::vector<PersistentCocycle<S>> classes;  // sorted by (order, birth_index)
  std::vector<PairRecord> all_pairs;

  std::vector<const PersistentCocycle<S>*> of_order(int k) const {
    std::vector<const PersistentCocycle<S>*> out;
    for (const auto& c : classes)
      if (c.order == k) out.push_back(&c);
    return out;
  }
};

struct PersistenceOptions {
  /// Skip columns already known to be zero from the previous order's pivots.
  bool clearing = false;
};

/// Coboundary delta^k restricted to `subset` in the anti-transposed layout used
/// by the reduction: column j is the j-th k-simplex of the subset in decreasing
/// filtration order, row r likewise for (k+1)-simplices, so the lowest nonzero
/// of a column is its earliest cofacet.
template <class S>
struct CoboundaryMatrix {
  SparseColumnMatrix<S> matrix;
  std::vector<Index> column_simplex;
  std::vector<Index> row_simplex;
};

template <class S>
CoboundaryMatrix<S> coboundary_matrix(const Filtration& f, int k, const SimplexSubset& subset);

template <class Field>
Diagram<typename Field::Scalar> persistent_cohomology(const Filtration& f, int max_order,
                                                      const Field& field,
                                                      const PersistenceOptions& options = {});

/// Persistent cohomology of (S_t, S_t \ U_t) for an open U: rows and columns
/// of simplices outside U are deleted from the coboundary matrix.
template <class Field>
Diagram<typename Field::Scalar> persistent_relative_cohomology(
    const Filtration& f, const SimplexSubset& open_set, int max_order, const Field& field,
    const PersistenceOptions& options = {});

template <class S>
int betti_at(const Diagram<S>& d, double t, int k) {
  int n = 0;
  for (const auto& c : d.classes)
    if (c.order == k && c.alive_at(t)) ++n;
  return n;
}

}  // namespace plh
