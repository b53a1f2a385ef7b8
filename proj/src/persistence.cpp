#include "plh/persistence.hpp"

#include <algorithm>
#include <string>

namespace plh {

template <class S>
CoboundaryMatrix<S> coboundary_matrix(const Filtration& f, int k, const SimplexSubset& subset) {
  if (k < 0) throw ContractError("coboundary_matrix: negative order");
  CoboundaryMatrix<S> out;
  for (auto it = subset.ids.rbegin(); it != subset.ids.rend(); ++it) {
    if (*it >= f.size()) throw LookupError("coboundary_matrix: subset outside filtration");
    const int d = f.dimension(*it);
    if (d == k) out.column_simplex.push_back(*it);
    if (d == k + 1) out.row_simplex.push_back(*it);
  }
  std::vector<Index> row_pos(f.size(), kNoIndex);
  for (Index r = 0; r < out.row_simplex.size(); ++r) row_pos[out.row_simplex[r]] = r;

  out.matrix = SparseColumnMatrix<S>(out.row_simplex.size(), out.column_simplex.size());
  for (Index j = 0; j < out.column_simplex.size(); ++j) {
    SparseVector<S> col;
    for (const auto& c : f.cofacets(out.column_simplex[j]))
      if (row_pos[c.index] != kNoIndex) col.push_back({row_pos[c.index], S(c.sign)});
    std::sort(col.begin(), col.end(),
              [](const Entry<S>& a, const Entry<S>& b) { return a.index < b.index; });
    out.matrix.set_column(j, std::move(col));
  }
  return out;
}

namespace {

template <class S>
SparseVector<S> to_global(const SparseVector<S>& v, const std::vector<Index>& map) {
  SparseVector<S> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back({map[e.index], e.value});
  std::sort(out.begin(), out.end(),
            [](const Entry<S>& a, const Entry<S>& b) { return a.index < b.index; });
  return out;
}

template <class Field>
Diagram<typename Field::Scalar> compute(const Filtration& f, const SimplexSubset& u,
                                        int max_order, const Field& field,
                                        const PersistenceOptions& options) {
  using S = typename Field::Scalar;
  if (max_order < 0) throw ContractError("max_order must be nonnegative");
  if (max_order + 1 > f.max_dim())
    throw ContractError("max_order " + std::to_string(max_order) +
                        " needs simplices of dimension " + std::to_string(max_order + 1) +
                        " but the filtration was built with max_dim " +
                        std::to_string(f.max_dim()));
  Diagram<S> d;
  d.max_order = max_order;
  d.horizon = f.max_value();

  std::vector<char> killed(f.size(), 0);
  std::vector<std::pair<Index, SparseVector<S>>> carried;
  for (int k = 0; k <= max_order; ++k) {
    const auto cb = coboundary_matrix<S>(f, k, u);
    ReduceOptions<S> ro;
    if (options.clearing) ro.cleared = std::move(carried);
    const auto red = reduce(cb.matrix, field, ro);

    for (Index j = 0; j < cb.column_simplex.size(); ++j) {
      const Index sigma = cb.column_simplex[j];
      const auto pivot = red.pivot_of(j);
      if (!pivot && killed[sigma]) continue;
      PersistentCocycle<S> c;
      c.order = k;
      c.birth_index = sigma;
      c.birth = f.value(sigma);
      if (pivot) {
        const Index tau = cb.row_simplex[*pivot];
        c.death_index = tau;
        c.death = f.value(tau);
      }
      d.all_pairs.push_back({k, c.birth_index, c.death_index});
      if (!(c.birth < c.death)) continue;
      c.representative = to_global(red.transform.column(j), cb.column_simplex);
      c.coboundary = to_global(red.reduced.column(j), cb.row_simplex);
      d.classes.push_back(std::move(c));
    }

    std::fill(killed.begin(), killed.end(), 0);
    carried.clear();
    // Rows of delta^k enumerate (k+1)-simplices exactly as the columns of
    // delta^(k+1) do, so row indices carry over unchanged.
    for (Index j = 0; j < cb.column_simplex.size(); ++j)
      if (auto pivot = red.pivot_of(j)) {
        killed[cb.row_simplex[*pivot]] = 1;
        if (options.clearing) carried.emplace_back(*pivot, red.reduced.column(j));
      }
    std::sort(carried.begin(), carried.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  std::stable_sort(d.classes.begin(), d.classes.end(), [](const auto& a, const auto& b) {
    return a.order != b.order ? a.order < b.order : a.birth_index < b.birth_index;
  });
  std::stable_sort(d.all_pairs.begin(), d.all_pairs.end(), [](const auto& a, const auto& b) {
    return a.order != b.order ? a.order < b.order : a.birth_index < b.birth_index;
  });
  return d;
}

}  // namespace

template <class Field>
Diagram<typename Field::Scalar> persistent_cohomology(const Filtration& f, int max_order,
                                                      const Field& field,
                                                      const PersistenceOptions& options) {
  return compute(f, whole(f), max_order, field, options);
}

template <class Field>
Diagram<typename Field::Scalar> persistent_relative_cohomology(const Filtration& f,
                                                               const SimplexSubset& open_set,
                                                               int max_order, const Field& field,
                                                               const PersistenceOptions& options) {
  if (!open_set.open) throw ContractError("relative persistence requires an open subset");
  if (!open_set.ids.empty() && open_set.ids.back() >= f.size())
    throw LookupError("open subset does not belong to this filtration");
  return compute(f, open_set, max_order, field, options);
}

template CoboundaryMatrix<mpq_class> coboundary_matrix<mpq_class>(const Filtration&, int,
                                                                  const SimplexSubset&);
template CoboundaryMatrix<double> coboundary_matrix<double>(const Filtration&, int,
                                                            const SimplexSubset&);
template Diagram<mpq_class> persistent_cohomology(const Filtration&, int, const ExactField&,
                                                  const PersistenceOptions&);
template Diagram<double> persistent_cohomology(const Filtration&, int, const FloatField&,
                                               const PersistenceOptions&);
template Diagram<mpq_class> persistent_relative_cohomology(const Filtration&,
                                                           const SimplexSubset&, int,
                                                           const ExactField&,
                                                           const PersistenceOptions&);
template Diagram<double> persistent_relative_cohomology(const Filtration&, const SimplexSubset&,
                                                        int, const FloatField&,
                                                        const PersistenceOptions&);

}  // namespace plh
