#include "plh/local_sheaf.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "plh/parallel.hpp"

namespace plh {

namespace {

template <class S>
SparseVector<S> remap(const SparseVector<S>& v, const std::vector<Index>& to_parent) {
  SparseVector<S> out;
  out.reserve(v.size());
  // to_parent is increasing, so the order is preserved.
  for (const auto& e : v) out.push_back({to_parent.at(e.index), e.value});
  return out;
}

void require_vertex(const Filtration& f, Vertex v) {
  if (v >= f.vertex_count() || !f.vertex_index(v))
    throw LookupError("vertex " + std::to_string(v) + " is not in the filtration");
}

}  // namespace

template <class Field>
LocalStalk<typename Field::Scalar> compute_stalk(const Filtration& f, Vertex v, int max_order,
                                                 int rings, const Field& field) {
  using S = typename Field::Scalar;
  require_vertex(f, v);
  if (rings < 1) throw ContractError("compute_stalk: rings must be at least 1");
  LocalStalk<S> stalk;
  stalk.vertex = v;
  stalk.max_order = max_order;
  const Vertex vs[] = {v};
  stalk.truncation = truncate_neighborhood(f, vs, rings);
  const auto& t = stalk.truncation;
  auto d = persistent_relative_cohomology(t.filtration, t.open_set, max_order, field);
  for (auto& c : d.classes) {
    if (c.order < 1) continue;
    c.birth_index = t.to_parent.at(c.birth_index);
    if (c.death_index) c.death_index = t.to_parent.at(*c.death_index);
    c.representative = remap(c.representative, t.to_parent);
    c.coboundary = remap(c.coboundary, t.to_parent);
    stalk.cocycles.push_back(std::move(c));
  }
  return stalk;
}

template <class Field>
std::vector<LocalStalk<typename Field::Scalar>> compute_all_stalks(const Filtration& f,
                                                                   int max_order, int rings,
                                                                   const Field& field,
                                                                   unsigned threads) {
  using S = typename Field::Scalar;
  std::vector<Vertex> vertices;
  for (Vertex v = 0; v < f.vertex_count(); ++v)
    if (f.vertex_index(v)) vertices.push_back(v);
  if (vertices.size() != f.vertex_count())
    throw ContractError("compute_all_stalks: filtration is missing vertices");
  std::vector<LocalStalk<S>> out(vertices.size());
  parallel_for(vertices.size(), threads, [&](std::size_t i) {
    out[i] = compute_stalk(f, vertices[i], max_order, rings, field);
  });
  return out;
}

template <class S>
ExtendedCoboundaryMatrix<S> build_extended_matrix(const LocalStalk<S>& stalk_u,
                                                  const LocalStalk<S>& stalk_v,
                                                  const Filtration& f, int k) {
  const Vertex u = stalk_u.vertex, v = stalk_v.vertex;
  require_vertex(f, u);
  require_vertex(f, v);
  if (u == v) throw ContractError("build_extended_matrix: u and v must differ");
  if (k < 0) throw ContractError("build_extended_matrix: negative order");
  const Vertex vu[] = {u}, vv[] = {v};
  const auto a = vertex_star(f, vu);
  const auto b = vertex_star(f, vv);
  if (set_intersection(f, a, b).empty())
    throw ContractError("build_extended_matrix: vertices " + std::to_string(u) + " and " +
                        std::to_string(v) + " have disjoint stars");
  const auto d = set_union(f, a, b);

  ExtendedCoboundaryMatrix<S> ext;
  ext.u = u;
  ext.v = v;
  ext.order = k;

  std::vector<std::pair<Index, RowGroup>> rows;
  for (Index s : d.ids)
    if (f.dimension(s) == k) rows.push_back({s, RowGroup::d_cochain});
  for (Index s : a.ids)
    if (f.dimension(s) == k + 1) rows.push_back({s, RowGroup::a_coboundary});
  for (Index s : b.ids)
    if (f.dimension(s) == k + 1) rows.push_back({s, RowGroup::b_coboundary});
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<Index> row_d(f.size(), kNoIndex), row_a(f.size(), kNoIndex),
      row_b(f.size(), kNoIndex);
  for (Index r = 0; r < rows.size(); ++r) {
    ext.row_simplex.push_back(rows[r].first);
    ext.row_group.push_back(rows[r].second);
    auto& slot = rows[r].second == RowGroup::d_cochain    ? row_d
                 : rows[r].second == RowGroup::a_coboundary ? row_a
                                                            : row_b;
    slot[rows[r].first] = r;
  }

  auto sorted = [](SparseVector<S> col) {
    std::sort(col.begin(), col.end(),
              [](const Entry<S>& x, const Entry<S>& y) { return x.index < y.index; });
    return col;
  };

  std::vector<SparseVector<S>> cols;
  if (k >= 1)
    for (auto it = d.ids.rbegin(); it != d.ids.rend(); ++it) {
      if (f.dimension(*it) != k - 1) continue;
      SparseVector<S> col;
      for (const auto& c : f.cofacets(*it))
        if (row_d[c.index] != kNoIndex) col.push_back({row_d[c.index], S(c.sign)});
      cols.push_back(sorted(std::move(col)));
      ext.columns.push_back({false, *it, 0, 0});
    }
  ext.d_columns = cols.size();

  struct Candidate {
    const PersistentCocycle<S>* cocycle;
    Vertex owner;
    Index local;
  };
  std::vector<Candidate> cands;
  for (const auto* stalk : {&stalk_u, &stalk_v}) {
    const auto basis = stalk->basis(k);
    for (Index i = 0; i < basis.size(); ++i)
      cands.push_back({&stalk->cocycles[basis[i]], stalk->vertex, i});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.cocycle->birth != y.cocycle->birth) return x.cocycle->birth > y.cocycle->birth;
    if (x.cocycle->birth_index != y.cocycle->birth_index)
      return x.cocycle->birth_index > y.cocycle->birth_index;
    return std::tie(x.owner, x.local) < std::tie(y.owner, y.local);
  });
  for (const auto& c : cands) {
    const auto& coboundary_rows = c.owner == u ? row_a : row_b;
    SparseVector<S> col;
    for (const auto& e : c.cocycle->representative) {
      if (row_d.at(e.index) == kNoIndex)
        throw ContractError("build_extended_matrix: stalk cocycle outside st u u st v");
      col.push_back({row_d[e.index], e.value});
    }
    for (const auto& e : c.cocycle->coboundary) {
      if (coboundary_rows.at(e.index) == kNoIndex)
        throw ContractError("build_extended_matrix: stalk coboundary outside its star");
      col.push_back({coboundary_rows[e.index], e.value});
    }
    cols.push_back(sorted(std::move(col)));
    ext.columns.push_back({true, 0, c.owner, c.local});
  }

  ext.matrix = SparseColumnMatrix<S>(rows.size(), cols.size());
  for (Index j = 0; j < cols.size(); ++j) ext.matrix.set_column(j, std::move(cols[j]));
  return ext;
}

template <class S>
Interval SheafLaplacianBlock<S>::entry_interval(Index atom, Index a, Index b) const {
  const auto& at = atoms.at(atom);
  const auto& la = life_u.at(a);
  const auto& lb = life_v.at(b);
  return {std::max({at.start, la.start, lb.start}), std::min({at.end, la.end, lb.end})};
}

namespace {

template <class S>
std::vector<Interval> lifespans_of(const LocalStalk<S>& stalk, int k) {
  std::vector<Interval> out;
  for (Index i : stalk.basis(k)) out.push_back({stalk.cocycles[i].birth, stalk.cocycles[i].death});
  return out;
}

}  // namespace

template <class Field>
SheafLaplacianBlock<typename Field::Scalar> sheaf_laplacian_block(
    const LocalStalk<typename Field::Scalar>& stalk_u,
    const LocalStalk<typename Field::Scalar>& stalk_v, const Filtration& f, int k,
    const Field& field) {
  using S = typename Field::Scalar;
  const auto ext = build_extended_matrix(stalk_u, stalk_v, f, k);
  SheafLaplacianBlock<S> block;
  block.u = ext.u;
  block.v = ext.v;
  block.order = k;
  block.life_u = lifespans_of(stalk_u, k);
  block.life_v = lifespans_of(stalk_v, k);
  block.dim_u = block.life_u.size();
  block.dim_v = block.life_v.size();
  if (ext.ab_columns() == 0) return block;

  const auto red = reduce(ext.matrix, field);
  for (Index j = ext.d_columns; j < ext.columns.size(); ++j) {
    LaplacianAtom<S> atom;
    double birth_a = kInfinity, birth_b = kInfinity;
    for (const auto& e : red.transform.column(j)) {
      if (e.index < ext.d_columns) continue;
      const auto& src = ext.columns[e.index];
      if (src.owner == ext.u) {
        atom.v_a.push_back({src.local_index, e.value});
        birth_a = std::min(birth_a, block.life_u[src.local_index].start);
      } else {
        atom.v_b.push_back({src.local_index, e.value});
        birth_b = std::min(birth_b, block.life_v[src.local_index].start);
      }
    }
    auto by_index = [](const Entry<S>& x, const Entry<S>& y) { return x.index < y.index; };
    std::sort(atom.v_a.begin(), atom.v_a.end(), by_index);
    std::sort(atom.v_b.begin(), atom.v_b.end(), by_index);
    atom.start = -kInfinity;
    if (!atom.v_a.empty()) atom.start = std::max(atom.start, birth_a);
    if (!atom.v_b.empty()) atom.start = std::max(atom.start, birth_b);
    if (auto p = red.pivot_of(j)) atom.end = f.value(ext.row_simplex[*p]);
    if (atom.start < atom.end) block.atoms.push_back(std::move(atom));
  }
  return block;
}

template <class S>
DenseMatrix<S> laplacian_at_time(const SheafLaplacianBlock<S>& block, double t) {
  DenseMatrix<S> m(block.dim_u, block.dim_v);
  for (const auto& atom : block.atoms) {
    if (!(atom.start <= t && t < atom.end)) continue;
    for (const auto& a : atom.v_a) {
      if (!block.life_u[a.index].contains(t)) continue;
      for (const auto& b : atom.v_b)
        if (block.life_v[b.index].contains(t)) m.at(a.index, b.index) += a.value * b.value;
    }
  }
  return m;
}

template <class S>
StalkLayout stalk_layout(const std::vector<LocalStalk<S>>& stalks, int k) {
  StalkLayout layout;
  std::size_t total = 0;
  for (const auto& s : stalks) {
    layout.offsets.push_back(total);
    total += s.dim(k);
  }
  layout.offsets.push_back(total);
  return layout;
}

template <class Field>
std::vector<SheafLaplacianBlock<typename Field::Scalar>> compute_all_blocks(
    const Filtration& f, const std::vector<LocalStalk<typename Field::Scalar>>& stalks, int k,
    const Field& field, unsigned threads) {
  using S = typename Field::Scalar;
  if (stalks.size() != f.vertex_count())
    throw ContractError("compute_all_blocks: one stalk per vertex is required");
  for (Vertex i = 0; i < stalks.size(); ++i)
    if (stalks[i].vertex != i) throw ContractError("compute_all_blocks: stalks out of order");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Index e : f.of_dimension(1))
    edges.push_back({f.simplex(e).vertices[0], f.simplex(e).vertices[1]});
  std::sort(edges.begin(), edges.end());
  std::vector<SheafLaplacianBlock<S>> out(edges.size());
  parallel_for(edges.size(), threads, [&](std::size_t i) {
    out[i] = sheaf_laplacian_block(stalks[edges[i].first], stalks[edges[i].second], f, k, field);
  });
  return out;
}

namespace {

// |I_atom n I_p n I_q| / |I_p| on the finite horizon, with the limit rule for
// classes born at the horizon itself.
double lifespan_weight(const Interval& atom, const Interval& p, const Interval& q,
                       double horizon) {
  auto clamp = [&](Interval i) {
    if (i.end > horizon) i.end = horizon;
    return i;
  };
  const Interval a = clamp(atom), ip = clamp(p), iq = clamp(q);
  const double own = ip.end - ip.start;
  if (own <= 0.0) {
    const bool at_horizon = atom.start <= horizon && atom.end == kInfinity &&
                            p.start <= horizon && p.end == kInfinity &&
                            q.start <= horizon && q.end == kInfinity;
    return at_horizon ? 1.0 : 0.0;
  }
  const double lo = std::max({a.start, ip.start, iq.start});
  const double hi = std::min({a.end, ip.end, iq.end});
  return hi > lo ? (hi - lo) / own : 0.0;
}

}  // namespace

template <class S>
AssembledLaplacian<S> assemble_laplacian(const Filtration& f,
                                         const std::vector<LocalStalk<S>>& stalks,
                                         const std::vector<SheafLaplacianBlock<S>>& blocks,
                                         int k, LaplacianMode mode) {
  if (stalks.size() != f.vertex_count())
    throw ContractError("assemble_laplacian: missing stalk (one per vertex required)");
  for (Vertex i = 0; i < stalks.size(); ++i)
    if (stalks[i].vertex != i) throw ContractError("assemble_laplacian: stalks out of order");

  AssembledLaplacian<S> out;
  out.order = k;
  out.mode = mode;
  out.layout = stalk_layout(stalks, k);
  const std::size_t n = out.layout.total();

  std::vector<Interval> life(n);
  for (Vertex v = 0; v < stalks.size(); ++v) {
    const auto basis = stalks[v].basis(k);
    for (Index i = 0; i < basis.size(); ++i)
      life[out.layout.offsets[v] + i] = {stalks[v].cocycles[basis[i]].birth,
                                         stalks[v].cocycles[basis[i]].death};
  }

  DenseMatrix<S> full(n, n);
  const double horizon = f.max_value();
  const bool slice = mode.kind == LaplacianMode::Kind::slice;

  for (const auto& block : blocks) {
    if (block.order != k) throw ContractError("assemble_laplacian: block of the wrong order");
    if (block.u >= stalks.size() || block.v >= stalks.size())
      throw ContractError("assemble_laplacian: block refers to a missing stalk");
    if (block.dim_u != stalks[block.u].dim(k) || block.dim_v != stalks[block.v].dim(k))
      throw ContractError("assemble_laplacian: block does not match its stalks");
    const std::size_t ou = out.layout.offsets[block.u], ov = out.layout.offsets[block.v];
    for (const auto& atom : block.atoms) {
      // The atom's support as (global coordinate, coefficient).
      std::vector<std::pair<std::size_t, S>> support;
      for (const auto& e : atom.v_a) support.push_back({ou + e.index, e.value});
      for (const auto& e : atom.v_b) support.push_back({ov + e.index, e.value});
      if (slice) {
        if (!(atom.start <= mode.time && mode.time < atom.end)) continue;
        std::erase_if(support, [&](const auto& x) { return !life[x.first].contains(mode.time); });
        for (const auto& [p, wp] : support)
          for (const auto& [q, wq] : support) full.at(p, q) += wp * wq;
      } else {
        const Interval ia{atom.start, atom.end};
        for (const auto& [p, wp] : support)
          for (const auto& [q, wq] : support) {
            const double w = lifespan_weight(ia, life[p], life[q], horizon);
            if (w != 0.0) full.at(p, q) += wp * wq * S(w);
          }
      }
    }
  }

  for (std::size_t p = 0; p < n; ++p)
    if (!slice || life[p].contains(mode.time)) out.coords.push_back(p);
  out.matrix = DenseMatrix<S>(out.coords.size(), out.coords.size());
  for (std::size_t i = 0; i < out.coords.size(); ++i)
    for (std::size_t j = 0; j < out.coords.size(); ++j)
      out.matrix.at(i, j) = full.at(out.coords[i], out.coords[j]);
  return out;
}

template <class Field>
AssembledLaplacian<typename Field::Scalar> assemble_laplacian(
    const Filtration& f, const std::vector<LocalStalk<typename Field::Scalar>>& stalks, int k,
    LaplacianMode mode, const Field& field, unsigned threads) {
  const auto blocks = compute_all_blocks(f, stalks, k, field, threads);
  return assemble_laplacian(f, stalks, blocks, k, mode);
}

AssembledLaplacian<double> to_double(const AssembledLaplacian<mpq_class>& l) {
  AssembledLaplacian<double> out;
  out.order = l.order;
  out.mode = l.mode;
  out.layout = l.layout;
  out.coords = l.coords;
  out.matrix = DenseMatrix<double>(l.matrix.rows, l.matrix.cols);
  for (std::size_t i = 0; i < l.matrix.data.size(); ++i) out.matrix.data[i] = l.matrix.data[i].get_d();
  return out;
}

#define PLH_INSTANTIATE(FIELD, S)                                                              \
  template LocalStalk<S> compute_stalk(const Filtration&, Vertex, int, int, const FIELD&);     \
  template std::vector<LocalStalk<S>> compute_all_stalks(const Filtration&, int, int,          \
                                                         const FIELD&, unsigned);              \
  template ExtendedCoboundaryMatrix<S> build_extended_matrix(                                   \
      const LocalStalk<S>&, const LocalStalk<S>&, const Filtration&, int);                     \
  template struct SheafLaplacianBlock<S>;                                                      \
  template SheafLaplacianBlock<S> sheaf_laplacian_block(const LocalStalk<S>&,                  \
                                                        const LocalStalk<S>&,                  \
                                                        const Filtration&, int, const FIELD&); \
  template DenseMatrix<S> laplacian_at_time(const SheafLaplacianBlock<S>&, double);            \
  template StalkLayout stalk_layout(const std::vector<LocalStalk<S>>&, int);                   \
  template std::vector<SheafLaplacianBlock<S>> compute_all_blocks(                              \
      const Filtration&, const std::vector<LocalStalk<S>>&, int, const FIELD&, unsigned);      \
  template AssembledLaplacian<S> assemble_laplacian(const Filtration&,                         \
                                                    const std::vector<LocalStalk<S>>&,         \
                                                    const std::vector<SheafLaplacianBlock<S>>&, \
                                                    int, LaplacianMode);                       \
  template AssembledLaplacian<S> assemble_laplacian(                                           \
      const Filtration&, const std::vector<LocalStalk<S>>&, int, LaplacianMode, const FIELD&,  \
      unsigned);

PLH_INSTANTIATE(ExactField, mpq_class)
PLH_INSTANTIATE(FloatField, double)

#undef PLH_INSTANTIATE

}  // namespace plh
