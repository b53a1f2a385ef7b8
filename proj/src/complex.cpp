#include "plh/complex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

namespace plh {

void WeightedGraph::validate() const {
  std::set<std::pair<Vertex, Vertex>> seen;
  for (const auto& e : edges) {
    if (e.u >= vertex_count || e.v >= vertex_count)
      throw ContractError("graph edge endpoint out of range: " + std::to_string(e.u) + "," +
                          std::to_string(e.v));
    if (e.u == e.v) throw ContractError("graph has a self-loop at vertex " + std::to_string(e.u));
    if (!std::isfinite(e.weight) || e.weight < 0.0)
      throw ContractError("edge weights must be finite and nonnegative");
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      throw ContractError("duplicate edge " + std::to_string(key.first) + "," +
                          std::to_string(key.second));
  }
}

Filtration::Filtration(std::vector<Simplex> simplices, std::vector<double> values,
                       std::size_t vertex_count, int max_dim)
    : vertex_count_(vertex_count), max_dim_(max_dim) {
  if (simplices.size() != values.size())
    throw ContractError("filtration: simplex and value counts differ");
  if (max_dim < 0) throw ContractError("filtration: max_dim must be nonnegative");

  std::vector<Index> order(simplices.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (values[a] != values[b]) return values[a] < values[b];
    if (simplices[a].vertices.size() != simplices[b].vertices.size())
      return simplices[a].vertices.size() < simplices[b].vertices.size();
    return simplices[a].vertices < simplices[b].vertices;
  });
  simplices_.reserve(order.size());
  values_.reserve(order.size());
  for (Index i : order) {
    const auto& s = simplices[i];
    if (s.vertices.empty()) throw ContractError("filtration: empty simplex");
    for (std::size_t k = 0; k < s.vertices.size(); ++k) {
      if (s.vertices[k] >= vertex_count)
        throw ContractError("filtration: vertex id out of range");
      if (k > 0 && s.vertices[k - 1] >= s.vertices[k])
        throw ContractError("filtration: simplex vertices must be strictly increasing");
    }
    if (s.dimension() > max_dim) throw ContractError("filtration: simplex exceeds max_dim");
    if (!std::isfinite(values[i])) throw ContractError("filtration: non-finite value");
    simplices_.push_back(std::move(simplices[i]));
    values_.push_back(values[i]);
  }
  for (Index i = 0; i < simplices_.size(); ++i)
    if (!lookup_.emplace(simplices_[i].vertices, i).second)
      throw ContractError("filtration: duplicate simplex");

  facets_.resize(simplices_.size());
  cofacets_.resize(simplices_.size());
  std::vector<Vertex> face;
  for (Index i = 0; i < simplices_.size(); ++i) {
    const auto& vs = simplices_[i].vertices;
    if (vs.size() < 2) continue;
    for (std::size_t drop = 0; drop < vs.size(); ++drop) {
      face.clear();
      for (std::size_t k = 0; k < vs.size(); ++k)
        if (k != drop) face.push_back(vs[k]);
      auto it = lookup_.find(face);
      if (it == lookup_.end()) throw ContractError("filtration: missing face (not a complex)");
      if (values_[it->second] > values_[i])
        throw ContractError("filtration: face value exceeds simplex value");
      const int sign = (drop % 2 == 0) ? 1 : -1;
      facets_[i].push_back({it->second, sign});
      cofacets_[it->second].push_back({i, sign});
    }
  }
  for (auto& c : cofacets_)
    std::sort(c.begin(), c.end(), [](const Face& a, const Face& b) { return a.index < b.index; });
  for (auto& c : facets_)
    std::sort(c.begin(), c.end(), [](const Face& a, const Face& b) { return a.index < b.index; });
}

std::optional<Index> Filtration::find(const Simplex& s) const {
  auto it = lookup_.find(s.vertices);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Index Filtration::index_of(const Simplex& s) const {
  auto i = find(s);
  if (!i) {
    std::string name = "[";
    for (std::size_t k = 0; k < s.vertices.size(); ++k)
      name += (k ? "," : "") + std::to_string(s.vertices[k]);
    throw LookupError("simplex " + name + "] is not in the filtration");
  }
  return *i;
}

std::vector<Index> Filtration::of_dimension(int k) const {
  std::vector<Index> out;
  for (Index i = 0; i < simplices_.size(); ++i)
    if (simplices_[i].dimension() == k) out.push_back(i);
  return out;
}

int Filtration::top_dimension() const {
  int top = -1;
  for (const auto& s : simplices_) top = std::max(top, s.dimension());
  return top;
}

double Filtration::min_value() const { return values_.empty() ? 0.0 : values_.front(); }
double Filtration::max_value() const { return values_.empty() ? 0.0 : values_.back(); }

std::vector<double> Filtration::critical_values() const {
  std::vector<double> out;
  for (double v : values_)
    if (out.empty() || out.back() != v) out.push_back(v);
  return out;
}

// --- subsets -----------------------------------------------------------------

SimplexSubset SimplexSubset::make(const Filtration& f, std::vector<Index> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && ids.back() >= f.size())
    throw LookupError("subset references a simplex outside the filtration");
  std::vector<char> member(f.size(), 0);
  for (Index i : ids) member[i] = 1;
  bool open = true;
  bool closed = true;
  for (Index i : ids) {
    for (const auto& c : f.cofacets(i))
      if (!member[c.index]) open = false;
    for (const auto& c : f.facets(i))
      if (!member[c.index]) closed = false;
  }
  return SimplexSubset{std::move(ids), open, closed};
}

bool SimplexSubset::contains(Index i) const { return std::binary_search(ids.begin(), ids.end(), i); }

namespace {

std::vector<char> membership(const Filtration& f, const SimplexSubset& a) {
  if (!a.ids.empty() && a.ids.back() >= f.size())
    throw LookupError("subset does not belong to this filtration");
  std::vector<char> m(f.size(), 0);
  for (Index i : a.ids) m[i] = 1;
  return m;
}

std::vector<Index> collect(const std::vector<char>& m) {
  std::vector<Index> out;
  for (Index i = 0; i < m.size(); ++i)
    if (m[i]) out.push_back(i);
  return out;
}

// Upward closure: every coface of a marked simplex becomes marked. Cofaces
// have larger indices, so one increasing sweep suffices.
void close_upward(const Filtration& f, std::vector<char>& m) {
  for (Index i = 0; i < m.size(); ++i)
    if (m[i])
      for (const auto& c : f.cofacets(i)) m[c.index] = 1;
}

// Downward closure; faces have smaller indices, so sweep decreasing.
void close_downward(const Filtration& f, std::vector<char>& m) {
  for (Index i = m.size(); i-- > 0;)
    if (m[i])
      for (const auto& c : f.facets(i)) m[c.index] = 1;
}

}  // namespace

SimplexSubset star(const Filtration& f, Index simplex) {
  if (simplex >= f.size()) throw LookupError("star: simplex index out of range");
  std::vector<char> m(f.size(), 0);
  m[simplex] = 1;
  close_upward(f, m);
  return SimplexSubset::make(f, collect(m));
}

SimplexSubset star(const Filtration& f, const Simplex& s) { return star(f, f.index_of(s)); }

SimplexSubset vertex_star(const Filtration& f, std::span<const Vertex> vertices) {
  std::vector<char> m(f.size(), 0);
  for (Vertex v : vertices) {
    auto i = f.vertex_index(v);
    if (!i) throw LookupError("vertex " + std::to_string(v) + " is not in the filtration");
    m[*i] = 1;
  }
  close_upward(f, m);
  return SimplexSubset::make(f, collect(m));
}

SimplexSubset closure(const Filtration& f, const SimplexSubset& a) {
  auto m = membership(f, a);
  close_downward(f, m);
  return SimplexSubset::make(f, collect(m));
}

SimplexSubset frontier(const Filtration& f, const SimplexSubset& a) {
  if (!a.open) throw ContractError("frontier: subset is not open");
  auto cl = membership(f, closure(f, a));
  for (Index i : a.ids) cl[i] = 0;
  return SimplexSubset::make(f, collect(cl));
}

SimplexSubset interior(const Filtration& f, const SimplexSubset& a) {
  // sigma survives iff its whole star lies in A. Sweeping indices downward,
  // a simplex's cofacets are decided before it.
  auto in = membership(f, a);
  std::vector<char> keep(f.size(), 0);
  for (Index i = f.size(); i-- > 0;) {
    if (!in[i]) continue;
    bool ok = true;
    for (const auto& c : f.cofacets(i))
      if (!keep[c.index]) {
        ok = false;
        break;
      }
    keep[i] = ok ? 1 : 0;
  }
  return SimplexSubset::make(f, collect(keep));
}

SimplexSubset complement(const Filtration& f, const SimplexSubset& a) {
  auto m = membership(f, a);
  for (auto& c : m) c = !c;
  return SimplexSubset::make(f, collect(m));
}

SimplexSubset set_union(const Filtration& f, const SimplexSubset& a, const SimplexSubset& b) {
  auto m = membership(f, a);
  for (Index i : b.ids) m.at(i) = 1;
  return SimplexSubset::make(f, collect(m));
}

SimplexSubset set_intersection(const Filtration& f, const SimplexSubset& a,
                               const SimplexSubset& b) {
  auto ma = membership(f, a);
  auto mb = membership(f, b);
  for (Index i = 0; i < ma.size(); ++i) ma[i] = ma[i] && mb[i];
  return SimplexSubset::make(f, collect(ma));
}

SimplexSubset whole(const Filtration& f) {
  std::vector<Index> all(f.size());
  std::iota(all.begin(), all.end(), Index{0});
  return SimplexSubset::make(f, std::move(all));
}

// --- flag complex ---------------------------------------------------------------

namespace {

struct Neighbor {
  Vertex v;
  double w;
};

class CliqueEnumerator {
 public:
  CliqueEnumerator(const WeightedGraph& g, int max_dim, std::size_t budget)
      : adjacency_(g.vertex_count), max_dim_(max_dim), budget_(budget) {
    for (const auto& e : g.edges) {
      adjacency_[e.u].push_back({e.v, e.weight});
      adjacency_[e.v].push_back({e.u, e.weight});
    }
    for (auto& a : adjacency_)
      std::sort(a.begin(), a.end(), [](const Neighbor& x, const Neighbor& y) { return x.v < y.v; });
  }

  void run(std::vector<Simplex>& simplices, std::vector<double>& values) {
    out_s_ = &simplices;
    out_v_ = &values;
    for (Vertex v = 0; v < adjacency_.size(); ++v) {
      std::vector<Vertex> clique{v};
      emit(clique, 0.0);
      if (max_dim_ == 0) continue;
      // Candidates are higher-numbered neighbours, carrying the running max
      // weight of their edges into the current clique.
      std::vector<Neighbor> cands;
      for (const auto& n : adjacency_[v])
        if (n.v > v) cands.push_back(n);
      expand(clique, 0.0, cands);
    }
  }

 private:
  double weight(Vertex a, Vertex b) const {
    const auto& adj = adjacency_[a];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Neighbor& n, Vertex x) { return n.v < x; });
    return it->w;
  }

  bool adjacent(Vertex a, Vertex b) const {
    const auto& adj = adjacency_[a];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Neighbor& n, Vertex x) { return n.v < x; });
    return it != adj.end() && it->v == b;
  }

  void emit(const std::vector<Vertex>& clique, double value) {
    if (out_s_->size() >= budget_)
      throw ResourceError("flag complex exceeds the simplex budget of " +
                          std::to_string(budget_) + " simplices");
    out_s_->push_back(Simplex{clique});
    out_v_->push_back(value);
  }

  void expand(std::vector<Vertex>& clique, double value, const std::vector<Neighbor>& cands) {
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const Vertex next = cands[i].v;
      const double next_value = std::max(value, cands[i].w);
      clique.push_back(next);
      emit(clique, next_value);
      if (static_cast<int>(clique.size()) <= max_dim_) {
        std::vector<Neighbor> narrowed;
        for (std::size_t j = i + 1; j < cands.size(); ++j)
          if (adjacent(next, cands[j].v))
            narrowed.push_back({cands[j].v, std::max(cands[j].w, weight(next, cands[j].v))});
        if (!narrowed.empty()) expand(clique, next_value, narrowed);
      }
      clique.pop_back();
    }
  }

  std::vector<std::vector<Neighbor>> adjacency_;
  int max_dim_;
  std::size_t budget_;
  std::vector<Simplex>* out_s_ = nullptr;
  std::vector<double>* out_v_ = nullptr;
};

}  // namespace

Filtration build_flag_complex(const WeightedGraph& graph, int max_dim, std::size_t simplex_budget) {
  if (max_dim < 0) throw ContractError("build_flag_complex: max_dim must be nonnegative");
  graph.validate();
  std::vector<Simplex> simplices;
  std::vector<double> values;
  CliqueEnumerator(graph, max_dim, simplex_budget).run(simplices, values);
  return Filtration(std::move(simplices), std::move(values), graph.vertex_count, max_dim);
}

// --- truncation -----------------------------------------------------------------

std::optional<Index> Truncation::to_local(Index parent_index) const {
  auto it = std::lower_bound(to_parent.begin(), to_parent.end(), parent_index);
  if (it == to_parent.end() || *it != parent_index) return std::nullopt;
  return static_cast<Index>(it - to_parent.begin());
}

Truncation truncate_neighborhood(const Filtration& f, std::span<const Vertex> vertices, int rings) {
  if (rings < 1) throw ContractError("truncate_neighborhood: rings must be at least 1");
  SimplexSubset open = vertex_star(f, vertices);
  SimplexSubset region = closure(f, open);
  for (int r = 1; r < rings; ++r) {
    std::vector<Vertex> ring_vertices;
    for (Index i : region.ids)
      if (f.dimension(i) == 0) ring_vertices.push_back(f.simplex(i).vertices[0]);
    region = closure(f, vertex_star(f, ring_vertices));
  }

  std::vector<Simplex> simplices;
  std::vector<double> values;
  for (Index i : region.ids) {
    simplices.push_back(f.simplex(i));
    values.push_back(f.value(i));
  }
  Truncation t;
  t.filtration = Filtration(std::move(simplices), std::move(values), f.vertex_count(), f.max_dim());
  // The induced order matches the parent order, so local index = rank in region.
  t.to_parent = region.ids;
  std::vector<Index> local_open;
  for (Index i : open.ids) local_open.push_back(*t.to_local(i));
  t.open_set = SimplexSubset::make(t.filtration, std::move(local_open));
  return t;
}

// --- point clouds ---------------------------------------------------------------

WeightedGraph point_cloud_graph(const std::vector<std::vector<double>>& points, Metric metric,
                                std::optional<std::size_t> knn) {
  const std::size_t n = points.size();
  for (const auto& p : points)
    if (p.size() != points.front().size())
      throw ContractError("point cloud rows have differing dimensions");
  auto distance = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < points[i].size(); ++d) {
      const double diff = points[i][d] - points[j][d];
      acc += metric == Metric::euclidean ? diff * diff : std::abs(diff);
    }
    return metric == Metric::euclidean ? std::sqrt(acc) : acc;
  };

  std::vector<std::vector<char>> keep(n, std::vector<char>(n, knn ? 0 : 1));
  if (knn) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) others.push_back(j);
      std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        return distance(i, a) < distance(i, b);
      });
      for (std::size_t r = 0; r < std::min(*knn, others.size()); ++r) {
        keep[i][others[r]] = 1;
        keep[others[r]][i] = 1;
      }
    }
  }
  WeightedGraph g;
  g.vertex_count = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep[i][j])
        g.edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j), distance(i, j)});
  return g;
}

}  // namespace plh
