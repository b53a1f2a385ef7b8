#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "plh/linalg.hpp"

namespace plh {

using Vertex = std::uint32_t;

inline constexpr std::size_t kDefaultSimplexBudget = 5'000'000;

struct WeightedEdge {
  Vertex u = 0;
  Vertex v = 0;
  double weight = 0.0;
};

struct WeightedGraph {
  std::size_t vertex_count = 0;
  std::vector<WeightedEdge> edges;

  /// Throws ContractError on self-loops, duplicate undirected edges,
  /// out-of-range endpoints or negative / non-finite weights.
  void validate() const;
};

/// Vertices strictly increasing; that order is the orientation.
struct Simplex {
  std::vector<Vertex> vertices;

  int dimension() const { return static_cast<int>(vertices.size()) - 1; }

  auto operator<=>(const Simplex&) const = default;
  bool operator==(const Simplex&) const = default;
};

/// A codimension-one incidence with its boundary sign.
struct Face {
  Index index;
  int sign;
};

/// Immutable simplex stream sorted by (value, dimension, lexicographic vertices).
/// Safe to query concurrently.
class Filtration {
 public:
  Filtration() = default;

  /// Sorts into canonical order and validates closure and face monotonicity.
  /// `max_dim` is the clique dimension the complex was built with.
  Filtration(std::vector<Simplex> simplices, std::vector<double> values, std::size_t vertex_count,
             int max_dim);

  std::size_t size() const { return simplices_.size(); }
  std::size_t vertex_count() const { return vertex_count_; }
  int max_dim() const { return max_dim_; }

  const Simplex& simplex(Index i) const { return simplices_.at(i); }
  double value(Index i) const { return values_.at(i); }
  int dimension(Index i) const { return simplices_.at(i).dimension(); }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const std::vector<double>& values() const { return values_; }

  std::optional<Index> find(const Simplex& s) const;
  /// Throws LookupError when absent.
  Index index_of(const Simplex& s) const;
  std::optional<Index> vertex_index(Vertex v) const { return find(Simplex{{v}}); }

  const std::vector<Face>& facets(Index i) const { return facets_.at(i); }
  const std::vector<Face>& cofacets(Index i) const { return cofacets_.at(i); }

  /// Indices of all k-simplices, increasing.
  std::vector<Index> of_dimension(int k) const;
  /// Largest dimension actually present (-1 if empty).
  int top_dimension() const;

  /// t-minus / t-plus: smallest and largest filtration values.
  double min_value() const;
  double max_value() const;
  /// Distinct filtration values, increasing.
  std::vector<double> critical_values() const;

  bool operator==(const Filtration& other) const {
    return simplices_ == other.simplices_ && values_ == other.values_ &&
           vertex_count_ == other.vertex_count_ && max_dim_ == other.max_dim_;
  }

 private:
  std::vector<Simplex> simplices_;
  std::vector<double> values_;
  std::vector<std::vector<Face>> facets_;
  std::vector<std::vector<Face>> cofacets_;
  std::map<std::vector<Vertex>, Index> lookup_;
  std::size_t vertex_count_ = 0;
  int max_dim_ = 0;
};

/// A set of simplex indices within one filtration, with its topological
/// character in the Alexandrov topology computed at construction.
struct SimplexSubset {
  std::vector<Index> ids;  // strictly increasing
  bool open = false;       // union of stars (closed under cofaces)
  bool closed = false;     // subcomplex (closed under faces)

  static SimplexSubset make(const Filtration& f, std::vector<Index> ids);

  bool contains(Index i) const;
  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  bool operator==(const SimplexSubset&) const = default;
};

Filtration build_flag_complex(const WeightedGraph& graph, int max_dim,
                              std::size_t simplex_budget = kDefaultSimplexBudget);

SimplexSubset star(const Filtration& f, const Simplex& s);
SimplexSubset star(const Filtration& f, Index simplex);
/// Union of the stars of the given vertices.
SimplexSubset vertex_star(const Filtration& f, std::span<const Vertex> vertices);
SimplexSubset closure(const Filtration& f, const SimplexSubset& a);
/// Requires an open subset.
SimplexSubset frontier(const Filtration& f, const SimplexSubset& a);
SimplexSubset interior(const Filtration& f, const SimplexSubset& a);
SimplexSubset complement(const Filtration& f, const SimplexSubset& a);
SimplexSubset set_union(const Filtration& f, const SimplexSubset& a, const SimplexSubset& b);
SimplexSubset set_intersection(const Filtration& f, const SimplexSubset& a,
                               const SimplexSubset& b);
SimplexSubset whole(const Filtration& f);

/// Sub-filtration around a vertex set together with the open set
/// union(star(v)) expressed in the sub-filtration's indices.
struct Truncation {
  Filtration filtration;
  SimplexSubset open_set;
  std::vector<Index> to_parent;

  std::optional<Index> to_local(Index parent_index) const;
};

/// `rings`-fold closed-star closure of `vertices`: ring 1 is cl(star(V)),
/// ring r+1 is cl(star(vertices of ring r)).
Truncation truncate_neighborhood(const Filtration& f, std::span<const Vertex> vertices, int rings);

enum class Metric { euclidean, manhattan };

/// Complete weighted graph on a point cloud; with `knn` set, keeps edge {i,j}
/// only when one endpoint is among the other's k nearest neighbours.
WeightedGraph point_cloud_graph(const std::vector<std::vector<double>>& points, Metric metric,
                                std::optional<std::size_t> knn = std::nullopt);

}  // namespace plh
