#include "plh/fixtures.hpp"

#include <cmath>

#include "plh/errors.hpp"

namespace plh::fixtures {

WeightedGraph cycle(std::size_t n, double weight) {
  WeightedGraph g{n, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<Vertex>(i);
    const auto b = static_cast<Vertex>((i + 1) % n);
    g.edges.push_back({std::min(a, b), std::max(a, b), weight});
  }
  return g;
}

WeightedGraph complete(std::size_t n, double weight) {
  WeightedGraph g{n, {}};
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) g.edges.push_back({i, j, weight});
  return g;
}

WeightedGraph octahedron(double weight) {
  WeightedGraph g{6, {}};
  for (Vertex i = 0; i < 6; ++i)
    for (Vertex j = i + 1; j < 6; ++j)
      if (i / 2 != j / 2) g.edges.push_back({i, j, weight});
  return g;
}

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b) {
  WeightedGraph g = a;
  const auto shift = static_cast<Vertex>(a.vertex_count);
  g.vertex_count += b.vertex_count;
  for (const auto& e : b.edges) g.edges.push_back({e.u + shift, e.v + shift, e.weight});
  return g;
}

WeightedGraph path(std::size_t n, double weight) {
  WeightedGraph g{n, {}};
  for (Vertex i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, weight});
  return g;
}

WeightedGraph unit_square() {
  return point_cloud_graph({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, Metric::euclidean);
}

std::vector<Fixture> golden() {
  return {
      {"C4", cycle(4), 2},
      {"two_C4", disjoint_union(cycle(4), cycle(4)), 2},
      {"octahedron", octahedron(), 3},
      {"K4", complete(4), 3},
      {"K3", complete(3), 2},
      {"unit_square", unit_square(), 2},
      {"P3", path(3), 2},
  };
}

const Fixture& golden(const std::string& name) {
  static const std::vector<Fixture> all = golden();
  for (const auto& f : all)
    if (f.name == name) return f;
  throw LookupError("no golden fixture named " + name);
}

}  // namespace plh::fixtures
