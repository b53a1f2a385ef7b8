#pragma once

#include <string>
#include <vector>

#include "plh/complex.hpp"

namespace plh::fixtures {

struct Fixture {
  std::string name;
  WeightedGraph graph;
  int max_dim = 2;
};

WeightedGraph cycle(std::size_t n, double weight = 1.0);
WeightedGraph complete(std::size_t n, double weight = 1.0);
/// K_{2,2,2}: vertices 2i and 2i+1 are the non-adjacent antipodes.
WeightedGraph octahedron(double weight = 1.0);
WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b);
WeightedGraph path(std::size_t n, double weight = 1.0);
/// Corners (0,0),(1,0),(1,1),(0,1) of the unit square, complete Euclidean graph.
WeightedGraph unit_square();

/// C4, two disjoint C4, octahedron, K4 (max_dim 3), K3, unit square, path P3.
std::vector<Fixture> golden();
const Fixture& golden(const std::string& name);

}  // namespace plh::fixtures
