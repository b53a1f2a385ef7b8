// Writes the seed-fixed random graph corpora used by the test suites.
//   gen_corpus random  <out.json>   200 graphs, <= 8 vertices, <= 16 edges, tied weights
//   gen_corpus tiefree <out.json>   50 graphs with pairwise weight gaps >= 1e-3

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace {

using Edge = std::tuple<int, int, double>;

// Uniform integer in [lo, hi] from raw engine bits, so the corpus does not
// depend on the standard library's distribution implementations.
int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::pair<int, int>> pick_edges(std::mt19937_64& rng, int n, int m) {
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) all.push_back({i, j});
  for (std::size_t i = all.size(); i > 1; --i)
    std::swap(all[i - 1], all[static_cast<std::size_t>(rng() % i)]);
  all.resize(static_cast<std::size_t>(m));
  std::sort(all.begin(), all.end());
  return all;
}

nlohmann::json graph_json(int n, const std::vector<Edge>& edges) {
  nlohmann::json g;
  g["vertex_count"] = n;
  g["edges"] = nlohmann::json::array();
  for (const auto& [u, v, w] : edges) g["edges"].push_back({u, v, w});
  return g;
}

nlohmann::json random_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  nlohmann::json graphs = nlohmann::json::array();
  for (int i = 0; i < 200; ++i) {
    const int n = uniform_int(rng, 3, 8);
    const int max_edges = std::min(16, n * (n - 1) / 2);
    const int m = uniform_int(rng, std::min(n - 1, max_edges), max_edges);
    std::vector<Edge> edges;
    // Quarter-unit weights in [0.25, 2] make ties common.
    for (auto [u, v] : pick_edges(rng, n, m)) edges.emplace_back(u, v, uniform_int(rng, 1, 8) / 4.0);
    graphs.push_back(graph_json(n, edges));
  }
  return graphs;
}

nlohmann::json tiefree_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  nlohmann::json graphs = nlohmann::json::array();
  while (graphs.size() < 50) {
    const int n = uniform_int(rng, 4, 8);
    const int max_edges = std::min(14, n * (n - 1) / 2);
    const int m = uniform_int(rng, n, max_edges);
    std::vector<Edge> edges;
    std::vector<double> weights;
    for (auto [u, v] : pick_edges(rng, n, m)) {
      const double w = std::round((0.5 + 3.5 * uniform_unit(rng)) * 1000.0) / 1000.0;
      edges.emplace_back(u, v, w);
      weights.push_back(w);
    }
    std::sort(weights.begin(), weights.end());
    bool spaced = true;
    for (std::size_t j = 1; j < weights.size(); ++j)
      if (weights[j] - weights[j - 1] < 1e-3 - 1e-12) spaced = false;
    if (spaced) graphs.push_back(graph_json(n, edges));
  }
  return graphs;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: gen_corpus random|tiefree <out.json>\n";
    return 2;
  }
  const std::string kind = argv[1];
  nlohmann::json doc;
  if (kind == "random") {
    doc["seed"] = 20241016;
    doc["max_dim"] = 3;
    doc["graphs"] = random_corpus(20241016);
  } else if (kind == "tiefree") {
    doc["seed"] = 20241017;
    doc["max_dim"] = 2;
    doc["graphs"] = tiefree_corpus(20241017);
  } else {
    std::cerr << "unknown corpus kind " << kind << "\n";
    return 2;
  }
  // One graph per line keeps diffs of the committed corpus readable.
  std::ofstream out(argv[2]);
  out << "{\"seed\": " << doc["seed"] << ", \"max_dim\": " << doc["max_dim"] << ", \"graphs\": [\n";
  for (std::size_t i = 0; i < doc["graphs"].size(); ++i)
    out << "  " << doc["graphs"][i].dump() << (i + 1 < doc["graphs"].size() ? ",\n" : "\n");
  out << "]}\n";
  return out ? 0 : 1;
}
