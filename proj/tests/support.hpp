#pragma once

// Shared helpers for the test binaries: corpus loading and diagram summaries.

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "plh/complex.hpp"
#include "plh/oracle.hpp"
#include "plh/persistence.hpp"

namespace support {

struct Corpus {
  int max_dim = 2;
  std::vector<plh::WeightedGraph> graphs;
};

inline Corpus load_corpus(const std::string& file) {
  std::ifstream in(std::string(PLH_TEST_DATA_DIR) + "/" + file);
  if (!in) throw std::runtime_error("cannot open corpus " + file);
  const auto doc = nlohmann::json::parse(in);
  Corpus c;
  c.max_dim = doc.at("max_dim").get<int>();
  for (const auto& g : doc.at("graphs")) {
    plh::WeightedGraph wg;
    wg.vertex_count = g.at("vertex_count").get<std::size_t>();
    for (const auto& e : g.at("edges"))
      wg.edges.push_back({e[0].get<plh::Vertex>(), e[1].get<plh::Vertex>(), e[2].get<double>()});
    c.graphs.push_back(std::move(wg));
  }
  return c;
}

using Triple = std::tuple<int, double, double>;

template <class S>
std::vector<Triple> triples(const plh::Diagram<S>& d) {
  std::vector<Triple> out;
  for (const auto& c : d.classes) out.emplace_back(c.order, c.birth, c.death);
  std::sort(out.begin(), out.end());
  return out;
}

template <class S>
plh::oracle::DenseMatrix to_oracle(const std::vector<S>& data, std::size_t rows, std::size_t cols) {
  plh::oracle::DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) m.data[i] = mpq_class(data[i]);
  return m;
}

inline plh::Simplex sx(std::vector<plh::Vertex> v) { return plh::Simplex{std::move(v)}; }

}  // namespace support
