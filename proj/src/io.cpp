#include "plh/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>

namespace plh::io {

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json number(double x) {
  if (std::isnan(x)) throw ContractError("cannot serialise NaN");
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double to_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  throw ParseError("expected a number or \"inf\", got " + j.dump(), 0);
}

namespace {

void dump_to(std::string& out, const Json& j, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_to(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        if (flat) {
          if (i && indent >= 0) out += ' ';
        } else {
          newline(depth + 1);
        }
        dump_to(out, j[i], indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, std::size_t line, const char* what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || p != end)
    throw ParseError(std::string("invalid ") + what + " '" + s + "'", line);
  return v;
}

Vertex parse_vertex(const std::string& s, std::size_t line) {
  Vertex v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || p != end)
    throw ParseError("invalid vertex id '" + s + "'", line);
  return v;
}

bool has_digit(const std::string& s) {
  for (char c : s)
    if (c >= '0' && c <= '9') return true;
  return false;
}

// Data lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> data_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (out.empty() && !has_digit(t)) continue;  // header
    out.push_back({n, t});
  }
  return out;
}

template <class S>
Json coefficient(const S& x) {
  if constexpr (std::is_same_v<S, mpq_class>) {
    if (x.get_den() == 1 && x.get_num().fits_slong_p()) return x.get_num().get_si();
    return x.get_str();
  } else {
    return number(x);
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_to(out, j, indent, 0);
  return out;
}

WeightedGraph read_edge_csv(std::istream& in) {
  WeightedGraph g;
  for (const auto& [n, text] : data_lines(in)) {
    const auto f = split(text);
    if (f.size() != 3)
      throw ParseError("expected 3 fields u,v,w, found " + std::to_string(f.size()), n);
    const Vertex u = parse_vertex(f[0], n), v = parse_vertex(f[1], n);
    const double w = parse_double(f[2], n, "weight");
    if (!std::isfinite(w) || w < 0) throw ParseError("weight must be finite and nonnegative", n);
    if (u == v) throw ParseError("self-loop on vertex " + std::to_string(u), n);
    g.edges.push_back({u, v, w});
    g.vertex_count = std::max<std::size_t>(g.vertex_count, std::max(u, v) + std::size_t{1});
  }
  try {
    g.validate();
  } catch (const ContractError& e) {
    throw ParseError(e.what(), 0);
  }
  return g;
}

std::vector<std::vector<double>> read_point_csv(std::istream& in) {
  std::vector<std::vector<double>> pts;
  for (const auto& [n, text] : data_lines(in)) {
    const auto f = split(text);
    std::vector<double> p;
    for (const auto& x : f) {
      p.push_back(parse_double(x, n, "coordinate"));
      if (!std::isfinite(p.back())) throw ParseError("coordinate must be finite", n);
    }
    if (!pts.empty() && p.size() != pts.front().size())
      throw ParseError("expected " + std::to_string(pts.front().size()) + " coordinates, found " +
                           std::to_string(p.size()),
                       n);
    pts.push_back(std::move(p));
  }
  return pts;
}

Json filtration_json(const Filtration& f) {
  Json out = Json::array();
  for (Index i = 0; i < f.size(); ++i)
    out.push_back({{"vertices", f.simplex(i).vertices}, {"value", number(f.value(i))}, {"index", i}});
  return out;
}

Filtration filtration_from_json(const Json& j, std::optional<int> max_dim) {
  if (!j.is_array()) throw ParseError("filtration dump must be a JSON array", 0);
  std::vector<Simplex> simplices;
  std::vector<double> values;
  std::size_t vertex_count = 0;
  int top = 0;
  try {
    for (const auto& e : j) {
      Simplex s{e.at("vertices").get<std::vector<Vertex>>()};
      if (s.vertices.empty()) throw ParseError("simplex without vertices", 0);
      for (Vertex v : s.vertices) vertex_count = std::max<std::size_t>(vertex_count, v + std::size_t{1});
      top = std::max(top, s.dimension());
      simplices.push_back(std::move(s));
      values.push_back(to_number(e.at("value")));
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed filtration dump: ") + e.what(), 0);
  }
  const int d = max_dim.value_or(top);
  if (d < top)
    throw ContractError("filtration dump has simplices of dimension " + std::to_string(top) +
                        " above max_dim " + std::to_string(d));
  return Filtration(std::move(simplices), std::move(values), vertex_count, d);
}

template <class S>
Json cocycle_json(const PersistentCocycle<S>& c) {
  Json rep = Json::array();
  for (const auto& e : c.representative)
    rep.push_back({{"simplex_index", e.index}, {"coeff", coefficient(e.value)}});
  Json out = {{"k", c.order},
              {"birth", number(c.birth)},
              {"death", number(c.death)},
              {"birth_index", c.birth_index}};
  out["death_index"] = c.death_index ? Json(*c.death_index) : Json(nullptr);
  out["representative"] = std::move(rep);
  return out;
}

template <class S>
Json diagram_json(const Diagram<S>& d) {
  Json out = Json::array();
  for (const auto& c : d.classes) out.push_back(cocycle_json(c));
  return out;
}

template <class S>
void write_diagram_csv(std::ostream& os, const Diagram<S>& d) {
  os << "k,birth,death\n";
  for (const auto& c : d.classes)
    os << c.order << ',' << format_double(c.birth) << ',' << format_double(c.death) << '\n';
}

template <class S>
Json stalk_json(const LocalStalk<S>& s) {
  Json classes = Json::array();
  for (const auto& c : s.cocycles) classes.push_back(cocycle_json(c));
  Json dims = Json::object();
  for (int k = 1; k <= s.max_order; ++k) dims[std::to_string(k)] = s.dim(k);
  return {{"vertex", s.vertex},
          {"max_order", s.max_order},
          {"dims", std::move(dims)},
          {"truncation_size", s.truncation.filtration.size()},
          {"cocycles", std::move(classes)}};
}

template <class S>
Json laplacian_json(int k, const std::vector<LocalStalk<S>>& stalks,
                    const std::vector<SheafLaplacianBlock<S>>& blocks) {
  Json dims = Json::object();
  for (const auto& s : stalks) dims[std::to_string(s.vertex)] = s.dim(k);
  Json bl = Json::array();
  for (const auto& b : blocks) {
    if (b.atoms.empty()) continue;
    Json atoms = Json::array();
    for (const auto& a : b.atoms) {
      Json va = Json::array(), vb = Json::array();
      for (std::size_t i = 0; i < b.dim_u; ++i) {
        const S* x = find_entry(a.v_a, i);
        va.push_back(x ? coefficient(*x) : Json(0));
      }
      for (std::size_t i = 0; i < b.dim_v; ++i) {
        const S* x = find_entry(a.v_b, i);
        vb.push_back(x ? coefficient(*x) : Json(0));
      }
      atoms.push_back({{"interval", {number(a.start), number(a.end)}}, {"vA", va}, {"vB", vb}});
    }
    bl.push_back({{"u", b.u}, {"v", b.v}, {"atoms", std::move(atoms)}});
  }
  return {{"order", k}, {"stalk_dims", std::move(dims)}, {"blocks", std::move(bl)}};
}

void write_matrix_market(std::ostream& os, const DenseMatrix<double>& m) {
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j <= i && j < m.cols; ++j)
      if (m.at(i, j) != 0.0) ++nnz;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << m.rows << ' ' << m.cols << ' ' << nnz << '\n';
  for (std::size_t j = 0; j < m.cols; ++j)
    for (std::size_t i = j; i < m.rows; ++i)
      if (m.at(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << format_double(m.at(i, j)) << '\n';
}

namespace {

// (vertex, position in its basis) of every operator coordinate.
std::vector<std::pair<std::size_t, std::size_t>> coordinate_owners(
    const AssembledLaplacian<double>& l) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& off = l.layout.offsets;
  for (Index p : l.coords) {
    const auto it = std::upper_bound(off.begin(), off.end(), p);
    const std::size_t v = static_cast<std::size_t>(it - off.begin()) - 1;
    out.push_back({v, p - off[v]});
  }
  return out;
}

}  // namespace

Json features_json(const FeatureBundle& x, const AssembledLaplacian<double>& l) {
  x.validate();
  if (x.dim != l.dim()) throw ContractError("features_json: dimension mismatch");
  const auto owners = coordinate_owners(l);
  Json channels = Json::array();
  for (std::size_t c = 0; c < x.channels; ++c) {
    Json ch = Json::object();
    for (std::size_t i = 0; i < x.dim; ++i)
      ch[std::to_string(owners[i].first)][std::to_string(owners[i].second)] = number(x.channel(c)[i]);
    channels.push_back(std::move(ch));
  }
  return {{"order", l.order}, {"channels", std::move(channels)}};
}

FeatureBundle features_from_json(const Json& j, const AssembledLaplacian<double>& l) {
  const auto owners = coordinate_owners(l);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> position;
  for (std::size_t i = 0; i < owners.size(); ++i) position[owners[i]] = i;
  try {
    if (j.at("order").get<int>() != l.order)
      throw ContractError("feature file is for order " + std::to_string(j.at("order").get<int>()) +
                          ", operator has order " + std::to_string(l.order));
    const auto& chans = j.at("channels");
    auto x = FeatureBundle::zeros(l.dim(), chans.size());
    for (std::size_t c = 0; c < chans.size(); ++c)
      for (auto vit = chans[c].begin(); vit != chans[c].end(); ++vit)
        for (auto it = vit.value().begin(); it != vit.value().end(); ++it) {
          const std::pair<std::size_t, std::size_t> key{std::stoul(vit.key()), std::stoul(it.key())};
          const auto p = position.find(key);
          if (p == position.end())
            throw ContractError("feature for vertex " + vit.key() + " class " + it.key() +
                                " is not a coordinate of the operator");
          x.channel(c)[p->second] = to_number(it.value());
        }
    x.validate();
    return x;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed feature file: ") + e.what(), 0);
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed feature file: non-numeric key", 0);
  }
}

void write_trace_csv(std::ostream& os, const std::vector<double>& energy) {
  os << "step,energy\n";
  for (std::size_t s = 0; s < energy.size(); ++s) os << s << ',' << format_double(energy[s]) << '\n';
}

void write_psi(std::ostream& os, const Mlp& psi) {
  const Json header = {{"widths", psi.widths()},
                       {"activation", activation_name(psi.activation())},
                       {"dtype", "float64"},
                       {"byteorder", "little"},
                       {"count", psi.parameter_count()}};
  os << dump(header, -1) << '\n';
  for (double v : psi.parameters()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char raw[8];
    std::memcpy(raw, &bits, 8);
    os.write(raw, 8);
  }
}

Mlp read_psi(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("psi file: missing header", 1);
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("psi file header: ") + e.what(), 1);
  }
  try {
    if (header.at("dtype") != "float64" || header.at("byteorder") != "little")
      throw ParseError("psi file: only little-endian float64 is supported", 1);
    Mlp psi(header.at("widths").get<std::vector<std::size_t>>(),
            parse_activation(header.at("activation").get<std::string>()));
    const auto count = header.at("count").get<std::size_t>();
    if (count != psi.parameter_count())
      throw ParseError("psi file: count " + std::to_string(count) + " does not match widths", 1);
    std::vector<double> p(count);
    for (auto& v : p) {
      char raw[8];
      if (!in.read(raw, 8)) throw ParseError("psi file: truncated parameter block", 0);
      std::uint64_t bits;
      std::memcpy(&bits, raw, 8);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      v = std::bit_cast<double>(bits);
    }
    psi.set_parameters(std::move(p));
    return psi;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("psi file header: ") + e.what(), 1);
  }
}

#define PLH_INSTANTIATE(S)                                                              \
  template Json cocycle_json(const PersistentCocycle<S>&);                              \
  template Json diagram_json(const Diagram<S>&);                                        \
  template void write_diagram_csv(std::ostream&, const Diagram<S>&);                    \
  template Json stalk_json(const LocalStalk<S>&);                                       \
  template Json laplacian_json(int, const std::vector<LocalStalk<S>>&,                  \
                               const std::vector<SheafLaplacianBlock<S>>&);

PLH_INSTANTIATE(mpq_class)
PLH_INSTANTIATE(double)

#undef PLH_INSTANTIATE

}  // namespace plh::io
