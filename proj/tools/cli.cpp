#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "plh/diffusion.hpp"
#include "plh/fixtures.hpp"
#include "plh/io.hpp"
#include "plh/nn.hpp"
#include "plh/parallel.hpp"
#include "verify.hpp"

namespace plh::cli {

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerifyFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string format = "edges";
  std::string metric = "euclidean";
  std::optional<std::size_t> knn;
  int max_order = 1;
  std::optional<int> max_dim;
  int rings = 1;
  std::string field = "float";
  double eps = 1e-9;
  std::optional<std::string> mode;
  unsigned threads = 0;
  std::string out;
  std::optional<int> order;
  std::string export_mtx;
  // diffuse
  std::optional<double> alpha;
  std::size_t steps = 100;
  std::size_t channels = 1;
  std::uint64_t seed = 0;
  std::string features;
  std::string trace;
  std::string psi;
  std::string save_psi;
};

struct Output {
  std::string path;  // empty: the command's output stream
  std::string content;
  bool binary = false;
};
using Outputs = std::vector<Output>;

std::string text(const io::Json& j) { return io::dump(j) + "\n"; }

unsigned threads_of(const RunConfig& c) { return c.threads == 0 ? default_threads() : c.threads; }

int max_dim_of(const RunConfig& c) { return c.max_dim.value_or(c.max_order + 1); }

void validate(const RunConfig& c) {
  if (c.max_order < 0) throw ConfigError("--max-order must be nonnegative");
  if (c.max_dim && *c.max_dim < c.max_order + 1)
    throw ConfigError("--max-order " + std::to_string(c.max_order) + " needs --max-dim at least " +
                      std::to_string(c.max_order + 1) + ", got " + std::to_string(*c.max_dim));
  if (c.rings < 1) throw ConfigError("--rings must be at least 1");
  if (!(c.eps > 0)) throw ConfigError("--eps must be positive");
}

std::ifstream open_input(const std::string& path, bool binary = false) {
  if (path.empty()) throw ConfigError("--input is required");
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

Filtration load(const RunConfig& c) {
  auto in = open_input(c.input);
  if (c.format == "edges") return build_flag_complex(io::read_edge_csv(in), max_dim_of(c));
  if (c.format == "points") {
    const auto metric = c.metric == "manhattan" ? Metric::manhattan : Metric::euclidean;
    return build_flag_complex(point_cloud_graph(io::read_point_csv(in), metric, c.knn),
                              max_dim_of(c));
  }
  // filtration dump
  io::Json j;
  try {
    j = io::Json::parse(in);
  } catch (const io::Json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  try {
    if (c.max_dim) return io::filtration_from_json(j, c.max_dim);
    auto f = io::filtration_from_json(j);
    if (f.max_dim() < c.max_order + 1) f = io::filtration_from_json(j, c.max_order + 1);
    return f;
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

LaplacianMode parse_mode(const std::string& s, const Filtration& f) {
  if (s == "weighted") return LaplacianMode::weighted();
  if (s == "slice") return LaplacianMode::slice(f.max_value());
  if (s.rfind("slice=", 0) == 0) {
    try {
      std::size_t used = 0;
      const double t = std::stod(s.substr(6), &used);
      if (used == s.size() - 6) return LaplacianMode::slice(t);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("--mode must be weighted, slice or slice=<t>, got '" + s + "'");
}

int order_of(const RunConfig& c) {
  const int k = c.order.value_or(std::max(c.max_order, 1));
  if (k < 1 || k > c.max_order)
    throw ConfigError("--order must lie in [1, --max-order]; got " + std::to_string(k) +
                      " with --max-order " + std::to_string(c.max_order));
  return k;
}

// Float by default; an ill-conditioned float reduction is retried exactly.
template <class Fn>
Outputs with_field(const RunConfig& c, std::ostream& err, Fn&& fn) {
  if (c.field == "exact") return fn(ExactField{});
  try {
    return fn(FloatField{c.eps});
  } catch (const IllConditionedError& e) {
    err << "note: " << e.what() << "; retrying with exact arithmetic\n";
    return fn(ExactField{});
  }
}

Outputs cmd_filtration(const RunConfig& c) { return {{c.out, text(io::filtration_json(load(c)))}}; }

Outputs cmd_persistence(const RunConfig& c, std::ostream& err) {
  const auto f = load(c);
  return with_field(c, err, [&](auto field) -> Outputs {
    const auto d = persistent_cohomology(f, c.max_order, field);
    std::ostringstream csv;
    io::write_diagram_csv(csv, d);
    if (c.out.empty()) return {{"", text(io::diagram_json(d))}};
    return {{c.out + ".json", text(io::diagram_json(d))}, {c.out + ".csv", csv.str()}};
  });
}

Outputs cmd_stalks(const RunConfig& c, std::ostream& err) {
  const auto f = load(c);
  return with_field(c, err, [&](auto field) -> Outputs {
    const auto stalks = compute_all_stalks(f, c.max_order, c.rings, field, threads_of(c));
    if (c.out.empty()) {
      io::Json all = io::Json::array();
      for (const auto& s : stalks) all.push_back(io::stalk_json(s));
      return {{"", text(all)}};
    }
    Outputs o;
    for (const auto& s : stalks)
      o.push_back({(std::filesystem::path(c.out) / ("stalk_" + std::to_string(s.vertex) + ".json"))
                       .string(),
                   text(io::stalk_json(s))});
    return o;
  });
}

Outputs cmd_laplacian(const RunConfig& c, std::ostream& err) {
  const auto f = load(c);
  const int k = order_of(c);
  const auto mode = parse_mode(c.mode.value_or("weighted"), f);
  return with_field(c, err, [&](auto field) -> Outputs {
    const auto stalks = compute_all_stalks(f, c.max_order, c.rings, field, threads_of(c));
    const auto blocks = compute_all_blocks(f, stalks, k, field, threads_of(c));
    Outputs o{{c.out, text(io::laplacian_json(k, stalks, blocks))}};
    if (!c.export_mtx.empty()) {
      const auto l = to_double(assemble_laplacian(f, stalks, blocks, k, mode));
      std::ostringstream mtx;
      io::write_matrix_market(mtx, l.matrix);
      o.push_back({c.export_mtx, mtx.str()});
    }
    return o;
  });
}

// Applies the psi layer vertex by vertex on every channel.
FeatureBundle apply_psi(const FeatureBundle& x, const AssembledLaplacian<double>& l,
                        const std::vector<std::vector<Descriptor>>& descriptors, const Mlp& psi) {
  const PsiLayer layer{psi, {}, Activation::tanh};
  FeatureBundle y = x;
  for (std::size_t v = 0; v + 1 < l.layout.offsets.size(); ++v) {
    std::vector<std::size_t> positions;
    std::vector<Descriptor> d;
    for (std::size_t i = 0; i < l.coords.size(); ++i)
      if (l.coords[i] >= l.layout.offsets[v] && l.coords[i] < l.layout.offsets[v + 1]) {
        positions.push_back(i);
        d.push_back(descriptors[v][l.coords[i] - l.layout.offsets[v]]);
      }
    if (positions.empty()) continue;
    for (std::size_t ch = 0; ch < x.channels; ++ch) {
      std::vector<double> local;
      for (auto p : positions) local.push_back(x.channel(ch)[p]);
      const auto out = layer.forward(local, d);
      for (std::size_t i = 0; i < positions.size(); ++i) y.channel(ch)[positions[i]] = out[i];
    }
  }
  return y;
}

Outputs cmd_diffuse(const RunConfig& c, std::ostream& err) {
  const auto f = load(c);
  const int k = order_of(c);
  const auto mode = parse_mode(c.mode.value_or("slice"), f);
  if (mode.kind != LaplacianMode::Kind::slice)
    throw ConfigError("diffuse needs a slice-mode operator; the weighted one is not symmetric");
  std::optional<Mlp> psi;
  if (c.psi == "default") {
    psi = Mlp::default_psi(c.seed);
  } else if (!c.psi.empty()) {
    auto in = open_input(c.psi, true);
    psi = io::read_psi(in);
  }
  return with_field(c, err, [&](auto field) -> Outputs {
    const auto stalks = compute_all_stalks(f, c.max_order, c.rings, field, threads_of(c));
    const auto l = to_double(assemble_laplacian(f, stalks, k, mode, field, threads_of(c)));
    FeatureBundle x;
    if (c.features.empty()) {
      x = FeatureBundle::random(l.dim(), c.channels, c.seed);
    } else {
      auto in = open_input(c.features);
      io::Json j;
      try {
        j = io::Json::parse(in);
      } catch (const io::Json::exception& e) {
        throw ParseError(std::string("invalid feature JSON: ") + e.what(), 0);
      }
      x = io::features_from_json(j, l);
    }
    const double lmax = lambda_max(l);
    const double alpha = c.alpha.value_or(lmax > 0 ? 0.9 / lmax : 1.0);
    auto r = diffuse(x, l, alpha, c.steps);
    if (psi) {
      std::vector<std::vector<Descriptor>> d;
      for (const auto& s : stalks) d.push_back(stalk_descriptors(s, k, f.max_value()));
      r.features = apply_psi(r.features, l, d, *psi);
    }
    auto j = io::features_json(r.features, l);
    j["alpha"] = io::number(alpha);
    j["lambda_max"] = io::number(lmax);
    j["steps"] = c.steps;
    j["initial_energy"] = io::number(r.energy.front());
    j["final_energy"] = io::number(r.energy.back());
    Outputs o{{c.out, text(j)}};
    if (!c.trace.empty()) {
      std::ostringstream csv;
      io::write_trace_csv(csv, r.energy);
      o.push_back({c.trace, csv.str()});
    }
    if (psi && !c.save_psi.empty()) {
      std::ostringstream bin;
      io::write_psi(bin, *psi);
      o.push_back({c.save_psi, bin.str(), true});
    }
    return o;
  });
}

Outputs cmd_verify(const RunConfig& c, std::ostream& err, bool& failed_any) {
  VerifyOptions opt{c.rings, threads_of(c), true};
  std::vector<CheckResult> results;
  if (c.input.empty()) {
    for (const auto& fx : fixtures::golden()) {
      const auto f = build_flag_complex(fx.graph, fx.max_dim);
      auto r = verify_filtration(f, fx.name, opt);
      results.insert(results.end(), r.begin(), r.end());
    }
  } else {
    opt.sheaf_kernel = false;
    const auto f = load(c);
    results = verify_filtration(f, std::filesystem::path(c.input).filename().string(), opt);
  }
  io::Json report = io::Json::array();
  std::size_t failed = 0;
  for (const auto& r : results) {
    io::Json e = {{"check", r.check}, {"fixture", r.fixture}, {"status", r.pass ? "pass" : "fail"}};
    if (r.counterexample) e["counterexample"] = *r.counterexample;
    report.push_back(std::move(e));
    if (!r.pass) ++failed;
  }
  err << results.size() - failed << "/" << results.size() << " checks passed\n";
  failed_any = failed > 0;
  return {{c.out, text(report)}};
}

void emit(const Outputs& outputs, std::ostream& out) {
  for (const auto& o : outputs) {
    if (o.path.empty()) {
      out << o.content;
      continue;
    }
    const auto parent = std::filesystem::path(o.path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(o.path, o.binary ? std::ios::binary : std::ios::out);
    if (!f) throw ConfigError("cannot write '" + o.path + "'");
    f << o.content;
  }
}

void add_common(CLI::App* app, RunConfig& c) {
  app->add_option("--input", c.input, "input file");
  app->add_option("--format", c.format, "edges | points | filtration")
      ->check(CLI::IsMember({"edges", "points", "filtration"}));
  app->add_option("--metric", c.metric, "point metric")
      ->check(CLI::IsMember({"euclidean", "manhattan"}));
  app->add_option("--knn", c.knn, "keep k-nearest-neighbour edges only")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-order", c.max_order, "largest cohomology order K");
  app->add_option("--max-dim", c.max_dim, "clique dimension (default K+1)");
  app->add_option("--rings", c.rings, "closed-star rings around each vertex");
  app->add_option("--field", c.field, "exact | float")->check(CLI::IsMember({"exact", "float"}));
  app->add_option("--eps", c.eps, "float pivot threshold");
  app->add_option("--threads", c.threads, "worker threads (0: all cores)");
  app->add_option("--out", c.out, "output path");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persistent local homology sheaves of weighted graphs"};
  app.require_subcommand(1);
  RunConfig c;

  auto* filtration = app.add_subcommand("filtration", "dump the flag filtration as JSON");
  auto* persistence = app.add_subcommand("persistence", "persistent cohomology diagram");
  auto* stalks = app.add_subcommand("stalks", "persistent local cohomology of every vertex");
  auto* laplacian = app.add_subcommand("laplacian", "sheaf Laplacian blocks");
  auto* diffuse_cmd = app.add_subcommand("diffuse", "sheaf diffusion of stalk features");
  auto* verify = app.add_subcommand("verify", "check the fast path against the dense oracle");
  for (auto* s : {filtration, persistence, stalks, laplacian, diffuse_cmd, verify}) add_common(s, c);
  for (auto* s : {laplacian, diffuse_cmd}) {
    s->add_option("--order", c.order, "cohomology order k of the operator");
    s->add_option("--mode", c.mode, "weighted | slice | slice=<t>");
  }
  laplacian->add_option("--export-mtx", c.export_mtx, "write the assembled matrix here");
  diffuse_cmd->add_option("--alpha", c.alpha, "step size (default 0.9/lambda_max)");
  diffuse_cmd->add_option("--steps", c.steps, "number of explicit steps");
  diffuse_cmd->add_option("--channels", c.channels, "random feature channels");
  diffuse_cmd->add_option("--seed", c.seed, "seed for random features and the default psi");
  diffuse_cmd->add_option("--features", c.features, "feature JSON (default: random)");
  diffuse_cmd->add_option("--trace", c.trace, "write step,energy CSV here");
  diffuse_cmd->add_option("--psi", c.psi, "psi parameter file, or 'default'");
  diffuse_cmd->add_option("--save-psi", c.save_psi, "write the psi parameters used here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    validate(c);
    Outputs outputs;
    bool verify_failed = false;
    if (*filtration) outputs = cmd_filtration(c);
    else if (*persistence) outputs = cmd_persistence(c, err);
    else if (*stalks) outputs = cmd_stalks(c, err);
    else if (*laplacian) outputs = cmd_laplacian(c, err);
    else if (*diffuse_cmd) outputs = cmd_diffuse(c, err);
    else outputs = cmd_verify(c, err, verify_failed);
    emit(outputs, out);
    return verify_failed ? kExitVerify : kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error in " << (c.input.empty() ? "input" : c.input) << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractError& e) {
    err << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitContract;
  }
}

}  // namespace plh::cli
