#include "verify.hpp"

#include <sstream>

#include "plh/local_sheaf.hpp"
#include "plh/oracle.hpp"
#include "plh/persistence.hpp"

namespace plh::cli {

bool exact_psd(std::vector<mpq_class> a, std::size_t n) {
  // Symmetric elimination: a zero pivot must have a zero row.
  for (std::size_t i = 0; i < n; ++i) {
    const mpq_class p = a[i * n + i];
    if (p < 0) return false;
    if (p == 0) {
      for (std::size_t j = i + 1; j < n; ++j)
        if (a[i * n + j] != 0) return false;
      continue;
    }
    for (std::size_t r = i + 1; r < n; ++r) {
      if (a[r * n + i] == 0) continue;
      const mpq_class m = a[r * n + i] / p;
      for (std::size_t c = i; c < n; ++c) a[r * n + c] -= m * a[i * n + c];
    }
  }
  return true;
}

namespace {

class Recorder {
 public:
  Recorder(std::string check, std::string fixture) : r_{std::move(check), std::move(fixture), true, std::nullopt} {}

  template <class... Parts>
  void fail(const Parts&... parts) {
    if (!r_.pass) return;
    std::ostringstream os;
    (os << ... << parts);
    r_.pass = false;
    r_.counterexample = os.str();
  }
  bool failed() const { return !r_.pass; }
  CheckResult result() const { return r_; }

 private:
  CheckResult r_;
};

using Triples = std::vector<std::tuple<int, double, double>>;

template <class S>
Triples triples(const std::vector<PersistentCocycle<S>>& classes, int min_order) {
  Triples out;
  for (const auto& c : classes)
    if (c.order >= min_order) out.emplace_back(c.order, c.birth, c.death);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t exact_kernel(const DenseMatrix<mpq_class>& m) {
  oracle::DenseMatrix d(m.rows, m.cols);
  d.data = m.data;
  return m.rows - oracle::rank(d);
}

}  // namespace

std::vector<CheckResult> verify_filtration(const Filtration& f, const std::string& name,
                                           const VerifyOptions& options) {
  const int top = f.max_dim() - 1;
  std::vector<CheckResult> out;
  const auto ts = f.critical_values();
  const auto exact = persistent_cohomology(f, top, ExactField{});

  {
    Recorder r("betti", name);
    for (int k = 0; k <= top && !r.failed(); ++k)
      for (double t : ts) {
        const int fast = betti_at(exact, t, k), slow = oracle::betti_dense(f, t, k);
        if (fast != slow) r.fail("k=", k, " t=", t, " fast=", fast, " oracle=", slow);
      }
    out.push_back(r.result());
  }
  {
    Recorder r("field_parity", name);
    try {
      const auto flt = persistent_cohomology(f, top, FloatField{});
      if (triples(flt.classes, 0) != triples(exact.classes, 0))
        r.fail("float and exact diagrams differ");
    } catch (const IllConditionedError& e) {
      r.fail("float reduction ill-conditioned: ", e.what());
    }
    out.push_back(r.result());
  }

  std::vector<LocalStalk<mpq_class>> stalks;
  if (top >= 1) stalks = compute_all_stalks(f, top, options.rings, ExactField{}, options.threads);
  {
    Recorder local("local_betti", name), excision("excision", name);
    for (Vertex v = 0; v < stalks.size(); ++v) {
      const Vertex vs[] = {v};
      const auto st = vertex_star(f, vs);
      for (int k = 1; k <= top; ++k)
        for (double t : ts) {
          int fast = 0;
          for (const auto& c : stalks[v].cocycles)
            if (c.order == k && c.alive_at(t)) ++fast;
          const int slow = oracle::local_betti_dense(f, t, st, k);
          if (fast != slow)
            local.fail("vertex=", v, " k=", k, " t=", t, " stalk=", fast, " oracle=", slow);
        }
      const auto full = persistent_relative_cohomology(f, st, top, ExactField{});
      if (triples(stalks[v].cocycles, 1) != triples(full.classes, 1))
        excision.fail("vertex=", v, " truncated and full relative diagrams differ");
      for (int k = 0; k <= top; ++k) {
        const auto rep = oracle::excision_check(f, v, k);
        if (!rep.pass) excision.fail("vertex=", v, " k=", k, " oracle excision mismatch");
      }
    }
    out.push_back(local.result());
    out.push_back(excision.result());
  }
  {
    Recorder dies("theorem_dies_earlier", name), appears("theorem_appears_earlier", name);
    for (Vertex v = 0; v < f.vertex_count(); ++v) {
      const Vertex vs[] = {v};
      const auto st = vertex_star(f, vs);
      for (int k = 0; k <= top; ++k) {
        const auto a = oracle::check_theorem_dies_earlier(f, st, k);
        if (!a.pass) dies.fail("vertex=", v, " ", *a.counterexample);
        const auto b = oracle::check_theorem_appears_earlier(f, st, k);
        if (!b.pass) appears.fail("vertex=", v, " ", *b.counterexample);
      }
    }
    out.push_back(dies.result());
    out.push_back(appears.result());
  }
  {
    Recorder r("mayer_vietoris", name);
    for (Index e : f.of_dimension(1)) {
      const auto& uv = f.simplex(e).vertices;
      const Vertex a[] = {uv[0]}, b[] = {uv[1]};
      for (int k = 0; k <= top; ++k) {
        const auto rep = oracle::check_mayer_vietoris(f, vertex_star(f, a), vertex_star(f, b), k);
        if (!rep.exact())
          r.fail("edge=", uv[0], "-", uv[1], " k=", k, " image=", rep.image_rank,
                 " kernel=", rep.kernel_dim);
      }
    }
    out.push_back(r.result());
  }
  if (top >= 1) {
    Recorder psd("symmetry_psd", name), kernel("sheaf_kernel", name);
    for (int k = 1; k <= top; ++k) {
      const auto blocks = compute_all_blocks(f, stalks, k, ExactField{}, options.threads);
      for (double t : ts) {
        const auto l = assemble_laplacian(f, stalks, blocks, k, LaplacianMode::slice(t));
        const std::size_t n = l.dim();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < i; ++j)
            if (l.matrix.at(i, j) != l.matrix.at(j, i)) psd.fail("k=", k, " t=", t, " asymmetric");
        if (!exact_psd(l.matrix.data, n)) psd.fail("k=", k, " t=", t, " not PSD");
      }
      if (options.sheaf_kernel) {
        const double tp = f.max_value();
        const auto l = assemble_laplacian(f, stalks, blocks, k, LaplacianMode::slice(tp));
        const auto ker = exact_kernel(l.matrix);
        const int beta = oracle::betti_dense(f, tp, k);
        if (ker != static_cast<std::size_t>(beta))
          kernel.fail("k=", k, " kernel=", ker, " betti=", beta);
      }
    }
    out.push_back(psd.result());
    if (options.sheaf_kernel) out.push_back(kernel.result());
  }
  return out;
}

}  // namespace plh::cli
