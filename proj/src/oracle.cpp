#include "plh/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "plh/errors.hpp"

namespace plh::oracle {

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
  return t;
}

bool DenseMatrix::symmetric() const {
  if (rows != cols) return false;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = i + 1; j < cols; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw ContractError("oracle multiply: shape mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t l = 0; l < a.cols; ++l) {
      if (sgn(a.at(i, l)) == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += a.at(i, l) * b.at(l, j);
    }
  return c;
}

namespace {

// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(DenseMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t p = row;
    while (p < m.rows && sgn(m.at(p, col)) == 0) ++p;
    if (p == m.rows) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(row, j));
    const mpq_class inv = 1 / m.at(row, col);
    for (std::size_t j = col; j < m.cols; ++j) m.at(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == row || sgn(m.at(i, col)) == 0) continue;
      const mpq_class factor = m.at(i, col);
      for (std::size_t j = col; j < m.cols; ++j) m.at(i, j) -= factor * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank(DenseMatrix m) { return rref(m).size(); }

DenseMatrix nullspace(const DenseMatrix& m) {
  DenseMatrix r = m;
  const auto pivots = rref(r);
  std::vector<char> is_pivot(m.cols, 0);
  for (auto p : pivots) is_pivot[p] = 1;
  DenseMatrix basis(m.cols, m.cols - pivots.size());
  std::size_t out = 0;
  for (std::size_t free = 0; free < m.cols; ++free) {
    if (is_pivot[free]) continue;
    basis.at(free, out) = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) basis.at(pivots[i], out) = -r.at(i, free);
    ++out;
  }
  return basis;
}

namespace {

using Tuple = std::vector<Vertex>;

// A complex rebuilt from vertex tuples, with a per-simplex mask selecting
// the chain coordinates in use.
struct Complex {
  std::vector<Tuple> simplices;
  std::map<Tuple, std::size_t> index;

  void add(const Tuple& s) {
    if (index.emplace(s, simplices.size()).second) simplices.push_back(s);
  }

  std::vector<std::size_t> of_dim(int k, const std::vector<char>& mask) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < simplices.size(); ++i)
      if (mask[i] && static_cast<int>(simplices[i].size()) == k + 1) out.push_back(i);
    return out;
  }

  // Boundary d_k with rows (k-1)-simplices and columns k-simplices in `mask`.
  DenseMatrix boundary(int k, const std::vector<char>& mask) const {
    const auto cols = of_dim(k, mask);
    const auto rows = k > 0 ? of_dim(k - 1, mask) : std::vector<std::size_t>{};
    std::map<std::size_t, std::size_t> row_of;
    for (std::size_t r = 0; r < rows.size(); ++r) row_of[rows[r]] = r;
    DenseMatrix d(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Tuple& s = simplices[cols[j]];
      if (s.size() < 2) continue;
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        Tuple face;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (i != drop) face.push_back(s[i]);
        auto it = index.find(face);
        if (it == index.end()) throw ContractError("oracle: complex is not closed under faces");
        auto r = row_of.find(it->second);
        if (r != row_of.end()) d.at(r->second, j) = (drop % 2 == 0) ? 1 : -1;
      }
    }
    return d;
  }
};

Complex complex_at(const Filtration& f, double t) {
  Complex c;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.value(i) <= t) c.add(f.simplex(i).vertices);
  return c;
}

Complex prefix(const Filtration& f, std::size_t count) {
  Complex c;
  for (std::size_t i = 0; i < count; ++i) c.add(f.simplex(i).vertices);
  return c;
}

std::set<Tuple> tuples_of(const Filtration& f, const SimplexSubset& s) {
  std::set<Tuple> out;
  for (auto i : s.ids) out.insert(f.simplex(i).vertices);
  return out;
}

std::vector<Tuple> faces_of(const Tuple& s) {
  std::vector<Tuple> out;
  if (s.size() < 2) return out;
  for (std::size_t drop = 0; drop < s.size(); ++drop) {
    Tuple face;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (i != drop) face.push_back(s[i]);
    out.push_back(face);
  }
  return out;
}

bool tuple_contains(const Tuple& big, const Tuple& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Betti of the chain complex restricted to `mask` (a quotient complex when the
// complement is a subcomplex).
int betti_masked(const Complex& c, const std::vector<char>& mask, int k) {
  const auto n = c.of_dim(k, mask).size();
  const auto rk = rank(c.boundary(k, mask));
  const auto rk1 = rank(c.boundary(k + 1, mask));
  return static_cast<int>(n - rk - rk1);
}

std::vector<char> mask_outside(const Complex& c, const std::set<Tuple>& excluded) {
  std::vector<char> m(c.simplices.size(), 1);
  for (std::size_t i = 0; i < c.simplices.size(); ++i)
    if (excluded.count(c.simplices[i])) m[i] = 0;
  return m;
}

std::vector<char> mask_inside(const Complex& c, const std::set<Tuple>& included) {
  std::vector<char> m(c.simplices.size(), 0);
  for (std::size_t i = 0; i < c.simplices.size(); ++i)
    if (included.count(c.simplices[i])) m[i] = 1;
  return m;
}

bool is_closed(const std::set<Tuple>& s) {
  for (const auto& t : s)
    for (const auto& face : faces_of(t))
      if (!s.count(face)) return false;
  return true;
}

bool is_open_in(const Complex& c, const std::set<Tuple>& s) {
  for (const auto& t : c.simplices) {
    if (s.count(t)) continue;
    for (const auto& face : faces_of(t))
      if (s.count(face)) return false;
  }
  return true;
}

}  // namespace

int betti_dense(const Filtration& f, double t, int k) {
  if (k < 0) return 0;
  const Complex c = complex_at(f, t);
  return betti_masked(c, std::vector<char>(c.simplices.size(), 1), k);
}

int relative_betti_dense(const Filtration& f, double t, const SimplexSubset& closed, int k) {
  if (k < 0) return 0;
  const auto a = tuples_of(f, closed);
  if (!is_closed(a)) throw ContractError("relative_betti_dense: subset is not closed");
  const Complex c = complex_at(f, t);
  return betti_masked(c, mask_outside(c, a), k);
}

int local_betti_dense(const Filtration& f, double t, const SimplexSubset& open, int k) {
  if (k < 0) return 0;
  const auto u = tuples_of(f, open);
  const Complex c = complex_at(f, t);
  if (!is_open_in(c, u)) throw ContractError("local_betti_dense: subset is not open");
  return betti_masked(c, mask_inside(c, u), k);
}

DenseMatrix hodge_laplacian_dense(const Filtration& f, double t, int k) {
  const Complex c = complex_at(f, t);
  const std::vector<char> all(c.simplices.size(), 1);
  const auto n = c.of_dim(k, all).size();
  DenseMatrix out(n, n);
  if (k > 0) {
    const auto d = c.boundary(k, all);
    const auto dtd = multiply(d.transpose(), d);
    for (std::size_t i = 0; i < n * n; ++i) out.data[i] += dtd.data[i];
  }
  const auto d1 = c.boundary(k + 1, all);
  const auto ddt = multiply(d1, d1.transpose());
  for (std::size_t i = 0; i < n * n; ++i) out.data[i] += ddt.data[i];
  return out;
}

// --- Mayer-Vietoris ----------------------------------------------------------------

namespace {

// Chain complex of (S, S \ U) in coordinates of the ambient k-simplices.
struct LocalChains {
  std::vector<std::size_t> cells;  // ambient k-simplex ids in U
  DenseMatrix cycles;              // ambient-coordinates basis of Z_k
  DenseMatrix boundaries;          // ambient-coordinates spanning set of B_k
};

DenseMatrix hstack(const std::vector<const DenseMatrix*>& parts, std::size_t rows) {
  std::size_t cols = 0;
  for (auto* p : parts) cols += p->cols;
  DenseMatrix out(rows, cols);
  std::size_t off = 0;
  for (auto* p : parts) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < p->cols; ++j) out.at(i, off + j) = p->at(i, j);
    off += p->cols;
  }
  return out;
}

// Embeds the columns of m (indexed by `local`) into ambient coordinates.
DenseMatrix embed(const DenseMatrix& m, const std::vector<std::size_t>& local,
                  const std::vector<std::size_t>& ambient) {
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < ambient.size(); ++i) pos[ambient[i]] = i;
  DenseMatrix out(ambient.size(), m.cols);
  for (std::size_t i = 0; i < local.size(); ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out.at(pos.at(local[i]), j) = m.at(i, j);
  return out;
}

// Zeroes every ambient coordinate outside `mask`.
DenseMatrix project(DenseMatrix m, const std::vector<std::size_t>& ambient,
                    const std::vector<char>& mask) {
  for (std::size_t i = 0; i < ambient.size(); ++i)
    if (!mask[ambient[i]])
      for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = 0;
  return m;
}

LocalChains local_chains(const Complex& c, const std::vector<char>& mask, int k,
                         const std::vector<std::size_t>& ambient) {
  LocalChains out;
  out.cells = c.of_dim(k, mask);
  out.cycles = embed(nullspace(c.boundary(k, mask)), out.cells, ambient);
  out.boundaries = embed(c.boundary(k + 1, mask), out.cells, ambient);
  return out;
}

}  // namespace

MayerVietorisReport check_mayer_vietoris(const Filtration& f, const SimplexSubset& open_a,
                                         const SimplexSubset& open_b, int k,
                                         std::optional<double> t) {
  const Complex c = complex_at(f, t.value_or(f.max_value()));
  const auto ta = tuples_of(f, open_a);
  const auto tb = tuples_of(f, open_b);
  if (!is_open_in(c, ta) || !is_open_in(c, tb))
    throw ContractError("check_mayer_vietoris: inputs must be open");
  std::set<Tuple> tu = ta, ti;
  tu.insert(tb.begin(), tb.end());
  for (const auto& s : ta)
    if (tb.count(s)) ti.insert(s);

  const auto ma = mask_inside(c, ta), mb = mask_inside(c, tb);
  const auto mu = mask_inside(c, tu), mi = mask_inside(c, ti);
  const std::vector<char> all(c.simplices.size(), 1);
  const auto ambient = c.of_dim(k, all);
  const std::size_t n = ambient.size();

  const auto hu = local_chains(c, mu, k, ambient);
  const auto ha = local_chains(c, ma, k, ambient);
  const auto hb = local_chains(c, mb, k, ambient);
  const auto hi = local_chains(c, mi, k, ambient);

  // Middle term lives in ambient (+) ambient.
  auto stack2 = [&](const DenseMatrix& top, const DenseMatrix& bottom) {
    DenseMatrix out(2 * n, top.cols);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < top.cols; ++j) {
        out.at(i, j) = top.at(i, j);
        out.at(n + i, j) = bottom.at(i, j);
      }
    return out;
  };
  auto blockdiag = [&](const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(2 * n, a.cols + b.cols);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < a.cols; ++j) out.at(i, j) = a.at(i, j);
      for (std::size_t j = 0; j < b.cols; ++j) out.at(n + i, a.cols + j) = b.at(i, j);
    }
    return out;
  };

  MayerVietorisReport report;
  report.order = k;

  // First map: z -> (pi_A z, pi_B z).
  const auto f_cycles = stack2(project(hu.cycles, ambient, ma), project(hu.cycles, ambient, mb));
  const auto b_mid = blockdiag(ha.boundaries, hb.boundaries);
  report.image_rank = rank(hstack({&f_cycles, &b_mid}, 2 * n)) - rank(b_mid);

  // Second map: (y, z) -> pi_{AnB} y - pi_{AnB} z, on cycles of the middle term.
  const auto z_mid = blockdiag(ha.cycles, hb.cycles);
  DenseMatrix g(n, z_mid.cols);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mi[ambient[i]]) continue;
    for (std::size_t j = 0; j < z_mid.cols; ++j) g.at(i, j) = z_mid.at(i, j) - z_mid.at(n + i, j);
  }
  // dim{alpha : g alpha in B_{AnB}} minus dim of boundaries already in the middle term.
  DenseMatrix neg_b = hi.boundaries;
  for (auto& x : neg_b.data) x = -x;
  const auto sys = hstack({&g, &neg_b}, n);
  const auto null = nullspace(sys);
  DenseMatrix alpha(z_mid.cols, null.cols);
  for (std::size_t i = 0; i < z_mid.cols; ++i)
    for (std::size_t j = 0; j < null.cols; ++j) alpha.at(i, j) = null.at(i, j);
  const auto preimage = multiply(z_mid, alpha);
  report.kernel_dim = rank(hstack({&preimage, &b_mid}, 2 * n)) - rank(b_mid);

  // Composite on chains: pi_{AnB}(pi_A z) - pi_{AnB}(pi_B z) = 0.
  report.composite_zero = true;
  for (std::size_t i = 0; i < n && report.composite_zero; ++i) {
    if (!mi[ambient[i]]) continue;
    for (std::size_t j = 0; j < f_cycles.cols; ++j)
      if (f_cycles.at(i, j) != f_cycles.at(n + i, j)) {
        report.composite_zero = false;
        break;
      }
  }
  return report;
}

// --- step-by-step theorem checks ------------------------------------------------------

namespace {

// Cochains of the step-(i+1) complex in coordinates of its k-simplices.
struct Cochains {
  DenseMatrix cocycles;     // basis of Z^k on the mask, ambient coordinates
  DenseMatrix coboundaries; // spanning set of B^k on the mask
};

Cochains cochains(const Complex& c, const std::vector<char>& mask, int k,
                  const std::vector<std::size_t>& ambient) {
  Cochains out;
  const auto cells = c.of_dim(k, mask);
  // delta^k = (d_{k+1})^T restricted to the mask.
  const auto delta = c.boundary(k + 1, mask).transpose();
  out.cocycles = embed(nullspace(delta), cells, ambient);
  if (k > 0) {
    const auto delta_prev = c.boundary(k, mask).transpose();
    out.coboundaries = embed(delta_prev, cells, ambient);
  } else {
    out.coboundaries = DenseMatrix(ambient.size(), 0);
  }
  return out;
}

// dim of (span(vectors) + B) / B.
std::size_t rank_mod(const DenseMatrix& vectors, const DenseMatrix& b) {
  return rank(hstack({&vectors, &b}, vectors.rows)) - rank(b);
}

bool contained_mod(const DenseMatrix& inner, const DenseMatrix& outer, const DenseMatrix& b) {
  return rank(hstack({&inner, &outer, &b}, b.rows)) == rank(hstack({&outer, &b}, b.rows));
}

struct Step {
  Complex next;
  std::vector<std::size_t> ambient;
  std::vector<char> s_prev, s_next, u_prev, u_next;
};

Step make_step(const Filtration& f, const std::set<Tuple>& u, std::size_t i, int k) {
  Step s;
  s.next = prefix(f, i + 1);
  const std::size_t n = s.next.simplices.size();
  s.s_next.assign(n, 1);
  s.s_prev.assign(n, 1);
  s.s_prev[n - 1] = 0;
  s.u_next = mask_inside(s.next, u);
  s.u_prev = s.u_next;
  s.u_prev[n - 1] = 0;
  s.ambient = s.next.of_dim(k, s.s_next);
  return s;
}

std::string describe_step(const Filtration& f, std::size_t i, int k) {
  std::ostringstream os;
  os << "order " << k << ", step adding simplex " << i << " [";
  const auto& vs = f.simplex(i).vertices;
  for (std::size_t j = 0; j < vs.size(); ++j) os << (j ? "," : "") << vs[j];
  os << "] at value " << f.value(i);
  return os.str();
}

}  // namespace

TheoremReport check_theorem_dies_earlier(const Filtration& f, const SimplexSubset& open_set,
                                         int k) {
  TheoremReport report;
  const auto u = tuples_of(f, open_set);
  if (!is_open_in(prefix(f, f.size()), u))
    throw ContractError("check_theorem_dies_earlier: subset is not open");
  for (std::size_t i = 1; i < f.size(); ++i) {
    const Step s = make_step(f, u, i, k);
    const auto abs_next = cochains(s.next, s.s_next, k, s.ambient);
    const auto abs_prev = cochains(s.next, s.s_prev, k, s.ambient);
    const auto rel_next = cochains(s.next, s.u_next, k, s.ambient);
    const auto rel_prev = cochains(s.next, s.u_prev, k, s.ambient);

    const auto restricted_abs = project(abs_next.cocycles, s.ambient, s.s_prev);
    const auto restricted_rel = project(rel_next.cocycles, s.ambient, s.u_prev);
    ++report.steps_checked;
    // Hypothesis: some class in im i*_t is not in im rho_abs (it dies here).
    if (!contained_mod(rel_prev.cocycles, restricted_abs, abs_prev.coboundaries))
      ++report.hypothesis_fired;
    if (!contained_mod(restricted_rel, restricted_abs, abs_prev.coboundaries)) {
      report.pass = false;
      report.counterexample = describe_step(f, i, k);
      return report;
    }
  }
  return report;
}

TheoremReport check_theorem_appears_earlier(const Filtration& f, const SimplexSubset& open_set,
                                            int k) {
  TheoremReport report;
  const auto u = tuples_of(f, open_set);
  if (!is_open_in(prefix(f, f.size()), u))
    throw ContractError("check_theorem_appears_earlier: subset is not open");
  for (std::size_t i = 1; i < f.size(); ++i) {
    const Step s = make_step(f, u, i, k);
    const auto abs_prev = cochains(s.next, s.s_prev, k, s.ambient);
    const auto rel_next = cochains(s.next, s.u_next, k, s.ambient);
    const auto rel_prev = cochains(s.next, s.u_prev, k, s.ambient);

    // rho_abs(i*_{t+1} z): extension by zero, then restriction to S_t.
    const auto carried = project(rel_next.cocycles, s.ambient, s.s_prev);
    ++report.steps_checked;
    if (rank_mod(carried, abs_prev.coboundaries) > 0) ++report.hypothesis_fired;
    if (!contained_mod(carried, rel_prev.cocycles, abs_prev.coboundaries)) {
      report.pass = false;
      report.counterexample = describe_step(f, i, k);
      return report;
    }
  }
  return report;
}

// --- excision -----------------------------------------------------------------------

ExcisionReport excision_check(const Filtration& f, Vertex v, int k) {
  ExcisionReport report;
  const Tuple root{v};
  std::set<Tuple> st;
  for (const auto& s : f.simplices())
    if (tuple_contains(s.vertices, root)) st.insert(s.vertices);
  if (st.empty()) throw LookupError("excision_check: vertex not in filtration");
  std::set<Tuple> cl = st;
  std::vector<Tuple> work(st.begin(), st.end());
  while (!work.empty()) {
    Tuple s = work.back();
    work.pop_back();
    for (auto& face : faces_of(s))
      if (cl.insert(face).second) work.push_back(face);
  }
  std::set<Tuple> fr;
  for (const auto& s : cl)
    if (!st.count(s)) fr.insert(s);

  for (double t : f.critical_values()) {
    const Complex c = complex_at(f, t);
    const int full = betti_masked(c, mask_inside(c, st), k);
    // The closed star as a complex of its own, relative to its frontier.
    Complex closed;
    for (const auto& s : c.simplices)
      if (cl.count(s)) closed.add(s);
    const int local = betti_masked(closed, mask_outside(closed, fr), k);
    report.thresholds.push_back(t);
    report.full.push_back(full);
    report.local.push_back(local);
    if (full != local) report.pass = false;
  }
  return report;
}

}  // namespace plh::oracle
