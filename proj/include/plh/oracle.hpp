#pragma once

// Brute-force dense homology over exact rationals. Nothing here calls into the
// persistence or sheaf code: boundary matrices are rebuilt from vertex tuples.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "plh/complex.hpp"

namespace plh::oracle {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<mpq_class> data;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, mpq_class(0)) {}

  mpq_class& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const mpq_class& at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  DenseMatrix transpose() const;
  bool symmetric() const;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
std::size_t rank(DenseMatrix m);
/// Columns form a basis of {x : m x = 0}.
DenseMatrix nullspace(const DenseMatrix& m);

int betti_dense(const Filtration& f, double t, int k);
/// Betti number of C(S_t) / C(A_t); `closed` must be a subcomplex.
int relative_betti_dense(const Filtration& f, double t, const SimplexSubset& closed, int k);
/// Betti number of (S_t, S_t \ U_t) for an open U.
int local_betti_dense(const Filtration& f, double t, const SimplexSubset& open, int k);
DenseMatrix hodge_laplacian_dense(const Filtration& f, double t, int k);

struct MayerVietorisReport {
  int order = 0;
  std::size_t image_rank = 0;   // rank of H(A u B) -> H(A) + H(B)
  std::size_t kernel_dim = 0;   // dim ker of H(A) + H(B) -> H(A n B)
  bool composite_zero = false;  // second map after first vanishes on chains
  bool exact() const { return composite_zero && image_rank == kernel_dim; }
};

/// Local homology H_k(S_t, S_t \ U) for U = A u B, A, B, A n B at threshold t
/// (default: the whole complex).
MayerVietorisReport check_mayer_vietoris(const Filtration& f, const SimplexSubset& open_a,
                                         const SimplexSubset& open_b, int k,
                                         std::optional<double> t = std::nullopt);

struct TheoremReport {
  bool pass = true;
  std::size_t steps_checked = 0;
  std::size_t hypothesis_fired = 0;
  std::optional<std::string> counterexample;
};

/// Steps through the filtration one simplex at a time. For the pair
/// (S_t, S_t \ U) with cohomology restrictions rho and extensions i*, checks
/// that any absolute class killed at a step which comes from a relative class
/// has that relative class killed too: i*_t(im rho_rel) lies in im rho_abs.
TheoremReport check_theorem_dies_earlier(const Filtration& f, const SimplexSubset& open_set, int k);
/// A class persisting across a step that lies in the image of a relative class
/// at the later step is already in the image at the earlier step:
/// rho_abs(im i*_{t+1}) lies in im i*_t.
TheoremReport check_theorem_appears_earlier(const Filtration& f, const SimplexSubset& open_set,
                                            int k);

struct ExcisionReport {
  bool pass = true;
  std::vector<double> thresholds;
  std::vector<int> full;   // H_k(S_t, S_t \ st v)
  std::vector<int> local;  // H_k(cl st v, frontier st v) at t
};

ExcisionReport excision_check(const Filtration& f, Vertex v, int k);

}  // namespace plh::oracle
