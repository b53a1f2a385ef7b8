#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plh/complex.hpp"

namespace plh::cli {

struct CheckResult {
  std::string check;
  std::string fixture;
  bool pass = true;
  std::optional<std::string> counterexample;
};

struct VerifyOptions {
  int rings = 1;
  unsigned threads = 1;
  bool sheaf_kernel = true;  // only claimed for the golden corpus
};

/// Fast path against the dense oracle on one filtration, orders 0..max_dim-1.
std::vector<CheckResult> verify_filtration(const Filtration& f, const std::string& name,
                                           const VerifyOptions& options);

/// True when the symmetric matrix is positive semidefinite, decided exactly.
bool exact_psd(std::vector<mpq_class> a, std::size_t n);

}  // namespace plh::cli
