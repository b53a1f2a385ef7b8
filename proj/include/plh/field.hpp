#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace plh {

/// Exact rational arithmetic. The correctness reference for every reduction.
struct ExactField {
  using Scalar = mpq_class;

  static constexpr const char* name() { return "exact"; }

  bool is_zero(const Scalar& x) const { return sgn(x) == 0; }
  Scalar zero() const { return Scalar(0); }
  Scalar one() const { return Scalar(1); }
  Scalar from_int(long v) const { return Scalar(v); }
  Scalar from_double(double v) const { return Scalar(v); }
  double to_double(const Scalar& x) const { return x.get_d(); }
  Scalar magnitude(const Scalar& x) const { return abs(x); }
  std::string to_string(const Scalar& x) const { return x.get_str(); }
};

/// binary64 with a zero tolerance. `eps` is relative to the magnitude of the
/// operands that produced an entry; anything at or below it is dropped.
struct FloatField {
  using Scalar = double;

  double eps = 1e-9;

  static constexpr const char* name() { return "float"; }

  bool is_zero(double x) const { return std::abs(x) <= eps; }
  double zero() const { return 0.0; }
  double one() const { return 1.0; }
  double from_int(long v) const { return static_cast<double>(v); }
  double from_double(double v) const { return v; }
  double to_double(double x) const { return x; }
  double magnitude(double x) const { return std::abs(x); }
  std::string to_string(double x) const { return std::to_string(x); }
};

inline double to_double(const mpq_class& x) { return x.get_d(); }
inline double to_double(double x) { return x; }

}  // namespace plh
