#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace mql {

using Rational = mpq_class;
using json = nlohmann::ordered_json;

/// "p/q", or "p" for integers.
std::string to_string(const Rational& r);
/// Accepts "p", "p/q" (any sign). Throws std::invalid_argument.
Rational parse_rational(const std::string& text);

/// C(M) stands for the source-form coefficient c(-M).
struct CoeffSymbol {
  std::int64_t M = 1;
};

class UnassignedSymbol : public std::out_of_range {
 public:
  explicit UnassignedSymbol(std::int64_t M)
      : std::out_of_range("unassigned symbol " + std::to_string(M)), symbol(M) {}
  std::int64_t symbol;
};

/// Finite rational combination sum_M q_M C(M). Zero coefficients are never
/// stored, so the term map is canonical and == is structural.
class FormalCoefficient {
 public:
  FormalCoefficient() = default;
  static FormalCoefficient symbol(std::int64_t M, const Rational& coeff = 1);

  const std::map<std::int64_t, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of C(M), zero if absent.
  Rational coefficient(std::int64_t M) const;

  FormalCoefficient& add_term(std::int64_t M, const Rational& coeff);
  FormalCoefficient& operator+=(const FormalCoefficient& other);
  FormalCoefficient& operator-=(const FormalCoefficient& other);
  FormalCoefficient& operator*=(const Rational& s);

  friend FormalCoefficient operator+(FormalCoefficient a, const FormalCoefficient& b) { return a += b; }
  friend FormalCoefficient operator-(FormalCoefficient a, const FormalCoefficient& b) { return a -= b; }
  friend FormalCoefficient operator*(const Rational& s, FormalCoefficient a) { return a *= s; }
  friend bool operator==(const FormalCoefficient&, const FormalCoefficient&) = default;

 private:
  std::map<std::int64_t, Rational> terms_;
};

std::string to_string(const FormalCoefficient& x);

/// Values for the symbols C(M), plus the Atkin-Lehner sign of the source.
struct Assignment {
  std::map<std::int64_t, double> values;
  int epsilon = 1;
};

/// s * a + t * b.
FormalCoefficient combine(const FormalCoefficient& a, const FormalCoefficient& b, const Rational& s,
                          const Rational& t);

/// Throws UnassignedSymbol when a symbol has no value.
double eval(const FormalCoefficient& x, const Assignment& a);

/// Rewrites C(2M) -> (-epsilon/2) C(M) until only odd symbols remain.
FormalCoefficient reduce_eigen2(const FormalCoefficient& x, int epsilon);

/// Sorted object {"M": "p/q", ...}.
json to_json(const FormalCoefficient& x);
FormalCoefficient formal_from_json(const json& j);

}  // namespace mql
