#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mql/arith.hpp"
#include "mql/coeff_algebra.hpp"
#include "mql/lattice.hpp"

namespace mql {

/// A lookup needed an index beyond the table's K_max. Never silently zero-filled.
class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

template <class V>
struct ValueOps;

template <>
struct ValueOps<FormalCoefficient> {
  static constexpr const char* backend = "formal";
  static FormalCoefficient zero() { return {}; }
  static FormalCoefficient scale(const FormalCoefficient& x, const Rational& s) { return s * x; }
};

template <>
struct ValueOps<Rational> {
  static constexpr const char* backend = "exact";
  static Rational zero() { return 0; }
  static Rational scale(const Rational& x, const Rational& s) { return x * s; }
};

template <>
struct ValueOps<double> {
  static constexpr const char* backend = "numeric";
  static double zero() { return 0.0; }
  static double scale(double x, const Rational& s) { return x * s.get_d(); }
};

/// Every valid index with K <= k_max, ascending in (K, u, n).
std::vector<CanonicalIndex> valid_indices(std::int64_t k_max);

/// Normalized coefficients a(K, u, n) = A(beta) / |beta| keyed by canonical
/// index, together with the Atkin-Lehner sign they were built for. Lookups at
/// invalid indices (including u < 0) are zero; lookups above K_max throw.
template <class V>
class CoefficientTable {
 public:
  using value_type = V;

  CoefficientTable(int epsilon, std::int64_t k_max) : epsilon_(epsilon), k_max_(k_max) {
    if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +1 or -1");
    if (k_max < 1) throw std::invalid_argument("K_max must be positive");
  }

  int epsilon() const { return epsilon_; }
  std::int64_t k_max() const { return k_max_; }
  std::size_t size() const { return entries_.size(); }
  const std::map<CanonicalIndex, V>& entries() const { return entries_; }

  void set(const CanonicalIndex& idx, V value) {
    if (!idx.is_valid()) throw std::invalid_argument("invalid index " + to_string(idx));
    if (idx.K > k_max_) throw OutOfBounds("index " + to_string(idx) + " exceeds K_max " + std::to_string(k_max_));
    entries_.insert_or_assign(idx, std::move(value));
  }

  const V* find(const CanonicalIndex& idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? nullptr : &it->second;
  }

  V at(std::int64_t K, int u, std::int64_t n) const {
    if (!is_valid_index(K, u, n)) return ValueOps<V>::zero();
    if (K > k_max_) {
      throw OutOfBounds("K = " + std::to_string(K) + " exceeds K_max = " + std::to_string(k_max_));
    }
    auto it = entries_.find(CanonicalIndex{K, u, n});
    if (it == entries_.end()) throw std::logic_error("table has no entry at valid index " + to_string({K, u, n}));
    return it->second;
  }
  V at(const CanonicalIndex& idx) const { return at(idx.K, idx.u, idx.n); }

  /// True when every valid index up to K_max has an entry.
  bool is_complete() const {
    auto expected = valid_indices(k_max_);
    if (expected.size() != entries_.size()) return false;
    std::size_t k = 0;
    for (const auto& [idx, v] : entries_) {
      if (!(idx == expected[k++])) return false;
    }
    return true;
  }

 private:
  int epsilon_;
  std::int64_t k_max_;
  std::map<CanonicalIndex, V> entries_;
};

using FormalTable = CoefficientTable<FormalCoefficient>;
using ExactTable = CoefficientTable<Rational>;
using NumericTable = CoefficientTable<double>;
using AnyTable = std::variant<FormalTable, ExactTable, NumericTable>;

/// The source form f: its Atkin-Lehner sign and, for the numeric backend,
/// values of c(-M). Without values the lift is built formally in C(M).
struct SourceForm {
  int epsilon = 1;
  std::optional<Assignment> values;
};

/// a(K,u,n) = sum_{t=0}^{u} sum_{d|n} (-epsilon)^t C(K / (2^{t+1} d^2)).
FormalCoefficient lift_coefficient(const CanonicalIndex& index, int epsilon);

FormalTable build_lift_table(int epsilon, std::int64_t k_max);
/// Uses values.epsilon as the sign.
NumericTable build_lift_table(const Assignment& values, std::int64_t k_max);
AnyTable build_lift_table(const SourceForm& f, std::int64_t k_max);

/// N = 4^a b with 4 not dividing b: 2a if b is odd, 2a + 1 if b = 2 (mod 4).
int u_of_N(std::int64_t N);

/// c(-N) = a(2N, u, 1) + epsilon a(N, u - 1, 1), u = u_of_N(N).
/// Throws OutOfBounds if 2N > K_max.
template <class V>
V invert_cN(const CoefficientTable<V>& table, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  if (2 * N > table.k_max()) {
    throw OutOfBounds("inverting c(-" + std::to_string(N) + ") needs K = " + std::to_string(2 * N) +
                      " > K_max = " + std::to_string(table.k_max()));
  }
  const int u = u_of_N(N);
  V out = table.at(2 * N, u, 1);
  out += ValueOps<V>::scale(table.at(N, u - 1, 1), Rational(table.epsilon()));
  return out;
}

/// Relative error of lhs against rhs, scaled by the magnitude of the terms
/// that built rhs. Zero when everything vanishes.
inline double relative_error(double lhs, double rhs, double term_scale) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), term_scale});
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

struct MaassReport {
  std::size_t checked_2a = 0;
  std::size_t checked_2b = 0;
  std::vector<CanonicalIndex> failures_2a;
  std::vector<CanonicalIndex> failures_2b;
  double max_rel_err = 0.0;  ///< numeric backend only
  bool pass() const { return failures_2a.empty() && failures_2b.empty(); }
};

/// {"checked_2a", "checked_2b", "failures_2a": ["(K,u,n)", ...], ..., "max_rel_err", "pass"}
json to_json(const MaassReport& r);

/// Checks, at every index whose references are in the table,
///   2a: a(K,u,n) = (-3 eps / 2) a(K/2, u-1, n) - (1/2) a(K/4, u-2, n)   (u >= 1)
///   2b: a(K,u,n) = sum_{d | n} a(K/d^2, u, 1)                           (n > 1)
/// Formal tables compare 2a after reduce_eigen2; exact and formal tables
/// compare exactly, numeric tables to `tolerance` relative error. For a
/// numeric table whose entries came out of cancelling sums, `magnitudes`
/// gives the size of each entry's sum; it joins the error scale so round-off
/// in a near-zero entry is not read as a failure.
template <class V>
MaassReport check_maass(const CoefficientTable<V>& table, double tolerance = 1e-8,
                        const CoefficientTable<double>* magnitudes = nullptr) {
  MaassReport report;
  const Rational dyadic1(-3 * table.epsilon(), 2);
  const Rational dyadic2(-1, 2);
  for (const auto& [idx, value] : table.entries()) {
    if (idx.u >= 1) {
      ++report.checked_2a;
      const V first = table.at(idx.K / 2, idx.u - 1, idx.n);
      const V second = idx.u >= 2 ? table.at(idx.K / 4, idx.u - 2, idx.n) : ValueOps<V>::zero();
      V rhs = ValueOps<V>::scale(first, dyadic1);
      rhs += ValueOps<V>::scale(second, dyadic2);
      bool ok = false;
      if constexpr (std::is_same_v<V, double>) {
        double scale = std::abs(1.5 * first) + std::abs(0.5 * second);
        if (magnitudes) {
          scale = std::max({scale, magnitudes->at(idx), 1.5 * magnitudes->at(idx.K / 2, idx.u - 1, idx.n),
                            idx.u >= 2 ? 0.5 * magnitudes->at(idx.K / 4, idx.u - 2, idx.n) : 0.0});
        }
        const double err = relative_error(value, rhs, scale);
        report.max_rel_err = std::max(report.max_rel_err, err);
        ok = err <= tolerance;
      } else if constexpr (std::is_same_v<V, FormalCoefficient>) {
        ok = reduce_eigen2(value - rhs, table.epsilon()).is_zero();
      } else {
        ok = value == rhs;
      }
      if (!ok) report.failures_2a.push_back(idx);
    }
    if (idx.n > 1) {
      ++report.checked_2b;
      V rhs = ValueOps<V>::zero();
      double term_scale = 0.0;
      for (auto d : divisors(idx.n)) {
        const V term = table.at(idx.K / (d * d), idx.u, 1);
        if constexpr (std::is_same_v<V, double>) {
          term_scale += std::abs(term);
          if (magnitudes) term_scale += magnitudes->at(idx.K / (d * d), idx.u, 1);
        }
        rhs += term;
      }
      if (magnitudes) term_scale = std::max(term_scale, magnitudes->at(idx));
      bool ok = false;
      if constexpr (std::is_same_v<V, double>) {
        const double err = relative_error(value, rhs, term_scale);
        report.max_rel_err = std::max(report.max_rel_err, err);
        ok = err <= tolerance;
      } else {
        ok = value == rhs;
      }
      if (!ok) report.failures_2b.push_back(idx);
    }
  }
  return report;
}

/// Builds a Maass-space table from free values: a(m, 0, 1) for m = 2 (mod 4),
/// extended by 2a to u >= 1 and by 2b to n > 1. With enforce_dyadic = false
/// the (K, u >= 1, 1) entries are free as well, so 2a generally fails.
ExactTable maass_table_from_generators(int epsilon, std::int64_t k_max,
                                       const std::function<Rational(const CanonicalIndex&)>& free_value,
                                       bool enforce_dyadic = true);

/// Seeded random rationals on the free generators; deterministic in the seed.
ExactTable random_maass_table(int epsilon, std::uint64_t seed, std::int64_t k_max, bool enforce_dyadic = true);

NumericTable to_numeric(const ExactTable& table);
NumericTable to_numeric(const FormalTable& table, const Assignment& values);
NumericTable to_numeric(const AnyTable& table);

/// {"backend", "epsilon", "kmax", "entries": [{"K","u","n","value"}, ...]} with
/// entries sorted by (K, u, n).
json to_json(const AnyTable& table);
/// Validates indices, bounds and completeness; throws std::invalid_argument
/// naming the offending record.
AnyTable table_from_json(const json& j);

}  // namespace mql
