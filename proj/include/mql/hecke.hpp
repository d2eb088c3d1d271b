#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mql/coeff_algebra.hpp"
#include "mql/hurwitz.hpp"
#include "mql/lattice.hpp"
#include "mql/lift.hpp"

namespace mql {

/// T2 is the p = 2 coset of diag(1+i, 1). H2, H3, H4 are the odd-p cosets of
/// diag(p,p,p,1), diag(p,p,1,1), diag(p,1,1,1).
enum class HeckeKind { T2, H2, H3, H4 };

std::string to_string(HeckeKind kind);
HeckeKind parse_hecke_kind(const std::string& name);

struct HeckeOperator {
  std::int64_t prime = 2;
  HeckeKind kind = HeckeKind::T2;

  /// Throws std::invalid_argument unless (T2, 2) or (H*, odd prime).
  static HeckeOperator make(std::int64_t prime, HeckeKind kind);

  friend auto operator<=>(const HeckeOperator&, const HeckeOperator&) = default;
  friend bool operator==(const HeckeOperator&, const HeckeOperator&) = default;
};

std::string to_string(const HeckeOperator& op);

/// Largest K read when the operator is evaluated at an index of norm K.
std::int64_t lookup_bound(const HeckeOperator& op, std::int64_t K);

/// A(q) = |q| a(index(q)); zero for q = 0 or q outside S.
/// Throws OutOfBounds when the index of q exceeds K_max.
double coefficient_at(const NumericTable& table, const HurwitzQuaternion& q);

/// Hecke sum at beta together with the sum of the absolute values of its terms.
struct HeckeValue {
  double value = 0.0;
  double magnitude = 0.0;
};

/// Coefficient of the Hecke image at beta, unnormalized (A-space).
HeckeValue apply_at(const HeckeOperator& op, const NumericTable& table, const HurwitzQuaternion& beta);

/// apply_at on find_representative(index). Throws OutOfBounds before any work
/// when lookup_bound exceeds K_max.
HeckeValue apply(const HeckeOperator& op, const NumericTable& table, const CanonicalIndex& index);

/// Normalized image a'(K,u,n) = (T F)(beta) / sqrt(K) on every index whose
/// lookups fit in the table. The image has K_max = floor(K_max / factor).
NumericTable hecke_image(const HeckeOperator& op, const NumericTable& table);

/// The image together with, per entry, the normalized magnitude of the sum
/// that produced it (sum of |terms| / sqrt(K)).
struct HeckeImage {
  NumericTable values;
  NumericTable magnitudes;
};
HeckeImage hecke_image_detail(const HeckeOperator& op, const NumericTable& table);

class NoUsableIndex : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InconsistentLambda : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LambdaEstimate {
  double value = 0.0;
  std::vector<std::pair<std::int64_t, int>> bases;  ///< (K0, n) per usable base
  std::vector<double> per_base;
  double spread = 0.0;  ///< largest pairwise relative disagreement
};

/// lambda_p = (A(p^{n+1} K0) + A(p^{n-1} K0)) / A(p^n K0) with u = 0, n = 1
/// indices, K0 = 2 (mod 4) prime to p. Uses up to max_bases bases, at least
/// three. Throws NoUsableIndex or InconsistentLambda.
LambdaEstimate extract_lambda_detail(const NumericTable& table, std::int64_t p, double tolerance = 1e-9,
                                     std::size_t max_bases = 8);
double extract_lambda(const NumericTable& table, std::int64_t p, double tolerance = 1e-9);

/// Expected eigenvalue of op on a lift: -3 sqrt2 eps, p(p+1) lambda, or
/// p^2 lambda^2 + p^3 + p.
double expected_eigenvalue(const HeckeOperator& op, int epsilon, double lambda);

struct EigenReport {
  std::int64_t prime = 2;
  HeckeKind kind = HeckeKind::T2;
  std::optional<double> lambda;  ///< absent when extraction failed
  std::string lambda_error;
  double expected_mu = 0.0;
  double fitted_mu = 0.0;        ///< least-squares ratio image / input
  std::size_t indices_checked = 0;
  double max_rel_err = 0.0;      ///< against expected_mu
  double spread = 0.0;           ///< against fitted_mu
  bool constant = false;
  bool pass = false;
};

json to_json(const EigenReport& r);

/// For every p in primes: T2 at p = 2, H2/H3/H4 at odd p on up to max_indices
/// indices (ascending). lambda_p is taken from `lambdas` if given, else
/// extracted from the table.
std::vector<EigenReport> verify_eigen_relations(const NumericTable& table, const std::set<std::int64_t>& primes,
                                                double tolerance = 1e-8,
                                                const std::map<std::int64_t, double>& lambdas = {},
                                                std::size_t max_indices = 64);

struct SummationCheck {
  CanonicalIndex index;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

/// T F(p^m K, u, p^l n) against sum_{i=0}^{l} p^i T F(p^{m-2i} K, u, n) on a
/// normalized image table. m = v_p(K), l = v_p(n). Holds wherever the image
/// satisfies 2b, not only in the m > 2l + 1 case. Optional magnitudes as in
/// check_maass.
SummationCheck summation_identity(const NumericTable& image, std::int64_t p, const CanonicalIndex& index,
                                  const NumericTable* magnitudes = nullptr);

struct StabilityReport {
  HeckeOperator op;
  std::size_t image_size = 0;
  MaassReport maass;
  std::size_t identity_checked = 0;
  std::vector<CanonicalIndex> identity_failures;
  double identity_max_err = 0.0;
  bool pass() const { return maass.pass() && identity_failures.empty(); }
};

json to_json(const StabilityReport& r);

/// Image of a Maass-space table under op, re-checked against both
/// recurrences. For odd p also checks summation_identity wherever l >= 1 and
/// m >= 2l + 1.
StabilityReport stability_check(const NumericTable& table, const HeckeOperator& op, double tolerance = 1e-8);

struct AdjointCheck {
  std::string name;
  std::int64_t prime = 0;
  std::string lhs;
  std::string rhs;
  bool pass = false;
};

struct AdjointReport {
  std::vector<AdjointCheck> checks;
  bool pass() const;
};

json to_json(const AdjointReport& r);

/// Exact identities w z h^{-1} w for h4 -> h2, h3 -> h3, h2 -> h4 over the
/// rationals at each odd prime, plus the 2x2 quaternion case at 2.
AdjointReport adjoint_matrix_identities(const std::vector<std::int64_t>& odd_primes = {3, 5});

}  // namespace mql
