#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mql/coeff_algebra.hpp"
#include "mql/lift.hpp"

namespace mql {

using Complex = std::complex<double>;

/// chi1 = p^{1/2} x+, chi2 = p^{1/2} x-, chi3 = p^{-1/2} x+, chi4 = p^{-1/2} x-
/// with x+- = (lambda +- sqrt(lambda^2 - 4)) / 2.
struct SatakeParams {
  std::int64_t p = 3;
  double lambda = 0.0;
  std::array<Complex, 4> chi{};
};

/// branch = +1 takes the principal square root, -1 the other one (which
/// swaps chi1 with chi2 and chi3 with chi4).
SatakeParams satake_from_lambda(std::int64_t p, double lambda, int branch = 1);

/// Largest relative deviation among chi1 chi2 = p, chi3 chi4 = 1/p,
/// chi1 chi4 = chi2 chi3 = 1, chi1 / chi3 = chi2 / chi4 = p.
double satake_relation_error(const SatakeParams& s);

/// The bound 1/2 - 1/(4^2 + 1) that tempered-enough cuspidal GL4 components satisfy.
inline constexpr double kRamanujanBound = 0.5 - 1.0 / 17.0;

/// |.|_p is read as the complex modulus followed by log base p.
struct RamanujanReport {
  std::int64_t p = 3;
  std::array<double, 4> v{};  ///< log_p |chi_i|
  double max_abs_v = 0.0;
  double bound = kRamanujanBound;
  bool violated = false;
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double alpha_sum = 0.0;
};

RamanujanReport ramanujan_violation_check(const SatakeParams& s);

struct Place {
  bool infinite = false;
  std::int64_t p = 0;  ///< unused at infinity

  static Place finite(std::int64_t p) { return {false, p}; }
  static Place infinity() { return {true, 0}; }
};

std::string to_string(const Place& place);

struct UnramifiedPrincipalSeries {
  Complex chi_p;
};
struct TwistedSteinberg {
  double chi2 = 0.0;
};
struct ArchimedeanPrincipalSeries {
  Complex s;
};

struct LocalDescriptor {
  Place place;
  std::variant<UnramifiedPrincipalSeries, TwistedSteinberg, ArchimedeanPrincipalSeries> shape;
};

struct DescriptorInputs {
  std::optional<double> lambda;
  std::optional<int> epsilon;
  std::optional<double> r;
};

/// Odd p needs lambda, p = 2 needs epsilon, infinity needs r. Throws
/// std::invalid_argument when the required input is missing or another one
/// is supplied.
LocalDescriptor sigma_descriptor(const Place& place, const DescriptorInputs& inputs);

json to_json(const LocalDescriptor& d);

class MissingLambda : public std::invalid_argument {
 public:
  explicit MissingLambda(std::int64_t p)
      : std::invalid_argument("missing lambda_" + std::to_string(p)), prime(p) {}
  std::int64_t prime;
};

/// Coefficients c(-N), N = 1..N_max, generated from c(-1) = 1 by
///   c(-2N) = -(eps/2) c(-N)
///   c(-pN) = p^{-1/2} lambda_p c(-N) - p^{-1} c(-N/p)   (p odd, last term only when p | N)
struct SyntheticEigenform {
  int epsilon = 1;
  std::map<std::int64_t, double> lambdas;
  std::int64_t n_max = 0;
  std::vector<double> c;  ///< c[N] = c(-N); c[0] unused

  Assignment assignment() const;
};

/// Throws MissingLambda for the first odd prime <= N_max without a value.
SyntheticEigenform synth_eigenform(int epsilon, const std::map<std::int64_t, double>& lambdas, std::int64_t n_max);

/// Seeded uniform values in [lo, hi] for every odd prime <= n_max.
std::map<std::int64_t, double> random_lambdas(std::uint64_t seed, std::int64_t n_max, double lo = -2.0,
                                              double hi = 2.0);

struct CnReport {
  std::size_t checked_dyadic = 0;
  std::vector<std::int64_t> failures_dyadic;
  double max_err_dyadic = 0.0;
  struct Prime {
    std::int64_t p = 3;
    double lambda = 0.0;
    std::size_t checked = 0;
    std::vector<std::int64_t> failures;
    double max_err = 0.0;
  };
  std::vector<Prime> primes;  ///< relation checks with sqrt(p), numeric tables only
  bool pass() const;
};

json to_json(const CnReport& r);

/// Inverts the table to c(-N) and checks c(-2N) = -(eps/2) c(-N) (exactly for
/// formal and exact tables) and, for each lambda given, on numeric tables,
/// p^{1/2} c(-pN) + p^{-1/2} c(-N/p) = lambda_p c(-N).
CnReport verify_cn_relations(const AnyTable& table, const std::map<std::int64_t, double>& lambdas = {},
                             double tolerance = 1e-8);

/// Header "p,lambda,re_chi1,im_chi1,...,re_chi4,im_chi4,max_abs_v,violated".
std::string satake_csv(const std::vector<SatakeParams>& rows);
json satake_json(const std::vector<SatakeParams>& rows);

/// Shortest decimal form that round-trips.
std::string format_double(double x);

}  // namespace mql
