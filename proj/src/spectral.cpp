#include "mql/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mql/arith.hpp"

namespace mql {

SatakeParams satake_from_lambda(std::int64_t p, double lambda, int branch) {
  if (p == 2 || !is_prime(p)) throw std::invalid_argument("Satake parameters need an odd prime, got " + std::to_string(p));
  if (branch != 1 && branch != -1) throw std::invalid_argument("branch must be +1 or -1");
  const Complex root = static_cast<double>(branch) * std::sqrt(Complex(lambda * lambda - 4.0, 0.0));
  const Complex plus = (lambda + root) / 2.0;
  const Complex minus = (lambda - root) / 2.0;
  const double sp = std::sqrt(static_cast<double>(p));
  SatakeParams s;
  s.p = p;
  s.lambda = lambda;
  s.chi = {sp * plus, sp * minus, plus / sp, minus / sp};
  return s;
}

double satake_relation_error(const SatakeParams& s) {
  const double p = static_cast<double>(s.p);
  const auto& c = s.chi;
  auto rel = [](Complex got, Complex want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
  return std::max({rel(c[0] * c[1], p), rel(c[2] * c[3], 1.0 / p), rel(c[0] * c[3], 1.0), rel(c[1] * c[2], 1.0),
                   rel(c[0], p * c[2]), rel(c[1], p * c[3])});
}

RamanujanReport ramanujan_violation_check(const SatakeParams& s) {
  RamanujanReport r;
  r.p = s.p;
  const double logp = std::log(static_cast<double>(s.p));
  for (std::size_t k = 0; k < 4; ++k) {
    r.v[k] = std::log(std::abs(s.chi[k])) / logp;
    r.max_abs_v = std::max(r.max_abs_v, std::abs(r.v[k]));
  }
  const double sp = std::sqrt(static_cast<double>(s.p));
  r.alpha_plus = std::log(std::abs(s.chi[0] / sp)) / logp;
  r.alpha_minus = std::log(std::abs(s.chi[1] / sp)) / logp;
  r.alpha_sum = r.alpha_plus + r.alpha_minus;
  r.violated = r.max_abs_v > r.bound;
  return r;
}

std::string to_string(const Place& place) { return place.infinite ? "inf" : std::to_string(place.p); }

LocalDescriptor sigma_descriptor(const Place& place, const DescriptorInputs& in) {
  auto reject = [&](const std::string& what) {
    throw std::invalid_argument("place " + to_string(place) + ": " + what);
  };
  if (place.infinite) {
    if (!in.r || in.lambda || in.epsilon) reject("the archimedean place takes exactly r");
    return {place, ArchimedeanPrincipalSeries{Complex(0.0, *in.r / 2.0)}};
  }
  if (place.p == 2) {
    if (!in.epsilon || in.lambda || in.r) reject("the place 2 takes exactly epsilon");
    if (*in.epsilon != 1 && *in.epsilon != -1) reject("epsilon must be +1 or -1");
    return {place, TwistedSteinberg{-static_cast<double>(*in.epsilon)}};
  }
  if (!is_prime(place.p)) reject("not a prime");
  if (!in.lambda || in.epsilon || in.r) reject("an odd prime takes exactly lambda");
  const double l = *in.lambda;
  return {place, UnramifiedPrincipalSeries{(l + std::sqrt(Complex(l * l - 4.0, 0.0))) / 2.0}};
}

json to_json(const LocalDescriptor& d) {
  json j;
  j["place"] = to_string(d.place);
  std::visit(
      [&j](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UnramifiedPrincipalSeries>) {
          j["shape"] = "unramified_principal_series";
          j["chi_p"] = {s.chi_p.real(), s.chi_p.imag()};
        } else if constexpr (std::is_same_v<S, TwistedSteinberg>) {
          j["shape"] = "twisted_steinberg";
          j["chi2"] = s.chi2;
        } else {
          j["shape"] = "archimedean_principal_series";
          j["s"] = {s.s.real(), s.s.imag()};
        }
      },
      d.shape);
  return j;
}

Assignment SyntheticEigenform::assignment() const {
  Assignment a;
  a.epsilon = epsilon;
  for (std::int64_t N = 1; N <= n_max; ++N) a.values.emplace(N, c[N]);
  return a;
}

SyntheticEigenform synth_eigenform(int epsilon, const std::map<std::int64_t, double>& lambdas, std::int64_t n_max) {
  if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +1 or -1");
  if (n_max < 1) throw std::invalid_argument("N_max must be positive");
  for (auto p : primes_up_to(n_max)) {
    if (p != 2 && !lambdas.contains(p)) throw MissingLambda(p);
  }
  SyntheticEigenform f;
  f.epsilon = epsilon;
  f.n_max = n_max;
  for (const auto& [p, l] : lambdas) {
    if (p <= n_max) f.lambdas.emplace(p, l);
  }
  f.c.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  f.c[1] = 1.0;
  for (std::int64_t N = 2; N <= n_max; ++N) {
    if (N % 2 == 0) {
      f.c[N] = -0.5 * epsilon * f.c[N / 2];
      continue;
    }
    std::int64_t p = 3;
    while (N % p != 0) p += 2;
    const double lambda = f.lambdas.at(p);
    const std::int64_t M = N / p;
    double v = lambda / std::sqrt(static_cast<double>(p)) * f.c[M];
    if (M % p == 0) v -= f.c[M / p] / static_cast<double>(p);
    f.c[N] = v;
  }
  return f;
}

std::map<std::int64_t, double> random_lambdas(std::uint64_t seed, std::int64_t n_max, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::map<std::int64_t, double> out;
  for (auto p : primes_up_to(n_max)) {
    if (p == 2) continue;
    // Fixed 53-bit mapping rather than uniform_real_distribution, whose
    // output is not pinned down across standard libraries.
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    out.emplace(p, lo + (hi - lo) * unit);
  }
  return out;
}

bool CnReport::pass() const {
  if (!failures_dyadic.empty()) return false;
  return std::all_of(primes.begin(), primes.end(), [](const Prime& p) { return p.failures.empty(); });
}

json to_json(const CnReport& r) {
  json j;
  j["checked_dyadic"] = r.checked_dyadic;
  j["failures_dyadic"] = r.failures_dyadic;
  j["max_err_dyadic"] = r.max_err_dyadic;
  json primes = json::array();
  for (const auto& p : r.primes) {
    json e;
    e["p"] = p.p;
    e["lambda"] = p.lambda;
    e["checked"] = p.checked;
    e["failures"] = p.failures;
    e["max_err"] = p.max_err;
    primes.push_back(std::move(e));
  }
  j["hecke"] = std::move(primes);
  j["pass"] = r.pass();
  return j;
}

namespace {

template <class V>
std::vector<V> inverted(const CoefficientTable<V>& table) {
  std::vector<V> c(1);
  for (std::int64_t N = 1; 2 * N <= table.k_max(); ++N) c.push_back(invert_cN(table, N));
  return c;
}

}  // namespace

CnReport verify_cn_relations(const AnyTable& any, const std::map<std::int64_t, double>& lambdas, double tolerance) {
  CnReport r;
  std::visit(
      [&](const auto& table) {
        using V = typename std::decay_t<decltype(table)>::value_type;
        const auto c = inverted(table);
        const std::int64_t n_max = static_cast<std::int64_t>(c.size()) - 1;
        const Rational half(-table.epsilon(), 2);
        for (std::int64_t N = 1; 2 * N <= n_max; ++N) {
          ++r.checked_dyadic;
          bool ok = false;
          if constexpr (std::is_same_v<V, double>) {
            const double rhs = half.get_d() * c[N];
            const double err = relative_error(c[2 * N], rhs, std::abs(rhs));
            r.max_err_dyadic = std::max(r.max_err_dyadic, err);
            ok = err <= tolerance;
          } else if constexpr (std::is_same_v<V, FormalCoefficient>) {
            ok = reduce_eigen2(c[2 * N] - half * c[N], table.epsilon()).is_zero();
          } else {
            ok = c[2 * N] == half * c[N];
          }
          if (!ok) r.failures_dyadic.push_back(N);
        }
        if constexpr (std::is_same_v<V, double>) {
          for (const auto& [p, lambda] : lambdas) {
            CnReport::Prime pr;
            pr.p = p;
            pr.lambda = lambda;
            const double sp = std::sqrt(static_cast<double>(p));
            for (std::int64_t N = 1; p * N <= n_max; ++N) {
              ++pr.checked;
              const double down = N % p == 0 ? c[N / p] / sp : 0.0;
              const double up = sp * c[p * N];
              const double err = relative_error(up + down, lambda * c[N], std::abs(up) + std::abs(down));
              pr.max_err = std::max(pr.max_err, err);
              if (!(err <= tolerance)) pr.failures.push_back(N);
            }
            r.primes.push_back(std::move(pr));
          }
        }
      },
      any);
  return r;
}

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string satake_csv(const std::vector<SatakeParams>& rows) {
  std::string out = "p,lambda,re_chi1,im_chi1,re_chi2,im_chi2,re_chi3,im_chi3,re_chi4,im_chi4,max_abs_v,violated\n";
  for (const auto& s : rows) {
    const auto rep = ramanujan_violation_check(s);
    out += std::to_string(s.p) + "," + format_double(s.lambda);
    for (const auto& c : s.chi) out += "," + format_double(c.real()) + "," + format_double(c.imag());
    out += "," + format_double(rep.max_abs_v) + "," + (rep.violated ? "true" : "false") + "\n";
  }
  return out;
}

json satake_json(const std::vector<SatakeParams>& rows) {
  json arr = json::array();
  for (const auto& s : rows) {
    const auto rep = ramanujan_violation_check(s);
    json e;
    e["p"] = s.p;
    e["lambda"] = s.lambda;
    json chi = json::array();
    for (const auto& c : s.chi) chi.push_back({c.real(), c.imag()});
    e["chi"] = std::move(chi);
    e["v"] = rep.v;
    e["max_abs_v"] = rep.max_abs_v;
    e["bound"] = rep.bound;
    e["violated"] = rep.violated;
    e["alpha_sum"] = rep.alpha_sum;
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace mql
