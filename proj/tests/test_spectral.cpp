#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mql/hecke.hpp"
#include "mql/spectral.hpp"

using mql::Complex;

namespace {

// c(-N) for the synthetic family, from multiplicativity: c(2^a) = (-eps/2)^a and
// c(p^k) = p^{-k/2} U_k(lambda/2) with U the Chebyshev polynomials of the second kind.
double synth_oracle(std::int64_t N, int eps, const std::map<std::int64_t, double>& lambdas) {
  double out = 1.0;
  while (N % 2 == 0) {
    out *= -eps / 2.0;
    N /= 2;
  }
  for (std::int64_t p = 3; N > 1; p += 2) {
    int k = 0;
    while (N % p == 0) {
      N /= p;
      ++k;
    }
    if (k == 0) continue;
    const double lam = lambdas.at(p);
    double prev = 1.0, cur = lam;  // U_0, U_1 at lambda/2
    for (int s = 1; s < k; ++s) {
      const double next = lam * cur - prev;
      prev = cur;
      cur = next;
    }
    out *= cur / std::pow(static_cast<double>(p), k / 2.0);
  }
  return out;
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("synth_eigenform examples") {
  const std::map<std::int64_t, double> l{{3, 1.5}, {5, 0.0}, {7, 0.0}};
  const auto f = mql::synth_eigenform(1, l, 9);
  CHECK(f.c[1] == 1.0);
  CHECK(f.c[2] == doctest::Approx(-0.5));
  CHECK(f.c[3] == doctest::Approx(1.5 / std::sqrt(3.0)));
  CHECK(f.c[3] == doctest::Approx(0.8660).epsilon(1e-4));
  CHECK(f.c[9] == doctest::Approx((1.5 * 1.5 - 1.0) / 3.0));
  CHECK(f.c[9] == doctest::Approx(0.41667).epsilon(1e-4));
  CHECK(mql::synth_eigenform(-1, l, 4).c[4] == doctest::Approx(0.25));
  CHECK_THROWS_WITH_AS(mql::synth_eigenform(1, {{3, 1.0}}, 10), "missing lambda_5", mql::MissingLambda);
  CHECK_THROWS_AS(mql::synth_eigenform(0, l, 4), std::invalid_argument);
  CHECK(f.assignment().values.size() == 9);
}

TEST_CASE("synth_eigenform agrees with the multiplicative closed form") {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto l = mql::random_lambdas(seed, 3000);
    for (int eps : {1, -1}) {
      const auto f = mql::synth_eigenform(eps, l, 3000);
      for (std::int64_t N = 1; N <= 3000; ++N) {
        REQUIRE(f.c[N] == doctest::Approx(synth_oracle(N, eps, l)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("the synthetic family satisfies its Hecke relation for every Np <= N_max") {
  const auto l = mql::random_lambdas(5, 2000);
  const auto f = mql::synth_eigenform(-1, l, 2000);
  for (const auto& [p, lam] : l) {
    const double sp = std::sqrt(static_cast<double>(p));
    for (std::int64_t N = 1; N * p <= 2000; ++N) {
      const double lhs = sp * f.c[p * N] + (N % p == 0 ? f.c[N / p] / sp : 0.0);
      REQUIRE(std::abs(lhs - lam * f.c[N]) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
  for (std::int64_t N = 1; 2 * N <= 2000; ++N) REQUIRE(f.c[2 * N] == 0.5 * f.c[N]);
}

TEST_CASE("random_lambdas") {
  const auto a = mql::random_lambdas(9, 100);
  const auto b = mql::random_lambdas(9, 1000);
  CHECK(a.size() == 24);  // odd primes up to 100
  for (const auto& [p, v] : a) {
    CHECK(b.at(p) == v);
    CHECK(v >= -2.0);
    CHECK(v <= 2.0);
  }
  CHECK(mql::random_lambdas(10, 100) != a);
  for (const auto& [p, v] : mql::random_lambdas(3, 200, -10.0, 10.0)) CHECK(std::abs(v) <= 10.0);
}

TEST_CASE("satake examples") {
  auto s = mql::satake_from_lambda(5, 2.0);
  CHECK(close(s.chi[0], std::sqrt(5.0), 1e-12));
  CHECK(close(s.chi[1], std::sqrt(5.0), 1e-12));
  s = mql::satake_from_lambda(3, 0.0);
  CHECK(close(s.chi[0], Complex(0, std::sqrt(3.0)), 1e-12));
  CHECK(close(s.chi[1], Complex(0, -std::sqrt(3.0)), 1e-12));
  CHECK(close(s.chi[2], Complex(0, 1.0 / std::sqrt(3.0)), 1e-12));
  s = mql::satake_from_lambda(7, 3.0);
  CHECK(close(s.chi[0] * s.chi[1], 7.0, 1e-12));
  CHECK(s.chi[0].imag() == 0.0);
}

TEST_CASE("satake relations on 10^3 random lambda in [-10, 10]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const double lam = dist(rng);
    for (std::int64_t p : {3, 5, 7, 11}) {
      const auto s = mql::satake_from_lambda(p, lam);
      CHECK(mql::satake_relation_error(s) <= 1e-12);
      const double P = static_cast<double>(p);
      CHECK(close(s.chi[0] * s.chi[3], 1.0, 1e-12));
      CHECK(close(s.chi[1] * s.chi[2], 1.0, 1e-12));
      CHECK(close(s.chi[0] * s.chi[1], P, 1e-12));
      CHECK(close(s.chi[2] * s.chi[3], 1.0 / P, 1e-12));
      // x+- are the roots of x^2 - lambda x + 1.
      const Complex x = s.chi[0] / std::sqrt(P);
      CHECK(std::abs(x * x - lam * x + 1.0) <= 1e-10 * std::max(1.0, std::norm(x)));
      CHECK(close(s.chi[0] + s.chi[1], std::sqrt(P) * lam, 1e-12));
    }
  }
}

TEST_CASE("the other square-root branch permutes the parameters") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const double lam = dist(rng);
    const auto a = mql::satake_from_lambda(5, lam, 1);
    const auto b = mql::satake_from_lambda(5, lam, -1);
    CHECK(close(a.chi[0], b.chi[1], 1e-12));
    CHECK(close(a.chi[1], b.chi[0], 1e-12));
    CHECK(close(a.chi[2], b.chi[3], 1e-12));
    CHECK(close(a.chi[3], b.chi[2], 1e-12));
    const auto ra = mql::ramanujan_violation_check(a), rb = mql::ramanujan_violation_check(b);
    CHECK(ra.violated == rb.violated);
    CHECK(ra.max_abs_v == doctest::Approx(rb.max_abs_v).epsilon(1e-12));
  }
}

TEST_CASE("ramanujan violation") {
  CHECK(mql::kRamanujanBound == doctest::Approx(0.5 - 1.0 / 17.0));
  auto r = mql::ramanujan_violation_check(mql::satake_from_lambda(5, 2.0));
  CHECK(r.v[0] == doctest::Approx(0.5));
  CHECK(r.v[1] == doctest::Approx(0.5));
  CHECK(r.v[2] == doctest::Approx(-0.5));
  CHECK(r.v[3] == doctest::Approx(-0.5));
  CHECK(r.violated);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    for (std::int64_t p : {3, 5, 7}) {
      r = mql::ramanujan_violation_check(mql::satake_from_lambda(p, dist(rng)));
      CHECK(std::abs(r.max_abs_v - 0.5) <= 1e-12);
      CHECK(r.violated);
      CHECK(std::abs(r.alpha_sum) <= 1e-10);
      CHECK(std::abs(r.alpha_plus + r.alpha_minus) <= 1e-10);
    }
  }
  // Off the tempered range one parameter grows past p^{1/2}.
  r = mql::ramanujan_violation_check(mql::satake_from_lambda(3, 5.0));
  CHECK(r.max_abs_v > 0.5);
  CHECK(r.violated);

  mql::SatakeParams tempered;
  tempered.p = 3;
  tempered.chi = {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
  r = mql::ramanujan_violation_check(tempered);
  CHECK(r.max_abs_v == 0.0);
  CHECK_FALSE(r.violated);
}

TEST_CASE("local descriptors") {
  mql::DescriptorInputs in;
  in.epsilon = 1;
  auto d = mql::sigma_descriptor(mql::Place::finite(2), in);
  REQUIRE(std::holds_alternative<mql::TwistedSteinberg>(d.shape));
  CHECK(std::get<mql::TwistedSteinberg>(d.shape).chi2 == -1.0);
  in.epsilon = -1;
  CHECK(std::get<mql::TwistedSteinberg>(mql::sigma_descriptor(mql::Place::finite(2), in).shape).chi2 == 1.0);

  mql::DescriptorInputs l;
  l.lambda = 2.0;
  d = mql::sigma_descriptor(mql::Place::finite(3), l);
  REQUIRE(std::holds_alternative<mql::UnramifiedPrincipalSeries>(d.shape));
  CHECK(close(std::get<mql::UnramifiedPrincipalSeries>(d.shape).chi_p, 1.0, 1e-12));
  l.lambda = 0.0;
  d = mql::sigma_descriptor(mql::Place::finite(7), l);
  CHECK(close(std::get<mql::UnramifiedPrincipalSeries>(d.shape).chi_p, Complex(0, 1), 1e-12));

  mql::DescriptorInputs r;
  r.r = 2.0;
  d = mql::sigma_descriptor(mql::Place::infinity(), r);
  REQUIRE(std::holds_alternative<mql::ArchimedeanPrincipalSeries>(d.shape));
  CHECK(close(std::get<mql::ArchimedeanPrincipalSeries>(d.shape).s, Complex(0, 1), 1e-15));
  const auto j = mql::to_json(d);
  CHECK(j["place"] == "inf");
  CHECK(j["shape"] == "archimedean_principal_series");

  CHECK_THROWS_AS(mql::sigma_descriptor(mql::Place::finite(2), l), std::invalid_argument);
  CHECK_THROWS_AS(mql::sigma_descriptor(mql::Place::finite(3), in), std::invalid_argument);
  CHECK_THROWS_AS(mql::sigma_descriptor(mql::Place::infinity(), mql::DescriptorInputs{}), std::invalid_argument);
  mql::DescriptorInputs both = l;
  both.r = 1.0;
  CHECK_THROWS_AS(mql::sigma_descriptor(mql::Place::finite(3), both), std::invalid_argument);
  CHECK_THROWS_AS(mql::sigma_descriptor(mql::Place::finite(9), l), std::invalid_argument);
}

TEST_CASE("relations for the inverted sequence") {
  for (int eps : {1, -1}) {
    const mql::AnyTable formal = mql::build_lift_table(eps, 500);
    // Formal sequences are compared after rewriting even symbols, so this holds identically.
    CHECK(mql::verify_cn_relations(formal).pass());
    const mql::AnyTable exact = mql::random_maass_table(eps, 11, 800);
    const auto r = mql::verify_cn_relations(exact);
    CHECK(r.pass());
    CHECK(r.checked_dyadic == 200);
    const mql::AnyTable numeric = mql::to_numeric(std::get<mql::ExactTable>(exact));
    CHECK(mql::verify_cn_relations(numeric).pass());
    // A generic Maass table is not an eigenform at 3.
    const auto bad = mql::verify_cn_relations(numeric, {{3, 1.5}});
    CHECK_FALSE(bad.pass());
    REQUIRE(bad.primes.size() == 1);
    CHECK_FALSE(bad.primes[0].failures.empty());
  }
  const auto l = mql::random_lambdas(2, 2000);
  const auto f = mql::synth_eigenform(1, l, 1000);
  const mql::AnyTable lifted = mql::build_lift_table(f.assignment(), 2000);
  const auto r = mql::verify_cn_relations(lifted, {{3, l.at(3)}, {5, l.at(5)}});
  CHECK(r.pass());
  CHECK(r.primes.at(0).checked == 333);
  CHECK(r.primes.at(0).max_err <= 1e-8);
  CHECK(mql::to_json(r)["pass"] == true);
}

TEST_CASE("end to end: synthesize, lift, recover, verify, classify") {
  const auto l = mql::random_lambdas(1234, 2500);
  for (int eps : {1, -1}) {
    const auto f = mql::synth_eigenform(eps, l, 2500);
    const auto table = mql::build_lift_table(f.assignment(), 5000);
    for (std::int64_t p : {3, 5, 7}) {
      const auto est = mql::extract_lambda_detail(table, p);
      CHECK(est.value == doctest::Approx(l.at(p)).epsilon(1e-8));
      CHECK(est.bases.size() >= 3);
      CHECK(est.spread <= 1e-9);
      const auto r = mql::ramanujan_violation_check(mql::satake_from_lambda(p, est.value));
      CHECK(r.violated);
    }
    for (const auto& rep : mql::verify_eigen_relations(table, {2, 3, 5, 7})) {
      CAPTURE(mql::to_json(rep).dump());
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("satake emitters") {
  const std::vector<mql::SatakeParams> rows{mql::satake_from_lambda(3, 1.5), mql::satake_from_lambda(5, -2.0)};
  const auto csv = mql::satake_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "p,lambda,re_chi1,im_chi1,re_chi2,im_chi2,re_chi3,im_chi3,re_chi4,im_chi4,max_abs_v,violated");
  int count = 0;
  while (std::getline(in, line)) {
    ++count;
    CHECK(std::count(line.begin(), line.end(), ',') == 11);
  }
  CHECK(count == 2);
  CHECK(csv.rfind("3,1.5,", csv.find('\n') + 1) != std::string::npos);
  const auto j = mql::satake_json(rows);
  CHECK(j.dump().find("\"violated\":true") != std::string::npos);

  CHECK(mql::format_double(0.1) == "0.1");
  CHECK(mql::format_double(-2.0) == "-2");
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int t = 0; t < 1000; ++t) {
    const double x = dist(rng);
    CHECK(std::stod(mql::format_double(x)) == x);
  }
}
