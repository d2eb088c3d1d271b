#include "mql/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "mql/arith.hpp"
#include "mql/enumerate.hpp"
#include "mql/matrix.hpp"
#include "mql/parallel.hpp"

namespace mql {

std::string to_string(HeckeKind kind) {
  switch (kind) {
    case HeckeKind::T2: return "T2";
    case HeckeKind::H2: return "H2";
    case HeckeKind::H3: return "H3";
    case HeckeKind::H4: return "H4";
  }
  return "?";
}

HeckeKind parse_hecke_kind(const std::string& name) {
  if (name == "T2") return HeckeKind::T2;
  if (name == "H2") return HeckeKind::H2;
  if (name == "H3") return HeckeKind::H3;
  if (name == "H4") return HeckeKind::H4;
  throw std::invalid_argument("unknown Hecke operator \"" + name + "\" (expected T2, H2, H3 or H4)");
}

HeckeOperator HeckeOperator::make(std::int64_t prime, HeckeKind kind) {
  if (kind == HeckeKind::T2) {
    if (prime != 2) throw std::invalid_argument("T2 is only defined at p = 2");
  } else if (prime == 2 || !is_prime(prime)) {
    throw std::invalid_argument(to_string(kind) + " needs an odd prime, got " + std::to_string(prime));
  }
  return HeckeOperator{prime, kind};
}

std::string to_string(const HeckeOperator& op) { return to_string(op.kind) + "@" + std::to_string(op.prime); }

namespace {

std::int64_t growth_factor(const HeckeOperator& op) {
  switch (op.kind) {
    case HeckeKind::T2: return 2;
    case HeckeKind::H2:
    case HeckeKind::H4: return op.prime;
    case HeckeKind::H3: return op.prime * op.prime;
  }
  return 1;
}

struct Accumulator {
  double sum = 0.0;
  double abs = 0.0;
  void add(double v) {
    sum += v;
    abs += std::abs(v);
  }
};

double lookup(const NumericTable& table, const std::optional<HurwitzQuaternion>& q) {
  return q ? coefficient_at(table, *q) : 0.0;
}

}  // namespace

std::int64_t lookup_bound(const HeckeOperator& op, std::int64_t K) { return K * growth_factor(op); }

double coefficient_at(const NumericTable& table, const HurwitzQuaternion& q) {
  if (q.is_zero() || !is_in_S(q)) return 0.0;
  const auto idx = canonical_decompose(q).index;
  if (idx.K > table.k_max()) {
    throw OutOfBounds("out of bounds: lookup at " + to_string(idx) + " exceeds K_max = " +
                      std::to_string(table.k_max()));
  }
  return std::sqrt(static_cast<double>(idx.K)) * table.at(idx);
}

HeckeValue apply_at(const HeckeOperator& op, const NumericTable& table, const HurwitzQuaternion& beta) {
  if (beta.is_zero() || !is_in_S(beta)) {
    throw std::invalid_argument(to_string(beta) + " is not a nonzero element of S");
  }
  const double p = static_cast<double>(op.prime);
  Accumulator outer, inner;
  double scale = 1.0;
  switch (op.kind) {
    case HeckeKind::T2: {
      const auto w = HurwitzQuaternion::uniformizer();
      inner.add(lookup(table, divide_exact(beta, w, Side::Right)));
      inner.add(coefficient_at(table, beta * w));
      scale = 2.0;
      break;
    }
    case HeckeKind::H2:
      for (const auto& alpha : enumerate_cp(op.prime)) {
        const auto bar = alpha.conjugate();
        inner.add(lookup(table, divide_exact(beta, bar, Side::Right)));
        inner.add(coefficient_at(table, bar * beta));
      }
      scale = p;
      break;
    case HeckeKind::H4:
      for (const auto& alpha : enumerate_cp(op.prime)) {
        inner.add(lookup(table, divide_exact(beta, alpha, Side::Left)));
        inner.add(coefficient_at(table, beta * alpha));
      }
      scale = p;
      break;
    case HeckeKind::H3: {
      const auto& cp = enumerate_cp(op.prime);
      outer.add(p * p * lookup(table, divide_exact(beta, op.prime)));
      outer.add(p * p * coefficient_at(table, beta.scaled(op.prime)));
      for (const auto& a2 : cp) {
        const auto right = beta * a2;
        for (const auto& a1 : cp) inner.add(lookup(table, divide_exact(right, a1, Side::Left)));
      }
      scale = p;
      break;
    }
  }
  return {outer.sum + scale * inner.sum, outer.abs + scale * inner.abs};
}

HeckeValue apply(const HeckeOperator& op, const NumericTable& table, const CanonicalIndex& index) {
  if (!index.is_valid()) throw std::invalid_argument("invalid index " + to_string(index));
  const auto need = lookup_bound(op, index.K);
  if (need > table.k_max()) {
    throw OutOfBounds("out of bounds: " + to_string(op) + " at " + to_string(index) + " needs K = " +
                      std::to_string(need) + " > K_max = " + std::to_string(table.k_max()));
  }
  return apply_at(op, table, find_representative(index).value());
}

HeckeImage hecke_image_detail(const HeckeOperator& op, const NumericTable& table) {
  const std::int64_t k_max = table.k_max() / growth_factor(op);
  if (k_max < 2) {
    throw OutOfBounds("table with K_max = " + std::to_string(table.k_max()) + " is too small for " + to_string(op));
  }
  const auto indices = valid_indices(k_max);
  std::vector<HeckeValue> values(indices.size());
  parallel_for(indices.size(), [&](std::size_t k) { values[k] = apply(op, table, indices[k]); });
  HeckeImage image{NumericTable(table.epsilon(), k_max), NumericTable(table.epsilon(), k_max)};
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double root = std::sqrt(static_cast<double>(indices[k].K));
    image.values.set(indices[k], values[k].value / root);
    image.magnitudes.set(indices[k], values[k].magnitude / root);
  }
  return image;
}

NumericTable hecke_image(const HeckeOperator& op, const NumericTable& table) {
  return hecke_image_detail(op, table).values;
}

LambdaEstimate extract_lambda_detail(const NumericTable& table, std::int64_t p, double tolerance,
                                     std::size_t max_bases) {
  if (p == 2 || !is_prime(p)) throw std::invalid_argument("lambda_p needs an odd prime, got " + std::to_string(p));
  struct Candidate {
    std::int64_t top;
    std::int64_t K0;
    int n;
  };
  std::vector<Candidate> candidates;
  for (std::int64_t K0 = 2; p * K0 <= table.k_max(); K0 += 4) {
    if (K0 % p == 0) continue;
    std::int64_t pn = 1;
    for (int n = 0; pn * p * K0 <= table.k_max(); ++n, pn *= p) candidates.push_back({pn * p * K0, K0, n});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.top, a.K0) < std::tie(b.top, b.K0);
  });

  auto A = [&table](std::int64_t K) { return std::sqrt(static_cast<double>(K)) * table.at(K, 0, 1); };
  LambdaEstimate est;
  for (const auto& c : candidates) {
    if (est.bases.size() >= max_bases) break;
    const std::int64_t mid = c.top / p;
    const double den = A(mid);
    const double up = A(c.top);
    const double down = c.n == 0 ? 0.0 : A(mid / p);
    if (den == 0.0 || std::abs(den) < 1e-6 * std::max(std::abs(up), std::abs(down))) continue;
    est.bases.emplace_back(c.K0, c.n);
    est.per_base.push_back((up + down) / den);
  }
  if (est.per_base.empty()) {
    throw NoUsableIndex("no usable index for lambda_" + std::to_string(p) + ": every candidate denominator vanishes");
  }
  if (est.per_base.size() < 3) {
    throw NoUsableIndex("no usable index: only " + std::to_string(est.per_base.size()) +
                        " base(s) for lambda_" + std::to_string(p) + " within K_max, need 3");
  }
  const auto [lo, hi] = std::minmax_element(est.per_base.begin(), est.per_base.end());
  est.spread = (*hi - *lo) / std::max({1.0, std::abs(*lo), std::abs(*hi)});
  if (est.spread > tolerance) {
    throw InconsistentLambda("inconsistent lambda_" + std::to_string(p) + ": bases disagree by " +
                             std::to_string(est.spread));
  }
  est.value = est.per_base.front();
  return est;
}

double extract_lambda(const NumericTable& table, std::int64_t p, double tolerance) {
  return extract_lambda_detail(table, p, tolerance).value;
}

double expected_eigenvalue(const HeckeOperator& op, int epsilon, double lambda) {
  const double p = static_cast<double>(op.prime);
  switch (op.kind) {
    case HeckeKind::T2: return -3.0 * std::sqrt(2.0) * epsilon;
    case HeckeKind::H2:
    case HeckeKind::H4: return p * (p + 1) * lambda;
    case HeckeKind::H3: return p * p * lambda * lambda + p * p * p + p;
  }
  return 0.0;
}

json to_json(const EigenReport& r) {
  json j;
  j["prime"] = r.prime;
  j["kind"] = to_string(r.kind);
  j["indices_checked"] = r.indices_checked;
  j["max_rel_err"] = r.max_rel_err;
  j["pass"] = r.pass;
  if (r.lambda) {
    j["lambda"] = *r.lambda;
  } else if (r.kind != HeckeKind::T2) {
    j["lambda"] = nullptr;
    j["lambda_error"] = r.lambda_error;
  }
  j["expected_mu"] = r.expected_mu;
  j["fitted_mu"] = r.fitted_mu;
  j["spread"] = r.spread;
  j["constant"] = r.constant;
  return j;
}

namespace {

EigenReport eigen_report(const NumericTable& table, const HeckeOperator& op, std::optional<double> lambda,
                         const std::string& lambda_error, double tolerance, std::size_t max_indices) {
  EigenReport r;
  r.prime = op.prime;
  r.kind = op.kind;
  r.lambda = lambda;
  r.lambda_error = lambda_error;

  std::vector<CanonicalIndex> indices;
  for (const auto& idx : valid_indices(table.k_max() / growth_factor(op))) {
    if (indices.size() >= max_indices) break;
    indices.push_back(idx);
  }
  std::vector<HeckeValue> image(indices.size());
  std::vector<double> input(indices.size());
  parallel_for(indices.size(), [&](std::size_t k) {
    image[k] = apply(op, table, indices[k]);
    input[k] = std::sqrt(static_cast<double>(indices[k].K)) * table.at(indices[k]);
  });
  r.indices_checked = indices.size();

  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    num += image[k].value * input[k];
    den += input[k] * input[k];
  }
  r.fitted_mu = den > 0.0 ? num / den : 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double fitted = r.fitted_mu * input[k];
    r.spread = std::max(r.spread, relative_error(image[k].value, fitted, image[k].magnitude));
  }
  r.constant = r.indices_checked > 0 && r.spread <= tolerance;

  const bool have_expected = op.kind == HeckeKind::T2 || lambda.has_value();
  if (have_expected) {
    r.expected_mu = expected_eigenvalue(op, table.epsilon(), lambda.value_or(0.0));
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const double expected = r.expected_mu * input[k];
      r.max_rel_err = std::max(r.max_rel_err, relative_error(image[k].value, expected, image[k].magnitude));
    }
  } else {
    r.expected_mu = std::nan("");
    r.max_rel_err = std::nan("");
  }
  r.pass = have_expected && r.constant && r.max_rel_err <= tolerance;
  return r;
}

}  // namespace

std::vector<EigenReport> verify_eigen_relations(const NumericTable& table, const std::set<std::int64_t>& primes,
                                                double tolerance, const std::map<std::int64_t, double>& lambdas,
                                                std::size_t max_indices) {
  std::vector<EigenReport> out;
  for (auto p : primes) {
    if (p == 2) {
      out.push_back(eigen_report(table, HeckeOperator::make(2, HeckeKind::T2), std::nullopt, "", tolerance,
                                 max_indices));
      continue;
    }
    std::optional<double> lambda;
    std::string error;
    if (auto it = lambdas.find(p); it != lambdas.end()) {
      lambda = it->second;
    } else {
      try {
        lambda = extract_lambda(table, p, tolerance);
      } catch (const NoUsableIndex& e) {
        error = e.what();
      } catch (const InconsistentLambda& e) {
        error = e.what();
      }
    }
    for (auto kind : {HeckeKind::H2, HeckeKind::H3, HeckeKind::H4}) {
      out.push_back(eigen_report(table, HeckeOperator::make(p, kind), lambda, error, tolerance, max_indices));
    }
  }
  return out;
}

SummationCheck summation_identity(const NumericTable& image, std::int64_t p, const CanonicalIndex& index,
                                  const NumericTable* magnitudes) {
  if (!index.is_valid()) throw std::invalid_argument("invalid index " + to_string(index));
  const int m = valuation(index.K, p);
  const int l = valuation(index.n, p);
  const std::int64_t rest = index.K / ipow(p, m);
  const std::int64_t n = index.n / ipow(p, l);
  auto A = [&image](std::int64_t K, int u, std::int64_t nn) {
    return std::sqrt(static_cast<double>(K)) * image.at(K, u, nn);
  };
  SummationCheck c;
  c.index = index;
  c.lhs = A(index.K, index.u, index.n);
  auto M = [&](std::int64_t K, int u, std::int64_t nn) {
    return magnitudes ? std::sqrt(static_cast<double>(K)) * magnitudes->at(K, u, nn) : 0.0;
  };
  double magnitude = M(index.K, index.u, index.n);
  for (int i = 0; i <= l; ++i) {
    const std::int64_t K = ipow(p, m - 2 * i) * rest;
    const double term = static_cast<double>(ipow(p, i)) * A(K, index.u, n);
    c.rhs += term;
    magnitude += std::abs(term) + static_cast<double>(ipow(p, i)) * M(K, index.u, n);
  }
  c.rel_err = relative_error(c.lhs, c.rhs, magnitude);
  return c;
}

json to_json(const StabilityReport& r) {
  json j;
  j["prime"] = r.op.prime;
  j["kind"] = to_string(r.op.kind);
  j["image_size"] = r.image_size;
  j["maass"] = to_json(r.maass);
  j["identity_checked"] = r.identity_checked;
  json fails = json::array();
  for (const auto& idx : r.identity_failures) fails.push_back(to_string(idx));
  j["identity_failures"] = std::move(fails);
  j["identity_max_err"] = r.identity_max_err;
  j["pass"] = r.pass();
  return j;
}

StabilityReport stability_check(const NumericTable& table, const HeckeOperator& op, double tolerance) {
  StabilityReport r;
  r.op = op;
  const auto detail = hecke_image_detail(op, table);
  const auto& image = detail.values;
  r.image_size = image.size();
  r.maass = check_maass(image, tolerance, &detail.magnitudes);
  if (op.prime != 2) {
    for (const auto& [idx, v] : image.entries()) {
      const int l = valuation(idx.n, op.prime);
      if (l < 1 || valuation(idx.K, op.prime) < 2 * l + 1) continue;
      const auto c = summation_identity(image, op.prime, idx, &detail.magnitudes);
      ++r.identity_checked;
      r.identity_max_err = std::max(r.identity_max_err, c.rel_err);
      if (!(c.rel_err <= tolerance)) r.identity_failures.push_back(idx);
    }
  }
  return r;
}

bool AdjointReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const AdjointCheck& c) { return c.pass; });
}

json to_json(const AdjointReport& r) {
  json j;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["prime"] = c.prime;
    e["lhs"] = c.lhs;
    e["rhs"] = c.rhs;
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["pass"] = r.pass();
  return j;
}

std::string to_string(const RationalQuaternion& q) {
  static const char* basis[] = {"", "i", "j", "k"};
  std::string out;
  for (std::size_t k = 0; k < 4; ++k) {
    if (q[k] == 0) continue;
    std::string coeff = to_string(q[k]);
    if (k > 0 && (q[k] == 1 || q[k] == -1)) coeff.pop_back();
    if (!out.empty() && q[k] > 0) out += "+";
    out += coeff + basis[k];
  }
  return out.empty() ? "0" : out;
}

AdjointReport adjoint_matrix_identities(const std::vector<std::int64_t>& odd_primes) {
  using RMat = SquareMatrix<Rational>;
  AdjointReport report;
  for (auto p : odd_primes) {
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("adjoint identities need odd primes, got " + std::to_string(p));
    const Rational P(p), one(1);
    const auto h2 = RMat::diagonal({P, P, P, one});
    const auto h3 = RMat::diagonal({P, P, one, one});
    const auto h4 = RMat::diagonal({P, one, one, one});
    const auto z = RMat::diagonal({P, P, P, P});
    const auto w = RMat::antidiagonal(4, one);
    auto check = [&](const std::string& name, const RMat& h, const RMat& expected) {
      const RMat lhs = w * z * h.inverse(one) * w;
      report.checks.push_back({name, p, to_string(lhs), to_string(expected), lhs == expected});
    };
    check("w z h4^-1 w = h2", h4, h2);
    check("w z h3^-1 w = h3", h3, h3);
    check("w z h2^-1 w = h4", h2, h4);
  }

  using QMat = SquareMatrix<RationalQuaternion>;
  const RationalQuaternion zero, one(1, 0, 0, 0);
  const RationalQuaternion w2(HurwitzQuaternion::uniformizer());
  const auto g = QMat::diagonal({w2, one}, zero);
  const auto z = QMat::diagonal({w2, w2}, zero);
  const auto w = QMat::antidiagonal(2, one, zero);
  const QMat lhs = w * z * g.inverse(one) * w;
  report.checks.push_back({"w z diag(1+i,1)^-1 w = diag(1+i,1)", 2, to_string(lhs), to_string(g), lhs == g});
  return report;
}

}  // namespace mql
