#include "mql/coeff_algebra.hpp"

#include <charconv>

namespace mql {

std::string to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  Rational r;
  const std::string body = text[0] == '+' ? text.substr(1) : text;
  if (body.empty() || body[0] == '+' || r.set_str(body, 10) != 0) {
    throw std::invalid_argument("bad rational '" + text + "'");
  }
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

FormalCoefficient FormalCoefficient::symbol(std::int64_t M, const Rational& coeff) {
  FormalCoefficient x;
  x.add_term(M, coeff);
  return x;
}

Rational FormalCoefficient::coefficient(std::int64_t M) const {
  auto it = terms_.find(M);
  return it == terms_.end() ? Rational(0) : it->second;
}

FormalCoefficient& FormalCoefficient::add_term(std::int64_t M, const Rational& coeff) {
  if (M < 1) throw std::invalid_argument("symbol index must be positive, got " + std::to_string(M));
  if (coeff == 0) return *this;
  Rational c = coeff;
  c.canonicalize();
  auto [it, inserted] = terms_.try_emplace(M, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
  return *this;
}

FormalCoefficient& FormalCoefficient::operator+=(const FormalCoefficient& other) {
  for (const auto& [M, q] : other.terms_) add_term(M, q);
  return *this;
}

FormalCoefficient& FormalCoefficient::operator-=(const FormalCoefficient& other) {
  for (const auto& [M, q] : other.terms_) add_term(M, -q);
  return *this;
}

FormalCoefficient& FormalCoefficient::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  Rational c = s;
  c.canonicalize();
  for (auto& [M, q] : terms_) q *= c;
  return *this;
}

std::string to_string(const FormalCoefficient& x) {
  if (x.is_zero()) return "0";
  std::string out;
  for (const auto& [M, q] : x.terms()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(q) + ")*C(" + std::to_string(M) + ")";
  }
  return out;
}

FormalCoefficient combine(const FormalCoefficient& a, const FormalCoefficient& b, const Rational& s,
                          const Rational& t) {
  return s * a + t * b;
}

double eval(const FormalCoefficient& x, const Assignment& a) {
  double sum = 0.0;
  for (const auto& [M, q] : x.terms()) {
    auto it = a.values.find(M);
    if (it == a.values.end()) throw UnassignedSymbol(M);
    sum += q.get_d() * it->second;
  }
  return sum;
}

FormalCoefficient reduce_eigen2(const FormalCoefficient& x, int epsilon) {
  const Rational step(-epsilon, 2);
  FormalCoefficient out;
  for (const auto& [M, q] : x.terms()) {
    std::int64_t odd = M;
    Rational coeff = q;
    while (odd % 2 == 0) {
      odd /= 2;
      coeff *= step;
    }
    out.add_term(odd, coeff);
  }
  return out;
}

json to_json(const FormalCoefficient& x) {
  json j = json::object();
  for (const auto& [M, q] : x.terms()) j[std::to_string(M)] = to_string(q);
  return j;
}

FormalCoefficient formal_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("formal coefficient must be a JSON object");
  FormalCoefficient x;
  for (const auto& [key, val] : j.items()) {
    std::int64_t M = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), M);
    if (ec != std::errc{} || ptr != key.data() + key.size() || M < 1) {
      throw std::invalid_argument("bad symbol key '" + key + "'");
    }
    if (!val.is_string()) throw std::invalid_argument("coefficient of C(" + key + ") must be a string");
    x.add_term(M, parse_rational(val.get<std::string>()));
  }
  return x;
}

}  // namespace mql
