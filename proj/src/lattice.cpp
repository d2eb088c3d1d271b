#include "mql/lattice.hpp"

#include <numeric>
#include <stdexcept>

#include "mql/arith.hpp"

namespace mql {

bool is_valid_index(std::int64_t K, int u, std::int64_t n) {
  if (K <= 0 || u < 0 || n <= 0 || n % 2 == 0 || u > 62) return false;
  const std::int64_t denom = (std::int64_t{1} << u) * n * n;
  if (denom <= 0 || K % denom != 0) return false;
  return (K / denom) % 4 == 2;
}

bool CanonicalIndex::is_valid() const { return is_valid_index(K, u, n); }

std::int64_t CanonicalIndex::primitive_norm() const { return K / ((std::int64_t{1} << u) * n * n); }

std::string to_string(const CanonicalIndex& idx) {
  return "(" + std::to_string(idx.K) + "," + std::to_string(idx.u) + "," + std::to_string(idx.n) + ")";
}

bool is_in_S(const HurwitzQuaternion& q) {
  if (!q.has_integer_coords()) return false;
  const auto c = q.integer_coords();
  return (c[0] + c[1] + c[2] + c[3]) % 2 == 0;
}

LatticeElement::LatticeElement(const HurwitzQuaternion& q) : q_(q) {
  if (!is_in_S(q)) throw std::invalid_argument(to_string(q) + " is not in the dual lattice S");
}

std::optional<LatticeElement> LatticeElement::make(const HurwitzQuaternion& q) {
  if (!is_in_S(q)) return std::nullopt;
  return LatticeElement(q, Unchecked{});
}

namespace {

std::int64_t coordinate_gcd(const HurwitzQuaternion& q) {
  std::int64_t g = 0;
  for (auto v : q.integer_coords()) g = std::gcd(g, v);
  return g;
}

}  // namespace

bool is_primitive(const LatticeElement& q) {
  return !q.value().is_zero() && q.norm() % 4 == 2 && coordinate_gcd(q.value()) == 1;
}

Decomposition canonical_decompose(const HurwitzQuaternion& q) {
  if (q.is_zero()) throw std::invalid_argument("cannot decompose 0");
  if (!is_in_S(q)) throw std::invalid_argument(to_string(q) + " is not in the dual lattice S");

  std::int64_t n = coordinate_gcd(q);
  while (n % 2 == 0) n /= 2;
  HurwitzQuaternion beta = *divide_exact(q, n);

  const auto w = HurwitzQuaternion::uniformizer();
  int u = 0;
  while (beta.reduced_norm() % 4 == 0) {
    auto next = divide_exact(beta, w, Side::Left);
    if (!next) throw std::logic_error("(1+i) failed to divide an element of norm 0 mod 4");
    beta = *next;
    ++u;
  }
  return {CanonicalIndex{q.reduced_norm(), u, n}, LatticeElement(beta)};
}

std::optional<std::array<std::int64_t, 3>> three_square(std::int64_t target) {
  if (target < 0) return std::nullopt;
  for (std::int64_t z = 0; 3 * z * z <= target; ++z) {
    for (std::int64_t y = z; z * z + 2 * y * y <= target; ++y) {
      const std::int64_t rest = target - y * y - z * z;
      const std::int64_t x = isqrt(rest);
      if (x * x != rest || x < y) continue;
      if (x % 2 != 0 && y % 2 != 0 && z % 2 != 0) continue;
      return std::array<std::int64_t, 3>{x, y, z};
    }
  }
  return std::nullopt;
}

LatticeElement find_representative(const CanonicalIndex& index) {
  if (!index.is_valid()) {
    throw std::invalid_argument("no representative exists for index " + to_string(index));
  }
  const std::int64_t m = index.primitive_norm();
  const auto xyz = three_square(m - 1);
  if (!xyz) throw std::logic_error("three-square search failed for m - 1 = " + std::to_string(m - 1));
  HurwitzQuaternion beta = HurwitzQuaternion::from_integer((*xyz)[0], (*xyz)[1], (*xyz)[2], 1);
  const auto w = HurwitzQuaternion::uniformizer();
  for (int k = 0; k < index.u; ++k) beta = w * beta;
  return LatticeElement(beta.scaled(index.n));
}

std::optional<HurwitzQuaternion> divide_exact(const HurwitzQuaternion& x, std::int64_t s) {
  if (s == 0) throw std::invalid_argument("division by zero");
  const auto& dc = x.doubled();
  for (auto v : dc) {
    if (v % s != 0) return std::nullopt;
  }
  return HurwitzQuaternion::from_doubled(dc[0] / s, dc[1] / s, dc[2] / s, dc[3] / s);
}

std::optional<HurwitzQuaternion> divide_exact(const HurwitzQuaternion& x, const HurwitzQuaternion& by,
                                              Side side) {
  if (by.is_zero()) throw std::invalid_argument("division by the zero quaternion");
  const auto bar = by.conjugate();
  const auto num = side == Side::Left ? bar * x : x * bar;
  return divide_exact(num, by.reduced_norm());
}

}  // namespace mql
