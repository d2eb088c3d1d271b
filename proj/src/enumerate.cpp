#include "mql/enumerate.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

#include "mql/arith.hpp"

namespace mql {

std::vector<HurwitzQuaternion> enumerate_norm(std::int64_t m) {
  if (m < 1) throw std::invalid_argument("enumerate_norm needs m >= 1");
  // a^2 + b^2 + c^2 + d^2 = 4m over doubled coordinates of equal parity.
  const std::int64_t target = 4 * m;
  const std::int64_t bound = isqrt(target);
  std::vector<HurwitzQuaternion> out;
  for (std::int64_t a = -bound; a <= bound; ++a) {
    const std::int64_t ra = target - a * a;
    const std::int64_t bb = isqrt(ra);
    for (std::int64_t b = -bb; b <= bb; ++b) {
      if ((b - a) % 2 != 0) continue;
      const std::int64_t rb = ra - b * b;
      const std::int64_t cb = isqrt(rb);
      for (std::int64_t c = -cb; c <= cb; ++c) {
        if ((c - a) % 2 != 0) continue;
        const std::int64_t rc = rb - c * c;
        const std::int64_t d = isqrt(rc);
        if (d * d != rc || (d - a) % 2 != 0) continue;
        out.push_back(*HurwitzQuaternion::from_doubled(a, b, c, -d));
        if (d != 0) out.push_back(*HurwitzQuaternion::from_doubled(a, b, c, d));
      }
    }
  }
  return out;
}

namespace {

std::vector<HurwitzQuaternion> compute_cp(std::int64_t p) {
  std::set<HurwitzQuaternion> seen;
  std::vector<HurwitzQuaternion> reps;
  for (const auto& x : enumerate_norm(p)) {
    if (seen.contains(x)) continue;
    HurwitzQuaternion rep = x;
    for (const auto& unit : unit_group()) {
      const auto y = x * unit;
      seen.insert(y);
      rep = std::min(rep, y);
    }
    reps.push_back(rep);
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

}  // namespace

const std::vector<HurwitzQuaternion>& enumerate_cp(std::int64_t p) {
  if (p == 2 || !is_prime(p)) {
    throw std::invalid_argument("C_p needs an odd prime, got " + std::to_string(p));
  }
  static std::mutex mu;
  static std::map<std::int64_t, std::vector<HurwitzQuaternion>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, compute_cp(p)).first;
  return it->second;
}

DivisibilityCounts lemma51_count(const LatticeElement& beta, std::int64_t p) {
  if (!is_primitive(beta)) throw std::invalid_argument(to_string(beta.value()) + " is not primitive");
  DivisibilityCounts counts;
  for (const auto& alpha : enumerate_cp(p)) {
    const auto left = alpha.conjugate() * beta.value();
    const auto right = beta.value() * alpha;
    if (divide_exact(left, p)) ++counts.left;
    if (divide_exact(right, p)) ++counts.right;
    if (divide_exact(left, p * p) || divide_exact(right, p * p)) counts.square_divides = true;
  }
  return counts;
}

}  // namespace mql
