#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mql/hurwitz.hpp"

namespace mql {

/// Label (K, u, n) of a Fourier coefficient: K = |beta|^2, u the depth of
/// (1+i) in beta, n its odd content. Valid iff m = K / (2^u n^2) is an integer
/// with m = 2 (mod 4).
struct CanonicalIndex {
  std::int64_t K = 0;
  int u = 0;
  std::int64_t n = 1;

  bool is_valid() const;
  /// m = K / (2^u n^2); only meaningful for valid indices.
  std::int64_t primitive_norm() const;

  friend auto operator<=>(const CanonicalIndex&, const CanonicalIndex&) = default;
  friend bool operator==(const CanonicalIndex&, const CanonicalIndex&) = default;
};

bool is_valid_index(std::int64_t K, int u, std::int64_t n);
std::string to_string(const CanonicalIndex& idx);

/// An element of the dual lattice S = (1+i)O: integer coordinates with even
/// coordinate sum.
class LatticeElement {
 public:
  /// Throws std::invalid_argument if q is not in S.
  explicit LatticeElement(const HurwitzQuaternion& q);
  static std::optional<LatticeElement> make(const HurwitzQuaternion& q);

  const HurwitzQuaternion& value() const { return q_; }
  std::int64_t norm() const { return q_.reduced_norm(); }

  friend auto operator<=>(const LatticeElement&, const LatticeElement&) = default;
  friend bool operator==(const LatticeElement&, const LatticeElement&) = default;

 private:
  struct Unchecked {};
  LatticeElement(const HurwitzQuaternion& q, Unchecked) : q_(q) {}
  HurwitzQuaternion q_;
};

bool is_in_S(const HurwitzQuaternion& q);

/// nu(q) = 2 (mod 4) and the integer coordinates are coprime.
bool is_primitive(const LatticeElement& q);

struct Decomposition {
  CanonicalIndex index;
  LatticeElement primitive;
};

/// q = (1+i)^u * n * beta0 with beta0 primitive. The (1+i) factors are stripped
/// on the left. Throws std::invalid_argument for q = 0 or q outside S.
Decomposition canonical_decompose(const HurwitzQuaternion& q);

/// Deterministic beta with canonical_decompose(beta).index == index.
/// Throws std::invalid_argument ("no representative exists") for invalid indices.
LatticeElement find_representative(const CanonicalIndex& index);

/// Smallest (x, y, z) with x^2 + y^2 + z^2 = target, z <= y <= x, searched with
/// z ascending then y ascending, and not all three odd.
std::optional<std::array<std::int64_t, 3>> three_square(std::int64_t target);

enum class Side { Left, Right };

/// x / s for an integer s, if the quotient stays in O.
std::optional<HurwitzQuaternion> divide_exact(const HurwitzQuaternion& x, std::int64_t s);

/// Left: by^{-1} x. Right: x by^{-1}. Computed as conj(by) x / nu(by) (resp.
/// x conj(by) / nu(by)); nullopt when the quotient leaves O.
/// Throws std::invalid_argument for a zero divisor.
std::optional<HurwitzQuaternion> divide_exact(const HurwitzQuaternion& x, const HurwitzQuaternion& by,
                                              Side side);

}  // namespace mql
