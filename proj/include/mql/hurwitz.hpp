#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace mql {

/// An element of the Hurwitz order
///
///     O = Z + Zi + Zj + Z(1 + i + j + ij)/2
///
/// stored in doubled coordinates: (a, b, c, d) represents (a + b i + c j + d ij) / 2.
/// Membership in O is exactly the condition a = b = c = d (mod 2), which every
/// constructor enforces. k and ij are the same basis element throughout.
class HurwitzQuaternion {
 public:
  using Coord = std::int64_t;

  constexpr HurwitzQuaternion() = default;

  /// Throws std::invalid_argument when the doubled coordinates have mixed parity.
  HurwitzQuaternion(Coord a, Coord b, Coord c, Coord d);

  /// x + y i + z j + w ij with integer coordinates.
  static HurwitzQuaternion from_integer(Coord x, Coord y, Coord z, Coord w);

  /// Non-throwing doubled-coordinate constructor.
  static std::optional<HurwitzQuaternion> from_doubled(Coord a, Coord b, Coord c, Coord d);

  static HurwitzQuaternion one() { return from_integer(1, 0, 0, 0); }

  /// The uniformizer 1 + i at 2.
  static HurwitzQuaternion uniformizer() { return from_integer(1, 1, 0, 0); }

  const std::array<Coord, 4>& doubled() const { return dc_; }
  Coord operator[](std::size_t k) const { return dc_[k]; }

  bool is_zero() const { return dc_ == std::array<Coord, 4>{}; }
  bool has_integer_coords() const { return dc_[0] % 2 == 0; }

  /// Integer coordinates (x, y, z, w); only meaningful when has_integer_coords().
  std::array<Coord, 4> integer_coords() const;

  /// nu(x) = x * conj(x), always a non-negative integer on O.
  Coord reduced_norm() const;
  /// tr(x) = x + conj(x), always an integer on O.
  Coord reduced_trace() const { return dc_[0]; }

  HurwitzQuaternion conjugate() const;
  HurwitzQuaternion scaled(Coord k) const;

  HurwitzQuaternion operator-() const;
  friend HurwitzQuaternion operator+(const HurwitzQuaternion& x, const HurwitzQuaternion& y);
  friend HurwitzQuaternion operator-(const HurwitzQuaternion& x, const HurwitzQuaternion& y);
  friend HurwitzQuaternion operator*(const HurwitzQuaternion& x, const HurwitzQuaternion& y);

  /// Lexicographic on doubled coordinates.
  friend auto operator<=>(const HurwitzQuaternion&, const HurwitzQuaternion&) = default;
  friend bool operator==(const HurwitzQuaternion&, const HurwitzQuaternion&) = default;

 private:
  explicit HurwitzQuaternion(std::array<Coord, 4> dc) : dc_(dc) {}
  std::array<Coord, 4> dc_{};
};

/// Hamilton product of integer 4-tuples in the basis {1, i, j, ij}.
std::array<std::int64_t, 4> hamilton_product(std::span<const std::int64_t, 4> x,
                                             std::span<const std::int64_t, 4> y);

/// The 24 units of O, in ascending doubled-coordinate order.
const std::array<HurwitzQuaternion, 24>& unit_group();

/// Formats as "a+bi+cj+dk" with half-integer coefficients written as "1/2", "-3/2".
std::string to_string(const HurwitzQuaternion& q);

/// Parses "a+bi+cj+dk" (ij is accepted for k, coefficients may be n/2) or a
/// tuple "(x,y,z,w)" / "[x,y,z,w]" of such coefficients. Throws
/// std::invalid_argument on malformed text or a value outside O.
HurwitzQuaternion parse_quaternion(std::string_view text);

}  // namespace mql
