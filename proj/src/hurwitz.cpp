#include "mql/hurwitz.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <vector>

namespace mql {

namespace {

bool same_parity(const std::array<std::int64_t, 4>& dc) {
  const auto par = dc[0] & 1;
  return (dc[1] & 1) == par && (dc[2] & 1) == par && (dc[3] & 1) == par;
}

}  // namespace

HurwitzQuaternion::HurwitzQuaternion(Coord a, Coord b, Coord c, Coord d) : dc_{a, b, c, d} {
  if (!same_parity(dc_)) {
    throw std::invalid_argument("doubled coordinates must share a parity to lie in the Hurwitz order");
  }
}

HurwitzQuaternion HurwitzQuaternion::from_integer(Coord x, Coord y, Coord z, Coord w) {
  return HurwitzQuaternion(std::array<Coord, 4>{2 * x, 2 * y, 2 * z, 2 * w});
}

std::optional<HurwitzQuaternion> HurwitzQuaternion::from_doubled(Coord a, Coord b, Coord c, Coord d) {
  std::array<Coord, 4> dc{a, b, c, d};
  if (!same_parity(dc)) return std::nullopt;
  return HurwitzQuaternion(dc);
}

std::array<HurwitzQuaternion::Coord, 4> HurwitzQuaternion::integer_coords() const {
  return {dc_[0] / 2, dc_[1] / 2, dc_[2] / 2, dc_[3] / 2};
}

HurwitzQuaternion::Coord HurwitzQuaternion::reduced_norm() const {
  Coord s = 0;
  for (auto v : dc_) s += v * v;
  return s / 4;
}

HurwitzQuaternion HurwitzQuaternion::conjugate() const {
  return HurwitzQuaternion(std::array<Coord, 4>{dc_[0], -dc_[1], -dc_[2], -dc_[3]});
}

HurwitzQuaternion HurwitzQuaternion::scaled(Coord k) const {
  return HurwitzQuaternion(std::array<Coord, 4>{k * dc_[0], k * dc_[1], k * dc_[2], k * dc_[3]});
}

HurwitzQuaternion HurwitzQuaternion::operator-() const { return scaled(-1); }

HurwitzQuaternion operator+(const HurwitzQuaternion& x, const HurwitzQuaternion& y) {
  return HurwitzQuaternion(std::array<HurwitzQuaternion::Coord, 4>{
      x.dc_[0] + y.dc_[0], x.dc_[1] + y.dc_[1], x.dc_[2] + y.dc_[2], x.dc_[3] + y.dc_[3]});
}

HurwitzQuaternion operator-(const HurwitzQuaternion& x, const HurwitzQuaternion& y) { return x + (-y); }

std::array<std::int64_t, 4> hamilton_product(std::span<const std::int64_t, 4> x,
                                             std::span<const std::int64_t, 4> y) {
  return {
      x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
      x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
      x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
      x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0],
  };
}

HurwitzQuaternion operator*(const HurwitzQuaternion& x, const HurwitzQuaternion& y) {
  // (X/2)(Y/2) = XY/4, so the doubled product is XY/2. O is closed under
  // multiplication, hence XY has even coordinates of a common parity class.
  auto p = hamilton_product(x.dc_, y.dc_);
  for (auto& v : p) v /= 2;
  return HurwitzQuaternion(p);
}

const std::array<HurwitzQuaternion, 24>& unit_group() {
  static const std::array<HurwitzQuaternion, 24> units = [] {
    std::vector<HurwitzQuaternion> out;
    for (int k = 0; k < 4; ++k) {
      for (int s : {-2, 2}) {
        std::array<std::int64_t, 4> dc{};
        dc[k] = s;
        out.push_back(*HurwitzQuaternion::from_doubled(dc[0], dc[1], dc[2], dc[3]));
      }
    }
    for (int mask = 0; mask < 16; ++mask) {
      out.push_back(*HurwitzQuaternion::from_doubled(mask & 1 ? -1 : 1, mask & 2 ? -1 : 1,
                                                     mask & 4 ? -1 : 1, mask & 8 ? -1 : 1));
    }
    std::sort(out.begin(), out.end());
    std::array<HurwitzQuaternion, 24> arr;
    std::copy(out.begin(), out.end(), arr.begin());
    return arr;
  }();
  return units;
}

std::string to_string(const HurwitzQuaternion& q) {
  static constexpr std::array<const char*, 4> basis{"", "i", "j", "k"};
  std::string out;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto d = q[k];
    if (d == 0) continue;
    const bool neg = d < 0;
    const auto mag = neg ? -d : d;
    if (neg) {
      out += '-';
    } else if (!out.empty()) {
      out += '+';
    }
    std::string coeff = (mag % 2 == 0) ? std::to_string(mag / 2) : std::to_string(mag) + "/2";
    if (k > 0 && coeff == "1") coeff.clear();
    out += coeff;
    out += basis[k];
  }
  return out.empty() ? "0" : out;
}

namespace {

[[noreturn]] void parse_fail(std::string_view text, const std::string& why) {
  throw std::invalid_argument("cannot parse quaternion \"" + std::string(text) + "\": " + why);
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) parse_fail(whole, "bad number '" + std::string(s) + "'");
  return v;
}

/// Rational coefficient "p" or "p/q" converted to a doubled integer 2p/q.
std::int64_t doubled_coefficient(std::string_view s, std::string_view whole) {
  if (s.empty()) parse_fail(whole, "empty coefficient");
  const auto slash = s.find('/');
  const auto num = parse_int(s.substr(0, slash), whole);
  if (slash == std::string_view::npos) return 2 * num;
  const auto den = parse_int(s.substr(slash + 1), whole);
  if (den <= 0 || (2 * num) % den != 0) parse_fail(whole, "coefficient is not a half-integer");
  return 2 * num / den;
}

std::string strip_spaces(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  return s;
}

}  // namespace

HurwitzQuaternion parse_quaternion(std::string_view text) {
  const std::string s = strip_spaces(text);
  if (s.empty()) parse_fail(text, "empty");
  std::array<std::int64_t, 4> dc{};

  if (s.front() == '(' || s.front() == '[') {
    const char close = s.front() == '(' ? ')' : ']';
    if (s.back() != close) parse_fail(text, "unbalanced tuple");
    std::string_view body(s);
    body = body.substr(1, body.size() - 2);
    std::size_t k = 0;
    while (true) {
      const auto comma = body.find(',');
      if (k >= 4) parse_fail(text, "tuple needs exactly 4 entries");
      dc[k++] = doubled_coefficient(body.substr(0, comma), text);
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    if (k != 4) parse_fail(text, "tuple needs exactly 4 entries");
  } else {
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t end = pos + 1;
      while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
      std::string term = s.substr(pos, end - pos);
      pos = end;
      bool neg = false;
      if (term.front() == '+' || term.front() == '-') {
        neg = term.front() == '-';
        term.erase(0, 1);
      }
      std::size_t slot = 0;
      if (term.size() >= 2 && term.compare(term.size() - 2, 2, "ij") == 0) {
        slot = 3;
        term.resize(term.size() - 2);
      } else if (!term.empty() && (term.back() == 'i' || term.back() == 'j' || term.back() == 'k')) {
        slot = term.back() == 'i' ? 1 : term.back() == 'j' ? 2 : 3;
        term.pop_back();
      }
      if (term.empty()) {
        if (slot == 0) parse_fail(text, "dangling sign");
        term = "1";
      }
      const auto v = doubled_coefficient(term, text);
      dc[slot] += neg ? -v : v;
    }
  }
  auto q = HurwitzQuaternion::from_doubled(dc[0], dc[1], dc[2], dc[3]);
  if (!q) parse_fail(text, "coordinates are not all integers or all half-odd-integers");
  return *q;
}

}  // namespace mql
