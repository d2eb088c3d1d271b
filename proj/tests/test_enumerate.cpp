#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "mql/arith.hpp"
#include "mql/enumerate.hpp"
#include "oracles.hpp"

using mql::HurwitzQuaternion;

TEST_CASE("enumerate_norm matches the brute-force box") {
  CHECK(mql::enumerate_norm(1).size() == 24);
  CHECK(mql::enumerate_norm(2).size() == 24);
  CHECK(mql::enumerate_norm(3).size() == 96);
  for (std::int64_t m = 1; m <= 30; ++m) {
    const auto got = mql::enumerate_norm(m);
    const auto want = oracle::box_enumerate(m);
    REQUIRE(got.size() == want.size());
    CHECK(std::is_sorted(got.begin(), got.end()));
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k].doubled() == want[k]);
  }
  CHECK_THROWS_AS(mql::enumerate_norm(0), std::invalid_argument);
}

TEST_CASE("units are exactly the norm-1 elements") {
  const auto n1 = mql::enumerate_norm(1);
  const auto& units = mql::unit_group();
  CHECK(std::equal(n1.begin(), n1.end(), units.begin(), units.end()));
}

TEST_CASE("C_p examples and rejection of bad primes") {
  CHECK(mql::enumerate_cp(3).size() == 4);
  CHECK(mql::enumerate_cp(5).size() == 6);
  CHECK_THROWS_AS(mql::enumerate_cp(2), std::invalid_argument);
  CHECK_THROWS_AS(mql::enumerate_cp(9), std::invalid_argument);
  CHECK_THROWS_AS(mql::enumerate_cp(1), std::invalid_argument);
}

TEST_CASE("C_p representatives give disjoint right-unit orbits covering all norm-p elements") {
  for (std::int64_t p : {3, 5, 7, 11, 13}) {
    CAPTURE(p);
    const auto& reps = mql::enumerate_cp(p);
    REQUIRE(reps.size() == static_cast<std::size_t>(p + 1));
    std::set<HurwitzQuaternion> covered;
    for (const auto& r : reps) {
      std::set<HurwitzQuaternion> orbit;
      for (const auto& u : mql::unit_group()) orbit.insert(r * u);
      CHECK(orbit.size() == 24);
      CHECK(*orbit.begin() == r);  // lexicographic minimum
      for (const auto& x : orbit) CHECK(covered.insert(x).second);
    }
    const auto all = oracle::box_enumerate(p);
    CHECK(covered.size() == all.size());
    CHECK(covered.size() == static_cast<std::size_t>(24 * (p + 1)));
    for (const auto& dc : all) CHECK(covered.contains(*HurwitzQuaternion::from_doubled(dc[0], dc[1], dc[2], dc[3])));
  }
}

TEST_CASE("lemma51_count examples") {
  const auto beta = mql::LatticeElement(mql::parse_quaternion("1-ij"));
  auto c = mql::lemma51_count(beta, 3);
  CHECK(c.left == 0);
  CHECK(c.right == 0);
  const auto six = mql::LatticeElement(mql::parse_quaternion("2+i+j"));
  REQUIRE(six.norm() == 6);
  c = mql::lemma51_count(six, 3);
  CHECK(c.left == 1);
  CHECK(c.right == 1);
  CHECK_FALSE(c.square_divides);
  const auto ten = mql::LatticeElement(mql::parse_quaternion("3+ij"));
  REQUIRE(ten.norm() == 10);
  c = mql::lemma51_count(ten, 7);
  CHECK(c.left == 0);
  CHECK(c.right == 0);
  CHECK_THROWS_AS(mql::lemma51_count(mql::LatticeElement(mql::parse_quaternion("2ij")), 3), std::invalid_argument);
}

TEST_CASE("lemma51_count over every primitive element of norm <= 200, p in {3,5,7}") {
  std::size_t checked = 0;
  for (std::int64_t m = 2; m <= 200; m += 4) {
    for (const auto& q : mql::enumerate_norm(m)) {
      if (!q.has_integer_coords()) continue;
      const auto s = mql::LatticeElement::make(q);
      if (!s || !mql::is_primitive(*s)) continue;
      for (std::int64_t p : {3, 5, 7}) {
        const auto c = mql::lemma51_count(*s, p);
        const int want = m % p == 0 ? 1 : 0;
        REQUIRE(c.left == want);
        REQUIRE(c.right == want);
        REQUIRE_FALSE(c.square_divides);
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("no beta conj(alpha) / p in O when p does not divide nu(beta)") {
  const auto beta = mql::parse_quaternion("1-ij");
  for (const auto& a : mql::enumerate_cp(3)) {
    CHECK_FALSE(mql::divide_exact(beta * a.conjugate(), 3).has_value());
    CHECK_FALSE(mql::divide_exact(beta, a.conjugate(), mql::Side::Right).has_value());
  }
}
