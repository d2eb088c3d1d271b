#pragma once

#include <cstdint>
#include <vector>

#include "mql/hurwitz.hpp"
#include "mql/lattice.hpp"

namespace mql {

/// All elements of O with reduced norm m, ascending in doubled coordinates.
std::vector<HurwitzQuaternion> enumerate_norm(std::int64_t m);

/// Representatives of {alpha in O : nu(alpha) = p} / O^x under right
/// multiplication by units, one per orbit (its lexicographically smallest
/// member), ascending. Exactly p + 1 of them. Throws std::invalid_argument
/// unless p is an odd prime. Results are cached.
const std::vector<HurwitzQuaternion>& enumerate_cp(std::int64_t p);

/// Divisibility profile of a primitive beta against C_p.
struct DivisibilityCounts {
  int left = 0;                  ///< #{alpha : p | conj(alpha) beta}
  int right = 0;                 ///< #{alpha : p | beta alpha}
  bool square_divides = false;   ///< p^2 divides some conj(alpha) beta or beta alpha
};

/// Throws std::invalid_argument for a non-primitive beta or a bad prime.
DivisibilityCounts lemma51_count(const LatticeElement& beta, std::int64_t p);

}  // namespace mql
