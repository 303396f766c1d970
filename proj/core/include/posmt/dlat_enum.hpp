#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "posmt/dlat.hpp"

namespace posmt::dlat {

// All distributive lattices with at most max_elements elements, one per
// isomorphism class, ordered by size then construction order. Works through
// Birkhoff duality: enumerates posets of join-irreducibles (adding maximal
// elements along a linear extension, pruning by down-set count) and
// deduplicates up to poset isomorphism.
std::vector<FinDistLattice> enumerate_distributive_lattices(int max_elements);

// Seeded random distributive lattices with <= max_elements elements, built
// as down-set lattices of random posets. Deterministic for a fixed seed.
std::vector<FinDistLattice> random_distributive_lattices(std::mt19937_64& rng, int count,
                                                         int max_elements);

}  // namespace posmt::dlat
