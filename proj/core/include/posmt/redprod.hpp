#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posmt/invariant.hpp"
#include "posmt/model.hpp"
#include "posmt/semcat.hpp"

namespace posmt::redprod {

// A filter of subsets of {0..n-1}, with members as bit masks.
struct IndexFilter {
    int n = 0;
    std::vector<std::uint32_t> members;  // sorted ascending
    std::uint32_t core = 0;              // intersection of all members
    bool ultra = false;

    bool contains(std::uint32_t J) const;
    // closure of the generators under supersets and intersections; throws
    // std::invalid_argument if improper (empty set would be forced) or the
    // generator list is empty.
    static IndexFilter from_generators(int n, const std::vector<std::uint32_t>& gens);
};

// Explicit filtered-colimit construction of the reduced product, kept next
// to the principal shortcut (the product over the core). On a finite index
// set every filter is principal, so the two must agree; the point of the
// construction is validating the colimit machinery against the collapse.
struct ReducedProduct {
    IndexFilter filter;
    // per sort: classes of (J, tuple over prod_{i in J} carriers); the
    // canonical representative is (core, tuple restricted to the core)
    struct Elem {
        std::uint32_t J;
        std::vector<int> tuple;  // indexed by ascending set bits of J
    };
    std::vector<std::vector<Elem>> reps;     // per sort: canonical class reps
    std::vector<long long> raw_pairs;        // per sort: #(J, tuple) pairs seen
    model::FinModel as_model;                // carriers = classes
    bool principal_iso_verified = false;     // colimit ~ product over the core
    bool well_defined_verified = false;      // relations/functions rep-independent
};

ReducedProduct reduced_product(const std::vector<model::FinModel>& models,
                               const IndexFilter& F);

struct LosResult {
    bool verdict = false;      // shared verdict of both routes
    bool contained = false;    // subset check inside the reduced product
    bool index_set_member = false;  // {i : A_i subseteq B_i} in U
};

// Los containment: prod A_i / U subseteq prod B_i / U iff the agreement set
// is in U; both sides computed independently, disagreement throws
// lm::InternalError. A_i/B_i are subsets of each model's ctx-tuple space.
LosResult los_containment(const std::vector<model::FinModel>& models, const IndexFilter& F,
                          const std::vector<int>& ctx_sorts,
                          const std::vector<BitVec>& A, const std::vector<BitVec>& B);

struct DiagonalResult {
    model::Homomorphism delta;
    model::FinModel power;  // M^I / U as a model
    bool elementary = false;
    bool injective = false;
};

// Delta: M -> M^I/U; elementarity checked against the jointly saturated
// pair {M, M^I/U} and asserted (throws lm::InternalError on failure).
DiagonalResult diagonal_map(const model::FinModel& m, int copies, const IndexFilter& F,
                            semcat::Options opt = {});

}  // namespace posmt::redprod
