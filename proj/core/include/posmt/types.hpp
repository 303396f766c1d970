#pragma once

#include <optional>
#include <string>
#include <vector>

#include "posmt/dlat.hpp"
#include "posmt/invariant.hpp"
#include "posmt/semcat.hpp"

namespace posmt::types {

// S_C(x): the spectrum of Sub(x). Lattice element i is def-set i of the
// context's sub-lattice.
dlat::SpecSpace type_space(const semcat::SemCat& C, int ctx_id);

struct SomewhereDenseResult {
    bool yes = false;
    int witness = -1;  // phi with emptyset != [phi] subseteq closure(p)
};

// p somewhere dense iff some phi != bot has: psi in p <-> phi /\ psi != bot,
// for all psi. On yes the maximality of p among the computed prime filters
// is asserted (throws lm::InternalError on violation).
SomewhereDenseResult somewhere_dense(const semcat::SemCat& C, int ctx_id,
                                     const dlat::PrimeFilter& p);

struct RealizedResult {
    bool realized = false;
    long long witness_point = -1;  // element tuple with tp(e) = p
};

// Element scan: in Set, realization collapses to "p = tp(e) for some tuple e"
// (the side condition of the abstract characterization forces a singleton).
RealizedResult realized_by(const semcat::SemCat& C, int member, int ctx_id,
                           const dlat::PrimeFilter& p);

struct ArrowChecks {
    bool open_map = true;
    bool injective = true;   // meaningful when the map is monic
    bool surjective = true;  // meaningful when the map is an effective epi
    bool monic = false;      // position function surjective
    bool eff_epi = false;    // position function injective, dropped carriers nonempty
    std::string detail;
};

// S_C(f) for a coordinate map f: image of every basic open is open;
// injective when f is monic, surjective when f is an effective epi.
ArrowChecks spec_arrow_checks(const semcat::SemCat& C, const semcat::CoordMap& f);

struct CompletenessReport {
    bool weakly_boolean = false;
    bool two_valued = false;
    bool pairwise_equivalent = true;  // all members validate the same containments
    // first violating triple when not equivalent
    int ctx_id = -1, a = -1, b = -1, member_i = -1, member_j = -1;
    bool implication_holds = true;  // wB && 2V => pairwise equivalent
};

CompletenessReport semantic_completeness_analysis(const semcat::SemCat& C);

struct OmittedTypeRow {
    int type_index = -1;
    // per member: realizing tuple index, or -1 if omitted by that member
    std::vector<long long> realizer;
};

// per context: all types with their realizing elements per member
std::vector<OmittedTypeRow> realization_table(const semcat::SemCat& C, int ctx_id);

}  // namespace posmt::types
