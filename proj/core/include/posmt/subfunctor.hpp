#pragma once

#include <string>
#include <vector>

#include "posmt/semcat.hpp"

namespace posmt::subf {

// per sort: a subset of the chosen member's carrier
struct SortSubsetFamily {
    std::vector<BitVec> per_sort;
};

// parses per-sort element lists in the model DSL syntax ("A = {0,1} ...")
SortSubsetFamily parse_family(const std::string& text, const model::FinModel& m,
                              const std::string& filename = "<input>");

struct TVResult {
    bool yes = true;
    // first violation: def-set phi at ctx, split position (prefix length)
    int ctx_id = -1, split = -1, elem = -1;
};

// Tarski-Vaught condition: for every stored phi at every context split
// s * s' with nonempty prefix, projecting onto the suffix gives the same
// set whether the prefix coordinates range over M or over the family.
TVResult tv_check(const semcat::SemCat& C, int member, const SortSubsetFamily& fam);

struct Extension {
    // per context: N(x) (the box product of the per-sort subsets) and
    // per def-set u: N(u) = N(x) /\ ev(u)
    std::vector<BitVec> box;
    std::vector<std::vector<BitVec>> of_def;
};

// The pullback-formula extension; deterministic, hence unique.
Extension tv_extend(const semcat::SemCat& C, int member, const SortSubsetFamily& fam);

struct VerifyReport {
    bool ok = true;
    std::string first_failure;
};

// Re-verifies an extension from its tables: lattice compatibility
// (N(u /\ v) = N(u) /\ N(v), N(u \/ v) = N(u) \/ N(v), N(bot) empty),
// coherence (N(exists u) = projection of N(u)), elementarity
// (N(u) = N(x) /\ ev(u)), and product preservation across context splits.
VerifyReport verify_subfunctor(const semcat::SemCat& C, int member, const Extension& ext);

struct P26Result {
    bool yes = true;
    int ctx_id = -1, split = -1, elem = -1;  // first violating (phi, split)
    // on yes these all passed (asserted):
    bool extension_verified = false;
    bool extension_positively_closed = false;
};

// The positively-closed-subfunctor condition: for every stored phi at every
// split (prefix may be empty): N-box of the suffix is covered by the
// suffix-projection of (ev(phi) /\ N-box) together with the chi in
// Sub(suffix) disjoint from exists_pi(phi). On yes, the extension is built,
// verified, and checked positively closed (throws lm::InternalError if the
// asserted conclusions fail).
P26Result poscl_subfunctor_check(const semcat::SemCat& C, int member,
                                 const SortSubsetFamily& fam);

// positive closedness of an extension: every point of N(x) outside a
// def-set u lies in some stored v with v /\ u = bot
bool is_positively_closed_extension(const semcat::SemCat& C, int member, const Extension& ext,
                                    std::string* why = nullptr);

}  // namespace posmt::subf
