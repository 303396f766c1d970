#pragma once

#include <optional>
#include <string>
#include <vector>

#include "posmt/dlat.hpp"
#include "posmt/semcat.hpp"

namespace posmt::lm {

// One generator of the LM colimit: a def-set u at context x pointed by a
// tuple of the chosen member at x.
struct Generator {
    int ctx_id = -1;
    int elem = -1;
    long long point = -1;

    friend bool operator<(const Generator& a, const Generator& b) {
        if (a.ctx_id != b.ctx_id) return a.ctx_id < b.ctx_id;
        if (a.elem != b.elem) return a.elem < b.elem;
        return a.point < b.point;
    }
    friend bool operator==(const Generator& a, const Generator& b) {
        return a.ctx_id == b.ctx_id && a.elem == b.elem && a.point == b.point;
    }
};

// Internal-disagreement errors: a failed cross-check between two routes that
// are theorems of the construction. These indicate a bug (or saturation
// incompleteness, when the category was cut off), never bad user input.
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& m) : std::runtime_error(m) {}
};

struct LMLattice {
    int member = -1;
    int gen_bound = 1;
    std::vector<Generator> gens;
    std::vector<int> cls;  // per generator: class id
    // generator classes [0, base_classes); operation closure may add
    // extended classes (longer-context elements) up to n_classes
    int base_classes = 0;
    int n_classes = 0;
    int top_cls = -1, bot_cls = -1;
    std::vector<Generator> rep;  // per class: lexicographically least generator
    // class lattice tables; -1 = unresolved at the context bound
    std::vector<std::vector<int>> meet, join;
    bool ops_resolved = true;
    bool welldef_verified = true;
    // audit notes: merges closed only transitively, unresolved operations
    std::vector<std::string> audit;

    // |LM| counts the generator classes at the bound; extended classes
    // exist only to close the operation tables
    std::size_t size() const { return static_cast<std::size_t>(base_classes); }
    bool leq(int c1, int c2) const { return meet[c1][c2] == c1; }
    // requires ops_resolved
    dlat::FinDistLattice as_dlat() const;
};

// The ~ relation (two pointed def-sets merged by a witness at the pair
// context), computed on generators at contexts of length <= gen_bound with
// witnesses at contexts of length <= n_max. Class lattice operations go
// through common-context representatives; their re-identification against
// the base generators may need contexts up to 3*gen_bound, so with the
// default gen_bound = floor(n_max/3) rounded up to >= 1 everything resolves
// at n_max = 3.
LMLattice lm_compute(const semcat::SemCat& C, int member, int gen_bound);

// Direct positive-closedness at contexts of length <= ctx_bound: for every
// u in Sub(x) and point a outside u there must be a stored v with
// v /\ u = bot (as def-sets, i.e. in every member) containing a. The witness
// v can always be taken to be the pseudocomplement of u.
struct PosclResult {
    bool yes = true;
    // counterexample when no
    int ctx_id = -1, elem = -1;
    long long point = -1;
};
PosclResult is_positively_closed_direct(const semcat::SemCat& C, int member, int ctx_bound);

// matching default bound for the poscl <-> |LM| = 2 equivalence
int default_gen_bound(const semcat::SemCat& C);

// tp(a / empty) = { u in Sub(x) : a in ev(u) }, verified prime.
dlat::PrimeFilter tp(const semcat::SemCat& C, int member, int ctx_id, long long point);
// the filter as a bit set over Sub(ctx), without the primality check
BitVec tp_bits(const semcat::SemCat& C, int member, int ctx_id, long long point);

// A natural transformation M => type-space functor, restricted to contexts
// of length <= gen_bound: per (ctx, point) a prime filter of Sub(ctx).
struct NatTransf {
    int spec_point = -1;  // index into Spec(LM)
    // filters[ctx_id][point] = bits over Sub(ctx)
    std::vector<std::vector<BitVec>> filters;
};

// One transformation per point of Spec(LM); each verified natural and
// pointwise prime; the one induced by the filter {top} equals tp.
std::vector<NatTransf> nat_transformations_to_typespace(const semcat::SemCat& C, int member,
                                                        const LMLattice& lm);

// naturality of a filter family along every coordinate map between stored
// contexts of length <= bound
bool verify_natural(const semcat::SemCat& C, int member,
                    const std::vector<std::vector<BitVec>>& filters, int bound,
                    std::string* why = nullptr);

struct LatHomResult {
    std::vector<int> map;  // LM class -> LN class
    bool welldefined = true;
    bool bounded_hom = true;
    std::string detail;
};

// L applied to a homomorphism between family members i -> j:
// [u at x^a] -> [u at x^{h(a)}]. Well-definedness failure throws
// InternalError with the violating pair.
LatHomResult l_of_hom(const semcat::SemCat& C, int src_member, int dst_member,
                      const model::Homomorphism& h, const LMLattice& lm_src,
                      const LMLattice& lm_dst);

struct ElemVsTpResult {
    bool elementary = false;     // preimage route
    bool tp_agrees = false;      // tp_N(h(a)) == tp_M(a) route
    int ctx_id = -1, elem = -1;  // violating def-set for the preimage route
};

// Both characterizations computed independently; disagreement throws
// InternalError (they are equivalent at matched bounds).
ElemVsTpResult check_hom_elementarity_vs_tp(const semcat::SemCat& C, int src_member,
                                            int dst_member, const model::Homomorphism& h);

// is_elementary_hom alone (preimage route), with the violating def-set
ElemVsTpResult is_elementary_hom(const semcat::SemCat& C, int src_member, int dst_member,
                                 const model::Homomorphism& h);

struct ProductCheckResult {
    bool iso = false;
    bool flagged = false;  // failure may be bound-induced
    std::string detail;
};

// Canonical comparison map L(M x N) -> LM x LN where M x N is the
// pointwise product of the two evaluation functors (pair points,
// conjunctive membership): [u at x^{(a,b)}] -> ([u at x^a], [u at x^b]).
// Verifies it is a lattice isomorphism. No product model is materialized;
// the product model's evaluation differs from the pointwise product on
// disjunctions and is not the object this comparison is about.
ProductCheckResult lm_product_check(const semcat::SemCat& C, int mi, int ni, int gen_bound);

struct SearchStep {
    model::FinModel model;
    std::string note;
};
struct SearchResult {
    bool found = false;
    model::FinModel result;  // meaningful when found
    int steps = 0;
    std::vector<std::string> open_triples;  // diagnostics when not found
};

// Greedy chain of homomorphism steps, each resolving one failing
// (u, x, a) triple by scanning enumerated models with carriers
// <= size_bound. Never claims nonexistence.
SearchResult search_positively_closed(const model::FinModel& start, int size_bound,
                                      int step_bound, semcat::Options opt = {},
                                      long long max_candidates = 200000);

// deterministic enumeration of all models over sig with carrier sizes
// <= size_bound (each sort nonempty); stops after `cap` callbacks return true
void enumerate_models(const std::shared_ptr<const syntax::Signature>& sig, int size_bound,
                      long long cap, const std::function<bool(model::FinModel&)>& visit);

}  // namespace posmt::lm
