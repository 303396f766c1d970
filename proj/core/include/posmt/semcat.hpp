#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "posmt/bitvec.hpp"
#include "posmt/dlat.hpp"
#include "posmt/model.hpp"
#include "posmt/syntax.hpp"

namespace posmt::semcat {

// A context is an ordered list of sort indices; the empty context is the
// terminal object. Context variables are canonically named x0, x1, ...
using Ctx = std::vector<int>;

std::string ctx_var(int position);
syntax::VarContext ctx_vars(const syntax::Signature& sig, const Ctx& ctx);

// A simultaneously definable subset tuple: one component per family member,
// all of them the evaluation of the same witness formula.
struct DefSet {
    Ctx ctx;
    std::vector<BitVec> comp;      // per member, over the member's tuple space
    syntax::FormulaPtr witness;    // canonical vars x0..x{k-1} free
};

// A coordinate map f : from -> to between contexts assigns to every position
// of `to` a position of `from` with the same sort; it induces per member the
// tuple map prod(from) -> prod(to).
struct CoordMap {
    Ctx from, to;
    std::vector<int> pos;  // pos[j] = position in `from` feeding to[j]
};

struct SubLattice {
    Ctx ctx;
    std::vector<DefSet> elems;
    int bot = -1, top = -1;
    // interning: component key -> element index
    std::unordered_map<std::size_t, std::vector<int>> buckets;

    int find(const std::vector<BitVec>& comp) const;
    bool leq(int a, int b) const;  // componentwise subset
};

struct WeaklyBooleanResult {
    bool yes = true;
    Ctx ctx;
    int a = -1, b = -1;  // counterexample pair when no
};

struct Options {
    int n_max = 3;
    std::size_t max_lattice = 4096;  // per-context cutoff
};

class SemCat {
public:
    using Options = posmt::semcat::Options;

    // Least saturated family per context: all atomic definables (term
    // equalities over depth <= 1 terms, relation instances), closed under
    // binary meet/join, image of the drop-last projection, and pullback
    // along coordinate maps between stored contexts. Witnesses maintained.
    static SemCat saturate(std::vector<model::FinModel> family, Options opt = {});

    const syntax::Signature& sig() const { return *sig_; }
    const std::vector<model::FinModel>& family() const { return family_; }
    int n_max() const { return opt_.n_max; }
    bool partial() const { return partial_; }  // cutoff hit; completeness lost
    std::size_t total_defsets() const;

    const std::vector<Ctx>& contexts() const { return contexts_; }
    int ctx_index(const Ctx& c) const;
    const SubLattice& sub(int ctx_id) const { return subs_[ctx_id]; }
    const SubLattice& sub(const Ctx& c) const { return subs_[ctx_index(c)]; }

    model::TupleSpace space(int member, int ctx_id) const;

    // exports Sub(x) as a plain distributive lattice (element i <-> DefSet i)
    dlat::FinDistLattice sub_as_dlat(int ctx_id) const;

    // lattice operations (indices into sub(ctx_id).elems)
    int meet(int ctx_id, int a, int b) const;
    int join(int ctx_id, int a, int b) const;
    // largest u with u /\ a = bot (all components), computed lazily per ctx
    int pseudocomplement(int ctx_id, int a) const;

    // image along the projection keeping `keep` (ordered positions subset);
    // returns (ctx_id', elem index) of the stored image
    std::pair<int, int> image_keep(int ctx_id, int elem, const std::vector<int>& keep) const;
    // pullback of `elem` at ctx `to` along a coordinate map (from -> to);
    // returns element index in `from`
    int pullback(const CoordMap& f, int elem_at_to) const;
    int pullback(const CoordMap& f, int to_id, int elem_at_to) const;
    // product-style pairing: pullbacks of u at x and v at y into x*y, met
    std::pair<int, int> box_product(int xid, int u, int yid, int v) const;

    // evaluation functor of one member
    struct EvalFunctor {
        const SemCat* C = nullptr;
        int member = -1;
        const BitVec& comp(int ctx_id, int elem) const {
            return C->sub(ctx_id).elems[elem].comp[member];
        }
        // coherence witness: preservation of bot/top/meet/join, images of
        // drop-last projections, and coordinate pullbacks
        bool verify_coherence(std::string* why = nullptr) const;
    };
    EvalFunctor ev(int member) const;

    WeaklyBooleanResult is_weakly_boolean() const;
    bool is_two_valued() const;
    std::vector<int> atom_subobjects(int ctx_id) const;

    // soundness: every witness re-evaluates to its components in every member
    bool verify_witnesses(std::string* why = nullptr) const;
    // fixpoint: re-running every closure operator adds nothing
    bool verify_fixpoint(std::string* why = nullptr) const;

    // all coordinate maps into `to` from stored contexts (sort-compatible)
    std::vector<CoordMap> coord_maps_into(const Ctx& to) const;

private:
    std::shared_ptr<const syntax::Signature> sig_;
    std::vector<model::FinModel> family_;
    Options opt_;
    bool partial_ = false;
    std::vector<Ctx> contexts_;
    std::map<Ctx, int> ctx_index_;
    std::vector<SubLattice> subs_;
    mutable std::vector<std::vector<int>> pc_cache_;  // per ctx: elem -> pc

    friend struct Saturator;
};

}  // namespace posmt::semcat
