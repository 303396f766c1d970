#include "doctest.h"

#include <random>
#include <set>

#include "oracles.hpp"
#include "posmt/semcat.hpp"

using namespace posmt;
using namespace posmt::semcat;
using posmt::model::FinModel;
using posmt::model::parse_model;
using posmt::syntax::parse_theory;

namespace {

// Independent route for the saturated lattice of a single model on one
// sort: enumerate all pe formula trees up to a depth bound over a bounded
// variable supply and collect the distinct values via the brute-force
// evaluator. Completely separate from the closure engine.
std::set<std::vector<std::uint64_t>> pe_values_bruteforce(const FinModel& m, int sort,
                                                          int depth) {
    using namespace posmt::syntax;
    const auto& sig = *m.sig;
    // variable supply: x0 (free), b1, b2 (bindable)
    std::vector<std::string> vars = {"x0", "b1", "b2"};
    std::set<std::vector<std::uint64_t>> values;
    VarContext outer = {{"x0", sort}};

    std::function<std::vector<FormulaPtr>(int, std::vector<std::string>)> gen =
        [&](int d, std::vector<std::string> scope) -> std::vector<FormulaPtr> {
        std::vector<FormulaPtr> out = {f_top(), f_bot()};
        // atomic over variables in scope (all of sort `sort` here)
        for (auto& v1 : scope) {
            for (std::size_t r = 0; r < sig.relations.size(); ++r) {
                if (sig.relations[r].arity.size() == 1 && sig.relations[r].arity[0] == sort)
                    out.push_back(f_rel(static_cast<int>(r), {t_var(v1, sort)}));
                if (sig.relations[r].arity.size() == 2 &&
                    sig.relations[r].arity[0] == sort && sig.relations[r].arity[1] == sort)
                    for (auto& v2 : scope)
                        out.push_back(f_rel(static_cast<int>(r),
                                            {t_var(v1, sort), t_var(v2, sort)}));
            }
            for (auto& v2 : scope)
                if (v1 < v2) out.push_back(f_eq(t_var(v1, sort), t_var(v2, sort)));
        }
        if (d == 0) return out;
        auto sub = gen(d - 1, scope);
        std::vector<FormulaPtr> comp = out;
        for (std::size_t i = 0; i < sub.size(); ++i)
            for (std::size_t j = 0; j < sub.size(); ++j) {
                comp.push_back(f_and(sub[i], sub[j]));
                comp.push_back(f_or(sub[i], sub[j]));
            }
        // existentials over the next unused bound variable
        for (auto& b : vars)
            if (std::find(scope.begin(), scope.end(), b) == scope.end()) {
                auto scope2 = scope;
                scope2.push_back(b);
                for (auto& g : gen(d - 1, scope2)) comp.push_back(f_exists(b, sort, g));
                break;
            }
        return comp;
    };

    for (auto& f : gen(depth, {"x0"})) {
        auto tuples = oracle::eval_bruteforce(m, f, outer);
        posmt::BitVec bv(m.carrier_size(sort));
        for (auto& t : tuples) bv.set(t[0]);
        values.insert(bv.words());
    }
    return values;
}

}  // namespace

TEST_CASE("saturate: one-element model with empty relations gives 2-element lattices") {
    auto th = parse_theory("sort A rel R : A A");
    auto m = parse_model("A = {u}\nR = {}\n", th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 1});
    REQUIRE(!C.partial());
    for (auto& ctx : C.contexts()) CHECK(C.sub(ctx).elems.size() == 2);
}

TEST_CASE("saturate: the {empty,{0},A} lattice, with {1} not definable") {
    auto th = parse_theory("sort A rel R : A");
    auto m = parse_model("A = {0,1}\nR = {0}\n", th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 1});
    REQUIRE(!C.partial());
    const auto& L = C.sub(Ctx{0});
    REQUIRE(L.elems.size() == 3);
    std::set<std::vector<std::uint64_t>> got;
    for (auto& d : L.elems) got.insert(d.comp[0].words());
    // independent enumeration of pe formulas of depth <= 3
    auto want = pe_values_bruteforce(m, 0, 3);
    CHECK(got == want);
    // {1} must be absent
    posmt::BitVec one(2);
    one.set(1);
    CHECK(!got.count(one.words()));
}

TEST_CASE("saturate: witnesses re-evaluate to their components (soundness)") {
    auto th = parse_theory("sort A sort B rel R : A B fun f : A -> B");
    auto m = parse_model("A = {0,1}\nB = {p,q}\nR = {(0,p)}\nf = {0 -> q, 1 -> p}\n", th.sig);
    auto n = parse_model("A = {0}\nB = {p}\nR = {(0,p)}\nf = {0 -> p}\n", th.sig);
    auto C = SemCat::saturate({m, n}, {.n_max = 2});
    REQUIRE(!C.partial());
    std::string why;
    CHECK_MESSAGE(C.verify_witnesses(&why), why);
}

TEST_CASE("saturate: fixpoint reached (no closure operator adds anything)") {
    auto th = parse_theory("sort A rel R : A A");
    auto m = parse_model("A = {0,1}\nR = {(0,1)}\n", th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 2});
    REQUIRE(!C.partial());
    std::string why;
    CHECK_MESSAGE(C.verify_fixpoint(&why), why);
    CHECK_MESSAGE(C.ev(0).verify_coherence(&why), why);
}

TEST_CASE("saturate: monotone in n_max on shared contexts") {
    auto th = parse_theory("sort A rel R : A A");
    auto m = parse_model("A = {0,1,2}\nR = {(0,1),(1,2)}\n", th.sig);
    auto C1 = SemCat::saturate({m}, {.n_max = 1});
    auto C2 = SemCat::saturate({m}, {.n_max = 2});
    REQUIRE(!C1.partial());
    REQUIRE(!C2.partial());
    for (auto& ctx : C1.contexts()) {
        const auto& small = C1.sub(ctx);
        const auto& big = C2.sub(ctx);
        for (auto& d : small.elems) CHECK(big.find(d.comp) >= 0);
    }
}

TEST_CASE("saturate: homomorphism compatibility of def-sets") {
    auto th = parse_theory("sort A rel R : A A");
    auto m = parse_model("A = {0,1}\nR = {(0,1)}\n", th.sig);
    auto n = parse_model("A = {0,1,2}\nR = {(0,1),(1,2),(2,2)}\n", th.sig);
    auto C = SemCat::saturate({m, n}, {.n_max = 2});
    REQUIRE(!C.partial());
    auto homs = model::enumerate_homomorphisms(m, n, 200);
    for (auto& h : homs.homs) {
        for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
            const auto& ctx = C.contexts()[cid];
            auto sm = C.space(0, cid);
            auto sn = C.space(1, cid);
            for (auto& d : C.sub(cid).elems) {
                d.comp[0].for_each_set([&](std::size_t idx) {
                    auto t = sm.decode(static_cast<long long>(idx));
                    std::vector<int> mt(t.size());
                    for (std::size_t i = 0; i < t.size(); ++i) mt[i] = h.map[ctx[i]][t[i]];
                    REQUIRE(d.comp[1].test(sn.encode(mt)));
                });
            }
        }
    }
}

TEST_CASE("sub lattice: empty context sizes and distributivity") {
    auto th = parse_theory("sort A rel R : A");
    // one model: sentence lattice = 2
    auto m = parse_model("A = {0}\nR = {0}\n", th.sig);
    auto C1 = SemCat::saturate({m}, {.n_max = 1});
    CHECK(C1.sub(Ctx{}).elems.size() == 2);
    CHECK(C1.is_two_valued());

    // two models disagreeing on the pe sentence (exists x. R(x))
    auto n = parse_model("A = {0}\nR = {}\n", th.sig);
    auto C2 = SemCat::saturate({m, n}, {.n_max = 1});
    CHECK(C2.sub(Ctx{}).elems.size() >= 3);
    CHECK(!C2.is_two_valued());

    // isomorphic pair stays two-valued
    auto m2 = parse_model("A = {z}\nR = {z}\n", th.sig);
    auto C3 = SemCat::saturate({m, m2}, {.n_max = 1});
    CHECK(C3.is_two_valued());

    // every context lattice passes the distributivity validator
    for (auto& ctx : C2.contexts()) CHECK_NOTHROW(C2.sub_as_dlat(C2.ctx_index(ctx)));
}

TEST_CASE("image_keep: frozen projection examples and brute-force agreement") {
    auto th = parse_theory("sort A rel R : A A");
    auto m = parse_model("A = {0,1}\nR = {(0,1)}\n", th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 2});
    int aa = C.ctx_index(Ctx{0, 0});
    const auto& L = C.sub(aa);

    // project top of [A,A] to [A] -> top (nonempty carriers)
    auto [pc1, pe1] = C.image_keep(aa, L.top, {0});
    CHECK(pe1 == C.sub(pc1).top);

    // project the diagonal to [A] -> top
    int diag = -1;
    for (std::size_t i = 0; i < L.elems.size(); ++i)
        if (L.elems[i].comp[0].count() == 2 && L.elems[i].comp[0].test(0) &&
            L.elems[i].comp[0].test(3))
            diag = static_cast<int>(i);
    REQUIRE(diag >= 0);
    auto [pc2, pe2] = C.image_keep(aa, diag, {0});
    CHECK(pe2 == C.sub(pc2).top);

    // arbitrary def-sets: image equals the direct set projection (both axes)
    for (auto keep : std::vector<std::vector<int>>{{0}, {1}}) {
        for (std::size_t i = 0; i < L.elems.size(); ++i) {
            auto [pcid, pelem] = C.image_keep(aa, static_cast<int>(i), keep);
            REQUIRE(pelem >= 0);
            // brute force: decode tuples, project, re-encode
            posmt::BitVec want(2);
            L.elems[i].comp[0].for_each_set([&](std::size_t idx) {
                auto t = C.space(0, aa).decode(static_cast<long long>(idx));
                want.set(t[keep[0]]);
            });
            CHECK(C.sub(pcid).elems[pelem].comp[0] == want);
        }
    }
}

TEST_CASE("is_weakly_boolean: powerset yes; {empty,{0},A} no with (A,{0})") {
    auto th = parse_theory("sort A rel R : A rel S : A");
    auto m = parse_model("A = {0,1}\nR = {0}\nS = {1}\n", th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 2});
    REQUIRE(!C.partial());
    CHECK(C.is_weakly_boolean().yes);

    auto th2 = parse_theory("sort A rel R : A");
    auto m2 = parse_model("A = {0,1}\nR = {0}\n", th2.sig);
    auto C2 = SemCat::saturate({m2}, {.n_max = 1});
    auto wb = C2.is_weakly_boolean();
    REQUIRE(!wb.yes);
    CHECK(wb.ctx == Ctx{0});
    // counterexample pair is (A, {0})
    const auto& L = C2.sub(wb.ctx);
    CHECK(L.elems[wb.a].comp[0].count() == 2);
    CHECK(L.elems[wb.b].comp[0].count() == 1);
    CHECK(L.elems[wb.b].comp[0].test(0));
}

TEST_CASE("atom_subobjects: frozen examples") {
    // powerset: atoms are the singletons
    auto th = parse_theory("sort A rel R : A rel S : A");
    auto m = parse_model("A = {0,1}\nR = {0}\nS = {1}\n", th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 1});
    int a0 = C.ctx_index(Ctx{0});
    auto atoms = C.atom_subobjects(a0);
    REQUIRE(atoms.size() == 2);
    for (int a : atoms) CHECK(C.sub(a0).elems[a].comp[0].count() == 1);

    // {empty,{0},A}: only {0} is an atom (A is not: {0} sits below it)
    auto th2 = parse_theory("sort A rel R : A");
    auto m2 = parse_model("A = {0,1}\nR = {0}\n", th2.sig);
    auto C2 = SemCat::saturate({m2}, {.n_max = 1});
    auto atoms2 = C2.atom_subobjects(C2.ctx_index(Ctx{0}));
    REQUIRE(atoms2.size() == 1);
    CHECK(C2.sub(C2.ctx_index(Ctx{0})).elems[atoms2[0]].comp[0].count() == 1);

    // 2-element lattice: the top is the unique atom
    auto m3 = parse_model("A = {0,1}\nR = {}\n", th2.sig);
    auto C3 = SemCat::saturate({m3}, {.n_max = 1});
    auto atoms3 = C3.atom_subobjects(C3.ctx_index(Ctx{0}));
    REQUIRE(atoms3.size() == 1);
    CHECK(atoms3[0] == C3.sub(C3.ctx_index(Ctx{0})).top);
}

TEST_CASE("saturate: cutoff produces the partial flag") {
    auto th = parse_theory("sort A rel R : A rel S : A rel T : A A");
    auto m = parse_model("A = {0,1,2,3}\nR = {0,1}\nS = {1,2}\nT = {(0,1),(2,3),(3,0)}\n",
                         th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 2, .max_lattice = 6});
    CHECK(C.partial());
}

TEST_CASE("empty carriers: context lattices collapse, no crashes") {
    auto th = parse_theory("sort A sort B rel R : A B");
    auto m = parse_model("A = {0}\nB = {}\nR = {}\n", th.sig);
    auto C = SemCat::saturate({m}, {.n_max = 2});
    REQUIRE(!C.partial());
    // any context involving B has an empty product: top == bot
    int bid = C.ctx_index(Ctx{1});
    CHECK(C.sub(bid).elems.size() == 1);
    // sentence lattice is still 2 (the empty context has one point)
    CHECK(C.sub(Ctx{}).elems.size() == 2);
    std::string why;
    CHECK_MESSAGE(C.verify_witnesses(&why), why);
}
