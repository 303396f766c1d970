#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "posmt/model.hpp"
#include "posmt/syntax.hpp"

using namespace posmt;
using namespace posmt::model;
using namespace posmt::syntax;

namespace {

Theory toy() { return parse_theory("sort A rel R : A A"); }

FinModel toy_model(const Theory& th, const std::string& text) {
    return parse_model(text, th.sig);
}

std::set<std::vector<int>> bits_to_tuples(const BitVec& bv, const TupleSpace& ts) {
    std::set<std::vector<int>> out;
    bv.for_each_set([&](std::size_t i) { out.insert(ts.decode(static_cast<long long>(i))); });
    return out;
}

}  // namespace

TEST_CASE("parse_model: basic forms and error cases") {
    auto th = toy();
    auto m = toy_model(th, "A = {0,1}\nR = {(0,1)}\n");
    CHECK(m.carrier_size(0) == 2);
    CHECK(m.relations[0].size() == 1);

    // totality error: function table missing an input
    auto th2 = parse_theory("sort A fun f : A -> A");
    CHECK_THROWS_WITH_AS(parse_model("A = {0,1}\nf = {0 -> 1}\n", th2.sig),
                         doctest::Contains("not total"), std::invalid_argument);

    // constant into empty carrier
    auto th3 = parse_theory("sort A fun c : -> A");
    CHECK_THROWS_WITH_AS(parse_model("A = {}\n", th3.sig),
                         doctest::Contains("constant c into empty carrier"),
                         std::invalid_argument);

    // element outside carrier
    CHECK_THROWS_AS(toy_model(th, "A = {0}\nR = {(0,1)}\n"), ParseError);
    // arity mismatch
    CHECK_THROWS_AS(toy_model(th, "A = {0,1}\nR = {(0,1,0)}\n"), ParseError);
}

TEST_CASE("print_model round-trips") {
    auto th = parse_theory("sort A sort B rel R : A B fun f : A -> B fun c : -> A");
    auto m = parse_model("A = {a0, a1}\nB = {b0}\nR = {(a0, b0)}\nf = {a0 -> b0, a1 -> b0}\nc = a1\n",
                         th.sig);
    auto m2 = parse_model(print_model(m), th.sig);
    CHECK(m2.carriers == m.carriers);
    CHECK(m2.relations == m.relations);
    CHECK(m2.functions == m.functions);
}

TEST_CASE("eval_formula: frozen examples") {
    auto th = toy();
    auto m = toy_model(th, "A = {0,1,2}\nR = {}\n");
    VarContext ctx = {{"x", 0}};
    CHECK(eval_formula(m, f_top(), ctx).count() == 3);

    auto m2 = toy_model(th, "A = {0,1}\nR = {(0,1)}\n");
    auto f = parse_formula(*th.sig, ctx, "exists y:A . R(x,y)");
    BitVec got = eval_formula(m2, f, ctx);
    CHECK(got.count() == 1);
    CHECK(got.test(0));
    CHECK(!got.test(1));
}

TEST_CASE("eval_formula: empty carrier, exists over empty sort is empty") {
    auto th = parse_theory("sort A sort B rel R : A B");
    auto m = parse_model("A = {0}\nB = {}\nR = {}\n", th.sig);
    VarContext ctx = {{"x", 0}};
    auto f = parse_formula(*th.sig, ctx, "exists y:B . R(x,y)");
    CHECK(eval_formula(m, f, ctx).none());
    // empty context evaluates over the one-point space
    CHECK(eval_formula(m, f_top(), {}).count() == 1);
}

TEST_CASE("eval_formula agrees with the assignment-enumeration oracle") {
    auto th = parse_theory("sort A sort B rel R : A B rel S : A fun f : A -> B");
    std::mt19937_64 rng(555);
    int cases = 0;
    while (cases < 500) {
        // random small model
        int ka = 1 + static_cast<int>(rng() % 3), kb = 1 + static_cast<int>(rng() % 3);
        FinModel m;
        m.sig = th.sig;
        m.carriers = {{}, {}};
        for (int i = 0; i < ka; ++i) m.carriers[0].push_back("a" + std::to_string(i));
        for (int i = 0; i < kb; ++i) m.carriers[1].push_back("b" + std::to_string(i));
        m.relations.assign(2, {});
        for (int a = 0; a < ka; ++a)
            for (int b = 0; b < kb; ++b)
                if (rng() % 2) m.relations[0].insert({a, b});
        for (int a = 0; a < ka; ++a)
            if (rng() % 2) m.relations[1].insert({a});
        m.functions.assign(1, std::vector<int>(ka));
        for (int a = 0; a < ka; ++a) m.functions[0][a] = static_cast<int>(rng() % kb);

        VarContext ctx = {{"x", 0}, {"y", 1}};
        int fresh = 0;
        auto f = oracle::random_formula(*th.sig, ctx, rng, 4, &fresh);
        check_formula(*th.sig, ctx, f);
        BitVec got = eval_formula(m, f, ctx);
        auto want = oracle::eval_bruteforce(m, f, ctx);
        auto ts = m.context_space({0, 1});
        REQUIRE(bits_to_tuples(got, ts) == want);
        ++cases;
    }
    CHECK(cases == 500);
}

TEST_CASE("check_sequent: frozen examples") {
    auto th = toy();
    auto m = toy_model(th, "A = {0,1}\nR = {(0,1)}\n");
    Sequent triv;
    triv.lhs = f_top();
    triv.rhs = f_top();
    CHECK(check_sequent(m, triv).holds);

    auto th2 = parse_theory("sort A rel R : A A axiom (x:A, y:A) R(x,y) => x = y");
    auto m2 = parse_model("A = {0,1}\nR = {(0,1)}\n", th2.sig);
    auto res = check_sequent(m2, th2.axioms[0]);
    CHECK(!res.holds);
    CHECK(res.witness == std::vector<int>{0, 1});

    // a model built to satisfy the axioms of its theory
    auto th3 = parse_theory(
        "sort A rel R : A A axiom (x:A) true => exists y:A . R(x,y)");
    auto m3 = parse_model("A = {0,1}\nR = {(0,0), (1,0)}\n", th3.sig);
    CHECK(check_sequent(m3, th3.axioms[0]).holds);
}

TEST_CASE("model_product: sizes, unit, eval compatibility") {
    auto th = toy();
    auto m = toy_model(th, "A = {0,1}\nR = {(0,1)}\n");
    auto n = toy_model(th, "A = {0,1,2}\nR = {(0,0),(1,2)}\n");
    auto p = model_product(m, n);
    CHECK(p.carrier_size(0) == 6);

    // product with the one-point all-full model is isomorphic to m
    auto unit = toy_model(th, "A = {u}\nR = {(u,u)}\n");
    auto pu = model_product(m, unit);
    CHECK(pu.carrier_size(0) == m.carrier_size(0));
    CHECK(pu.relations[0].size() == m.relations[0].size());

    // eval in the product = product of evals for the regular fragment
    // (=, relations, true, &, exists); disjunction does not commute with
    // products, see the negative control below
    std::mt19937_64 rng(77);
    VarContext ctx = {{"x", 0}, {"y", 0}};
    auto tsp = p.context_space({0, 0});
    auto tsm = m.context_space({0, 0});
    auto tsn = n.context_space({0, 0});
    for (int i = 0; i < 60; ++i) {
        int fresh = 0;
        auto f = oracle::random_formula(*th.sig, ctx, rng, 3, &fresh, /*regular_only=*/true);
        BitVec em = eval_formula(m, f, ctx);
        BitVec en = eval_formula(n, f, ctx);
        BitVec ep = eval_formula(p, f, ctx);
        // p's element k of sort A encodes the pair (k / |A_n|, k % |A_n|)
        for (long long ip = 0; ip < tsp.total; ++ip) {
            auto tp_ = tsp.decode(ip);
            std::vector<int> am = {tp_[0] / 3, tp_[1] / 3};
            std::vector<int> an = {tp_[0] % 3, tp_[1] % 3};
            bool want = em.test(tsm.encode(am)) && en.test(tsn.encode(an));
            REQUIRE(ep.test(ip) == want);
        }
    }
}

TEST_CASE("model_product: disjunction does not commute with products") {
    // M satisfies R everywhere and S nowhere, N the other way around; then
    // R(x) | S(x) holds everywhere in both factors but nowhere in the
    // product. Recorded as the boundary of the compatibility property.
    auto th = parse_theory("sort A rel R : A rel S : A");
    auto m = parse_model("A = {0}\nR = {0}\nS = {}\n", th.sig);
    auto n = parse_model("A = {0}\nR = {}\nS = {0}\n", th.sig);
    auto p = model_product(m, n);
    VarContext ctx = {{"x", 0}};
    auto f = parse_formula(*th.sig, ctx, "R(x) | S(x)");
    CHECK(eval_formula(m, f, ctx).count() == 1);
    CHECK(eval_formula(n, f, ctx).count() == 1);
    CHECK(eval_formula(p, f, ctx).none());
}

TEST_CASE("enumerate_homomorphisms: frozen counts and oracle agreement") {
    // one-element full model: exactly the identity
    auto th = toy();
    auto one = toy_model(th, "A = {u}\nR = {(u,u)}\n");
    auto e1 = enumerate_homomorphisms(one, one, 100);
    CHECK(e1.homs.size() == 1);

    // no structure: all maps; |A_src|=2, |A_dst|=3 -> 9
    auto thfree = parse_theory("sort A");
    auto f2 = parse_model("A = {0,1}\n", thfree.sig);
    auto f3 = parse_model("A = {0,1,2}\n", thfree.sig);
    CHECK(enumerate_homomorphisms(f2, f3, 100).homs.size() == 9);

    // discrete-order vs chain encodings: count matches the brute-force filter
    auto thord = parse_theory("sort A rel L : A A");
    auto disc = parse_model("A = {0,1}\nL = {(0,0),(1,1)}\n", thord.sig);
    auto chain = parse_model("A = {0,1,2}\nL = {(0,0),(1,1),(2,2),(0,1),(1,2),(0,2)}\n",
                             thord.sig);
    auto got = enumerate_homomorphisms(disc, chain, 1000);
    // oracle: filter all 3^2 map families
    int want = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Homomorphism h;
            h.map = {{a, b}};
            if (is_homomorphism(disc, chain, h)) ++want;
        }
    CHECK(static_cast<int>(got.homs.size()) == want);
    for (auto& h : got.homs) CHECK(is_homomorphism(disc, chain, h));

    // truncation flag
    auto cap = enumerate_homomorphisms(f2, f3, 4);
    CHECK(cap.truncated);
    CHECK(cap.homs.size() == 4);
}

TEST_CASE("homomorphisms preserve pe formulas") {
    auto th = parse_theory("sort A rel R : A A fun f : A -> A");
    auto src = parse_model("A = {0,1}\nR = {(0,1)}\nf = {0 -> 1, 1 -> 0}\n", th.sig);
    auto dst = parse_model("A = {0,1,2}\nR = {(0,1),(1,0),(2,2)}\nf = {0 -> 1, 1 -> 0, 2 -> 2}\n",
                           th.sig);
    auto homs = enumerate_homomorphisms(src, dst, 1000);
    std::mt19937_64 rng(99);
    VarContext ctx = {{"x", 0}};
    for (int i = 0; i < 40; ++i) {
        int fresh = 0;
        auto f = oracle::random_formula(*th.sig, ctx, rng, 3, &fresh);
        BitVec es = eval_formula(src, f, ctx);
        BitVec ed = eval_formula(dst, f, ctx);
        for (auto& h : homs.homs)
            es.for_each_set([&](std::size_t a) { REQUIRE(ed.test(h.map[0][a])); });
    }
}
