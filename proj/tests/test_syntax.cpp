#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "posmt/syntax.hpp"

using namespace posmt::syntax;

TEST_CASE("parse_theory: one-line theory") {
    auto th = parse_theory("sort A  rel R : A A  axiom (x:A) true => exists y:A . R(x,y)");
    CHECK(th.sig->sorts.size() == 1);
    CHECK(th.sig->relations.size() == 1);
    REQUIRE(th.axioms.size() == 1);
    CHECK(th.axioms[0].context.size() == 1);
    CHECK(th.axioms[0].lhs->kind == FKind::Top);
    CHECK(th.axioms[0].rhs->kind == FKind::Exists);
}

TEST_CASE("parse_theory: arity error carries a position") {
    try {
        parse_theory("sort A\nrel R : A A\naxiom (x:A) R(x) => true\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.pos.line == 3);
        CHECK(std::string(e.what()).find("expects 2 arguments") != std::string::npos);
    }
}

TEST_CASE("parse_theory: canonical-signature encoding of a 3-chain poset") {
    const char* text =
        "sort P0\nsort P1\nsort P2\n"
        "fun f01 : P0 -> P1\n"
        "fun f12 : P1 -> P2\n"
        "axiom (x:P0, y:P0) f01(x) = f01(y) => x = y\n"
        "axiom (x:P1, y:P1) f12(x) = f12(y) => x = y\n";
    auto th = parse_theory(text);
    CHECK(th.sig->sorts.size() == 3);
    CHECK(th.sig->functions.size() == 2);
    CHECK(th.axioms.size() == 2);
}

TEST_CASE("parse errors: unknown symbol, shadowing, sort mismatch") {
    CHECK_THROWS_AS(parse_theory("sort A axiom (x:A) S(x) => true"), ParseError);
    CHECK_THROWS_AS(
        parse_theory("sort A rel R : A axiom (x:A) (exists x:A . R(x)) => true"), ParseError);
    CHECK_THROWS_AS(parse_theory("sort A sort B axiom (x:A, y:B) x = y => true"), ParseError);
    CHECK_THROWS_AS(parse_theory("sort A rel R : "), ParseError);
    // constants parse both bare and applied
    auto th = parse_theory("sort A fun c : -> A axiom (x:A) x = c => x = c()");
    CHECK(th.axioms.size() == 1);
}

TEST_CASE("free_vars: frozen examples") {
    auto th = parse_theory("sort A rel R : A A");
    const auto& sig = *th.sig;
    VarContext ctx = {{"x", 0}, {"y", 0}, {"z", 0}};
    auto f1 = parse_formula(sig, ctx, "exists w:A . R(x,w)");
    auto fv1 = free_vars(f1);
    REQUIRE(fv1.size() == 1);
    CHECK(fv1[0].first == "x");

    CHECK(free_vars(parse_formula(sig, ctx, "true")).empty());

    auto f3 = parse_formula(sig, ctx, "R(x,y) & x = z");
    auto fv3 = free_vars(f3);
    REQUIRE(fv3.size() == 3);
    CHECK(fv3[0].first == "x");
    CHECK(fv3[1].first == "y");
    CHECK(fv3[2].first == "z");
    CHECK(fv3[2].second == 0);
}

TEST_CASE("operator precedence: | binds looser than &, exists body maximal") {
    auto th = parse_theory("sort A rel R : A rel S : A rel T : A");
    const auto& sig = *th.sig;
    VarContext ctx = {{"x", 0}};
    auto f = parse_formula(sig, ctx, "R(x) | S(x) & T(x)");
    REQUIRE(f->kind == FKind::Or);
    CHECK(f->b->kind == FKind::And);

    auto g = parse_formula(sig, ctx, "exists y:A . R(y) | S(y)");
    REQUIRE(g->kind == FKind::Exists);
    CHECK(g->body->kind == FKind::Or);

    auto h = parse_formula(sig, ctx, "(exists y:A . R(y)) | S(x)");
    CHECK(h->kind == FKind::Or);
}

TEST_CASE("round-trip: parse(print(ast)) == ast on random formulas") {
    auto th = parse_theory("sort A sort B rel R : A B rel S : A fun f : A -> B fun c : -> A");
    const auto& sig = *th.sig;
    std::mt19937_64 rng(2024);
    int ok = 0;
    for (int i = 0; i < 300; ++i) {
        VarContext ctx = {{"x", 0}, {"y", 1}};
        int fresh = 0;
        auto f = oracle::random_formula(sig, ctx, rng, 3, &fresh);
        check_formula(sig, ctx, f);
        std::string printed = print_formula(sig, f);
        auto g = parse_formula(sig, ctx, printed);
        REQUIRE(formula_equal(f, g));
        ++ok;
    }
    CHECK(ok == 300);
}

TEST_CASE("round-trip: whole theory through the canonical printer") {
    const char* text =
        "sort A\nsort B\nrel R : A B\nfun f : A -> B\nfun c : -> A\n"
        "axiom (x:A) R(x, f(x)) => exists y:B . R(x,y)\n"
        "axiom () true => exists z:A . z = c\n";
    auto th = parse_theory(text);
    auto printed = print_theory(th);
    auto th2 = parse_theory(printed);
    CHECK(print_theory(th2) == printed);
    REQUIRE(th2.axioms.size() == th.axioms.size());
    for (std::size_t i = 0; i < th.axioms.size(); ++i) {
        CHECK(formula_equal(th.axioms[i].lhs, th2.axioms[i].lhs));
        CHECK(formula_equal(th.axioms[i].rhs, th2.axioms[i].rhs));
    }
}

TEST_CASE("rename_free_vars avoids capture") {
    auto th = parse_theory("sort A rel R : A A");
    const auto& sig = *th.sig;
    // exists w:A . R(x, w), built directly (the parser forbids shadowing,
    // the renamer must still behave on any well-formed AST)
    auto f = f_exists("w", 0, f_rel(0, {t_var("x", 0), t_var("w", 0)}));
    // renaming x -> w must freshen the binder rather than capture
    auto g = rename_free_vars(f, {{"x", "w"}});
    VarContext ctx2 = {{"w", 0}};
    check_formula(sig, ctx2, g);
    auto fv = free_vars(g);
    REQUIRE(fv.size() == 1);
    CHECK(fv[0].first == "w");
    REQUIRE(g->kind == FKind::Exists);
    CHECK(g->var != "w");
}
