#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace posmt::syntax {

struct SrcPos {
    int line = 0, col = 0;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& file, SrcPos p, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(p.line) + ":" + std::to_string(p.col) +
                             ": " + msg),
          pos(p) {}
    SrcPos pos;
};

struct Signature {
    struct Rel {
        std::string name;
        std::vector<int> arity;  // sort indices, nonempty
    };
    struct Fun {
        std::string name;
        std::vector<int> dom;  // may be empty (constant)
        int cod = -1;
    };
    std::vector<std::string> sorts;
    std::vector<Rel> relations;
    std::vector<Fun> functions;

    int sort_index(const std::string& s) const;
    int rel_index(const std::string& s) const;
    int fun_index(const std::string& s) const;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    // variable when fun < 0; otherwise application of functions[fun]
    std::string var;
    int var_sort = -1;
    int fun = -1;
    std::vector<TermPtr> args;

    bool is_var() const { return fun < 0; }
};

TermPtr t_var(std::string name, int sort);
TermPtr t_app(int fun, std::vector<TermPtr> args);

// sort of a term under a signature
int term_sort(const Signature& sig, const TermPtr& t);

enum class FKind { Top, Bot, Eq, Rel, And, Or, Exists };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Positive-existential ASTs only: the constructor set is closed by
// construction, there is no way to form negation, implication or a
// universal quantifier.
struct Formula {
    FKind kind;
    // Eq
    TermPtr lhs, rhs;
    // Rel
    int rel = -1;
    std::vector<TermPtr> args;
    // And / Or
    FormulaPtr a, b;
    // Exists
    std::string var;
    int var_sort = -1;
    FormulaPtr body;
};

FormulaPtr f_top();
FormulaPtr f_bot();
FormulaPtr f_eq(TermPtr l, TermPtr r);
FormulaPtr f_rel(int rel, std::vector<TermPtr> args);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string var, int sort, FormulaPtr body);

using VarContext = std::vector<std::pair<std::string, int>>;  // (name, sort)

struct Sequent {
    VarContext context;
    FormulaPtr lhs, rhs;
};

struct Theory {
    std::shared_ptr<const Signature> sig;
    std::vector<Sequent> axioms;
};

// Occurrence-ordered, duplicate-free unbound variables with sorts.
VarContext free_vars(const FormulaPtr& f);

// Well-formedness: every free variable is in ctx with the right sort, terms
// well-sorted, no shadowing inside Exists. Throws std::invalid_argument.
void check_formula(const Signature& sig, const VarContext& ctx, const FormulaPtr& f);

// Capture-avoiding renaming of free variables; bound variables are freshened
// on collision. Used when transporting witness formulas between contexts.
FormulaPtr rename_free_vars(const FormulaPtr& f,
                            const std::vector<std::pair<std::string, std::string>>& map);

// Canonical printer; parse(print(ast)) == ast.
std::string print_term(const Signature& sig, const TermPtr& t);
std::string print_formula(const Signature& sig, const FormulaPtr& f);
std::string print_sequent(const Signature& sig, const Sequent& s);
std::string print_theory(const Theory& th);

// Theory DSL:
//   sort A
//   rel R : A A
//   fun f : A A -> B        (constant: fun c : -> B)
//   axiom (x:A, y:B) phi => psi
// Formulas: true, false, t1 = t2, R(t,..), f & g, f | g ('|' binds looser),
// exists v:S . body (body extends maximally right), parentheses.
// '#' starts a comment.
Theory parse_theory(const std::string& text, const std::string& filename = "<input>");

// parses a formula in a given context (test/tooling convenience)
FormulaPtr parse_formula(const Signature& sig, const VarContext& ctx, const std::string& text);

// structural equality of ASTs (used by the round-trip property)
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

}  // namespace posmt::syntax
