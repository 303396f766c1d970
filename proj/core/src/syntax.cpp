#include "posmt/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace posmt::syntax {

int Signature::sort_index(const std::string& s) const {
    for (std::size_t i = 0; i < sorts.size(); ++i)
        if (sorts[i] == s) return static_cast<int>(i);
    return -1;
}
int Signature::rel_index(const std::string& s) const {
    for (std::size_t i = 0; i < relations.size(); ++i)
        if (relations[i].name == s) return static_cast<int>(i);
    return -1;
}
int Signature::fun_index(const std::string& s) const {
    for (std::size_t i = 0; i < functions.size(); ++i)
        if (functions[i].name == s) return static_cast<int>(i);
    return -1;
}

TermPtr t_var(std::string name, int sort) {
    auto t = std::make_shared<Term>();
    t->var = std::move(name);
    t->var_sort = sort;
    return t;
}
TermPtr t_app(int fun, std::vector<TermPtr> args) {
    auto t = std::make_shared<Term>();
    t->fun = fun;
    t->args = std::move(args);
    return t;
}

int term_sort(const Signature& sig, const TermPtr& t) {
    return t->is_var() ? t->var_sort : sig.functions[t->fun].cod;
}

FormulaPtr f_top() {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Top;
    return f;
}
FormulaPtr f_bot() {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Bot;
    return f;
}
FormulaPtr f_eq(TermPtr l, TermPtr r) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Eq;
    f->lhs = std::move(l);
    f->rhs = std::move(r);
    return f;
}
FormulaPtr f_rel(int rel, std::vector<TermPtr> args) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Rel;
    f->rel = rel;
    f->args = std::move(args);
    return f;
}
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::And;
    f->a = std::move(a);
    f->b = std::move(b);
    return f;
}
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Or;
    f->a = std::move(a);
    f->b = std::move(b);
    return f;
}
FormulaPtr f_exists(std::string var, int sort, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = FKind::Exists;
    f->var = std::move(var);
    f->var_sort = sort;
    f->body = std::move(body);
    return f;
}

namespace {

void collect_free_term(const TermPtr& t, const std::set<std::string>& bound, VarContext& out) {
    if (t->is_var()) {
        if (!bound.count(t->var)) {
            for (auto& [n, s] : out)
                if (n == t->var) return;
            out.emplace_back(t->var, t->var_sort);
        }
        return;
    }
    for (auto& a : t->args) collect_free_term(a, bound, out);
}

void collect_free(const FormulaPtr& f, std::set<std::string>& bound, VarContext& out) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bot:
            return;
        case FKind::Eq:
            collect_free_term(f->lhs, bound, out);
            collect_free_term(f->rhs, bound, out);
            return;
        case FKind::Rel:
            for (auto& t : f->args) collect_free_term(t, bound, out);
            return;
        case FKind::And:
        case FKind::Or:
            collect_free(f->a, bound, out);
            collect_free(f->b, bound, out);
            return;
        case FKind::Exists: {
            bool inserted = bound.insert(f->var).second;
            collect_free(f->body, bound, out);
            if (inserted) bound.erase(f->var);
            return;
        }
    }
}

}  // namespace

VarContext free_vars(const FormulaPtr& f) {
    VarContext out;
    std::set<std::string> bound;
    collect_free(f, bound, out);
    return out;
}

namespace {

void check_term(const Signature& sig, const VarContext& ctx, const TermPtr& t) {
    if (t->is_var()) {
        for (auto& [n, s] : ctx)
            if (n == t->var) {
                if (s != t->var_sort)
                    throw std::invalid_argument("variable " + t->var + " has wrong sort");
                return;
            }
        throw std::invalid_argument("unbound variable " + t->var);
    }
    const auto& fn = sig.functions.at(t->fun);
    if (fn.dom.size() != t->args.size())
        throw std::invalid_argument("function " + fn.name + " arity mismatch");
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        check_term(sig, ctx, t->args[i]);
        if (term_sort(sig, t->args[i]) != fn.dom[i])
            throw std::invalid_argument("function " + fn.name + " argument sort mismatch");
    }
}

}  // namespace

void check_formula(const Signature& sig, const VarContext& ctx, const FormulaPtr& f) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bot:
            return;
        case FKind::Eq:
            check_term(sig, ctx, f->lhs);
            check_term(sig, ctx, f->rhs);
            if (term_sort(sig, f->lhs) != term_sort(sig, f->rhs))
                throw std::invalid_argument("equality between different sorts");
            return;
        case FKind::Rel: {
            const auto& r = sig.relations.at(f->rel);
            if (r.arity.size() != f->args.size())
                throw std::invalid_argument("relation " + r.name + " arity mismatch");
            for (std::size_t i = 0; i < f->args.size(); ++i) {
                check_term(sig, ctx, f->args[i]);
                if (term_sort(sig, f->args[i]) != r.arity[i])
                    throw std::invalid_argument("relation " + r.name + " argument sort mismatch");
            }
            return;
        }
        case FKind::And:
        case FKind::Or:
            check_formula(sig, ctx, f->a);
            check_formula(sig, ctx, f->b);
            return;
        case FKind::Exists: {
            for (auto& [n, s] : ctx)
                if (n == f->var)
                    throw std::invalid_argument("shadowing of variable " + f->var +
                                                " inside exists");
            VarContext ctx2 = ctx;
            ctx2.emplace_back(f->var, f->var_sort);
            check_formula(sig, ctx2, f->body);
            return;
        }
    }
}

namespace {

void collect_names_term(const TermPtr& t, std::set<std::string>& out) {
    if (t->is_var()) {
        out.insert(t->var);
        return;
    }
    for (auto& a : t->args) collect_names_term(a, out);
}
void collect_names(const FormulaPtr& f, std::set<std::string>& out) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bot:
            return;
        case FKind::Eq:
            collect_names_term(f->lhs, out);
            collect_names_term(f->rhs, out);
            return;
        case FKind::Rel:
            for (auto& t : f->args) collect_names_term(t, out);
            return;
        case FKind::And:
        case FKind::Or:
            collect_names(f->a, out);
            collect_names(f->b, out);
            return;
        case FKind::Exists:
            out.insert(f->var);
            collect_names(f->body, out);
            return;
    }
}

TermPtr rename_term(const TermPtr& t, const std::map<std::string, std::string>& m) {
    if (t->is_var()) {
        auto it = m.find(t->var);
        return it == m.end() ? t : t_var(it->second, t->var_sort);
    }
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    for (auto& a : t->args) args.push_back(rename_term(a, m));
    return t_app(t->fun, std::move(args));
}

FormulaPtr rename_rec(const FormulaPtr& f, std::map<std::string, std::string> m,
                      std::set<std::string>& avoid) {
    switch (f->kind) {
        case FKind::Top:
        case FKind::Bot:
            return f;
        case FKind::Eq:
            return f_eq(rename_term(f->lhs, m), rename_term(f->rhs, m));
        case FKind::Rel: {
            std::vector<TermPtr> args;
            for (auto& t : f->args) args.push_back(rename_term(t, m));
            return f_rel(f->rel, std::move(args));
        }
        case FKind::And:
            return f_and(rename_rec(f->a, m, avoid), rename_rec(f->b, m, avoid));
        case FKind::Or:
            return f_or(rename_rec(f->a, m, avoid), rename_rec(f->b, m, avoid));
        case FKind::Exists: {
            std::string v = f->var;
            if (avoid.count(v)) {  // bound name collides with a rename target
                int k = 0;
                while (avoid.count(v + "_" + std::to_string(k))) ++k;
                std::string fresh = v + "_" + std::to_string(k);
                avoid.insert(fresh);
                m[f->var] = fresh;
                v = fresh;
            } else {
                m.erase(f->var);
                avoid.insert(v);
            }
            return f_exists(v, f->var_sort, rename_rec(f->body, m, avoid));
        }
    }
    return f;
}

}  // namespace

FormulaPtr rename_free_vars(const FormulaPtr& f,
                            const std::vector<std::pair<std::string, std::string>>& map) {
    std::map<std::string, std::string> m(map.begin(), map.end());
    std::set<std::string> avoid;
    collect_names(f, avoid);
    for (auto& [from, to] : map) avoid.insert(to);
    return rename_rec(f, std::move(m), avoid);
}

// ---------------------------------------------------------------- printing

std::string print_term(const Signature& sig, const TermPtr& t) {
    if (t->is_var()) return t->var;
    std::string s = sig.functions[t->fun].name + "(";
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) s += ", ";
        s += print_term(sig, t->args[i]);
    }
    return s + ")";
}

namespace {

// levels: 0 = or, 1 = and, 2 = atom
std::string pr(const Signature& sig, const FormulaPtr& f, int level) {
    auto wrap = [&](const std::string& s, bool need) { return need ? "(" + s + ")" : s; };
    switch (f->kind) {
        case FKind::Top:
            return "true";
        case FKind::Bot:
            return "false";
        case FKind::Eq:
            return print_term(sig, f->lhs) + " = " + print_term(sig, f->rhs);
        case FKind::Rel: {
            std::string s = sig.relations[f->rel].name + "(";
            for (std::size_t i = 0; i < f->args.size(); ++i) {
                if (i) s += ", ";
                s += print_term(sig, f->args[i]);
            }
            return s + ")";
        }
        case FKind::Or:
            // '|'-separated items are and-units; only a nested Or chain may
            // stay at the or level
            return wrap(pr(sig, f->a, f->a->kind == FKind::Or ? 0 : 1) + " | " +
                            pr(sig, f->b, 1),
                        level > 0);
        case FKind::And:
            return wrap(pr(sig, f->a, f->a->kind == FKind::And ? 1 : 2) + " & " +
                            pr(sig, f->b, 2),
                        level > 1);
        case FKind::Exists:
            return wrap("exists " + f->var + ":" + sig.sorts[f->var_sort] + " . " +
                            pr(sig, f->body, 0),
                        level > 0);
    }
    return "?";
}

}  // namespace

std::string print_formula(const Signature& sig, const FormulaPtr& f) { return pr(sig, f, 0); }

std::string print_sequent(const Signature& sig, const Sequent& s) {
    std::string out = "axiom (";
    for (std::size_t i = 0; i < s.context.size(); ++i) {
        if (i) out += ", ";
        out += s.context[i].first + ":" + sig.sorts[s.context[i].second];
    }
    out += ") " + print_formula(sig, s.lhs) + " => " + print_formula(sig, s.rhs);
    return out;
}

std::string print_theory(const Theory& th) {
    const Signature& sig = *th.sig;
    std::string out;
    for (auto& s : sig.sorts) out += "sort " + s + "\n";
    for (auto& r : sig.relations) {
        out += "rel " + r.name + " :";
        for (int s : r.arity) out += " " + sig.sorts[s];
        out += "\n";
    }
    for (auto& f : sig.functions) {
        out += "fun " + f.name + " :";
        for (int s : f.dom) out += " " + sig.sorts[s];
        out += " -> " + sig.sorts[f.cod] + "\n";
    }
    for (auto& ax : th.axioms) out += print_sequent(sig, ax) + "\n";
    return out;
}

// ----------------------------------------------------------------- parsing

namespace {

enum class Tok { Ident, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SrcPos pos;
};

struct Lexer {
    const std::string& src;
    std::string file;
    std::size_t i = 0;
    int line = 1, col = 1;
    Token cur;

    Lexer(const std::string& s, std::string f) : src(s), file(std::move(f)) { advance(); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(file, cur.pos, msg); }

    void bump() {
        if (i < src.size() && src[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    }

    void advance() {
        while (i < src.size()) {
            if (std::isspace(static_cast<unsigned char>(src[i]))) {
                bump();
            } else if (src[i] == '#') {
                while (i < src.size() && src[i] != '\n') bump();
            } else {
                break;
            }
        }
        cur.pos = {line, col};
        if (i >= src.size()) {
            cur.kind = Tok::End;
            cur.text.clear();
            return;
        }
        char c = src[i];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::string t;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' ||
                    src[i] == '\'')) {
                t += src[i];
                bump();
            }
            cur.kind = Tok::Ident;
            cur.text = std::move(t);
            return;
        }
        if (c == '=' && i + 1 < src.size() && src[i + 1] == '>') {
            cur.kind = Tok::Sym;
            cur.text = "=>";
            bump();
            bump();
            return;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            cur.kind = Tok::Sym;
            cur.text = "->";
            bump();
            bump();
            return;
        }
        cur.kind = Tok::Sym;
        cur.text = std::string(1, c);
        bump();
    }

    bool at_sym(const std::string& s) const { return cur.kind == Tok::Sym && cur.text == s; }
    bool at_ident(const std::string& s) const { return cur.kind == Tok::Ident && cur.text == s; }

    void expect_sym(const std::string& s) {
        if (!at_sym(s)) fail("expected '" + s + "'");
        advance();
    }
    std::string expect_ident(const std::string& what) {
        if (cur.kind != Tok::Ident) fail("expected " + what);
        std::string t = cur.text;
        advance();
        return t;
    }
};

const std::set<std::string> kKeywords = {"sort", "rel",   "fun",    "axiom",
                                         "true", "false", "exists", "model"};

struct Parser {
    Lexer lx;
    Signature sig;

    explicit Parser(const std::string& text, const std::string& file) : lx(text, file) {}

    int expect_sort() {
        SrcPos p = lx.cur.pos;
        std::string s = lx.expect_ident("sort name");
        int idx = sig.sort_index(s);
        if (idx < 0) throw ParseError(lx.file, p, "unknown sort " + s);
        return idx;
    }

    void check_fresh_name(const std::string& n, SrcPos p) {
        if (kKeywords.count(n)) throw ParseError(lx.file, p, "keyword used as a name: " + n);
        if (sig.sort_index(n) >= 0 || sig.rel_index(n) >= 0 || sig.fun_index(n) >= 0)
            throw ParseError(lx.file, p, "duplicate name " + n);
    }

    TermPtr parse_term(const VarContext& ctx) {
        SrcPos p = lx.cur.pos;
        std::string name = lx.expect_ident("term");
        if (kKeywords.count(name)) throw ParseError(lx.file, p, "unexpected keyword " + name);
        bool applied = lx.at_sym("(");
        for (auto& [n, s] : ctx)
            if (n == name) {
                if (applied) throw ParseError(lx.file, p, "variable " + name + " applied");
                return t_var(name, s);
            }
        int fi = sig.fun_index(name);
        if (fi >= 0) {
            std::vector<TermPtr> args;
            if (applied) {
                lx.advance();
                if (!lx.at_sym(")")) {
                    args.push_back(parse_term(ctx));
                    while (lx.at_sym(",")) {
                        lx.advance();
                        args.push_back(parse_term(ctx));
                    }
                }
                lx.expect_sym(")");
            }
            const auto& fn = sig.functions[fi];
            if (fn.dom.size() != args.size())
                throw ParseError(lx.file, p,
                                 "function " + name + " expects " +
                                     std::to_string(fn.dom.size()) + " arguments, got " +
                                     std::to_string(args.size()));
            for (std::size_t k = 0; k < args.size(); ++k)
                if (term_sort(sig, args[k]) != fn.dom[k])
                    throw ParseError(lx.file, p, "argument " + std::to_string(k + 1) + " of " +
                                                     name + " has the wrong sort");
            return t_app(fi, std::move(args));
        }
        if (sig.rel_index(name) >= 0)
            throw ParseError(lx.file, p, "relation " + name + " used as a term");
        throw ParseError(lx.file, p, "unknown variable or symbol " + name);
    }

    FormulaPtr parse_atom(VarContext& ctx) {
        SrcPos p = lx.cur.pos;
        if (lx.at_sym("(")) {
            lx.advance();
            FormulaPtr f = parse_or(ctx);
            lx.expect_sym(")");
            return f;
        }
        if (lx.at_ident("true")) {
            lx.advance();
            return f_top();
        }
        if (lx.at_ident("false")) {
            lx.advance();
            return f_bot();
        }
        if (lx.at_ident("exists")) {
            lx.advance();
            SrcPos vp = lx.cur.pos;
            std::string v = lx.expect_ident("variable");
            for (auto& [n, s] : ctx)
                if (n == v)
                    throw ParseError(lx.file, vp, "shadowing of variable " + v + " inside exists");
            lx.expect_sym(":");
            int s = expect_sort();
            lx.expect_sym(".");
            ctx.emplace_back(v, s);
            FormulaPtr body = parse_or(ctx);
            ctx.pop_back();
            return f_exists(v, s, std::move(body));
        }
        if (lx.cur.kind == Tok::Ident) {
            int ri = sig.rel_index(lx.cur.text);
            if (ri >= 0) {
                std::string name = lx.cur.text;
                lx.advance();
                lx.expect_sym("(");
                std::vector<TermPtr> args;
                if (!lx.at_sym(")")) {
                    args.push_back(parse_term(ctx));
                    while (lx.at_sym(",")) {
                        lx.advance();
                        args.push_back(parse_term(ctx));
                    }
                }
                lx.expect_sym(")");
                const auto& r = sig.relations[ri];
                if (r.arity.size() != args.size())
                    throw ParseError(lx.file, p,
                                     "relation " + name + " expects " +
                                         std::to_string(r.arity.size()) + " arguments, got " +
                                         std::to_string(args.size()));
                for (std::size_t k = 0; k < args.size(); ++k)
                    if (term_sort(sig, args[k]) != r.arity[k])
                        throw ParseError(lx.file, p, "argument " + std::to_string(k + 1) +
                                                         " of " + name + " has the wrong sort");
                return f_rel(ri, std::move(args));
            }
            TermPtr l = parse_term(ctx);
            lx.expect_sym("=");
            TermPtr r = parse_term(ctx);
            if (term_sort(sig, l) != term_sort(sig, r))
                throw ParseError(lx.file, p, "equality between different sorts");
            return f_eq(std::move(l), std::move(r));
        }
        throw ParseError(lx.file, p, "expected a formula");
    }

    FormulaPtr parse_and(VarContext& ctx) {
        FormulaPtr f = parse_atom(ctx);
        while (lx.at_sym("&")) {
            lx.advance();
            f = f_and(std::move(f), parse_atom(ctx));
        }
        return f;
    }

    FormulaPtr parse_or(VarContext& ctx) {
        FormulaPtr f = parse_and(ctx);
        while (lx.at_sym("|")) {
            lx.advance();
            f = f_or(std::move(f), parse_and(ctx));
        }
        return f;
    }

    Theory parse() {
        std::vector<Sequent> axioms;
        while (lx.cur.kind != Tok::End) {
            SrcPos p = lx.cur.pos;
            std::string kw = lx.expect_ident("declaration");
            if (kw == "sort") {
                SrcPos np = lx.cur.pos;
                std::string n = lx.expect_ident("sort name");
                check_fresh_name(n, np);
                sig.sorts.push_back(n);
            } else if (kw == "rel") {
                SrcPos np = lx.cur.pos;
                std::string n = lx.expect_ident("relation name");
                check_fresh_name(n, np);
                lx.expect_sym(":");
                Signature::Rel r;
                r.name = n;
                while (lx.cur.kind == Tok::Ident && !kKeywords.count(lx.cur.text))
                    r.arity.push_back(expect_sort());
                if (r.arity.empty())
                    throw ParseError(lx.file, np, "relation " + n + " needs a nonempty arity");
                sig.relations.push_back(std::move(r));
            } else if (kw == "fun") {
                SrcPos np = lx.cur.pos;
                std::string n = lx.expect_ident("function name");
                check_fresh_name(n, np);
                lx.expect_sym(":");
                Signature::Fun fn;
                fn.name = n;
                while (lx.cur.kind == Tok::Ident && !kKeywords.count(lx.cur.text))
                    fn.dom.push_back(expect_sort());
                lx.expect_sym("->");
                fn.cod = expect_sort();
                sig.functions.push_back(std::move(fn));
            } else if (kw == "axiom") {
                lx.expect_sym("(");
                VarContext ctx;
                if (!lx.at_sym(")")) {
                    while (true) {
                        SrcPos vp = lx.cur.pos;
                        std::string v = lx.expect_ident("variable");
                        for (auto& [n2, s2] : ctx)
                            if (n2 == v)
                                throw ParseError(lx.file, vp, "duplicate context variable " + v);
                        lx.expect_sym(":");
                        int s = expect_sort();
                        ctx.emplace_back(v, s);
                        if (lx.at_sym(",")) {
                            lx.advance();
                            continue;
                        }
                        break;
                    }
                }
                lx.expect_sym(")");
                Sequent seq;
                seq.context = ctx;
                seq.lhs = parse_or(ctx);
                lx.expect_sym("=>");
                seq.rhs = parse_or(ctx);
                axioms.push_back(std::move(seq));
            } else {
                throw ParseError(lx.file, p, "unknown declaration " + kw);
            }
        }
        Theory th;
        th.sig = std::make_shared<Signature>(std::move(sig));
        th.axioms = std::move(axioms);
        for (auto& ax : th.axioms) {
            check_formula(*th.sig, ax.context, ax.lhs);
            check_formula(*th.sig, ax.context, ax.rhs);
        }
        return th;
    }
};

}  // namespace

Theory parse_theory(const std::string& text, const std::string& filename) {
    Parser p(text, filename);
    return p.parse();
}

FormulaPtr parse_formula(const Signature& sig, const VarContext& ctx, const std::string& text) {
    Parser p(text, "<formula>");
    p.sig = sig;
    VarContext c = ctx;
    FormulaPtr f = p.parse_or(c);
    if (p.lx.cur.kind != Tok::End) p.lx.fail("trailing input after formula");
    check_formula(sig, ctx, f);
    return f;
}

namespace {

bool term_equal(const TermPtr& a, const TermPtr& b) {
    if (a->is_var() != b->is_var()) return false;
    if (a->is_var()) return a->var == b->var && a->var_sort == b->var_sort;
    if (a->fun != b->fun || a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!term_equal(a->args[i], b->args[i])) return false;
    return true;
}

}  // namespace

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case FKind::Top:
        case FKind::Bot:
            return true;
        case FKind::Eq:
            return term_equal(a->lhs, b->lhs) && term_equal(a->rhs, b->rhs);
        case FKind::Rel:
            if (a->rel != b->rel || a->args.size() != b->args.size()) return false;
            for (std::size_t i = 0; i < a->args.size(); ++i)
                if (!term_equal(a->args[i], b->args[i])) return false;
            return true;
        case FKind::And:
        case FKind::Or:
            return formula_equal(a->a, b->a) && formula_equal(a->b, b->b);
        case FKind::Exists:
            return a->var == b->var && a->var_sort == b->var_sort &&
                   formula_equal(a->body, b->body);
    }
    return false;
}

}  // namespace posmt::syntax
