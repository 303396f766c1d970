#include "posmt/model.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace posmt::model {

using syntax::FKind;
using syntax::FormulaPtr;
using syntax::TermPtr;
using syntax::VarContext;

TupleSpace TupleSpace::of(const std::vector<int>& sizes) {
    TupleSpace t;
    t.sizes = sizes;
    t.strides.assign(sizes.size(), 1);
    t.total = 1;
    for (int i = static_cast<int>(sizes.size()) - 1; i >= 0; --i) {
        t.strides[i] = t.total;
        t.total *= sizes[i];
    }
    return t;
}

long long TupleSpace::encode(const std::vector<int>& tuple) const {
    long long idx = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) idx += tuple[i] * strides[i];
    return idx;
}

void TupleSpace::decode(long long idx, std::vector<int>& out) const {
    out.resize(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        out[i] = static_cast<int>(idx / strides[i]);
        idx %= strides[i];
    }
}

std::vector<int> TupleSpace::decode(long long idx) const {
    std::vector<int> out;
    decode(idx, out);
    return out;
}

TupleSpace FinModel::context_space(const std::vector<int>& ctx_sorts) const {
    std::vector<int> sizes;
    sizes.reserve(ctx_sorts.size());
    for (int s : ctx_sorts) sizes.push_back(carrier_size(s));
    return TupleSpace::of(sizes);
}

// --------------------------------------------------------------- model DSL

namespace {

struct MTok {
    std::string text;  // empty = end
    syntax::SrcPos pos;
    bool sym = false;
};

struct MLexer {
    const std::string& src;
    std::string file;
    std::size_t i = 0;
    int line = 1, col = 1;
    MTok cur;

    MLexer(const std::string& s, std::string f) : src(s), file(std::move(f)) { advance(); }

    [[noreturn]] void fail(const std::string& m) const {
        throw syntax::ParseError(file, cur.pos, m);
    }

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
            if (std::isspace(static_cast<unsigned char>(src[i])))
                bump();
            else if (src[i] == '#')
                while (i < src.size() && src[i] != '\n') bump();
            else
                break;
        }
        cur.pos = {line, col};
        cur.sym = false;
        if (i >= src.size()) {
            cur.text.clear();
            return;
        }
        char c = src[i];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::string t;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                t += src[i];
                bump();
            }
            cur.text = std::move(t);
            return;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            cur.text = "->";
            cur.sym = true;
            bump();
            bump();
            return;
        }
        cur.text = std::string(1, c);
        cur.sym = true;
        bump();
    }

    bool at(const std::string& s) const { return cur.text == s; }
    void expect(const std::string& s) {
        if (cur.text != s) fail("expected '" + s + "'");
        advance();
    }
    std::string ident(const std::string& what) {
        if (cur.text.empty() || cur.sym) fail("expected " + what);
        std::string t = cur.text;
        advance();
        return t;
    }
};

}  // namespace

FinModel parse_model(const std::string& text, std::shared_ptr<const syntax::Signature> sig,
                     const std::string& filename) {
    MLexer lx(text, filename);
    FinModel m;
    m.sig = sig;
    m.carriers.assign(sig->sorts.size(), {});
    std::vector<bool> carrier_given(sig->sorts.size(), false);
    m.relations.assign(sig->relations.size(), {});
    m.functions.assign(sig->functions.size(), {});
    // raw text of relation/function bodies, resolved after carriers are known
    struct RawTuple {
        std::vector<std::string> in;
        std::string out;  // functions only
        syntax::SrcPos pos;
    };
    std::map<int, std::vector<RawTuple>> rel_raw, fun_raw;
    std::vector<bool> fun_given(sig->functions.size(), false);

    if (lx.at("model")) {
        lx.advance();
        m.name = lx.ident("model name");
    }

    while (!lx.cur.text.empty()) {
        syntax::SrcPos p = lx.cur.pos;
        std::string name = lx.ident("declaration");
        lx.expect("=");
        int si = sig->sort_index(name), ri = sig->rel_index(name), fi = sig->fun_index(name);
        if (si >= 0) {
            if (carrier_given[si]) lx.fail("duplicate carrier for sort " + name);
            carrier_given[si] = true;
            lx.expect("{");
            while (!lx.at("}")) {
                std::string e = lx.ident("element");
                for (auto& prev : m.carriers[si])
                    if (prev == e)
                        throw syntax::ParseError(filename, p, "duplicate element " + e);
                m.carriers[si].push_back(e);
                if (lx.at(",")) lx.advance();
            }
            lx.expect("}");
        } else if (ri >= 0) {
            lx.expect("{");
            auto& raws = rel_raw[ri];
            while (!lx.at("}")) {
                RawTuple rt;
                rt.pos = lx.cur.pos;
                if (lx.at("(")) {
                    lx.advance();
                    while (!lx.at(")")) {
                        rt.in.push_back(lx.ident("element"));
                        if (lx.at(",")) lx.advance();
                    }
                    lx.expect(")");
                } else {
                    rt.in.push_back(lx.ident("element"));
                }
                raws.push_back(std::move(rt));
                if (lx.at(",")) lx.advance();
            }
            lx.expect("}");
        } else if (fi >= 0) {
            fun_given[fi] = true;
            auto& raws = fun_raw[fi];
            if (lx.at("{")) {
                lx.advance();
                while (!lx.at("}")) {
                    RawTuple rt;
                    rt.pos = lx.cur.pos;
                    if (lx.at("(")) {
                        lx.advance();
                        while (!lx.at(")")) {
                            rt.in.push_back(lx.ident("element"));
                            if (lx.at(",")) lx.advance();
                        }
                        lx.expect(")");
                    } else {
                        rt.in.push_back(lx.ident("element"));
                    }
                    lx.expect("->");
                    rt.out = lx.ident("element");
                    raws.push_back(std::move(rt));
                    if (lx.at(",")) lx.advance();
                }
                lx.expect("}");
            } else {
                // constant sugar: c = e
                RawTuple rt;
                rt.pos = p;
                rt.out = lx.ident("element");
                raws.push_back(std::move(rt));
            }
        } else {
            throw syntax::ParseError(filename, p, "unknown symbol " + name);
        }
    }

    auto elem_index = [&](int sort, const std::string& e, syntax::SrcPos p) {
        for (std::size_t k = 0; k < m.carriers[sort].size(); ++k)
            if (m.carriers[sort][k] == e) return static_cast<int>(k);
        throw syntax::ParseError(filename, p,
                                 "element " + e + " not in carrier of " + sig->sorts[sort]);
    };

    for (auto& [ri, raws] : rel_raw) {
        const auto& arity = sig->relations[ri].arity;
        for (auto& rt : raws) {
            if (rt.in.size() != arity.size())
                throw syntax::ParseError(filename, rt.pos,
                                         "tuple arity mismatch for relation " +
                                             sig->relations[ri].name);
            std::vector<int> tup;
            for (std::size_t k = 0; k < arity.size(); ++k)
                tup.push_back(elem_index(arity[k], rt.in[k], rt.pos));
            m.relations[ri].insert(std::move(tup));
        }
    }

    for (int fi = 0; fi < static_cast<int>(sig->functions.size()); ++fi) {
        const auto& fn = sig->functions[fi];
        std::vector<int> dom_sizes;
        for (int s : fn.dom) dom_sizes.push_back(m.carrier_size(s));
        TupleSpace dom = TupleSpace::of(dom_sizes);
        int cod_size = m.carrier_size(fn.cod);
        m.functions[fi].assign(dom.total, -1);
        if (dom.total > 0 && cod_size == 0)
            throw std::invalid_argument(fn.dom.empty()
                                            ? "constant " + fn.name + " into empty carrier"
                                            : "function " + fn.name + " into empty carrier");
        auto it = fun_raw.find(fi);
        if (it != fun_raw.end()) {
            for (auto& rt : it->second) {
                if (rt.in.size() != fn.dom.size())
                    throw syntax::ParseError(filename, rt.pos,
                                             "tuple arity mismatch for function " + fn.name);
                std::vector<int> tup;
                for (std::size_t k = 0; k < fn.dom.size(); ++k)
                    tup.push_back(elem_index(fn.dom[k], rt.in[k], rt.pos));
                int out = elem_index(fn.cod, rt.out, rt.pos);
                long long idx = dom.encode(tup);
                if (m.functions[fi][idx] >= 0)
                    throw syntax::ParseError(filename, rt.pos,
                                             "duplicate table entry for function " + fn.name);
                m.functions[fi][idx] = out;
            }
        }
        for (long long idx = 0; idx < dom.total; ++idx)
            if (m.functions[fi][idx] < 0)
                throw std::invalid_argument("function " + fn.name +
                                            " table not total (missing input)");
    }
    return m;
}

std::string print_model(const FinModel& m) {
    const auto& sig = *m.sig;
    std::ostringstream out;
    if (!m.name.empty()) out << "model " << m.name << "\n";
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
        out << sig.sorts[s] << " = {";
        for (std::size_t k = 0; k < m.carriers[s].size(); ++k)
            out << (k ? ", " : "") << m.carriers[s][k];
        out << "}\n";
    }
    for (std::size_t r = 0; r < sig.relations.size(); ++r) {
        out << sig.relations[r].name << " = {";
        bool first = true;
        for (auto& tup : m.relations[r]) {
            if (!first) out << ", ";
            first = false;
            out << "(";
            for (std::size_t k = 0; k < tup.size(); ++k)
                out << (k ? ", " : "") << m.carriers[sig.relations[r].arity[k]][tup[k]];
            out << ")";
        }
        out << "}\n";
    }
    for (std::size_t f = 0; f < sig.functions.size(); ++f) {
        const auto& fn = sig.functions[f];
        std::vector<int> dom_sizes;
        for (int s : fn.dom) dom_sizes.push_back(m.carrier_size(s));
        TupleSpace dom = TupleSpace::of(dom_sizes);
        out << fn.name << " = {";
        for (long long idx = 0; idx < dom.total; ++idx) {
            if (idx) out << ", ";
            auto tup = dom.decode(idx);
            out << "(";
            for (std::size_t k = 0; k < tup.size(); ++k)
                out << (k ? ", " : "") << m.carriers[fn.dom[k]][tup[k]];
            out << ") -> " << m.carriers[fn.cod][m.functions[f][idx]];
        }
        out << "}\n";
    }
    return out.str();
}

// -------------------------------------------------------------- evaluation

namespace {

int eval_term(const FinModel& m, const TermPtr& t,
              const std::map<std::string, int>& env) {
    if (t->is_var()) return env.at(t->var);
    std::vector<int> args;
    args.reserve(t->args.size());
    for (auto& a : t->args) args.push_back(eval_term(m, a, env));
    std::vector<int> dom_sizes;
    for (int s : m.sig->functions[t->fun].dom) dom_sizes.push_back(m.carrier_size(s));
    return m.functions[t->fun][TupleSpace::of(dom_sizes).encode(args)];
}

BitVec eval_rec(const FinModel& m, const FormulaPtr& f, const VarContext& ctx,
                const TupleSpace& space) {
    switch (f->kind) {
        case FKind::Top:
            return BitVec(space.total, true);
        case FKind::Bot:
            return BitVec(space.total, false);
        case FKind::And:
            return eval_rec(m, f->a, ctx, space) & eval_rec(m, f->b, ctx, space);
        case FKind::Or:
            return eval_rec(m, f->a, ctx, space) | eval_rec(m, f->b, ctx, space);
        case FKind::Eq:
        case FKind::Rel: {
            BitVec out(space.total);
            std::vector<int> tuple;
            std::map<std::string, int> env;
            for (long long idx = 0; idx < space.total; ++idx) {
                space.decode(idx, tuple);
                env.clear();
                for (std::size_t i = 0; i < ctx.size(); ++i) env[ctx[i].first] = tuple[i];
                if (f->kind == FKind::Eq) {
                    if (eval_term(m, f->lhs, env) == eval_term(m, f->rhs, env)) out.set(idx);
                } else {
                    std::vector<int> args;
                    args.reserve(f->args.size());
                    for (auto& t : f->args) args.push_back(eval_term(m, t, env));
                    if (m.relations[f->rel].count(args)) out.set(idx);
                }
            }
            return out;
        }
        case FKind::Exists: {
            VarContext ctx2 = ctx;
            ctx2.emplace_back(f->var, f->var_sort);
            std::vector<int> sizes2 = space.sizes;
            sizes2.push_back(m.carrier_size(f->var_sort));
            TupleSpace space2 = TupleSpace::of(sizes2);
            BitVec inner = eval_rec(m, f->body, ctx2, space2);
            // image of the projection dropping the last coordinate: with the
            // last coordinate fastest-varying, OR over blocks of size k
            BitVec out(space.total);
            int k = m.carrier_size(f->var_sort);
            for (long long idx = 0; idx < space.total; ++idx)
                for (int e = 0; e < k; ++e)
                    if (inner.test(idx * k + e)) {
                        out.set(idx);
                        break;
                    }
            return out;
        }
    }
    return BitVec(space.total);
}

}  // namespace

BitVec eval_formula(const FinModel& m, const FormulaPtr& f, const VarContext& ctx) {
    std::vector<int> sorts;
    sorts.reserve(ctx.size());
    for (auto& [n, s] : ctx) sorts.push_back(s);
    return eval_rec(m, f, ctx, m.context_space(sorts));
}

SequentCheck check_sequent(const FinModel& m, const syntax::Sequent& s) {
    BitVec l = eval_formula(m, s.lhs, s.context);
    BitVec r = eval_formula(m, s.rhs, s.context);
    SequentCheck out;
    BitVec diff = l.minus(r);
    if (diff.none()) {
        out.holds = true;
        return out;
    }
    std::vector<int> sorts;
    for (auto& [n, ss] : s.context) sorts.push_back(ss);
    out.witness = m.context_space(sorts).decode(diff.first_set());
    return out;
}

// ----------------------------------------------------------------- product

FinModel model_product(const std::vector<const FinModel*>& ms) {
    const auto sig = ms.at(0)->sig;
    FinModel p;
    p.sig = sig;
    std::size_t k = ms.size();
    p.carriers.assign(sig->sorts.size(), {});
    for (std::size_t s = 0; s < sig->sorts.size(); ++s) {
        std::vector<int> sizes;
        for (auto* m : ms) sizes.push_back(m->carrier_size(static_cast<int>(s)));
        TupleSpace ts = TupleSpace::of(sizes);
        for (long long idx = 0; idx < ts.total; ++idx) {
            auto tup = ts.decode(idx);
            std::string label = "(";
            for (std::size_t i = 0; i < k; ++i)
                label += (i ? "," : "") + ms[i]->carriers[s][tup[i]];
            p.carriers[s].push_back(label + ")");
        }
    }
    auto sort_space = [&](int s) {
        std::vector<int> sizes;
        for (auto* m : ms) sizes.push_back(m->carrier_size(s));
        return TupleSpace::of(sizes);
    };
    p.relations.assign(sig->relations.size(), {});
    for (std::size_t r = 0; r < sig->relations.size(); ++r) {
        const auto& arity = sig->relations[r].arity;
        std::vector<int> psizes;
        for (int s : arity) psizes.push_back(p.carrier_size(s));
        TupleSpace rel_space = TupleSpace::of(psizes);
        std::vector<int> ptuple, comp;
        for (long long idx = 0; idx < rel_space.total; ++idx) {
            rel_space.decode(idx, ptuple);
            bool in = true;
            for (std::size_t i = 0; i < k && in; ++i) {
                comp.clear();
                for (std::size_t a = 0; a < arity.size(); ++a)
                    comp.push_back(sort_space(arity[a]).decode(ptuple[a])[i]);
                in = ms[i]->relations[r].count(comp) > 0;
            }
            if (in) p.relations[r].insert(ptuple);
        }
    }
    p.functions.assign(sig->functions.size(), {});
    for (std::size_t f = 0; f < sig->functions.size(); ++f) {
        const auto& fn = sig->functions[f];
        std::vector<int> dsizes;
        for (int s : fn.dom) dsizes.push_back(p.carrier_size(s));
        TupleSpace dom = TupleSpace::of(dsizes);
        p.functions[f].assign(dom.total, -1);
        std::vector<int> dtuple;
        for (long long idx = 0; idx < dom.total; ++idx) {
            dom.decode(idx, dtuple);
            // component-wise application, re-encode the result tuple
            std::vector<int> res;
            for (std::size_t i = 0; i < k; ++i) {
                std::vector<int> args;
                for (std::size_t a = 0; a < fn.dom.size(); ++a)
                    args.push_back(sort_space(fn.dom[a]).decode(dtuple[a])[i]);
                std::vector<int> mdsizes;
                for (int s : fn.dom) mdsizes.push_back(ms[i]->carrier_size(s));
                res.push_back(ms[i]->functions[f][TupleSpace::of(mdsizes).encode(args)]);
            }
            p.functions[f][idx] = static_cast<int>(sort_space(fn.cod).encode(res));
        }
    }
    return p;
}

FinModel model_product(const FinModel& a, const FinModel& b) {
    return model_product(std::vector<const FinModel*>{&a, &b});
}

// ----------------------------------------------------------- homomorphisms

bool is_homomorphism(const FinModel& src, const FinModel& dst, const Homomorphism& h,
                     std::string* why) {
    const auto& sig = *src.sig;
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    for (std::size_t s = 0; s < sig.sorts.size(); ++s) {
        if (static_cast<int>(h.map[s].size()) != src.carrier_size(static_cast<int>(s)))
            return fail("map not total on sort " + sig.sorts[s]);
        for (int v : h.map[s])
            if (v < 0 || v >= dst.carrier_size(static_cast<int>(s)))
                return fail("map out of range on sort " + sig.sorts[s]);
    }
    for (std::size_t f = 0; f < sig.functions.size(); ++f) {
        const auto& fn = sig.functions[f];
        std::vector<int> ssizes, dsizes;
        for (int s : fn.dom) {
            ssizes.push_back(src.carrier_size(s));
            dsizes.push_back(dst.carrier_size(s));
        }
        TupleSpace sdom = TupleSpace::of(ssizes), ddom = TupleSpace::of(dsizes);
        std::vector<int> tup, mapped;
        for (long long idx = 0; idx < sdom.total; ++idx) {
            sdom.decode(idx, tup);
            mapped.resize(tup.size());
            for (std::size_t a = 0; a < tup.size(); ++a) mapped[a] = h.map[fn.dom[a]][tup[a]];
            if (h.map[fn.cod][src.functions[f][idx]] != dst.functions[f][ddom.encode(mapped)])
                return fail("does not commute with function " + fn.name);
        }
    }
    for (std::size_t r = 0; r < sig.relations.size(); ++r) {
        const auto& arity = sig.relations[r].arity;
        for (auto& tup : src.relations[r]) {
            std::vector<int> mapped(tup.size());
            for (std::size_t a = 0; a < tup.size(); ++a) mapped[a] = h.map[arity[a]][tup[a]];
            if (!dst.relations[r].count(mapped))
                return fail("does not preserve relation " + sig.relations[r].name);
        }
    }
    return true;
}

HomEnumeration enumerate_homomorphisms(const FinModel& src, const FinModel& dst,
                                       std::size_t cap) {
    const auto& sig = *src.sig;
    HomEnumeration out;
    // flatten assignment slots: sorts in declaration order, elements ascending
    std::vector<std::pair<int, int>> slots;
    for (std::size_t s = 0; s < sig.sorts.size(); ++s)
        for (int e = 0; e < src.carrier_size(static_cast<int>(s)); ++e)
            slots.emplace_back(static_cast<int>(s), e);

    Homomorphism h;
    h.map.assign(sig.sorts.size(), {});
    for (std::size_t s = 0; s < sig.sorts.size(); ++s)
        h.map[s].assign(src.carrier_size(static_cast<int>(s)), -1);

    auto assigned = [&](int sort, int e) { return h.map[sort][e] >= 0; };

    // partial consistency: every constraint whose inputs are all assigned
    auto consistent = [&]() {
        for (std::size_t f = 0; f < sig.functions.size(); ++f) {
            const auto& fn = sig.functions[f];
            std::vector<int> ssizes, dsizes;
            for (int s : fn.dom) {
                ssizes.push_back(src.carrier_size(s));
                dsizes.push_back(dst.carrier_size(s));
            }
            TupleSpace sdom = TupleSpace::of(ssizes), ddom = TupleSpace::of(dsizes);
            std::vector<int> tup, mapped;
            for (long long idx = 0; idx < sdom.total; ++idx) {
                sdom.decode(idx, tup);
                bool all = true;
                for (std::size_t a = 0; a < tup.size() && all; ++a)
                    all = assigned(fn.dom[a], tup[a]);
                if (!all || !assigned(fn.cod, src.functions[f][idx])) continue;
                mapped.resize(tup.size());
                for (std::size_t a = 0; a < tup.size(); ++a)
                    mapped[a] = h.map[fn.dom[a]][tup[a]];
                if (h.map[fn.cod][src.functions[f][idx]] !=
                    dst.functions[f][ddom.encode(mapped)])
                    return false;
            }
        }
        for (std::size_t r = 0; r < sig.relations.size(); ++r) {
            const auto& arity = sig.relations[r].arity;
            for (auto& tup : src.relations[r]) {
                bool all = true;
                for (std::size_t a = 0; a < tup.size() && all; ++a)
                    all = assigned(arity[a], tup[a]);
                if (!all) continue;
                std::vector<int> mapped(tup.size());
                for (std::size_t a = 0; a < tup.size(); ++a)
                    mapped[a] = h.map[arity[a]][tup[a]];
                if (!dst.relations[r].count(mapped)) return false;
            }
        }
        return true;
    };

    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (out.truncated) return;
        if (i == slots.size()) {
            if (out.homs.size() >= cap) {
                out.truncated = true;
                return;
            }
            out.homs.push_back(h);
            return;
        }
        auto [s, e] = slots[i];
        for (int v = 0; v < dst.carrier_size(s); ++v) {
            h.map[s][e] = v;
            if (consistent()) rec(i + 1);
            if (out.truncated) break;
        }
        h.map[s][e] = -1;
    };
    rec(0);
    return out;
}

}  // namespace posmt::model
