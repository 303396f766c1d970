#include "posmt/semcat.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace posmt::semcat {

using model::FinModel;
using model::TupleSpace;
using syntax::FormulaPtr;
using syntax::TermPtr;

std::string ctx_var(int position) { return "x" + std::to_string(position); }

syntax::VarContext ctx_vars(const syntax::Signature&, const Ctx& ctx) {
    syntax::VarContext out;
    for (std::size_t i = 0; i < ctx.size(); ++i)
        out.emplace_back(ctx_var(static_cast<int>(i)), ctx[i]);
    return out;
}

namespace {

std::size_t comp_key(const std::vector<BitVec>& comp) {
    std::size_t h = 0x12345;
    for (auto& c : comp) h = h * 0x100000001b3ull ^ c.hash();
    return h;
}

}  // namespace

int SubLattice::find(const std::vector<BitVec>& comp) const {
    auto it = buckets.find(comp_key(comp));
    if (it == buckets.end()) return -1;
    for (int idx : it->second)
        if (elems[idx].comp == comp) return idx;
    return -1;
}

bool SubLattice::leq(int a, int b) const {
    for (std::size_t m = 0; m < elems[a].comp.size(); ++m)
        if (!elems[a].comp[m].is_subset_of(elems[b].comp[m])) return false;
    return true;
}

int SemCat::ctx_index(const Ctx& c) const {
    auto it = ctx_index_.find(c);
    if (it == ctx_index_.end()) throw std::out_of_range("unknown context");
    return it->second;
}

TupleSpace SemCat::space(int member, int ctx_id) const {
    return family_[member].context_space(contexts_[ctx_id]);
}

std::size_t SemCat::total_defsets() const {
    std::size_t n = 0;
    for (auto& s : subs_) n += s.elems.size();
    return n;
}

// -------------------------------------------------------------- saturation

struct Saturator {
    SemCat& C;
    std::deque<std::pair<int, int>> work;  // (ctx_id, elem)
    // coordinate maps grouped by `to`: pairs (from ctx id, pos)
    std::vector<std::vector<std::pair<int, std::vector<int>>>> maps_into;

    explicit Saturator(SemCat& c) : C(c) {}

    std::vector<BitVec> eval_all(const FormulaPtr& f, const Ctx& ctx) {
        std::vector<BitVec> comp;
        comp.reserve(C.family_.size());
        auto vars = ctx_vars(*C.sig_, ctx);
        for (auto& m : C.family_) comp.push_back(model::eval_formula(m, f, vars));
        return comp;
    }

    // interns; returns index or -1 on cutoff
    int add(int ctx_id, std::vector<BitVec> comp, FormulaPtr witness) {
        SubLattice& L = C.subs_[ctx_id];
        int found = L.find(comp);
        if (found >= 0) return found;
        if (L.elems.size() >= C.opt_.max_lattice) {
            C.partial_ = true;
            return -1;
        }
        int idx = static_cast<int>(L.elems.size());
        DefSet d;
        d.ctx = C.contexts_[ctx_id];
        d.comp = std::move(comp);
        d.witness = std::move(witness);
        L.buckets[comp_key(d.comp)].push_back(idx);
        L.elems.push_back(std::move(d));
        work.emplace_back(ctx_id, idx);
        return idx;
    }

    void seed(int ctx_id) {
        const Ctx& ctx = C.contexts_[ctx_id];
        const auto& sig = *C.sig_;
        C.subs_[ctx_id].bot = add(ctx_id, eval_all(syntax::f_bot(), ctx), syntax::f_bot());
        {
            auto comp = eval_all(syntax::f_top(), ctx);
            int t = C.subs_[ctx_id].find(comp);
            C.subs_[ctx_id].top = t >= 0 ? t : add(ctx_id, std::move(comp), syntax::f_top());
        }
        // depth <= 1 terms per sort: context variables and single function
        // applications to context variables (constants included)
        std::vector<std::vector<TermPtr>> terms(sig.sorts.size());
        for (std::size_t i = 0; i < ctx.size(); ++i)
            terms[ctx[i]].push_back(syntax::t_var(ctx_var(static_cast<int>(i)), ctx[i]));
        for (std::size_t fi = 0; fi < sig.functions.size(); ++fi) {
            const auto& fn = sig.functions[fi];
            std::function<void(std::size_t, std::vector<TermPtr>&)> rec =
                [&](std::size_t k, std::vector<TermPtr>& args) {
                    if (k == fn.dom.size()) {
                        terms[fn.cod].push_back(syntax::t_app(static_cast<int>(fi), args));
                        return;
                    }
                    for (std::size_t i = 0; i < ctx.size(); ++i) {
                        if (ctx[i] != fn.dom[k]) continue;
                        args.push_back(syntax::t_var(ctx_var(static_cast<int>(i)), ctx[i]));
                        rec(k + 1, args);
                        args.pop_back();
                    }
                };
            std::vector<TermPtr> args;
            rec(0, args);
        }
        for (std::size_t s = 0; s < sig.sorts.size(); ++s)
            for (std::size_t i = 0; i < terms[s].size(); ++i)
                for (std::size_t j = i + 1; j < terms[s].size(); ++j) {
                    auto f = syntax::f_eq(terms[s][i], terms[s][j]);
                    add(ctx_id, eval_all(f, ctx), f);
                }
        for (std::size_t ri = 0; ri < sig.relations.size(); ++ri) {
            const auto& rel = sig.relations[ri];
            std::function<void(std::size_t, std::vector<TermPtr>&)> rec =
                [&](std::size_t k, std::vector<TermPtr>& args) {
                    if (k == rel.arity.size()) {
                        auto f = syntax::f_rel(static_cast<int>(ri), args);
                        add(ctx_id, eval_all(f, ctx), f);
                        return;
                    }
                    for (auto& t : terms[rel.arity[k]]) {
                        args.push_back(t);
                        rec(k + 1, args);
                        args.pop_back();
                    }
                };
            std::vector<TermPtr> args;
            rec(0, args);
        }
    }

    std::vector<BitVec> meet_comp(int ctx_id, int a, int b) {
        const auto& L = C.subs_[ctx_id];
        std::vector<BitVec> comp;
        for (std::size_t m = 0; m < C.family_.size(); ++m)
            comp.push_back(L.elems[a].comp[m] & L.elems[b].comp[m]);
        return comp;
    }
    std::vector<BitVec> join_comp(int ctx_id, int a, int b) {
        const auto& L = C.subs_[ctx_id];
        std::vector<BitVec> comp;
        for (std::size_t m = 0; m < C.family_.size(); ++m)
            comp.push_back(L.elems[a].comp[m] | L.elems[b].comp[m]);
        return comp;
    }

    void image_drop_last(int ctx_id, int e) {
        const Ctx& ctx = C.contexts_[ctx_id];
        if (ctx.empty()) return;
        Ctx prefix(ctx.begin(), ctx.end() - 1);
        int pid = C.ctx_index_.at(prefix);
        int last_sort = ctx.back();
        std::vector<BitVec> comp;
        for (std::size_t m = 0; m < C.family_.size(); ++m) {
            const BitVec& src = C.subs_[ctx_id].elems[e].comp[m];
            long long k = C.family_[m].carrier_size(last_sort);
            long long tot = C.family_[m].context_space(prefix).total;
            BitVec out(tot);
            for (long long i = 0; i < tot; ++i)
                for (long long v = 0; v < k; ++v)
                    if (src.test(i * k + v)) {
                        out.set(i);
                        break;
                    }
            comp.push_back(std::move(out));
        }
        const auto& w = C.subs_[ctx_id].elems[e].witness;
        auto witness =
            syntax::f_exists(ctx_var(static_cast<int>(ctx.size()) - 1), last_sort, w);
        add(pid, std::move(comp), std::move(witness));
    }

    void pullback_into(int from_id, const std::vector<int>& pos, int to_id, int e) {
        const Ctx& from = C.contexts_[from_id];
        const Ctx& to = C.contexts_[to_id];
        std::vector<BitVec> comp;
        for (std::size_t m = 0; m < C.family_.size(); ++m) {
            const BitVec& src = C.subs_[to_id].elems[e].comp[m];
            TupleSpace fs = C.family_[m].context_space(from);
            TupleSpace ts = C.family_[m].context_space(to);
            BitVec out(fs.total);
            std::vector<int> ft, tt(to.size());
            for (long long i = 0; i < fs.total; ++i) {
                fs.decode(i, ft);
                for (std::size_t j = 0; j < to.size(); ++j) tt[j] = ft[pos[j]];
                if (src.test(ts.encode(tt))) out.set(i);
            }
            comp.push_back(std::move(out));
        }
        std::vector<std::pair<std::string, std::string>> ren;
        for (std::size_t j = 0; j < to.size(); ++j)
            ren.emplace_back(ctx_var(static_cast<int>(j)), ctx_var(pos[j]));
        auto witness = syntax::rename_free_vars(C.subs_[to_id].elems[e].witness, ren);
        add(from_id, std::move(comp), std::move(witness));
    }

    void run() {
        const auto& sig = *C.sig_;
        int S = static_cast<int>(sig.sorts.size());
        for (int len = 0; len <= C.opt_.n_max; ++len) {
            std::vector<int> tup(len, 0);
            std::function<void(int)> gen = [&](int k) {
                if (k == len) {
                    C.ctx_index_[tup] = static_cast<int>(C.contexts_.size());
                    C.contexts_.push_back(tup);
                    return;
                }
                for (int s = 0; s < S; ++s) {
                    tup[k] = s;
                    gen(k + 1);
                }
            };
            if (len == 0 || S > 0) gen(0);
        }
        C.subs_.resize(C.contexts_.size());
        for (std::size_t i = 0; i < C.contexts_.size(); ++i)
            C.subs_[i].ctx = C.contexts_[i];

        maps_into.resize(C.contexts_.size());
        for (std::size_t to = 0; to < C.contexts_.size(); ++to) {
            const Ctx& t = C.contexts_[to];
            for (std::size_t from = 0; from < C.contexts_.size(); ++from) {
                const Ctx& f = C.contexts_[from];
                std::vector<int> pos(t.size());
                std::function<void(std::size_t)> gen = [&](std::size_t j) {
                    if (j == t.size()) {
                        if (from != to || !is_identity(pos))
                            maps_into[to].emplace_back(static_cast<int>(from), pos);
                        return;
                    }
                    for (std::size_t i = 0; i < f.size(); ++i)
                        if (f[i] == t[j]) {
                            pos[j] = static_cast<int>(i);
                            gen(j + 1);
                        }
                };
                gen(0);
            }
        }

        for (std::size_t i = 0; i < C.contexts_.size(); ++i) seed(static_cast<int>(i));

        while (!work.empty() && !C.partial_) {
            auto [cid, e] = work.front();
            work.pop_front();
            std::size_t n_now = C.subs_[cid].elems.size();
            for (std::size_t o = 0; o < n_now && !C.partial_; ++o) {
                if (static_cast<int>(o) == e) continue;
                const auto we = C.subs_[cid].elems[e].witness;
                const auto wo = C.subs_[cid].elems[o].witness;
                add(cid, meet_comp(cid, e, static_cast<int>(o)), syntax::f_and(we, wo));
                if (C.partial_) break;
                add(cid, join_comp(cid, e, static_cast<int>(o)), syntax::f_or(we, wo));
            }
            if (C.partial_) break;
            image_drop_last(cid, e);
            if (C.partial_) break;
            for (auto& [from_id, pos] : maps_into[cid]) {
                pullback_into(from_id, pos, cid, e);
                if (C.partial_) break;
            }
        }
    }

    static bool is_identity(const std::vector<int>& pos) {
        for (std::size_t j = 0; j < pos.size(); ++j)
            if (pos[j] != static_cast<int>(j)) return false;
        return true;
    }
};

SemCat SemCat::saturate(std::vector<model::FinModel> family, Options opt) {
    if (family.empty()) throw std::invalid_argument("empty model family");
    SemCat C;
    C.sig_ = family[0].sig;
    for (auto& m : family)
        if (m.sig.get() != C.sig_.get() && m.sig->sorts != C.sig_->sorts)
            throw std::invalid_argument("family members over different signatures");
    C.family_ = std::move(family);
    C.opt_ = opt;
    Saturator sat(C);
    sat.run();
    C.pc_cache_.assign(C.contexts_.size(), {});
    return C;
}

// ------------------------------------------------------------------ queries

dlat::FinDistLattice SemCat::sub_as_dlat(int ctx_id) const {
    const SubLattice& L = subs_[ctx_id];
    int n = static_cast<int>(L.elems.size());
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) leq[a][b] = L.leq(a, b);
    return dlat::FinDistLattice::from_leq(std::move(leq));
}

int SemCat::meet(int ctx_id, int a, int b) const {
    const SubLattice& L = subs_[ctx_id];
    std::vector<BitVec> comp;
    for (std::size_t m = 0; m < family_.size(); ++m)
        comp.push_back(L.elems[a].comp[m] & L.elems[b].comp[m]);
    return L.find(comp);
}

int SemCat::join(int ctx_id, int a, int b) const {
    const SubLattice& L = subs_[ctx_id];
    std::vector<BitVec> comp;
    for (std::size_t m = 0; m < family_.size(); ++m)
        comp.push_back(L.elems[a].comp[m] | L.elems[b].comp[m]);
    return L.find(comp);
}

int SemCat::pseudocomplement(int ctx_id, int a) const {
    if (pc_cache_[ctx_id].empty())
        pc_cache_[ctx_id].assign(subs_[ctx_id].elems.size(), -2);
    int& cached = pc_cache_[ctx_id][a];
    if (cached != -2) return cached;
    const SubLattice& L = subs_[ctx_id];
    std::vector<BitVec> acc;
    for (std::size_t m = 0; m < family_.size(); ++m)
        acc.push_back(BitVec(L.elems[a].comp[m].size()));
    for (std::size_t v = 0; v < L.elems.size(); ++v) {
        bool disjoint = true;
        for (std::size_t m = 0; m < family_.size() && disjoint; ++m)
            disjoint = (L.elems[v].comp[m] & L.elems[a].comp[m]).none();
        if (disjoint)
            for (std::size_t m = 0; m < family_.size(); ++m) acc[m] |= L.elems[v].comp[m];
    }
    cached = L.find(acc);
    return cached;
}

std::pair<int, int> SemCat::image_keep(int ctx_id, int elem,
                                       const std::vector<int>& keep) const {
    const Ctx& ctx = contexts_[ctx_id];
    std::vector<int> order = keep;
    for (int i = 0; i < static_cast<int>(ctx.size()); ++i)
        if (std::find(keep.begin(), keep.end(), i) == keep.end()) order.push_back(i);
    Ctx permuted(ctx.size());
    for (std::size_t j = 0; j < order.size(); ++j) permuted[j] = ctx[order[j]];
    CoordMap f;
    f.from = permuted;
    f.to = ctx;
    f.pos.resize(ctx.size());
    for (std::size_t j = 0; j < order.size(); ++j) f.pos[order[j]] = static_cast<int>(j);
    int cur_ctx = ctx_index(permuted);
    int cur = pullback(f, ctx_id, elem);
    for (std::size_t k = ctx.size(); k > keep.size() && cur >= 0; --k) {
        Ctx prefix(contexts_[cur_ctx].begin(), contexts_[cur_ctx].end() - 1);
        std::vector<BitVec> comp;
        int last_sort = contexts_[cur_ctx].back();
        for (std::size_t m = 0; m < family_.size(); ++m) {
            const BitVec& src = subs_[cur_ctx].elems[cur].comp[m];
            long long kk = family_[m].carrier_size(last_sort);
            long long tot = family_[m].context_space(prefix).total;
            BitVec out(tot);
            for (long long i = 0; i < tot; ++i)
                for (long long v = 0; v < kk; ++v)
                    if (src.test(i * kk + v)) {
                        out.set(i);
                        break;
                    }
            comp.push_back(std::move(out));
        }
        cur_ctx = ctx_index(prefix);
        cur = subs_[cur_ctx].find(comp);
    }
    return {cur_ctx, cur};
}

int SemCat::pullback(const CoordMap& f, int elem_at_to) const {
    return pullback(f, ctx_index(f.to), elem_at_to);
}

int SemCat::pullback(const CoordMap& f, int to_id, int elem_at_to) const {
    int from_id = ctx_index(f.from);
    std::vector<BitVec> comp;
    for (std::size_t m = 0; m < family_.size(); ++m) {
        const BitVec& src = subs_[to_id].elems[elem_at_to].comp[m];
        TupleSpace fs = family_[m].context_space(f.from);
        TupleSpace ts = family_[m].context_space(f.to);
        BitVec out(fs.total);
        std::vector<int> ft, tt(f.to.size());
        for (long long i = 0; i < fs.total; ++i) {
            fs.decode(i, ft);
            for (std::size_t j = 0; j < f.to.size(); ++j) tt[j] = ft[f.pos[j]];
            if (src.test(ts.encode(tt))) out.set(i);
        }
        comp.push_back(std::move(out));
    }
    return subs_[from_id].find(comp);
}

std::pair<int, int> SemCat::box_product(int xid, int u, int yid, int v) const {
    Ctx xy = contexts_[xid];
    const Ctx& y = contexts_[yid];
    xy.insert(xy.end(), y.begin(), y.end());
    int xyid = ctx_index(xy);
    std::vector<BitVec> comp;
    for (std::size_t m = 0; m < family_.size(); ++m) {
        const BitVec& ub = subs_[xid].elems[u].comp[m];
        const BitVec& vb = subs_[yid].elems[v].comp[m];
        long long ty = family_[m].context_space(y).total;
        long long tx = family_[m].context_space(contexts_[xid]).total;
        BitVec out(tx * ty);
        for (long long i = 0; i < tx; ++i) {
            if (!ub.test(i)) continue;
            for (long long j = 0; j < ty; ++j)
                if (vb.test(j)) out.set(i * ty + j);
        }
        comp.push_back(std::move(out));
    }
    return {xyid, subs_[xyid].find(comp)};
}

SemCat::EvalFunctor SemCat::ev(int member) const {
    if (member < 0 || member >= static_cast<int>(family_.size()))
        throw std::out_of_range("member index out of range");
    return EvalFunctor{this, member};
}

bool SemCat::EvalFunctor::verify_coherence(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    for (std::size_t cid = 0; cid < C->contexts_.size(); ++cid) {
        const SubLattice& L = C->subs_[cid];
        long long tot = C->space(member, static_cast<int>(cid)).total;
        if (L.bot >= 0 && L.elems[L.bot].comp[member].any()) return fail("bot not empty");
        if (L.top >= 0 &&
            L.elems[L.top].comp[member].count() != static_cast<std::size_t>(tot))
            return fail("top not full");
        for (std::size_t a = 0; a < L.elems.size(); ++a)
            for (std::size_t b = a + 1; b < L.elems.size(); ++b) {
                int mt = C->meet(static_cast<int>(cid), static_cast<int>(a),
                                 static_cast<int>(b));
                int jn = C->join(static_cast<int>(cid), static_cast<int>(a),
                                 static_cast<int>(b));
                if (mt < 0 || jn < 0) return fail("lattice not closed");
                if (L.elems[mt].comp[member] !=
                    (L.elems[a].comp[member] & L.elems[b].comp[member]))
                    return fail("meet not intersection");
                if (L.elems[jn].comp[member] !=
                    (L.elems[a].comp[member] | L.elems[b].comp[member]))
                    return fail("join not union");
            }
    }
    return true;
}

WeaklyBooleanResult SemCat::is_weakly_boolean() const {
    WeaklyBooleanResult r;
    for (std::size_t cid = 0; cid < contexts_.size(); ++cid) {
        const SubLattice& L = subs_[cid];
        std::size_t n = L.elems.size();
        std::vector<std::vector<BitVec>> pcbits(n);
        for (std::size_t b = 0; b < n; ++b) {
            std::vector<BitVec> acc;
            for (std::size_t m = 0; m < family_.size(); ++m)
                acc.push_back(BitVec(L.elems[b].comp[m].size()));
            for (std::size_t v = 0; v < n; ++v) {
                bool disjoint = true;
                for (std::size_t m = 0; m < family_.size() && disjoint; ++m)
                    disjoint = (L.elems[v].comp[m] & L.elems[b].comp[m]).none();
                if (disjoint)
                    for (std::size_t m = 0; m < family_.size(); ++m)
                        acc[m] |= L.elems[v].comp[m];
            }
            pcbits[b] = std::move(acc);
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (L.leq(static_cast<int>(a), static_cast<int>(b))) continue;
                bool nonzero = false;
                for (std::size_t m = 0; m < family_.size() && !nonzero; ++m)
                    nonzero = (L.elems[a].comp[m] & pcbits[b][m]).any();
                if (!nonzero) {
                    r.yes = false;
                    r.ctx = contexts_[cid];
                    r.a = static_cast<int>(a);
                    r.b = static_cast<int>(b);
                    return r;
                }
            }
    }
    return r;
}

bool SemCat::is_two_valued() const {
    return subs_[ctx_index(Ctx{})].elems.size() == 2;
}

std::vector<int> SemCat::atom_subobjects(int ctx_id) const {
    const SubLattice& L = subs_[ctx_id];
    std::vector<int> out;
    for (std::size_t a = 0; a < L.elems.size(); ++a) {
        if (static_cast<int>(a) == L.bot) continue;
        bool atom = true;
        for (std::size_t c = 0; c < L.elems.size() && atom; ++c) {
            if (static_cast<int>(c) == L.bot || c == a) continue;
            if (L.leq(static_cast<int>(c), static_cast<int>(a))) atom = false;
        }
        if (atom) out.push_back(static_cast<int>(a));
    }
    return out;
}

bool SemCat::verify_witnesses(std::string* why) const {
    for (std::size_t cid = 0; cid < contexts_.size(); ++cid) {
        auto vars = ctx_vars(*sig_, contexts_[cid]);
        for (auto& d : subs_[cid].elems)
            for (std::size_t m = 0; m < family_.size(); ++m)
                if (model::eval_formula(family_[m], d.witness, vars) != d.comp[m]) {
                    if (why)
                        *why = "witness re-evaluates differently (member " +
                               std::to_string(m) + ")";
                    return false;
                }
    }
    return true;
}

bool SemCat::verify_fixpoint(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    for (std::size_t cid = 0; cid < contexts_.size(); ++cid) {
        const SubLattice& L = subs_[cid];
        for (std::size_t a = 0; a < L.elems.size(); ++a) {
            for (std::size_t b = 0; b < L.elems.size(); ++b)
                if (meet(static_cast<int>(cid), static_cast<int>(a), static_cast<int>(b)) < 0 ||
                    join(static_cast<int>(cid), static_cast<int>(a), static_cast<int>(b)) < 0)
                    return fail("meet/join escapes the family");
            if (!contexts_[cid].empty()) {
                std::vector<int> keep(contexts_[cid].size() - 1);
                for (std::size_t i = 0; i + 1 < contexts_[cid].size(); ++i)
                    keep[i] = static_cast<int>(i);
                if (image_keep(static_cast<int>(cid), static_cast<int>(a), keep).second < 0)
                    return fail("projection image escapes the family");
            }
        }
    }
    for (std::size_t to = 0; to < contexts_.size(); ++to) {
        auto maps = coord_maps_into(contexts_[to]);
        for (auto& f : maps)
            for (std::size_t e = 0; e < subs_[to].elems.size(); ++e)
                if (pullback(f, static_cast<int>(to), static_cast<int>(e)) < 0)
                    return fail("pullback escapes the family");
    }
    return true;
}

std::vector<CoordMap> SemCat::coord_maps_into(const Ctx& to) const {
    std::vector<CoordMap> out;
    for (auto& from : contexts_) {
        std::vector<int> pos(to.size());
        std::function<void(std::size_t)> gen = [&](std::size_t j) {
            if (j == to.size()) {
                out.push_back(CoordMap{from, to, pos});
                return;
            }
            for (std::size_t i = 0; i < from.size(); ++i)
                if (from[i] == to[j]) {
                    pos[j] = static_cast<int>(i);
                    gen(j + 1);
                }
        };
        gen(0);
    }
    return out;
}

}  // namespace posmt::semcat
