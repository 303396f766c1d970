#include "posmt/subfunctor.hpp"

#include <sstream>

#include "posmt/invariant.hpp"

namespace posmt::subf {

using semcat::Ctx;
using semcat::SemCat;
using semcat::SubLattice;

SortSubsetFamily parse_family(const std::string& text, const model::FinModel& m,
                              const std::string& filename) {
    SortSubsetFamily fam;
    const auto& sig = *m.sig;
    fam.per_sort.clear();
    for (std::size_t s = 0; s < sig.sorts.size(); ++s)
        fam.per_sort.push_back(BitVec(m.carrier_size(static_cast<int>(s))));
    // reuse the model DSL shape: "A = {0, 1}" per line, '#' comments
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string stripped;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
        if (stripped.empty()) continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw syntax::ParseError(filename, {lineno, 1}, "expected 'Sort = {elems}'");
        std::string name = stripped.substr(0, eq);
        int si = sig.sort_index(name);
        if (si < 0) throw syntax::ParseError(filename, {lineno, 1}, "unknown sort " + name);
        std::string body = stripped.substr(eq + 1);
        if (body.size() < 2 || body.front() != '{' || body.back() != '}')
            throw syntax::ParseError(filename, {lineno, 1}, "expected '{elems}'");
        body = body.substr(1, body.size() - 2);
        std::istringstream bs(body);
        std::string e;
        while (std::getline(bs, e, ',')) {
            if (e.empty()) continue;
            int idx = -1;
            for (std::size_t k = 0; k < m.carriers[si].size(); ++k)
                if (m.carriers[si][k] == e) idx = static_cast<int>(k);
            if (idx < 0)
                throw syntax::ParseError(filename, {lineno, 1},
                                         "element " + e + " not in carrier of " + name);
            fam.per_sort[si].set(idx);
        }
    }
    return fam;
}

namespace {

// N(x): box product of the per-sort subsets over the member's tuple space
BitVec box_of(const SemCat& C, int member, int ctx_id, const SortSubsetFamily& fam) {
    const Ctx& ctx = C.contexts()[ctx_id];
    auto space = C.space(member, ctx_id);
    BitVec out(space.total);
    std::vector<int> t;
    for (long long i = 0; i < space.total; ++i) {
        space.decode(i, t);
        bool in = true;
        for (std::size_t k = 0; k < ctx.size() && in; ++k) in = fam.per_sort[ctx[k]].test(t[k]);
        if (in) out.set(i);
    }
    return out;
}

}  // namespace

TVResult tv_check(const SemCat& C, int member, const SortSubsetFamily& fam) {
    TVResult r;
    std::vector<BitVec> boxes(C.contexts().size());
    for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid)
        boxes[cid] = box_of(C, member, cid, fam);

    for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
        const Ctx& ctx = C.contexts()[cid];
        if (ctx.empty()) continue;
        const SubLattice& L = C.sub(cid);
        for (int split = 1; split <= static_cast<int>(ctx.size()); ++split) {
            // prefix = positions [0, split), suffix = [split, len)
            Ctx suffix(ctx.begin() + split, ctx.end());
            long long st = 1;
            for (int s : suffix) st *= C.family()[member].carrier_size(s);
            long long pt = C.space(member, cid).total / std::max<long long>(st, 1);
            BitVec suffix_box(st);
            {
                auto sp = model::TupleSpace::of([&] {
                    std::vector<int> sz;
                    for (int s : suffix) sz.push_back(C.family()[member].carrier_size(s));
                    return sz;
                }());
                std::vector<int> t;
                for (long long i = 0; i < st; ++i) {
                    sp.decode(i, t);
                    bool in = true;
                    for (std::size_t k = 0; k < suffix.size() && in; ++k)
                        in = fam.per_sort[suffix[k]].test(t[k]);
                    if (in) suffix_box.set(i);
                }
            }
            BitVec prefix_box(pt);
            {
                Ctx prefix(ctx.begin(), ctx.begin() + split);
                auto sp = model::TupleSpace::of([&] {
                    std::vector<int> sz;
                    for (int s : prefix) sz.push_back(C.family()[member].carrier_size(s));
                    return sz;
                }());
                std::vector<int> t;
                for (long long i = 0; i < pt; ++i) {
                    sp.decode(i, t);
                    bool in = true;
                    for (std::size_t k = 0; k < prefix.size() && in; ++k)
                        in = fam.per_sort[prefix[k]].test(t[k]);
                    if (in) prefix_box.set(i);
                }
            }
            for (int e = 0; e < static_cast<int>(L.elems.size()); ++e) {
                const BitVec& phi = L.elems[e].comp[member];
                // row-major with the suffix fastest: index = p * st + s
                BitVec proj_p(st), proj_q(st);
                for (long long p = 0; p < pt; ++p)
                    for (long long s = 0; s < st; ++s) {
                        if (!phi.test(p * st + s) || !suffix_box.test(s)) continue;
                        proj_p.set(s);
                        if (prefix_box.test(p)) proj_q.set(s);
                    }
                if (proj_p != proj_q) {
                    r.yes = false;
                    r.ctx_id = cid;
                    r.split = split;
                    r.elem = e;
                    return r;
                }
            }
        }
    }
    return r;
}

Extension tv_extend(const SemCat& C, int member, const SortSubsetFamily& fam) {
    Extension ext;
    ext.box.resize(C.contexts().size());
    ext.of_def.resize(C.contexts().size());
    for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
        ext.box[cid] = box_of(C, member, cid, fam);
        const SubLattice& L = C.sub(cid);
        ext.of_def[cid].reserve(L.elems.size());
        for (auto& d : L.elems) ext.of_def[cid].push_back(ext.box[cid] & d.comp[member]);
    }
    return ext;
}

VerifyReport verify_subfunctor(const SemCat& C, int member, const Extension& ext) {
    VerifyReport rep;
    auto fail = [&](const std::string& m) {
        rep.ok = false;
        rep.first_failure = m;
        return rep;
    };
    for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
        const SubLattice& L = C.sub(cid);
        int n = static_cast<int>(L.elems.size());
        // lattice compatibility
        if (L.bot >= 0 && ext.of_def[cid][L.bot].any()) return fail("N(bot) not empty");
        if (L.top >= 0 && ext.of_def[cid][L.top] != ext.box[cid])
            return fail("N(top) differs from N(x)");
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                int mw = C.meet(cid, a, b), jw = C.join(cid, a, b);
                if (mw < 0 || jw < 0) continue;
                if (ext.of_def[cid][mw] != (ext.of_def[cid][a] & ext.of_def[cid][b]))
                    return fail("N(u /\\ v) != N(u) /\\ N(v)");
                if (ext.of_def[cid][jw] != (ext.of_def[cid][a] | ext.of_def[cid][b]))
                    return fail("N(u \\/ v) != N(u) \\/ N(v)");
            }
        // elementarity: N(u) = N(x) /\ ev(u)
        for (int a = 0; a < n; ++a)
            if (ext.of_def[cid][a] != (ext.box[cid] & L.elems[a].comp[member]))
                return fail("N(u) != N(x) /\\ ev(u)");
        // coherence: N(exists u) = projection of N(u) (drop last coordinate)
        const Ctx& ctx = C.contexts()[cid];
        if (!ctx.empty()) {
            Ctx prefix(ctx.begin(), ctx.end() - 1);
            int pid = C.ctx_index(prefix);
            long long k = C.family()[member].carrier_size(ctx.back());
            long long tot = C.space(member, pid).total;
            for (int a = 0; a < n; ++a) {
                std::vector<int> keep(ctx.size() - 1);
                for (std::size_t i = 0; i + 1 < ctx.size(); ++i) keep[i] = static_cast<int>(i);
                auto [icid, ielem] = C.image_keep(cid, a, keep);
                if (ielem < 0) continue;
                BitVec proj(tot);
                for (long long i = 0; i < tot; ++i)
                    for (long long v = 0; v < k; ++v)
                        if (ext.of_def[cid][a].test(i * k + v)) {
                            proj.set(i);
                            break;
                        }
                if (ext.of_def[icid][ielem] != proj)
                    return fail("N(exists u) != projection of N(u)");
            }
            // product preservation across the split
            for (int split = 1; split < static_cast<int>(ctx.size()); ++split) {
                Ctx pre(ctx.begin(), ctx.begin() + split);
                Ctx suf(ctx.begin() + split, ctx.end());
                int pc = C.ctx_index(pre), sc = C.ctx_index(suf);
                long long st = C.space(member, sc).total;
                long long ptt = C.space(member, pc).total;
                BitVec want(ptt * st);
                for (long long p = 0; p < ptt; ++p) {
                    if (!ext.box[pc].test(p)) continue;
                    for (long long s = 0; s < st; ++s)
                        if (ext.box[sc].test(s)) want.set(p * st + s);
                }
                if (ext.box[cid] != want) return fail("N(x * y) != N(x) x N(y)");
            }
        }
    }
    return rep;
}

P26Result poscl_subfunctor_check(const SemCat& C, int member, const SortSubsetFamily& fam) {
    P26Result r;
    std::vector<BitVec> boxes(C.contexts().size());
    for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid)
        boxes[cid] = box_of(C, member, cid, fam);

    for (int cid = 0; cid < static_cast<int>(C.contexts().size()) && r.yes; ++cid) {
        const Ctx& ctx = C.contexts()[cid];
        const SubLattice& L = C.sub(cid);
        for (int split = 0; split <= static_cast<int>(ctx.size()) && r.yes; ++split) {
            Ctx suffix(ctx.begin() + split, ctx.end());
            int scid = C.ctx_index(suffix);
            long long st = C.space(member, scid).total;
            long long pt = C.space(member, cid).total / std::max<long long>(st, 1);
            std::vector<int> keep;
            for (int i = split; i < static_cast<int>(ctx.size()); ++i) keep.push_back(i);
            for (int e = 0; e < static_cast<int>(L.elems.size()) && r.yes; ++e) {
                // exists_pi(phi): image onto the suffix
                auto [icid, iphi] = ctx.empty() && split == 0
                                        ? std::pair<int, int>{cid, e}
                                        : C.image_keep(cid, e, keep);
                if (iphi < 0) continue;  // cut-off category
                // cover = proj_suffix(ev(phi) /\ N-box) u union of chi's
                BitVec cover(st);
                const BitVec& phi = L.elems[e].comp[member];
                for (long long p = 0; p < pt; ++p)
                    for (long long s = 0; s < st; ++s)
                        if (phi.test(p * st + s) && boxes[cid].test(p * st + s)) cover.set(s);
                const SubLattice& SL = C.sub(scid);
                for (int chi = 0; chi < static_cast<int>(SL.elems.size()); ++chi) {
                    bool disjoint = true;
                    for (std::size_t m = 0; m < C.family().size() && disjoint; ++m)
                        disjoint =
                            (SL.elems[chi].comp[m] & SL.elems[iphi].comp[m]).none();
                    if (disjoint) cover |= SL.elems[chi].comp[member];
                }
                if (!boxes[scid].is_subset_of(cover)) {
                    r.yes = false;
                    r.ctx_id = cid;
                    r.split = split;
                    r.elem = e;
                }
            }
        }
    }
    if (r.yes) {
        // the conclusion, as executable assertions
        auto tv = tv_check(C, member, fam);
        if (!tv.yes)
            throw lm::InternalError("positively-closed condition held but TV failed");
        auto ext = tv_extend(C, member, fam);
        auto rep = verify_subfunctor(C, member, ext);
        r.extension_verified = rep.ok;
        if (!rep.ok)
            throw lm::InternalError("extension verification failed: " + rep.first_failure);
        std::string why;
        r.extension_positively_closed = is_positively_closed_extension(C, member, ext, &why);
        if (!r.extension_positively_closed)
            throw lm::InternalError("extension not positively closed: " + why);
    }
    return r;
}

bool is_positively_closed_extension(const SemCat& C, int member, const Extension& ext,
                                    std::string* why) {
    for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
        const SubLattice& L = C.sub(cid);
        long long tot = C.space(member, cid).total;
        for (int u = 0; u < static_cast<int>(L.elems.size()); ++u) {
            int pc = C.pseudocomplement(cid, u);
            const BitVec* pcb = pc >= 0 ? &L.elems[pc].comp[member] : nullptr;
            for (long long a = 0; a < tot; ++a) {
                if (!ext.box[cid].test(a)) continue;
                if (L.elems[u].comp[member].test(a)) continue;
                if (pcb && pcb->test(a)) continue;
                if (why)
                    *why = "point " + std::to_string(a) + " of N at context " +
                           std::to_string(cid) + " has no disjoint witness for def-set " +
                           std::to_string(u);
                return false;
            }
        }
    }
    return true;
}

}  // namespace posmt::subf
