#include "posmt/types.hpp"

namespace posmt::types {

using semcat::SemCat;
using semcat::SubLattice;

dlat::SpecSpace type_space(const SemCat& C, int ctx_id) {
    return dlat::spectrum(C.sub_as_dlat(ctx_id));
}

SomewhereDenseResult somewhere_dense(const SemCat& C, int ctx_id, const dlat::PrimeFilter& p) {
    const SubLattice& L = C.sub(ctx_id);
    // guard: the category must not be trivial (the sentence lattice of a
    // nonempty family always has bot != top, checked anyway)
    if (C.sub(semcat::Ctx{}).elems.size() < 2)
        throw std::invalid_argument("trivial category");
    SomewhereDenseResult r;
    int n = static_cast<int>(L.elems.size());
    auto meet_is_bot = [&](int a, int b) {
        for (std::size_t m = 0; m < C.family().size(); ++m)
            if ((L.elems[a].comp[m] & L.elems[b].comp[m]).any()) return false;
        return true;
    };
    for (int phi = 0; phi < n; ++phi) {
        if (phi == L.bot) continue;
        bool ok = true;
        for (int psi = 0; psi < n && ok; ++psi)
            ok = (p.member.test(psi) == !meet_is_bot(phi, psi));
        if (ok) {
            r.yes = true;
            r.witness = phi;
            break;
        }
    }
    if (r.yes) {
        // every somewhere dense type is a maximal filter
        auto S = dlat::spectrum(C.sub_as_dlat(ctx_id));
        for (auto& q : S.points)
            if (p.member.is_subset_of(q.member) && !(q.member == p.member))
                throw lm::InternalError("somewhere dense type is not maximal");
    }
    return r;
}

RealizedResult realized_by(const SemCat& C, int member, int ctx_id,
                           const dlat::PrimeFilter& p) {
    RealizedResult r;
    long long tot = C.space(member, ctx_id).total;
    for (long long e = 0; e < tot; ++e)
        if (lm::tp_bits(C, member, ctx_id, e) == p.member) {
            r.realized = true;
            r.witness_point = e;
            return r;
        }
    return r;
}

ArrowChecks spec_arrow_checks(const SemCat& C, const semcat::CoordMap& f) {
    ArrowChecks out;
    int from_id = C.ctx_index(f.from);
    int to_id = C.ctx_index(f.to);

    // monic: every from-position is used by some to-position
    std::vector<bool> used(f.from.size(), false);
    for (int p : f.pos) used[p] = true;
    out.monic = std::find(used.begin(), used.end(), false) == used.end();
    // effective epi: positions pairwise distinct and every dropped carrier
    // nonempty in every member
    std::set<int> distinct(f.pos.begin(), f.pos.end());
    out.eff_epi = distinct.size() == f.pos.size();
    if (out.eff_epi)
        for (std::size_t i = 0; i < f.from.size() && out.eff_epi; ++i) {
            if (used[i]) continue;
            for (std::size_t m = 0; m < C.family().size(); ++m)
                if (C.family()[m].carrier_size(f.from[i]) == 0) out.eff_epi = false;
        }

    auto Sx = dlat::spectrum(C.sub_as_dlat(from_id));
    auto Sy = dlat::spectrum(C.sub_as_dlat(to_id));
    // pullback of each Sub(to) element along f
    std::vector<int> pb(C.sub(to_id).elems.size());
    for (std::size_t v = 0; v < pb.size(); ++v) {
        pb[v] = C.pullback(f, to_id, static_cast<int>(v));
        if (pb[v] < 0) {
            out.detail = "pullback missing (cut-off category)";
            out.open_map = out.injective = out.surjective = false;
            return out;
        }
    }
    // S(f): prime filter p of Sub(from) -> { v : f*(v) in p }
    auto map_point = [&](const BitVec& p) {
        BitVec out_f(pb.size());
        for (std::size_t v = 0; v < pb.size(); ++v)
            if (p.test(pb[v])) out_f.set(v);
        return out_f;
    };
    std::vector<int> img(Sx.points.size(), -1);
    for (std::size_t i = 0; i < Sx.points.size(); ++i) {
        BitVec q = map_point(Sx.points[i].member);
        for (std::size_t j = 0; j < Sy.points.size(); ++j)
            if (Sy.points[j].member == q) img[i] = static_cast<int>(j);
        if (img[i] < 0) throw lm::InternalError("Spec(f) image is not a prime filter");
    }
    // open: the image of every basic open of Spec(from) is open in Spec(to)
    for (std::size_t e = 0; e < Sx.basic_open.size() && out.open_map; ++e) {
        BitVec image(Sy.points.size());
        Sx.basic_open[e].for_each_set([&](std::size_t i) { image.set(img[i]); });
        if (!Sy.is_open(image)) out.open_map = false;
    }
    // injective / surjective
    std::set<int> distinct_imgs(img.begin(), img.end());
    bool inj = distinct_imgs.size() == img.size();
    bool surj = distinct_imgs.size() == Sy.points.size();
    out.injective = !out.monic || inj;
    out.surjective = !out.eff_epi || surj;
    if (out.monic && !inj) out.detail = "monic map with non-injective spectrum action";
    if (out.eff_epi && !surj) out.detail = "effective epi with non-surjective spectrum action";
    return out;
}

CompletenessReport semantic_completeness_analysis(const SemCat& C) {
    CompletenessReport rep;
    rep.weakly_boolean = C.is_weakly_boolean().yes;
    rep.two_valued = C.is_two_valued();
    std::size_t k = C.family().size();
    for (int cid = 0; cid < static_cast<int>(C.contexts().size()) && rep.pairwise_equivalent;
         ++cid) {
        const SubLattice& L = C.sub(cid);
        int n = static_cast<int>(L.elems.size());
        for (int a = 0; a < n && rep.pairwise_equivalent; ++a)
            for (int b = 0; b < n && rep.pairwise_equivalent; ++b)
                for (std::size_t i = 0; i < k && rep.pairwise_equivalent; ++i)
                    for (std::size_t j = i + 1; j < k; ++j) {
                        bool ci = L.elems[a].comp[i].is_subset_of(L.elems[b].comp[i]);
                        bool cj = L.elems[a].comp[j].is_subset_of(L.elems[b].comp[j]);
                        if (ci != cj) {
                            rep.pairwise_equivalent = false;
                            rep.ctx_id = cid;
                            rep.a = a;
                            rep.b = b;
                            rep.member_i = static_cast<int>(i);
                            rep.member_j = static_cast<int>(j);
                            break;
                        }
                    }
    }
    rep.implication_holds =
        !(rep.weakly_boolean && rep.two_valued) || rep.pairwise_equivalent;
    return rep;
}

std::vector<OmittedTypeRow> realization_table(const SemCat& C, int ctx_id) {
    auto S = dlat::spectrum(C.sub_as_dlat(ctx_id));
    std::vector<OmittedTypeRow> out;
    for (std::size_t t = 0; t < S.points.size(); ++t) {
        OmittedTypeRow row;
        row.type_index = static_cast<int>(t);
        for (std::size_t m = 0; m < C.family().size(); ++m) {
            auto r =
                realized_by(C, static_cast<int>(m), ctx_id, dlat::PrimeFilter{S.points[t].member});
            row.realizer.push_back(r.realized ? r.witness_point : -1);
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace posmt::types
