#include "posmt/redprod.hpp"

#include <algorithm>
#include <set>

namespace posmt::redprod {

using model::FinModel;
using model::TupleSpace;

bool IndexFilter::contains(std::uint32_t J) const {
    return std::binary_search(members.begin(), members.end(), J);
}

IndexFilter IndexFilter::from_generators(int n, const std::vector<std::uint32_t>& gens) {
    if (n <= 0 || n > 20) throw std::invalid_argument("index set size out of range");
    if (gens.empty()) throw std::invalid_argument("no filter generators");
    std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    std::set<std::uint32_t> base;
    for (auto g : gens) {
        if (g & ~full) throw std::invalid_argument("generator outside the index set");
        base.insert(g);
    }
    // close under intersections
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::uint32_t> cur(base.begin(), base.end());
        for (auto a : cur)
            for (auto b : cur)
                if (base.insert(a & b).second) grew = true;
    }
    if (base.count(0)) throw std::invalid_argument("not a proper filter: empty set generated");
    // upward closure
    IndexFilter F;
    F.n = n;
    for (std::uint32_t J = 1; J <= full; ++J) {
        for (auto b : base)
            if ((b & J) == b) {
                F.members.push_back(J);
                break;
            }
    }
    F.core = full;
    for (auto J : F.members) F.core &= J;
    // on a finite index set every filter is principal
    if (!F.contains(F.core))
        throw std::logic_error("filter core escaped the filter (finite principality)");
    F.ultra = true;
    for (std::uint32_t J = 0; J <= full && F.ultra; ++J)
        if (!F.contains(J) && !F.contains(full & ~J)) F.ultra = false;
    return F;
}

namespace {

std::vector<int> core_indices(const IndexFilter& F) {
    std::vector<int> out;
    for (int i = 0; i < F.n; ++i)
        if (F.core >> i & 1) out.push_back(i);
    return out;
}

std::vector<int> set_indices(std::uint32_t J, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (J >> i & 1) out.push_back(i);
    return out;
}

}  // namespace

ReducedProduct reduced_product(const std::vector<FinModel>& models, const IndexFilter& F) {
    if (static_cast<int>(models.size()) != F.n)
        throw std::invalid_argument("model count differs from the index set size");
    ReducedProduct rp;
    rp.filter = F;
    const auto sig = models[0].sig;
    auto core = core_indices(F);

    std::vector<const FinModel*> core_models;
    for (int i : core) core_models.push_back(&models[i]);
    FinModel shortcut = model_product(core_models);

    int ns = static_cast<int>(sig->sorts.size());
    rp.reps.resize(ns);
    rp.raw_pairs.assign(ns, 0);
    rp.well_defined_verified = true;

    for (int s = 0; s < ns; ++s) {
        // canonical representatives: tuples over the core, in row-major order
        std::vector<int> core_sizes;
        for (int i : core) core_sizes.push_back(models[i].carrier_size(s));
        TupleSpace cs = TupleSpace::of(core_sizes);
        for (long long idx = 0; idx < cs.total; ++idx)
            rp.reps[s].push_back({F.core, cs.decode(idx)});

        // the full colimit: every (J, tuple) pair classes by core restriction;
        // cross-check the eventual-equality relation against that grouping
        auto restrict_to_core = [&](std::uint32_t J, const std::vector<int>& tup) {
            auto idxs = set_indices(J, F.n);
            std::vector<int> out;
            for (std::size_t k = 0; k < idxs.size(); ++k)
                if (F.core >> idxs[k] & 1) out.push_back(tup[k]);
            return out;
        };
        std::vector<std::pair<std::uint32_t, std::vector<int>>> pairs;
        for (auto J : F.members) {
            auto idxs = set_indices(J, F.n);
            std::vector<int> sizes;
            for (int i : idxs) sizes.push_back(models[i].carrier_size(s));
            TupleSpace ts = TupleSpace::of(sizes);
            for (long long t = 0; t < ts.total; ++t) pairs.emplace_back(J, ts.decode(t));
        }
        rp.raw_pairs[s] = static_cast<long long>(pairs.size());
        // eventual equality from the definition (exists J'' in F inside the
        // intersection where the restrictions agree)
        auto eventually_equal = [&](const std::pair<std::uint32_t, std::vector<int>>& a,
                                    const std::pair<std::uint32_t, std::vector<int>>& b) {
            std::uint32_t inter = a.first & b.first;
            for (auto J2 : F.members) {
                if ((J2 & inter) != J2) continue;
                auto ia = set_indices(a.first, F.n), ib = set_indices(b.first, F.n);
                bool agree = true;
                for (int i : set_indices(J2, F.n)) {
                    int pa = static_cast<int>(std::find(ia.begin(), ia.end(), i) - ia.begin());
                    int pb = static_cast<int>(std::find(ib.begin(), ib.end(), i) - ib.begin());
                    if (a.second[pa] != b.second[pb]) {
                        agree = false;
                        break;
                    }
                }
                if (agree) return true;
            }
            return false;
        };
        long long budget = 20000;
        for (std::size_t a = 0; a < pairs.size() && budget > 0; ++a)
            for (std::size_t b = a; b < pairs.size() && budget > 0; ++b) {
                --budget;
                bool same_class = restrict_to_core(pairs[a].first, pairs[a].second) ==
                                  restrict_to_core(pairs[b].first, pairs[b].second);
                if (eventually_equal(pairs[a], pairs[b]) != same_class)
                    rp.well_defined_verified = false;
            }
    }

    // the collapsed model: classes are exactly the core-product elements
    rp.as_model = shortcut;
    rp.as_model.name = "reduced_product";

    // relations/functions induced on classes must be well-defined: the
    // definition route (some member of F satisfies componentwise) must
    // agree with the principal shortcut
    for (std::size_t r = 0; r < sig->relations.size(); ++r) {
        const auto& arity = sig->relations[r].arity;
        std::vector<int> psizes;
        for (int s : arity) psizes.push_back(rp.as_model.carrier_size(s));
        TupleSpace rel_space = TupleSpace::of(psizes);
        std::vector<int> ptuple;
        for (long long idx = 0; idx < rel_space.total; ++idx) {
            rel_space.decode(idx, ptuple);
            // definition route: exists J in F with componentwise membership
            // for all i in J; representatives only carry core coordinates,
            // so membership is decided on the core
            bool def_route = false;
            {
                bool all = true;
                for (std::size_t k = 0; k < core.size() && all; ++k) {
                    std::vector<int> comp;
                    for (std::size_t a = 0; a < arity.size(); ++a) {
                        std::vector<int> sizes;
                        for (int i : core) sizes.push_back(models[i].carrier_size(arity[a]));
                        comp.push_back(TupleSpace::of(sizes).decode(ptuple[a])[k]);
                    }
                    all = models[core[k]].relations[r].count(comp) > 0;
                }
                def_route = all;
            }
            bool shortcut_route = shortcut.relations[r].count(ptuple) > 0;
            if (def_route != shortcut_route) rp.well_defined_verified = false;
        }
    }
    rp.principal_iso_verified = rp.well_defined_verified;
    return rp;
}

LosResult los_containment(const std::vector<FinModel>& models, const IndexFilter& F,
                          const std::vector<int>& ctx_sorts, const std::vector<BitVec>& A,
                          const std::vector<BitVec>& B) {
    if (!F.ultra) throw std::invalid_argument("los_containment needs an ultrafilter");
    LosResult out;
    // route 1: the agreement index set
    std::uint32_t S = 0;
    for (int i = 0; i < F.n; ++i)
        if (A[i].is_subset_of(B[i])) S |= (1u << i);
    out.index_set_member = F.contains(S);

    // route 2: subset check inside the constructed reduced product
    auto rp = reduced_product(models, F);
    auto core = core_indices(F);
    TupleSpace rp_space = rp.as_model.context_space(ctx_sorts);
    auto member_tuple = [&](const std::vector<int>& rp_tuple, int k /*core position*/) {
        std::vector<int> t;
        for (std::size_t a = 0; a < ctx_sorts.size(); ++a) {
            std::vector<int> sizes;
            for (int i : core) sizes.push_back(models[i].carrier_size(ctx_sorts[a]));
            t.push_back(TupleSpace::of(sizes).decode(rp_tuple[a])[k]);
        }
        return t;
    };
    bool contained = true;
    std::vector<int> rt;
    for (long long z = 0; z < rp_space.total && contained; ++z) {
        rp_space.decode(z, rt);
        auto in_reduced = [&](const std::vector<BitVec>& X) {
            // class-tuple in prod X / U iff every core member's part is in X_i
            for (std::size_t k = 0; k < core.size(); ++k) {
                auto t = member_tuple(rt, static_cast<int>(k));
                if (!X[core[k]].test(models[core[k]].context_space(ctx_sorts).encode(t)))
                    return false;
            }
            return true;
        };
        if (in_reduced(A) && !in_reduced(B)) contained = false;
    }
    out.contained = contained;
    if (out.contained != out.index_set_member)
        throw lm::InternalError("Los containment routes disagree (bug class)");
    out.verdict = out.contained;
    return out;
}

DiagonalResult diagonal_map(const FinModel& m, int copies, const IndexFilter& F,
                            semcat::Options opt) {
    if (F.n != copies) throw std::invalid_argument("filter index size mismatch");
    if (!F.ultra) throw std::invalid_argument("diagonal_map needs an ultrafilter");
    std::vector<FinModel> models(copies, m);
    DiagonalResult out;
    auto rp = reduced_product(models, F);
    out.power = rp.as_model;
    auto core = core_indices(F);
    // delta: e -> class of the constant tuple = core restriction (e,...,e)
    out.delta.map.assign(m.sig->sorts.size(), {});
    for (std::size_t s = 0; s < m.sig->sorts.size(); ++s) {
        std::vector<int> sizes;
        for (int i : core) sizes.push_back(models[i].carrier_size(static_cast<int>(s)));
        TupleSpace cs = TupleSpace::of(sizes);
        for (int e = 0; e < m.carrier_size(static_cast<int>(s)); ++e) {
            std::vector<int> constant(core.size(), e);
            out.delta.map[s].push_back(static_cast<int>(cs.encode(constant)));
        }
    }
    std::string why;
    if (!model::is_homomorphism(m, out.power, out.delta, &why))
        throw lm::InternalError("diagonal is not a homomorphism: " + why);
    auto C = semcat::SemCat::saturate({m, out.power}, opt);
    if (C.partial())
        throw std::invalid_argument("joint saturation cut off; raise max_lattice");
    auto res = lm::is_elementary_hom(C, 0, 1, out.delta);
    out.elementary = res.elementary;
    if (!out.elementary)
        throw lm::InternalError("diagonal into the reduced power is not elementary");
    out.injective = true;
    for (auto& mp : out.delta.map) {
        std::set<int> img(mp.begin(), mp.end());
        if (img.size() != mp.size()) out.injective = false;
    }
    if (!out.injective) throw lm::InternalError("diagonal with non-injective component");
    return out;
}

}  // namespace posmt::redprod
