#include "posmt/cli_runners.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "posmt/dlat.hpp"
#include "posmt/invariant.hpp"
#include "posmt/model.hpp"
#include "posmt/redprod.hpp"
#include "posmt/subfunctor.hpp"
#include "posmt/syntax.hpp"
#include "posmt/types.hpp"

namespace posmt::cli {

namespace {

using semcat::Ctx;
using semcat::SemCat;

std::string ctx_name(const SemCat& C, int cid) {
    const Ctx& ctx = C.contexts()[cid];
    std::string s = "[";
    for (std::size_t i = 0; i < ctx.size(); ++i)
        s += (i ? "," : "") + C.sig().sorts[ctx[i]];
    return s + "]";
}

std::string point_name(const SemCat& C, int member, int cid, long long pt) {
    auto space = C.space(member, cid);
    auto t = space.decode(pt);
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i)
        s += (i ? "," : "") + C.family()[member].carriers[C.contexts()[cid][i]][t[i]];
    return s + ")";
}

void put_config(Report& rep, const GlobalOptions& opt) {
    rep.config.emplace_back("nmax", std::to_string(opt.n_max));
    rep.config.emplace_back("max-lattice", std::to_string(opt.max_lattice));
    rep.config.emplace_back("seed", std::to_string(opt.seed));
}

semcat::Options sat_opts(const GlobalOptions& opt) {
    return {.n_max = opt.n_max, .max_lattice = opt.max_lattice};
}

int gen_bound_of(const GlobalOptions& opt, const SemCat& C) {
    return opt.lm_gen_bound >= 0 ? opt.lm_gen_bound : lm::default_gen_bound(C);
}

}  // namespace

RunResult run_analyze(const std::string& theory_text,
                      const std::vector<std::string>& model_texts, GlobalOptions opt) {
    RunResult out;
    Report& rep = out.report;
    rep.command = "analyze";
    put_config(rep, opt);
    try {
        auto th = syntax::parse_theory(theory_text, "theory");
        std::vector<model::FinModel> family;
        for (std::size_t i = 0; i < model_texts.size(); ++i)
            family.push_back(
                model::parse_model(model_texts[i], th.sig, "model" + std::to_string(i)));
        if (family.empty()) throw std::invalid_argument("no models given");

        // axiom check per model
        auto& ax = rep.section("axioms");
        bool all_hold = true;
        for (std::size_t m = 0; m < family.size(); ++m)
            for (std::size_t a = 0; a < th.axioms.size(); ++a) {
                auto res = model::check_sequent(family[m], th.axioms[a]);
                std::string key =
                    "model " + std::to_string(m) + " axiom " + std::to_string(a);
                if (res.holds) {
                    rep.kv(ax, key, "holds");
                } else {
                    std::string w = "(";
                    for (std::size_t k = 0; k < res.witness.size(); ++k)
                        w += (k ? "," : "") +
                             family[m]
                                 .carriers[th.axioms[a].context[k].second][res.witness[k]];
                    rep.kv(ax, key, "fails at " + w + ")");
                    all_hold = false;
                }
            }
        if (!all_hold) {
            rep.verdicts.push_back("axiom check failed");
            out.exit_code = kAxiomFailure;
            return out;
        }
        if (th.axioms.empty()) rep.kv(ax, "axioms", "none");

        SemCat C = SemCat::saturate(family, sat_opts(opt));
        int G = gen_bound_of(opt, C);
        rep.config.emplace_back("lm-gen-bound", std::to_string(G));
        if (C.partial()) {
            rep.audit.push_back(
                "saturation cut off at max-lattice; completeness-sensitive verdicts "
                "unavailable");
            rep.verdicts.push_back("partial saturation");
            return out;
        }

        auto& lat = rep.section("sub-lattices");
        for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
            const auto& L = C.sub(cid);
            std::string v = "size " + std::to_string(L.elems.size()) + ", atoms " +
                            std::to_string(C.atom_subobjects(cid).size());
            rep.kv(lat, ctx_name(C, cid), v);
        }

        auto& ts = rep.section("type-spaces");
        for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
            auto S = types::type_space(C, cid);
            int edges = 0;
            for (std::size_t q = 0; q < S.points.size(); ++q)
                for (std::size_t p = 0; p < S.points.size(); ++p)
                    if (q != p && S.specializes[q][p]) ++edges;
            rep.kv(ts, ctx_name(C, cid),
                   std::to_string(S.points.size()) + " types, " + std::to_string(edges) +
                       " specializations");
        }

        auto& real = rep.section("realization");
        for (int cid = 0; cid < static_cast<int>(C.contexts().size()); ++cid) {
            if (C.contexts()[cid].size() > 1) continue;  // table kept short
            auto table = types::realization_table(C, cid);
            for (auto& row : table) {
                std::string v;
                for (std::size_t m = 0; m < row.realizer.size(); ++m) {
                    if (m) v += ", ";
                    v += "model " + std::to_string(m) + ": ";
                    v += row.realizer[m] < 0
                             ? "omitted"
                             : "realized by " +
                                   point_name(C, static_cast<int>(m), cid, row.realizer[m]);
                }
                rep.kv(real, ctx_name(C, cid) + " type " + std::to_string(row.type_index), v);
            }
        }

        auto& lmsec = rep.section("lm");
        for (std::size_t m = 0; m < family.size(); ++m) {
            auto lmres = lm::lm_compute(C, static_cast<int>(m), G);
            auto direct = lm::is_positively_closed_direct(C, static_cast<int>(m), G);
            bool direct_yes = direct.yes;
            if (opt.inject_lm_fault) direct_yes = !direct_yes;  // negative-control hook
            if (direct_yes != (lmres.size() == 2))
                throw lm::InternalError(
                    "positive-closedness characterizations disagree (|LM| vs direct)");
            rep.kv(lmsec, "model " + std::to_string(m),
                   "|LM| = " + std::to_string(lmres.size()) +
                       (direct_yes ? ", positively closed" : ", not positively closed") +
                       " (contexts up to length " + std::to_string(G) + ")");
            for (auto& a : lmres.audit) rep.audit.push_back("model " + std::to_string(m) +
                                                            " lm: " + a);
            if (!direct.yes && direct.ctx_id >= 0)
                rep.kv(lmsec, "model " + std::to_string(m) + " counterexample",
                       "def-set " +
                           syntax::print_formula(
                               C.sig(), C.sub(direct.ctx_id).elems[direct.elem].witness) +
                           " at " + ctx_name(C, direct.ctx_id) + " point " +
                           point_name(C, static_cast<int>(m), direct.ctx_id, direct.point));
        }

        auto& comp = rep.section("semantic-completeness");
        auto screp = types::semantic_completeness_analysis(C);
        rep.kv(comp, "weakly-boolean", screp.weakly_boolean ? "yes" : "no");
        rep.kv(comp, "two-valued", screp.two_valued ? "yes" : "no");
        rep.kv(comp, "pairwise-elementary-equivalent",
               screp.pairwise_equivalent ? "yes" : "no");
        if (!screp.implication_holds)
            throw lm::InternalError("weakly Boolean + 2-valued family not equivalent");
        rep.kv(comp, "note",
               "wB and 2V imply pairwise equivalence; the converse direction is not "
               "decided by a finite family");
        rep.audit.push_back("all verdicts relative to context bound nmax = " +
                            std::to_string(opt.n_max));
        rep.verdicts.push_back("ok");
    } catch (const syntax::ParseError& e) {
        rep.verdicts.push_back(std::string("parse error: ") + e.what());
        out.exit_code = kParseError;
    } catch (const lm::InternalError& e) {
        rep.verdicts.push_back(std::string("internal disagreement: ") + e.what());
        out.exit_code = kInternalDisagreement;
    } catch (const std::invalid_argument& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    }
    return out;
}

RunResult run_posetal_import(const std::string& lattice_text, const std::string& filter_text,
                             GlobalOptions opt) {
    RunResult out;
    Report& rep = out.report;
    rep.command = "posetal-import";
    put_config(rep, opt);
    try {
        std::istringstream in(lattice_text);
        auto K = dlat::read_lattice(in);
        auto p = dlat::parse_prime_filter(K, filter_text);

        // one sort per element; one one-point-or-empty model per prime filter
        auto sig = std::make_shared<syntax::Signature>();
        for (int e = 0; e < K.n(); ++e) sig->sorts.push_back("e" + std::to_string(e));
        auto S = dlat::spectrum(K);
        std::vector<model::FinModel> family;
        int p_index = -1;
        for (std::size_t q = 0; q < S.points.size(); ++q) {
            model::FinModel m;
            m.sig = sig;
            m.name = "q" + std::to_string(q);
            m.carriers.assign(K.n(), {});
            for (int e = 0; e < K.n(); ++e)
                if (S.points[q].member.test(e)) m.carriers[e].push_back("pt");
            m.relations.clear();
            m.functions.clear();
            if (S.points[q].member == p.member) p_index = static_cast<int>(q);
            family.push_back(std::move(m));
        }
        if (p_index < 0) throw std::logic_error("given prime filter missing from Spec(K)");

        semcat::Options sopt{.n_max = 1, .max_lattice = opt.max_lattice};
        SemCat C = SemCat::saturate(family, sopt);
        if (C.partial()) throw std::invalid_argument("import cap: sentence lattice cut off");

        // the sentence lattice must realize K: element e <-> the def-set
        // whose q-component is nonempty iff e in q
        int empty_ctx = C.ctx_index(Ctx{});
        const auto& L0 = C.sub(empty_ctx);
        if (static_cast<int>(L0.elems.size()) != K.n())
            throw std::invalid_argument(
                "import cap: sentence lattice has " + std::to_string(L0.elems.size()) +
                " elements, expected " + std::to_string(K.n()));
        std::vector<int> elem_of(K.n(), -1);  // K element -> def-set index
        for (int e = 0; e < K.n(); ++e) {
            std::vector<BitVec> comp;
            for (std::size_t q = 0; q < family.size(); ++q)
                comp.push_back(BitVec(1, S.points[q].member.test(e)));
            elem_of[e] = L0.find(comp);
            if (elem_of[e] < 0)
                throw std::invalid_argument("import cap: element not realized as a sentence");
        }
        rep.kv(rep.section("encoding"), "sentence-lattice size",
               std::to_string(L0.elems.size()));

        auto lmres = lm::lm_compute(C, p_index, 0);
        auto quot = dlat::quotient_by_prime(K, p);

        // canonical comparison: LM class of (sentence e, point ()) vs the
        // quotient class of e
        std::map<std::tuple<int, int, long long>, int> gen_index;
        for (std::size_t i = 0; i < lmres.gens.size(); ++i)
            gen_index[{lmres.gens[i].ctx_id, lmres.gens[i].elem, lmres.gens[i].point}] =
                static_cast<int>(i);
        std::vector<int> lm_cls_of(K.n());
        for (int e = 0; e < K.n(); ++e)
            lm_cls_of[e] = lmres.cls[gen_index.at({empty_ctx, elem_of[e], 0})];
        bool canonical_ok = true;
        std::string detail;
        // constant on quotient classes, separating distinct ones
        for (int a = 0; a < K.n() && canonical_ok; ++a)
            for (int b = 0; b < K.n() && canonical_ok; ++b)
                if ((quot.cls[a] == quot.cls[b]) != (lm_cls_of[a] == lm_cls_of[b])) {
                    canonical_ok = false;
                    detail = "classes of " + std::to_string(a) + " and " + std::to_string(b) +
                             " disagree";
                }
        if (canonical_ok && lmres.size() != static_cast<std::size_t>(quot.quotient.n())) {
            canonical_ok = false;
            detail = "|LM| = " + std::to_string(lmres.size()) + " vs |K/p| = " +
                     std::to_string(quot.quotient.n());
        }
        // lattice structure agreement through the induced bijection
        if (canonical_ok && lmres.ops_resolved) {
            for (int a = 0; a < K.n() && canonical_ok; ++a)
                for (int b = 0; b < K.n() && canonical_ok; ++b) {
                    if (lmres.meet[lm_cls_of[a]][lm_cls_of[b]] !=
                            lm_cls_of[K.meet(a, b)] ||
                        lmres.join[lm_cls_of[a]][lm_cls_of[b]] !=
                            lm_cls_of[K.join(a, b)]) {
                        canonical_ok = false;
                        detail = "lattice operations disagree through the canonical map";
                    }
                }
        }
        auto& sec = rep.section("comparison");
        rep.kv(sec, "|LM|", std::to_string(lmres.size()));
        rep.kv(sec, "|K/p|", std::to_string(quot.quotient.n()));
        rep.kv(sec, "canonical map", canonical_ok ? "isomorphism" : ("fails: " + detail));
        rep.verdicts.push_back(canonical_ok ? "LM isomorphic to K/p" : "LM differs from K/p");
        if (!canonical_ok) out.exit_code = kInternalDisagreement;
    } catch (const dlat::NotPrimeError& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    } catch (const std::invalid_argument& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    } catch (const lm::InternalError& e) {
        rep.verdicts.push_back(std::string("internal disagreement: ") + e.what());
        out.exit_code = kInternalDisagreement;
    }
    return out;
}

RunResult run_tv(const std::string& theory_text, const std::string& model_text,
                 const std::string& family_text, GlobalOptions opt) {
    RunResult out;
    Report& rep = out.report;
    rep.command = "tv";
    put_config(rep, opt);
    try {
        auto th = syntax::parse_theory(theory_text, "theory");
        auto m = model::parse_model(model_text, th.sig, "model");
        auto fam = subf::parse_family(family_text, m, "family");
        SemCat C = SemCat::saturate({m}, sat_opts(opt));
        if (C.partial()) {
            rep.audit.push_back("saturation cut off; verdicts unavailable");
            rep.verdicts.push_back("partial saturation");
            return out;
        }
        auto& sec = rep.section("tarski-vaught");
        auto tv = subf::tv_check(C, 0, fam);
        rep.kv(sec, "tv-condition", tv.yes ? "holds" : "fails");
        if (!tv.yes)
            rep.kv(sec, "violation",
                   "def-set " +
                       syntax::print_formula(C.sig(),
                                             C.sub(tv.ctx_id).elems[tv.elem].witness) +
                       " at " + ctx_name(C, tv.ctx_id) + " split " +
                       std::to_string(tv.split));
        if (tv.yes) {
            auto ext = subf::tv_extend(C, 0, fam);
            auto ver = subf::verify_subfunctor(C, 0, ext);
            rep.kv(sec, "extension", ver.ok ? "verified elementary coherent subfunctor"
                                            : ("verification failed: " + ver.first_failure));
            if (!ver.ok)
                throw lm::InternalError("TV held but the extension failed verification");
        }
        auto p26 = subf::poscl_subfunctor_check(C, 0, fam);
        rep.kv(sec, "positively-closed-subfunctor condition", p26.yes ? "holds" : "fails");
        if (p26.yes)
            rep.kv(sec, "extension positively closed",
                   p26.extension_positively_closed ? "yes" : "no");
        rep.audit.push_back("splits scanned within context bound nmax = " +
                            std::to_string(opt.n_max));
        rep.verdicts.push_back(tv.yes ? "tv holds" : "tv fails");
    } catch (const syntax::ParseError& e) {
        rep.verdicts.push_back(std::string("parse error: ") + e.what());
        out.exit_code = kParseError;
    } catch (const lm::InternalError& e) {
        rep.verdicts.push_back(std::string("internal disagreement: ") + e.what());
        out.exit_code = kInternalDisagreement;
    } catch (const std::invalid_argument& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    }
    return out;
}

RunResult run_redprod(const std::string& theory_text,
                      const std::vector<std::string>& model_texts,
                      const std::vector<std::string>& filter_generators, GlobalOptions opt) {
    RunResult out;
    Report& rep = out.report;
    rep.command = "redprod";
    put_config(rep, opt);
    try {
        auto th = syntax::parse_theory(theory_text, "theory");
        std::vector<model::FinModel> models;
        for (std::size_t i = 0; i < model_texts.size(); ++i)
            models.push_back(
                model::parse_model(model_texts[i], th.sig, "model" + std::to_string(i)));
        int n = static_cast<int>(models.size());
        std::vector<std::uint32_t> gens;
        for (auto& g : filter_generators) {
            std::uint32_t mask = 0;
            std::istringstream gs(g);
            std::string tok;
            while (std::getline(gs, tok, ',')) {
                int idx = std::stoi(tok);
                if (idx < 0 || idx >= n)
                    throw std::invalid_argument("filter generator index out of range");
                mask |= (1u << idx);
            }
            gens.push_back(mask);
        }
        auto F = redprod::IndexFilter::from_generators(n, gens);
        auto& fsec = rep.section("filter");
        rep.kv(fsec, "members", std::to_string(F.members.size()));
        std::string core = "{";
        bool first = true;
        for (int i = 0; i < n; ++i)
            if (F.core >> i & 1) {
                core += (first ? "" : ",") + std::to_string(i);
                first = false;
            }
        rep.kv(fsec, "principal core", core + "}");
        rep.kv(fsec, "ultra", F.ultra ? "yes" : "no");
        // on a finite index set the construction is analytically forced to
        // collapse; the value of the run is validating the colimit machinery
        rep.audit.push_back(
            "finite index set: every filter is principal, the colimit collapses to the "
            "product over the core");

        auto rp = redprod::reduced_product(models, F);
        auto& rsec = rep.section("reduced-product");
        for (std::size_t s = 0; s < th.sig->sorts.size(); ++s)
            rep.kv(rsec, "carrier " + th.sig->sorts[s],
                   std::to_string(rp.as_model.carrier_size(static_cast<int>(s))) +
                       " classes from " + std::to_string(rp.raw_pairs[s]) + " raw pairs");
        rep.kv(rsec, "class relation well-defined", rp.well_defined_verified ? "yes" : "no");
        rep.kv(rsec, "isomorphic to the core product", rp.principal_iso_verified ? "yes" : "no");
        if (!rp.well_defined_verified || !rp.principal_iso_verified)
            throw lm::InternalError("reduced product construction failed validation");

        if (F.ultra) {
            // seeded Los samples per sort context
            std::mt19937_64 rng(opt.seed);
            auto& lsec = rep.section("los");
            int agree = 0, total = 0;
            for (std::size_t s = 0; s < th.sig->sorts.size(); ++s) {
                std::vector<int> ctx = {static_cast<int>(s)};
                for (int rep_i = 0; rep_i < 3; ++rep_i) {
                    std::vector<BitVec> A, B;
                    for (auto& m : models) {
                        long long tot = m.context_space(ctx).total;
                        BitVec a(tot), b(tot);
                        for (long long t = 0; t < tot; ++t) {
                            if (rng() % 2) a.set(t);
                            if (rng() % 2) b.set(t);
                        }
                        A.push_back(a);
                        B.push_back(b);
                    }
                    auto res = redprod::los_containment(models, F, ctx, A, B);
                    ++total;
                    if (res.contained == res.index_set_member) ++agree;
                }
            }
            rep.kv(lsec, "two-sided agreement",
                   std::to_string(agree) + "/" + std::to_string(total));

            bool constant = true;
            for (auto& m : models)
                if (m.carriers != models[0].carriers || m.relations != models[0].relations ||
                    m.functions != models[0].functions)
                    constant = false;
            if (constant) {
                auto d = redprod::diagonal_map(models[0], n, F, sat_opts(opt));
                rep.kv(lsec, "diagonal", d.elementary ? "elementary (components injective)"
                                                      : "not elementary");
            }
        }
        rep.verdicts.push_back("ok");
    } catch (const syntax::ParseError& e) {
        rep.verdicts.push_back(std::string("parse error: ") + e.what());
        out.exit_code = kParseError;
    } catch (const lm::InternalError& e) {
        rep.verdicts.push_back(std::string("internal disagreement: ") + e.what());
        out.exit_code = kInternalDisagreement;
    } catch (const std::invalid_argument& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    }
    return out;
}

RunResult run_dlat(const std::string& subcommand, const std::string& lattice_text,
                   const std::string& filter_text, GlobalOptions opt) {
    RunResult out;
    Report& rep = out.report;
    rep.command = "dlat " + subcommand;
    put_config(rep, opt);
    try {
        std::istringstream in(lattice_text);
        auto L = dlat::read_lattice(in);
        auto& sec = rep.section(subcommand);
        rep.kv(sec, "elements", std::to_string(L.n()));
        if (subcommand == "spec") {
            auto S = dlat::spectrum(L);
            rep.kv(sec, "points", std::to_string(S.points.size()));
            for (std::size_t p = 0; p < S.points.size(); ++p) {
                std::string v = "{";
                bool first = true;
                S.points[p].member.for_each_set([&](std::size_t e) {
                    v += (first ? "" : ",") + std::to_string(e);
                    first = false;
                });
                rep.kv(sec, "point " + std::to_string(p), v + "}");
            }
            int edges = 0;
            for (std::size_t q = 0; q < S.points.size(); ++q)
                for (std::size_t p = 0; p < S.points.size(); ++p)
                    if (q != p && S.specializes[q][p]) ++edges;
            rep.kv(sec, "specializations", std::to_string(edges));
        } else if (subcommand == "krull") {
            auto chains = dlat::krull_dim_chains(L);
            auto alg = dlat::krull_dim_algebraic(L);
            rep.kv(sec, "dimension (chains)",
                   chains ? std::to_string(*chains) : "undefined");
            rep.kv(sec, "dimension (algebraic)",
                   alg.inconclusive ? "inconclusive" : std::to_string(alg.dim));
            if (chains && !alg.inconclusive && *chains != alg.dim)
                throw lm::InternalError("Krull dimension algorithms disagree");
            if (chains) rep.verdicts.push_back("dimensions agree");
        } else if (subcommand == "quotient") {
            auto p = dlat::parse_prime_filter(L, filter_text);
            auto q = dlat::quotient_by_prime(L, p);
            rep.kv(sec, "quotient elements", std::to_string(q.quotient.n()));
            std::string map = "";
            for (int e = 0; e < L.n(); ++e)
                map += (e ? " " : "") + std::to_string(q.cls[e]);
            rep.kv(sec, "class map", map);
        } else {
            throw std::invalid_argument("unknown dlat subcommand: " + subcommand);
        }
        if (out.exit_code == kOk && rep.verdicts.empty()) rep.verdicts.push_back("ok");
    } catch (const dlat::TrivialLatticeError& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    } catch (const dlat::NotPrimeError& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    } catch (const lm::InternalError& e) {
        rep.verdicts.push_back(std::string("internal disagreement: ") + e.what());
        out.exit_code = kInternalDisagreement;
    } catch (const std::invalid_argument& e) {
        rep.verdicts.push_back(std::string("input error: ") + e.what());
        out.exit_code = kParseError;
    }
    return out;
}

}  // namespace posmt::cli
