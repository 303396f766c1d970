#include "posmt/dlat.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace posmt::dlat {

namespace {

std::string elem_pair(int a, int b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

// Derives meet/join tables from a validated partial order, reporting pairs
// with no infimum/supremum.
struct DerivedTables {
    std::vector<std::vector<int>> meet, join;
    std::vector<ValidationIssue> issues;
    int bot = -1, top = -1;
};

DerivedTables derive_tables(const std::vector<std::vector<bool>>& leq) {
    int n = static_cast<int>(leq.size());
    DerivedTables d;
    d.meet.assign(n, std::vector<int>(n, -1));
    d.join.assign(n, std::vector<int>(n, -1));
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            int inf = -1, sup = -1;
            for (int c = 0; c < n; ++c) {
                if (leq[c][a] && leq[c][b] && (inf < 0 || leq[inf][c])) inf = c;
                if (leq[a][c] && leq[b][c] && (sup < 0 || leq[c][sup])) sup = c;
            }
            // the candidate must dominate every lower bound / be dominated
            // by every upper bound
            if (inf >= 0)
                for (int c = 0; c < n; ++c)
                    if (leq[c][a] && leq[c][b] && !leq[c][inf]) inf = -2;
            if (sup >= 0)
                for (int c = 0; c < n; ++c)
                    if (leq[a][c] && leq[b][c] && !leq[sup][c]) sup = -2;
            if (inf < 0)
                d.issues.push_back({ValidationIssue::Kind::NoMeet,
                                    "no infimum for " + elem_pair(a, b)});
            if (sup < 0)
                d.issues.push_back({ValidationIssue::Kind::NoJoin,
                                    "no supremum for " + elem_pair(a, b)});
            d.meet[a][b] = d.meet[b][a] = inf;
            d.join[a][b] = d.join[b][a] = sup;
        }
    }
    for (int c = 0; c < n; ++c) {
        bool least = true, greatest = true;
        for (int x = 0; x < n; ++x) {
            least = least && leq[c][x];
            greatest = greatest && leq[x][c];
        }
        if (least) d.bot = c;
        if (greatest) d.top = c;
    }
    if (n > 0 && (d.bot < 0 || d.top < 0))
        d.issues.push_back({ValidationIssue::Kind::NoBounds,
                            d.bot < 0 ? "no least element" : "no greatest element"});
    return d;
}

std::vector<ValidationIssue> check_order_axioms(const std::vector<std::vector<bool>>& leq) {
    int n = static_cast<int>(leq.size());
    std::vector<ValidationIssue> out;
    for (int a = 0; a < n; ++a)
        if (!leq[a][a])
            out.push_back({ValidationIssue::Kind::NotPartialOrder,
                           "not reflexive at " + std::to_string(a)});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && leq[a][b] && leq[b][a])
                out.push_back({ValidationIssue::Kind::NotPartialOrder,
                               "antisymmetry fails at " + elem_pair(a, b)});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (leq[a][b] && leq[b][c] && !leq[a][c])
                    out.push_back({ValidationIssue::Kind::NotPartialOrder,
                                   "transitivity fails at (" + std::to_string(a) + "," +
                                       std::to_string(b) + "," + std::to_string(c) + ")"});
    return out;
}

}  // namespace

ValidationReport check_distributive(const LatticeCandidate& cand) {
    ValidationReport rep;
    int n = cand.n;
    if (n <= 0) {
        rep.issues.push_back({ValidationIssue::Kind::Malformed, "empty element set"});
        return rep;
    }
    if (static_cast<int>(cand.leq.size()) != n) {
        rep.issues.push_back({ValidationIssue::Kind::Malformed, "leq not n x n"});
        return rep;
    }
    for (auto& row : cand.leq)
        if (static_cast<int>(row.size()) != n) {
            rep.issues.push_back({ValidationIssue::Kind::Malformed, "leq row not of length n"});
            return rep;
        }
    auto check_table = [&](const std::vector<std::vector<int>>& t, const char* name) {
        if (t.empty()) return true;
        if (static_cast<int>(t.size()) != n) {
            rep.issues.push_back({ValidationIssue::Kind::Malformed,
                                  std::string(name) + " table not n x n"});
            return false;
        }
        for (auto& row : t) {
            if (static_cast<int>(row.size()) != n) {
                rep.issues.push_back({ValidationIssue::Kind::Malformed,
                                      std::string(name) + " table row not of length n"});
                return false;
            }
            for (int v : row)
                if (v < 0 || v >= n) {
                    rep.issues.push_back({ValidationIssue::Kind::Malformed,
                                          std::string(name) + " table entry out of range"});
                    return false;
                }
        }
        return true;
    };
    bool meet_ok = check_table(cand.meet, "meet");
    bool join_ok = check_table(cand.join, "join");
    if (!rep.ok() && !(meet_ok && join_ok)) return rep;

    auto order_issues = check_order_axioms(cand.leq);
    rep.issues.insert(rep.issues.end(), order_issues.begin(), order_issues.end());
    if (!order_issues.empty()) return rep;

    DerivedTables d = derive_tables(cand.leq);
    rep.issues.insert(rep.issues.end(), d.issues.begin(), d.issues.end());
    if (!d.issues.empty()) return rep;

    if (!cand.meet.empty() && cand.meet != d.meet)
        rep.issues.push_back({ValidationIssue::Kind::TableMismatch,
                              "supplied meet table disagrees with the order"});
    if (!cand.join.empty() && cand.join != d.join)
        rep.issues.push_back({ValidationIssue::Kind::TableMismatch,
                              "supplied join table disagrees with the order"});

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                int lhs = d.meet[a][d.join[b][c]];
                int rhs = d.join[d.meet[a][b]][d.meet[a][c]];
                if (lhs != rhs)
                    rep.issues.push_back({ValidationIssue::Kind::NotDistributive,
                                          "a/\\(b\\/c) != (a/\\b)\\/(a/\\c) at (" +
                                              std::to_string(a) + "," + std::to_string(b) +
                                              "," + std::to_string(c) + ")"});
            }
    return rep;
}

FinDistLattice FinDistLattice::from_leq(std::vector<std::vector<bool>> leq) {
    LatticeCandidate cand;
    cand.n = static_cast<int>(leq.size());
    cand.leq = leq;
    ValidationReport rep = check_distributive(cand);
    if (!rep.ok()) throw std::invalid_argument("invalid lattice: " + rep.issues[0].message);
    FinDistLattice L;
    L.n_ = cand.n;
    L.leq_ = std::move(leq);
    DerivedTables d = derive_tables(L.leq_);
    L.meet_ = std::move(d.meet);
    L.join_ = std::move(d.join);
    L.bot_ = d.bot;
    L.top_ = d.top;
    return L;
}

FinDistLattice FinDistLattice::from_covers(int n, const std::vector<std::pair<int, int>>& covers) {
    if (n <= 0) throw std::invalid_argument("invalid lattice: empty element set");
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) leq[i][i] = true;
    for (auto& [a, b] : covers) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw std::invalid_argument("invalid lattice: cover element out of range");
        leq[a][b] = true;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (leq[i][k])
                for (int j = 0; j < n; ++j)
                    if (leq[k][j]) leq[i][j] = true;
    return from_leq(std::move(leq));
}

std::vector<int> FinDistLattice::join_irreducibles() const {
    std::vector<int> out;
    for (int e = 0; e < n_; ++e)
        if (is_join_irreducible(e)) out.push_back(e);
    return out;
}

bool FinDistLattice::is_join_irreducible(int e) const {
    if (e == bot_) return false;
    int covers = 0;
    for (int x = 0; x < n_; ++x) {
        if (x == e || !leq_[x][e]) continue;
        bool covered = true;  // x < e with nothing strictly between
        for (int y = 0; y < n_; ++y)
            if (y != x && y != e && leq_[x][y] && leq_[y][e]) covered = false;
        if (covered) ++covers;
    }
    return covers == 1;
}

int FinDistLattice::pseudocomplement(int a) const {
    int v = bot_;
    for (int x = 0; x < n_; ++x)
        if (meet_[x][a] == bot_) v = join_[v][x];
    return v;
}

std::vector<std::pair<int, int>> FinDistLattice::cover_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            if (a == b || !leq_[a][b]) continue;
            bool cover = true;
            for (int c = 0; c < n_; ++c)
                if (c != a && c != b && leq_[a][c] && leq_[c][b]) cover = false;
            if (cover) out.emplace_back(a, b);
        }
    return out;
}

bool is_prime_filter(const FinDistLattice& L, const BitVec& member, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (member.size() != static_cast<std::size_t>(L.n())) return fail("wrong universe size");
    if (!member.test(L.top())) return fail("top missing");
    if (member.test(L.bot())) return fail("bot present (not proper)");
    for (int a = 0; a < L.n(); ++a) {
        if (!member.test(a)) continue;
        for (int b = 0; b < L.n(); ++b) {
            if (L.leq(a, b) && !member.test(b))
                return fail("not upward closed at " + elem_pair(a, b));
            if (member.test(b) && !member.test(L.meet(a, b)))
                return fail("not meet closed at " + elem_pair(a, b));
        }
    }
    for (int a = 0; a < L.n(); ++a)
        for (int b = 0; b < L.n(); ++b)
            if (member.test(L.join(a, b)) && !member.test(a) && !member.test(b))
                return fail("not prime at " + elem_pair(a, b));
    return true;
}

bool SpecSpace::in_closure(int q, int p) const {
    for (std::size_t e = 0; e < basic_open.size(); ++e)
        if (basic_open[e].test(q) && !basic_open[e].test(p)) return false;
    return true;
}

bool SpecSpace::is_open(const BitVec& pointset) const {
    BitVec covered(pointset.size());
    for (auto& bo : basic_open)
        if (bo.is_subset_of(pointset)) covered |= bo;
    return covered == pointset;
}

SpecSpace spectrum(const FinDistLattice& L) {
    if (L.trivial()) throw TrivialLatticeError();
    SpecSpace S;
    // Every filter of a finite lattice is principal, so prime filters are
    // exactly the up-sets of join-prime generators. Primality is tested from
    // the definition; the join-irreducible route is kept separate (Birkhoff)
    // as a cross-check.
    for (int g = 0; g < L.n(); ++g) {
        if (g == L.bot()) continue;
        bool prime = true;
        for (int a = 0; a < L.n() && prime; ++a)
            for (int b = 0; b < L.n() && prime; ++b)
                if (L.leq(g, L.join(a, b)) && !L.leq(g, a) && !L.leq(g, b)) prime = false;
        if (!prime) continue;
        PrimeFilter p;
        p.member = BitVec(L.n());
        for (int x = 0; x < L.n(); ++x)
            if (L.leq(g, x)) p.member.set(x);
        S.points.push_back(std::move(p));
    }
    std::size_t m = S.points.size();
    S.specializes.assign(m, std::vector<bool>(m, false));
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t p = 0; p < m; ++p)
            S.specializes[q][p] = S.points[q].member.is_subset_of(S.points[p].member);
    S.basic_open.assign(L.n(), BitVec(m));
    for (int e = 0; e < L.n(); ++e)
        for (std::size_t p = 0; p < m; ++p)
            if (S.points[p].member.test(e)) S.basic_open[e].set(p);
    return S;
}

BirkhoffResult birkhoffroundtrip_impl(const FinDistLattice& L) {
    std::vector<int> ji = L.join_irreducibles();
    int k = static_cast<int>(ji.size());
    // Down-sets of the induced order on ji, found by BFS from the empty set.
    std::vector<BitVec> downsets;
    std::map<BitVec, int> index;
    auto is_downset = [&](const BitVec& s) {
        for (int i = 0; i < k; ++i) {
            if (!s.test(i)) continue;
            for (int j = 0; j < k; ++j)
                if (L.leq(ji[j], ji[i]) && !s.test(j)) return false;
        }
        return true;
    };
    // Enumerate in a canonical order: start from the empty down-set and add
    // one generator at a time.
    downsets.push_back(BitVec(k));
    index[downsets[0]] = 0;
    for (std::size_t head = 0; head < downsets.size(); ++head) {
        BitVec cur = downsets[head];
        for (int i = 0; i < k; ++i) {
            if (cur.test(i)) continue;
            BitVec nxt = cur;
            for (int j = 0; j < k; ++j)
                if (L.leq(ji[j], ji[i])) nxt.set(j);
            if (!is_downset(nxt)) continue;
            if (index.emplace(nxt, static_cast<int>(downsets.size())).second)
                downsets.push_back(nxt);
        }
    }
    // Close under unions and intersections (down-sets form the full lattice;
    // singleton-generated ones may miss some, so saturate).
    for (std::size_t a = 0; a < downsets.size(); ++a)
        for (std::size_t b = 0; b < downsets.size(); ++b) {
            for (BitVec c : {downsets[a] & downsets[b], downsets[a] | downsets[b]})
                if (index.emplace(c, static_cast<int>(downsets.size())).second)
                    downsets.push_back(c);
        }
    int m = static_cast<int>(downsets.size());
    std::vector<std::vector<bool>> leq(m, std::vector<bool>(m, false));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) leq[a][b] = downsets[a].is_subset_of(downsets[b]);

    BirkhoffResult r;
    r.rebuilt = FinDistLattice::from_leq(std::move(leq));
    r.iso.assign(L.n(), -1);
    for (int x = 0; x < L.n(); ++x) {
        BitVec s(k);
        for (int i = 0; i < k; ++i)
            if (L.leq(ji[i], x)) s.set(i);
        auto it = index.find(s);
        if (it == index.end()) throw std::logic_error("birkhoff: canonical image not a down-set");
        r.iso[x] = it->second;
    }
    // The canonical map must be an isomorphism of bounded lattices.
    if (m != L.n()) throw std::logic_error("birkhoff: size mismatch after roundtrip");
    std::vector<bool> hit(m, false);
    for (int x = 0; x < L.n(); ++x) {
        if (hit[r.iso[x]]) throw std::logic_error("birkhoff: canonical map not injective");
        hit[r.iso[x]] = true;
    }
    for (int a = 0; a < L.n(); ++a)
        for (int b = 0; b < L.n(); ++b) {
            if (r.rebuilt.meet(r.iso[a], r.iso[b]) != r.iso[L.meet(a, b)] ||
                r.rebuilt.join(r.iso[a], r.iso[b]) != r.iso[L.join(a, b)])
                throw std::logic_error("birkhoff: canonical map not a lattice homomorphism");
        }
    return r;
}

BirkhoffResult birkhoff_roundtrip(const FinDistLattice& L) { return birkhoffroundtrip_impl(L); }

std::optional<int> krull_dim_chains(const FinDistLattice& L) {
    if (L.trivial()) return std::nullopt;
    SpecSpace S = spectrum(L);
    int m = static_cast<int>(S.points.size());
    // longest path in the strict-inclusion DAG
    std::vector<int> depth(m, -1);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return S.points[a].member.count() < S.points[b].member.count();
    });
    int best = 0;
    for (int idx : order) {
        depth[idx] = 0;
        for (int q = 0; q < m; ++q)
            if (q != idx && S.specializes[q][idx] && depth[q] >= 0)
                depth[idx] = std::max(depth[idx], depth[q] + 1);
        best = std::max(best, depth[idx]);
    }
    return best;
}

KrullAlgebraicResult krull_dim_algebraic(const FinDistLattice& L, int cutoff) {
    KrullAlgebraicResult r;
    if (L.trivial()) {
        r.inconclusive = true;
        return r;
    }
    int n = L.n();
    // step(c, x): with a = max{ a : a /\ x <= c } (an ideal by
    // distributivity), returns a \/ x. A tuple x_1..x_{k+1} admits witnesses
    // iff iterating step from bot ends at top; greedy-max is optimal since
    // suffix feasibility is monotone in c.
    r.step_table.assign(n, std::vector<int>(n, -1));
    for (int c = 0; c < n; ++c)
        for (int x = 0; x < n; ++x) {
            int a = L.bot();
            for (int cand = 0; cand < n; ++cand)
                if (L.leq(L.meet(cand, x), c)) a = L.join(a, cand);
            r.step_table[c][x] = L.join(a, x);
        }
    // g(c) = max number of steps from c staying short of top; dim = g(bot).
    // step(c, x) > c strictly unless it hits top, so evaluating elements
    // with more elements above them later gives a valid topological order.
    std::vector<int> g(n, -1);
    std::vector<int> bad_x(n, -1);  // the x realizing the max at c
    std::vector<int> above(n, 0);
    for (int c = 0; c < n; ++c)
        for (int x = 0; x < n; ++x)
            if (L.leq(c, x)) ++above[c];
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return above[a] != above[b] ? above[a] < above[b] : a < b; });
    for (int c : order) {
        if (c == L.top()) {
            g[c] = 0;  // absorbing
            continue;
        }
        int best = 0, bx = -1;
        for (int x = 0; x < n; ++x) {
            int c2 = r.step_table[c][x];
            if (c2 == L.top()) continue;
            int cand = 1 + g[c2];
            if (cand > best) {
                best = cand;
                bx = x;
            }
        }
        g[c] = best;
        bad_x[c] = bx;
    }
    int dim = g[L.bot()];
    if (dim > cutoff) {
        r.inconclusive = true;
        return r;
    }
    r.dim = dim;
    // counterexample tuple for each failing level k < dim: the path of
    // length g(bot) read off bad_x ends short of top after dim steps, so its
    // first k+1 entries refute "dim <= k".
    std::vector<int> path;
    int c = L.bot();
    while (bad_x[c] >= 0) {
        path.push_back(bad_x[c]);
        c = r.step_table[c][bad_x[c]];
    }
    for (int k = 0; k < dim; ++k)
        r.counterexamples.emplace_back(path.begin(), path.begin() + k + 1);
    return r;
}

std::vector<int> krull_witness_for(const FinDistLattice& L, const std::vector<int>& xs) {
    int n = L.n();
    int k = static_cast<int>(xs.size());
    // c after greedily-maximal witnesses from position i with incoming bound c
    auto greedy_final = [&](int i, int c) {
        for (; i < k; ++i) {
            int a = L.bot();
            for (int cand = 0; cand < n; ++cand)
                if (L.leq(L.meet(cand, xs[i]), c)) a = L.join(a, cand);
            c = L.join(a, xs[i]);
        }
        return c;
    };
    if (greedy_final(0, L.bot()) != L.top()) return {};
    std::vector<int> out;
    int c = L.bot();
    for (int i = 0; i < k; ++i) {
        for (int a = 0; a < n; ++a) {
            if (!L.leq(L.meet(a, xs[i]), c)) continue;
            int c2 = L.join(a, xs[i]);
            if (greedy_final(i + 1, c2) == L.top()) {
                out.push_back(a);
                c = c2;
                break;
            }
        }
    }
    return out;
}

QuotientResult quotient_by_prime(const FinDistLattice& L, const PrimeFilter& p) {
    std::string why;
    if (!is_prime_filter(L, p.member, &why)) throw NotPrimeError("not a prime filter: " + why);
    int n = L.n();
    auto related = [&](int a, int b) {
        for (int x = 0; x < n; ++x)
            if (p.member.test(x) && L.meet(x, a) == L.meet(x, b)) return true;
        return false;
    };
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) rel[a][b] = related(a, b);
    // ~p must be an equivalence compatible with meet and join.
    for (int a = 0; a < n; ++a) {
        if (!rel[a][a]) throw std::logic_error("~p not reflexive");
        for (int b = 0; b < n; ++b) {
            if (rel[a][b] != rel[b][a]) throw std::logic_error("~p not symmetric");
            for (int c = 0; c < n; ++c) {
                if (rel[a][b] && rel[b][c] && !rel[a][c])
                    throw std::logic_error("~p not transitive");
                if (rel[a][b] && (!rel[L.meet(a, c)][L.meet(b, c)] ||
                                  !rel[L.join(a, c)][L.join(b, c)]))
                    throw std::logic_error("~p not a congruence");
            }
        }
    }
    QuotientResult q;
    q.cls.assign(n, -1);
    int m = 0;
    for (int a = 0; a < n; ++a) {
        if (q.cls[a] >= 0) continue;
        for (int b = a; b < n; ++b)
            if (rel[a][b]) q.cls[b] = m;
        ++m;
    }
    std::vector<std::vector<bool>> leq(m, std::vector<bool>(m, false));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (rel[L.meet(a, b)][a]) leq[q.cls[a]][q.cls[b]] = true;
    q.quotient = FinDistLattice::from_leq(std::move(leq));
    return q;
}

namespace {

// Order-isomorphism search on the join-irreducible posets, pruned by the
// (indegree, outdegree) invariant. Backtracking is fine at <= a few dozen
// join-irreducibles.
bool poset_iso(const std::vector<std::vector<bool>>& A, const std::vector<std::vector<bool>>& B,
               std::vector<int>& match) {
    int k = static_cast<int>(A.size());
    if (B.size() != A.size()) return false;
    auto profile = [&](const std::vector<std::vector<bool>>& P, int v) {
        int down = 0, up = 0;
        for (int w = 0; w < k; ++w) {
            if (P[w][v]) ++down;
            if (P[v][w]) ++up;
        }
        return std::make_pair(down, up);
    };
    std::vector<std::pair<int, int>> pa(k), pb(k);
    for (int v = 0; v < k; ++v) {
        pa[v] = profile(A, v);
        pb[v] = profile(B, v);
    }
    {
        auto sa = pa, sb = pb;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return false;
    }
    match.assign(k, -1);
    std::vector<bool> used(k, false);
    std::function<bool(int)> rec = [&](int v) {
        if (v == k) return true;
        for (int w = 0; w < k; ++w) {
            if (used[w] || pa[v] != pb[w]) continue;
            bool ok = true;
            for (int u = 0; u < v && ok; ++u)
                if (A[u][v] != B[match[u]][w] || A[v][u] != B[w][match[u]]) ok = false;
            if (!ok) continue;
            match[v] = w;
            used[w] = true;
            if (rec(v + 1)) return true;
            used[w] = false;
            match[v] = -1;
        }
        return false;
    };
    return rec(0);
}

}  // namespace

bool lattices_isomorphic(const FinDistLattice& A, const FinDistLattice& B,
                         std::vector<int>* witness) {
    if (A.n() != B.n()) return false;
    std::vector<int> ja = A.join_irreducibles(), jb = B.join_irreducibles();
    if (ja.size() != jb.size()) return false;
    int k = static_cast<int>(ja.size());
    std::vector<std::vector<bool>> PA(k, std::vector<bool>(k)), PB(k, std::vector<bool>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            PA[i][j] = A.leq(ja[i], ja[j]);
            PB[i][j] = B.leq(jb[i], jb[j]);
        }
    std::vector<int> match;
    if (!poset_iso(PA, PB, match)) return false;
    if (witness) {
        // extend the join-irreducible matching to the full lattice:
        // x -> join of matched irreducibles below x
        witness->assign(A.n(), -1);
        for (int x = 0; x < A.n(); ++x) {
            int y = B.bot();
            for (int i = 0; i < k; ++i)
                if (A.leq(ja[i], x)) y = B.join(y, jb[match[i]]);
            (*witness)[x] = y;
        }
    }
    return true;
}

FinDistLattice read_lattice(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<std::pair<int, int>> covers;
    std::vector<std::array<int, 3>> meet_checks, join_checks;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        auto fail = [&](const std::string& m) {
            throw std::invalid_argument("lattice file line " + std::to_string(lineno) + ": " + m);
        };
        if (tok == "dlat") {
            if (n >= 0) fail("duplicate header");
            if (!(ls >> n) || n <= 0) fail("bad element count");
        } else if (tok == "meet" || tok == "join") {
            int a, b, c;
            if (!(ls >> a >> b >> c)) fail("bad table check line");
            if (tok == "meet")
                meet_checks.push_back({a, b, c});
            else
                join_checks.push_back({a, b, c});
        } else {
            if (n < 0) fail("missing 'dlat <n>' header");
            int a = -1, b = -1;
            std::string lt;
            try {
                a = std::stoi(tok);
            } catch (...) {
                fail("bad cover line");
            }
            if (!(ls >> lt >> b) || lt != "<") fail("expected 'i < j'");
            covers.emplace_back(a, b);
        }
    }
    if (n < 0) throw std::invalid_argument("lattice file: missing 'dlat <n>' header");
    FinDistLattice L = FinDistLattice::from_covers(n, covers);
    for (auto& [a, b, c] : meet_checks)
        if (a < 0 || a >= n || b < 0 || b >= n || L.meet(a, b) != c)
            throw std::invalid_argument("lattice file: meet check " + elem_pair(a, b) +
                                        " disagrees with the order");
    for (auto& [a, b, c] : join_checks)
        if (a < 0 || a >= n || b < 0 || b >= n || L.join(a, b) != c)
            throw std::invalid_argument("lattice file: join check " + elem_pair(a, b) +
                                        " disagrees with the order");
    return L;
}

FinDistLattice read_lattice_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open lattice file: " + path);
    return read_lattice(in);
}

void write_lattice(std::ostream& out, const FinDistLattice& L) {
    out << "dlat " << L.n() << "\n";
    for (auto& [a, b] : L.cover_pairs()) out << a << " < " << b << "\n";
}

PrimeFilter parse_prime_filter(const FinDistLattice& L, const std::string& text) {
    PrimeFilter p;
    p.member = BitVec(L.n());
    std::string s = text;
    for (char& c : s)
        if (c == '{' || c == '}' || c == ',') c = ' ';
    std::istringstream ss(s);
    int e;
    while (ss >> e) {
        if (e < 0 || e >= L.n())
            throw std::invalid_argument("prime filter element out of range: " + std::to_string(e));
        p.member.set(e);
    }
    std::string why;
    if (!is_prime_filter(L, p.member, &why)) throw NotPrimeError("not a prime filter: " + why);
    return p;
}

}  // namespace posmt::dlat
