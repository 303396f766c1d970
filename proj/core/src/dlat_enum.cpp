#include "posmt/dlat_enum.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>

namespace posmt::dlat {

namespace {

// Small labeled poset as a strict-order closure matrix: le[i][j] means i <= j.
struct Poset {
    int n = 0;
    std::vector<std::vector<bool>> le;

    static Poset empty() {
        Poset p;
        return p;
    }
    // adds a new maximal element whose strict down-set is `below` (must be
    // down-closed in the current poset)
    Poset extend(const std::vector<bool>& below) const {
        Poset q;
        q.n = n + 1;
        q.le.assign(q.n, std::vector<bool>(q.n, false));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q.le[i][j] = le[i][j];
        for (int i = 0; i < q.n; ++i) q.le[i][i] = true;
        for (int i = 0; i < n; ++i)
            if (below[i]) q.le[i][n] = true;
        return q;
    }
};

long long count_downsets(const Poset& p, long long cap) {
    // DFS over antichain choices would be fancier; plain subset scan is fine
    // because cap keeps n tiny (<= ~12 before the prune kicks in).
    if (p.n > 20) return cap + 1;
    long long cnt = 0;
    for (std::uint32_t s = 0; s < (1u << p.n); ++s) {
        bool down = true;
        for (int i = 0; i < p.n && down; ++i) {
            if (!(s >> i & 1)) continue;
            for (int j = 0; j < p.n && down; ++j)
                if (p.le[j][i] && !(s >> j & 1)) down = false;
        }
        if (down && ++cnt > cap) return cnt;
    }
    return cnt;
}

std::vector<std::uint32_t> downsets_of(const Poset& p) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < (1u << p.n); ++s) {
        bool down = true;
        for (int i = 0; i < p.n && down; ++i) {
            if (!(s >> i & 1)) continue;
            for (int j = 0; j < p.n && down; ++j)
                if (p.le[j][i] && !(s >> j & 1)) down = false;
        }
        if (down) out.push_back(s);
    }
    return out;
}

// Canonical form of a small poset: lexicographically least adjacency string
// over relabelings, restricted to labelings compatible with the
// (indegree, outdegree) invariant classes. Fine for the near-chain posets
// that survive the down-set prune.
std::string canonical_form(const Poset& p) {
    int n = p.n;
    std::vector<std::pair<int, int>> prof(n);
    for (int v = 0; v < n; ++v) {
        int down = 0, up = 0;
        for (int w = 0; w < n; ++w) {
            if (p.le[w][v]) ++down;
            if (p.le[v][w]) ++up;
        }
        prof[v] = {down, up};
    }
    std::vector<int> verts(n);
    for (int i = 0; i < n; ++i) verts[i] = i;
    std::sort(verts.begin(), verts.end(),
              [&](int a, int b) { return prof[a] != prof[b] ? prof[a] < prof[b] : a < b; });
    std::string best;
    std::vector<int> perm(n, -1);
    std::vector<bool> used(n, false);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == n) {
            std::string s(static_cast<std::size_t>(n) * n, '0');
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (p.le[perm[i]][perm[j]]) s[static_cast<std::size_t>(i) * n + j] = '1';
            if (best.empty() || s < best) best = std::move(s);
            return;
        }
        for (int k = 0; k < n; ++k) {
            int v = verts[k];
            if (used[v]) continue;
            if (k > 0 && prof[verts[k - 1]] == prof[v] && !used[verts[k - 1]] &&
                verts[k - 1] < v)
                continue;  // canonical order within an invariant class
            perm[pos] = v;
            used[v] = true;
            rec(pos + 1);
            used[v] = false;
        }
    };
    if (n == 0) return "";
    rec(0);
    return std::to_string(n) + ":" + best;
}

FinDistLattice downset_lattice(const Poset& p) {
    auto ds = downsets_of(p);
    std::sort(ds.begin(), ds.end(), [](std::uint32_t a, std::uint32_t b) {
        int ca = __builtin_popcount(a), cb = __builtin_popcount(b);
        return ca != cb ? ca < cb : a < b;
    });
    int m = static_cast<int>(ds.size());
    std::vector<std::vector<bool>> leq(m, std::vector<bool>(m, false));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) leq[a][b] = (ds[a] & ~ds[b]) == 0;
    return FinDistLattice::from_leq(std::move(leq));
}

}  // namespace

std::vector<FinDistLattice> enumerate_distributive_lattices(int max_elements) {
    std::vector<FinDistLattice> out;
    if (max_elements < 1) return out;

    std::set<std::string> seen_posets;
    std::vector<Poset> frontier{Poset::empty()};
    seen_posets.insert(canonical_form(frontier[0]));
    std::vector<Poset> keep{frontier[0]};

    while (!frontier.empty()) {
        std::vector<Poset> next;
        for (const Poset& p : frontier) {
            // candidate strict down-sets for a new maximal element
            auto ds = downsets_of(p);
            for (std::uint32_t below : ds) {
                std::vector<bool> bel(p.n, false);
                for (int i = 0; i < p.n; ++i) bel[i] = (below >> i) & 1;
                Poset q = p.extend(bel);
                if (count_downsets(q, max_elements) > max_elements) continue;
                std::string cf = canonical_form(q);
                if (!seen_posets.insert(cf).second) continue;
                next.push_back(q);
                keep.push_back(q);
            }
        }
        frontier = std::move(next);
    }

    for (const Poset& p : keep) out.push_back(downset_lattice(p));
    std::stable_sort(out.begin(), out.end(),
                     [](const FinDistLattice& a, const FinDistLattice& b) { return a.n() < b.n(); });
    return out;
}

std::vector<FinDistLattice> random_distributive_lattices(std::mt19937_64& rng, int count,
                                                         int max_elements) {
    std::vector<FinDistLattice> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < count && ++guard < count * 1000) {
        int k = static_cast<int>(rng() % 7);  // join-irreducibles
        Poset p = Poset::empty();
        bool ok = true;
        for (int v = 0; v < k; ++v) {
            auto ds = downsets_of(p);
            std::uint32_t below = ds[rng() % ds.size()];
            std::vector<bool> bel(p.n, false);
            for (int i = 0; i < p.n; ++i) bel[i] = (below >> i) & 1;
            p = p.extend(bel);
            if (count_downsets(p, max_elements) > max_elements) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        out.push_back(downset_lattice(p));
    }
    return out;
}

}  // namespace posmt::dlat
