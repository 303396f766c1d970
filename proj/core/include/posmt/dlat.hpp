#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "posmt/bitvec.hpp"

namespace posmt::dlat {

// Raw candidate data for a lattice: a reflexive order relation plus
// (optionally) user-supplied meet/join tables to cross-check.
struct LatticeCandidate {
    int n = 0;
    std::vector<std::vector<bool>> leq;            // n x n
    std::vector<std::vector<int>> meet;            // optional, empty if absent
    std::vector<std::vector<int>> join;            // optional
};

struct ValidationIssue {
    enum class Kind {
        Malformed,        // non-total / out-of-range tables
        NotPartialOrder,  // reflexivity/antisymmetry/transitivity failure
        NoMeet,           // some pair lacks an infimum
        NoJoin,
        NoBounds,         // no least or greatest element
        TableMismatch,    // user tables disagree with derived ones
        NotDistributive,  // distributivity violated at a triple
    };
    Kind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    bool has(ValidationIssue::Kind k) const {
        for (auto& i : issues)
            if (i.kind == k) return true;
        return false;
    }
};

class FinDistLattice {
public:
    FinDistLattice() = default;

    // Builds from a leq relation; recomputes meet/join tables and validates
    // everything. Throws std::invalid_argument with the first issue if the
    // data is not a bounded distributive lattice.
    static FinDistLattice from_leq(std::vector<std::vector<bool>> leq);
    // Covering pairs i < j over elements 0..n-1; leq = reflexive transitive
    // closure.
    static FinDistLattice from_covers(int n, const std::vector<std::pair<int, int>>& covers);

    int n() const { return n_; }
    bool leq(int a, int b) const { return leq_[a][b]; }
    int meet(int a, int b) const { return meet_[a][b]; }
    int join(int a, int b) const { return join_[a][b]; }
    int bot() const { return bot_; }
    int top() const { return top_; }
    bool trivial() const { return n_ == 1; }

    // j != bot covering exactly one element; in a distributive lattice this
    // coincides with join-primality.
    std::vector<int> join_irreducibles() const;
    bool is_join_irreducible(int e) const;

    // Largest v with v /\ a = bot (exists by distributivity).
    int pseudocomplement(int a) const;

    std::vector<std::pair<int, int>> cover_pairs() const;

private:
    int n_ = 0;
    std::vector<std::vector<bool>> leq_;
    std::vector<std::vector<int>> meet_, join_;
    int bot_ = 0, top_ = 0;
};

// Full validation of raw candidate data; never throws. Lists every violated
// axiom instance; malformed-table problems are reported distinctly and
// suppress the dependent checks.
ValidationReport check_distributive(const LatticeCandidate& cand);

struct PrimeFilter {
    BitVec member;  // subset of lattice elements
};

// why != nullptr receives a human-readable reason on failure.
bool is_prime_filter(const FinDistLattice& L, const BitVec& member, std::string* why = nullptr);

struct SpecSpace {
    std::vector<PrimeFilter> points;
    // specialization: q <= p iff q subseteq p
    std::vector<std::vector<bool>> specializes;
    // per lattice element phi: the point set [phi] = { p : phi in p }
    std::vector<BitVec> basic_open;

    // q in closure({p}) iff every basic open containing q contains p.
    bool in_closure(int q, int p) const;
    // O (as a point set) is open iff it is a union of basic opens.
    bool is_open(const BitVec& pointset) const;
};

struct TrivialLatticeError : std::runtime_error {
    TrivialLatticeError() : std::runtime_error("trivial lattice") {}
};

// All prime filters with specialization and basic opens. The one-element
// lattice has no proper filters and is rejected.
SpecSpace spectrum(const FinDistLattice& L);

struct BirkhoffResult {
    FinDistLattice rebuilt;       // lattice of down-sets of join-irreducibles
    std::vector<int> iso;         // element of L -> element of rebuilt
};

// Rebuilds L from its join-irreducible poset and returns the canonical
// isomorphism x -> { j join-irreducible : j <= x }. Throws std::logic_error
// if the canonical map fails to be an isomorphism (a bug, not bad input).
BirkhoffResult birkhoff_roundtrip(const FinDistLattice& L);

// Longest chain p_0 < ... < p_k of prime filters; nullopt for the trivial
// lattice.
std::optional<int> krull_dim_chains(const FinDistLattice& L);

struct KrullAlgebraicResult {
    int dim = -1;                      // -1 when inconclusive
    bool inconclusive = false;
    // For each n < dim: a counterexample tuple x_1..x_{n+1} with no witness.
    std::vector<std::vector<int>> counterexamples;
    // Universal witness data for the succeeding n: step(c, x) = the largest
    // a with a /\ x <= c, joined with x. Any tuple's witness chain can be
    // read off this table.
    std::vector<std::vector<int>> step_table;  // [c][x]
};

// Least n such that every tuple x_1..x_{n+1} admits witnesses
// a_1 /\ x_1 = 0, a_{i+1} /\ x_{i+1} <= a_i \/ x_i, a_{n+1} \/ x_{n+1} = 1.
// Computed by dynamic programming over the induced step function; the greedy
// maximal witness is optimal because {a : a /\ x <= c} is an ideal.
KrullAlgebraicResult krull_dim_algebraic(const FinDistLattice& L, int cutoff = 64);

// Lexicographically first witness tuple for a given x-tuple at level n,
// or empty if none exists. Used for reports and oracle tests.
std::vector<int> krull_witness_for(const FinDistLattice& L, const std::vector<int>& xs);

struct QuotientResult {
    FinDistLattice quotient;
    std::vector<int> cls;  // element -> quotient element
};

struct NotPrimeError : std::runtime_error {
    explicit NotPrimeError(const std::string& m) : std::runtime_error(m) {}
};

// L / ~p where a ~p b iff exists x in p with x /\ a = x /\ b. Verifies that p
// is a prime filter (NotPrimeError with the violating pair otherwise) and
// that ~p is a lattice congruence before quotienting.
QuotientResult quotient_by_prime(const FinDistLattice& L, const PrimeFilter& p);

// Isomorphism via join-irreducible poset matching with backtracking;
// intended for desk-scale lattices (<= a few dozen elements).
bool lattices_isomorphic(const FinDistLattice& A, const FinDistLattice& B,
                         std::vector<int>* witness = nullptr);

// Text format: header "dlat <n>", then one covering pair "i < j" per line.
// '#' starts a comment. Optional check lines "meet i j k" / "join i j k"
// are compared against the derived tables (mismatch = input error).
FinDistLattice read_lattice(std::istream& in);
FinDistLattice read_lattice_file(const std::string& path);
void write_lattice(std::ostream& out, const FinDistLattice& L);

// Parses "{i, j, ...}" or "i,j,..." as a prime filter over L; validates.
PrimeFilter parse_prime_filter(const FinDistLattice& L, const std::string& text);

}  // namespace posmt::dlat
