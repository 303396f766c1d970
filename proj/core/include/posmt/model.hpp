#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "posmt/bitvec.hpp"
#include "posmt/syntax.hpp"

namespace posmt::model {

// Row-major index space for tuples over a list of carrier sizes. The last
// coordinate varies fastest; the empty product has exactly one point.
struct TupleSpace {
    std::vector<int> sizes;
    std::vector<long long> strides;
    long long total = 1;

    static TupleSpace of(const std::vector<int>& sizes);
    long long encode(const std::vector<int>& tuple) const;
    void decode(long long idx, std::vector<int>& out) const;
    std::vector<int> decode(long long idx) const;
};

struct FinModel {
    std::shared_ptr<const syntax::Signature> sig;
    std::string name;
    // per sort: element labels (carrier indexed 0..k-1)
    std::vector<std::vector<std::string>> carriers;
    // per relation: tuple set (sorted, deduplicated)
    std::vector<std::set<std::vector<int>>> relations;
    // per function: total table, row-major over the domain product
    std::vector<std::vector<int>> functions;

    int carrier_size(int sort) const { return static_cast<int>(carriers[sort].size()); }
    TupleSpace context_space(const std::vector<int>& ctx_sorts) const;
};

// Model DSL: one model per file/string.
//   model M            (optional header)
//   A = {0, 1}
//   R = {(0,1), (1,1)}   or  R = {0, 1} for unary relations
//   f = {0 -> 1, 1 -> 0} or  f = {(0,0) -> 1, ...}
//   c = 0                (constant)
// Element names are arbitrary identifiers; '#' starts a comment.
FinModel parse_model(const std::string& text, std::shared_ptr<const syntax::Signature> sig,
                     const std::string& filename = "<input>");

std::string print_model(const FinModel& m);

// The set { a in prod(ctx carriers) : M |= f(a) } as a bit set over the
// row-major tuple space of ctx.
BitVec eval_formula(const FinModel& m, const syntax::FormulaPtr& f,
                    const syntax::VarContext& ctx);

struct SequentCheck {
    bool holds = false;
    std::vector<int> witness;  // counterexample tuple when it fails
};
SequentCheck check_sequent(const FinModel& m, const syntax::Sequent& s);

// Pointwise product: carriers are cartesian products, relations and
// functions componentwise. Projections are homomorphisms.
FinModel model_product(const FinModel& a, const FinModel& b);
FinModel model_product(const std::vector<const FinModel*>& ms);

struct Homomorphism {
    // per sort: carrier map src -> dst
    std::vector<std::vector<int>> map;
};

bool is_homomorphism(const FinModel& src, const FinModel& dst, const Homomorphism& h,
                     std::string* why = nullptr);

struct HomEnumeration {
    std::vector<Homomorphism> homs;
    bool truncated = false;
};

// Backtracking over sorts in declaration order, elements ascending;
// truncates at cap.
HomEnumeration enumerate_homomorphisms(const FinModel& src, const FinModel& dst, std::size_t cap);

}  // namespace posmt::model
