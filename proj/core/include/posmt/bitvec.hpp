#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace posmt {

// Fixed-size bit vector used for subsets of tuple spaces and lattice
// element sets. Sizes stay desk-scale (a few thousand bits), so a plain
// word vector is enough.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n, bool fill = false)
        : n_(n), w_((n + 63) / 64, fill ? ~std::uint64_t{0} : 0) {
        trim();
    }

    std::size_t size() const { return n_; }

    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v = true) {
        std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }
    bool any() const {
        for (auto w : w_) if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    bool is_subset_of(const BitVec& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    BitVec operator&(const BitVec& o) const {
        BitVec r(n_);
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
        return r;
    }
    BitVec operator|(const BitVec& o) const {
        BitVec r(n_);
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
        return r;
    }
    // set difference: bits in *this not in o
    BitVec minus(const BitVec& o) const {
        BitVec r(n_);
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & ~o.w_[i];
        return r;
    }
    BitVec& operator&=(const BitVec& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    BitVec& operator|=(const BitVec& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }

    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }
    bool operator<(const BitVec& o) const {  // total order for deterministic maps
        if (n_ != o.n_) return n_ < o.n_;
        return w_ < o.w_;
    }

    long long first_set() const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return static_cast<long long>(i * 64 + __builtin_ctzll(w_[i]));
        return -1;
    }

    template <class F>
    void for_each_set(F&& f) const {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            std::uint64_t w = w_[i];
            while (w) {
                std::size_t b = i * 64 + __builtin_ctzll(w);
                f(b);
                w &= w - 1;
            }
        }
    }

    const std::vector<std::uint64_t>& words() const { return w_; }

    std::size_t hash() const {
        std::size_t h = n_ * 0x9e3779b97f4a7c15ull;
        for (auto w : w_) h = h * 1099511628211ull ^ w;
        return h;
    }

private:
    void trim() {
        if (n_ % 64 && !w_.empty())
            w_.back() &= (~std::uint64_t{0}) >> (64 - n_ % 64);
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace posmt
