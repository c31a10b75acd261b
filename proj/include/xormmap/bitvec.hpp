#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace xormmap {

// Dynamically sized bit vector packed into 64-bit words. Bits beyond size()
// are kept zero so word-level operations (xor, popcount) need no masking.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : words_((n + 63) / 64, 0), size_(n) {}

    static BitVec from_uint(std::uint64_t bits, std::size_t n) {
        assert(n <= 64);
        BitVec v(n);
        if (n > 0) v.words_[0] = (n == 64) ? bits : (bits & ((std::uint64_t(1) << n) - 1));
        return v;
    }

    static BitVec from_string(const std::string& s) {
        BitVec v(s.size());
        for (std::size_t i = 0; i < s.size(); i++)
            if (s[i] == '1') v.set(i, true);
        return v;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const {
        assert(i < size_);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(std::size_t i, bool b) {
        assert(i < size_);
        std::uint64_t m = std::uint64_t(1) << (i & 63);
        if (b) words_[i >> 6] |= m;
        else words_[i >> 6] &= ~m;
    }

    void flip(std::size_t i) {
        assert(i < size_);
        words_[i >> 6] ^= std::uint64_t(1) << (i & 63);
    }

    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    std::size_t num_words() const { return words_.size(); }
    std::uint64_t word(std::size_t w) const { return words_[w]; }
    std::uint64_t& word(std::size_t w) { return words_[w]; }

    void xor_with(const BitVec& o) {
        assert(o.size_ == size_);
        for (std::size_t w = 0; w < words_.size(); w++) words_[w] ^= o.words_[w];
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += std::popcount(w);
        return c;
    }

    // Parity of <this AND other>, i.e. the GF(2) inner product.
    bool and_parity(const BitVec& o) const {
        assert(o.size_ == size_);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); w++) acc ^= words_[w] & o.words_[w];
        return std::popcount(acc) & 1;
    }

    bool any() const {
        for (std::uint64_t w : words_)
            if (w) return true;
        return false;
    }

    int lowest_set() const {
        for (std::size_t w = 0; w < words_.size(); w++)
            if (words_[w]) return int(w * 64 + std::countr_zero(words_[w]));
        return -1;
    }

    // Word mask of last partial word; vectors always keep tail bits zero.
    void mask_tail() {
        if (size_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t(1) << (size_ % 64)) - 1;
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; i++)
            if (get(i)) s[i] = '1';
        return s;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }
    friend bool operator!=(const BitVec& a, const BitVec& b) { return !(a == b); }

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

}  // namespace xormmap
