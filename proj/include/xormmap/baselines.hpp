#pragma once

#include <stdexcept>
#include <vector>

#include "oracle.hpp"
#include "rng.hpp"

namespace xormmap {

struct SaaConfig {
    int samples = 10000;          // unweighted default; weighted runs historically used 1000
    bool enumerate_all = false;   // replace sampling by the full marginal space (exact SAA)
    int exact_argmax_cap_bits = 20;
    int restarts = 8;             // local search restarts when m exceeds the cap
    std::uint64_t seed = 0;
};

struct SaaResult {
    BitVec decision;
    LogWeight sample_objective;  // (2^n / N) * sum_j w(a, x_j): unbiased for sum_x w(a, x)
};

namespace detail {

inline LogWeight saa_score(const MmapInstance& inst, const BitVec& a, const std::vector<BitVec>& xs) {
    LogWeight s = LogWeight::zero();
    Assignment asg(a, BitVec(std::size_t(inst.space().num_marginal)));
    for (const BitVec& x : xs) {
        asg.marginal = x;
        s.add(inst.evaluate(asg));
    }
    return s;
}

}  // namespace detail

// Sample Average Approximation: fix N uniform marginal samples, then maximize
// the sampled sum over decisions — exactly (enumeration) while m is within
// the cap, otherwise by greedy bit-flip local search with restarts. Uniform
// sampling is exact for indicator weights; for Ising weights it is importance
// sampling with a uniform proposal, which is the method's known weak spot.
// Ties break toward the lowest binary value of a (bit i has weight 2^i).
inline SaaResult saa_solve(const MmapInstance& inst, int n_samples, Rng& rng,
                           const SaaConfig& cfg = {}) {
    if (n_samples < 1 && !cfg.enumerate_all) throw std::invalid_argument("saa_solve: need N >= 1");
    const int m = inst.space().num_decision, n = inst.space().num_marginal;

    std::vector<BitVec> xs;
    if (cfg.enumerate_all) {
        if (n > 24) throw BudgetExceededError("saa_solve: full enumeration over 2^" + std::to_string(n));
        xs.reserve(std::size_t(1) << n);
        for (std::uint64_t dx = 0; dx < (std::uint64_t(1) << n); dx++)
            xs.push_back(BitVec::from_uint(dx, std::size_t(n)));
    } else {
        xs.reserve(std::size_t(n_samples));
        for (int j = 0; j < n_samples; j++) xs.push_back(rng.random_bits(std::size_t(n)));
    }

    BitVec best_a{std::size_t(m)};
    LogWeight best = detail::saa_score(inst, best_a, xs);
    if (m <= cfg.exact_argmax_cap_bits) {
        for (std::uint64_t da = 1; da < (std::uint64_t(1) << m); da++) {
            BitVec a = BitVec::from_uint(da, std::size_t(m));
            LogWeight s = detail::saa_score(inst, a, xs);
            if (s > best) {
                best = s;
                best_a = a;
            }
        }
    } else {
        // documented fallback: greedy bit flips from seeded random starts
        for (int rs = 0; rs < cfg.restarts; rs++) {
            BitVec a = rs == 0 ? BitVec(std::size_t(m)) : rng.random_bits(std::size_t(m));
            LogWeight cur = detail::saa_score(inst, a, xs);
            bool improved = true;
            while (improved) {
                improved = false;
                for (int i = 0; i < m; i++) {
                    a.flip(std::size_t(i));
                    LogWeight s = detail::saa_score(inst, a, xs);
                    if (s > cur) {
                        cur = s;
                        improved = true;
                    } else {
                        a.flip(std::size_t(i));
                    }
                }
            }
            if (cur > best) {
                best = cur;
                best_a = a;
            }
        }
    }

    LogWeight objective = best;
    if (!cfg.enumerate_all && !objective.is_zero())
        objective = objective.scaled_pow2(n).times(LogWeight::from_linear(1.0 / double(n_samples)));
    return {best_a, objective};
}

struct ExactMmapResult {
    BitVec decision;
    LogWeight opt;                       // max_a sum_x w(a, x)
    std::optional<std::uint64_t> count;  // the count at the argmax, CNF kind
};

// Brute-force reference: every decision vector scored by the exact inner
// count/sum, lowest binary value wins ties.
inline ExactMmapResult exact_mmap(const MmapInstance& inst, int enumeration_cap_bits = 24) {
    const int m = inst.space().num_decision;
    if (m + inst.space().num_marginal > enumeration_cap_bits + 4)
        throw BudgetExceededError("exact_mmap: space too large");
    ExactMmapResult best;
    best.decision = BitVec(std::size_t(m));
    bool first = true;
    for (std::uint64_t da = 0; da < (std::uint64_t(1) << m); da++) {
        BitVec a = BitVec::from_uint(da, std::size_t(m));
        ExactCount ec = count_exact(inst, a, enumeration_cap_bits);
        if (first || ec.sum > best.opt) {
            best.decision = a;
            best.opt = ec.sum;
            best.count = ec.count;
            first = false;
        }
    }
    return best;
}

// log10 of sum_x w(a, x); zero maps to the -inf sentinel.
inline double score_solution(const MmapInstance& inst, const BitVec& a, int enumeration_cap_bits = 24) {
    return count_exact(inst, a, enumeration_cap_bits).sum.log10();
}

}  // namespace xormmap
