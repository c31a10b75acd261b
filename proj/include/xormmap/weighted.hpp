#pragma once

#include <optional>
#include <stdexcept>

#include "embedding.hpp"
#include "estimator.hpp"

namespace xormmap {

// The (x, y) in X x {0,1}^l image of a weighted instance: the indicator
// w'(a,x,y) is 1 iff every forced bit of y (determined by w(a,x)/M) is zero.
// Multiplying all weights by a positive constant scales M identically and
// leaves the embedding unchanged.
struct EmbeddedInstance {
    MmapInstance base;
    int l = 1;
    LogWeight max_w;  // exact M = max w(a,x)
    MaxWeightPath max_path = MaxWeightPath::Enumerated;

    bool empty() const { return max_w.is_zero(); }
    int embedded_marginal_bits() const { return base.space().num_marginal + l; }

    bool indicator(const Assignment& asg, const BitVec& y) const {
        if (int(y.size()) != l) throw std::invalid_argument("EmbeddedInstance: y length mismatch");
        int forced = forced_count(base.evaluate(asg), max_w, l);
        for (int i = l - forced + 1; i <= l; i++)
            if (y.get(std::size_t(i - 1))) return false;
        return true;
    }
};

inline EmbeddedInstance embed(const MmapInstance& inst, std::optional<int> l_opt = std::nullopt,
                              int enumeration_cap_bits = 24) {
    int l = l_opt.value_or(inst.space().num_marginal);
    if (l < 1) throw std::invalid_argument("embed: need l >= 1");
    MaxWeightResult mw = max_weight(inst, enumeration_cap_bits);
    return EmbeddedInstance{inst, l, mw.value, mw.path};
}

// sum over (x,y) of w'(a,x,y) = sum over x of |S_a(w,l,x)|; exact integer.
inline std::uint64_t embedded_sum(const EmbeddedInstance& emb, const BitVec& a,
                                  int enumeration_cap_bits = 24) {
    const int n = emb.base.space().num_marginal;
    if (n + emb.l > 62 || n > enumeration_cap_bits)
        throw BudgetExceededError("embedded_sum: embedded space too large for exact integer");
    std::uint64_t total = 0;
    Assignment asg(a, BitVec(std::size_t(n)));
    for (std::uint64_t dx = 0; dx < (std::uint64_t(1) << n); dx++) {
        asg.marginal = BitVec::from_uint(dx, std::size_t(n));
        total += slice_size(emb.base.evaluate(asg), emb.max_w, emb.l);
    }
    return total;
}

enum class WeightedStatus { Ok, Degraded, Zero };

inline const char* to_string(WeightedStatus s) {
    switch (s) {
        case WeightedStatus::Ok: return "ok";
        case WeightedStatus::Degraded: return "degraded";
        default: return "zero";
    }
}

// Weighted estimate and its certified window. The count estimate 2^k_hat for
// the embedded problem rescales by M/2^l; the window combines the hashing
// window with the embedding's factor-3 sandwich (l = n absorbs the slack
// term): OPT in [estimate/(6*2^c), estimate*2^c].
struct WeightedReport {
    EstimateReport core;
    int l = 1;
    LogWeight max_w;
    LogWeight estimate;
    LogWeight lower, upper;
    WeightedStatus status = WeightedStatus::Ok;
};

// End-to-end weighted estimator: embed with l = n (overridable; larger l
// tightens the small-weight regime), sweep the embedded problem over n+l
// marginal bits with the enumeration-backed weighted oracle, rescale.
inline WeightedReport weighted_mmap(const MmapInstance& inst, const EstimatorConfig& cfg,
                                    std::optional<int> l_opt = std::nullopt) {
    cfg.validate();
    EmbeddedInstance emb = embed(inst, l_opt, cfg.enumeration_cap_bits);
    WeightedReport out;
    out.l = emb.l;
    out.max_w = emb.max_w;
    if (emb.empty()) {
        out.status = WeightedStatus::Zero;
        out.estimate = LogWeight::zero();
        out.lower = LogWeight::zero();
        out.upper = LogWeight::zero();
        out.core.argmax_decision = BitVec(std::size_t(inst.space().num_decision));
        return out;
    }

    const int m = inst.space().num_decision;
    const int n_emb = emb.embedded_marginal_bits();
    const int T = cfg.T_override ? *cfg.T_override : required_T(m, n_emb, cfg.delta, cfg.c);
    auto sweep = detail::sweep_descending(n_emb, cfg.parallel, [&](int k, int trial) {
        Rng call_rng(derive_seed(cfg.master_seed, {kSeedXorK, std::uint64_t(k), std::uint64_t(trial)}));
        auto parity = sample_weighted_parity(n_emb, T, k, call_rng);
        OracleResult res = solve_replicated_weighted(inst, emb.l, emb.max_w, parity,
                                                     xor_k_min_objective(T), cfg.enumeration_cap_bits);
        return detail::record_from_oracle(k, trial, xor_k_min_objective(T), res);
    });
    out.core = detail::report_from_sweep(inst, cfg, n_emb, T, std::move(sweep));
    // the possibly-zero probe only applies to the CNF path
    if (!out.core.records.empty() && out.core.k_hat == 0) out.core.possibly_zero = false;

    out.estimate = emb.max_w.scaled_pow2(out.core.k_hat - emb.l);
    out.lower = out.estimate.scaled_pow2(-cfg.c).times(LogWeight::from_linear(1.0 / 6.0));
    out.upper = out.estimate.scaled_pow2(cfg.c);
    out.status = out.core.status == EstimateStatus::Ok ? WeightedStatus::Ok : WeightedStatus::Degraded;
    return out;
}

}  // namespace xormmap
