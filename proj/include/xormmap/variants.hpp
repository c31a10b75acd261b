#pragma once

#include <cmath>
#include <stdexcept>

#include "estimator.hpp"

namespace xormmap {

// Replicates needed when only the ~log2(n) outcomes a binary search inspects
// must all be correct. log2(n) is clamped to >= 1 so n = 1 stays meaningful;
// n = 2 makes the middle term vanish.
inline int required_T_binsearch(int m, int n, double delta, int c) {
    if (m < 0 || n < 1 || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("required_T_binsearch: bad parameters");
    double lg = std::max(1.0, std::log2(double(n)));
    double t = (m * std::log(2.0) + std::log(lg) + std::log(1.0 / delta)) / alpha_star(c);
    int T = int(std::ceil(t - 1e-12));
    return T < 1 ? 1 : T;
}

// Repeated-trial variant: smaller T per call, r independent trials per k with
// a majority vote. p = 2^c/(2^c-1)^2 is the single-call failure probability.
inline int required_T_plus(int m, int c) {
    if (m < 0) throw std::invalid_argument("required_T_plus: bad parameters");
    double p = failure_prob_p(c);
    double t = (m * std::log(2.0) + std::log(1.0 / p)) / alpha_star(c);
    int T = int(std::ceil(t - 1e-12));
    return T < 1 ? 1 : T;
}

inline int required_r(int n, double delta, int c) {
    if (n < 1 || !(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("required_r: bad parameters");
    double r = std::log(double(n) / delta) / kl_bernoulli(0.5, failure_prob_p(c));
    int R = int(std::ceil(r - 1e-12));
    return R < 1 ? 1 : R;
}

// Biased threshold: accept when the replicated objective is no less than q
// (note: >=, unlike the plain query's strict > T/2).
inline RunRecord xor_k_plus(const MmapInstance& inst, int k, int T, int q, int trial,
                            const EstimatorConfig& cfg) {
    if (!(2 * q > T && q <= T)) throw std::invalid_argument("xor_k_plus: need T/2 < q <= T");
    return xor_k_with_threshold(inst, k, T, q, trial, cfg);
}

// Integer q in (T/2, T] balancing the two error exponents
//   exp(-D((T-q+1)/T || p) T)   (missed acceptance)
//   2^m exp(-D(q/T || p) T)     (false acceptance, union over decisions)
// by exhaustive scan; ties go to the smaller q. Endpoints are exact: at q = T
// the divergence argument hits 1 and the 0*ln0 convention applies, no epsilon
// nudging.
inline int q_star(int T, int m, int c) {
    if (T < 2 || m < 0) throw std::invalid_argument("q_star: need T >= 2, m >= 0");
    double p = failure_prob_p(c);
    int best_q = -1;
    double best_v = 0.0;
    for (int q = T / 2 + 1; q <= T; q++) {
        double s1 = -kl_bernoulli(double(T - q + 1) / T, p) * T;
        double s2 = m * std::log(2.0) - kl_bernoulli(double(q) / T, p) * T;
        double v = std::max(s1, s2);
        if (best_q < 0 || v < best_v) {
            best_q = q;
            best_v = v;
        }
    }
    return best_q;
}

struct VariantConfig {
    EstimatorConfig base;
    std::optional<int> r_override;  // plus
    std::optional<int> q_override;  // biased
};

// Binary search over k treating the accept predicate as monotone (true below
// the boundary, false above). Probes at most ceil(log2 n)+1 values. The
// predicate is only monotone with high probability; the search returns the
// highest probed k that accepted, which is exactly the invariant the lo
// pointer maintains. An Unknown probe aborts the search; the report then
// falls back to anytime bounds over the completed probes.
inline EstimateReport xor_mmap_binsearch(const MmapInstance& inst, const EstimatorConfig& cfg) {
    cfg.validate();
    if (inst.kind() != WeightKind::CnfIndicator)
        throw std::invalid_argument("xor_mmap_binsearch: CNF-kind instance required");
    const int m = inst.space().num_decision, n = inst.space().num_marginal;
    const int T = cfg.T_override ? *cfg.T_override : required_T_binsearch(m, n, cfg.delta, cfg.c);

    detail::SweepResult sweep;
    int lo = 0, hi = n + 1;  // lo: virtually accepted, hi: virtually refused
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        RunRecord rec = xor_k(inst, mid, T, 0, cfg);
        sweep.records.push_back(rec);
        if (rec.outcome == Outcome::Unknown) {
            sweep.any_unknown = true;
            break;
        }
        if (rec.outcome == Outcome::True) lo = mid;
        else hi = mid;
    }
    sweep.k_hat = lo;
    sweep.accepted = lo > 0;
    return detail::report_from_sweep(inst, cfg, n, T, std::move(sweep));
}

// Repeated-trial sweep: r independent calls per k (fresh hash seeds per
// trial), accept when at least ceil(r/2) of them return true. Unknown trials
// count as abstentions and degrade the report. Trials within a k may run
// concurrently.
inline EstimateReport xor_mmap_plus(const MmapInstance& inst, const VariantConfig& vcfg) {
    const EstimatorConfig& cfg = vcfg.base;
    cfg.validate();
    if (inst.kind() != WeightKind::CnfIndicator)
        throw std::invalid_argument("xor_mmap_plus: CNF-kind instance required");
    const int m = inst.space().num_decision, n = inst.space().num_marginal;
    const int T = cfg.T_override ? *cfg.T_override : required_T_plus(m, cfg.c);
    const int r = vcfg.r_override ? *vcfg.r_override : required_r(n, cfg.delta, cfg.c);
    if (r < 1) throw std::invalid_argument("xor_mmap_plus: need r >= 1");
    const int need = (r + 1) / 2;  // ceil(r/2)

    detail::SweepResult sweep;
    for (int k = n; k >= 1 && !sweep.accepted; k--) {
        std::vector<RunRecord> trials(static_cast<std::size_t>(r));
        run_indexed_tasks(cfg.parallel, r, [&](int t) { trials[std::size_t(t)] = xor_k(inst, k, T, t, cfg); });
        int trues = 0;
        for (const RunRecord& rec : trials) {
            sweep.records.push_back(rec);
            if (rec.outcome == Outcome::True) trues++;
            if (rec.outcome == Outcome::Unknown) sweep.any_unknown = true;
        }
        if (trues >= need) {
            sweep.accepted = true;
            sweep.k_hat = k;
        }
    }
    EstimateReport rep = detail::report_from_sweep(inst, cfg, n, T, std::move(sweep));
    if (rep.k_hat > 0) {
        // argmax from the accepting k's first true trial
        for (const RunRecord& r2 : rep.records)
            if (r2.k == rep.k_hat && r2.outcome == Outcome::True) {
                rep.argmax_decision = r2.argmax_decision;
                break;
            }
    }
    return rep;
}

// Descending sweep accepting on the biased test (objective >= q), q defaulting
// to the balancing point q*(T).
inline EstimateReport xor_mmap_biased(const MmapInstance& inst, const VariantConfig& vcfg) {
    const EstimatorConfig& cfg = vcfg.base;
    cfg.validate();
    if (inst.kind() != WeightKind::CnfIndicator)
        throw std::invalid_argument("xor_mmap_biased: CNF-kind instance required");
    const int m = inst.space().num_decision, n = inst.space().num_marginal;
    const int T = cfg.T_override ? *cfg.T_override : required_T(m, n, cfg.delta, cfg.c);
    const int q = vcfg.q_override ? *vcfg.q_override : (T >= 2 ? q_star(T, m, cfg.c) : 1);
    if (!(2 * q > T && q <= T)) throw std::invalid_argument("xor_mmap_biased: need T/2 < q <= T");
    auto sweep = detail::sweep_descending(
        n, cfg.parallel, [&](int k, int trial) { return xor_k_plus(inst, k, T, q, trial, cfg); });
    return detail::report_from_sweep(inst, cfg, n, T, std::move(sweep));
}

}  // namespace xormmap
