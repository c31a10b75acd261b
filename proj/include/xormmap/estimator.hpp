#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "oracle.hpp"
#include "parallel.hpp"

namespace xormmap {

// KL divergence between Bernoulli(p) and Bernoulli(q), with 0*ln(0) = 0.
inline double kl_bernoulli(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("kl_bernoulli: p outside [0,1]");
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("kl_bernoulli: q outside (0,1)");
    double t1 = p > 0.0 ? p * std::log(p / q) : 0.0;
    double t2 = p < 1.0 ? (1.0 - p) * std::log((1.0 - p) / (1.0 - q)) : 0.0;
    return t1 + t2;
}

// Chernoff exponent governing replicate counts: D(1/2 || 2^c/(2^c-1)^2).
// Needs c >= 2 so that the reference probability stays below 1/2.
inline double alpha_star(int c) {
    if (c < 2) throw std::invalid_argument("alpha_star: need c >= 2");
    double pc = std::ldexp(1.0, c);  // 2^c
    return kl_bernoulli(0.5, pc / ((pc - 1.0) * (pc - 1.0)));
}

inline double failure_prob_p(int c) {
    double pc = std::ldexp(1.0, c);
    return pc / ((pc - 1.0) * (pc - 1.0));
}

// Replicates needed for the full descending sweep: ceil((m ln2 + ln(n/d)) / alpha*(c)).
inline int required_T(int m, int n, double delta, int c) {
    if (m < 0 || n < 1 || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("required_T: bad parameters");
    double t = (m * std::log(2.0) + std::log(double(n) / delta)) / alpha_star(c);
    int T = int(std::ceil(t - 1e-12));
    return T < 1 ? 1 : T;
}

enum class Outcome { True, False, Unknown };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::True: return "true";
        case Outcome::False: return "false";
        default: return "unknown";
    }
}

// One oracle call: parity-row count k, trial index (for repeated-trial
// variants), the threshold decision and the raw objective behind it.
struct RunRecord {
    int k = 0;
    int trial = 0;
    Outcome outcome = Outcome::Unknown;
    int objective = 0;
    int threshold = 0;
    BitVec argmax_decision;
    std::uint64_t nodes = 0;
    double wall_secs = 0.0;
    SolveStatus oracle_status = SolveStatus::Optimal;
};

struct EstimatorConfig {
    int c = 3;
    double delta = 0.2;
    std::optional<int> T_override;
    OracleEngine engine = OracleEngine::EnumerateA;
    SearchBudget budget;
    std::uint64_t master_seed = 0;
    int parallel = 1;
    int enumeration_cap_bits = 24;
    bool early_stop = true;  // joint engine may stop at the threshold certificate

    void validate() const {
        if (c < 2) throw std::invalid_argument("EstimatorConfig: need c >= 2");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("EstimatorConfig: delta in (0,1)");
        if (T_override && *T_override < 1) throw std::invalid_argument("EstimatorConfig: T >= 1");
        if (parallel < 1) throw std::invalid_argument("EstimatorConfig: parallel >= 1");
    }
};

enum class EstimateStatus { Ok, Degraded };

inline const char* to_string(EstimateStatus s) { return s == EstimateStatus::Ok ? "ok" : "degraded"; }

// Point estimate 2^k_hat with exponent bounds; all arithmetic stays in
// exponents so nothing overflows. Records list every oracle call the
// sequential decision rule examined, largest k first.
struct EstimateReport {
    int n_bits = 0;  // marginal dimension the sweep ran over
    int T = 1;
    int k_hat = 0;
    int lb_exponent = 0;
    int ub_exponent = 0;
    BitVec argmax_decision;
    std::vector<RunRecord> records;
    EstimateStatus status = EstimateStatus::Ok;
    bool possibly_zero = false;  // loop exhausted and even the unhashed problem looks unsatisfiable

    double estimate_log10() const { return k_hat * 0.30102999566398119521; }
    std::uint64_t total_nodes() const {
        std::uint64_t s = 0;
        for (const RunRecord& r : records) s += r.nodes;
        return s;
    }
};

// Anytime bounds from whichever calls completed: the smallest refuted k gives
// the upper exponent (+c), the largest accepted k the lower (-c), clamped to
// [0, n] and ordered.
inline std::pair<int, int> bounds_from_partial(const std::vector<RunRecord>& records, int c, int n) {
    int min_false = -1, max_true = -1;
    for (const RunRecord& r : records) {
        if (r.outcome == Outcome::False && (min_false < 0 || r.k < min_false)) min_false = r.k;
        if (r.outcome == Outcome::True && r.k > max_true) max_true = r.k;
    }
    int lo = max_true < 0 ? 0 : max_true - c;
    int hi = min_false < 0 ? n : min_false + c;
    lo = std::max(0, std::min(lo, n));
    hi = std::max(0, std::min(hi, n));
    if (lo > hi) std::swap(lo, hi);
    return {lo, hi};
}

// One membership probe: sample h_k over the marginal bits and ask whether
// W(a0, h_k) is non-empty. Budget overruns propagate as Unknown.
inline Outcome xor_binary(const MmapInstance& inst, const BitVec& a0, int k, const Rng& rng,
                          const SearchBudget& budget = {}) {
    Rng r = rng.derive(seed_mix(kSeedParity, 0));
    ParitySystem ps = sample_parity(inst.space().num_marginal, k, r);
    switch (solve_emptiness(inst, a0, ps, budget)) {
        case Feasibility::Sat: return Outcome::True;
        case Feasibility::Unsat: return Outcome::False;
        default: return Outcome::Unknown;
    }
}

namespace detail {

inline RunRecord record_from_oracle(int k, int trial, int threshold, const OracleResult& res) {
    RunRecord rec;
    rec.k = k;
    rec.trial = trial;
    rec.threshold = threshold;
    rec.objective = res.objective;
    rec.argmax_decision = res.argmax_decision;
    rec.nodes = res.nodes;
    rec.wall_secs = res.wall_secs;
    rec.oracle_status = res.status;
    if (res.status == SolveStatus::BudgetExceeded) rec.outcome = Outcome::Unknown;
    else rec.outcome = res.objective >= threshold ? Outcome::True : Outcome::False;
    return rec;
}

}  // namespace detail

// Replicated threshold query: accept k iff the optimal replicated objective
// exceeds T/2 (objective >= floor(T/2)+1). The bound proof uses the strict
// real test "> T/2"; for even T this coincides with reading the ceiling
// threshold strictly, and for odd T (including T=1, where a ceiling-strict
// test could never fire) it is the reading the guarantees need.
inline int xor_k_min_objective(int T) { return T / 2 + 1; }

inline RunRecord xor_k_with_threshold(const MmapInstance& inst, int k, int T, int threshold, int trial,
                                      const EstimatorConfig& cfg) {
    Rng call_rng(derive_seed(cfg.master_seed, {kSeedXorK, std::uint64_t(k), std::uint64_t(trial)}));
    ReplicatedProblem rep = build_replicated(inst, T, k, call_rng);
    OracleResult res = solve_replicated(rep, threshold, cfg.engine, cfg.budget, cfg.early_stop);
    return detail::record_from_oracle(k, trial, threshold, res);
}

inline RunRecord xor_k(const MmapInstance& inst, int k, int T, int trial, const EstimatorConfig& cfg) {
    return xor_k_with_threshold(inst, k, T, xor_k_min_objective(T), trial, cfg);
}

namespace detail {

using XorKFn = std::function<RunRecord(int k, int trial)>;

// Descending sweep k = n..1, accepting the first True. Waves of `parallel`
// calls run concurrently; outcomes are judged in sequential order and
// speculative records past the accepting k are discarded, so the visible
// record list is identical for every parallel degree. Unknown outcomes do not
// stop the sweep; they degrade the report to anytime bounds.
struct SweepResult {
    int k_hat = 0;
    bool accepted = false;
    bool any_unknown = false;
    std::vector<RunRecord> records;
};

inline SweepResult sweep_descending(int n, int parallel, const XorKFn& call) {
    SweepResult out;
    for (int hi = n; hi >= 1 && !out.accepted;) {
        int lo = std::max(1, hi - parallel + 1);
        std::vector<RunRecord> wave(static_cast<std::size_t>(hi - lo + 1));
        run_indexed_tasks(parallel, hi - lo + 1, [&](int i) { wave[std::size_t(i)] = call(hi - i, 0); });
        for (const RunRecord& rec : wave) {
            out.records.push_back(rec);
            if (rec.outcome == Outcome::Unknown) out.any_unknown = true;
            if (rec.outcome == Outcome::True) {
                out.accepted = true;
                out.k_hat = rec.k;
                break;
            }
        }
        hi = lo - 1;
    }
    return out;
}

// Direct satisfiability of the unhashed problem: exists (a, x) with w = 1.
inline Feasibility direct_sat(const MmapInstance& inst, const SearchBudget& budget, BitVec* a_out) {
    const int m = inst.space().num_decision, n = inst.space().num_marginal;
    XorSatSearch search(m + n, inst.cnf().clauses(), EchelonForm{m + n, {}, {}, BitVec(0), 0, true});
    BitVec w;
    Feasibility f = search.solve(budget, nullptr, &w);
    if (f == Feasibility::Sat && a_out) {
        *a_out = BitVec(std::size_t(m));
        for (int i = 0; i < m; i++) a_out->set(std::size_t(i), w.get(std::size_t(i)));
    }
    return f;
}

inline EstimateReport report_from_sweep(const MmapInstance& inst, const EstimatorConfig& cfg, int n,
                                        int T, SweepResult&& sweep) {
    EstimateReport rep;
    rep.n_bits = n;
    rep.T = T;
    rep.k_hat = sweep.k_hat;
    rep.records = std::move(sweep.records);
    rep.status = sweep.any_unknown ? EstimateStatus::Degraded : EstimateStatus::Ok;
    rep.argmax_decision = BitVec(std::size_t(inst.space().num_decision));
    if (sweep.accepted) {
        for (const RunRecord& r : rep.records)
            if (r.k == rep.k_hat && r.outcome == Outcome::True) {
                rep.argmax_decision = r.argmax_decision;
                break;
            }
    } else if (inst.kind() == WeightKind::CnfIndicator) {
        BitVec a;
        if (direct_sat(inst, cfg.budget, &a) == Feasibility::Sat) rep.argmax_decision = a;
        else rep.possibly_zero = true;
    }
    if (rep.status == EstimateStatus::Ok) {
        rep.lb_exponent = std::max(0, rep.k_hat - cfg.c);
        rep.ub_exponent = std::min(n, rep.k_hat + cfg.c);
    } else {
        auto [lo, hi] = bounds_from_partial(rep.records, cfg.c, n);
        rep.lb_exponent = lo;
        rep.ub_exponent = hi;
    }
    return rep;
}

}  // namespace detail

// Full estimator: sweep k = n..1, return 2^k at the first accepted k, else 1.
// With T >= required_T(m, n, delta, c), the estimate is a 2^(2c)-factor
// approximation of max_a #w(a) with probability 1 - delta.
inline EstimateReport xor_mmap(const MmapInstance& inst, const EstimatorConfig& cfg) {
    cfg.validate();
    if (inst.kind() != WeightKind::CnfIndicator)
        throw std::invalid_argument("xor_mmap: CNF-kind instance required (weighted path wraps it)");
    const int m = inst.space().num_decision, n = inst.space().num_marginal;
    const int T = cfg.T_override ? *cfg.T_override : required_T(m, n, cfg.delta, cfg.c);
    auto sweep = detail::sweep_descending(
        n, cfg.parallel, [&](int k, int trial) { return xor_k(inst, k, T, trial, cfg); });
    return detail::report_from_sweep(inst, cfg, n, T, std::move(sweep));
}

}  // namespace xormmap
