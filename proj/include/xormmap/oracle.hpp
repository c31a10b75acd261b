#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "embedding.hpp"
#include "gf2.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace xormmap {

struct SearchBudget {
    std::uint64_t node_cap = std::numeric_limits<std::uint64_t>::max();
    double time_cap_secs = std::numeric_limits<double>::infinity();
};

enum class Feasibility { Sat, Unsat, Budget };

enum class SolveStatus { Optimal, ThresholdReached, BudgetExceeded };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::ThresholdReached: return "threshold-reached";
        default: return "budget-exceeded";
    }
}

// T copies of the marginal variables, each with its own parity system and an
// auxiliary indicator y_i. Joint variable layout (also the export numbering):
// a in [0,m), copy i of x in [m + i*n, m + (i+1)*n), y_i at m + T*n + i.
// Replicate i's clauses are the base clauses with marginal variables renamed
// to copy i and the literal (not y_i) appended, so unit propagation retires a
// replicate exactly when one of its clauses dies. Parity rows of replicate i
// bind only while y_i = 1; a replicate whose system has no solution at all
// contributes 0 instead of poisoning the whole problem.
struct ReplicatedProblem {
    MmapInstance base;
    int T = 1;
    int k = 0;
    std::vector<ParitySystem> parity;   // T systems over the n marginal bits
    std::vector<Clause> joint_clauses;  // augmented, over the joint space

    int num_decision() const { return base.space().num_decision; }
    int num_marginal() const { return base.space().num_marginal; }
    int a_var(int i) const { return i; }
    int x_var(int rep, int j) const { return num_decision() + rep * num_marginal() + j; }
    int y_var(int rep) const { return num_decision() + T * num_marginal() + rep; }
    int total_vars() const { return num_decision() + T * (num_marginal() + 1); }

    void materialize_clauses() {
        joint_clauses.clear();
        const int m = num_decision();
        for (int i = 0; i < T; i++) {
            for (const Clause& cl : base.cnf().clauses()) {
                Clause out;
                out.reserve(cl.size() + 1);
                for (const Lit& l : cl)
                    out.push_back(l.var < m ? l : Lit{x_var(i, l.var - m), l.neg});
                out.push_back(Lit{y_var(i), true});
                joint_clauses.push_back(std::move(out));
            }
        }
    }
};

inline bool structurally_equal(const ReplicatedProblem& a, const ReplicatedProblem& b) {
    return a.T == b.T && a.k == b.k && a.base.space() == b.base.space() &&
           a.base.cnf() == b.base.cnf() && a.parity == b.parity;
}

// Samples the T parity systems from per-replicate derived seeds, so replicate
// i's hash is reproducible independent of evaluation order.
inline ReplicatedProblem build_replicated(const MmapInstance& inst, int T, int k, const Rng& rng) {
    if (inst.kind() != WeightKind::CnfIndicator)
        throw std::invalid_argument("build_replicated: CNF-kind instance required");
    if (T < 1 || k < 0) throw std::invalid_argument("build_replicated: need T >= 1, k >= 0");
    ReplicatedProblem rep{inst, T, k, {}, {}};
    rep.parity.reserve(std::size_t(T));
    for (int i = 0; i < T; i++) {
        Rng r = rng.derive(seed_mix(kSeedParity, std::uint64_t(i)));
        rep.parity.push_back(sample_parity(inst.space().num_marginal, k, r));
    }
    rep.materialize_clauses();
    return rep;
}

namespace detail {

class Deadline {
public:
    explicit Deadline(const SearchBudget& b)
        : node_cap_(b.node_cap),
          use_clock_(std::isfinite(b.time_cap_secs)),
          end_(std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(std::isfinite(b.time_cap_secs) ? b.time_cap_secs : 0))) {}

    bool exceeded(std::uint64_t nodes) {
        if (nodes > node_cap_) return true;
        if (!use_clock_ || (nodes & 255) != 0) return false;
        return std::chrono::steady_clock::now() > end_;
    }

private:
    std::uint64_t node_cap_;
    bool use_clock_;
    std::chrono::steady_clock::time_point end_;
};

// Depth-first search with clause unit propagation and XOR propagation against
// a reduced parity system. Branches every variable, so a Sat result always
// carries a complete witness.
class XorSatSearch {
public:
    XorSatSearch(int d, std::vector<Clause> clauses, EchelonForm xors)
        : d_(d), clauses_(std::move(clauses)), xors_(std::move(xors)), assign_(std::size_t(d), -1) {}

    Feasibility solve(const SearchBudget& budget, std::uint64_t* nodes_out, BitVec* witness_out) {
        if (!xors_.consistent) {
            if (nodes_out) *nodes_out = 0;
            return Feasibility::Unsat;
        }
        Deadline deadline(budget);
        nodes_ = 0;
        Feasibility r = recurse(deadline);
        if (nodes_out) *nodes_out = nodes_;
        if (r == Feasibility::Sat && witness_out) {
            BitVec w{std::size_t(d_)};
            for (int v = 0; v < d_; v++) w.set(std::size_t(v), assign_[std::size_t(v)] == 1);
            *witness_out = w;
        }
        return r;
    }

private:
    bool propagate_fixpoint(std::vector<int>& trail) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Clause& cl : clauses_) {
                int open = -1, open_count = 0;
                bool sat = false;
                for (const Lit& l : cl) {
                    int8_t a = assign_[std::size_t(l.var)];
                    if (a < 0) {
                        open = l.var;
                        open_count++;
                    } else if ((a == 1) != l.neg) {
                        sat = true;
                        break;
                    }
                }
                if (sat) continue;
                if (open_count == 0) return false;
                if (open_count == 1) {
                    bool value = false;
                    for (const Lit& l : cl)
                        if (l.var == open) value = !l.neg;
                    assign_[std::size_t(open)] = value ? 1 : 0;
                    trail.push_back(open);
                    changed = true;
                }
            }
            if (xors_.rank > 0) {
                PartialFix fix = current_fix();
                Propagation p = propagate(xors_, fix);
                if (p.conflict) return false;
                for (auto [var, val] : p.implied) {
                    if (assign_[std::size_t(var)] >= 0) continue;
                    assign_[std::size_t(var)] = val ? 1 : 0;
                    trail.push_back(var);
                    changed = true;
                }
            }
        }
        return true;
    }

    PartialFix current_fix() const {
        PartialFix fix = PartialFix::none(d_);
        for (int v = 0; v < d_; v++)
            if (assign_[std::size_t(v)] >= 0) fix.fix(std::size_t(v), assign_[std::size_t(v)] == 1);
        return fix;
    }

    Feasibility recurse(Deadline& deadline) {
        std::vector<int> trail;
        if (!propagate_fixpoint(trail)) {
            undo(trail);
            return Feasibility::Unsat;
        }
        int var = -1;
        for (int v = 0; v < d_; v++)
            if (assign_[std::size_t(v)] < 0) {
                var = v;
                break;
            }
        if (var < 0) return Feasibility::Sat;  // keep assignment for witness
        nodes_++;
        if (deadline.exceeded(nodes_)) {
            undo(trail);
            return Feasibility::Budget;
        }
        for (int phase = 0; phase < 2; phase++) {
            assign_[std::size_t(var)] = int8_t(phase);
            Feasibility r = recurse(deadline);
            if (r != Feasibility::Unsat) return r;  // Sat keeps state, Budget aborts
            assign_[std::size_t(var)] = -1;
        }
        undo(trail);
        return Feasibility::Unsat;
    }

    void undo(std::vector<int>& trail) {
        for (int v : trail) assign_[std::size_t(v)] = -1;
        trail.clear();
    }

    int d_;
    std::vector<Clause> clauses_;
    EchelonForm xors_;
    std::vector<int8_t> assign_;
    std::uint64_t nodes_ = 0;
};

// Base clauses specialized to a fixed decision vector, over marginal indices
// [0,n). nullopt: some clause is already dead under a (no x can help).
inline std::optional<std::vector<Clause>> clauses_under_decision(const MmapInstance& inst,
                                                                 const BitVec& a) {
    const int m = inst.space().num_decision;
    std::vector<Clause> out;
    for (const Clause& cl : inst.cnf().clauses()) {
        Clause reduced;
        bool sat = false;
        for (const Lit& l : cl) {
            if (l.var < m) {
                if (a.get(std::size_t(l.var)) != l.neg) {
                    sat = true;
                    break;
                }
            } else {
                reduced.push_back(Lit{l.var - m, l.neg});
            }
        }
        if (sat) continue;
        if (reduced.empty()) return std::nullopt;
        out.push_back(std::move(reduced));
    }
    return out;
}

}  // namespace detail

// Is W(a0, ps) = {x : w(a0,x)=1, ps satisfied} non-empty?
inline Feasibility solve_emptiness(const MmapInstance& inst, const BitVec& a0, const ParitySystem& ps,
                                   const SearchBudget& budget = {}, std::uint64_t* nodes_out = nullptr) {
    if (inst.kind() != WeightKind::CnfIndicator)
        throw std::invalid_argument("solve_emptiness: CNF-kind instance required");
    if (int(a0.size()) != inst.space().num_decision)
        throw std::invalid_argument("solve_emptiness: decision vector length mismatch");
    if (ps.dim != inst.space().num_marginal)
        throw std::invalid_argument("solve_emptiness: parity dimension mismatch");
    auto clauses = detail::clauses_under_decision(inst, a0);
    if (!clauses) {
        if (nodes_out) *nodes_out = 0;
        return Feasibility::Unsat;
    }
    detail::XorSatSearch search(inst.space().num_marginal, std::move(*clauses), eliminate(ps));
    return search.solve(budget, nodes_out, nullptr);
}

struct OracleResult {
    int objective = 0;
    BitVec argmax_decision;
    std::optional<BitVec> witness;  // joint assignment (layout of ReplicatedProblem)
    std::uint64_t nodes = 0;
    double wall_secs = 0.0;
    SolveStatus status = SolveStatus::Optimal;
};

enum class OracleEngine { EnumerateA, JointDpll };

inline const char* to_string(OracleEngine e) {
    return e == OracleEngine::EnumerateA ? "enumerate-a" : "joint-dpll";
}

inline OracleEngine engine_from_string(const std::string& s) {
    if (s == "enumerate-a") return OracleEngine::EnumerateA;
    if (s == "joint-dpll") return OracleEngine::JointDpll;
    throw std::invalid_argument("unknown oracle engine: " + s);
}

// Witness check used by tests and callers: all augmented clauses hold, and
// every replicate with y_i = 1 satisfies its parity system.
inline bool validate_witness(const ReplicatedProblem& rep, const BitVec& joint) {
    if (int(joint.size()) != rep.total_vars()) return false;
    for (const Clause& cl : rep.joint_clauses) {
        bool sat = false;
        for (const Lit& l : cl)
            if (joint.get(std::size_t(l.var)) != l.neg) {
                sat = true;
                break;
            }
        if (!sat) return false;
    }
    const int n = rep.num_marginal();
    for (int i = 0; i < rep.T; i++) {
        if (!joint.get(std::size_t(rep.y_var(i)))) continue;
        BitVec x{std::size_t(n)};
        for (int j = 0; j < n; j++) x.set(std::size_t(j), joint.get(std::size_t(rep.x_var(i, j))));
        if (!rep.parity[std::size_t(i)].satisfied(x)) return false;
    }
    return true;
}

namespace detail {

inline OracleResult solve_enumerate_a(const ReplicatedProblem& rep, int threshold,
                                      const SearchBudget& budget) {
    const int m = rep.num_decision();
    const int n = rep.num_marginal();
    Deadline deadline(budget);
    std::vector<EchelonForm> ef;
    ef.reserve(std::size_t(rep.T));
    for (const ParitySystem& ps : rep.parity) ef.push_back(eliminate(ps));

    OracleResult res;
    res.argmax_decision = BitVec(std::size_t(m));
    std::vector<int8_t> best_feasible(std::size_t(rep.T), 0);
    auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t da = 0; da < (std::uint64_t(1) << m); da++) {
        BitVec a = BitVec::from_uint(da, std::size_t(m));
        auto clauses = clauses_under_decision(rep.base, a);
        std::vector<int8_t> feasible(std::size_t(rep.T), 0);
        int obj = 0;
        if (clauses) {
            for (int i = 0; i < rep.T; i++) {
                if (obj + (rep.T - i) <= res.objective) break;  // cannot beat best
                std::uint64_t used = 0;
                XorSatSearch search(n, *clauses, ef[std::size_t(i)]);
                SearchBudget sub = budget;
                sub.node_cap = budget.node_cap - std::min(budget.node_cap, res.nodes);
                Feasibility f = search.solve(sub, &used, nullptr);
                res.nodes += used;
                if (f == Feasibility::Budget || deadline.exceeded(res.nodes)) {
                    res.status = SolveStatus::BudgetExceeded;
                    res.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    return res;
                }
                if (f == Feasibility::Sat) {
                    feasible[std::size_t(i)] = 1;
                    obj++;
                }
            }
        }
        if (obj > res.objective || da == 0) {
            res.objective = obj;
            res.argmax_decision = a;
            best_feasible = feasible;
        }
        if (res.objective == rep.T) break;  // exact: no larger objective exists
    }

    // Reconstruct a joint witness for the argmax decision.
    BitVec joint(std::size_t(rep.total_vars()));
    for (int i = 0; i < m; i++) joint.set(std::size_t(i), res.argmax_decision.get(std::size_t(i)));
    auto clauses = clauses_under_decision(rep.base, res.argmax_decision);
    for (int i = 0; i < rep.T; i++) {
        if (!best_feasible[std::size_t(i)]) continue;
        joint.set(std::size_t(rep.y_var(i)), true);
        BitVec xw;
        XorSatSearch search(n, *clauses, ef[std::size_t(i)]);
        std::uint64_t used = 0;
        if (search.solve({}, &used, &xw) == Feasibility::Sat)
            for (int j = 0; j < n; j++) joint.set(std::size_t(rep.x_var(i, j)), xw.get(std::size_t(j)));
        res.nodes += used;
    }
    res.witness = joint;
    res.status = SolveStatus::Optimal;
    (void)threshold;
    res.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// Branch and bound over the joint space, maximizing the number of active
// replicates. Bound: y's already 1 plus y's undecided. Branch order: decision
// bits a_{m-1}..a_0 (so decisions are explored in ascending numeric order),
// then y_0..y_{T-1} (1 first), then copy variables by parity-row occurrence,
// ties by lowest index.
class JointDpll {
public:
    JointDpll(const ReplicatedProblem& rep, int threshold, bool early_stop, const SearchBudget& budget)
        : rep_(rep), threshold_(threshold), early_stop_(early_stop), deadline_(budget),
          assign_(std::size_t(rep.total_vars()), -1) {
        for (const ParitySystem& ps : rep.parity) ef_.push_back(eliminate(ps));
        build_order();
    }

    OracleResult run() {
        auto t0 = std::chrono::steady_clock::now();
        best_ = -1;
        stop_ = false;
        recurse();
        OracleResult res;
        res.objective = best_ < 0 ? 0 : best_;
        res.nodes = nodes_;
        const int m = rep_.num_decision();
        res.argmax_decision = BitVec(std::size_t(m));
        if (best_ >= 0) {
            res.witness = best_assign_;
            for (int i = 0; i < m; i++) res.argmax_decision.set(std::size_t(i), best_assign_.get(std::size_t(i)));
            // objective T is provably optimal even if the threshold fired too
            res.status = budget_hit_           ? SolveStatus::BudgetExceeded
                       : stop_ && best_ < rep_.T ? SolveStatus::ThresholdReached
                                                 : SolveStatus::Optimal;
        } else {
            res.status = budget_hit_ ? SolveStatus::BudgetExceeded : SolveStatus::Optimal;
            res.objective = 0;
        }
        res.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

private:
    void build_order() {
        const int m = rep_.num_decision(), n = rep_.num_marginal(), T = rep_.T;
        for (int i = m - 1; i >= 0; i--) order_.push_back(rep_.a_var(i));
        for (int i = 0; i < T; i++) order_.push_back(rep_.y_var(i));
        std::vector<std::pair<int, int>> xs;  // (-occurrence, global var)
        for (int i = 0; i < T; i++)
            for (int j = 0; j < n; j++) {
                int occ = 0;
                for (const BitVec& row : rep_.parity[std::size_t(i)].rows)
                    if (row.get(std::size_t(j))) occ++;
                xs.emplace_back(-occ, rep_.x_var(i, j));
            }
        std::sort(xs.begin(), xs.end());
        for (auto& [negocc, var] : xs) order_.push_back(var);
    }

    bool propagate_fixpoint(std::vector<int>& trail) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Clause& cl : rep_.joint_clauses) {
                int open = -1, open_count = 0;
                bool sat = false;
                for (const Lit& l : cl) {
                    int8_t a = assign_[std::size_t(l.var)];
                    if (a < 0) {
                        open = l.var;
                        open_count++;
                    } else if ((a == 1) != l.neg) {
                        sat = true;
                        break;
                    }
                }
                if (sat) continue;
                if (open_count == 0) return false;
                if (open_count == 1) {
                    bool value = false;
                    for (const Lit& l : cl)
                        if (l.var == open) value = !l.neg;
                    set_var(open, value, trail);
                    changed = true;
                }
            }
            for (int i = 0; i < rep_.T; i++) {
                if (assign_[std::size_t(rep_.y_var(i))] != 1 || ef_[std::size_t(i)].rank == 0) continue;
                if (!ef_[std::size_t(i)].consistent) return false;
                PartialFix fix = replicate_fix(i);
                Propagation p = propagate(ef_[std::size_t(i)], fix);
                if (p.conflict) return false;
                for (auto [local, val] : p.implied) {
                    int g = rep_.x_var(i, local);
                    if (assign_[std::size_t(g)] >= 0) continue;
                    set_var(g, val, trail);
                    changed = true;
                }
            }
        }
        return true;
    }

    PartialFix replicate_fix(int i) const {
        const int n = rep_.num_marginal();
        PartialFix fix = PartialFix::none(n);
        for (int j = 0; j < n; j++) {
            int8_t a = assign_[std::size_t(rep_.x_var(i, j))];
            if (a >= 0) fix.fix(std::size_t(j), a == 1);
        }
        return fix;
    }

    void set_var(int v, bool val, std::vector<int>& trail) {
        assign_[std::size_t(v)] = val ? 1 : 0;
        trail.push_back(v);
    }

    int upper_bound() const {
        int ones = 0, open = 0;
        for (int i = 0; i < rep_.T; i++) {
            int8_t a = assign_[std::size_t(rep_.y_var(i))];
            if (a == 1) ones++;
            else if (a < 0) open++;
        }
        return ones + open;
    }

    void recurse() {
        if (stop_ || budget_hit_) return;
        std::vector<int> trail;
        if (!propagate_fixpoint(trail)) {
            undo(trail);
            return;
        }
        if (upper_bound() <= best_) {
            undo(trail);
            return;
        }
        int var = -1;
        for (int v : order_)
            if (assign_[std::size_t(v)] < 0) {
                // copy variables of retired replicates are free; fix them
                int rep_of_x = replicate_of_x(v);
                if (rep_of_x >= 0 && assign_[std::size_t(rep_.y_var(rep_of_x))] == 0) {
                    set_var(v, false, trail);
                    continue;
                }
                var = v;
                break;
            }
        if (var < 0) {
            int obj = 0;
            for (int i = 0; i < rep_.T; i++)
                if (assign_[std::size_t(rep_.y_var(i))] == 1) obj++;
            if (obj > best_) {
                best_ = obj;
                best_assign_ = BitVec(std::size_t(rep_.total_vars()));
                for (int v = 0; v < rep_.total_vars(); v++)
                    best_assign_.set(std::size_t(v), assign_[std::size_t(v)] == 1);
                if (early_stop_ && best_ >= threshold_) stop_ = true;
                if (best_ == rep_.T) stop_complete_ = true;
            }
            undo(trail);
            return;
        }
        nodes_++;
        if (deadline_.exceeded(nodes_)) {
            budget_hit_ = true;
            undo(trail);
            return;
        }
        bool first = replicate_of_y(var) >= 0;  // y vars try 1 first
        for (int round = 0; round < 2 && !stop_ && !stop_complete_ && !budget_hit_; round++) {
            assign_[std::size_t(var)] = int8_t(round == 0 ? first : !first);
            recurse();
            assign_[std::size_t(var)] = -1;
        }
        undo(trail);
    }

    int replicate_of_x(int v) const {
        const int m = rep_.num_decision(), n = rep_.num_marginal();
        if (v < m || v >= m + rep_.T * n) return -1;
        return (v - m) / n;
    }
    int replicate_of_y(int v) const {
        int y0 = rep_.num_decision() + rep_.T * rep_.num_marginal();
        return v >= y0 ? v - y0 : -1;
    }

    void undo(std::vector<int>& trail) {
        for (int v : trail) assign_[std::size_t(v)] = -1;
        trail.clear();
    }

    const ReplicatedProblem& rep_;
    int threshold_;
    bool early_stop_;
    Deadline deadline_;
    std::vector<int8_t> assign_;
    std::vector<EchelonForm> ef_;
    std::vector<int> order_;
    std::uint64_t nodes_ = 0;
    int best_ = -1;
    BitVec best_assign_;
    bool stop_ = false;           // threshold certificate found
    bool stop_complete_ = false;  // objective T found: provably optimal
    bool budget_hit_ = false;
};

}  // namespace detail

// enumerate-a: exact maximum via the 2^m decision loop; replicates decouple
// into independent DPLL+XOR feasibility checks. joint-dpll: single branch and
// bound over (a, y, x copies); with early_stop it may return as soon as a
// witness reaching `threshold` exists (status ThresholdReached). Both engines
// agree on the decision "objective >= threshold".
inline OracleResult solve_replicated(const ReplicatedProblem& rep, int threshold, OracleEngine engine,
                                     const SearchBudget& budget = {}, bool early_stop = true) {
    if (threshold < 1 || threshold > rep.T)
        throw std::invalid_argument("solve_replicated: threshold out of [1,T]");
    if (engine == OracleEngine::EnumerateA) return detail::solve_enumerate_a(rep, threshold, budget);
    detail::JointDpll solver(rep, threshold, early_stop, budget);
    return solver.run();
}

struct ExactCount {
    LogWeight sum;                      // sum_x w(a, x), log space
    std::optional<std::uint64_t> count;  // exact model count for CNF kind
};

// Brute-force reference count over the marginal space.
inline ExactCount count_exact(const MmapInstance& inst, const BitVec& a, int enumeration_cap_bits = 24) {
    if (int(a.size()) != inst.space().num_decision)
        throw std::invalid_argument("count_exact: decision vector length mismatch");
    const int n = inst.space().num_marginal;
    if (n > enumeration_cap_bits)
        throw BudgetExceededError("count_exact: enumeration over 2^" + std::to_string(n));
    Assignment asg(a, BitVec(std::size_t(n)));
    if (inst.kind() == WeightKind::CnfIndicator) {
        std::uint64_t cnt = 0;
        for (std::uint64_t dx = 0; dx < (std::uint64_t(1) << n); dx++) {
            asg.marginal = BitVec::from_uint(dx, std::size_t(n));
            if (!inst.evaluate(asg).is_zero()) cnt++;
        }
        return {cnt > 0 ? LogWeight::from_log(std::log(double(cnt))) : LogWeight::zero(), cnt};
    }
    LogWeight sum = LogWeight::zero();
    for (std::uint64_t dx = 0; dx < (std::uint64_t(1) << n); dx++) {
        asg.marginal = BitVec::from_uint(dx, std::size_t(n));
        sum.add(inst.evaluate(asg));
    }
    return {sum, std::nullopt};
}

// Weighted oracle for one replicate: does S_a(w,l) intersect the parity
// system's solution set? Enumerates x, derives the forced y suffix from
// w(a,x)/M, and solves the parity system with x and the forced bits pinned.
// ps coordinates: x in [0,n), then y_1..y_l in [n, n+l).
inline Feasibility weighted_replicate_feasible(const MmapInstance& inst, int l, LogWeight M,
                                               const BitVec& a, const ParitySystem& ps,
                                               int enumeration_cap_bits = 24,
                                               std::uint64_t* steps_out = nullptr) {
    const int n = inst.space().num_marginal;
    if (ps.dim != n + l) throw std::invalid_argument("weighted_replicate_feasible: parity dim != n+l");
    if (n > enumeration_cap_bits)
        throw BudgetExceededError("weighted_replicate_feasible: enumeration over 2^" + std::to_string(n));
    Assignment asg(a, BitVec(std::size_t(n)));
    std::uint64_t steps = 0;
    for (std::uint64_t dx = 0; dx < (std::uint64_t(1) << n); dx++) {
        asg.marginal = BitVec::from_uint(dx, std::size_t(n));
        LogWeight w = inst.evaluate(asg);
        int forced = forced_count(w, M, l);
        PartialFix fix = PartialFix::none(n + l);
        for (int j = 0; j < n; j++) fix.fix(std::size_t(j), asg.marginal.get(std::size_t(j)));
        for (int i = l - forced + 1; i <= l; i++) fix.fix(std::size_t(n + i - 1), false);
        steps++;
        if (solve_under_fixing(ps, fix).exists) {
            if (steps_out) *steps_out += steps;
            return Feasibility::Sat;
        }
    }
    if (steps_out) *steps_out += steps;
    return Feasibility::Unsat;
}

// Replicated threshold query for the embedded weighted problem. Enumeration
// over decision vectors only (the encoding of the quantized-weight predicate
// as clauses is out of scope), mirroring enumerate-a's decoupling.
inline OracleResult solve_replicated_weighted(const MmapInstance& inst, int l, LogWeight M,
                                              const std::vector<ParitySystem>& parity, int threshold,
                                              int enumeration_cap_bits = 24) {
    const int m = inst.space().num_decision;
    const int T = int(parity.size());
    if (threshold < 1 || threshold > T)
        throw std::invalid_argument("solve_replicated_weighted: threshold out of [1,T]");
    OracleResult res;
    res.argmax_decision = BitVec(std::size_t(m));
    auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t da = 0; da < (std::uint64_t(1) << m); da++) {
        BitVec a = BitVec::from_uint(da, std::size_t(m));
        int obj = 0;
        for (int i = 0; i < T; i++) {
            if (obj + (T - i) <= res.objective) break;
            if (weighted_replicate_feasible(inst, l, M, a, parity[std::size_t(i)], enumeration_cap_bits,
                                            &res.nodes) == Feasibility::Sat)
                obj++;
        }
        if (obj > res.objective || da == 0) {
            res.objective = obj;
            res.argmax_decision = a;
        }
        if (res.objective == T) break;
    }
    res.status = SolveStatus::Optimal;
    res.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline std::vector<ParitySystem> sample_weighted_parity(int n_plus_l, int T, int k, const Rng& rng) {
    std::vector<ParitySystem> out;
    out.reserve(std::size_t(T));
    for (int i = 0; i < T; i++) {
        Rng r = rng.derive(seed_mix(kSeedParity, std::uint64_t(i)));
        out.push_back(sample_parity(n_plus_l, k, r));
    }
    return out;
}

}  // namespace xormmap
