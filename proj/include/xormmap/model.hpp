#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bitvec.hpp"
#include "logspace.hpp"

namespace xormmap {

struct BudgetExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// m decision (max) bits followed by n marginal (sum) bits in one canonical
// index space: decision vars are [0, m), marginal vars are [m, m+n).
// `labels` optionally maps canonical indices to external 1-based ids for I/O.
struct VarSpace {
    int num_decision = 0;
    int num_marginal = 0;
    std::vector<int> labels;

    VarSpace() = default;
    VarSpace(int m, int n) : num_decision(m), num_marginal(n) { validate(); }

    int total() const { return num_decision + num_marginal; }
    bool is_decision(int var) const { return var < num_decision; }

    void validate() const {
        if (num_decision < 0 || num_marginal < 1)
            throw std::invalid_argument("VarSpace: need m >= 0 and n >= 1");
        if (!labels.empty() && int(labels.size()) != total())
            throw std::invalid_argument("VarSpace: label count mismatch");
    }

    friend bool operator==(const VarSpace& a, const VarSpace& b) {
        return a.num_decision == b.num_decision && a.num_marginal == b.num_marginal;
    }
};

struct Assignment {
    BitVec decision;
    BitVec marginal;

    Assignment() = default;
    Assignment(BitVec a, BitVec x) : decision(std::move(a)), marginal(std::move(x)) {}

    BitVec joined() const {
        BitVec full(decision.size() + marginal.size());
        for (std::size_t i = 0; i < decision.size(); i++) full.set(i, decision.get(i));
        for (std::size_t i = 0; i < marginal.size(); i++) full.set(decision.size() + i, marginal.get(i));
        return full;
    }
};

struct Lit {
    int var = 0;  // canonical index
    bool neg = false;

    friend bool operator==(const Lit& a, const Lit& b) { return a.var == b.var && a.neg == b.neg; }
};

using Clause = std::vector<Lit>;

inline Lit pos(int var) { return {var, false}; }
inline Lit neg(int var) { return {var, true}; }

// Clause list over the canonical variable space. Tautological clauses
// (v or not v) are dropped at construction; duplicate literals are kept.
class CnfFormula {
public:
    CnfFormula() = default;
    CnfFormula(int num_vars, std::vector<Clause> clauses) : num_vars_(num_vars) {
        for (auto& cl : clauses) {
            if (cl.empty()) throw std::invalid_argument("CnfFormula: empty clause");
            bool taut = false;
            for (const Lit& l : cl) {
                if (l.var < 0 || l.var >= num_vars)
                    throw std::invalid_argument("CnfFormula: literal out of range");
                for (const Lit& o : cl)
                    if (o.var == l.var && o.neg != l.neg) taut = true;
            }
            if (!taut) clauses_.push_back(std::move(cl));
        }
    }

    int num_vars() const { return num_vars_; }
    const std::vector<Clause>& clauses() const { return clauses_; }

    // 1 iff every clause has a satisfied literal; empty clause list is 1.
    bool evaluate(const BitVec& full) const {
        if (int(full.size()) != num_vars_)
            throw std::invalid_argument("CnfFormula: assignment length mismatch");
        for (const Clause& cl : clauses_) {
            bool sat = false;
            for (const Lit& l : cl)
                if (full.get(std::size_t(l.var)) != l.neg) {
                    sat = true;
                    break;
                }
            if (!sat) return false;
        }
        return true;
    }

    friend bool operator==(const CnfFormula& a, const CnfFormula& b) {
        return a.num_vars_ == b.num_vars_ && a.clauses_ == b.clauses_;
    }

private:
    int num_vars_ = 0;
    std::vector<Clause> clauses_;
};

// Grid-structured binary MRF in log space. Spin convention: bit b maps to
// s = 2b - 1 in {-1,+1}; the weight of an assignment is
// exp(sum_i theta_i s_i + sum_ij theta_ij s_i s_j) over nodes and 4-neighbor
// grid edges. Each node is designated decision or marginal exactly once.
struct IsingGrid {
    int rows = 0, cols = 0;
    std::vector<double> theta_node;        // row-major, rows*cols
    std::vector<double> theta_right;       // (r,c)-(r,c+1), rows*(cols-1)
    std::vector<double> theta_down;        // (r,c)-(r+1,c), (rows-1)*cols
    std::vector<std::uint8_t> node_is_decision;

    int num_nodes() const { return rows * cols; }
    int node_id(int r, int c) const { return r * cols + c; }

    void validate() const {
        if (rows < 1 || cols < 1) throw std::invalid_argument("IsingGrid: bad shape");
        if (int(theta_node.size()) != rows * cols || int(node_is_decision.size()) != rows * cols ||
            int(theta_right.size()) != rows * (cols - 1) || int(theta_down.size()) != (rows - 1) * cols)
            throw std::invalid_argument("IsingGrid: parameter array shape mismatch");
    }

    int count_decision() const {
        return int(std::count(node_is_decision.begin(), node_is_decision.end(), std::uint8_t(1)));
    }

    friend bool operator==(const IsingGrid& a, const IsingGrid& b) {
        return a.rows == b.rows && a.cols == b.cols && a.theta_node == b.theta_node &&
               a.theta_right == b.theta_right && a.theta_down == b.theta_down &&
               a.node_is_decision == b.node_is_decision;
    }
};

enum class WeightKind { CnfIndicator, Ising };

class MmapInstance {
public:
    MmapInstance(VarSpace space, CnfFormula cnf) : space_(std::move(space)), weight_(std::move(cnf)) {
        space_.validate();
        if (std::get<CnfFormula>(weight_).num_vars() != space_.total())
            throw std::invalid_argument("MmapInstance: CNF variable count mismatch");
    }

    MmapInstance(VarSpace space, IsingGrid grid) : space_(std::move(space)), weight_(std::move(grid)) {
        space_.validate();
        const IsingGrid& g = std::get<IsingGrid>(weight_);
        g.validate();
        if (g.count_decision() != space_.num_decision ||
            g.num_nodes() - g.count_decision() != space_.num_marginal)
            throw std::invalid_argument("MmapInstance: grid designation mismatch");
        build_slots();
    }

    static MmapInstance from_grid(IsingGrid grid) {
        grid.validate();
        int m = grid.count_decision();
        int n = grid.num_nodes() - m;
        return MmapInstance(VarSpace(m, n), std::move(grid));
    }

    WeightKind kind() const {
        return std::holds_alternative<CnfFormula>(weight_) ? WeightKind::CnfIndicator : WeightKind::Ising;
    }
    const VarSpace& space() const { return space_; }
    VarSpace& space() { return space_; }
    const CnfFormula& cnf() const { return std::get<CnfFormula>(weight_); }
    const IsingGrid& ising() const { return std::get<IsingGrid>(weight_); }

    // Decision nodes take decision indices in row-major order; marginal nodes
    // likewise. slot(node) = index within its block.
    bool node_bit(const IsingGrid&, int node, const Assignment& asg) const {
        int s = node_slot_[std::size_t(node)];
        return s >= 0 ? asg.decision.get(std::size_t(s)) : asg.marginal.get(std::size_t(-s - 1));
    }

    LogWeight evaluate(const Assignment& asg) const {
        check(asg);
        if (kind() == WeightKind::CnfIndicator)
            return cnf().evaluate(asg.joined()) ? LogWeight::one() : LogWeight::zero();
        const IsingGrid& g = ising();
        double e = 0.0;
        std::vector<int> spin(std::size_t(g.num_nodes()));
        for (int v = 0; v < g.num_nodes(); v++) spin[std::size_t(v)] = node_bit(g, v, asg) ? 1 : -1;
        for (int v = 0; v < g.num_nodes(); v++) e += g.theta_node[std::size_t(v)] * spin[std::size_t(v)];
        for (int r = 0; r < g.rows; r++)
            for (int c = 0; c + 1 < g.cols; c++)
                e += g.theta_right[std::size_t(r * (g.cols - 1) + c)] *
                     spin[std::size_t(g.node_id(r, c))] * spin[std::size_t(g.node_id(r, c + 1))];
        for (int r = 0; r + 1 < g.rows; r++)
            for (int c = 0; c < g.cols; c++)
                e += g.theta_down[std::size_t(r * g.cols + c)] *
                     spin[std::size_t(g.node_id(r, c))] * spin[std::size_t(g.node_id(r + 1, c))];
        return LogWeight::from_log(e);
    }

    friend bool operator==(const MmapInstance& a, const MmapInstance& b) {
        return a.space_ == b.space_ && a.weight_ == b.weight_;
    }

private:
    void check(const Assignment& asg) const {
        if (int(asg.decision.size()) != space_.num_decision ||
            int(asg.marginal.size()) != space_.num_marginal)
            throw std::invalid_argument("MmapInstance: assignment shape mismatch");
    }

    void build_slots() {
        const IsingGrid& g = std::get<IsingGrid>(weight_);
        node_slot_.resize(std::size_t(g.num_nodes()));
        int d = 0, mg = 0;
        for (int v = 0; v < g.num_nodes(); v++)
            node_slot_[std::size_t(v)] = g.node_is_decision[std::size_t(v)] ? d++ : -(++mg);
    }

    VarSpace space_;
    std::variant<CnfFormula, IsingGrid> weight_;
    std::vector<int> node_slot_;  // >=0: decision index; <0: -(marginal index)-1
};

inline bool evaluate_indicator(const CnfFormula& f, const BitVec& full) { return f.evaluate(full); }

inline LogWeight evaluate_weight(const MmapInstance& inst, const Assignment& asg) {
    return inst.evaluate(asg);
}

enum class MaxWeightPath { SatEnumeration, BoundAttainable, Enumerated };

struct MaxWeightResult {
    LogWeight value;
    MaxWeightPath path;
};

namespace detail {

// Union-find with parity to the root; used to decide whether the term-wise
// bound sum|theta| is attained by some spin configuration.
class ParityUnionFind {
public:
    explicit ParityUnionFind(int n) : parent_(std::size_t(n)), rel_(std::size_t(n), 0), rank_(std::size_t(n), 0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    std::pair<int, int> find(int v) {
        if (parent_[std::size_t(v)] == v) return {v, 0};
        auto [root, rel] = find(parent_[std::size_t(v)]);
        parent_[std::size_t(v)] = root;
        rel_[std::size_t(v)] ^= rel;
        return {root, rel_[std::size_t(v)]};
    }

    // rel = 0: same spin; rel = 1: opposite. Returns false on contradiction.
    bool join(int a, int b, int rel) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) return (pa ^ pb) == rel;
        if (rank_[std::size_t(ra)] < rank_[std::size_t(rb)]) {
            std::swap(ra, rb);
            std::swap(pa, pb);
        }
        parent_[std::size_t(rb)] = ra;
        rel_[std::size_t(rb)] = pa ^ pb ^ rel;
        if (rank_[std::size_t(ra)] == rank_[std::size_t(rb)]) rank_[std::size_t(ra)]++;
        return true;
    }

private:
    std::vector<int> parent_;
    std::vector<int> rel_;  // parity to parent
    std::vector<int> rank_;
};

}  // namespace detail

// Exact maximum of the weight over all assignments.
//
// CNF: 1 iff satisfiable, by full enumeration over the 2^(m+n) space.
// Ising: when the constraint graph "spin matches the sign of every nonzero
// theta term" is consistent (checked with parity union-find against a virtual
// +1 node), the bound exp(sum|theta_i| + sum|theta_ij|) is attained and is
// returned exactly (path BoundAttainable); otherwise falls back to spin
// enumeration (path Enumerated). The result is the exact max, never a bound.
inline MaxWeightResult max_weight(const MmapInstance& inst, int enumeration_cap_bits = 24) {
    if (inst.kind() == WeightKind::CnfIndicator) {
        int tot = inst.space().total();
        if (tot > enumeration_cap_bits)
            throw BudgetExceededError("max_weight: CNF enumeration over 2^" + std::to_string(tot));
        int m = inst.space().num_decision;
        int n = inst.space().num_marginal;
        for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << tot); bits++) {
            Assignment asg(BitVec::from_uint(bits & ((std::uint64_t(1) << m) - 1), std::size_t(m)),
                           BitVec::from_uint(bits >> m, std::size_t(n)));
            if (!inst.evaluate(asg).is_zero()) return {LogWeight::one(), MaxWeightPath::SatEnumeration};
        }
        return {LogWeight::zero(), MaxWeightPath::SatEnumeration};
    }

    const IsingGrid& g = inst.ising();
    const int virt = g.num_nodes();  // virtual node pinned to spin +1
    detail::ParityUnionFind uf(g.num_nodes() + 1);
    bool attainable = true;
    double bound = 0.0;
    for (int v = 0; v < g.num_nodes() && attainable; v++) {
        double t = g.theta_node[std::size_t(v)];
        bound += std::abs(t);
        if (t > 0) attainable = uf.join(v, virt, 0);
        else if (t < 0) attainable = uf.join(v, virt, 1);
    }
    auto join_edge = [&](int a, int b, double t) {
        bound += std::abs(t);
        if (t > 0) attainable = attainable && uf.join(a, b, 0);
        else if (t < 0) attainable = attainable && uf.join(a, b, 1);
    };
    for (int r = 0; r < g.rows; r++)
        for (int c = 0; c + 1 < g.cols; c++)
            join_edge(g.node_id(r, c), g.node_id(r, c + 1), g.theta_right[std::size_t(r * (g.cols - 1) + c)]);
    for (int r = 0; r + 1 < g.rows; r++)
        for (int c = 0; c < g.cols; c++)
            join_edge(g.node_id(r, c), g.node_id(r + 1, c), g.theta_down[std::size_t(r * g.cols + c)]);
    if (attainable) return {LogWeight::from_log(bound), MaxWeightPath::BoundAttainable};

    int tot = g.num_nodes();
    if (tot > enumeration_cap_bits)
        throw BudgetExceededError("max_weight: spin enumeration over 2^" + std::to_string(tot));
    int m = inst.space().num_decision;
    int n = inst.space().num_marginal;
    LogWeight best = LogWeight::zero();
    for (std::uint64_t da = 0; da < (std::uint64_t(1) << m); da++) {
        Assignment asg(BitVec::from_uint(da, std::size_t(m)), BitVec(std::size_t(n)));
        for (std::uint64_t dx = 0; dx < (std::uint64_t(1) << n); dx++) {
            asg.marginal = BitVec::from_uint(dx, std::size_t(n));
            LogWeight w = inst.evaluate(asg);
            if (w > best) best = w;
        }
    }
    return {best, MaxWeightPath::Enumerated};
}

}  // namespace xormmap
