#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bitvec.hpp"
#include "rng.hpp"

namespace xormmap {

// k parity constraints over d variables: row i asserts <A_i, v> xor b_i = 0.
// k = 0 is the empty system (satisfied by everything); k > d is allowed and
// usually inconsistent.
struct ParitySystem {
    int dim = 0;
    std::vector<BitVec> rows;  // each of length dim
    BitVec rhs;                // length = rows.size()

    int num_rows() const { return int(rows.size()); }

    bool satisfied(const BitVec& v) const {
        if (int(v.size()) != dim) throw std::invalid_argument("ParitySystem: vector length mismatch");
        for (std::size_t i = 0; i < rows.size(); i++)
            if (rows[i].and_parity(v) != rhs.get(i)) return false;
        return true;
    }

    friend bool operator==(const ParitySystem& a, const ParitySystem& b) {
        return a.dim == b.dim && a.rows == b.rows && a.rhs == b.rhs;
    }
};

// Every bit of A and b is an independent fair coin; deterministic per seed.
inline ParitySystem sample_parity(int d, int k, Rng& rng) {
    if (d < 1 || k < 0) throw std::invalid_argument("sample_parity: need d >= 1, k >= 0");
    ParitySystem ps;
    ps.dim = d;
    ps.rows.reserve(k);
    ps.rhs = BitVec(std::size_t(k));
    for (int i = 0; i < k; i++) {
        ps.rows.push_back(rng.random_bits(std::size_t(d)));
        ps.rhs.set(std::size_t(i), rng.next_u64() & 1);
    }
    return ps;
}

// Reduced row echelon form over GF(2). Zero rows are dropped; inconsistency
// (a row reducing to 0 = 1) is kept as a flag. When consistent the solution
// count is 2^(dim - rank).
struct EchelonForm {
    int dim = 0;
    std::vector<BitVec> rows;    // rank rows, pivot columns strictly increasing
    std::vector<int> pivot_col;  // per row
    BitVec rhs;                  // per row
    int rank = 0;
    bool consistent = true;

    int free_vars() const { return dim - rank; }
};

inline EchelonForm eliminate(const ParitySystem& ps) {
    EchelonForm ef;
    ef.dim = ps.dim;

    std::vector<BitVec> rows = ps.rows;
    std::vector<bool> rhs(rows.size());
    for (std::size_t i = 0; i < rows.size(); i++) rhs[i] = ps.rhs.get(i);

    std::size_t next = 0;  // next row slot to fill with a pivot
    for (int col = 0; col < ps.dim && next < rows.size(); col++) {
        std::size_t piv = next;
        while (piv < rows.size() && !rows[piv].get(std::size_t(col))) piv++;
        if (piv == rows.size()) continue;
        std::swap(rows[next], rows[piv]);
        std::swap(rhs[next], rhs[piv]);
        // clear this column everywhere else (full reduction)
        for (std::size_t r = 0; r < rows.size(); r++) {
            if (r != next && rows[r].get(std::size_t(col))) {
                rows[r].xor_with(rows[next]);
                rhs[r] = rhs[r] ^ rhs[next];
            }
        }
        next++;
    }

    ef.rank = int(next);
    ef.rows.assign(rows.begin(), rows.begin() + next);
    ef.rhs = BitVec(next);
    ef.pivot_col.resize(next);
    for (std::size_t r = 0; r < next; r++) {
        ef.rhs.set(r, rhs[r]);
        ef.pivot_col[r] = ef.rows[r].lowest_set();
    }
    for (std::size_t r = next; r < rows.size(); r++)
        if (rhs[r]) ef.consistent = false;  // empty support, rhs 1
    return ef;
}

inline ParitySystem to_parity_system(const EchelonForm& ef) {
    ParitySystem ps;
    ps.dim = ef.dim;
    ps.rows = ef.rows;
    ps.rhs = ef.rhs;
    if (!ef.consistent) {
        ps.rows.push_back(BitVec(std::size_t(ef.dim)));
        BitVec rhs(ps.rows.size());
        for (std::size_t i = 0; i + 1 < ps.rows.size(); i++) rhs.set(i, ef.rhs.get(i));
        rhs.set(ps.rows.size() - 1, true);
        ps.rhs = std::move(rhs);
    }
    return ps;
}

// Partial assignment over [0, dim): coordinate i is fixed to value.get(i)
// iff mask.get(i).
struct PartialFix {
    BitVec mask;
    BitVec value;

    static PartialFix none(int dim) { return {BitVec(std::size_t(dim)), BitVec(std::size_t(dim))}; }

    void fix(std::size_t i, bool b) {
        mask.set(i, true);
        value.set(i, b);
    }
};

struct Gf2Solution {
    bool exists = false;
    BitVec witness;
};

// Does some completion of `fixed` satisfy ps? Substitutes the fixed bits,
// reduces the residual system over the free coordinates, and back-solves a
// witness with non-pivot free coordinates set to zero.
inline Gf2Solution solve_under_fixing(const ParitySystem& ps, const PartialFix& fixed) {
    if (int(fixed.mask.size()) != ps.dim) throw std::invalid_argument("solve_under_fixing: fixing dim mismatch");
    ParitySystem residual;
    residual.dim = ps.dim;
    residual.rows.reserve(ps.rows.size());
    residual.rhs = BitVec(ps.rows.size());
    BitVec fixed_vals = fixed.value;  // ensure value bits outside mask don't leak
    for (std::size_t i = 0; i < fixed_vals.size(); i++)
        if (!fixed.mask.get(i)) fixed_vals.set(i, false);
    for (std::size_t i = 0; i < ps.rows.size(); i++) {
        BitVec row = ps.rows[i];
        bool b = ps.rhs.get(i) ^ row.and_parity(fixed_vals);
        for (std::size_t w = 0; w < row.num_words(); w++) row.word(w) &= ~fixed.mask.word(w);
        residual.rows.push_back(std::move(row));
        residual.rhs.set(i, b);
    }
    EchelonForm ef = eliminate(residual);
    Gf2Solution sol;
    if (!ef.consistent) return sol;
    sol.exists = true;
    sol.witness = fixed_vals;
    // free non-pivot coordinates stay zero; pivots take their reduced rhs
    for (int r = 0; r < ef.rank; r++)
        sol.witness.set(std::size_t(ef.pivot_col[r]), ef.rhs.get(std::size_t(r)));
    return sol;
}

struct Propagation {
    bool conflict = false;
    std::vector<std::pair<int, bool>> implied;  // (coordinate, value), in discovery order
};

// Closure of XOR unit propagation: rows that reduce to a single unassigned
// variable force it; a row reducing to 0 = 1 is a conflict. Implications feed
// back until fixpoint.
inline Propagation propagate(const EchelonForm& ef, const PartialFix& partial) {
    Propagation out;
    BitVec mask = partial.mask;
    BitVec value = partial.value;
    for (std::size_t i = 0; i < value.size(); i++)
        if (!mask.get(i)) value.set(i, false);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t r = 0; r < ef.rows.size(); r++) {
            const BitVec& row = ef.rows[r];
            int unassigned = -1;
            int unassigned_count = 0;
            bool acc = ef.rhs.get(r);
            for (std::size_t w = 0; w < row.num_words() && unassigned_count < 2; w++) {
                std::uint64_t assigned_here = row.word(w) & mask.word(w);
                acc ^= (std::popcount(assigned_here & value.word(w)) & 1) != 0;
                std::uint64_t open = row.word(w) & ~mask.word(w);
                while (open) {
                    int bit = std::countr_zero(open);
                    open &= open - 1;
                    unassigned = int(w * 64 + std::size_t(bit));
                    if (++unassigned_count >= 2) break;
                }
            }
            if (unassigned_count >= 2) continue;
            if (unassigned_count == 0) {
                if (acc) {
                    out.conflict = true;
                    return out;
                }
                continue;
            }
            // exactly one open variable: it must equal acc
            out.implied.emplace_back(unassigned, acc);
            mask.set(std::size_t(unassigned), true);
            value.set(std::size_t(unassigned), acc);
            changed = true;
        }
    }
    return out;
}

}  // namespace xormmap
