#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "instances.hpp"
#include "oracle.hpp"

namespace xormmap {

// Extended DIMACS with parity lines. Layout comment first, then the header,
// one clause line per augmented clause (replicate-major, base clause order,
// the retire literal -y_i last), one `x` line per parity row (replicate-major,
// row order), and the cardinality side-condition as a trailing comment.
//
// x-line convention: the literals are the row's support columns in ascending
// order; the line asserts that the XOR of its literals is TRUE, so the first
// literal is negated iff the row's rhs bit is 0. A row with empty support
// cannot carry its rhs in that grammar, so it is rendered on the replicate's
// first variable as a duplicated pair: rhs=1 -> `x v v 0` (always false, the
// row is the contradiction 0=1), rhs=0 -> `x -v v 0` (always true). Sampled
// rows have set-valued support, so the duplicate pattern is unambiguous.
//
// Variable numbering: a-vars 1..m, then the T marginal copies, then y's.
inline void export_dimacs_xor(const ReplicatedProblem& rep, int threshold, std::ostream& os) {
    const int m = rep.num_decision(), n = rep.num_marginal();
    os << "c xormmap m " << m << " n " << n << " T " << rep.T << " k " << rep.k << '\n';
    os << "c vars: a 1.." << m << ", x copy i at " << m << "+(i-1)*" << n << "+j, y at "
       << m + rep.T * n << "+i\n";
    os << "p cnf " << rep.total_vars() << ' ' << rep.joint_clauses.size() << '\n';
    for (const Clause& cl : rep.joint_clauses) {
        for (const Lit& l : cl) os << (l.neg ? -(l.var + 1) : l.var + 1) << ' ';
        os << "0\n";
    }
    for (int i = 0; i < rep.T; i++) {
        const ParitySystem& ps = rep.parity[std::size_t(i)];
        for (int r = 0; r < ps.num_rows(); r++) {
            const BitVec& row = ps.rows[std::size_t(r)];
            bool rhs = ps.rhs.get(std::size_t(r));
            os << 'x';
            if (!row.any()) {
                int v = rep.x_var(i, 0) + 1;
                os << ' ' << (rhs ? v : -v) << ' ' << v;
            } else {
                bool first = true;
                for (int j = 0; j < n; j++) {
                    if (!row.get(std::size_t(j))) continue;
                    int v = rep.x_var(i, j) + 1;
                    os << ' ' << (first && !rhs ? -v : v);
                    first = false;
                }
            }
            os << " 0\n";
        }
    }
    os << "c card y";
    for (int i = 0; i < rep.T; i++) os << ' ' << rep.y_var(i) + 1;
    os << " >= " << threshold << '\n';
}

inline std::string export_dimacs_xor(const ReplicatedProblem& rep, int threshold) {
    std::ostringstream os;
    export_dimacs_xor(rep, threshold, os);
    return os.str();
}

struct ParsedReplicated {
    ReplicatedProblem rep;
    int threshold = 1;
};

// Reads back what export_dimacs_xor wrote; the layout comment is required.
inline ParsedReplicated parse_dimacs_xor(std::istream& is) {
    int m = -1, n = -1, T = -1, k = -1, threshold = 1;
    long nvars = -1, nclauses = -1;
    std::vector<std::vector<int>> clause_lines;
    std::vector<std::vector<int>> xor_lines;
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ln++;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "c") {
            std::string what;
            ss >> what;
            if (what == "xormmap") {
                std::string key;
                int val;
                while (ss >> key >> val) {
                    if (key == "m") m = val;
                    else if (key == "n") n = val;
                    else if (key == "T") T = val;
                    else if (key == "k") k = val;
                }
            } else if (what == "card") {
                // c card y <ids...> >= <threshold>
                std::string rest;
                std::getline(ss, rest);
                auto pos = rest.find(">=");
                if (pos == std::string::npos) throw ParseError(ln, "malformed card comment");
                threshold = std::stoi(rest.substr(pos + 2));
            }
            continue;
        }
        if (tok == "p") {
            std::string fmt;
            if (!(ss >> fmt >> nvars >> nclauses) || fmt != "cnf") throw ParseError(ln, "malformed p line");
            continue;
        }
        std::vector<int> lits;
        int v;
        bool terminated = false;
        if (tok == "x") {
            while (ss >> v) {
                if (v == 0) {
                    terminated = true;
                    break;
                }
                lits.push_back(v);
            }
            if (!terminated) throw ParseError(ln, "x line not 0-terminated");
            xor_lines.push_back(std::move(lits));
            continue;
        }
        {
            std::istringstream cs(line);
            while (cs >> v) {
                if (v == 0) {
                    terminated = true;
                    break;
                }
                lits.push_back(v);
            }
            if (!terminated) throw ParseError(ln, "clause not 0-terminated");
            clause_lines.push_back(std::move(lits));
        }
    }
    if (m < 0 || n < 1 || T < 1 || k < 0) throw ParseError(ln, "missing or malformed layout comment");
    if (long(clause_lines.size()) != nclauses) throw ParseError(ln, "clause count differs from header");
    if (clause_lines.size() % std::size_t(T) != 0) throw ParseError(ln, "clause count not divisible by T");
    if (xor_lines.size() != std::size_t(T) * std::size_t(k)) throw ParseError(ln, "expected T*k x lines");

    const int y0 = m + T * n;
    // Reconstruct the base CNF from replicate 1's block.
    std::size_t per_rep = clause_lines.size() / std::size_t(T);
    std::vector<Clause> base_clauses;
    for (std::size_t ci = 0; ci < per_rep; ci++) {
        Clause cl;
        bool saw_y = false;
        for (int lit : clause_lines[ci]) {
            int var = std::abs(lit) - 1;
            bool neg = lit < 0;
            if (var >= y0) {
                if (!neg || var != y0) throw ParseError(ln, "replicate 1 clause with foreign y literal");
                saw_y = true;
                continue;
            }
            if (var >= m + n) throw ParseError(ln, "replicate 1 clause with foreign copy variable");
            cl.push_back(Lit{var, neg});
        }
        if (!saw_y) throw ParseError(ln, "clause missing retire literal");
        base_clauses.push_back(std::move(cl));
    }
    VarSpace space(m, n);
    MmapInstance base(std::move(space), CnfFormula(m + n, std::move(base_clauses)));

    std::vector<ParitySystem> parity(static_cast<std::size_t>(T));
    for (int i = 0; i < T; i++) {
        parity[std::size_t(i)].dim = n;
        parity[std::size_t(i)].rhs = BitVec(std::size_t(k));
    }
    for (std::size_t r = 0; r < xor_lines.size(); r++) {
        int rep_idx = int(r) / k;
        const std::vector<int>& lits = xor_lines[r];
        BitVec row{std::size_t(n)};
        bool rhs = true;
        if (lits.size() == 2 && std::abs(lits[0]) == std::abs(lits[1])) {
            rhs = lits[0] > 0;  // duplicated pair: empty-support row
        } else {
            for (std::size_t j = 0; j < lits.size(); j++) {
                int var = std::abs(lits[j]) - 1;
                int lo = m + rep_idx * n;
                if (var < lo || var >= lo + n) throw ParseError(ln, "x line crosses replicate blocks");
                row.set(std::size_t(var - lo), true);
                if (j == 0 && lits[j] < 0) rhs = false;
                if (j > 0 && lits[j] < 0) throw ParseError(ln, "only the first x literal may be negated");
            }
        }
        parity[std::size_t(rep_idx)].rows.push_back(std::move(row));
        parity[std::size_t(rep_idx)].rhs.set(std::size_t(int(r) % k), rhs);
    }

    ParsedReplicated out{ReplicatedProblem{std::move(base), T, k, std::move(parity), {}}, threshold};
    out.rep.materialize_clauses();
    return out;
}

inline ParsedReplicated parse_dimacs_xor(const std::string& text) {
    std::istringstream is(text);
    return parse_dimacs_xor(is);
}

}  // namespace xormmap
