#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace xormmap {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int ln, const std::string& what)
        : std::runtime_error("line " + std::to_string(ln) + ": " + what), line(ln) {}
};

// Random 2-SAT over n_total variables: m_count of them, chosen uniformly
// without replacement, are decision variables. Each clause picks two distinct
// uniform variables with independent fair-coin signs; duplicate clauses are
// allowed (the clause distribution stays product-form).
inline MmapInstance gen_random_2sat(int n_total, int m_count, int n_clauses, Rng& rng) {
    if (n_total < 2 || m_count < 0 || m_count >= n_total || n_clauses < 0)
        throw std::invalid_argument("gen_random_2sat: bad parameters");

    std::vector<int> ids(std::size_t(n_total), 0);
    for (int i = 0; i < n_total; i++) ids[std::size_t(i)] = i + 1;
    for (int i = 0; i < m_count; i++) {
        std::size_t j = std::size_t(i) + rng.below(std::uint64_t(n_total - i));
        std::swap(ids[std::size_t(i)], ids[j]);
    }
    std::vector<int> decision_ids(ids.begin(), ids.begin() + m_count);
    std::vector<int> marginal_ids(ids.begin() + m_count, ids.end());
    std::sort(decision_ids.begin(), decision_ids.end());
    std::sort(marginal_ids.begin(), marginal_ids.end());

    // canonical index per external id
    std::vector<int> canon(std::size_t(n_total) + 1, -1);
    VarSpace space(m_count, n_total - m_count);
    space.labels.resize(std::size_t(n_total));
    for (int i = 0; i < m_count; i++) {
        canon[std::size_t(decision_ids[std::size_t(i)])] = i;
        space.labels[std::size_t(i)] = decision_ids[std::size_t(i)];
    }
    for (int i = 0; i < n_total - m_count; i++) {
        canon[std::size_t(marginal_ids[std::size_t(i)])] = m_count + i;
        space.labels[std::size_t(m_count + i)] = marginal_ids[std::size_t(i)];
    }

    std::vector<Clause> clauses;
    clauses.reserve(std::size_t(n_clauses));
    for (int c = 0; c < n_clauses; c++) {
        int v1 = int(rng.below(std::uint64_t(n_total)));
        int v2 = int(rng.below(std::uint64_t(n_total - 1)));
        if (v2 >= v1) v2++;
        bool s1 = rng.next_u64() & 1;
        bool s2 = rng.next_u64() & 1;
        clauses.push_back({Lit{canon[std::size_t(v1 + 1)], s1}, Lit{canon[std::size_t(v2 + 1)], s2}});
    }
    return MmapInstance(std::move(space), CnfFormula(n_total, std::move(clauses)));
}

// Grid Ising generator: theta_i ~ U[-field, field], theta_ij ~ U[-coupling,
// coupling] (mixed signs), floor(max_fraction * nodes) nodes chosen uniformly
// as decision variables.
inline MmapInstance gen_ising_grid(int rows, int cols, double field, double coupling,
                                   double max_fraction, Rng& rng) {
    if (rows < 1 || cols < 1 || field < 0 || coupling < 0 || max_fraction < 0 || max_fraction > 1)
        throw std::invalid_argument("gen_ising_grid: bad parameters");
    int nodes = rows * cols;
    int m = int(max_fraction * nodes);
    if (m >= nodes) m = nodes - 1;  // at least one marginal bit

    IsingGrid g;
    g.rows = rows;
    g.cols = cols;
    g.theta_node.resize(std::size_t(nodes));
    g.theta_right.resize(std::size_t(rows * (cols - 1)));
    g.theta_down.resize(std::size_t((rows - 1) * cols));
    g.node_is_decision.assign(std::size_t(nodes), 0);
    for (double& t : g.theta_node) t = rng.uniform(-field, field);
    for (double& t : g.theta_right) t = rng.uniform(-coupling, coupling);
    for (double& t : g.theta_down) t = rng.uniform(-coupling, coupling);

    std::vector<int> order(std::size_t(nodes), 0);
    for (int i = 0; i < nodes; i++) order[std::size_t(i)] = i;
    for (int i = 0; i < m; i++) {
        std::size_t j = std::size_t(i) + rng.below(std::uint64_t(nodes - i));
        std::swap(order[std::size_t(i)], order[j]);
    }
    for (int i = 0; i < m; i++) g.node_is_decision[std::size_t(order[std::size_t(i)])] = 1;
    return MmapInstance::from_grid(std::move(g));
}

namespace detail {

inline std::string fmt_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

// CNF file format: DIMACS plus one mandatory extension line before the
// clauses, `vmax <id...> 0`, listing the decision variables (`vmax 0` means a
// pure counting instance). Ising format, line oriented:
//   ising <rows> <cols>
//   node <r> <c> <theta> <max|sum>     (one per node, row-major)
//   edge <r1> <c1> <r2> <c2> <theta>   (4-neighborhood only)
// Reals round-trip at 17 significant digits. Spin convention: bit b -> 2b-1.
inline void write_instance(const MmapInstance& inst, std::ostream& os) {
    if (inst.kind() == WeightKind::CnfIndicator) {
        const VarSpace& sp = inst.space();
        std::vector<int> label(std::size_t(sp.total()));
        for (int i = 0; i < sp.total(); i++)
            label[std::size_t(i)] = sp.labels.empty() ? i + 1 : sp.labels[std::size_t(i)];
        int max_id = 0;
        for (int l : label) max_id = std::max(max_id, l);
        os << "p cnf " << max_id << ' ' << inst.cnf().clauses().size() << '\n';
        os << "vmax";
        for (int i = 0; i < sp.num_decision; i++) os << ' ' << label[std::size_t(i)];
        os << " 0\n";
        for (const Clause& cl : inst.cnf().clauses()) {
            for (const Lit& l : cl) os << (l.neg ? -label[std::size_t(l.var)] : label[std::size_t(l.var)]) << ' ';
            os << "0\n";
        }
        return;
    }
    const IsingGrid& g = inst.ising();
    os << "ising " << g.rows << ' ' << g.cols << '\n';
    for (int r = 0; r < g.rows; r++)
        for (int c = 0; c < g.cols; c++)
            os << "node " << r << ' ' << c << ' ' << detail::fmt_real(g.theta_node[std::size_t(g.node_id(r, c))])
               << ' ' << (g.node_is_decision[std::size_t(g.node_id(r, c))] ? "max" : "sum") << '\n';
    for (int r = 0; r < g.rows; r++)
        for (int c = 0; c + 1 < g.cols; c++)
            os << "edge " << r << ' ' << c << ' ' << r << ' ' << c + 1 << ' '
               << detail::fmt_real(g.theta_right[std::size_t(r * (g.cols - 1) + c)]) << '\n';
    for (int r = 0; r + 1 < g.rows; r++)
        for (int c = 0; c < g.cols; c++)
            os << "edge " << r << ' ' << c << ' ' << r + 1 << ' ' << c << ' '
               << detail::fmt_real(g.theta_down[std::size_t(r * g.cols + c)]) << '\n';
}

inline void write_instance(const MmapInstance& inst, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_instance(inst, f);
}

namespace detail {

inline MmapInstance read_dimacs(std::istream& is, std::string first_line, int first_ln) {
    int nvars = -1, nclauses = -1;
    {
        std::istringstream ss(first_line);
        std::string p, fmt;
        if (!(ss >> p >> fmt >> nvars >> nclauses) || p != "p" || fmt != "cnf" || nvars < 1 || nclauses < 0)
            throw ParseError(first_ln, "malformed 'p cnf' header");
    }
    std::vector<int> vmax_ids;
    bool have_vmax = false;
    std::vector<std::vector<int>> raw_clauses;
    std::string line;
    int ln = first_ln;
    while (std::getline(is, line)) {
        ln++;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "vmax") {
            if (have_vmax) throw ParseError(ln, "duplicate vmax line");
            if (!raw_clauses.empty()) throw ParseError(ln, "vmax must precede clauses");
            have_vmax = true;
            int id;
            bool terminated = false;
            while (ss >> id) {
                if (id == 0) {
                    terminated = true;
                    break;
                }
                if (id < 0 || id > nvars) throw ParseError(ln, "vmax id out of range");
                vmax_ids.push_back(id);
            }
            if (!terminated) throw ParseError(ln, "vmax line not 0-terminated");
            continue;
        }
        // clause line
        std::istringstream cs(line);
        std::vector<int> lits;
        int v;
        bool terminated = false;
        while (cs >> v) {
            if (v == 0) {
                terminated = true;
                break;
            }
            if (std::abs(v) > nvars) throw ParseError(ln, "literal out of range");
            lits.push_back(v);
        }
        if (!terminated) throw ParseError(ln, "clause not 0-terminated");
        if (lits.empty()) throw ParseError(ln, "empty clause");
        raw_clauses.push_back(std::move(lits));
    }
    if (!have_vmax) throw ParseError(ln, "missing vmax line (decision variable list)");
    if (int(raw_clauses.size()) != nclauses) throw ParseError(ln, "clause count differs from header");

    std::sort(vmax_ids.begin(), vmax_ids.end());
    if (std::adjacent_find(vmax_ids.begin(), vmax_ids.end()) != vmax_ids.end())
        throw ParseError(ln, "duplicate id in vmax");
    std::vector<std::uint8_t> is_dec(std::size_t(nvars) + 1, 0);
    for (int id : vmax_ids) is_dec[std::size_t(id)] = 1;

    int m = int(vmax_ids.size());
    VarSpace space(m, nvars - m);
    space.labels.resize(std::size_t(nvars));
    std::vector<int> canon(std::size_t(nvars) + 1, -1);
    int di = 0, mi = 0;
    for (int id = 1; id <= nvars; id++) {
        int idx = is_dec[std::size_t(id)] ? di++ : m + mi++;
        canon[std::size_t(id)] = idx;
        space.labels[std::size_t(idx)] = id;
    }
    std::vector<Clause> clauses;
    clauses.reserve(raw_clauses.size());
    for (const auto& raw : raw_clauses) {
        Clause cl;
        for (int v : raw) cl.push_back(Lit{canon[std::size_t(std::abs(v))], v < 0});
        clauses.push_back(std::move(cl));
    }
    return MmapInstance(std::move(space), CnfFormula(nvars, std::move(clauses)));
}

inline MmapInstance read_ising(std::istream& is, std::string first_line, int first_ln) {
    IsingGrid g;
    {
        std::istringstream ss(first_line);
        std::string tag;
        if (!(ss >> tag >> g.rows >> g.cols) || g.rows < 1 || g.cols < 1)
            throw ParseError(first_ln, "malformed ising header");
    }
    int nodes = g.rows * g.cols;
    g.theta_node.assign(std::size_t(nodes), 0.0);
    g.theta_right.assign(std::size_t(g.rows * (g.cols - 1)), 0.0);
    g.theta_down.assign(std::size_t((g.rows - 1) * g.cols), 0.0);
    g.node_is_decision.assign(std::size_t(nodes), 0);
    std::vector<std::uint8_t> node_seen(std::size_t(nodes), 0);

    std::string line;
    int ln = first_ln;
    while (std::getline(is, line)) {
        ln++;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "node") {
            int r, c;
            double theta;
            std::string kind;
            if (!(ss >> r >> c >> theta >> kind) || (kind != "max" && kind != "sum"))
                throw ParseError(ln, "malformed node line");
            if (r < 0 || r >= g.rows || c < 0 || c >= g.cols) throw ParseError(ln, "node out of grid");
            int id = g.node_id(r, c);
            if (node_seen[std::size_t(id)]) throw ParseError(ln, "node designated twice");
            node_seen[std::size_t(id)] = 1;
            g.theta_node[std::size_t(id)] = theta;
            g.node_is_decision[std::size_t(id)] = (kind == "max");
        } else if (tok == "edge") {
            int r1, c1, r2, c2;
            double theta;
            if (!(ss >> r1 >> c1 >> r2 >> c2 >> theta)) throw ParseError(ln, "malformed edge line");
            if (r1 < 0 || r1 >= g.rows || c1 < 0 || c1 >= g.cols || r2 < 0 || r2 >= g.rows || c2 < 0 ||
                c2 >= g.cols)
                throw ParseError(ln, "edge endpoint out of grid");
            if (r1 == r2 && c2 == c1 + 1) g.theta_right[std::size_t(r1 * (g.cols - 1) + c1)] = theta;
            else if (c1 == c2 && r2 == r1 + 1) g.theta_down[std::size_t(r1 * g.cols + c1)] = theta;
            else throw ParseError(ln, "edge is not a right/down 4-neighbor pair");
        } else {
            throw ParseError(ln, "unknown directive '" + tok + "'");
        }
    }
    for (int id = 0; id < nodes; id++)
        if (!node_seen[std::size_t(id)]) throw ParseError(ln, "node " + std::to_string(id) + " not designated");
    return MmapInstance::from_grid(std::move(g));
}

}  // namespace detail

inline MmapInstance read_instance(std::istream& is) {
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ln++;
        if (line.empty() || line[0] == 'c' || line[0] == '#') continue;
        if (line.rfind("p cnf", 0) == 0) return detail::read_dimacs(is, line, ln);
        if (line.rfind("ising", 0) == 0) return detail::read_ising(is, line, ln);
        throw ParseError(ln, "unrecognized header (expected 'p cnf' or 'ising')");
    }
    throw ParseError(ln, "empty instance file");
}

inline MmapInstance read_instance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_instance(f);
}

}  // namespace xormmap
