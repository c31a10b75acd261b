#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "xormmap/dimacs_xor.hpp"
#include "xormmap/instances.hpp"

using namespace xormmap;

namespace {

ReplicatedProblem hand_built(int m, int n, int T, std::vector<ParitySystem> parity,
                             std::vector<Clause> base_clauses) {
    int k = parity.empty() ? 0 : parity[0].num_rows();
    MmapInstance base(VarSpace(m, n), CnfFormula(m + n, std::move(base_clauses)));
    ReplicatedProblem rep{std::move(base), T, k, std::move(parity), {}};
    rep.materialize_clauses();
    return rep;
}

}  // namespace

TEST_CASE("x-line sign convention") {
    // m = 0, one replicate: copy variables are 1..n
    ParitySystem ps;
    ps.dim = 3;
    ps.rhs = BitVec(2);
    ps.rows.push_back(BitVec::from_string("110"));  // x1 xor x2
    ps.rhs.set(0, true);                            // = 1
    ps.rows.push_back(BitVec::from_string("101"));  // x1 xor x3
    ps.rhs.set(1, false);                           // = 0
    ReplicatedProblem rep = hand_built(0, 3, 1, {ps}, {{pos(0), pos(1)}});
    std::string text = export_dimacs_xor(rep, 1);
    CHECK(text.find("x 1 2 0\n") != std::string::npos);
    CHECK(text.find("x -1 3 0\n") != std::string::npos);
}

TEST_CASE("header arithmetic and the no-rows case") {
    Rng grng(70);
    MmapInstance inst = gen_random_2sat(9, 3, 5, grng);
    ReplicatedProblem rep = build_replicated(inst, 1, 0, Rng(71));
    std::string text = export_dimacs_xor(rep, 1);
    std::ostringstream expect;
    expect << "p cnf " << 3 + 1 * 6 + 1 << ' ' << 5;
    CHECK(text.find(expect.str()) != std::string::npos);
    CHECK(text.find("\nx ") == std::string::npos);  // no parity lines
    CHECK(text.find("c card y 10 >= 1\n") != std::string::npos);
}

TEST_CASE("round trip: random replicated problems") {
    for (std::uint64_t seed = 0; seed < 20; seed++) {
        Rng grng(derive_seed(600, {seed}));
        MmapInstance inst = gen_random_2sat(8, 2, int(3 + seed % 5), grng);
        ReplicatedProblem rep = build_replicated(inst, int(1 + seed % 4), int(seed % 4), Rng(seed));
        int threshold = 1 + int(seed) % rep.T;
        ParsedReplicated back = parse_dimacs_xor(export_dimacs_xor(rep, threshold));
        CHECK(structurally_equal(rep, back.rep));
        CHECK(back.threshold == threshold);
        CHECK(back.rep.joint_clauses == rep.joint_clauses);
        // re-export is byte-stable
        CHECK(export_dimacs_xor(back.rep, threshold) == export_dimacs_xor(rep, threshold));
    }
}

TEST_CASE("round trip: empty-support parity rows keep their rhs") {
    ParitySystem ps;
    ps.dim = 4;
    ps.rhs = BitVec(3);
    ps.rows.push_back(BitVec::from_string("0110"));
    ps.rhs.set(0, true);
    ps.rows.push_back(BitVec(4));  // empty support, rhs 0: trivially true
    ps.rhs.set(1, false);
    ps.rows.push_back(BitVec(4));  // empty support, rhs 1: contradiction
    ps.rhs.set(2, true);
    ReplicatedProblem rep = hand_built(1, 4, 2, {ps, ps}, {{pos(0), pos(3)}});

    std::string text = export_dimacs_xor(rep, 1);
    ParsedReplicated back = parse_dimacs_xor(text);
    CHECK(structurally_equal(rep, back.rep));
    // the duplicated-pair encodings appear once per replicate each
    CHECK(text.find("x -2 2 0") != std::string::npos);
    CHECK(text.find("x 2 2 0") != std::string::npos);
}

TEST_CASE("parser rejects malformed documents") {
    CHECK_THROWS_AS(parse_dimacs_xor("p cnf 3 0\n"), ParseError);  // no layout comment
    CHECK_THROWS_AS(parse_dimacs_xor("c xormmap m 1 n 2 T 1 k 0\np cnf 4 1\n1 2\n"), ParseError);
    // x line crossing replicate blocks
    std::string bad =
        "c xormmap m 0 n 2 T 2 k 1\n"
        "p cnf 6 0\n"
        "x 1 3 0\n"
        "x 3 4 0\n";
    CHECK_THROWS_AS(parse_dimacs_xor(bad), ParseError);
}
