#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "xormmap/baselines.hpp"
#include "xormmap/instances.hpp"
#include "xormmap/variants.hpp"

using namespace xormmap;

namespace {

MmapInstance free_instance(int m, int n) {
    return MmapInstance(VarSpace(m, n), CnfFormula(m + n, {}));
}

MmapInstance unsat_instance(int m, int n) {
    return MmapInstance(VarSpace(m, n), CnfFormula(m + n, {{pos(m)}, {neg(m)}}));
}

EstimatorConfig quick_config(std::uint64_t seed, int c = 3, double delta = 0.2) {
    EstimatorConfig cfg;
    cfg.c = c;
    cfg.delta = delta;
    cfg.master_seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("required_T_binsearch: frozen values and comparison") {
    CHECK(required_T_binsearch(20, 40, 1e-3, 5) == 22);
    // n = 2: the log-log term vanishes
    CHECK(required_T_binsearch(6, 2, 0.1, 4) ==
          int(std::ceil((6 * std::log(2.0) + std::log(10.0)) / alpha_star(4))));
    for (int n : {3, 5, 10, 20, 40})
        for (int m : {0, 5, 20})
            for (double d : {1e-3, 0.2})
                CHECK(required_T_binsearch(m, n, d, 5) <= required_T(m, n, d, 5));
}

TEST_CASE("required_T_plus and required_r: frozen values") {
    CHECK(required_T_plus(20, 5) == 17);
    CHECK(required_r(40, 1e-3, 5) == 11);
    CHECK(required_T_plus(20, 5) < required_T(20, 40, 1e-3, 5));
}

TEST_CASE("q_star: scan results and bounds") {
    CHECK(q_star(20, 10, 4) == 12);  // frozen regression constant
    CHECK(q_star(10, 0, 3) == 6);
    CHECK(q_star(9, 0, 3) == 5);
    int prev = 0;
    for (int m = 0; m <= 20; m++) {
        int q = q_star(20, m, 4);
        CHECK(q > 10);
        CHECK(q <= 20);
        CHECK(q >= prev);  // non-decreasing in m
        prev = q;
    }
    CHECK(prev == 13);
    for (int T : {2, 3, 7, 12})
        for (int m : {0, 4, 9}) {
            int q = q_star(T, m, 3);
            CHECK(2 * q > T);
            CHECK(q <= T);
        }
}

TEST_CASE("xor_k_plus: threshold edge cases") {
    Rng grng(80);
    MmapInstance live = gen_random_2sat(9, 3, 4, grng);
    EstimatorConfig cfg = quick_config(81);
    // q = T on a satisfiable base at k = 0: all replicates feasible
    RunRecord rec = xor_k_plus(live, 0, 4, 4, 0, cfg);
    CHECK(rec.outcome == Outcome::True);
    CHECK(rec.objective == 4);
    CHECK_THROWS_AS(xor_k_plus(live, 0, 4, 2, 0, cfg), std::invalid_argument);

    // q = floor(T/2)+1 reproduces the plain query exactly, same seeds
    for (std::uint64_t seed = 0; seed < 30; seed++) {
        Rng g2(derive_seed(700, {seed}));
        MmapInstance inst = gen_random_2sat(9, 3, int(3 + seed % 6), g2);
        int T = 3 + int(seed % 4);  // odd and even
        int k = int(seed % 6);
        EstimatorConfig c2 = quick_config(derive_seed(701, {seed}));
        RunRecord plain = xor_k(inst, k, T, 0, c2);
        RunRecord biased = xor_k_plus(inst, k, T, T / 2 + 1, 0, c2);
        CHECK(plain.outcome == biased.outcome);
        CHECK(plain.objective == biased.objective);
    }
}

TEST_CASE("xor_k_plus: rates bracket the two error exponents", "[slow]") {
    MmapInstance inst = free_instance(2, 8);  // #w(a) = 2^8 for every a
    const int k0 = 8, c = 3, T = 10, q = 6, trials = 200;
    const double p = 8.0 / 49.0;
    int true_low = 0, true_high = 0;
    for (int t = 0; t < trials; t++) {
        EstimatorConfig cfg = quick_config(derive_seed(702, {std::uint64_t(t)}), c);
        if (xor_k_plus(inst, k0 - c, T, q, 0, cfg).outcome == Outcome::True) true_low++;
        if (xor_k_plus(inst, k0 + c, T, q, 0, cfg).outcome == Outcome::True) true_high++;
    }
    double miss_bound = std::exp(-kl_bernoulli(double(T - q + 1) / T, p) * T);
    double false_bound = std::ldexp(1.0, 2) * std::exp(-kl_bernoulli(double(q) / T, p) * T);
    double s_low = std::sqrt(std::max(miss_bound * (1 - miss_bound), 0.25 / trials) / trials);
    double s_high = std::sqrt(std::max(false_bound * (1 - false_bound), 0.25 / trials) / trials);
    CHECK(true_low / double(trials) >= 1 - miss_bound - 4 * s_low);
    CHECK(true_high / double(trials) <= false_bound + 4 * s_high);
}

TEST_CASE("xor_mmap_binsearch: probe count bound") {
    MmapInstance inst = free_instance(2, 8);
    EstimatorConfig cfg = quick_config(83);
    EstimateReport rep = xor_mmap_binsearch(inst, cfg);
    CHECK(rep.records.size() <= std::size_t(std::ceil(std::log2(8.0)) + 1));
    CHECK(rep.k_hat >= 3);
    CHECK(rep.k_hat <= 8);
}

TEST_CASE("xor_mmap_binsearch: decision is the highest accepted probe") {
    Rng grng(84);
    MmapInstance inst = gen_random_2sat(10, 4, 8, grng);
    EstimatorConfig cfg = quick_config(85);
    EstimateReport rep = xor_mmap_binsearch(inst, cfg);
    int max_true = 0;
    for (const RunRecord& r : rep.records)
        if (r.outcome == Outcome::True) max_true = std::max(max_true, r.k);
    CHECK(rep.k_hat == max_true);
}

TEST_CASE("xor_mmap_plus: r = 1 reduces to the plain decision rule") {
    for (std::uint64_t seed = 0; seed < 10; seed++) {
        Rng grng(derive_seed(703, {seed}));
        MmapInstance inst = gen_random_2sat(9, 3, int(4 + seed % 5), grng);
        EstimatorConfig cfg = quick_config(derive_seed(704, {seed}));
        cfg.T_override = 8;
        VariantConfig vcfg{cfg, 1, std::nullopt};
        EstimateReport plus = xor_mmap_plus(inst, vcfg);
        EstimateReport plain = xor_mmap(inst, cfg);
        CHECK(plus.k_hat == plain.k_hat);
        REQUIRE(plus.records.size() == plain.records.size());
        for (std::size_t i = 0; i < plus.records.size(); i++)
            CHECK(plus.records[i].outcome == plain.records[i].outcome);
    }
}

TEST_CASE("xor_mmap_plus: unsat base yields all-false trials") {
    VariantConfig vcfg{quick_config(86), 3, std::nullopt};
    EstimateReport rep = xor_mmap_plus(unsat_instance(2, 5), vcfg);
    CHECK(rep.k_hat == 0);
    CHECK(rep.records.size() == 15);  // n * r, none accepted
    for (const RunRecord& r : rep.records) CHECK(r.outcome == Outcome::False);
    CHECK(rep.possibly_zero);
}

TEST_CASE("xor_mmap_plus: call accounting stays within n*r") {
    Rng grng(87);
    MmapInstance inst = gen_random_2sat(9, 3, 6, grng);
    VariantConfig vcfg{quick_config(88), std::nullopt, std::nullopt};
    const int r = required_r(6, 0.2, 3);
    EstimateReport rep = xor_mmap_plus(inst, vcfg);
    CHECK(rep.records.size() % std::size_t(r) == 0);
    CHECK(rep.records.size() <= std::size_t(6 * r));
    // trials within one k must carry distinct trial indices
    for (std::size_t i = 0; i + 1 < rep.records.size(); i++)
        if (rep.records[i].k == rep.records[i + 1].k)
            CHECK(rep.records[i].trial != rep.records[i + 1].trial);
}

TEST_CASE("variant consistency: all three estimators land in the window", "[slow]") {
    // free cubes of several sizes: OPT = 2^n exactly
    int ok_bin = 0, ok_plus = 0, ok_biased = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 20; seed++) {
        int n = 4 + int(seed % 3);
        MmapInstance inst = free_instance(2, n);
        EstimatorConfig cfg = quick_config(derive_seed(705, {seed}));
        VariantConfig vcfg{cfg, std::nullopt, std::nullopt};
        total++;
        EstimateReport rb = xor_mmap_binsearch(inst, cfg);
        if (std::abs(rb.k_hat - n) <= cfg.c) ok_bin++;
        EstimateReport rp = xor_mmap_plus(inst, vcfg);
        if (std::abs(rp.k_hat - n) <= cfg.c) ok_plus++;
        EstimateReport rq = xor_mmap_biased(inst, vcfg);
        if (std::abs(rq.k_hat - n) <= cfg.c) ok_biased++;
    }
    CHECK(ok_bin >= int(0.56 * total));
    CHECK(ok_plus >= int(0.56 * total));
    CHECK(ok_biased >= int(0.56 * total));
}
