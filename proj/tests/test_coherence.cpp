#include <doctest.h>

#include <cmath>

#include "ius/coherence.hpp"
#include "ius/dictionary.hpp"
#include "ius/rng.hpp"

using namespace ius;

namespace {

struct SmallCase {
    int N, M, N1, G, n_cs, u;
};

SystemConfig make_config(int N, int M, int N1) {
    SystemConfig cfg = lte_preset();
    cfg.N = N;
    cfg.N_g = N / 8;
    cfg.M = M;
    cfg.j1 = 0;
    cfg.P_max = N1 / 2;
    cfg.D = N1 - N1 / 2;
    cfg.N1 = N1;
    return cfg;
}

}  // namespace

TEST_CASE("sinc ratio reference points") {
    CHECK(sinc_ratio(0.0, 839, 6144).value == doctest::Approx(1.0));

    // Zeros at nonzero multiples of N/M inside one period.
    for (int n : {1, 2, 5}) {
        double r = static_cast<double>(n) * 6144.0 / 839.0;
        CHECK(sinc_ratio(r, 839, 6144).value < 1e-12);
    }

    CHECK(sinc_ratio(1.0, 839, 6144).value == doctest::Approx(0.9696).epsilon(5e-4));

    SincRatio at_n = sinc_ratio(6144.0, 839, 6144);
    CHECK(at_n.degenerate);
    CHECK(at_n.value == 0.0);
}

TEST_CASE("sinc ratio symmetry, periodicity, monotonicity, argmax") {
    struct {
        int M, N;
    } cases[] = {{839, 6144}, {13, 64}, {29, 128}};
    for (auto [M, N] : cases) {
        // symmetry and periodicity on a grid
        for (int i = 1; i < 400; ++i) {
            double r = static_cast<double>(i) * N / 401.0;
            CHECK(sinc_ratio(r, M, N).value ==
                  doctest::Approx(sinc_ratio(N - r, M, N).value).epsilon(1e-10));
            CHECK(sinc_ratio(r, M, N).value ==
                  doctest::Approx(sinc_ratio(r + N, M, N).value).epsilon(1e-10));
        }
        // monotone decreasing on [0, 1]
        double prev = 2.0;
        for (int i = 0; i <= 1000; ++i) {
            double v = sinc_ratio(static_cast<double>(i) / 1000.0, M, N).value;
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        // grid argmax over [1, N-1) sits at r = 1
        const int steps = 200000;
        double best_r = 1.0, best_v = -1.0;
        for (int i = 0; i < steps; ++i) {
            double r = 1.0 + (static_cast<double>(N) - 2.0) * i / steps;
            double v = sinc_ratio(r, M, N).value;
            if (v > best_v) {
                best_v = v;
                best_r = r;
            }
        }
        CHECK(std::abs(best_r - 1.0) <= (static_cast<double>(N) - 2.0) / steps);
    }
}

TEST_CASE("zeta reference values") {
    CHECK(zeta(1, 13, 50, 105, 839, 6144) == doctest::Approx(0.199).epsilon(5e-3));
    CHECK(zeta(1, 15, 50, 105, 839, 6144) == doctest::Approx(5.845).epsilon(2e-3));

    // G = 2, N1 = 1 reduces to the wrapped distance of a single step.
    double beta = 7.0 * 64.0 / 13.0;  // n_cs u N / M
    double direct = std::min(std::fmod(beta, 64.0), 64.0 - std::fmod(beta, 64.0));
    CHECK(zeta(7, 1, 2, 1, 13, 64) == doctest::Approx(direct).epsilon(1e-12));

    CHECK_THROWS_AS(zeta(1, 13, 1, 105, 839, 6144), invalid_config_error);
}

TEST_CASE("closed form reference values") {
    ClosedFormMu a = coherence_closed_form(1, 13, 50, 105, 839, 6144);
    CHECK(a.assumptions_hold);
    CHECK(a.mu == doctest::Approx(0.9988).epsilon(5e-4));

    ClosedFormMu b = coherence_closed_form(1, 15, 50, 105, 839, 6144);
    CHECK(b.zeta > 1.0);
    CHECK(b.mu == doctest::Approx(0.9696).epsilon(5e-4));
}

TEST_CASE("brute force on toy matrices") {
    CMat ortho(4, 3);
    for (int c = 0; c < 3; ++c) ortho(c, c) = cplx(1.0, 0.0);
    CoherenceReport r = mutual_coherence_brute(ortho);
    CHECK(r.mu == doctest::Approx(0.0));

    CMat dup(4, 3);
    for (int q = 0; q < 4; ++q) {
        dup(q, 0) = cplx(1.0, q);
        dup(q, 2) = cplx(2.0, 2.0 * q);  // parallel to column 0
        dup(q, 1) = cplx(q == 0 ? 1.0 : 0.0, 0.0);
    }
    CoherenceReport r2 = mutual_coherence_brute(dup);
    CHECK(r2.mu == doctest::Approx(1.0));
    CHECK(r2.argmax_pair.first == 0);
    CHECK(r2.argmax_pair.second == 2);

    CMat zero(4, 2);
    zero(0, 0) = cplx(1.0, 0.0);
    CHECK_THROWS_AS(mutual_coherence_brute(zero), degenerate_column_error);
}

TEST_CASE("closed form equals dense brute force on small configs") {
    const SmallCase cases[] = {
        {64, 13, 4, 3, 1, 1},  {64, 13, 4, 3, 2, 1},  {96, 17, 5, 4, 1, 3},
        {128, 29, 6, 4, 2, 2}, {60, 11, 3, 5, 1, 1},  {100, 19, 7, 3, 3, 5},
    };
    for (const SmallCase& sc : cases) {
        CAPTURE(sc.N);
        CAPTURE(sc.M);
        CAPTURE(sc.n_cs);
        CAPTURE(sc.u);
        SystemConfig cfg = make_config(sc.N, sc.M, sc.N1);
        CodeMatrix codes = build_code_matrix({{sc.u, sc.G}}, sc.n_cs, sc.M);
        Dictionary dict = assemble(codes, cfg);

        ClosedFormMu cf = coherence_closed_form(sc.u, sc.n_cs, sc.G, sc.N1, sc.M, sc.N);
        CHECK(cf.assumptions_hold);
        CoherenceReport dense = mutual_coherence_brute(dict.dense());
        CHECK(std::abs(cf.mu - dense.mu) < 1e-9);

        // Structured scan agrees with both.
        CoherenceReport structured = full_dictionary_coherence(dict, CoherenceMethod::brute_force);
        CHECK(std::abs(structured.mu - dense.mu) < 1e-9);
        CoherenceReport closed = full_dictionary_coherence(dict, CoherenceMethod::closed_form);
        CHECK(std::abs(closed.mu - dense.mu) < 1e-9);
    }
}

TEST_CASE("block coherence basics") {
    // Orthogonal column spans
    CMat b1(4, 2), b2(4, 2);
    b1(0, 0) = 1.0;
    b1(1, 1) = 1.0;
    b2(2, 0) = 1.0;
    b2(3, 1) = cplx(0.0, 1.0);
    CHECK(block_coherence(b1, b2) == doctest::Approx(0.0));

    CMat c1(3, 1), c2(3, 1);
    for (int q = 0; q < 3; ++q) c1(q, 0) = c2(q, 0) = cplx(q + 1.0, -q);
    CHECK(block_coherence(c1, c2) == doctest::Approx(1.0));
}

TEST_CASE("adjacent block coherence stays under the S(1) envelope") {
    SystemConfig cfg = lte_preset();
    CodeMatrix codes = build_code_matrix({{1, 2}}, 15, cfg.M);
    Dictionary dict = assemble(codes, cfg);
    double s1 = sinc_ratio_value(1.0, cfg.M, cfg.N);
    double mu = block_coherence(dict.blocks[0].entries, dict.blocks[1].entries);
    CHECK(mu <= s1 + 1e-3);
}

TEST_CASE("cross root magnitude matches direct inner products") {
    SystemConfig cfg = make_config(64, 13, 4);
    CodeMatrix codes = build_code_matrix({{1, 3}, {3, 3}}, 2, 13);
    Dictionary dict = assemble(codes, cfg);

    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        int bl = rng.uniform_int(0, 2);      // family u=1
        int bm = rng.uniform_int(3, 5);      // family u=3
        int k = rng.uniform_int(1, cfg.N1);  // 1-based
        int p = rng.uniform_int(1, cfg.N1);

        cplx acc(0, 0);
        for (int q = 0; q < cfg.M; ++q)
            acc += std::conj(dict.blocks[bl].entries(q, k - 1)) * dict.blocks[bm].entries(q, p - 1);
        double direct = std::abs(acc) / cfg.M;

        double formula = cross_root_magnitude(1, 3, bl + 1, bm - 3 + 1, p, k, 2, cfg);
        CHECK(std::abs(direct - formula) < 1e-10);
    }
}

TEST_CASE("cross root magnitude with half-integer offset") {
    SystemConfig cfg = lte_preset();
    // Equal code and column indices zero the bracket, leaving theta = 1/2.
    double mag = cross_root_magnitude(1, 3, 1, 1, 7, 7, 13, cfg);
    cplx acc(0, 0);
    for (int n = 0; n < cfg.M; ++n) {
        double x = n + 0.5;
        acc += std::polar(1.0, -M_PI * 2.0 * x * x / cfg.M);
    }
    CHECK(mag == doctest::Approx(std::abs(acc) / cfg.M).epsilon(1e-10));
}

TEST_CASE("Frank-Zadoff-Chu magnitude at integer offsets") {
    SystemConfig cfg = lte_preset();
    const double expect = 1.0 / std::sqrt(839.0);
    int checked = 0;
    // Even root difference, equal columns, shift pair chosen so the offset
    // is integer: n_cs (u2 (m-1) - u1 (l-1)) odd for (u2-u1) = 2.
    for (int n_cs : {11, 13, 15}) {
        for (int ell = 1; ell <= 6; ++ell) {
            for (int m = 1; m <= 6; ++m) {
                long long bracket = static_cast<long long>(n_cs) * (3LL * (m - 1) - 1LL * (ell - 1));
                if (bracket % 2 == 0) continue;  // need odd multiples of (u2-u1)/2
                double mag = cross_root_magnitude(1, 3, ell, m, 5, 5, n_cs, cfg);
                CHECK(mag == doctest::Approx(expect).epsilon(1e-9));
                ++checked;
            }
        }
    }
    CHECK(checked >= 30);
}

TEST_CASE("admission check") {
    SystemConfig cfg = make_config(64, 13, 4);
    AdmissionCheck empty = multi_root_admissible(2, 1, 3, {}, cfg.N1, cfg.M, cfg.N);
    CHECK(empty.admissible);
    CHECK(empty.max_magnitude == 0.0);

    // Small-config decision against an exhaustive dense check.
    std::vector<RootFamily> existing = {{1, 2, 3}};
    AdmissionCheck chk = multi_root_admissible(3, 2, 2, existing, cfg.N1, cfg.M, cfg.N);

    CodeMatrix codes = build_code_matrix({{1, 3}, {3, 2}}, 2, 13);
    Dictionary dict = assemble(codes, cfg);
    double oracle = 0.0;
    for (int bi = 0; bi < 3; ++bi)
        for (int bj = 3; bj < 5; ++bj)
            oracle = std::max(oracle, block_coherence(dict.blocks[bi].entries, dict.blocks[bj].entries));
    CHECK(chk.max_magnitude == doctest::Approx(oracle).epsilon(1e-9));
    double s1 = sinc_ratio_value(1.0, cfg.M, cfg.N);
    CHECK(chk.admissible == (oracle <= s1 + 1e-12));

    // Decision flips when the measured maximum exceeds the envelope.
    CHECK_FALSE(AdmissionCheck{s1 + 0.1 <= s1 + 1e-12, s1 + 0.1, s1 + 1e-12}.admissible);
}

TEST_CASE("multi-root dictionary coherence agrees across methods") {
    SystemConfig cfg = make_config(64, 13, 4);
    CodeMatrix codes = build_code_matrix({{1, 3}, {3, 2}}, 2, 13);
    Dictionary dict = assemble(codes, cfg);

    CoherenceReport dense = mutual_coherence_brute(dict.dense());
    CoherenceReport structured = full_dictionary_coherence(dict, CoherenceMethod::brute_force);
    CoherenceReport closed = full_dictionary_coherence(dict, CoherenceMethod::closed_form);
    CHECK(std::abs(structured.mu - dense.mu) < 1e-9);
    CHECK(std::abs(closed.mu - dense.mu) < 1e-9);
    CHECK(structured.cross_block_max >= 0.0);
}
