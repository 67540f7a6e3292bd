#include <doctest.h>

#include <cmath>

#include "ius/rng.hpp"
#include "ius/zc.hpp"

using namespace ius;

namespace {

cplx inner(const CVec& a, const CVec& b) {
    cplx acc(0, 0);
    for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

}  // namespace

TEST_CASE("root sequence basics") {
    for (int u : {1, 3, 25}) {
        CVec z = zc_root_sequence(u, 839);
        CHECK(std::abs(z[0] - cplx(1.0, 0.0)) < 1e-15);
        for (const cplx& v : z) CHECK(std::abs(std::abs(v) - 1.0) < 1e-14);
    }
    CHECK_THROWS_AS(zc_root_sequence(0, 839), invalid_root_error);
    CHECK_THROWS_AS(zc_root_sequence(839, 839), invalid_root_error);
}

TEST_CASE("perfect periodic autocorrelation") {
    CVec z = zc_root_sequence(1, 7);
    CVec shifted = cyclic_shift_code(1, 3, 1, 7);
    CHECK(std::abs(inner(z, shifted)) < 1e-12);

    // Larger length, several distinct shifts.
    for (int shift : {1, 5, 40}) {
        CVec a = zc_root_sequence(5, 839);
        CVec b = cyclic_shift_code(5, shift, 1, 839);
        CHECK(std::abs(inner(a, b)) < 1e-9);
    }
}

TEST_CASE("cyclic shift identities") {
    CVec base = zc_root_sequence(1, 839);
    CVec same = cyclic_shift_code(1, 0, 13, 839);
    for (int k = 0; k < 839; ++k) CHECK(std::abs(base[k] - same[k]) < 1e-15);

    CVec c = cyclic_shift_code(1, 1, 2, 7);
    cplx expect = std::polar(1.0, -M_PI * 6.0 / 7.0);  // Z_1(2)
    CHECK(std::abs(c[0] - expect) < 1e-14);

    CHECK_THROWS_AS(cyclic_shift_code(1, 7, 1, 7), shift_overflow_error);
}

TEST_CASE("shift equals quadratic phase decomposition") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        int M = trial % 2 == 0 ? 839 : 113;
        int u = rng.uniform_int(1, M - 1);
        int n_cs = rng.uniform_int(1, 20);
        int max_ell = (M - 1) / n_cs;
        int ell = rng.uniform_int(0, max_ell);
        long long off = static_cast<long long>(ell) * n_cs;

        CVec shifted = cyclic_shift_code(u, ell, n_cs, M);
        CVec root = zc_root_sequence(u, M);
        // Same reduction the generator uses, so the comparison is not
        // limited by sin/cos of huge raw arguments.
        long long t1 = (static_cast<long long>(u) * off) % M;
        long long t2 = (static_cast<long long>(u) * off % (2 * M) * ((off + 1) % (2 * M))) % (2 * M);
        cplx f2 = std::polar(1.0, -M_PI * static_cast<double>(t2) / M);
        for (int k = 0; k < M; ++k) {
            cplx f1 = std::polar(1.0, -2.0 * M_PI * static_cast<double>(t1 * k % M) / M);
            cplx rhs = root[k] * f1 * f2;
            CHECK(std::abs(shifted[k] - rhs) < 1e-12);
        }
    }
}

TEST_CASE("code matrix construction") {
    CodeMatrix small = build_code_matrix({{1, 3}}, 2, 7);
    CHECK(small.entries.rows == 7);
    CHECK(small.G() == 3);
    CVec z = zc_root_sequence(1, 7);
    for (int k = 0; k < 7; ++k) CHECK(std::abs(small.entries(k, 0) - z[k]) < 1e-15);
    CHECK(small.shift_offset(2) == 4);

    CodeMatrix lte = build_code_matrix({{1, 50}}, 15, 839);
    CHECK(lte.G() == 50);
    for (int c = 0; c < 50; ++c) {
        CHECK(col_norm(lte.entries, c) == doctest::Approx(std::sqrt(839.0)).epsilon(1e-12));
        for (int k = 0; k < 839; ++k) CHECK(std::abs(std::abs(lte.entries(k, c)) - 1.0) < 1e-13);
    }

    CHECK_THROWS_WITH_AS(build_code_matrix({{1, 77}}, 11, 839),
                         doctest::Contains("root 1"), shift_overflow_error);
}

TEST_CASE("code matrix JSON round trip") {
    CodeMatrix cm = build_code_matrix({{1, 3}, {2, 2}}, 2, 13);
    std::string text = code_matrix_to_json_text(cm);
    CodeMatrix back = code_matrix_from_json_text(text);
    CHECK(back.M == cm.M);
    CHECK(back.G() == cm.G());
    CHECK(back.roots == cm.roots);
    CHECK(back.shift_index == cm.shift_index);
    CHECK(back.ncs_by_root == cm.ncs_by_root);
    for (int c = 0; c < cm.G(); ++c)
        for (int k = 0; k < cm.M; ++k) CHECK(std::abs(back.entries(k, c) - cm.entries(k, c)) < 1e-15);
}
