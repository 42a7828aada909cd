#include <doctest.h>

#include <random>

#include "samg/static_block.hpp"

using namespace samg;

TEST_CASE("identity and zero satisfy ring axioms") {
    auto I = static_block<3>::identity();
    auto Z = static_block<3>::zero();
    static_block<3> M;
    for (int i = 0; i < 9; ++i) M.m[i] = i + 0.5;

    CHECK(M + Z == M);
    CHECK(M * I == M);
    CHECK(I * M == M);
    CHECK((M - M).is_zero());
}

TEST_CASE("zero test is exact") {
    auto Z = static_block<2>::zero();
    CHECK(Z.is_zero());
    Z(1, 0) = 1e-300;
    CHECK(!Z.is_zero());
}

TEST_CASE("inverse of identity and diagonal blocks") {
    auto I = static_block<2>::identity();
    CHECK(inverse(I) == I);

    static_block<2> D = static_block<2>::zero();
    D(0, 0) = 2;
    D(1, 1) = 4;
    auto Di = inverse(D);
    CHECK(Di(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Di(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(Di(0, 1) == 0.0);
    CHECK(Di(1, 0) == 0.0);
}

TEST_CASE("inverse of the worked-example 2x2 block multiplies back to identity") {
    static_block<2> M;
    M(0, 0) = 0.71; M(0, 1) = 0.65;
    M(1, 0) = 0.54; M(1, 1) = 0.37;

    // Direct 2x2 inverse formula as oracle.
    const double det = 0.71 * 0.37 - 0.65 * 0.54;
    static_block<2> oracle;
    oracle(0, 0) = 0.37 / det;  oracle(0, 1) = -0.65 / det;
    oracle(1, 0) = -0.54 / det; oracle(1, 1) = 0.71 / det;

    auto N = inverse(M);
    CHECK(fnorm(N - oracle) <= 1e-12 * fnorm(oracle));

    auto P = M * N;
    double err = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            err = std::max(err, std::abs(P(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(err <= 1e-12);
}

TEST_CASE("singular block is rejected") {
    auto Z = static_block<3>::zero();
    CHECK_THROWS_AS((void)inverse(Z), singular_block);
}

TEST_CASE("frobenius norm") {
    CHECK(fnorm(static_block<2>::zero()) == 0.0);

    static_block<2> M = static_block<2>::zero();
    M(0, 0) = 3;
    M(0, 1) = 4;
    CHECK(fnorm(M) == doctest::Approx(5.0).epsilon(1e-15));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-2, 2);
    static_block<3> R;
    double s = 0;
    for (int i = 0; i < 9; ++i) {
        R.m[i] = d(rng);
        s += R.m[i] * R.m[i];
    }
    CHECK(fnorm(R) == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
}

TEST_CASE("triangle inequality holds on random blocks") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int trial = 0; trial < 200; ++trial) {
        static_block<3> M, N;
        for (int i = 0; i < 9; ++i) { M.m[i] = d(rng); N.m[i] = d(rng); }
        CHECK(fnorm(M + N) <= fnorm(M) + fnorm(N) + 1e-14);
    }
}

TEST_CASE("double inversion returns the original block") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
        static_block<3> M;
        for (int i = 0; i < 9; ++i) M.m[i] = d(rng);
        for (int i = 0; i < 3; ++i) M(i, i) += 4.0; // keep well conditioned
        auto M2 = inverse(inverse(M));
        CHECK(fnorm(M2 - M) <= 1e-10 * fnorm(M));
    }
}

TEST_CASE("b=1 arithmetic is bit-identical to native scalars") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> d(-10, 10);
    for (int trial = 0; trial < 100; ++trial) {
        double x = d(rng), y = d(rng);
        static_block<1> bx, by;
        bx.m[0] = x;
        by.m[0] = y;
        CHECK((bx * by).m[0] == x * y);
        CHECK((bx + by).m[0] == x + y);
        CHECK(inverse(bx).m[0] == 1.0 / x);
        CHECK(fnorm(bx) == std::abs(x));
    }
}
