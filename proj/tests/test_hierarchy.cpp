#include <doctest.h>

#include <random>

#include "samg/elasticity.hpp"
#include "samg/hierarchy.hpp"
#include "test_utils.hpp"

using namespace samg;
using namespace test_utils;

TEST_CASE("identity matrix: stagnation guard yields a degenerate hierarchy that solves exactly") {
    auto I = identity_matrix<double>(12);
    amg_params prm;
    prm.coarse_enough = 4;
    hierarchy H = setup(I, std::nullopt, pipeline::scalar, prm);
    CHECK(H.nlevels() == 1);

    std::vector<double> f = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, u(12, 0.0);
    vcycle_workspace ws(H);
    vcycle(H, f, u, ws);
    for (index i = 0; i < 12; ++i)
        CHECK(u[i] == doctest::Approx(f[i]).epsilon(1e-14));
}

TEST_CASE("two-level scalar hierarchy contracts the 1D Laplacian residual") {
    // 66 points: divisible by 3 (the scalar pipeline condenses in
    // point blocks of 3); neighbor edges stay strong either way.
    scalar_csr A = laplacian_1d(66);
    amg_params prm;
    prm.coarse_enough = 30;
    hierarchy H2 = setup(A, std::nullopt, pipeline::scalar, prm);
    CHECK(H2.nlevels() >= 2);

    std::mt19937 rng(107);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> f(66, 0.0), u(66);
    for (auto &v : u) v = d(rng);

    std::vector<double> r(66);
    residual(A, f, u, std::span<double>(r));
    double r0 = kernels::norm2(r);

    vcycle_workspace ws(H2);
    vcycle(H2, f, u, ws);
    residual(A, f, u, std::span<double>(r));
    CHECK(kernels::norm2(r) <= r0 / 5.0);
}

TEST_CASE("vcycle is linear from a zero initial guess") {
    scalar_csr A = laplacian_1d(66);
    amg_params prm;
    prm.coarse_enough = 20;
    hierarchy H = setup(A, std::nullopt, pipeline::scalar, prm);

    std::mt19937 rng(109);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> f(66), u1(66, 0.0), u2(66, 0.0), f2(66);
    for (auto &v : f) v = d(rng);
    for (index i = 0; i < 66; ++i) f2[i] = 2.0 * f[i];

    vcycle_workspace ws(H);
    vcycle(H, f, u1, ws);
    vcycle(H, f2, u2, ws);
    for (index i = 0; i < 66; ++i)
        CHECK(std::abs(u2[i] - 2.0 * u1[i]) <= 1e-12);
}

TEST_CASE("ns_scalar on elasticity: coarse level has 6x6 block structure with dense diagonal tiles") {
    auto pb = generate_hex_elasticity(4, 4, 4, 1.0, 0.3, false);
    auto B = rigid_body_modes(pb.coords);
    CHECK(pb.A.nrows == 375);

    amg_params prm;
    prm.coarse_enough = 100;
    hierarchy H = setup(pb.A, B, pipeline::ns_scalar, prm);
    REQUIRE(H.nlevels() >= 2);

    const scalar_csr &A2 = std::get<scalar_csr>(H.levels[1].A);
    CHECK(A2.nrows % 6 == 0);
    // Diagonal 6x6 tiles fully dense.
    for (index bi = 0; bi < A2.nrows / 6; ++bi) {
        int present = 0;
        for (int r = 0; r < 6; ++r) {
            index i = bi * 6 + r;
            for (index j = A2.ptr[i]; j < A2.ptr[i + 1]; ++j) {
                index c = A2.col[j] - bi * 6;
                if (c >= 0 && c < 6) ++present;
            }
        }
        CHECK(present == 36);
    }
}

TEST_CASE("Galerkin consistency across all pipelines (debug verification)") {
    auto pb = generate_hex_elasticity(3, 3, 3, 1.0, 0.3, true);
    auto B = rigid_body_modes(pb.coords);
    amg_params prm;
    prm.coarse_enough = 60;
    prm.verify_galerkin = true; // throws on inconsistency
    for (pipeline p : { pipeline::scalar, pipeline::block, pipeline::ns_scalar,
                        pipeline::ns_hybrid1, pipeline::ns_hybrid2, pipeline::ns_block }) {
        bool needs_ns = (p != pipeline::scalar && p != pipeline::block);
        hierarchy H = setup(pb.A, needs_ns ? std::optional(B) : std::nullopt, p, prm);
        CHECK(H.nlevels() >= 1);
    }
}

TEST_CASE("hybrid pipelines agree with ns_block level by level") {
    auto pb = generate_hex_elasticity(4, 4, 4, 1.0, 0.3, true);
    auto B = rigid_body_modes(pb.coords);
    amg_params prm;
    prm.coarse_enough = 100;

    hierarchy H1 = setup(pb.A, B, pipeline::ns_hybrid1, prm);
    hierarchy H2 = setup(pb.A, B, pipeline::ns_hybrid2, prm);
    hierarchy Hb = setup(pb.A, B, pipeline::ns_block, prm);

    REQUIRE(H1.nlevels() == Hb.nlevels());
    REQUIRE(H2.nlevels() == Hb.nlevels());

    for (index l = 0; l < Hb.nlevels(); ++l) {
        scalar_csr A2 = any_to_scalar(H2.levels[l].A);
        scalar_csr Ab = any_to_scalar(Hb.levels[l].A);
        CHECK(A2.nrows == Ab.nrows);
        double ref = frobenius_norm(Ab);
        CHECK(max_abs_diff(to_dense(A2), to_dense(Ab)) <= 1e-12 * std::max(ref, 1.0));
    }

    CHECK(memory_footprint(H2) == memory_footprint(Hb));
    CHECK(memory_footprint(H1) > memory_footprint(H2));
}

TEST_CASE("memory footprint ordering: hybrid1 below ns_scalar") {
    auto pb = generate_hex_elasticity(4, 4, 4, 1.0, 0.3, true);
    auto B = rigid_body_modes(pb.coords);
    amg_params prm;
    prm.coarse_enough = 100;

    hierarchy Hs = setup(pb.A, B, pipeline::ns_scalar, prm);
    hierarchy H1 = setup(pb.A, B, pipeline::ns_hybrid1, prm);
    CHECK(memory_footprint(H1) < memory_footprint(Hs));
}

TEST_CASE("setup input validation") {
    scalar_csr A = laplacian_1d(10); // not divisible by 3
    amg_params prm;
    CHECK_THROWS_AS(setup(A, std::nullopt, pipeline::block, prm), not_divisible);

    auto pb = generate_hex_elasticity(2, 2, 2, 1.0, 0.3, true);
    CHECK_THROWS_AS(setup(pb.A, std::nullopt, pipeline::ns_scalar, prm),
            bad_nullspace_shape);

    dense_columns wrong(12, 6);
    CHECK_THROWS_AS(setup(pb.A, wrong, pipeline::ns_scalar, prm),
            bad_nullspace_shape);
}
