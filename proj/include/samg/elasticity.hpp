#ifndef SAMG_ELASTICITY_HPP
#define SAMG_ELASTICITY_HPP

/*
 * Rigid body mode construction and a small structured-grid 3D linear
 * elasticity generator (8-node hexahedra, trilinear shape functions,
 * 2x2x2 Gauss quadrature) for desk-scale verification. DOFs are
 * node-interleaved (ux, uy, uz per node) so 3x3 node blocks are
 * contiguous.
 */

#include <array>
#include <cmath>
#include <vector>

#include "csr.hpp"

namespace samg {

struct node_coordinates {
    std::vector<double> xyz; // 3 per node

    index nnodes() const { return static_cast<index>(xyz.size()) / 3; }
    double x(index n) const { return xyz[3 * n + 0]; }
    double y(index n) const { return xyz[3 * n + 1]; }
    double z(index n) const { return xyz[3 * n + 2]; }
};

struct problem_bundle {
    scalar_csr A;
    node_coordinates coords;
    std::vector<double> rhs;
    std::vector<char> constrained; // per scalar DOF
};

// The n*3-by-6 rigid body basis: three unit translations and rotations
// about z, x, y with rows (-y, x, 0), (0, -z, y), (z, 0, -x) per node.
inline dense_columns rigid_body_modes(const node_coordinates &coords) {
    const index n = coords.nnodes();
    dense_columns B(3 * n, 6);
    for (index a = 0; a < n; ++a) {
        const double x = coords.x(a), y = coords.y(a), z = coords.z(a);
        const index r = 3 * a;
        B(r + 0, 0) = 1;
        B(r + 1, 1) = 1;
        B(r + 2, 2) = 1;
        B(r + 0, 3) = -y; B(r + 1, 3) = x;
        B(r + 1, 4) = -z; B(r + 2, 4) = y;
        B(r + 0, 5) = z;  B(r + 2, 5) = -x;
    }
    return B;
}

namespace detail {

// 24x24 element stiffness for a brick hx*hy*hz with isotropic material.
inline std::array<double, 24 * 24> hex8_stiffness(double hx, double hy, double hz,
        double E, double nu)
{
    const double lambda = E * nu / ((1 + nu) * (1 - 2 * nu));
    const double mu = E / (2 * (1 + nu));

    // Voigt order xx, yy, zz, xy, yz, zx.
    double C[6][6] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            C[i][j] = (i == j) ? lambda + 2 * mu : lambda;
    for (int i = 3; i < 6; ++i) C[i][i] = mu;

    // Local node offsets, lexicographic in (x, y, z).
    int off[8][3];
    for (int a = 0; a < 8; ++a) {
        off[a][0] = a & 1;
        off[a][1] = (a >> 1) & 1;
        off[a][2] = (a >> 2) & 1;
    }

    const double g = 1.0 / std::sqrt(3.0);
    const double gp[2] = { -g, g };
    const double jac[3] = { hx / 2, hy / 2, hz / 2 };
    const double detJ = jac[0] * jac[1] * jac[2];

    std::array<double, 24 * 24> Ke{};
    for (int qx = 0; qx < 2; ++qx)
    for (int qy = 0; qy < 2; ++qy)
    for (int qz = 0; qz < 2; ++qz) {
        const double xi = gp[qx], eta = gp[qy], zeta = gp[qz];
        // Shape function derivatives w.r.t. physical coordinates.
        double dN[8][3];
        for (int a = 0; a < 8; ++a) {
            const double sx = off[a][0] ? 1.0 : -1.0;
            const double sy = off[a][1] ? 1.0 : -1.0;
            const double sz = off[a][2] ? 1.0 : -1.0;
            dN[a][0] = 0.125 * sx * (1 + sy * eta) * (1 + sz * zeta) / jac[0];
            dN[a][1] = 0.125 * (1 + sx * xi) * sy * (1 + sz * zeta) / jac[1];
            dN[a][2] = 0.125 * (1 + sx * xi) * (1 + sy * eta) * sz / jac[2];
        }
        // Strain-displacement rows for each node pair: Ke += B'CB detJ.
        for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
            double Ba[6][3] = {}, Bb[6][3] = {};
            auto fill = [](double Bm[6][3], const double d[3]) {
                Bm[0][0] = d[0];
                Bm[1][1] = d[1];
                Bm[2][2] = d[2];
                Bm[3][0] = d[1]; Bm[3][1] = d[0];
                Bm[4][1] = d[2]; Bm[4][2] = d[1];
                Bm[5][0] = d[2]; Bm[5][2] = d[0];
            };
            fill(Ba, dN[a]);
            fill(Bb, dN[b]);
            for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int p = 0; p < 6; ++p)
                for (int q = 0; q < 6; ++q)
                    s += Ba[p][i] * C[p][q] * Bb[q][j];
                Ke[(3 * a + i) * 24 + (3 * b + j)] += s * detJ;
            }
        }
    }
    return Ke;
}

} // namespace detail

// Unit-cube structured hex grid; Dirichlet clamping of the x=0 face via
// symmetric row/column elimination; RHS from a unit downward body force.
inline problem_bundle generate_hex_elasticity(index nx, index ny, index nz,
        double E, double nu, bool clamp_x0)
{
    if (nx < 1 || ny < 1 || nz < 1)
        throw invalid_material("generate_hex_elasticity: element counts must be >= 1");
    if (!(E > 0) || !(nu > 0 && nu < 0.5))
        throw invalid_material("generate_hex_elasticity: need E > 0 and 0 < nu < 0.5");

    const index mx = nx + 1, my = ny + 1, mz = nz + 1;
    const index nnodes = mx * my * mz;
    const index ndof = 3 * nnodes;
    const double hx = 1.0 / nx, hy = 1.0 / ny, hz = 1.0 / nz;

    problem_bundle pb;
    pb.coords.xyz.resize(3 * nnodes);
    for (index k = 0; k < mz; ++k)
        for (index j = 0; j < my; ++j)
            for (index i = 0; i < mx; ++i) {
                index n = i + mx * (j + my * k);
                pb.coords.xyz[3 * n + 0] = i * hx;
                pb.coords.xyz[3 * n + 1] = j * hy;
                pb.coords.xyz[3 * n + 2] = k * hz;
            }

    pb.constrained.assign(ndof, 0);
    if (clamp_x0)
        for (index k = 0; k < mz; ++k)
            for (index j = 0; j < my; ++j) {
                index n = 0 + mx * (j + my * k);
                pb.constrained[3 * n + 0] = 1;
                pb.constrained[3 * n + 1] = 1;
                pb.constrained[3 * n + 2] = 1;
            }

    const auto Ke = detail::hex8_stiffness(hx, hy, hz, E, nu);

    std::vector<index> trows, tcols;
    std::vector<double> tvals;
    trows.reserve(nx * ny * nz * 24 * 24);
    tcols.reserve(trows.capacity());
    tvals.reserve(trows.capacity());

    pb.rhs.assign(ndof, 0.0);
    const double nodal_force = -hx * hy * hz / 8.0; // unit downward body force

    for (index ez = 0; ez < nz; ++ez)
    for (index ey = 0; ey < ny; ++ey)
    for (index ex = 0; ex < nx; ++ex) {
        index nodes[8];
        for (int a = 0; a < 8; ++a) {
            index i = ex + (a & 1);
            index j = ey + ((a >> 1) & 1);
            index k = ez + ((a >> 2) & 1);
            nodes[a] = i + mx * (j + my * k);
        }
        for (int a = 0; a < 8; ++a) {
            pb.rhs[3 * nodes[a] + 2] += nodal_force;
            for (int b = 0; b < 8; ++b)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        index gi = 3 * nodes[a] + i;
                        index gj = 3 * nodes[b] + j;
                        double v = Ke[(3 * a + i) * 24 + (3 * b + j)];
                        if (pb.constrained[gi] || pb.constrained[gj]) {
                            if (gi == gj) continue; // diagonal replaced below
                            continue;
                        }
                        trows.push_back(gi);
                        tcols.push_back(gj);
                        tvals.push_back(v);
                    }
        }
    }

    for (index d = 0; d < ndof; ++d)
        if (pb.constrained[d]) {
            trows.push_back(d);
            tcols.push_back(d);
            tvals.push_back(1.0);
            pb.rhs[d] = 0.0;
        }

    pb.A = from_triplets<double>(ndof, ndof, trows, tcols, tvals);
    return pb;
}

} // namespace samg

#endif
