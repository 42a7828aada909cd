#ifndef SAMG_HIERARCHY_HPP
#define SAMG_HIERARCHY_HPP

/*
 * AMG hierarchy construction and V-cycle application.
 *
 * Six pipeline variants are supported:
 *   scalar     - scalar matrices, point-wise aggregation (block size 3),
 *                no nullspace;
 *   block      - 3x3 block matrices throughout, plain aggregation;
 *   ns_scalar  - scalar matrices, nullspace basis threaded through levels;
 *   ns_hybrid1 - ns_scalar setup, level matrices converted to block form
 *                afterwards, smoothers stay scalar;
 *   ns_hybrid2 - as ns_hybrid1 but with block ILU(0) smoothers;
 *   ns_block   - block matrices throughout, transfers computed through
 *                the as-scalar coarsening wrapper.
 */

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coarsening.hpp"
#include "relaxation.hpp"

namespace samg {

enum class pipeline { scalar, block, ns_scalar, ns_hybrid1, ns_hybrid2, ns_block };

inline const char* pipeline_name(pipeline p) {
    switch (p) {
        case pipeline::scalar:     return "scalar";
        case pipeline::block:      return "block";
        case pipeline::ns_scalar:  return "ns-scalar";
        case pipeline::ns_hybrid1: return "ns-hybrid1";
        case pipeline::ns_hybrid2: return "ns-hybrid2";
        case pipeline::ns_block:   return "ns-block";
    }
    return "?";
}

using block3 = static_block<3>;
using any_matrix = std::variant<scalar_csr, csr<block3>>;
using any_smoother = std::variant<std::monostate, ilu0<double>, ilu0<block3>, damped_jacobi>;

enum class smoother_kind { ilu0, jacobi };

struct amg_params {
    coarsening_params coarsening;     // nullspace field ignored; passed separately
    smoother_kind smoother = smoother_kind::ilu0;
    int pre_sweeps = 1;
    int post_sweeps = 1;
    index coarse_enough = 3000;       // scalar unknowns
    double stagnation_ratio = 0.8;    // stop when coarse > ratio * fine
    bool verify_galerkin = false;     // debug-mode Galerkin consistency check
};

inline index scalar_dim(const any_matrix &A) {
    return std::visit([](const auto &m) { return m.scalar_rows(); }, A);
}

inline void any_spmv(double alpha, const any_matrix &A,
        std::span<const double> x, double beta, std::span<double> y)
{
    std::visit([&](const auto &m) { spmv(alpha, m, x, beta, y); }, A);
}

inline std::size_t any_matrix_bytes(const any_matrix &A) {
    return std::visit([](const auto &m) { return matrix_bytes(m); }, A);
}

inline scalar_csr any_to_scalar(const any_matrix &A) {
    return std::visit([](const auto &m) { return to_scalar(m); }, A);
}

struct level {
    any_matrix A;
    any_matrix P, R;        // absent (empty matrices) on the coarsest level
    any_smoother smoother;
    bool has_transfer = false;
};

// Dense LU with partial pivoting for the coarsest system.
class dense_lu {
public:
    dense_lu() = default;

    explicit dense_lu(std::vector<double> A, index n) : n_(n), lu_(std::move(A)), piv_(n) {
        for (index k = 0; k < n_; ++k) {
            index p = k;
            for (index i = k + 1; i < n_; ++i)
                if (std::abs(lu_[i * n_ + k]) > std::abs(lu_[p * n_ + k])) p = i;
            piv_[k] = p;
            if (p != k)
                for (index j = 0; j < n_; ++j)
                    std::swap(lu_[k * n_ + j], lu_[p * n_ + j]);
            double d = lu_[k * n_ + k];
            if (std::abs(d) < 1e-300)
                throw error("dense_lu: singular coarse matrix");
            double inv = 1.0 / d;
            for (index i = k + 1; i < n_; ++i) {
                double l = lu_[i * n_ + k] * inv;
                lu_[i * n_ + k] = l;
                const double *rk = lu_.data() + k * n_;
                double *ri = lu_.data() + i * n_;
                for (index j = k + 1; j < n_; ++j) ri[j] -= l * rk[j];
            }
        }
    }

    void solve(std::span<const double> f, std::span<double> u) const {
        std::copy(f.begin(), f.end(), u.begin());
        for (index k = 0; k < n_; ++k)
            if (piv_[k] != k) std::swap(u[k], u[piv_[k]]);
        for (index i = 1; i < n_; ++i) {
            double s = u[i];
            const double *ri = lu_.data() + i * n_;
            for (index j = 0; j < i; ++j) s -= ri[j] * u[j];
            u[i] = s;
        }
        for (index i = n_ - 1; i >= 0; --i) {
            double s = u[i];
            const double *ri = lu_.data() + i * n_;
            for (index j = i + 1; j < n_; ++j) s -= ri[j] * u[j];
            u[i] = s / ri[i];
        }
    }

    index dim() const { return n_; }
    std::size_t bytes() const { return static_cast<std::size_t>(n_) * n_ * sizeof(double); }

private:
    index n_ = 0;
    std::vector<double> lu_;
    std::vector<index> piv_;
};

struct hierarchy {
    std::vector<level> levels;   // finest first; last level holds A only
    dense_lu coarsest;
    pipeline variant = pipeline::scalar;
    amg_params params;

    index nlevels() const { return static_cast<index>(levels.size()); }
    index finest_dim() const { return scalar_dim(levels.front().A); }
};

// Scratch vectors for one V-cycle traversal; one instance per concurrent
// solve on the same hierarchy.
struct vcycle_workspace {
    std::vector<std::vector<double>> f, u, r;

    explicit vcycle_workspace(const hierarchy &H) {
        for (const level &lv : H.levels) {
            index n = scalar_dim(lv.A);
            f.emplace_back(n);
            u.emplace_back(n);
            r.emplace_back(n);
        }
    }
};

namespace detail {

// Rank-deficient aggregates leave structurally present but numerically
// zero columns in P; the Galerkin product then carries fully zero rows.
// Those coarse unknowns are decoupled (their restricted residual is
// always zero), so a unit diagonal makes every level solvable without
// changing the preconditioner's action.
template <class V>
void fix_decoupled_rows(csr<V> &A) {
    constexpr int b = csr<V>::block_size;
    for (index i = 0; i < A.nrows; ++i) {
        index diag = -1;
        for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j)
            if (A.col[j] == i) { diag = j; break; }
        for (int r = 0; r < b; ++r) {
            bool zero_row = true;
            for (index j = A.ptr[i]; zero_row && j < A.ptr[i + 1]; ++j)
                for (int c = 0; c < b; ++c)
                    if (value_traits<V>::get(A.val[j], r, c) != 0.0) {
                        zero_row = false;
                        break;
                    }
            if (zero_row && diag >= 0)
                value_traits<V>::set(A.val[diag], r, r, 1.0);
        }
    }
}

inline void apply_smoother(const level &lv, std::span<const double> f,
        std::span<double> u, std::span<double> scratch, int sweeps)
{
    for (int s = 0; s < sweeps; ++s) {
        std::visit([&](const auto &sm) {
            using S = std::decay_t<decltype(sm)>;
            if constexpr (std::is_same_v<S, std::monostate>) {
                throw error("level has no smoother");
            } else if constexpr (std::is_same_v<S, ilu0<double>>) {
                // Scalar smoother may be paired with a block level matrix
                // (ns_hybrid1); the residual just needs some spmv.
                std::visit([&](const auto &m) {
                    const index n = m.scalar_rows();
                    std::span<double> r = scratch.subspan(0, n);
                    residual(m, f, u, r);
                    sm.solve_in_place(r);
                    kernels::axpby(1.0, std::span<const double>(r.data(), r.size()), 1.0, u);
                }, lv.A);
            } else if constexpr (std::is_same_v<S, ilu0<block3>>) {
                std::visit([&](const auto &m) {
                    const index n = m.scalar_rows();
                    std::span<double> r = scratch.subspan(0, n);
                    residual(m, f, u, r);
                    sm.solve_in_place(r);
                    kernels::axpby(1.0, std::span<const double>(r.data(), r.size()), 1.0, u);
                }, lv.A);
            } else {
                std::visit([&](const auto &m) { sm.smooth(m, f, u, scratch); }, lv.A);
            }
        }, lv.smoother);
    }
}

// Shared scalar-space setup used by ns_scalar and the hybrid pipelines.
// Returns scalar level matrices and transfers.
struct scalar_setup_result {
    std::vector<scalar_csr> A;
    std::vector<scalar_csr> P, R;
};

inline scalar_setup_result scalar_setup(const scalar_csr &A_input,
        const std::optional<dense_columns> &B, bool use_nullspace,
        const amg_params &prm)
{
    scalar_setup_result res;
    res.A.push_back(A_input);
    std::optional<dense_columns> Bi = use_nullspace ? B : std::nullopt;

    while (res.A.back().nrows > prm.coarse_enough) {
        const scalar_csr &Ai = res.A.back();
        coarsening_params cp = prm.coarsening;
        cp.nullspace = Bi;
        if (use_nullspace)
            cp.point_block_size = (res.A.size() == 1)
                ? prm.coarsening.point_block_size
                : static_cast<int>(Bi->ncols);
        transfer_result t = transfer_operators(Ai, cp);
        if (t.P.ncols > prm.stagnation_ratio * Ai.nrows) break; // stagnation guard
        scalar_csr Ac = galerkin(t.R, Ai, t.P);
        fix_decoupled_rows(Ac);
        res.P.push_back(std::move(t.P));
        res.R.push_back(std::move(t.R));
        res.A.push_back(std::move(Ac));
        Bi = std::move(t.B_coarse);
    }
    return res;
}

} // namespace detail

inline hierarchy setup(const scalar_csr &A_input,
        const std::optional<dense_columns> &B,
        pipeline variant, const amg_params &params_in)
{
    if (A_input.nrows != A_input.ncols)
        throw non_square("setup: system matrix must be square");

    amg_params prm = params_in;
    const bool needs_ns = (variant == pipeline::ns_scalar || variant == pipeline::ns_hybrid1 ||
                           variant == pipeline::ns_hybrid2 || variant == pipeline::ns_block);
    const bool blocked = (variant == pipeline::block || variant == pipeline::ns_hybrid1 ||
                          variant == pipeline::ns_hybrid2 || variant == pipeline::ns_block);

    if (needs_ns) {
        if (!B) throw bad_nullspace_shape("setup: pipeline requires a nullspace basis");
        if (B->nrows != A_input.nrows)
            throw bad_nullspace_shape("setup: nullspace rows do not match matrix");
    }
    if (blocked && A_input.nrows % 3)
        throw not_divisible("setup: block pipelines require dimension divisible by 3");

    if (variant == pipeline::scalar || needs_ns)
        prm.coarsening.point_block_size = 3;

    hierarchy H;
    H.variant = variant;
    H.params = prm;

    auto make_scalar_smoother = [&](const scalar_csr &A) -> any_smoother {
        if (prm.smoother == smoother_kind::jacobi) return damped_jacobi(A);
        return ilu0<double>(A);
    };
    auto make_block_smoother = [&](const csr<block3> &A) -> any_smoother {
        if (prm.smoother == smoother_kind::jacobi) return damped_jacobi(A);
        return ilu0<block3>(A);
    };

    if (variant == pipeline::scalar || variant == pipeline::ns_scalar ||
        variant == pipeline::ns_hybrid1 || variant == pipeline::ns_hybrid2)
    {
        auto s = detail::scalar_setup(A_input, B, needs_ns, prm);
        const std::size_t L = s.A.size();
        H.coarsest = dense_lu(to_dense(s.A.back()), s.A.back().nrows);
        H.levels.resize(L);
        for (std::size_t i = 0; i < L; ++i) {
            level &lv = H.levels[i];
            const bool fine = i + 1 < L;
            lv.has_transfer = fine;
            if (fine) {
                if (variant == pipeline::ns_hybrid2)
                    lv.smoother = make_block_smoother(to_block<3>(s.A[i]));
                else
                    lv.smoother = make_scalar_smoother(s.A[i]);
            }
            if (variant == pipeline::ns_hybrid1 || variant == pipeline::ns_hybrid2) {
                lv.A = to_block<3>(s.A[i]);
                if (fine) {
                    lv.P = to_block<3>(s.P[i]);
                    lv.R = to_block<3>(s.R[i]);
                }
            } else {
                lv.A = std::move(s.A[i]);
                if (fine) {
                    lv.P = std::move(s.P[i]);
                    lv.R = std::move(s.R[i]);
                }
            }
        }
    } else {
        // Fully block-space setup (block and ns_block pipelines).
        std::vector<csr<block3>> As;
        As.push_back(to_block<3>(A_input));
        std::vector<csr<block3>> Ps, Rs;
        std::optional<dense_columns> Bi = needs_ns ? B : std::nullopt;

        while (As.back().scalar_rows() > prm.coarse_enough) {
            const csr<block3> &Ai = As.back();
            if (variant == pipeline::block) {
                auto t = block_transfer_operators<3>(Ai, prm.coarsening);
                if (t.P.scalar_cols() > prm.stagnation_ratio * Ai.scalar_rows()) break;
                csr<block3> Ac = galerkin(t.R, Ai, t.P);
                detail::fix_decoupled_rows(Ac);
                Ps.push_back(std::move(t.P));
                Rs.push_back(std::move(t.R));
                As.push_back(std::move(Ac));
            } else {
                coarsening_params cp = prm.coarsening;
                cp.nullspace = Bi;
                cp.point_block_size = (As.size() == 1)
                    ? prm.coarsening.point_block_size
                    : static_cast<int>(Bi->ncols);
                auto t = as_scalar_transfer<3>(Ai, cp);
                if (t.P.scalar_cols() > prm.stagnation_ratio * Ai.scalar_rows()) break;
                csr<block3> Ac = galerkin(t.R, Ai, t.P);
                detail::fix_decoupled_rows(Ac);
                Ps.push_back(std::move(t.P));
                Rs.push_back(std::move(t.R));
                As.push_back(std::move(Ac));
                Bi = std::move(t.B_coarse);
            }
        }

        const std::size_t L = As.size();
        H.levels.resize(L);
        scalar_csr coarse_scalar = to_scalar(As.back());
        for (std::size_t i = 0; i < L; ++i) {
            level &lv = H.levels[i];
            const bool fine = i + 1 < L;
            if (fine) {
                lv.smoother = make_block_smoother(As[i]);
                lv.P = std::move(Ps[i]);
                lv.R = std::move(Rs[i]);
            }
            lv.A = std::move(As[i]);
            lv.has_transfer = fine;
        }
        H.coarsest = dense_lu(to_dense(coarse_scalar), coarse_scalar.nrows);
    }

    if (prm.verify_galerkin) {
        for (index i = 0; i + 1 < H.nlevels(); ++i) {
            scalar_csr Ai = any_to_scalar(H.levels[i].A);
            scalar_csr Pi = any_to_scalar(H.levels[i].P);
            scalar_csr Ri = any_to_scalar(H.levels[i].R);
            scalar_csr Ac = any_to_scalar(H.levels[i + 1].A);
            scalar_csr G = galerkin(Ri, Ai, Pi);
            detail::fix_decoupled_rows(G);
            // Compare on the union pattern via dense difference.
            auto D1 = to_dense(Ac);
            auto D2 = to_dense(G);
            double diff = 0, ref = 0;
            for (std::size_t k = 0; k < D1.size(); ++k) {
                diff += (D1[k] - D2[k]) * (D1[k] - D2[k]);
                ref += D2[k] * D2[k];
            }
            if (diff > 1e-24 * ref)
                throw error("setup: Galerkin consistency check failed on level " +
                        std::to_string(i));
        }
    }

    return H;
}

// One V-cycle: u is both the initial approximation and the result.
inline void vcycle(const hierarchy &H, std::span<const double> f,
        std::span<double> u, vcycle_workspace &ws)
{
    const index L = H.nlevels();
    if (static_cast<index>(f.size()) != H.finest_dim() ||
        static_cast<index>(u.size()) != H.finest_dim())
        throw dimension_mismatch("vcycle: vector sizes");

    if (L == 1) { // degenerate hierarchy: direct solve
        H.coarsest.solve(f, u);
        return;
    }

    std::copy(f.begin(), f.end(), ws.f[0].begin());
    std::copy(u.begin(), u.end(), ws.u[0].begin());

    for (index i = 0; i < L - 1; ++i) {
        const level &lv = H.levels[i];
        if (i > 0) std::fill(ws.u[i].begin(), ws.u[i].end(), 0.0);
        detail::apply_smoother(lv, ws.f[i], ws.u[i], ws.r[i], H.params.pre_sweeps);
        std::visit([&](const auto &m) { residual(m, ws.f[i], ws.u[i], ws.r[i]); }, lv.A);
        any_spmv(1.0, lv.R, ws.r[i], 0.0, ws.f[i + 1]);
    }

    H.coarsest.solve(ws.f[L - 1], ws.u[L - 1]);

    for (index i = L - 2; i >= 0; --i) {
        const level &lv = H.levels[i];
        any_spmv(1.0, lv.P, ws.u[i + 1], 1.0, ws.u[i]);
        detail::apply_smoother(lv, ws.f[i], ws.u[i], ws.r[i], H.params.post_sweeps);
    }

    std::copy(ws.u[0].begin(), ws.u[0].end(), u.begin());
}

inline std::size_t memory_footprint(const hierarchy &H) {
    std::size_t bytes = 0;
    for (const level &lv : H.levels) {
        bytes += any_matrix_bytes(lv.A);
        if (lv.has_transfer) {
            bytes += any_matrix_bytes(lv.P);
            bytes += any_matrix_bytes(lv.R);
        }
        std::visit([&](const auto &sm) {
            using S = std::decay_t<decltype(sm)>;
            if constexpr (!std::is_same_v<S, std::monostate>) bytes += sm.bytes();
        }, lv.smoother);
    }
    bytes += H.coarsest.bytes();
    return bytes;
}

} // namespace samg

#endif
