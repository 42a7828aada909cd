#ifndef SAMG_RELAXATION_HPP
#define SAMG_RELAXATION_HPP

/*
 * Smoothers for the V-cycle: ILU(0) generic over the value type and
 * damped Jacobi. Factors live in the sparsity pattern of A (zero
 * fill-in); the block variant replaces scalar division by
 * right-multiplication with inverted pivot blocks.
 */

#include <span>
#include <variant>
#include <vector>

#include "csr.hpp"
#include "kernels.hpp"

namespace samg {

template <class V>
class ilu0 {
public:
    ilu0() = default;

    explicit ilu0(const csr<V> &A) { factor(A); }

    // One smoothing application: r = f - A*u; solve L*U*d = r; u += d.
    void smooth(const csr<V> &A, std::span<const double> f,
            std::span<double> u, std::span<double> scratch) const
    {
        const index n = A.scalar_rows();
        if (static_cast<index>(f.size()) != n || static_cast<index>(u.size()) != n ||
            static_cast<index>(scratch.size()) < n)
            throw dimension_mismatch("ilu0::smooth: vector sizes");

        std::span<double> r = scratch.subspan(0, n);
        residual(A, f, u, r);
        solve_in_place(r);
        kernels::axpby(1.0, std::span<const double>(r.data(), r.size()), 1.0, u);
    }

    // Solve L*U*x = r in place (forward then backward substitution).
    void solve_in_place(std::span<double> r) const {
        constexpr int b = csr<V>::block_size;
        const index n = lu_.nrows;

        // Forward: L has unit diagonal, entries strictly below it.
        for (index i = 0; i < n; ++i) {
            double *ri = r.data() + i * b;
            for (index j = lu_.ptr[i]; j < diag_pos_[i]; ++j) {
                const double *rj = r.data() + lu_.col[j] * b;
                if constexpr (std::is_same_v<V, double>) {
                    ri[0] -= lu_.val[j] * rj[0];
                } else {
                    const V &blk = lu_.val[j];
                    for (int p = 0; p < b; ++p)
                        for (int q = 0; q < b; ++q)
                            ri[p] -= blk(p, q) * rj[q];
                }
            }
        }
        // Backward: x_i = U_ii^-1 (y_i - sum_{j>i} U_ij x_j).
        for (index i = n - 1; i >= 0; --i) {
            double *ri = r.data() + i * b;
            for (index j = diag_pos_[i] + 1; j < lu_.ptr[i + 1]; ++j) {
                const double *rj = r.data() + lu_.col[j] * b;
                if constexpr (std::is_same_v<V, double>) {
                    ri[0] -= lu_.val[j] * rj[0];
                } else {
                    const V &blk = lu_.val[j];
                    for (int p = 0; p < b; ++p)
                        for (int q = 0; q < b; ++q)
                            ri[p] -= blk(p, q) * rj[q];
                }
            }
            if constexpr (std::is_same_v<V, double>) {
                ri[0] *= inv_diag_[i];
            } else {
                const V &d = inv_diag_[i];
                double t[b];
                for (int p = 0; p < b; ++p) {
                    t[p] = 0;
                    for (int q = 0; q < b; ++q) t[p] += d(p, q) * ri[q];
                }
                for (int p = 0; p < b; ++p) ri[p] = t[p];
            }
        }
    }

    const csr<V>& factors() const { return lu_; }
    const std::vector<V>& inverted_pivots() const { return inv_diag_; }

    std::size_t bytes() const {
        return matrix_bytes(lu_) + inv_diag_.size() * sizeof(V);
    }

private:
    csr<V> lu_;                   // L (unit lower, implicit diagonal) + U in A's pattern
    std::vector<V> inv_diag_;     // inverted pivots
    std::vector<index> diag_pos_; // position of the diagonal entry per row

    void factor(const csr<V> &A) {
        if (A.nrows != A.ncols)
            throw non_square("ilu0: matrix must be square");

        lu_ = A;
        const index n = lu_.nrows;
        diag_pos_.assign(n, -1);
        inv_diag_.resize(n);

        for (index i = 0; i < n; ++i)
            for (index j = lu_.ptr[i]; j < lu_.ptr[i + 1]; ++j)
                if (lu_.col[j] == i) diag_pos_[i] = j;
        for (index i = 0; i < n; ++i)
            if (diag_pos_[i] < 0)
                throw missing_diagonal("ilu0: structurally zero diagonal");

        // IKJ elimination restricted to the pattern of A.
        std::vector<index> pos(n, -1);
        for (index i = 0; i < n; ++i) {
            for (index j = lu_.ptr[i]; j < lu_.ptr[i + 1]; ++j) pos[lu_.col[j]] = j;

            for (index j = lu_.ptr[i]; j < diag_pos_[i]; ++j) {
                const index k = lu_.col[j];
                // L_ik = A_ik * U_kk^-1 (right side; block products do not commute).
                lu_.val[j] = lu_.val[j] * inv_diag_[k];
                const V &lik = lu_.val[j];
                for (index l = diag_pos_[k] + 1; l < lu_.ptr[k + 1]; ++l) {
                    index p = pos[lu_.col[l]];
                    if (p >= 0) lu_.val[p] -= lik * lu_.val[l];
                }
            }

            inv_diag_[i] = value_traits<V>::inverse(lu_.val[diag_pos_[i]]);

            for (index j = lu_.ptr[i]; j < lu_.ptr[i + 1]; ++j) pos[lu_.col[j]] = -1;
        }
    }
};

class damped_jacobi {
public:
    static constexpr double default_damping = 0.72;

    damped_jacobi() = default;

    template <class V>
    explicit damped_jacobi(const csr<V> &A, double damping = default_damping)
        : damping_(damping)
    {
        constexpr int b = csr<V>::block_size;
        const index n = A.scalar_rows();
        inv_diag_.assign(n, 0.0);
        for (index i = 0; i < A.nrows; ++i)
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j)
                if (A.col[j] == i)
                    for (int r = 0; r < b; ++r) {
                        double d = value_traits<V>::get(A.val[j], r, r);
                        if (d == 0.0) throw zero_diagonal("jacobi: zero diagonal entry");
                        inv_diag_[i * b + r] = 1.0 / d;
                    }
    }

    // u += damping * D^-1 * (f - A*u)
    template <class V>
    void smooth(const csr<V> &A, std::span<const double> f,
            std::span<double> u, std::span<double> scratch) const
    {
        const index n = A.scalar_rows();
        std::span<double> r = scratch.subspan(0, n);
        residual(A, f, u, r);
        for (index i = 0; i < n; ++i) u[i] += damping_ * inv_diag_[i] * r[i];
    }

    std::size_t bytes() const { return inv_diag_.size() * sizeof(double); }

private:
    double damping_ = default_damping;
    std::vector<double> inv_diag_;
};

// Block smoother built from a scalar level matrix: convert to block form
// first, then factor. Operates on vectors in scalar layout.
template <int B>
ilu0<static_block<B>> as_block_smoother(const scalar_csr &A) {
    return ilu0<static_block<B>>(to_block<B>(A));
}

} // namespace samg

#endif
