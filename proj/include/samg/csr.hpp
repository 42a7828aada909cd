#ifndef SAMG_CSR_HPP
#define SAMG_CSR_HPP

/*
 * CSR sparse matrix generic over the value type (double or static_block),
 * with the kernels every pipeline needs: SpMV, transpose, SpGEMM, the
 * block/scalar conversion adapters, and deterministic memory accounting.
 *
 * Invariants: ptr is nondecreasing with ptr[0] = 0 and ptr[nrows] = nnz;
 * column indices are strictly increasing within a row; no duplicates.
 * Vectors passed to spmv are always in scalar layout, independent of the
 * value type.
 */

#include <algorithm>
#include <span>
#include <tuple>
#include <type_traits>
#include <vector>

#include "common.hpp"
#include "static_block.hpp"

namespace samg {

template <class V>
struct csr {
    using value_type = V;
    static constexpr int block_size = value_traits<V>::block_size;

    index nrows = 0, ncols = 0;
    std::vector<index> ptr{0};
    std::vector<index> col;
    std::vector<V> val;

    index nnz() const { return static_cast<index>(col.size()); }

    index scalar_rows() const { return nrows * block_size; }
    index scalar_cols() const { return ncols * block_size; }
};

using scalar_csr = csr<double>;

// Column-major dense column set; houses the near nullspace basis B and
// its coarse-level descendants.
struct dense_columns {
    index nrows = 0, ncols = 0;
    std::vector<double> data; // column-major

    dense_columns() = default;
    dense_columns(index r, index c) : nrows(r), ncols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(index i, index j) { return data[j * nrows + i]; }
    const double& operator()(index i, index j) const { return data[j * nrows + i]; }
};

// --- construction helpers ---------------------------------------------------

// Build CSR from unsorted triplets; duplicates are summed.
template <class V>
csr<V> from_triplets(index nrows, index ncols,
        std::span<const index> rows, std::span<const index> cols,
        std::span<const V> vals)
{
    csr<V> A;
    A.nrows = nrows;
    A.ncols = ncols;
    A.ptr.assign(nrows + 1, 0);

    const index nt = static_cast<index>(rows.size());
    for (index k = 0; k < nt; ++k) A.ptr[rows[k] + 1]++;
    for (index i = 0; i < nrows; ++i) A.ptr[i + 1] += A.ptr[i];

    std::vector<index> head = A.ptr;
    std::vector<index> tcol(nt);
    std::vector<V> tval(nt);
    for (index k = 0; k < nt; ++k) {
        index p = head[rows[k]]++;
        tcol[p] = cols[k];
        tval[p] = vals[k];
    }

    // Sort each row and merge duplicates.
    A.col.reserve(nt);
    A.val.reserve(nt);
    std::vector<index> order;
    index out = 0;
    std::vector<index> new_ptr(nrows + 1, 0);
    for (index i = 0; i < nrows; ++i) {
        index beg = A.ptr[i], end = A.ptr[i + 1];
        order.resize(end - beg);
        for (index k = 0; k < end - beg; ++k) order[k] = beg + k;
        std::sort(order.begin(), order.end(),
                [&](index a, index b) { return tcol[a] < tcol[b]; });
        for (index k = 0; k < end - beg; ++k) {
            index src = order[k];
            if (out > new_ptr[i] && !A.col.empty() && A.col.back() == tcol[src]) {
                A.val.back() += tval[src];
            } else {
                A.col.push_back(tcol[src]);
                A.val.push_back(tval[src]);
                ++out;
            }
        }
        new_ptr[i + 1] = out;
    }
    A.ptr = std::move(new_ptr);
    return A;
}

template <class V>
csr<V> identity_matrix(index n) {
    csr<V> I;
    I.nrows = I.ncols = n;
    I.ptr.resize(n + 1);
    I.col.resize(n);
    I.val.resize(n);
    for (index i = 0; i < n; ++i) {
        I.ptr[i + 1] = i + 1;
        I.col[i] = i;
        I.val[i] = value_traits<V>::identity();
    }
    return I;
}

// --- SpMV -------------------------------------------------------------------

// y = alpha*A*x + beta*y, vectors in scalar layout.
template <class V>
void spmv(double alpha, const csr<V> &A, std::span<const double> x,
        double beta, std::span<double> y)
{
    constexpr int b = csr<V>::block_size;
    if (static_cast<index>(x.size()) != A.scalar_cols() ||
        static_cast<index>(y.size()) != A.scalar_rows())
        throw dimension_mismatch("spmv: vector sizes do not match matrix");

    for (index i = 0; i < A.nrows; ++i) {
        if constexpr (std::is_same_v<V, double>) {
            double s = 0;
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j)
                s += A.val[j] * x[A.col[j]];
            y[i] = alpha * s + (beta == 0.0 ? 0.0 : beta * y[i]);
        } else {
            double s[b];
            for (int r = 0; r < b; ++r) s[r] = 0;
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                const V &blk = A.val[j];
                const double *xs = x.data() + A.col[j] * b;
                for (int r = 0; r < b; ++r)
                    for (int c = 0; c < b; ++c)
                        s[r] += blk(r, c) * xs[c];
            }
            for (int r = 0; r < b; ++r) {
                double &yi = y[i * b + r];
                yi = alpha * s[r] + (beta == 0.0 ? 0.0 : beta * yi);
            }
        }
    }
}

// r = f - A*u
template <class V>
void residual(const csr<V> &A, std::span<const double> f,
        std::span<const double> u, std::span<double> r)
{
    std::copy(f.begin(), f.end(), r.begin());
    spmv(-1.0, A, u, 1.0, r);
}

// --- transpose --------------------------------------------------------------

template <class V>
csr<V> transpose(const csr<V> &A) {
    csr<V> T;
    T.nrows = A.ncols;
    T.ncols = A.nrows;
    T.ptr.assign(T.nrows + 1, 0);
    T.col.resize(A.nnz());
    T.val.resize(A.nnz());

    for (index k = 0; k < A.nnz(); ++k) T.ptr[A.col[k] + 1]++;
    for (index i = 0; i < T.nrows; ++i) T.ptr[i + 1] += T.ptr[i];

    std::vector<index> head(T.ptr.begin(), T.ptr.end() - 1);
    for (index i = 0; i < A.nrows; ++i)
        for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
            index p = head[A.col[j]]++;
            T.col[p] = i;
            T.val[p] = value_traits<V>::transpose(A.val[j]);
        }
    // Row-major scan of A emits ascending row indices per output row.
    return T;
}

// --- SpGEMM -----------------------------------------------------------------

// Exact structural product; numeric cancellation kept, rows sorted.
template <class V>
csr<V> spgemm(const csr<V> &A, const csr<V> &B) {
    if (A.ncols != B.nrows)
        throw dimension_mismatch("spgemm: inner dimensions disagree");

    csr<V> C;
    C.nrows = A.nrows;
    C.ncols = B.ncols;
    C.ptr.assign(C.nrows + 1, 0);

    std::vector<index> marker(B.ncols, -1);

    // Symbolic pass.
    for (index i = 0; i < A.nrows; ++i) {
        index count = 0;
        for (index ja = A.ptr[i]; ja < A.ptr[i + 1]; ++ja) {
            index k = A.col[ja];
            for (index jb = B.ptr[k]; jb < B.ptr[k + 1]; ++jb) {
                index c = B.col[jb];
                if (marker[c] != i) {
                    marker[c] = i;
                    ++count;
                }
            }
        }
        C.ptr[i + 1] = count;
    }
    for (index i = 0; i < C.nrows; ++i) C.ptr[i + 1] += C.ptr[i];
    C.col.resize(C.ptr[C.nrows]);
    C.val.resize(C.ptr[C.nrows]);

    // Numeric pass with a dense row accumulator.
    std::fill(marker.begin(), marker.end(), -1);
    std::vector<V> acc(B.ncols, value_traits<V>::zero());
    for (index i = 0; i < A.nrows; ++i) {
        index row_beg = C.ptr[i];
        index row_end = row_beg;
        for (index ja = A.ptr[i]; ja < A.ptr[i + 1]; ++ja) {
            index k = A.col[ja];
            const V &av = A.val[ja];
            for (index jb = B.ptr[k]; jb < B.ptr[k + 1]; ++jb) {
                index c = B.col[jb];
                if (marker[c] < row_beg) {
                    marker[c] = row_end;
                    C.col[row_end] = c;
                    acc[c] = av * B.val[jb];
                    ++row_end;
                } else {
                    acc[c] += av * B.val[jb];
                }
            }
        }
        std::sort(C.col.begin() + row_beg, C.col.begin() + row_end);
        for (index j = row_beg; j < row_end; ++j) C.val[j] = acc[C.col[j]];
    }
    return C;
}

// Galerkin product R*A*P, evaluated left to right so different pipelines
// produce comparable summation orders.
template <class V>
csr<V> galerkin(const csr<V> &R, const csr<V> &A, const csr<V> &P) {
    return spgemm(spgemm(R, A), P);
}

// --- block/scalar adapters --------------------------------------------------

// Group scalar entries into b-by-b tiles; a tile with at least one scalar
// nonzero becomes a block, absent positions zero-filled.
template <int B>
csr<static_block<B>> to_block(const scalar_csr &A) {
    if (A.nrows % B || A.ncols % B)
        throw not_divisible("to_block: matrix dimensions not divisible by block size");

    csr<static_block<B>> R;
    R.nrows = A.nrows / B;
    R.ncols = A.ncols / B;
    R.ptr.assign(R.nrows + 1, 0);

    std::vector<index> marker(R.ncols, -1);

    for (index bi = 0; bi < R.nrows; ++bi) {
        index count = 0;
        for (int r = 0; r < B; ++r) {
            index i = bi * B + r;
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                index bc = A.col[j] / B;
                if (marker[bc] != bi) {
                    marker[bc] = bi;
                    ++count;
                }
            }
        }
        R.ptr[bi + 1] = count;
    }
    for (index i = 0; i < R.nrows; ++i) R.ptr[i + 1] += R.ptr[i];
    R.col.resize(R.ptr[R.nrows]);
    R.val.resize(R.ptr[R.nrows], static_block<B>::zero());

    std::vector<index> pos(R.ncols);
    std::fill(marker.begin(), marker.end(), -1);
    for (index bi = 0; bi < R.nrows; ++bi) {
        index row_beg = R.ptr[bi];
        index row_end = row_beg;
        for (int r = 0; r < B; ++r) {
            index i = bi * B + r;
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                index bc = A.col[j] / B;
                if (marker[bc] != bi) {
                    marker[bc] = bi;
                    R.col[row_end++] = bc;
                }
            }
        }
        std::sort(R.col.begin() + row_beg, R.col.begin() + row_end);
        for (index j = row_beg; j < row_end; ++j) pos[R.col[j]] = j;
        for (int r = 0; r < B; ++r) {
            index i = bi * B + r;
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                index bc = A.col[j] / B;
                R.val[pos[bc]](r, static_cast<int>(A.col[j] % B)) = A.val[j];
            }
        }
    }
    return R;
}

// Expand every block into its full b*b scalar entries (explicit zeros kept).
template <int B>
scalar_csr to_scalar(const csr<static_block<B>> &A) {
    scalar_csr R;
    R.nrows = A.nrows * B;
    R.ncols = A.ncols * B;
    R.ptr.resize(R.nrows + 1);
    R.ptr[0] = 0;
    R.col.resize(A.nnz() * B * B);
    R.val.resize(A.nnz() * B * B);

    index out = 0;
    for (index bi = 0; bi < A.nrows; ++bi) {
        for (int r = 0; r < B; ++r) {
            for (index j = A.ptr[bi]; j < A.ptr[bi + 1]; ++j) {
                const static_block<B> &blk = A.val[j];
                index cbase = A.col[j] * B;
                for (int c = 0; c < B; ++c) {
                    R.col[out] = cbase + c;
                    R.val[out] = blk(r, c);
                    ++out;
                }
            }
            R.ptr[bi * B + r + 1] = out;
        }
    }
    return R;
}

inline scalar_csr to_scalar(const scalar_csr &A) { return A; }

// --- memory accounting ------------------------------------------------------

// Deterministic accounting: 8-byte indices, 8-byte reals.
template <class V>
std::size_t matrix_bytes(const csr<V> &A) {
    constexpr std::size_t index_bytes = 8;
    constexpr std::size_t value_bytes = sizeof(double) * csr<V>::block_size * csr<V>::block_size;
    return (A.nrows + 1) * index_bytes + A.nnz() * index_bytes + A.nnz() * value_bytes;
}

// --- dense helpers (coarsest-level solver, diagnostics) ---------------------

// Row-major dense copy in scalar units.
template <class V>
std::vector<double> to_dense(const csr<V> &A) {
    constexpr int b = csr<V>::block_size;
    const index n = A.scalar_rows(), m = A.scalar_cols();
    std::vector<double> D(static_cast<std::size_t>(n) * m, 0.0);
    for (index i = 0; i < A.nrows; ++i)
        for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j)
            for (int r = 0; r < b; ++r)
                for (int c = 0; c < b; ++c)
                    D[(i * b + r) * m + A.col[j] * b + c] =
                        value_traits<V>::get(A.val[j], r, c);
    return D;
}

template <class V>
double frobenius_norm(const csr<V> &A) {
    double s = 0;
    for (const V &v : A.val) {
        double nv = value_traits<V>::norm(v);
        s += nv * nv;
    }
    return std::sqrt(s);
}

} // namespace samg

#endif
