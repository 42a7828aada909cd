#ifndef SAMG_COARSENING_HPP
#define SAMG_COARSENING_HPP

/*
 * Smoothed-aggregation transfer operator construction.
 *
 * Nodes are groups of point_block_size consecutive scalar rows (or single
 * block rows for block matrices). The strength graph keeps edge (i,j) iff
 * w_ij^2 > eps^2 * w_ii * w_jj, where w is the absolute value for scalars,
 * the Frobenius norm for blocks, and the max scalar magnitude over the
 * tile for point blocks. Aggregation is the deterministic greedy
 * three-pass scheme; the tentative prolongation orthonormalizes the
 * nullspace basis per aggregate with a local QR.
 */

#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "csr.hpp"

namespace samg {

struct coarsening_params {
    double eps_strong = 0.08;        // strength-of-connection threshold
    double omega = 2.0 / 3.0;        // prolongation damping
    int point_block_size = 1;        // node condensation width for scalar matrices
    std::optional<dense_columns> nullspace;
};

// Node-level adjacency (CSR-like, symmetric).
struct adjacency {
    index nnodes = 0;
    std::vector<index> ptr{0};
    std::vector<index> col;
};

constexpr index UNASSIGNED = -1;

struct aggregates {
    std::vector<index> id;  // per-node aggregate index
    index count = 0;
    int block_size = 1;     // scalar rows per node
};

namespace detail {

// Condensed node-level weights: for each node row, map from node column
// to the scalar magnitude used by the strength test.
template <class V>
std::vector<std::map<index, double>> condense_weights(const csr<V> &A, int pbs) {
    constexpr int b = csr<V>::block_size;
    static_assert(true);
    if constexpr (b > 1) {
        (void)pbs;
        std::vector<std::map<index, double>> w(A.nrows);
        for (index i = 0; i < A.nrows; ++i)
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j)
                w[i][A.col[j]] = fnorm(A.val[j]);
        return w;
    } else {
        const index nnodes = A.nrows / pbs;
        std::vector<std::map<index, double>> w(nnodes);
        for (index i = 0; i < A.nrows; ++i) {
            index ni = i / pbs;
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                index nj = A.col[j] / pbs;
                double m = std::abs(A.val[j]);
                auto [it, inserted] = w[ni].emplace(nj, m);
                if (!inserted && m > it->second) it->second = m;
            }
        }
        return w;
    }
}

} // namespace detail

template <class V>
adjacency strength_graph(const csr<V> &A, double eps_strong, int point_block_size) {
    constexpr int b = csr<V>::block_size;
    if (A.nrows != A.ncols)
        throw non_square("strength_graph: matrix must be square");
    if constexpr (b == 1) {
        if (A.nrows % point_block_size)
            throw not_divisible("strength_graph: rows not divisible by point block size");
    }

    auto w = detail::condense_weights(A, point_block_size);
    const index n = static_cast<index>(w.size());
    const double eps2 = eps_strong * eps_strong;

    std::vector<double> diag(n, 0.0);
    for (index i = 0; i < n; ++i) {
        auto it = w[i].find(i);
        if (it != w[i].end()) diag[i] = it->second;
    }

    std::vector<std::vector<index>> edges(n);
    for (index i = 0; i < n; ++i)
        for (auto &[j, wij] : w[i]) {
            if (j == i) continue;
            if (wij * wij > eps2 * diag[i] * diag[j]) {
                edges[i].push_back(j);
                edges[j].push_back(i); // symmetrize by union
            }
        }

    adjacency G;
    G.nnodes = n;
    G.ptr.assign(n + 1, 0);
    for (index i = 0; i < n; ++i) {
        auto &e = edges[i];
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        G.ptr[i + 1] = G.ptr[i] + static_cast<index>(e.size());
    }
    G.col.reserve(G.ptr[n]);
    for (auto &e : edges) G.col.insert(G.col.end(), e.begin(), e.end());
    return G;
}

// Deterministic greedy aggregation:
//  pass 1: a node whose strong neighbors are all unassigned seeds a new
//          aggregate containing itself and those neighbors;
//  pass 2: remaining nodes join the aggregate of their lowest-indexed
//          assigned strong neighbor;
//  pass 3: leftovers (isolated nodes) become singletons.
inline aggregates aggregate(const adjacency &G) {
    aggregates agg;
    agg.id.assign(G.nnodes, UNASSIGNED);
    agg.count = 0;

    for (index i = 0; i < G.nnodes; ++i) {
        if (agg.id[i] != UNASSIGNED) continue;
        bool all_free = true;
        for (index j = G.ptr[i]; j < G.ptr[i + 1]; ++j)
            if (agg.id[G.col[j]] != UNASSIGNED) { all_free = false; break; }
        if (!all_free) continue;
        index a = agg.count++;
        agg.id[i] = a;
        for (index j = G.ptr[i]; j < G.ptr[i + 1]; ++j)
            agg.id[G.col[j]] = a;
    }

    for (index i = 0; i < G.nnodes; ++i) {
        if (agg.id[i] != UNASSIGNED) continue;
        for (index j = G.ptr[i]; j < G.ptr[i + 1]; ++j) {
            index nb = G.col[j];
            if (agg.id[nb] != UNASSIGNED) { agg.id[i] = agg.id[nb]; break; }
        }
    }

    for (index i = 0; i < G.nnodes; ++i)
        if (agg.id[i] == UNASSIGNED) agg.id[i] = agg.count++;

    return agg;
}

namespace detail {

// Thin Householder QR of a column-major m-by-k matrix (m may be < k).
// On return Q is m-by-k with orthonormal (or zeroed, when rank deficient)
// columns and R is k-by-k upper triangular.
inline void thin_qr(index m, index k, std::vector<double> &A,
        std::vector<double> &Q, std::vector<double> &R, double drop_tol)
{
    auto a = [&](index i, index j) -> double& { return A[j * m + i]; };

    double local_max = 0;
    for (double v : A) local_max = std::max(local_max, std::abs(v));
    const double tol = 1e-12 * std::max(local_max, 1.0);

    std::vector<double> tau(k, 0.0);
    const index steps = std::min(m, k);

    for (index j = 0; j < steps; ++j) {
        // Householder vector for column j below row j.
        double normx = 0;
        for (index i = j; i < m; ++i) normx += a(i, j) * a(i, j);
        normx = std::sqrt(normx);
        if (normx <= tol) { tau[j] = 0; continue; }
        double alpha = a(j, j) >= 0 ? -normx : normx;
        double v0 = a(j, j) - alpha;
        // Store v in-place (v0 separately through scaling).
        for (index i = j + 1; i < m; ++i) a(i, j) /= v0;
        tau[j] = -v0 / alpha;
        a(j, j) = alpha;
        // Apply to trailing columns.
        for (index c = j + 1; c < k; ++c) {
            double s = a(j, c);
            for (index i = j + 1; i < m; ++i) s += a(i, j) * a(i, c);
            s *= tau[j];
            a(j, c) -= s;
            for (index i = j + 1; i < m; ++i) a(i, c) -= s * a(i, j);
        }
    }

    R.assign(static_cast<std::size_t>(k) * k, 0.0);
    for (index j = 0; j < k; ++j)
        for (index i = 0; i <= std::min(j, m - 1); ++i)
            R[j * k + i] = a(i, j);

    // Accumulate Q = H_0 ... H_{s-1} * [I_k; 0].
    Q.assign(static_cast<std::size_t>(m) * k, 0.0);
    for (index j = 0; j < std::min(m, k); ++j) Q[j * m + j] = 1.0;
    for (index j = steps - 1; j >= 0; --j) {
        if (tau[j] == 0) continue;
        for (index c = 0; c < k; ++c) {
            double s = Q[c * m + j];
            for (index i = j + 1; i < m; ++i) s += a(i, j) * Q[c * m + i];
            s *= tau[j];
            Q[c * m + j] -= s;
            for (index i = j + 1; i < m; ++i) Q[c * m + i] -= s * a(i, j);
        }
    }

    // Rank-deficient aggregate: zero deficient trailing columns of Q and
    // the corresponding rows of R, keeping k fixed.
    for (index j = 0; j < k; ++j) {
        double rjj = (j < m) ? std::abs(R[j * k + j]) : 0.0;
        if (rjj <= drop_tol * std::max(local_max, 1e-300)) {
            for (index i = 0; i < m; ++i) Q[j * m + i] = 0.0;
            for (index c = 0; c < k; ++c) R[c * k + j] = 0.0;
        }
    }
}

} // namespace detail

// Tentative prolongation. With a nullspace basis B (k columns) the rows of
// B belonging to each aggregate are orthonormalized by a thin QR: Q fills
// the aggregate's rows of P_tent, R fills its k rows of B_coarse. Without
// B the result is the unit-normalized aggregate indicator, expanded per
// point-block component so coarse points keep point_block_size unknowns.
inline std::tuple<scalar_csr, std::optional<dense_columns>>
tentative_prolongation(const aggregates &agg,
        const std::optional<dense_columns> &B, int point_block_size)
{
    const index nnodes = static_cast<index>(agg.id.size());
    const int pbs = point_block_size;
    const index nfine = nnodes * pbs;

    scalar_csr P;
    P.nrows = nfine;

    if (!B) {
        std::vector<index> node_count(agg.count, 0);
        for (index n = 0; n < nnodes; ++n) node_count[agg.id[n]]++;

        P.ncols = agg.count * pbs;
        P.ptr.resize(nfine + 1);
        P.col.resize(nfine);
        P.val.resize(nfine);
        for (index n = 0; n < nnodes; ++n) {
            const double v = 1.0 / std::sqrt(static_cast<double>(node_count[agg.id[n]]));
            for (int c = 0; c < pbs; ++c) {
                index i = n * pbs + c;
                P.ptr[i + 1] = i + 1;
                P.col[i] = agg.id[n] * pbs + c;
                P.val[i] = v;
            }
        }
        return {std::move(P), std::nullopt};
    }

    if (B->nrows != nfine)
        throw bad_nullspace_shape("tentative_prolongation: nullspace rows do not match level size");

    const index k = B->ncols;

    // Collect member scalar rows per aggregate, ascending.
    std::vector<std::vector<index>> members(agg.count);
    for (index n = 0; n < nnodes; ++n)
        for (int c = 0; c < pbs; ++c)
            members[agg.id[n]].push_back(n * pbs + c);

    P.ncols = agg.count * k;
    P.ptr.assign(nfine + 1, 0);
    for (index i = 0; i < nfine; ++i) P.ptr[i + 1] = P.ptr[i] + k;
    P.col.resize(P.ptr[nfine]);
    P.val.resize(P.ptr[nfine]);

    dense_columns Bc(agg.count * k, k);

    std::vector<double> local, Q, R;
    for (index a = 0; a < agg.count; ++a) {
        const auto &rows = members[a];
        const index m = static_cast<index>(rows.size());
        local.assign(static_cast<std::size_t>(m) * k, 0.0);
        for (index c = 0; c < k; ++c)
            for (index r = 0; r < m; ++r)
                local[c * m + r] = (*B)(rows[r], c);

        detail::thin_qr(m, k, local, Q, R, 1e-12);

        for (index r = 0; r < m; ++r) {
            index base = P.ptr[rows[r]];
            for (index c = 0; c < k; ++c) {
                P.col[base + c] = a * k + c;
                P.val[base + c] = Q[c * m + r];
            }
        }
        for (index i = 0; i < k; ++i)
            for (index c = 0; c < k; ++c)
                Bc(a * k + i, c) = R[c * k + i];
    }

    return {std::move(P), std::move(Bc)};
}

// Filtered smoothing P = (I - omega * D_f^-1 * A_f) * P_tent, where A_f
// keeps entries whose node tile passed the strength test (diagonal tiles
// always kept) and lumps removed off-diagonals into the diagonal.
// Generic over the value type so the Block pipeline can smooth with block
// diagonal inverses.
template <class V>
csr<V> smooth_prolongation(const csr<V> &A, const csr<V> &P_tent,
        const adjacency &G, double omega, int point_block_size)
{
    constexpr int b = csr<V>::block_size;
    const int pbs = (b > 1) ? 1 : point_block_size;

    if (omega == 0.0) return P_tent;

    // Strong-neighbor lookup at node level.
    std::vector<index> marker(G.nnodes, -1);

    const index n = A.nrows;
    std::vector<V> diag(n, value_traits<V>::zero());
    std::vector<char> keep(A.nnz(), 0);

    for (index node = 0; node < G.nnodes; ++node) {
        for (index j = G.ptr[node]; j < G.ptr[node + 1]; ++j) marker[G.col[j]] = node;
        for (int r = 0; r < pbs; ++r) {
            index i = node * pbs + r;
            for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                index cnode = A.col[j] / pbs;
                if (cnode == node) {
                    keep[j] = 1;
                    if (A.col[j] == i) diag[i] += A.val[j];
                } else if (marker[cnode] == node) {
                    keep[j] = 1;
                } else {
                    diag[i] += A.val[j]; // lump removed entry into diagonal
                }
            }
        }
    }

    std::vector<V> inv_diag(n);
    for (index i = 0; i < n; ++i) {
        if (value_traits<V>::is_zero(diag[i]))
            throw zero_diagonal("smooth_prolongation: zero filtered diagonal");
        inv_diag[i] = value_traits<V>::inverse(diag[i]);
    }

    // P = P_tent - omega * D^-1 * (A_f * P_tent), with the filtered
    // diagonal substituted for a_ii.
    csr<V> P;
    P.nrows = A.nrows;
    P.ncols = P_tent.ncols;
    P.ptr.assign(P.nrows + 1, 0);

    std::vector<index> cmark(P.ncols, -1);
    for (index i = 0; i < A.nrows; ++i) {
        index count = 0;
        for (index j = P_tent.ptr[i]; j < P_tent.ptr[i + 1]; ++j) {
            if (cmark[P_tent.col[j]] != i) { cmark[P_tent.col[j]] = i; ++count; }
        }
        for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
            if (!keep[j]) continue;
            index k = A.col[j];
            for (index l = P_tent.ptr[k]; l < P_tent.ptr[k + 1]; ++l)
                if (cmark[P_tent.col[l]] != i) { cmark[P_tent.col[l]] = i; ++count; }
        }
        P.ptr[i + 1] = count;
    }
    for (index i = 0; i < P.nrows; ++i) P.ptr[i + 1] += P.ptr[i];
    P.col.resize(P.ptr[P.nrows]);
    P.val.resize(P.ptr[P.nrows]);

    std::fill(cmark.begin(), cmark.end(), -1);
    std::vector<V> acc(P.ncols, value_traits<V>::zero());
    for (index i = 0; i < A.nrows; ++i) {
        index row_beg = P.ptr[i], row_end = row_beg;
        for (index j = P_tent.ptr[i]; j < P_tent.ptr[i + 1]; ++j) {
            index c = P_tent.col[j];
            cmark[c] = row_end;
            P.col[row_end++] = c;
            acc[c] = P_tent.val[j];
        }
        for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
            if (!keep[j]) continue;
            index k = A.col[j];
            V coef = (k == i) ? diag[i] : A.val[j];
            V scaled = inv_diag[i] * coef;
            scaled *= -omega;
            for (index l = P_tent.ptr[k]; l < P_tent.ptr[k + 1]; ++l) {
                index c = P_tent.col[l];
                if (cmark[c] < row_beg) { // unseen in this row
                    cmark[c] = row_end;
                    P.col[row_end++] = c;
                    acc[c] = scaled * P_tent.val[l];
                } else {
                    acc[c] += scaled * P_tent.val[l];
                }
            }
        }
        std::sort(P.col.begin() + row_beg, P.col.begin() + row_end);
        for (index j = row_beg; j < row_end; ++j) P.val[j] = acc[P.col[j]];
    }
    return P;
}

struct transfer_result {
    scalar_csr P, R;
    std::optional<dense_columns> B_coarse;
};

// Full scalar transfer pipeline: strength graph, aggregation, tentative
// prolongation, prolongation smoothing, R = P^T.
inline transfer_result transfer_operators(const scalar_csr &A, const coarsening_params &prm) {
    if (A.nrows != A.ncols)
        throw non_square("transfer_operators: matrix must be square");

    adjacency G = strength_graph(A, prm.eps_strong, prm.point_block_size);
    aggregates agg = aggregate(G);
    agg.block_size = prm.point_block_size;

    auto [P_tent, Bc] = tentative_prolongation(agg, prm.nullspace, prm.point_block_size);
    scalar_csr P = smooth_prolongation(A, P_tent, G, prm.omega, prm.point_block_size);

    transfer_result r;
    r.R = transpose(P);
    r.P = std::move(P);
    r.B_coarse = std::move(Bc);
    return r;
}

template <int B>
struct block_transfer_result {
    csr<static_block<B>> P, R;
    std::optional<dense_columns> B_coarse;
};

// Coarsening wrapper for block matrices: unblock the level matrix, run
// the scalar transfer pipeline, re-block the computed operators.
template <int B>
block_transfer_result<B> as_scalar_transfer(const csr<static_block<B>> &A,
        const coarsening_params &prm)
{
    scalar_csr As = to_scalar(A);
    transfer_result t = transfer_operators(As, prm);
    if (t.P.ncols % B)
        throw not_divisible("as_scalar_transfer: coarse dimension not divisible by block size");
    block_transfer_result<B> r;
    r.P = to_block<B>(t.P);
    r.R = to_block<B>(t.R);
    r.B_coarse = std::move(t.B_coarse);
    return r;
}

// Plain-aggregation transfers fully in block space (no nullspace): block
// strength graph via Frobenius norms, indicator tentative operator with
// identity blocks, smoothing with block diagonal inverses.
template <int B>
block_transfer_result<B> block_transfer_operators(const csr<static_block<B>> &A,
        const coarsening_params &prm)
{
    if (A.nrows != A.ncols)
        throw non_square("block_transfer_operators: matrix must be square");

    adjacency G = strength_graph(A, prm.eps_strong, 1);
    aggregates agg = aggregate(G);

    std::vector<index> node_count(agg.count, 0);
    for (index id : agg.id) node_count[id]++;

    csr<static_block<B>> P_tent;
    P_tent.nrows = A.nrows;
    P_tent.ncols = agg.count;
    P_tent.ptr.resize(A.nrows + 1);
    P_tent.col.resize(A.nrows);
    P_tent.val.resize(A.nrows);
    P_tent.ptr[0] = 0;
    for (index i = 0; i < A.nrows; ++i) {
        P_tent.ptr[i + 1] = i + 1;
        P_tent.col[i] = agg.id[i];
        P_tent.val[i] = (1.0 / std::sqrt(static_cast<double>(node_count[agg.id[i]])))
                        * static_block<B>::identity();
    }

    block_transfer_result<B> r;
    csr<static_block<B>> P = smooth_prolongation(A, P_tent, G, prm.omega, 1);
    r.R = transpose(P);
    r.P = std::move(P);
    return r;
}

} // namespace samg

#endif
