#ifndef SAMG_BENCH_HPP
#define SAMG_BENCH_HPP

/*
 * Benchmark harness: runs a selection of the six solver variants on one
 * problem and emits one report row per variant (markdown, CSV or JSON).
 * Timings use a monotonic clock, median over the configured repeat count.
 */

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cg.hpp"
#include "elasticity.hpp"
#include "hierarchy.hpp"

namespace samg {

enum class report_format { markdown, csv, json };

struct bench_config {
    std::vector<pipeline> solvers;
    cg_params cg;
    amg_params amg;
    int repeat = 3;
    report_format format = report_format::markdown;
};

struct bench_row {
    pipeline variant = pipeline::scalar;
    bool ok = false;          // solve ran and converged
    std::string error;        // nonempty when the variant failed outright
    solve_report report;
};

inline std::vector<pipeline> all_pipelines() {
    return { pipeline::scalar, pipeline::block, pipeline::ns_scalar,
             pipeline::ns_hybrid1, pipeline::ns_hybrid2, pipeline::ns_block };
}

inline std::optional<pipeline> parse_pipeline(const std::string &s) {
    for (pipeline p : all_pipelines())
        if (s == pipeline_name(p)) return p;
    return std::nullopt;
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// Run one variant: build the hierarchy and solve, repeat times; report
// medians for the timings.
inline bench_row run_variant(pipeline variant, const scalar_csr &A,
        const std::optional<dense_columns> &B, std::span<const double> rhs,
        const bench_config &cfg)
{
    using clock = std::chrono::steady_clock;
    bench_row row;
    row.variant = variant;

    try {
        std::vector<double> setup_times, solve_times;
        std::vector<double> u(A.nrows);
        solve_report rep;
        for (int r = 0; r < std::max(1, cfg.repeat); ++r) {
            auto t0 = clock::now();
            hierarchy H = setup(A, B, variant, cfg.amg);
            auto t1 = clock::now();
            rep = cg_solve(H, rhs, u, cfg.cg);
            auto t2 = clock::now();
            setup_times.push_back(std::chrono::duration<double>(t1 - t0).count());
            solve_times.push_back(std::chrono::duration<double>(t2 - t1).count());
        }
        rep.setup_seconds = median_of(setup_times);
        rep.solve_seconds = median_of(solve_times);
        row.report = rep;
        row.ok = rep.converged;
        if (!rep.converged) row.error = "did not converge";
    } catch (const std::exception &e) {
        row.error = e.what();
    }
    return row;
}

inline std::vector<bench_row> run_benchmark(const scalar_csr &A,
        const std::optional<dense_columns> &B, std::span<const double> rhs,
        const bench_config &cfg)
{
    std::vector<bench_row> rows;
    for (pipeline p : cfg.solvers) {
        const bool needs_ns = (p != pipeline::scalar && p != pipeline::block);
        if (needs_ns && !B) {
            bench_row row;
            row.variant = p;
            row.error = "variant requires node coordinates";
            rows.push_back(row);
            continue;
        }
        rows.push_back(run_variant(p, A, needs_ns ? B : std::nullopt, rhs, cfg));
    }
    return rows;
}

inline double mib(std::size_t bytes) {
    return static_cast<double>(bytes) / (1024.0 * 1024.0);
}

inline void print_report(std::ostream &os, const std::vector<bench_row> &rows,
        report_format fmt)
{
    auto num = [](double v, int prec) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(prec) << v;
        return ss.str();
    };

    switch (fmt) {
    case report_format::markdown:
        os << "| Solver | Setup (s) | Solve (s) | Total (s) | Iterations | Memory (M) |\n";
        os << "|---|---|---|---|---|---|\n";
        for (const auto &r : rows) {
            os << "| " << pipeline_name(r.variant) << " | ";
            if (!r.error.empty() && !r.ok && r.report.iterations == 0 && r.report.preconditioner_bytes == 0) {
                os << "failed: " << r.error << " | | | | |\n";
                continue;
            }
            os << num(r.report.setup_seconds, 3) << " | "
               << num(r.report.solve_seconds, 3) << " | "
               << num(r.report.setup_seconds + r.report.solve_seconds, 3) << " | "
               << r.report.iterations << " | "
               << num(mib(r.report.preconditioner_bytes), 2) << " |\n";
        }
        break;
    case report_format::csv:
        os << "solver,setup_s,solve_s,total_s,iterations,memory_mib,converged,error\n";
        for (const auto &r : rows) {
            os << pipeline_name(r.variant) << ","
               << num(r.report.setup_seconds, 6) << ","
               << num(r.report.solve_seconds, 6) << ","
               << num(r.report.setup_seconds + r.report.solve_seconds, 6) << ","
               << r.report.iterations << ","
               << num(mib(r.report.preconditioner_bytes), 2) << ","
               << (r.ok ? "true" : "false") << ","
               << r.error << "\n";
        }
        break;
    case report_format::json:
        os << "[\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto &r = rows[i];
            os << "  {\"solver\": \"" << pipeline_name(r.variant) << "\""
               << ", \"setup_s\": " << num(r.report.setup_seconds, 6)
               << ", \"solve_s\": " << num(r.report.solve_seconds, 6)
               << ", \"total_s\": " << num(r.report.setup_seconds + r.report.solve_seconds, 6)
               << ", \"iterations\": " << r.report.iterations
               << ", \"memory_mib\": " << num(mib(r.report.preconditioner_bytes), 2)
               << ", \"relative_residual\": " << r.report.relative_residual
               << ", \"converged\": " << (r.ok ? "true" : "false")
               << ", \"error\": \"" << r.error << "\"}"
               << (i + 1 < rows.size() ? "," : "") << "\n";
        }
        os << "]\n";
        break;
    }
}

// --- matrix structure report ------------------------------------------------

struct structure_info {
    index nrows = 0;
    index nnz = 0;
    bool symmetric = false;
    int block_size = 1;       // largest of {6, 3, 2} with dense diagonal tiles
    index nblocks = 0;        // block nnz at the detected size
    double fill_ratio = 1.0;  // scalar nnz / (block nnz * b^2)
};

inline structure_info analyze_structure(const scalar_csr &A) {
    structure_info info;
    info.nrows = A.nrows;
    info.nnz = A.nnz();

    {
        scalar_csr T = transpose(A);
        double diff = 0, ref = frobenius_norm(A);
        // Symmetry check through the dense-free route: |A - A^T|_F.
        // Patterns may differ, so run a merged comparison per row.
        for (index i = 0; i < A.nrows; ++i) {
            index ja = A.ptr[i], jt = T.ptr[i];
            while (ja < A.ptr[i + 1] || jt < T.ptr[i + 1]) {
                index ca = ja < A.ptr[i + 1] ? A.col[ja] : A.ncols;
                index ct = jt < T.ptr[i + 1] ? T.col[jt] : T.ncols;
                double d;
                if (ca == ct) { d = A.val[ja] - T.val[jt]; ++ja; ++jt; }
                else if (ca < ct) { d = A.val[ja]; ++ja; }
                else { d = T.val[jt]; ++jt; }
                diff += d * d;
            }
        }
        info.symmetric = std::sqrt(diff) <= 1e-12 * std::max(ref, 1e-300);
    }

    // Dirichlet rows eliminated to a bare unit diagonal would break a
    // strict dense-tile test; they are compatible with any blocking.
    std::vector<char> dirichlet(A.nrows, 0);
    for (index i = 0; i < A.nrows; ++i)
        if (A.ptr[i + 1] - A.ptr[i] == 1 && A.col[A.ptr[i]] == i)
            dirichlet[i] = 1;

    auto dense_diagonal_tiles = [&](int b) {
        if (A.nrows % b || A.ncols % b) return false;
        std::vector<int> seen(static_cast<std::size_t>(b) * b);
        for (index bi = 0; bi < A.nrows / b; ++bi) {
            std::fill(seen.begin(), seen.end(), 0);
            for (int r = 0; r < b; ++r) {
                index i = bi * b + r;
                for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                    index c = A.col[j] - bi * b;
                    if (c >= 0 && c < b) seen[r * b + c] = 1;
                }
            }
            for (int r = 0; r < b; ++r)
                for (int c = 0; c < b; ++c) {
                    if (seen[r * b + c]) continue;
                    if (dirichlet[bi * b + r] || dirichlet[bi * b + c]) continue;
                    return false;
                }
        }
        return true;
    };

    for (int b : {6, 3, 2}) {
        if (dense_diagonal_tiles(b)) {
            info.block_size = b;
            break;
        }
    }

    if (info.block_size > 1) {
        const int b = info.block_size;
        // Count distinct tiles per block row.
        std::vector<index> marker(A.ncols / b, -1);
        index nblocks = 0;
        for (index bi = 0; bi < A.nrows / b; ++bi)
            for (int r = 0; r < b; ++r) {
                index i = bi * b + r;
                for (index j = A.ptr[i]; j < A.ptr[i + 1]; ++j) {
                    index bc = A.col[j] / b;
                    if (marker[bc] != bi) {
                        marker[bc] = bi;
                        ++nblocks;
                    }
                }
            }
        info.nblocks = nblocks;
        info.fill_ratio = static_cast<double>(A.nnz()) /
                (static_cast<double>(nblocks) * b * b);
    } else {
        info.nblocks = A.nnz();
    }

    return info;
}

} // namespace samg

#endif
