#ifndef SAMG_STATIC_BLOCK_HPP
#define SAMG_STATIC_BLOCK_HPP

/*
 * Statically sized square dense blocks used as sparse-matrix value types.
 * A static_block<1> behaves exactly like a plain double; larger blocks
 * provide the ring operations plus transpose, Frobenius norm, and dense
 * LU-based inversion needed by block ILU(0) pivots.
 */

#include <array>
#include <cmath>
#include <ostream>

#include "common.hpp"

namespace samg {

template <int B>
struct static_block {
    static_assert(B == 1 || B == 2 || B == 3 || B == 6,
            "supported block dimensions are 1, 2, 3, 6");

    std::array<double, B * B> m;

    static constexpr int dim = B;

    double& operator()(int i, int j) { return m[i * B + j]; }
    const double& operator()(int i, int j) const { return m[i * B + j]; }

    static static_block zero() {
        static_block r;
        r.m.fill(0.0);
        return r;
    }

    static static_block identity() {
        static_block r = zero();
        for (int i = 0; i < B; ++i) r(i, i) = 1.0;
        return r;
    }

    static_block& operator+=(const static_block &o) {
        for (int i = 0; i < B * B; ++i) m[i] += o.m[i];
        return *this;
    }

    static_block& operator-=(const static_block &o) {
        for (int i = 0; i < B * B; ++i) m[i] -= o.m[i];
        return *this;
    }

    static_block& operator*=(double a) {
        for (int i = 0; i < B * B; ++i) m[i] *= a;
        return *this;
    }

    friend static_block operator+(static_block a, const static_block &b) { return a += b; }
    friend static_block operator-(static_block a, const static_block &b) { return a -= b; }
    friend static_block operator*(double a, static_block b) { return b *= a; }

    friend static_block operator-(const static_block &a) {
        static_block r;
        for (int i = 0; i < B * B; ++i) r.m[i] = -a.m[i];
        return r;
    }

    friend static_block operator*(const static_block &a, const static_block &b) {
        static_block r = zero();
        for (int i = 0; i < B; ++i)
            for (int k = 0; k < B; ++k) {
                const double aik = a(i, k);
                for (int j = 0; j < B; ++j)
                    r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend bool operator==(const static_block &a, const static_block &b) {
        return a.m == b.m;
    }

    bool is_zero() const {
        for (double v : m) if (v != 0.0) return false;
        return true;
    }

    friend std::ostream& operator<<(std::ostream &os, const static_block &a) {
        os << "[";
        for (int i = 0; i < B; ++i) {
            if (i) os << "; ";
            for (int j = 0; j < B; ++j) {
                if (j) os << ", ";
                os << a(i, j);
            }
        }
        return os << "]";
    }
};

template <int B>
inline static_block<B> transp(const static_block<B> &a) {
    static_block<B> r;
    for (int i = 0; i < B; ++i)
        for (int j = 0; j < B; ++j)
            r(j, i) = a(i, j);
    return r;
}

template <int B>
inline double fnorm(const static_block<B> &a) {
    double s = 0;
    for (double v : a.m) s += v * v;
    return std::sqrt(s);
}

// Dense LU with partial pivoting; throws singular_block when a pivot
// magnitude falls below 1e-300 after row exchange.
template <int B>
inline static_block<B> inverse(const static_block<B> &a) {
    static_block<B> lu = a;
    static_block<B> inv = static_block<B>::identity();
    std::array<int, B> piv;

    for (int k = 0; k < B; ++k) {
        int p = k;
        for (int i = k + 1; i < B; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
        piv[k] = p;
        if (p != k)
            for (int j = 0; j < B; ++j) std::swap(lu(k, j), lu(p, j));
        if (std::abs(lu(k, k)) < 1e-300)
            throw singular_block("singular pivot in block inversion");
        const double d = 1.0 / lu(k, k);
        for (int i = k + 1; i < B; ++i) {
            const double l = lu(i, k) * d;
            lu(i, k) = l;
            for (int j = k + 1; j < B; ++j) lu(i, j) -= l * lu(k, j);
        }
    }

    // Solve lu * X = P * I column by column.
    for (int c = 0; c < B; ++c) {
        std::array<double, B> x{};
        x.fill(0.0);
        x[c] = 1.0;
        for (int k = 0; k < B; ++k)
            if (piv[k] != k) std::swap(x[k], x[piv[k]]);
        for (int i = 1; i < B; ++i)
            for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
        for (int i = B - 1; i >= 0; --i) {
            for (int j = i + 1; j < B; ++j) x[i] -= lu(i, j) * x[j];
            x[i] /= lu(i, i);
        }
        for (int i = 0; i < B; ++i) inv(i, c) = x[i];
    }
    return inv;
}

// Value-type traits shared by all generic kernels: plain double and
// static_block satisfy the same interface.
template <class V> struct value_traits;

template <> struct value_traits<double> {
    static constexpr int block_size = 1;
    static double zero() { return 0.0; }
    static double identity() { return 1.0; }
    static double norm(double v) { return std::abs(v); }
    static double transpose(double v) { return v; }
    static double inverse(double v) {
        if (std::abs(v) < 1e-300) throw singular_block("singular scalar pivot");
        return 1.0 / v;
    }
    static double get(double v, int, int) { return v; }
    static void set(double &v, int, int, double x) { v = x; }
    static bool is_zero(double v) { return v == 0.0; }
};

template <int B> struct value_traits<static_block<B>> {
    static constexpr int block_size = B;
    static static_block<B> zero() { return static_block<B>::zero(); }
    static static_block<B> identity() { return static_block<B>::identity(); }
    static double norm(const static_block<B> &v) { return fnorm(v); }
    static static_block<B> transpose(const static_block<B> &v) { return transp(v); }
    static static_block<B> inverse(const static_block<B> &v) { return samg::inverse(v); }
    static double get(const static_block<B> &v, int i, int j) { return v(i, j); }
    static void set(static_block<B> &v, int i, int j, double x) { v(i, j) = x; }
    static bool is_zero(const static_block<B> &v) { return v.is_zero(); }
};

} // namespace samg

#endif
