// Compiled with -mavx2 -mfma; only reached after the runtime CPU check.

#include "samg/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace samg::kernels::detail {

void axpby_avx2(double a, const double *x, double b, double *y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    if (b == 0.0) {
        for (; i + 4 <= n; i += 4)
            _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        for (; i < n; ++i) y[i] = a * x[i];
    } else if (b == 1.0) {
        for (; i + 4 <= n; i += 4) {
            __m256d vy = _mm256_loadu_pd(y + i);
            vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
            _mm256_storeu_pd(y + i, vy);
        }
        for (; i < n; ++i) y[i] += a * x[i];
    } else {
        const __m256d vb = _mm256_set1_pd(b);
        for (; i + 4 <= n; i += 4) {
            __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
            vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
            _mm256_storeu_pd(y + i, vy);
        }
        for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
    }
}

double dot_avx2(const double *x, const double *y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

} // namespace samg::kernels::detail

#else

namespace samg::kernels::detail {

void axpby_avx2(double a, const double *x, double b, double *y, std::size_t n) {
    axpby_scalar(a, x, b, y, n);
}

double dot_avx2(const double *x, const double *y, std::size_t n) {
    return dot_scalar(x, y, n);
}

} // namespace samg::kernels::detail

#endif
