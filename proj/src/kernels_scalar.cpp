#include "samg/kernels.hpp"

namespace samg::kernels::detail {

void axpby_scalar(double a, const double *x, double b, double *y, std::size_t n) {
    if (b == 0.0) {
        for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
    } else if (b == 1.0) {
        for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
    }
}

double dot_scalar(const double *x, const double *y, std::size_t n) {
    // Four independent partial sums; same reduction tree as the AVX2
    // variant's per-lane accumulation so the two stay close.
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i + 0] * y[i + 0];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < n; ++i) s0 += x[i] * y[i];
    return (s0 + s1) + (s2 + s3);
}

} // namespace samg::kernels::detail
