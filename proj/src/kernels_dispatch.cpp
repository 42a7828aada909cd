#include "samg/kernels.hpp"

#include <cmath>

namespace samg::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct dispatch_table {
    void   (*axpby)(double, const double*, double, double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    isa which;
};

dispatch_table make_table(isa which) {
    if (which == isa::avx2)
        return {detail::axpby_avx2, detail::dot_avx2, isa::avx2};
    return {detail::axpby_scalar, detail::dot_scalar, isa::scalar};
}

dispatch_table& table() {
    static dispatch_table t = make_table(cpu_has_avx2() ? isa::avx2 : isa::scalar);
    return t;
}

} // namespace

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    table().axpby(a, x.data(), b, y.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
    return table().dot(x.data(), y.data(), x.size());
}

double norm2(std::span<const double> x) {
    return std::sqrt(table().dot(x.data(), x.data(), x.size()));
}

isa active_isa() { return table().which; }

const char* active_isa_name() {
    return table().which == isa::avx2 ? "avx2" : "scalar";
}

void force_isa(isa which) {
    if (which == isa::avx2 && !cpu_has_avx2()) return;
    table() = make_table(which);
}

bool avx2_available() { return cpu_has_avx2(); }

} // namespace samg::kernels
