#ifndef SAMG_KERNELS_HPP
#define SAMG_KERNELS_HPP

/*
 * Level-1 vector kernels used by the CG driver and the V-cycle.
 * Scalar reference implementations are always available; an AVX2+FMA
 * variant is selected at startup when the CPU supports it. The two
 * variants are equivalence-tested against each other.
 */

#include <cstddef>
#include <span>

namespace samg::kernels {

enum class isa { scalar, avx2 };

// y = a*x + b*y
void axpby(double a, std::span<const double> x, double b, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

double norm2(std::span<const double> x);

// Active instruction set; force_isa is intended for equivalence tests.
isa active_isa();
const char* active_isa_name();
void force_isa(isa which);
bool avx2_available();

namespace detail {
void axpby_scalar(double a, const double *x, double b, double *y, std::size_t n);
double dot_scalar(const double *x, const double *y, std::size_t n);
void axpby_avx2(double a, const double *x, double b, double *y, std::size_t n);
double dot_avx2(const double *x, const double *y, std::size_t n);
} // namespace detail

} // namespace samg::kernels

#endif
