#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial loop
// kept as the reference, and an OpenMP version used by default. Both must
// produce bit-identical results (no reductions reorder floating point).

#include <complex>
#include <cstddef>
#include <span>

namespace impulsive::kernels {

using cplx = std::complex<double>;

enum class Backend { serial, openmp };

namespace serial {

/// out_j = exp(-lambda_j * t) * in_j
void diag_exp_scale(std::span<const double> lambda, double t,
                    std::span<const double> in, std::span<double> out);

/// Pointwise advection product on packed physical grids.
/// vel = u1 + i u2, grad_v1 = d1 v1 + i d2 v1, grad_v2 = d1 v2 + i d2 v2.
/// Writes out = (u . grad) v1 + i (u . grad) v2.
void advect_pointwise(std::span<const cplx> vel, std::span<const cplx> grad_v1,
                      std::span<const cplx> grad_v2, std::span<cplx> out);

/// In-place (I - k k^T / |k|^2) on an n x n spectral grid; k = 0 untouched.
void leray_project(int n, std::span<cplx> u1_hat, std::span<cplx> u2_hat);

/// out_i = scale * tanh(in_i) on the real and imaginary parts separately.
void tanh_pointwise(double scale, std::span<const cplx> in, std::span<cplx> out);

}  // namespace serial

namespace omp {

void diag_exp_scale(std::span<const double> lambda, double t,
                    std::span<const double> in, std::span<double> out);
void advect_pointwise(std::span<const cplx> vel, std::span<const cplx> grad_v1,
                      std::span<const cplx> grad_v2, std::span<cplx> out);
void leray_project(int n, std::span<cplx> u1_hat, std::span<cplx> u2_hat);
void tanh_pointwise(double scale, std::span<const cplx> in, std::span<cplx> out);

}  // namespace omp

/// Signed wavenumber of FFT index i on an n-point grid.
constexpr int wavenumber(int i, int n) noexcept { return i <= n / 2 ? i : i - n; }

/// Index of signed wavenumber k on an n-point grid.
constexpr int fft_index(int k, int n) noexcept { return k >= 0 ? k : k + n; }

inline void advect_pointwise(Backend b, std::span<const cplx> vel,
                             std::span<const cplx> g1, std::span<const cplx> g2,
                             std::span<cplx> out) {
    if (b == Backend::openmp)
        omp::advect_pointwise(vel, g1, g2, out);
    else
        serial::advect_pointwise(vel, g1, g2, out);
}

inline void leray_project(Backend b, int n, std::span<cplx> u1, std::span<cplx> u2) {
    if (b == Backend::openmp)
        omp::leray_project(n, u1, u2);
    else
        serial::leray_project(n, u1, u2);
}

inline void tanh_pointwise(Backend b, double scale, std::span<const cplx> in,
                           std::span<cplx> out) {
    if (b == Backend::openmp)
        omp::tanh_pointwise(scale, in, out);
    else
        serial::tanh_pointwise(scale, in, out);
}

}  // namespace impulsive::kernels
