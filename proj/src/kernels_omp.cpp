#include "impulsive/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace impulsive::kernels::omp {

namespace {
// Below this many points the fork/join cost dominates.
constexpr std::int64_t kMinParallel = 2048;
}

void diag_exp_scale(std::span<const double> lambda, double t,
                    std::span<const double> in, std::span<double> out) {
    const auto n = static_cast<std::int64_t>(lambda.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
    for (std::int64_t j = 0; j < n; ++j)
        out[j] = std::exp(-lambda[j] * t) * in[j];
}

void advect_pointwise(std::span<const cplx> vel, std::span<const cplx> grad_v1,
                      std::span<const cplx> grad_v2, std::span<cplx> out) {
    const auto n = static_cast<std::int64_t>(vel.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
    for (std::int64_t p = 0; p < n; ++p) {
        const double u1 = vel[p].real();
        const double u2 = vel[p].imag();
        const double w1 = u1 * grad_v1[p].real() + u2 * grad_v1[p].imag();
        const double w2 = u1 * grad_v2[p].real() + u2 * grad_v2[p].imag();
        out[p] = cplx(w1, w2);
    }
}

void leray_project(int n, std::span<cplx> u1_hat, std::span<cplx> u2_hat) {
#pragma omp parallel for schedule(static) if (std::int64_t{n} * n >= kMinParallel)
    for (int i = 0; i < n; ++i) {
        const double k1 = wavenumber(i, n);
        for (int j = 0; j < n; ++j) {
            const double k2 = wavenumber(j, n);
            const double kk = k1 * k1 + k2 * k2;
            if (kk == 0.0) continue;
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            const cplx dot = (k1 * u1_hat[p] + k2 * u2_hat[p]) / kk;
            u1_hat[p] -= k1 * dot;
            u2_hat[p] -= k2 * dot;
        }
    }
}

void tanh_pointwise(double scale, std::span<const cplx> in, std::span<cplx> out) {
    const auto n = static_cast<std::int64_t>(in.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
    for (std::int64_t p = 0; p < n; ++p)
        out[p] = cplx(scale * std::tanh(in[p].real()), scale * std::tanh(in[p].imag()));
}

}  // namespace impulsive::kernels::omp
