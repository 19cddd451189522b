#include "impulsive/kernels.hpp"

#include <cmath>

namespace impulsive::kernels::serial {

void diag_exp_scale(std::span<const double> lambda, double t,
                    std::span<const double> in, std::span<double> out) {
    for (std::size_t j = 0; j < lambda.size(); ++j)
        out[j] = std::exp(-lambda[j] * t) * in[j];
}

void advect_pointwise(std::span<const cplx> vel, std::span<const cplx> grad_v1,
                      std::span<const cplx> grad_v2, std::span<cplx> out) {
    for (std::size_t p = 0; p < vel.size(); ++p) {
        const double u1 = vel[p].real();
        const double u2 = vel[p].imag();
        const double w1 = u1 * grad_v1[p].real() + u2 * grad_v1[p].imag();
        const double w2 = u1 * grad_v2[p].real() + u2 * grad_v2[p].imag();
        out[p] = cplx(w1, w2);
    }
}

void leray_project(int n, std::span<cplx> u1_hat, std::span<cplx> u2_hat) {
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
    for (std::size_t p = 0; p < in.size(); ++p)
        out[p] = cplx(scale * std::tanh(in[p].real()), scale * std::tanh(in[p].imag()));
}

}  // namespace impulsive::kernels::serial
