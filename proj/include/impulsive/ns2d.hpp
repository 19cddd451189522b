#pragma once

// 2D incompressible Navier-Stokes on the periodic torus [0, 2pi)^2 by
// Fourier-Galerkin truncation with 2/3-rule dealiasing.
//
// State layout: the retained wavevectors k in the upper half plane
// (k1 > 0, or k1 == 0 and k2 > 0), |k_i| <= K with 3K < n, sorted by |k|^2.
// Mode m carries two real coefficients (a_m, b_m):
//
//   u(x) = sum_m (a_m cos(k.x) + b_m sin(k.x)) e_perp(k) / (pi sqrt 2),
//   e_perp(k) = (-k2, k1) / |k|,
//
// an orthonormal basis of the mean-zero divergence-free fields in L^2, so
// the coefficient 2-norm is the physical L^2 norm.

#include "impulsive/driving.hpp"
#include "impulsive/kernels.hpp"
#include "impulsive/spectral.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace impulsive::ns2d {

using kernels::cplx;

struct Mode {
    int k1;
    int k2;
    int k_sq;
};

/// Grid, retained mode set and FFT plans. Immutable after construction and
/// shareable across threads (transforms use caller-owned buffers).
class TorusGrid {
public:
    explicit TorusGrid(int n_modes, kernels::Backend backend = kernels::Backend::openmp);
    ~TorusGrid();
    TorusGrid(const TorusGrid&) = delete;
    TorusGrid& operator=(const TorusGrid&) = delete;

    [[nodiscard]] int n() const noexcept { return n_; }
    /// Dealiasing radius K: retained |k_i| <= K.
    [[nodiscard]] int kmax() const noexcept { return kmax_; }
    [[nodiscard]] std::span<const Mode> modes() const noexcept { return modes_; }
    [[nodiscard]] std::size_t state_dim() const noexcept { return 2 * modes_.size(); }
    [[nodiscard]] kernels::Backend backend() const noexcept { return backend_; }
    [[nodiscard]] std::size_t points() const noexcept {
        return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
    }

    /// Spectral -> physical, u(x_m) = sum_k c(k) e^{i k.x_m}. In place.
    void inverse(std::span<cplx> data) const;
    /// Physical -> spectral, normalised by 1/n^2. In place.
    void forward(std::span<cplx> data) const;

    [[nodiscard]] std::size_t index(int k1, int k2) const noexcept {
        return static_cast<std::size_t>(kernels::fft_index(k1, n_)) * n_ +
               static_cast<std::size_t>(kernels::fft_index(k2, n_));
    }
    [[nodiscard]] bool retained(int k1, int k2) const noexcept;

private:
    int n_;
    int kmax_;
    kernels::Backend backend_;
    std::vector<Mode> modes_;
    void* plan_forward_ = nullptr;
    void* plan_inverse_ = nullptr;
};

/// Velocity in full n x n spectral arrays (conjugate symmetric for real fields).
struct VelocityField {
    std::vector<cplx> u1_hat;
    std::vector<cplx> u2_hat;
};

struct PhysicalField {
    std::vector<double> u1;
    std::vector<double> u2;
};

VelocityField to_velocity(const TorusGrid& grid, const StateVector& u);
/// Projection onto the retained divergence-free modes (Leray + truncation).
StateVector to_state(const TorusGrid& grid, const VelocityField& field);

/// Per mode (I - k k^T/|k|^2) u_hat(k); the k = 0 mode is left unchanged.
VelocityField leray_project(const TorusGrid& grid, VelocityField field);

/// max_k |k . u_hat(k)| relative to max_k |k| |u_hat(k)| (0 for the zero field).
double divergence_residual(const TorusGrid& grid, const VelocityField& field);

/// A = -nu P Delta on the retained modes: eigenvalues nu |k|^2, coercivity nu.
DiagonalOperator stokes_operator(double nu, const TorusGrid& grid, double delta = 0.5);

/// q P((u . grad) v), pseudospectral with 2/3 dealiasing.
StateVector nonlinear_term(const TorusGrid& grid, double q_val, const StateVector& u,
                           const StateVector& v);
/// Same, from spectral fields; throws ContractViolation when either field has
/// energy outside the retained modes.
StateVector nonlinear_term(const TorusGrid& grid, double q_val, const VelocityField& u,
                           const VelocityField& v);
/// Serial reference: direct convolution sum over retained wavevector pairs.
StateVector nonlinear_term_reference(const TorusGrid& grid, double q_val, const StateVector& u,
                                     const StateVector& v);

/// P phi for a body force sampled on the n x n physical grid (mean removed).
StateVector project_forcing(const TorusGrid& grid, std::span<const double> phi1,
                            std::span<const double> phi2);

/// e^{-2 nu t} (cos x sin y, -sin x cos y).
StateVector taylor_green(const TorusGrid& grid, double t, double nu);

/// Random mean-zero divergence-free field with spectrum ~ 1/|k|^2 and
/// kinetic energy |u|_H^2 / 2 = energy.
StateVector random_divfree(const TorusGrid& grid, std::uint64_t seed, double energy);

PhysicalField to_physical(const TorusGrid& grid, const StateVector& u);
/// (sum over grid points |u|^2 (2pi/n)^2)^{1/2}
double physical_l2_norm(const TorusGrid& grid, const PhysicalField& field);
/// ||grad u||_{L^2}, derivatives taken spectrally and summed in physical space.
double gradient_l2_norm(const TorusGrid& grid, const StateVector& u);

/// Rigorous bound on sup_{|u|,|v| <= 1} |A^{-delta} P (u.grad) v|_H on the
/// truncated space: sqrt(#modes) K nu^{-delta} / pi.
double nonlinear_norm_bound(const TorusGrid& grid, double nu, double delta);

/// B(omega)(u, v) = q(tau) P((u . grad) v) as a BilinearForm.
BilinearForm make_ns_bilinear(std::shared_ptr<const TorusGrid> grid,
                              std::shared_ptr<const DiagonalOperator> op, double nu,
                              TimeProfile q);

/// f(t, u) = profile(t) P phi_base + lip P tanh(u), tanh applied pointwise to
/// the velocity components in physical space.
Forcing make_ns_forcing(std::shared_ptr<const TorusGrid> grid, TimeProfile profile,
                        StateVector pattern, double lip);

/// P (amplitude sin(k_f y), 0): a Kolmogorov shear pattern.
StateVector kolmogorov_pattern(const TorusGrid& grid, double amplitude, int k_f);

}  // namespace impulsive::ns2d
