#pragma once

// Mild solutions of u' + Au + B(sigma(t,omega))(u,u) = f(t, sigma(t,omega), u)
// with jumps u(t_k) = u(t_k^-) + I_k(u(t_k^-)).
//
// Two independent realisations are provided:
//   * integrate()      -- exponential trapezoidal (ETD2) time marching
//   * picard_iterate() -- fixed-point iteration of the variation-of-constants
//                         operator S on a local window [0, T0]
// plus the constants of the local existence argument (contraction constant
// q, invariance radius d1, and the (delta0, T0) window search).

#include "impulsive/driving.hpp"
#include "impulsive/spectral.hpp"

#include <cstddef>
#include <vector>

namespace impulsive {

struct SolverConfig {
    double dt = 1e-3;          // macro step between impulses
    int quad_substeps = 1;     // Picard quadrature nodes per macro step
    double picard_tol = 1e-12; // d_inf stopping threshold
    int picard_max_iter = 200;
    double horizon_T = 1.0;
    double blowup_factor = 1e6; // guard: |u|_H > factor * (|u0|_H + 1)

    /// Throws ContractViolation when dt >= min impulse gap or a field is out of range.
    void validate(const ImpulseSchedule& schedule) const;
};

struct TrajectorySample {
    double t;
    StateVector u;
    bool is_impulse; // u is the post-jump value u(t_k)
};

struct ImpulseRecord {
    std::size_t index; // k
    double t;          // t_k
    StateVector left;  // u(t_k^-)
    double jump_norm;  // |I_k(u(t_k^-))|_H
};

/// Right-continuous path with recorded left limits at impulse times.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<ImpulseRecord> impulses;

    [[nodiscard]] const StateVector& final_state() const { return samples.back().u; }
    [[nodiscard]] std::vector<double> times() const;
    [[nodiscard]] std::vector<double> norms() const;
};

/// Constants consumed by the local existence estimates.
struct Constants {
    double K = 1.0;
    double K1 = 1.0;
    double alpha1 = 0.0;
    double Binf = 0.0; // ||B||_inf
    double N = 0.0;    // sup L(s)
    double M = 0.0;    // sup M(s)
    double K2 = 0.0;
    double K3 = 0.0;
};

Constants constants_of(const DiagonalOperator& a, const DrivenSystem& system);

struct LocalSolveReport {
    double delta0 = 0.0;
    double T0 = 0.0;
    double contraction_q = 0.0;
    double d1_value = 0.0;
    std::size_t n_T = 0;
    /// Largest admissible window containing no impulse (may equal T0).
    double impulse_free_T0 = 0.0;
    std::vector<double> iter_residuals;
};

/// q = 2 Binf K1 (r + |u0|) T^{1-alpha1}/(1-alpha1) + K N T + K K3 n_T
double contraction_constant(const Constants& c, double r, double u0_norm, double T,
                            std::size_t n_T);

/// d1 = m + K1 Binf (|u0|+r)^2 T^{1-alpha1}/(1-alpha1) + K N (|u0|+r) T + K M T + K K2 n_T
double invariance_radius_d1(const Constants& c, double u0_norm, double r, double delta, double T,
                            std::size_t n_T, double m_est);

/// max over a t-grid on [0, T] of |e^{-At}u0 - u0|_H, plus delta.
double estimate_m(const DiagonalOperator& a, const StateVector& u0, double delta, double T,
                  int grid_points = 64);

struct WindowSearch {
    double T_max = 1.0;
    int levels_per_decade = 16;
    int decades = 12;
    int m_grid_points = 64;
};

struct WindowRow {
    double T;
    std::size_t n_T;
    double q;
    double delta; // largest grid delta with d1 <= r, or 0
    double d1;    // at that delta (or at the smallest grid delta)
    bool admissible;
};

/// Every level of the (delta, T) search grid, largest T first.
std::vector<WindowRow> window_table(const Constants& c, const DiagonalOperator& a,
                                    const StateVector& u0, double r,
                                    const ImpulseSchedule& schedule, const WindowSearch& search = {});

/// Largest grid T (with its delta) such that d1 <= r and q < 1.
/// Throws NoAdmissibleWindow when no grid level qualifies.
LocalSolveReport find_local_window(const Constants& c, const DiagonalOperator& a,
                                   const StateVector& u0, double r,
                                   const ImpulseSchedule& schedule, const WindowSearch& search = {});

struct PicardResult {
    Trajectory path;
    LocalSolveReport report;
};

/// Iterates phi_{n+1} = S phi_n from phi_0 = u0 on [0, T] until
/// d_inf(phi_{n+1}, phi_n) <= cfg.picard_tol. The window fields of `window`
/// are copied into the returned report.
PicardResult picard_iterate(const DiagonalOperator& a, const DrivenSystem& system,
                            const StateVector& u0, HullPoint omega, double T,
                            const SolverConfig& cfg, const LocalSolveReport& window = {});

/// One exponential trapezoidal step from t to t + h.
StateVector step_etd(const DiagonalOperator& a, const DrivenSystem& system, const StateVector& u,
                     double t, double h, HullPoint omega);

/// Marches from u0 over [0, horizon_T], landing exactly on every impulse
/// time and forcing discontinuity.
Trajectory integrate(const DiagonalOperator& a, const DrivenSystem& system, const StateVector& u0,
                     HullPoint omega, double horizon_T, const SolverConfig& cfg);

/// Step nodes over [0, T]: uniform steps of h, with the step before each
/// breakpoint shortened to land on it. Breakpoints outside (0, T) are ignored.
std::vector<double> time_nodes(double T, double h, std::vector<double> breakpoints);

}  // namespace impulsive
