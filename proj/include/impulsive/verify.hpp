#pragma once

// Certificates for the quantitative bounds on computed trajectories:
// the impulsive comparison bound, the global bound 2C(|u0|) + Gamma, entry
// into the absorbing ball, two-solution contraction, the Picard rate and
// energy orthogonality of B.

#include "impulsive/driving.hpp"
#include "impulsive/mild_solver.hpp"

#include <json.hpp>

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace impulsive::verify {

enum class TheoremId {
    EQ3_5_bound,
    global_bound_b,
    absorbing_set,
    contraction_28,
    picard_rate,
    orthogonality,
};

enum class Verdict { pass, fail, inapplicable, precondition_failed };

std::string_view to_string(TheoremId id);
std::string_view to_string(Verdict v);

struct TheoremReport {
    TheoremId theorem_id;
    std::map<std::string, double> params;
    std::vector<double> t;          // abscissa of predicted/measured (time or iteration)
    std::vector<double> predicted;
    std::vector<double> measured;
    double max_violation = 0.0;     // max(measured - predicted)
    double tolerance = 0.0;
    Verdict verdict = Verdict::fail;
    std::string message;

    [[nodiscard]] bool ok() const noexcept {
        return verdict == Verdict::pass || verdict == Verdict::inapplicable;
    }
};

/// Finite values as numbers; inf and nan as the strings "inf", "-inf", "nan".
nlohmann::json json_number(double v);

nlohmann::json to_json(const TheoremReport& r);

struct ImpulseHit {
    double t;
    double magnitude; // |I_i(u(t_i^-))|_H
};

std::vector<ImpulseHit> impulse_hits(const Trajectory& traj);

/// (|u0| - f1/alpha) e^{-alpha t} + sum_{t_i <= t} |I_i| e^{-alpha (t - t_i)} + f1/alpha
std::vector<double> bound_curve_eq35(double u0_norm, double f1_norm, double alpha,
                                     std::span<const ImpulseHit> impulses,
                                     std::span<const double> t_grid);

/// C(r) = r if r >= f1/alpha, else f1/alpha.
double c_of_r(double r, double f1_norm, double alpha);

struct DissipativityParams {
    double f1_norm = 0.0;
    double alpha = 1.0;
    double Gamma = 0.0;
    double abs_tol = 1e-6;
    double dt2_budget = 0.0; // added to abs_tol for time-stepping error
    double entry_tol = 1e-3; // B0 radius slack and entry-time target
};

struct DissipativityResult {
    TheoremReport eq35;
    TheoremReport absorbing;
};

/// Throws PreconditionFailure when Gamma is infinite.
DissipativityResult check_dissipativity(const Trajectory& traj, const DissipativityParams& p);

TheoremReport check_global_bound_b(const Trajectory& traj, double u0_norm, double f1_norm,
                                   double alpha, double Gamma, double tol = 1e-6);

struct ContractionParams {
    double alpha = 1.0;
    double Binf = 0.0;
    double f1_norm = 0.0;
    double Gamma = 0.0;
    double C = 0.0;  // Lipschitz constant of the forcing in u
    double C2 = 0.0; // Lipschitz constant of the impulses
    double tol = 1e-6;
};

/// beta = alpha - 2 Binf r0 - C, r0 = 2 f1/alpha + Gamma.
double contraction_rate_beta(const ContractionParams& p);

TheoremReport check_contraction_28(const Trajectory& traj1, const Trajectory& traj2,
                                   const ContractionParams& p);

TheoremReport check_picard_rate(const LocalSolveReport& report, double tol = 1e-3);

/// max over pairs of |<B(omega_i)(u, v), v>| / (|u| |v|^2) against tol.
/// Pair i uses omegas[i % size], or tau = 0 when omegas is empty.
TheoremReport check_orthogonality(const BilinearForm& b,
                                  std::span<const std::pair<StateVector, StateVector>> pairs,
                                  double tol = 1e-10, std::span<const HullPoint> omegas = {});

/// Default time-stepping budget for bound checks: coeff * dt^2 * sup|u|.
double dt2_budget(double dt, double sup_norm, double coeff = 1.0);

}  // namespace impulsive::verify
