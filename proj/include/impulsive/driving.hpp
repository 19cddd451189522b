#pragma once

// Nonautonomous and impulsive data: the bilinear form B, the forcing f, the
// impulse schedule {t_k, I_k}, and the hull point omega selecting which
// time-shifted copy of the data drives the equation.

#include "impulsive/spectral.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace impulsive {

/// A point of the hull, represented by the shift offset tau of the
/// translation flow sigma(t, omega) = omega shifted by t.
struct HullPoint {
    double shift_tau = 0.0;

    friend bool operator==(const HullPoint&, const HullPoint&) = default;
};

/// sigma(t, omega). Throws DomainError for t < 0.
HullPoint shift(HullPoint omega, double t);

/// Which one-sided value to take at a discontinuity.
enum class Side { right, left };

/// Scalar time dependence q(t) of B, or the amplitude profile of a forcing.
class TimeProfile {
public:
    enum class Kind { constant, sine, piecewise };

    static TimeProfile constant(double value);
    /// amplitude * sin(frequency * t + phase)
    static TimeProfile sine(double amplitude, double frequency, double phase = 0.0);
    /// values[i] on [times[i-1], times[i]), right-continuous;
    /// values.size() == times.size() + 1.
    static TimeProfile piecewise(std::vector<double> times, std::vector<double> values);

    [[nodiscard]] double value(double t, Side side = Side::right) const;
    [[nodiscard]] double sup_abs() const;
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return times_; }

private:
    TimeProfile() = default;

    Kind kind_ = Kind::constant;
    double amplitude_ = 0.0;
    double frequency_ = 0.0;
    double phase_ = 0.0;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// B(omega)(u, v) = q(omega.tau) * base(u, v), with its size measured in the
/// F-norm |A^{-delta} .|_H of the owning operator.
class BilinearForm {
public:
    using Base = std::function<StateVector(const StateVector&, const StateVector&)>;

    /// base_norm_bound must dominate sup_{|u|,|v| <= 1} |base(u, v)|_F.
    BilinearForm(std::shared_ptr<const DiagonalOperator> op, TimeProfile q, Base base,
                 double base_norm_bound);

    static BilinearForm zero(std::shared_ptr<const DiagonalOperator> op);

    [[nodiscard]] StateVector evaluate(HullPoint omega, const StateVector& u,
                                       const StateVector& v) const;
    /// ||B||_inf = sup|q| * base bound.
    [[nodiscard]] double norm_bound() const { return q_.sup_abs() * base_norm_bound_; }
    [[nodiscard]] double base_norm_bound() const noexcept { return base_norm_bound_; }
    [[nodiscard]] double f_norm(const StateVector& w) const;
    [[nodiscard]] const TimeProfile& q() const noexcept { return q_; }
    [[nodiscard]] bool is_zero() const noexcept { return !base_; }
    [[nodiscard]] const DiagonalOperator& op() const noexcept { return *op_; }

private:
    std::shared_ptr<const DiagonalOperator> op_;
    TimeProfile q_;
    Base base_;
    double base_norm_bound_;
};

/// Toy skew form base(u, v) = u_0 * J v, J rotating coordinate pairs
/// (2i, 2i+1) by +90 degrees. <base(u, v), v> = 0 and |J v| <= |v|.
BilinearForm make_skew_bilinear(std::shared_ptr<const DiagonalOperator> op, TimeProfile q);

/// f(t, omega, u) evaluated at absolute time omega.tau + t.
class Forcing {
public:
    using Evaluator = std::function<StateVector(double abs_t, const StateVector& u, Side side)>;

    struct Bounds {
        double bound_M = 0.0;       // sup |f|_H, condition (C3)
        double lipschitz_u = 0.0;   // Lipschitz constant in u at fixed (t, omega)
        double lipschitz_L = 0.0;   // constant of (C4), includes the hull-distance term
        double sup_norm_f1 = 0.0;   // ||f||_1
    };

    Forcing(std::size_t dim, Evaluator ev, Bounds bounds, std::vector<double> discontinuities,
            bool autonomous);

    static Forcing zero(std::size_t dim);

    [[nodiscard]] StateVector evaluate(double t, HullPoint omega, const StateVector& u,
                                       Side side = Side::right) const;
    [[nodiscard]] const Bounds& bounds() const noexcept { return bounds_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool autonomous() const noexcept { return autonomous_; }
    /// Absolute times at which the forcing jumps (right-continuous there).
    [[nodiscard]] std::span<const double> discontinuity_times() const noexcept {
        return discontinuities_;
    }

private:
    std::size_t dim_;
    Evaluator ev_;
    Bounds bounds_;
    std::vector<double> discontinuities_;
    bool autonomous_;
};

/// f(t, u) = profile(t) * pattern + lip * saturation(u), where saturation is
/// 1-Lipschitz and bounded by saturation_bound in H.
Forcing make_profile_forcing(TimeProfile profile, StateVector pattern, double lip,
                             std::function<StateVector(const StateVector&)> saturation,
                             double saturation_bound);

/// Componentwise tanh, the saturation used by the abstract toy problem.
StateVector tanh_saturation(const StateVector& u);

class ImpulseOperator {
public:
    enum class Kind { zero, constant_jump, scaled_saturation, custom };
    using Map = std::function<StateVector(const StateVector&)>;

    static ImpulseOperator zero();
    static ImpulseOperator constant_jump(StateVector c);
    /// u -> amplitude * tanh(|u|_H) * direction / |direction|_H
    static ImpulseOperator scaled_saturation(double amplitude, StateVector direction);
    /// User-supplied map; its constants cannot be checked and are flagged.
    static ImpulseOperator custom(Map map, double sup_bound, double lipschitz);

    [[nodiscard]] StateVector operator()(const StateVector& u) const;
    /// K2 of this operator.
    [[nodiscard]] double sup_bound() const noexcept { return k2_; }
    /// K3 of this operator.
    [[nodiscard]] double lipschitz() const noexcept { return k3_; }
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool verified() const noexcept { return kind_ != Kind::custom; }

private:
    ImpulseOperator() = default;

    Kind kind_ = Kind::zero;
    double amplitude_ = 0.0;
    StateVector vec_;  // jump c, or unit direction
    Map map_;
    double k2_ = 0.0;
    double k3_ = 0.0;
};

/// Fixed impulse times 0 < t_0 < t_1 < ... with their jump maps. An optional
/// periodic tail repeats one operator forever after the last explicit time.
class ImpulseSchedule {
public:
    ImpulseSchedule() = default;
    ImpulseSchedule(std::vector<double> times, std::vector<ImpulseOperator> ops);

    void set_periodic_tail(double period, ImpulseOperator op);

    [[nodiscard]] bool empty() const noexcept { return times_.empty() && !tail_; }
    [[nodiscard]] std::size_t explicit_count() const noexcept { return times_.size(); }
    [[nodiscard]] double time(std::size_t k) const;
    [[nodiscard]] const ImpulseOperator& op(std::size_t k) const;
    /// Indices k with t_k in (t0, t1].
    [[nodiscard]] std::vector<std::size_t> indices_in(double t0, double t1) const;
    /// n_T: number of impulses in (0, T].
    [[nodiscard]] std::size_t count_upto(double horizon) const;
    /// First impulse time strictly after t, or +inf.
    [[nodiscard]] double next_after(double t) const;

    [[nodiscard]] double K2() const;
    [[nodiscard]] double K3() const;
    /// sum_k sup_u |I_k(u)|_H; +inf for a nonzero periodic tail.
    [[nodiscard]] double Gamma() const;
    [[nodiscard]] bool has_unverified_constants() const;
    /// Smallest gap between consecutive impulse times up to the horizon
    /// (including the gap from 0 to the first impulse); +inf if none.
    [[nodiscard]] double min_gap(double horizon) const;

private:
    struct Tail {
        double period;
        ImpulseOperator op;
    };

    std::vector<double> times_;
    std::vector<ImpulseOperator> ops_;
    std::optional<Tail> tail_;
};

/// u_left + I_k(u_left), elementwise.
StateVector apply_impulse(const ImpulseSchedule& schedule, std::size_t k, const StateVector& u_left);

/// Bundle of B, f and {t_k, I_k}.
struct DrivenSystem {
    BilinearForm bilinear;
    Forcing forcing;
    ImpulseSchedule schedule;

    /// g(t, u) = -B(sigma(t, omega))(u, u) + f(t, sigma(t, omega), u)
    [[nodiscard]] StateVector rhs(double t, HullPoint omega, const StateVector& u,
                                  Side side = Side::right) const;
};

StateVector eval_forcing(const Forcing& f, double t, HullPoint omega, const StateVector& u);

/// Empirical max of |B(omega)(u, v)|_F over random unit pairs and a shift grid.
double estimate_B_norm(const BilinearForm& b, int sample_count, std::uint64_t rng_seed);

/// Empirical sup of |f|_H over a time grid on [0, horizon] and random states,
/// refined around the best grid time by golden-section search.
double estimate_f_norm(const Forcing& f, double horizon, int sample_count,
                       std::uint64_t rng_seed = 1);

struct HullGrid {
    std::vector<double> times;
    std::vector<StateVector> states;
};

/// Sampled d_M(omega1, omega2) = sup_t |q_1 - q_2| * base bound
///                             + sup_{t,u} |f_1(t, u) - f_2(t, u)|_H.
double hull_distance(HullPoint omega1, HullPoint omega2, const Forcing& f,
                     const BilinearForm& b, const HullGrid& grid);

}  // namespace impulsive
