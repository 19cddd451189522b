#include "impulsive/driving.hpp"

#include "impulsive/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace impulsive {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

StateVector random_unit(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVector u(dim);
    double n = 0.0;
    while (n == 0.0) {
        for (std::size_t j = 0; j < dim; ++j) u[j] = normal(rng);
        n = u.norm();
    }
    u *= 1.0 / n;
    return u;
}

}  // namespace

HullPoint shift(HullPoint omega, double t) {
    if (t < 0.0) throw DomainError("shift: negative time");
    return HullPoint{omega.shift_tau + t};
}

// ---------------------------------------------------------------------------
// TimeProfile

TimeProfile TimeProfile::constant(double value) {
    TimeProfile p;
    p.kind_ = Kind::constant;
    p.amplitude_ = value;
    return p;
}

TimeProfile TimeProfile::sine(double amplitude, double frequency, double phase) {
    TimeProfile p;
    p.kind_ = Kind::sine;
    p.amplitude_ = amplitude;
    p.frequency_ = frequency;
    p.phase_ = phase;
    return p;
}

TimeProfile TimeProfile::piecewise(std::vector<double> times, std::vector<double> values) {
    if (values.size() != times.size() + 1)
        throw ContractViolation("piecewise profile needs times.size() + 1 values");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ContractViolation("piecewise profile times must be strictly increasing");
    TimeProfile p;
    p.kind_ = Kind::piecewise;
    p.times_ = std::move(times);
    p.values_ = std::move(values);
    return p;
}

double TimeProfile::value(double t, Side side) const {
    switch (kind_) {
    case Kind::constant:
        return amplitude_;
    case Kind::sine:
        return amplitude_ * std::sin(frequency_ * t + phase_);
    case Kind::piecewise: {
        // right: number of breakpoints <= t; left: number of breakpoints < t
        const auto it = side == Side::right
                            ? std::upper_bound(times_.begin(), times_.end(), t)
                            : std::lower_bound(times_.begin(), times_.end(), t);
        return values_[static_cast<std::size_t>(it - times_.begin())];
    }
    }
    return 0.0;
}

double TimeProfile::sup_abs() const {
    switch (kind_) {
    case Kind::constant:
        return std::abs(amplitude_);
    case Kind::sine:
        return frequency_ == 0.0 ? std::abs(amplitude_ * std::sin(phase_)) : std::abs(amplitude_);
    case Kind::piecewise: {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }
    }
    return 0.0;
}

bool TimeProfile::is_constant() const {
    switch (kind_) {
    case Kind::constant:
        return true;
    case Kind::sine:
        return frequency_ == 0.0 || amplitude_ == 0.0;
    case Kind::piecewise:
        return std::all_of(values_.begin(), values_.end(),
                           [&](double v) { return v == values_.front(); });
    }
    return false;
}

// ---------------------------------------------------------------------------
// BilinearForm

BilinearForm::BilinearForm(std::shared_ptr<const DiagonalOperator> op, TimeProfile q, Base base,
                           double base_norm_bound)
    : op_(std::move(op)), q_(std::move(q)), base_(std::move(base)),
      base_norm_bound_(base_norm_bound) {
    if (!op_) throw ContractViolation("BilinearForm: null operator");
    if (base_norm_bound_ < 0.0) throw ContractViolation("BilinearForm: negative norm bound");
}

BilinearForm BilinearForm::zero(std::shared_ptr<const DiagonalOperator> op) {
    return BilinearForm(std::move(op), TimeProfile::constant(0.0), Base{}, 0.0);
}

StateVector BilinearForm::evaluate(HullPoint omega, const StateVector& u,
                                   const StateVector& v) const {
    if (u.dim() != op_->dim() || v.dim() != op_->dim())
        throw ContractViolation("BilinearForm: state dimension mismatch");
    if (!base_) return StateVector(u.dim());
    StateVector out = base_(u, v);
    out *= q_.value(omega.shift_tau);
    return out;
}

double BilinearForm::f_norm(const StateVector& w) const {
    return fractional_norm(*op_, -op_->frac_exponent(), w);
}

BilinearForm make_skew_bilinear(std::shared_ptr<const DiagonalOperator> op, TimeProfile q) {
    if (op->dim() < 2) throw ContractViolation("skew bilinear form needs dim >= 2");
    // |A^{-delta} u_0 J v| <= lambda_min^{-delta} |u| |v|
    const double bound = std::pow(op->coercivity(), -op->frac_exponent());
    auto base = [](const StateVector& u, const StateVector& v) {
        StateVector out(v.dim());
        const double u0 = u[0];
        for (std::size_t i = 0; i + 1 < v.dim(); i += 2) {
            out[i] = -u0 * v[i + 1];
            out[i + 1] = u0 * v[i];
        }
        return out;
    };
    return BilinearForm(std::move(op), std::move(q), base, bound);
}

// ---------------------------------------------------------------------------
// Forcing

Forcing::Forcing(std::size_t dim, Evaluator ev, Bounds bounds,
                 std::vector<double> discontinuities, bool autonomous)
    : dim_(dim), ev_(std::move(ev)), bounds_(bounds),
      discontinuities_(std::move(discontinuities)), autonomous_(autonomous) {}

Forcing Forcing::zero(std::size_t dim) {
    return Forcing(
        dim, [dim](double, const StateVector&, Side) { return StateVector(dim); }, Bounds{}, {},
        true);
}

StateVector Forcing::evaluate(double t, HullPoint omega, const StateVector& u, Side side) const {
    if (u.dim() != dim_) throw ContractViolation("Forcing: state dimension mismatch");
    return ev_(omega.shift_tau + t, u, side);
}

StateVector tanh_saturation(const StateVector& u) {
    StateVector out(u.dim());
    for (std::size_t j = 0; j < u.dim(); ++j) out[j] = std::tanh(u[j]);
    return out;
}

Forcing make_profile_forcing(TimeProfile profile, StateVector pattern, double lip,
                             std::function<StateVector(const StateVector&)> saturation,
                             double saturation_bound) {
    if (lip < 0.0) throw ContractViolation("forcing Lipschitz constant must be nonnegative");
    const std::size_t dim = pattern.dim();
    const bool autonomous = profile.is_constant();
    const double sup = profile.sup_abs() * pattern.norm() + lip * saturation_bound;

    Forcing::Bounds b;
    b.bound_M = sup;
    b.sup_norm_f1 = sup;
    b.lipschitz_u = lip;
    // |f(w1,u1) - f(w2,u2)| <= d_M(w1,w2) + lip |u1 - u2|
    b.lipschitz_L = autonomous ? lip : std::max(lip, 1.0);

    std::vector<double> jumps(profile.breakpoints().begin(), profile.breakpoints().end());
    auto ev = [profile = std::move(profile), pattern = std::move(pattern), lip,
               saturation = std::move(saturation)](double t, const StateVector& u, Side side) {
        StateVector out = pattern;
        out *= profile.value(t, side);
        if (lip != 0.0) out.axpy(lip, saturation(u));
        return out;
    };
    return Forcing(dim, std::move(ev), b, std::move(jumps), autonomous);
}

StateVector eval_forcing(const Forcing& f, double t, HullPoint omega, const StateVector& u) {
    if (t < 0.0) throw DomainError("eval_forcing: negative time");
    return f.evaluate(t, omega, u);
}

// ---------------------------------------------------------------------------
// Impulses

ImpulseOperator ImpulseOperator::zero() { return ImpulseOperator{}; }

ImpulseOperator ImpulseOperator::constant_jump(StateVector c) {
    ImpulseOperator op;
    op.kind_ = Kind::constant_jump;
    op.k2_ = c.norm();
    op.k3_ = 0.0;
    op.vec_ = std::move(c);
    return op;
}

ImpulseOperator ImpulseOperator::scaled_saturation(double amplitude, StateVector direction) {
    const double n = direction.norm();
    if (n == 0.0) throw ContractViolation("scaled_saturation: zero direction");
    ImpulseOperator op;
    op.kind_ = Kind::scaled_saturation;
    op.amplitude_ = amplitude;
    direction *= 1.0 / n;
    op.vec_ = std::move(direction);
    // tanh and |.|_H are both 1-Lipschitz and tanh <= 1
    op.k2_ = std::abs(amplitude);
    op.k3_ = std::abs(amplitude);
    return op;
}

ImpulseOperator ImpulseOperator::custom(Map map, double sup_bound, double lipschitz) {
    ImpulseOperator op;
    op.kind_ = Kind::custom;
    op.map_ = std::move(map);
    op.k2_ = sup_bound;
    op.k3_ = lipschitz;
    return op;
}

StateVector ImpulseOperator::operator()(const StateVector& u) const {
    switch (kind_) {
    case Kind::zero:
        return StateVector(u.dim());
    case Kind::constant_jump:
        if (vec_.dim() != u.dim()) throw ContractViolation("constant_jump: dimension mismatch");
        return vec_;
    case Kind::scaled_saturation: {
        if (vec_.dim() != u.dim())
            throw ContractViolation("scaled_saturation: dimension mismatch");
        StateVector out = vec_;
        out *= amplitude_ * std::tanh(u.norm());
        return out;
    }
    case Kind::custom:
        return map_(u);
    }
    return StateVector(u.dim());
}

ImpulseSchedule::ImpulseSchedule(std::vector<double> times, std::vector<ImpulseOperator> ops)
    : times_(std::move(times)), ops_(std::move(ops)) {
    if (times_.size() != ops_.size())
        throw ContractViolation("ImpulseSchedule: times and operators differ in length");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!(times_[i] > 0.0)) throw ContractViolation("ImpulseSchedule: times must be positive");
        if (i > 0 && !(times_[i] > times_[i - 1]))
            throw ContractViolation("ImpulseSchedule: times must be strictly increasing");
    }
}

void ImpulseSchedule::set_periodic_tail(double period, ImpulseOperator op) {
    if (!(period > 0.0)) throw ContractViolation("ImpulseSchedule: tail period must be positive");
    tail_ = Tail{period, std::move(op)};
}

double ImpulseSchedule::time(std::size_t k) const {
    if (k < times_.size()) return times_[k];
    if (!tail_) throw ContractViolation("impulse index " + std::to_string(k) + " out of range");
    const double base = times_.empty() ? 0.0 : times_.back();
    return base + tail_->period * static_cast<double>(k - times_.size() + 1);
}

const ImpulseOperator& ImpulseSchedule::op(std::size_t k) const {
    if (k < ops_.size()) return ops_[k];
    if (!tail_) throw ContractViolation("impulse index " + std::to_string(k) + " out of range");
    return tail_->op;
}

std::vector<std::size_t> ImpulseSchedule::indices_in(double t0, double t1) const {
    std::vector<std::size_t> out;
    if (!(t1 > t0)) return out;
    for (std::size_t k = 0; k < times_.size(); ++k)
        if (times_[k] > t0 && times_[k] <= t1) out.push_back(k);
    if (tail_) {
        const double base = times_.empty() ? 0.0 : times_.back();
        const double first = std::max(0.0, std::floor((t0 - base) / tail_->period) - 1.0);
        for (auto j = static_cast<std::size_t>(first);; ++j) {
            const std::size_t k = times_.size() + j;
            const double tk = time(k);
            if (tk > t1) break;
            if (tk > t0) out.push_back(k);
        }
    }
    return out;
}

std::size_t ImpulseSchedule::count_upto(double horizon) const {
    return indices_in(0.0, horizon).size();
}

double ImpulseSchedule::next_after(double t) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it != times_.end()) return *it;
    if (!tail_) return kInf;
    const double base = times_.empty() ? 0.0 : times_.back();
    auto j = static_cast<std::size_t>(std::max(0.0, std::floor((t - base) / tail_->period)));
    for (;; ++j) {
        const double tk = time(times_.size() + j);
        if (tk > t) return tk;
    }
}

double ImpulseSchedule::K2() const {
    double m = tail_ ? tail_->op.sup_bound() : 0.0;
    for (const auto& op : ops_) m = std::max(m, op.sup_bound());
    return m;
}

double ImpulseSchedule::K3() const {
    double m = tail_ ? tail_->op.lipschitz() : 0.0;
    for (const auto& op : ops_) m = std::max(m, op.lipschitz());
    return m;
}

double ImpulseSchedule::Gamma() const {
    if (tail_ && tail_->op.sup_bound() > 0.0) return kInf;
    double s = 0.0;
    for (const auto& op : ops_) s += op.sup_bound();
    return s;
}

bool ImpulseSchedule::has_unverified_constants() const {
    if (tail_ && !tail_->op.verified()) return true;
    return std::any_of(ops_.begin(), ops_.end(), [](const auto& op) { return !op.verified(); });
}

double ImpulseSchedule::min_gap(double horizon) const {
    double gap = kInf;
    double prev = 0.0;
    for (std::size_t k : indices_in(0.0, horizon)) {
        const double tk = time(k);
        gap = std::min(gap, tk - prev);
        prev = tk;
    }
    return gap;
}

StateVector apply_impulse(const ImpulseSchedule& schedule, std::size_t k,
                          const StateVector& u_left) {
    const StateVector jump = schedule.op(k)(u_left);
    if (jump.dim() != u_left.dim())
        throw ContractViolation("impulse operator returned wrong dimension");
    StateVector out = u_left;
    for (std::size_t j = 0; j < out.dim(); ++j) out[j] = u_left[j] + jump[j];
    return out;
}

StateVector DrivenSystem::rhs(double t, HullPoint omega, const StateVector& u, Side side) const {
    const HullPoint at = HullPoint{omega.shift_tau + t};
    StateVector g = forcing.evaluate(t, omega, u, side);
    if (!bilinear.is_zero()) g -= bilinear.evaluate(at, u, u);
    return g;
}

// ---------------------------------------------------------------------------
// Estimators

double estimate_B_norm(const BilinearForm& b, int sample_count, std::uint64_t rng_seed) {
    if (sample_count < 1) throw ContractViolation("estimate_B_norm: sample_count must be >= 1");
    if (b.is_zero()) return 0.0;

    // B(omega) = q(tau) base, so the max over the shift grid is attained at
    // the grid shift maximising |q|.
    double q_max = -1.0;
    double tau_star = 0.0;
    auto consider = [&](double tau) {
        const double qa = std::abs(b.q().value(tau));
        if (qa > q_max) {
            q_max = qa;
            tau_star = tau;
        }
    };
    constexpr int kShiftGrid = 1024;
    constexpr double kShiftSpan = 64.0;
    for (int i = 0; i <= kShiftGrid; ++i) consider(kShiftSpan * i / kShiftGrid);
    for (double tb : b.q().breakpoints()) consider(tb);

    std::mt19937_64 rng(rng_seed);
    const std::size_t dim = b.op().dim();
    double best = 0.0;
    for (int s = 0; s < sample_count; ++s) {
        const StateVector u = random_unit(dim, rng);
        const StateVector v = random_unit(dim, rng);
        best = std::max(best, b.f_norm(b.evaluate(HullPoint{tau_star}, u, v)));
    }
    return best;
}

double estimate_f_norm(const Forcing& f, double horizon, int sample_count,
                       std::uint64_t rng_seed) {
    if (!(horizon > 0.0)) throw ContractViolation("estimate_f_norm: horizon must be positive");
    if (sample_count < 2) sample_count = 2;

    std::mt19937_64 rng(rng_seed);
    std::vector<StateVector> states;
    states.emplace_back(f.dim());
    for (double scale : {0.5, 1.0, 10.0, 1e3}) {
        for (int i = 0; i < 4; ++i) states.push_back(scale * random_unit(f.dim(), rng));
    }

    auto sup_at = [&](double t) {
        double m = 0.0;
        for (const auto& u : states) m = std::max(m, f.evaluate(t, HullPoint{}, u).norm());
        return m;
    };

    double best = 0.0;
    int best_i = 0;
    const double step = horizon / (sample_count - 1);
    for (int i = 0; i < sample_count; ++i) {
        const double m = sup_at(step * i);
        if (m > best) {
            best = m;
            best_i = i;
        }
    }
    for (double tb : f.discontinuity_times())
        if (tb >= 0.0 && tb <= horizon) best = std::max(best, sup_at(tb));

    // Golden-section refinement on the bracket around the best grid time.
    double lo = std::max(0.0, step * (best_i - 1));
    double hi = std::min(horizon, step * (best_i + 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = sup_at(x1);
    double f2 = sup_at(x2);
    for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, horizon); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = sup_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = sup_at(x1);
        }
    }
    return std::max({best, f1, f2});
}

double hull_distance(HullPoint omega1, HullPoint omega2, const Forcing& f,
                     const BilinearForm& b, const HullGrid& grid) {
    if (grid.times.empty()) throw ContractViolation("hull_distance: empty time grid");
    double db = 0.0;
    double df = 0.0;
    for (double t : grid.times) {
        if (!b.is_zero()) {
            const double dq = std::abs(b.q().value(omega1.shift_tau + t) -
                                       b.q().value(omega2.shift_tau + t));
            db = std::max(db, dq * b.base_norm_bound());
        }
        if (f.autonomous() || omega1 == omega2) continue;
        if (grid.states.empty()) {
            const StateVector zero(f.dim());
            df = std::max(df, distance(f.evaluate(t, omega1, zero), f.evaluate(t, omega2, zero)));
        }
        for (const auto& u : grid.states)
            df = std::max(df, distance(f.evaluate(t, omega1, u), f.evaluate(t, omega2, u)));
    }
    return db + df;
}

}  // namespace impulsive
