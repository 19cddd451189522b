#include "impulsive/mild_solver.hpp"

#include "impulsive/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace impulsive {

namespace {

void check_alpha1(const Constants& c) {
    if (!(c.alpha1 >= 0.0 && c.alpha1 < 1.0))
        throw DomainError("alpha1 must lie in [0, 1), got " + std::to_string(c.alpha1));
}

double singular_integral(const Constants& c, double T) {
    return std::pow(T, 1.0 - c.alpha1) / (1.0 - c.alpha1);
}

// Impulse times in (0, T] and forcing jumps (shifted into local time) in (0, T).
std::vector<double> breakpoints_for(const DrivenSystem& system, HullPoint omega, double T) {
    std::vector<double> bp;
    for (std::size_t k : system.schedule.indices_in(0.0, T)) bp.push_back(system.schedule.time(k));
    for (double tb : system.forcing.discontinuity_times()) {
        const double local = tb - omega.shift_tau;
        if (local > 0.0 && local < T) bp.push_back(local);
    }
    return bp;
}

// Impulse index landing exactly on node t, if any.
std::optional<std::size_t> impulse_at(const ImpulseSchedule& schedule, double t_prev, double t) {
    for (std::size_t k : schedule.indices_in(t_prev, t))
        if (schedule.time(k) == t) return k;
    return std::nullopt;
}

}  // namespace

void SolverConfig::validate(const ImpulseSchedule& schedule) const {
    if (!(dt > 0.0)) throw ContractViolation("solver.dt must be positive");
    if (quad_substeps < 1) throw ContractViolation("solver.quad_substeps must be >= 1");
    if (!(picard_tol > 0.0)) throw ContractViolation("solver.picard_tol must be positive");
    if (picard_max_iter < 1) throw ContractViolation("solver.picard_max_iter must be >= 1");
    if (!(horizon_T > 0.0)) throw ContractViolation("solver.horizon must be positive");
    if (!(blowup_factor > 0.0)) throw ContractViolation("solver.blowup_factor must be positive");
    const double gap = schedule.min_gap(horizon_T);
    if (!(dt < gap))
        throw ContractViolation("solver.dt=" + std::to_string(dt) +
                                " must be smaller than the minimum impulse gap " +
                                std::to_string(gap));
}

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    t.reserve(samples.size());
    for (const auto& s : samples) t.push_back(s.t);
    return t;
}

std::vector<double> Trajectory::norms() const {
    std::vector<double> n;
    n.reserve(samples.size());
    for (const auto& s : samples) n.push_back(s.u.norm());
    return n;
}

Constants constants_of(const DiagonalOperator& a, const DrivenSystem& system) {
    Constants c;
    c.K = DiagonalOperator::semigroup_constant();
    c.K1 = a.smoothing_constant();
    c.alpha1 = a.smoothing_exponent();
    c.Binf = system.bilinear.norm_bound();
    c.N = system.forcing.bounds().lipschitz_L;
    c.M = system.forcing.bounds().bound_M;
    c.K2 = system.schedule.K2();
    c.K3 = system.schedule.K3();
    return c;
}

double contraction_constant(const Constants& c, double r, double u0_norm, double T,
                            std::size_t n_T) {
    check_alpha1(c);
    if (!(T > 0.0)) throw DomainError("contraction_constant: T must be positive");
    return 2.0 * c.Binf * c.K1 * (r + u0_norm) * singular_integral(c, T) + c.K * c.N * T +
           c.K * c.K3 * static_cast<double>(n_T);
}

double invariance_radius_d1(const Constants& c, double u0_norm, double r, double /*delta*/,
                            double T, std::size_t n_T, double m_est) {
    check_alpha1(c);
    if (!(T > 0.0)) throw DomainError("invariance_radius_d1: T must be positive");
    const double R = u0_norm + r;
    return m_est + c.K1 * c.Binf * R * R * singular_integral(c, T) + c.K * c.N * R * T +
           c.K * c.M * T + c.K * c.K2 * static_cast<double>(n_T);
}

double estimate_m(const DiagonalOperator& a, const StateVector& u0, double delta, double T,
                  int grid_points) {
    if (grid_points < 2) throw ContractViolation("estimate_m: grid_points must be >= 2");
    if (T < 0.0) throw DomainError("estimate_m: negative T");
    double m = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double t = T * i / (grid_points - 1);
        m = std::max(m, distance(semigroup_apply(a, t, u0), u0));
    }
    // |e^{-At}u - u0| <= |e^{-At}(u - u0)| + |e^{-At}u0 - u0|, K = 1
    return m + delta;
}

std::vector<WindowRow> window_table(const Constants& c, const DiagonalOperator& a,
                                    const StateVector& u0, double r,
                                    const ImpulseSchedule& schedule, const WindowSearch& search) {
    if (!(r > 0.0)) throw ContractViolation("window search radius r must be positive");
    check_alpha1(c);
    const double u0_norm = u0.norm();
    const int levels = search.levels_per_decade * search.decades;
    constexpr int kDeltaPerDecade = 4;

    std::vector<WindowRow> rows;
    rows.reserve(static_cast<std::size_t>(levels) + 1);
    for (int j = 0; j <= levels; ++j) {
        const double T = search.T_max * std::pow(10.0, -static_cast<double>(j) / search.levels_per_decade);
        WindowRow row{};
        row.T = T;
        row.n_T = schedule.count_upto(T);
        row.q = contraction_constant(c, r, u0_norm, T, row.n_T);
        const double m0 = estimate_m(a, u0, 0.0, T, search.m_grid_points);
        const double base = invariance_radius_d1(c, u0_norm, r, 0.0, T, row.n_T, m0);
        // d1 is increasing in delta; take the largest grid delta still inside r.
        row.delta = 0.0;
        row.d1 = base;
        for (int i = 0; i <= kDeltaPerDecade * search.decades; ++i) {
            const double delta = r * std::pow(10.0, -static_cast<double>(i) / kDeltaPerDecade);
            const double d1 = base + delta;
            if (d1 <= r) {
                row.delta = delta;
                row.d1 = d1;
                break;
            }
            row.d1 = d1;
        }
        row.admissible = row.q < 1.0 && row.delta > 0.0;
        rows.push_back(row);
    }
    return rows;
}

LocalSolveReport find_local_window(const Constants& c, const DiagonalOperator& a,
                                   const StateVector& u0, double r,
                                   const ImpulseSchedule& schedule, const WindowSearch& search) {
    const auto rows = window_table(c, a, u0, r, schedule, search);
    LocalSolveReport rep;
    bool found = false;
    for (const auto& row : rows) {
        if (!row.admissible) continue;
        if (!found) {
            rep.T0 = row.T;
            rep.delta0 = row.delta;
            rep.contraction_q = row.q;
            rep.d1_value = row.d1;
            rep.n_T = row.n_T;
            found = true;
        }
        if (row.n_T == 0) {
            rep.impulse_free_T0 = row.T;
            break;
        }
    }
    if (!found)
        throw NoAdmissibleWindow("no admissible window: d1 <= r and q < 1 fail down to T=" +
                                 std::to_string(rows.back().T));
    return rep;
}

std::vector<double> time_nodes(double T, double h, std::vector<double> breakpoints) {
    if (!(T > 0.0) || !(h > 0.0)) throw ContractViolation("time_nodes: T and h must be positive");
    std::erase_if(breakpoints, [T](double b) { return !(b > 0.0 && b < T); });
    breakpoints.push_back(T);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    std::vector<double> nodes{0.0};
    double a = 0.0;
    for (double b : breakpoints) {
        const auto n = std::max<long long>(1, static_cast<long long>(std::ceil((b - a) / h - 1e-9)));
        for (long long i = 1; i < n; ++i) nodes.push_back(a + static_cast<double>(i) * h);
        nodes.push_back(b);
        a = b;
    }
    return nodes;
}

StateVector step_etd(const DiagonalOperator& a, const DrivenSystem& system, const StateVector& u,
                     double t, double h, HullPoint omega) {
    if (!(h > 0.0)) throw ContractViolation("step_etd: step must be positive");
    for (std::size_t k : system.schedule.indices_in(t, t + h))
        if (system.schedule.time(k) < t + h)
            throw ContractViolation("step_etd: impulse time " + std::to_string(system.schedule.time(k)) +
                                    " inside step interval");

    const StateVector g0 = system.rhs(t, omega, u, Side::right);
    StateVector base = etd1_apply(a, h, u, g0);
    const StateVector g1 = system.rhs(t + h, omega, base, Side::left);
    base += phi2_apply(a, h, g1 - g0);
    return base;
}

Trajectory integrate(const DiagonalOperator& a, const DrivenSystem& system, const StateVector& u0,
                     HullPoint omega, double horizon_T, const SolverConfig& cfg) {
    if (!(horizon_T > 0.0)) throw DomainError("integrate: horizon must be positive");
    if (u0.dim() != a.dim()) throw ContractViolation("integrate: u0 dimension mismatch");
    const double guard = cfg.blowup_factor * (u0.norm() + 1.0);
    const auto nodes = time_nodes(horizon_T, cfg.dt, breakpoints_for(system, omega, horizon_T));

    Trajectory traj;
    traj.samples.reserve(nodes.size() + 1);
    traj.samples.push_back({0.0, u0, false});
    StateVector u = u0;
    for (std::size_t j = 1; j < nodes.size(); ++j) {
        const double t0 = nodes[j - 1];
        const double t1 = nodes[j];
        u = step_etd(a, system, u, t0, t1 - t0, omega);
        bool jumped = false;
        if (auto k = impulse_at(system.schedule, t0, t1)) {
            const double jump_norm = system.schedule.op(*k)(u).norm();
            traj.impulses.push_back({*k, t1, u, jump_norm});
            u = apply_impulse(system.schedule, *k, u);
            jumped = true;
        }
        const double n = u.norm();
        if (!(n <= guard)) throw BlowUpError(t1, n);
        traj.samples.push_back({t1, u, jumped});
    }
    return traj;
}

PicardResult picard_iterate(const DiagonalOperator& a, const DrivenSystem& system,
                            const StateVector& u0, HullPoint omega, double T,
                            const SolverConfig& cfg, const LocalSolveReport& window) {
    if (!(T > 0.0)) throw DomainError("picard_iterate: window must be positive");
    if (u0.dim() != a.dim()) throw ContractViolation("picard_iterate: u0 dimension mismatch");
    const double h = cfg.dt / cfg.quad_substeps;
    const auto nodes = time_nodes(T, h, breakpoints_for(system, omega, T));
    const std::size_t n = nodes.size();

    std::vector<std::optional<std::size_t>> jump_at(n);
    for (std::size_t j = 1; j < n; ++j) jump_at[j] = impulse_at(system.schedule, nodes[j - 1], nodes[j]);

    // Path values: right[j] = phi(t_j), left[j] = phi(t_j^-).
    std::vector<StateVector> right(n, u0);
    std::vector<StateVector> left(n, u0);

    LocalSolveReport rep = window;
    rep.iter_residuals.clear();
    int growth = 0;
    bool converged = false;
    for (int it = 0; it < cfg.picard_max_iter; ++it) {
        std::vector<StateVector> new_right(n);
        std::vector<StateVector> new_left(n);
        new_right[0] = u0;
        new_left[0] = u0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double hj = nodes[j + 1] - nodes[j];
            const StateVector g0 = system.rhs(nodes[j], omega, right[j], Side::right);
            const StateVector g1 = system.rhs(nodes[j + 1], omega, left[j + 1], Side::left);
            StateVector s = etd1_apply(a, hj, new_right[j], g0);
            s += phi2_apply(a, hj, g1 - g0);
            new_left[j + 1] = s;
            if (jump_at[j + 1])
                s += system.schedule.op(*jump_at[j + 1])(left[j + 1]);
            new_right[j + 1] = std::move(s);
        }
        double res = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            res = std::max(res, distance(new_right[j], right[j]));
            res = std::max(res, distance(new_left[j], left[j]));
        }
        right = std::move(new_right);
        left = std::move(new_left);

        if (!rep.iter_residuals.empty() && res > rep.iter_residuals.back())
            ++growth;
        else
            growth = 0;
        rep.iter_residuals.push_back(res);
        if (res <= cfg.picard_tol) {
            converged = true;
            break;
        }
        if (growth >= 3)
            throw PicardError(PicardError::Kind::diverged,
                              "picard diverged: residual grew for 3 consecutive iterations (last " +
                                  std::to_string(res) + ")");
    }
    if (!converged)
        throw PicardError(PicardError::Kind::max_iter,
                          "picard max-iter exhausted after " + std::to_string(cfg.picard_max_iter) +
                              " iterations (residual " + std::to_string(rep.iter_residuals.back()) + ")");

    PicardResult result;
    result.report = std::move(rep);
    auto& traj = result.path;
    traj.samples.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (jump_at[j]) {
            // Re-anchor the jump on the converged left limit so the stored
            // post-jump state is exactly u(t_k^-) + I_k(u(t_k^-)).
            const std::size_t k = *jump_at[j];
            traj.impulses.push_back({k, nodes[j], left[j], system.schedule.op(k)(left[j]).norm()});
            traj.samples.push_back({nodes[j], apply_impulse(system.schedule, k, left[j]), true});
        } else {
            traj.samples.push_back({nodes[j], right[j], false});
        }
    }
    return result;
}

}  // namespace impulsive
