#include "impulsive/verify.hpp"

#include "impulsive/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace impulsive::verify {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

nlohmann::json numbers(const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(json_number(x));
    return arr;
}

void finish(TheoremReport& r) {
    double worst = kNegInf;
    for (std::size_t i = 0; i < r.measured.size(); ++i)
        worst = std::max(worst, r.measured[i] - r.predicted[i]);
    r.max_violation = r.measured.empty() ? 0.0 : worst;
    r.verdict = r.max_violation <= r.tolerance ? Verdict::pass : Verdict::fail;
}

}  // namespace

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

std::string_view to_string(TheoremId id) {
    switch (id) {
    case TheoremId::EQ3_5_bound: return "EQ3_5_bound";
    case TheoremId::global_bound_b: return "global_bound_b";
    case TheoremId::absorbing_set: return "absorbing_set";
    case TheoremId::contraction_28: return "contraction_28";
    case TheoremId::picard_rate: return "picard_rate";
    case TheoremId::orthogonality: return "orthogonality";
    }
    return "unknown";
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inapplicable: return "inapplicable";
    case Verdict::precondition_failed: return "precondition_failed";
    }
    return "unknown";
}

nlohmann::json to_json(const TheoremReport& r) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.params) params[k] = json_number(v);
    return {
        {"theorem_id", to_string(r.theorem_id)},
        {"params", params},
        {"t", numbers(r.t)},
        {"predicted", numbers(r.predicted)},
        {"measured", numbers(r.measured)},
        {"max_violation", json_number(r.max_violation)},
        {"tolerance", json_number(r.tolerance)},
        {"verdict", to_string(r.verdict)},
        {"message", r.message},
    };
}

std::vector<ImpulseHit> impulse_hits(const Trajectory& traj) {
    std::vector<ImpulseHit> hits;
    hits.reserve(traj.impulses.size());
    for (const auto& rec : traj.impulses) hits.push_back({rec.t, rec.jump_norm});
    return hits;
}

std::vector<double> bound_curve_eq35(double u0_norm, double f1_norm, double alpha,
                                     std::span<const ImpulseHit> impulses,
                                     std::span<const double> t_grid) {
    if (!(alpha > 0.0)) throw DomainError("bound_curve_eq35: alpha must be positive");
    const double eq = f1_norm / alpha;
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        double b = (u0_norm - eq) * std::exp(-alpha * t) + eq;
        for (const auto& hit : impulses)
            if (hit.t <= t) b += hit.magnitude * std::exp(-alpha * (t - hit.t));
        out.push_back(b);
    }
    return out;
}

double c_of_r(double r, double f1_norm, double alpha) {
    const double eq = f1_norm / alpha;
    return r >= eq ? r : eq;
}

double dt2_budget(double dt, double sup_norm, double coeff) { return coeff * dt * dt * sup_norm; }

DissipativityResult check_dissipativity(const Trajectory& traj, const DissipativityParams& p) {
    if (!std::isfinite(p.Gamma))
        throw PreconditionFailure("Gamma infinite: impulse magnitudes are not summable");
    if (traj.samples.empty()) throw ContractViolation("check_dissipativity: empty trajectory");

    const auto times = traj.times();
    const auto norms = traj.norms();
    const auto hits = impulse_hits(traj);
    const double u0_norm = norms.front();
    const double eq = p.f1_norm / p.alpha;
    const double tol = p.abs_tol + p.dt2_budget;

    std::map<std::string, double> params{
        {"alpha", p.alpha}, {"f1_norm", p.f1_norm}, {"Gamma", p.Gamma},
        {"u0_norm", u0_norm}, {"dt2_budget", p.dt2_budget}};

    DissipativityResult res;
    auto& b = res.eq35;
    b.theorem_id = TheoremId::EQ3_5_bound;
    b.params = params;
    b.t = times;
    b.measured = norms;
    b.predicted = bound_curve_eq35(u0_norm, p.f1_norm, p.alpha, hits, times);
    b.tolerance = tol;
    finish(b);

    auto& a = res.absorbing;
    a.theorem_id = TheoremId::absorbing_set;
    a.params = params;
    const double radius = eq + p.Gamma + p.entry_tol;
    // After t_formula, (|u0| - f1/alpha) e^{-alpha t} <= entry_tol and the
    // impulse sum is at most Gamma. The recorded impulse terms usually give
    // an earlier time: the first sample after which the curve stays in B0.
    const double t_formula =
        std::max(0.0, std::log(std::max(u0_norm - eq, 1e-30) / p.entry_tol) / p.alpha);
    double t_curve = std::numeric_limits<double>::infinity();
    for (std::size_t i = times.size(); i-- > 0;) {
        if (b.predicted[i] > radius) break;
        t_curve = times[i];
    }
    const double t_entry = std::min(t_formula, t_curve);
    a.params["B0_radius"] = radius;
    a.params["entry_time"] = t_entry;
    a.params["entry_time_formula"] = t_formula;
    a.params["entry_time_curve"] = t_curve;
    a.tolerance = tol;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_entry) continue;
        a.t.push_back(times[i]);
        a.measured.push_back(norms[i]);
        a.predicted.push_back(radius);
    }
    if (a.t.empty()) {
        a.verdict = Verdict::inapplicable;
        a.message = "horizon ends before the bound-derived entry time";
    } else {
        finish(a);
    }
    return res;
}

TheoremReport check_global_bound_b(const Trajectory& traj, double u0_norm, double f1_norm,
                                   double alpha, double Gamma, double tol) {
    if (!std::isfinite(Gamma))
        throw PreconditionFailure("Gamma infinite: impulse magnitudes are not summable");
    TheoremReport r;
    r.theorem_id = TheoremId::global_bound_b;
    const double c = c_of_r(u0_norm, f1_norm, alpha);
    const double bound_b = 2.0 * c + Gamma;
    const double sharper = u0_norm + f1_norm / alpha + Gamma;
    r.t = traj.times();
    r.measured = traj.norms();
    r.predicted.assign(r.t.size(), bound_b);
    r.tolerance = tol;
    finish(r);

    const double sup = r.measured.empty() ? 0.0 : *std::max_element(r.measured.begin(), r.measured.end());
    r.params = {{"alpha", alpha},         {"f1_norm", f1_norm},     {"Gamma", Gamma},
                {"u0_norm", u0_norm},     {"C(r)", c},              {"bound_2C_plus_Gamma", bound_b},
                {"sharper_bound", sharper}, {"sup_norm", sup},      {"sharper_violation", sup - sharper}};
    if (sup - sharper > tol) {
        r.verdict = Verdict::fail;
        r.message = "sharper bound |u0| + f1/alpha + Gamma violated";
    }
    return r;
}

double contraction_rate_beta(const ContractionParams& p) {
    const double r0 = 2.0 * p.f1_norm / p.alpha + p.Gamma;
    return p.alpha - 2.0 * p.Binf * r0 - p.C;
}

TheoremReport check_contraction_28(const Trajectory& traj1, const Trajectory& traj2,
                                   const ContractionParams& p) {
    TheoremReport r;
    r.theorem_id = TheoremId::contraction_28;
    r.tolerance = p.tol;
    const double r0 = 2.0 * p.f1_norm / p.alpha + p.Gamma;
    const double beta = contraction_rate_beta(p);
    r.params = {{"alpha", p.alpha}, {"Binf", p.Binf}, {"f1_norm", p.f1_norm}, {"Gamma", p.Gamma},
                {"C", p.C},         {"C2", p.C2},     {"r0", r0},             {"beta", beta}};

    if (!std::isfinite(p.Gamma)) {
        r.verdict = Verdict::precondition_failed;
        r.message = "Gamma infinite";
        return r;
    }
    if (!(beta > 0.0)) {
        r.verdict = Verdict::inapplicable;
        r.message = "beta <= 0: estimate makes no claim";
        return r;
    }
    if (traj1.samples.size() != traj2.samples.size())
        throw ContractViolation("check_contraction_28: trajectories sampled differently");

    const double ball = p.f1_norm / p.alpha;
    const double n1 = traj1.samples.front().u.norm();
    const double n2 = traj2.samples.front().u.norm();
    if (n1 > ball * (1.0 + 1e-12) || n2 > ball * (1.0 + 1e-12)) {
        r.verdict = Verdict::precondition_failed;
        r.message = "initial states outside the ball of radius f1/alpha";
        r.params["u1_0_norm"] = n1;
        r.params["u2_0_norm"] = n2;
        return r;
    }

    const double gap0 = distance(traj1.samples.front().u, traj2.samples.front().u);
    double max_norm = 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < traj1.samples.size(); ++i) {
        const auto& s1 = traj1.samples[i];
        const auto& s2 = traj2.samples[i];
        if (s1.t != s2.t) throw ContractViolation("check_contraction_28: sample times differ");
        while (hit < traj1.impulses.size() && traj1.impulses[hit].t <= s1.t) ++hit;
        r.t.push_back(s1.t);
        r.measured.push_back(distance(s1.u, s2.u));
        r.predicted.push_back(std::pow(1.0 + p.C2, static_cast<double>(hit)) *
                              std::exp(-beta * s1.t) * gap0);
        max_norm = std::max({max_norm, s1.u.norm(), s2.u.norm()});
    }
    finish(r);
    r.params["max_trajectory_norm"] = max_norm;
    r.params["stays_in_r0_ball"] = max_norm <= r0 ? 1.0 : 0.0;
    return r;
}

TheoremReport check_picard_rate(const LocalSolveReport& report, double tol) {
    TheoremReport r;
    r.theorem_id = TheoremId::picard_rate;
    r.tolerance = 0.0;
    const double q = report.contraction_q;
    r.params = {{"q", q},           {"T0", report.T0},     {"delta0", report.delta0},
                {"d1", report.d1_value}, {"n_T", static_cast<double>(report.n_T)},
                {"ratio_tol", tol}, {"iterations", static_cast<double>(report.iter_residuals.size())}};
    if (!(q < 1.0)) {
        r.verdict = Verdict::inapplicable;
        r.message = "q >= 1: no contraction claimed";
        return r;
    }
    const auto& res = report.iter_residuals;
    for (std::size_t n = 1; n + 1 < res.size(); ++n) {
        if (res[n] == 0.0) continue;
        r.t.push_back(static_cast<double>(n + 1));
        r.measured.push_back(res[n + 1] / res[n]);
        r.predicted.push_back(q + tol);
    }
    finish(r);
    return r;
}

TheoremReport check_orthogonality(const BilinearForm& b,
                                  std::span<const std::pair<StateVector, StateVector>> pairs,
                                  double tol, std::span<const HullPoint> omegas) {
    TheoremReport r;
    r.theorem_id = TheoremId::orthogonality;
    r.tolerance = 0.0;
    r.params = {{"samples", static_cast<double>(pairs.size())}, {"rel_tol", tol}};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [u, v] = pairs[i];
        const double scale = u.norm() * v.norm() * v.norm();
        const HullPoint omega = omegas.empty() ? HullPoint{} : omegas[i % omegas.size()];
        const double inner = std::abs(b.evaluate(omega, u, v).dot(v));
        r.t.push_back(static_cast<double>(i));
        r.measured.push_back(scale == 0.0 ? inner : inner / scale);
        r.predicted.push_back(tol);
    }
    finish(r);
    return r;
}

}  // namespace impulsive::verify
