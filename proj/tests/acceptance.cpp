// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "impulsive/app.hpp"
#include "impulsive/errors.hpp"
#include "impulsive/mild_solver.hpp"
#include "impulsive/ns2d.hpp"
#include "impulsive/scenario.hpp"
#include "impulsive/verify.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace impulsive;
namespace fs = std::filesystem;
using verify::TheoremId;
using verify::TheoremReport;
using verify::Verdict;

namespace {

const fs::path kConfigs = IMPULSIVE_CONFIGS;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every trajectory computed here, with the schedule that produced it, for
// the jump exactness criterion.
struct Recorded {
    std::string name;
    Trajectory traj;
    ImpulseSchedule schedule;
    double horizon;
    double shift;
};
std::vector<Recorded> g_recorded;

Trajectory run(const std::string& name, const DiagonalOperator& a, const DrivenSystem& sys,
               const StateVector& u0, HullPoint omega, double T, const SolverConfig& cfg) {
    Trajectory tr = integrate(a, sys, u0, omega, T, cfg);
    g_recorded.push_back({name, tr, sys.schedule, T, omega.shift_tau});
    return tr;
}

Trajectory run(const Scenario& s) {
    return run(s.source, *s.op, s.system, s.u0, s.omega, s.solver.horizon_T, s.solver);
}

const TheoremReport* find(const std::vector<TheoremReport>& rs, TheoremId id) {
    for (const auto& r : rs)
        if (r.theorem_id == id) return &r;
    return nullptr;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + IMPULSIVE_CLI + "\" " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string csv_body(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string header;
    std::getline(in, header);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------------------

Outcome linear_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto op = std::make_shared<const DiagonalOperator>(std::vector<double>{1.0}, 0.0);
    const DrivenSystem sys{BilinearForm::zero(op), Forcing::zero(1),
                           ImpulseSchedule({1.0}, {ImpulseOperator::constant_jump(StateVector{0.5})})};
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Trajectory tr = run("linear scalar", *op, sys, StateVector{1.0}, HullPoint{}, 2.0, cfg);
    const double elapsed = seconds_since(t0);
    auto exact = [](double t) { return t < 1.0 ? std::exp(-t) : std::exp(-t) + 0.5 * std::exp(1.0 - t); };
    double err = 0.0;
    for (const auto& s : tr.samples) err = std::max(err, std::abs(s.u[0] - exact(s.t)));
    for (const auto& r : tr.impulses) err = std::max(err, std::abs(r.left[0] - std::exp(-r.t)));
    return {err <= 1e-10 && elapsed < 1.0 && tr.samples.back().t == 2.0,
            fmt("max error %.3g (<= 1e-10), u(2) = %.6f, %.3f s (< 1 s)", err, tr.final_state()[0], elapsed)};
}

Outcome etd_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto op = std::make_shared<const DiagonalOperator>(std::vector<double>{1e-3, 0.5, 1.0, 7.0, 120.0}, 0.0);
    const StateVector c{0.7, -1.2, 0.3, 2.0, -0.5};
    const StateVector u0{1.0, 2.0, -0.5, 0.25, 3.0};
    const DrivenSystem sys{BilinearForm::zero(op),
                           make_profile_forcing(TimeProfile::constant(1.0), c, 0.0, tanh_saturation, 1.0),
                           ImpulseSchedule{}};
    double err = 0.0;
    for (double dt : {1e-4, 1e-3, 0.01, 0.1, 0.37, 1.0, 2.0}) {
        SolverConfig cfg;
        cfg.dt = dt;
        const Trajectory tr = run(fmt("etd dt=%g", dt), *op, sys, u0, HullPoint{}, 2.0, cfg);
        for (const auto& s : tr.samples)
            for (std::size_t j = 0; j < u0.dim(); ++j) {
                const long double lam = op->eigenvalues()[j], t = s.t;
                const long double ex = std::exp(-lam * t) * u0[j] - std::expm1(-lam * t) / lam * c[j];
                err = std::max(err, std::abs(s.u[j] - static_cast<double>(ex)));
            }
    }
    const double elapsed = seconds_since(t0);
    return {err <= 1e-12 && elapsed < 1.0, fmt("max error %.3g over dt in [1e-4, 2] (<= 1e-12), %.3f s (< 1 s)", err, elapsed)};
}

Outcome taylor_green() {
    const auto t0 = std::chrono::steady_clock::now();
    const double nu = 0.1;
    auto grid = std::make_shared<const ns2d::TorusGrid>(32);
    auto op = std::make_shared<const DiagonalOperator>(ns2d::stokes_operator(nu, *grid));
    const DrivenSystem sys{ns2d::make_ns_bilinear(grid, op, nu, TimeProfile::constant(1.0)),
                           Forcing::zero(grid->state_dim()), ImpulseSchedule{}};
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Trajectory tr = run("taylor green", *op, sys, ns2d::taylor_green(*grid, 0.0, nu), HullPoint{}, 1.0, cfg);
    double rel = 0.0;
    for (const auto& s : tr.samples) {
        const StateVector ex = ns2d::taylor_green(*grid, s.t, nu);
        rel = std::max(rel, distance(s.u, ex) / ex.norm());
    }
    const double elapsed = seconds_since(t0);
    return {rel <= 1e-6 && elapsed < 30.0 && tr.samples.back().t == 1.0,
            fmt("max relative L2 error %.3g (<= 1e-6), %.2f s (< 30 s)", rel, elapsed)};
}

Outcome orthogonality() {
    const double nu = 0.1;
    auto grid = std::make_shared<const ns2d::TorusGrid>(32);
    auto op = std::make_shared<const DiagonalOperator>(ns2d::stokes_operator(nu, *grid));
    const BilinearForm b = ns2d::make_ns_bilinear(grid, op, nu, TimeProfile::constant(1.0));
    std::vector<std::pair<StateVector, StateVector>> pairs;
    for (std::uint64_t i = 0; i < 100; ++i)
        pairs.emplace_back(ns2d::random_divfree(*grid, 7000 + 2 * i, 0.5),
                           ns2d::random_divfree(*grid, 7001 + 2 * i, 0.5));
    const TheoremReport r = verify::check_orthogonality(b, pairs, 1e-10);
    return {r.verdict == Verdict::pass && r.measured.size() == 100,
            fmt("100 pairs, max |<B(u,v),v>|/(|u||v|^2) = %.3g (<= 1e-10)", r.max_violation + 1e-10)};
}

// Random toy skew instances shared by the Picard criteria.
struct PicardInstance {
    std::shared_ptr<const DiagonalOperator> op;
    DrivenSystem sys;
    StateVector u0;
    LocalSolveReport window;
};

std::vector<PicardInstance> picard_instances() {
    std::vector<PicardInstance> out;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> g;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> eig(4);
        for (auto& e : eig) e = 0.5 + 3.5 * u01(rng);
        std::sort(eig.begin(), eig.end());
        auto op = std::make_shared<const DiagonalOperator>(eig, 0.0);
        const double lq = 0.2 + 0.8 * u01(rng);
        const double lip = 0.5 * u01(rng);
        StateVector pattern{g(rng), g(rng), g(rng), g(rng)};
        pattern *= (0.5 * u01(rng)) / pattern.norm();
        const double t_imp = 0.01 + 0.2 * u01(rng);
        StateVector dir{g(rng), g(rng), g(rng), g(rng)};
        const DrivenSystem sys{
            make_skew_bilinear(op, TimeProfile::sine(lq, 0.5 + 2.5 * u01(rng), u01(rng))),
            make_profile_forcing(TimeProfile::constant(1.0), pattern, lip, tanh_saturation, 2.0),
            ImpulseSchedule({t_imp}, {ImpulseOperator::scaled_saturation(0.3 * u01(rng), dir)})};
        const StateVector u0 = random_in_ball(4, 1.0, 100 + i);
        const LocalSolveReport w = find_local_window(constants_of(*op, sys), *op, u0, 1.0, sys.schedule);
        out.push_back({op, sys, u0, w});
    }
    return out;
}

SolverConfig picard_cfg() {
    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.quad_substeps = 1;
    cfg.picard_tol = 1e-13;
    return cfg;
}

Outcome picard_rate(const std::vector<PicardInstance>& inst) {
    std::size_t ok = 0, ratios = 0;
    double worst = -INFINITY, max_q = 0.0;
    for (const auto& p : inst) {
        const auto pr = picard_iterate(*p.op, p.sys, p.u0, HullPoint{}, p.window.T0, picard_cfg(), p.window);
        const TheoremReport r = verify::check_picard_rate(pr.report, 1e-3);
        max_q = std::max(max_q, p.window.contraction_q);
        ratios += r.measured.size();
        if (r.verdict == Verdict::pass && p.window.contraction_q < 1.0) ++ok;
        for (std::size_t i = 0; i < r.measured.size(); ++i)
            worst = std::max(worst, r.measured[i] - p.window.contraction_q);
    }
    return {ok == inst.size(),
            fmt("%zu/%zu instances, %zu ratios, max(ratio - q) = %.3g (<= 1e-3), max q = %.3f", ok, inst.size(),
                ratios, worst, max_q)};
}

Outcome picard_equivalence(const std::vector<PicardInstance>& inst) {
    double worst = 0.0;
    bool aligned = true;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& p = inst[i];
        const auto pr = picard_iterate(*p.op, p.sys, p.u0, HullPoint{}, p.window.T0, picard_cfg(), p.window);
        g_recorded.push_back({fmt("picard %zu", i), pr.path, p.sys.schedule, p.window.T0, 0.0});
        const Trajectory tr = run(fmt("picard oracle %zu", i), *p.op, p.sys, p.u0, HullPoint{}, p.window.T0, picard_cfg());
        if (pr.path.samples.size() != tr.samples.size()) {
            aligned = false;
            continue;
        }
        for (std::size_t k = 0; k < tr.samples.size(); ++k) {
            aligned = aligned && pr.path.samples[k].t == tr.samples[k].t;
            worst = std::max(worst, distance(pr.path.samples[k].u, tr.samples[k].u));
        }
    }
    return {aligned && worst <= 1e-8, fmt("max d_inf over 20 windows %.3g (<= 1e-8)", worst)};
}

// Runs the certificates of a shipped scenario with the given toggles.
std::vector<TheoremReport> certify(const std::string& file, bool diss, bool global, bool contraction) {
    Scenario s = load_scenario(kConfigs / file);
    s.verify.dissipativity = diss;
    s.verify.global_bound = global;
    s.verify.contraction = contraction;
    s.verify.picard_rate = false;
    s.verify.orthogonality = false;
    run(s);
    return app::run_verification(s).reports;
}

Outcome dissipativity() {
    std::string detail;
    bool ok = true;
    for (const char* file : {"toy_skew.toml", "ns2d_unforced.toml"}) {
        const auto rs = certify(file, true, false, false);
        const auto* eq = find(rs, TheoremId::EQ3_5_bound);
        const auto* ab = find(rs, TheoremId::absorbing_set);
        const bool good = eq && ab && eq->verdict == Verdict::pass && ab->verdict == Verdict::pass &&
                          std::isfinite(eq->params.at("Gamma"));
        ok = ok && good;
        if (eq && ab)
            detail += fmt("%s: violation %.3g <= tol %.3g, entered B0 by t=%.3g; ", file, eq->max_violation,
                          eq->tolerance, ab->params.at("entry_time"));
    }
    // Tightness canary: the linear scalar case sits on the bound.
    const auto rs = certify("linear_scalar.toml", true, false, false);
    const auto* eq = find(rs, TheoremId::EQ3_5_bound);
    double slack = 0.0;
    for (std::size_t i = 0; eq && i < eq->t.size(); ++i) slack = std::max(slack, eq->predicted[i] - eq->measured[i]);
    const bool canary = eq && eq->verdict == Verdict::pass && std::abs(eq->max_violation) <= 1e-10 && slack <= 1e-10;
    detail += fmt("canary max|bound - |u|| = %.3g (<= 1e-10)", std::max(slack, eq ? std::abs(eq->max_violation) : 1.0));
    return {ok && canary, detail};
}

Outcome global_bound() {
    bool ok = true, above = false, below = false;
    double worst = -INFINITY;
    std::size_t runs = 0;
    for (const char* file : {"linear_scalar.toml", "toy_skew.toml", "toy_contraction.toml", "ns2d_unforced.toml",
                             "ns2d_kolmogorov.toml", "ns2d_taylor_green.toml"}) {
        const auto rs = certify(file, false, true, false);
        const auto* r = find(rs, TheoremId::global_bound_b);
        if (!r) {
            ok = false;
            continue;
        }
        ++runs;
        ok = ok && r->verdict == Verdict::pass;
        worst = std::max(worst, r->max_violation);
        const double eq = r->params.at("f1_norm") / r->params.at("alpha");
        if (r->params.at("u0_norm") >= eq) above = true;
        else below = true;
    }
    return {ok && above && below,
            fmt("%zu runs, max(sup|u| - (2C + Gamma)) = %.3g (<= 1e-6), branches |u0| >= f1/alpha: %s, < f1/alpha: %s",
                runs, worst, above ? "yes" : "no", below ? "yes" : "no")};
}

Outcome contraction() {
    const auto rs = certify("toy_contraction.toml", false, false, true);
    std::size_t pass = 0, pairs = 0;
    double beta = 0.0, worst = -INFINITY;
    for (const auto& r : rs) {
        if (r.theorem_id != TheoremId::contraction_28) continue;
        ++pairs;
        beta = r.params.at("beta");
        worst = std::max(worst, r.max_violation);
        if (r.verdict == Verdict::pass) ++pass;
    }
    const fs::path out = fs::temp_directory_path() / "impulsive_acceptance_beta";
    fs::remove_all(out);
    const int code = run_cli("--out-dir \"" + out.string() + "\" verify \"" +
                             (kConfigs / "toy_beta_negative.toml").string() + "\"");
    bool inapplicable = false;
    std::ifstream in(out / "reports.json");
    if (in) {
        for (const auto& r : nlohmann::json::parse(in))
            if (r.at("theorem_id") == "contraction_28") inapplicable = r.at("verdict") == "inapplicable";
    }
    return {pairs == 10 && pass == 10 && beta > 0.0 && code == 0 && inapplicable,
            fmt("%zu/%zu pairs pass with beta = %.3f, max violation %.3g (<= 1e-6); beta <= 0 config: %s, exit %d",
                pass, pairs, beta, worst, inapplicable ? "inapplicable" : "NOT inapplicable", code)};
}

Outcome jump_exactness() {
    std::size_t jumps = 0;
    std::string bad;
    for (const auto& rec : g_recorded) {
        const auto& tr = rec.traj;
        // In-horizon impulse times, in the trajectory's own clock.
        const auto expected = rec.schedule.indices_in(rec.shift, rec.shift + rec.horizon);
        std::size_t s = 0;
        if (tr.impulses.size() != expected.size()) bad = rec.name + " (left limits missing)";
        for (const auto& imp : tr.impulses) {
            while (s < tr.samples.size() && !(tr.samples[s].is_impulse && tr.samples[s].t == imp.t)) ++s;
            if (s == tr.samples.size()) {
                bad = rec.name + " (no post-jump sample)";
                break;
            }
            const StateVector expect = imp.left + rec.schedule.op(imp.index)(imp.left);
            if (!(tr.samples[s].u == expect)) bad = rec.name;
            ++jumps;
        }
    }
    return {bad.empty() && jumps > 0,
            fmt("%zu jumps over %zu trajectories bit-exact%s%s", jumps, g_recorded.size(),
                bad.empty() ? "" : ", mismatch in ", bad.c_str())};
}

Outcome determinism() {
    bool same = true;
    std::string detail;
    for (const char* file : {"toy_skew.toml", "ns2d_kolmogorov.toml"}) {
        std::string body[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = fs::temp_directory_path() / fmt("impulsive_acceptance_det_%d", k);
            fs::remove_all(out);
            const int code = run_cli(fmt("--threads %d --seed 17 --out-dir \"%s\" simulate \"%s\"", k == 0 ? 1 : 4,
                                         out.string().c_str(), (kConfigs / file).string().c_str()));
            same = same && code == 0;
            body[k] = csv_body(out / "trajectory.csv");
        }
        same = same && !body[0].empty() && body[0] == body[1];
        detail += fmt("%s %zu bytes identical; ", file, body[0].size());
    }
    detail += "threads 1 vs 4";
    return {same, detail};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<PicardInstance> inst;
    const std::vector<Criterion> criteria{
        {"linear impulsive closed form", linear_closed_form},
        {"ETD exactness", etd_exactness},
        {"Taylor-Green regression", taylor_green},
        {"energy orthogonality", orthogonality},
        {"Picard rate", [&] {
             inst = picard_instances();
             return picard_rate(inst);
         }},
        {"Picard / time-stepping equivalence", [&] { return picard_equivalence(inst); }},
        {"dissipativity", dissipativity},
        {"global bound", global_bound},
        {"two-solution contraction", contraction},
        {"jump exactness", jump_exactness},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
