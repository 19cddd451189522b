#include "impulsive/app.hpp"

#include "impulsive/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace impulsive::app {

namespace {

namespace fs = std::filesystem;
using verify::TheoremId;
using verify::TheoremReport;
using verify::Verdict;
using verify::json_number;

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string problem_name(ProblemKind k) { return k == ProblemKind::ns2d ? "ns2d" : "abstract_toy"; }

nlohmann::json harness_json(const HarnessConstants& h) {
    return {{"alpha", json_number(h.alpha)}, {"f1_norm", json_number(h.f1_norm)},
            {"Binf", json_number(h.Binf)},   {"Gamma", json_number(h.Gamma)},
            {"C", json_number(h.C)},         {"C2", json_number(h.C2)},
            {"K2", json_number(h.K2)},       {"K3", json_number(h.K3)}};
}

nlohmann::json problem_json(const Scenario& s) {
    nlohmann::json j = {{"kind", problem_name(s.kind)},
                        {"dim", s.dim()},
                        {"seed", s.seed},
                        {"delta", s.op->frac_exponent()},
                        {"hull_shift", s.omega.shift_tau}};
    if (s.grid)
        j["grid"] = {{"n_modes", s.grid->n()},
                     {"kmax", s.grid->kmax()},
                     {"retained_modes", s.grid->modes().size()},
                     {"nu", s.nu}};
    return j;
}

nlohmann::json solver_json(const SolverConfig& c) {
    return {{"dt", c.dt},
            {"quad_substeps", c.quad_substeps},
            {"picard_tol", c.picard_tol},
            {"picard_max_iter", c.picard_max_iter},
            {"horizon_T", c.horizon_T},
            {"blowup_factor", c.blowup_factor}};
}

TheoremReport refused(TheoremId id, const std::string& why) {
    TheoremReport r;
    r.theorem_id = id;
    r.verdict = Verdict::precondition_failed;
    r.message = why;
    return r;
}

void echo(TheoremReport& r, const HarnessConstants& h) {
    r.params.emplace("alpha", h.alpha);
    r.params.emplace("f1_norm", h.f1_norm);
    r.params.emplace("Gamma", h.Gamma);
    r.params.emplace("C2", h.C2);
}

std::vector<std::pair<StateVector, StateVector>> orthogonality_pairs(const Scenario& s) {
    std::vector<std::pair<StateVector, StateVector>> pairs;
    const std::uint64_t base = s.verify.pair_seed * 7919 + 17;
    for (int i = 0; i < s.verify.orthogonality_samples; ++i) {
        const auto sa = base + 2 * static_cast<std::uint64_t>(i);
        if (s.grid) {
            pairs.emplace_back(ns2d::random_divfree(*s.grid, sa, 0.5),
                               ns2d::random_divfree(*s.grid, sa + 1, 0.5));
        } else {
            pairs.emplace_back(random_in_ball(s.dim(), 1.0, sa), random_in_ball(s.dim(), 1.0, sa + 1));
        }
    }
    return pairs;
}

std::vector<TheoremReport> contraction_reports(const Scenario& s, const HarnessConstants& h) {
    verify::ContractionParams p;
    p.alpha = h.alpha;
    p.Binf = h.Binf;
    p.f1_norm = h.f1_norm;
    p.Gamma = h.Gamma;
    p.C = h.C;
    p.C2 = h.C2;
    p.tol = s.verify.abs_tol;
    if (!std::isfinite(h.Gamma) || !(verify::contraction_rate_beta(p) > 0.0))
        return {verify::check_contraction_28(Trajectory{}, Trajectory{}, p)};

    const int n = s.verify.pairs;
    const double radius = h.f1_norm / h.alpha;
    std::vector<TheoremReport> out(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            const auto seed = s.verify.pair_seed + 2 * static_cast<std::uint64_t>(i);
            const StateVector u1 = random_in_ball(s.dim(), radius, seed);
            const StateVector u2 = random_in_ball(s.dim(), radius, seed + 1);
            const Trajectory t1 = integrate(*s.op, s.system, u1, s.omega, s.solver.horizon_T, s.solver);
            const Trajectory t2 = integrate(*s.op, s.system, u2, s.omega, s.solver.horizon_T, s.solver);
            out[i] = verify::check_contraction_28(t1, t2, p);
            out[i].params["pair"] = i;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

TheoremReport picard_report(const Scenario& s) {
    LocalSolveReport window;
    try {
        window = find_local_window(s.local_constants(), *s.op, s.u0, s.verify.radius_r,
                                   s.system.schedule);
    } catch (const NoAdmissibleWindow& e) {
        return refused(TheoremId::picard_rate, e.what());
    }
    try {
        const PicardResult pr = picard_iterate(*s.op, s.system, s.u0, s.omega, window.T0, s.solver, window);
        return verify::check_picard_rate(pr.report, s.verify.ratio_tol);
    } catch (const PicardError& e) {
        TheoremReport r;
        r.theorem_id = TheoremId::picard_rate;
        r.verdict = Verdict::fail;
        r.message = e.what();
        r.params = {{"q", window.contraction_q}, {"T0", window.T0}};
        return r;
    }
}

void set_threads(const RunOptions& opt) {
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
}

template <class Body>
int guarded(const fs::path& config, const RunOptions& opt, std::ostream& err, Body body) {
    try {
        set_threads(opt);
        Scenario s = load_scenario(config, opt.seed);
        fs::create_directories(opt.out_dir);
        return body(s);
    } catch (const config::ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const BlowUpError& e) {
        err << "numerical abort: " << e.what() << '\n';
        return exit_numerical_abort;
    } catch (const ContractViolation& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const DomainError& e) {
        err << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string trajectory_csv(const Scenario& s, const Trajectory& traj) {
    std::string out = kTrajectoryHeader;
    out += "\nt,norm_H,norm_V,is_impulse";
    if (s.dump_coefficients)
        for (std::size_t j = 0; j < s.dim(); ++j) out += ",c" + std::to_string(j);
    out += '\n';
    const std::size_t stride = static_cast<std::size_t>(s.output_stride);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& smp = traj.samples[i];
        if (i % stride != 0 && !smp.is_impulse && i + 1 != traj.samples.size()) continue;
        out += format_double(smp.t);
        out += ',';
        out += format_double(smp.u.norm());
        out += ',';
        out += format_double(fractional_norm(*s.op, 0.5, smp.u));
        out += smp.is_impulse ? ",1" : ",0";
        if (s.dump_coefficients)
            for (double c : smp.u.coeffs()) {
                out += ',';
                out += format_double(c);
            }
        out += '\n';
    }
    return out;
}

CsvTrajectory read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTrajectory c;
    std::string line;
    std::getline(in, line); // version
    std::getline(in, line); // columns
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 4) throw std::runtime_error("short row in " + path.string());
        auto num = [](const std::string& x) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(x.data(), x.data() + x.size(), v);
            if (ec != std::errc() || p != x.data() + x.size()) throw std::runtime_error("bad number '" + x + "'");
            return v;
        };
        c.t.push_back(num(cells[0]));
        c.norm_H.push_back(num(cells[1]));
        c.norm_V.push_back(num(cells[2]));
        c.is_impulse.push_back(cells[3] == "1");
    }
    return c;
}

VerifyOutcome run_verification(const Scenario& s) {
    VerifyOutcome out;
    const HarnessConstants h = s.harness_constants();
    const Trajectory traj = integrate(*s.op, s.system, s.u0, s.omega, s.solver.horizon_T, s.solver);
    const auto norms = traj.norms();
    const double sup = *std::max_element(norms.begin(), norms.end());
    const double budget = s.verify.dt2_budget.value_or(verify::dt2_budget(s.solver.dt, sup));
    bool gamma_refused = false;

    if (s.verify.dissipativity) {
        verify::DissipativityParams p;
        p.f1_norm = h.f1_norm;
        p.alpha = h.alpha;
        p.Gamma = h.Gamma;
        p.abs_tol = s.verify.abs_tol;
        p.dt2_budget = budget;
        p.entry_tol = s.verify.entry_tol;
        try {
            auto d = verify::check_dissipativity(traj, p);
            out.reports.push_back(std::move(d.eq35));
            out.reports.push_back(std::move(d.absorbing));
        } catch (const PreconditionFailure& e) {
            gamma_refused = true;
            out.reports.push_back(refused(TheoremId::EQ3_5_bound, e.what()));
            out.reports.push_back(refused(TheoremId::absorbing_set, e.what()));
        }
    }
    if (s.verify.global_bound) {
        try {
            out.reports.push_back(verify::check_global_bound_b(traj, s.u0.norm(), h.f1_norm, h.alpha,
                                                               h.Gamma, s.verify.abs_tol + budget));
        } catch (const PreconditionFailure& e) {
            gamma_refused = true;
            out.reports.push_back(refused(TheoremId::global_bound_b, e.what()));
        }
    }
    if (s.verify.contraction)
        for (auto& r : contraction_reports(s, h)) out.reports.push_back(std::move(r));
    if (s.verify.picard_rate) out.reports.push_back(picard_report(s));
    if (s.verify.orthogonality) {
        const auto pairs = orthogonality_pairs(s);
        // Spread the pairs over the driving data seen on [0, T].
        std::vector<HullPoint> omegas;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            omegas.push_back(shift(s.omega, s.solver.horizon_T * (i + 0.5) / pairs.size()));
        out.reports.push_back(
            verify::check_orthogonality(s.system.bilinear, pairs, s.verify.orthogonality_tol, omegas));
    }

    for (auto& r : out.reports) echo(r, h);

    if (gamma_refused) {
        out.exit_code = exit_config_error;
        out.message = "Gamma infinite: dissipativity checks refused (non-summable impulses)";
        return out;
    }
    for (const auto& r : out.reports)
        if (!r.ok()) {
            out.exit_code = exit_check_failed;
            out.message += std::string(verify::to_string(r.theorem_id)) + ": " +
                           std::string(verify::to_string(r.verdict)) +
                           (r.message.empty() ? "" : " (" + r.message + ")") + "\n";
        }
    return out;
}

std::string bounds_csv(const std::vector<TheoremReport>& reports) {
    std::string out = "theorem_id,series,t,measured,predicted\n";
    for (const auto& r : reports) {
        const auto id = std::string(verify::to_string(r.theorem_id));
        const auto it = r.params.find("pair");
        const std::string series = it == r.params.end() ? "0" : format_double(it->second);
        for (std::size_t i = 0; i < r.t.size(); ++i)
            out += id + ',' + series + ',' + format_double(r.t[i]) + ',' +
                   format_double(r.measured[i]) + ',' + format_double(r.predicted[i]) + '\n';
    }
    return out;
}

ConstantsOutcome compute_constants(const Scenario& s) {
    ConstantsOutcome out;
    const HarnessConstants h = s.harness_constants();
    const Constants c = s.local_constants();
    const double r = s.verify.radius_r;
    const double b_measured = estimate_B_norm(s.system.bilinear, 200, s.seed);
    const double f_measured = estimate_f_norm(s.system.forcing, s.solver.horizon_T, 64, s.seed);

    verify::ContractionParams cp;
    cp.alpha = h.alpha;
    cp.Binf = h.Binf;
    cp.f1_norm = h.f1_norm;
    cp.Gamma = h.Gamma;
    cp.C = h.C;

    nlohmann::json& d = out.doc;
    d["problem"] = problem_json(s);
    d["constants"] = harness_json(h);
    d["measured"] = {{"Binf", json_number(b_measured)}, {"f1_norm", json_number(f_measured)}};
    d["analytic"] = {{"Binf", json_number(s.system.bilinear.norm_bound())},
                     {"f1_norm", json_number(s.system.forcing.bounds().sup_norm_f1)}};
    d["local"] = {{"K", c.K},       {"K1", c.K1}, {"alpha1", c.alpha1}, {"Binf", json_number(c.Binf)},
                  {"N", c.N},       {"M", c.M},   {"K2", json_number(c.K2)}, {"K3", json_number(c.K3)}};
    d["derived"] = {{"r0", json_number(2.0 * h.f1_norm / h.alpha + h.Gamma)},
                    {"beta", json_number(verify::contraction_rate_beta(cp))},
                    {"absorbing_radius", json_number(h.f1_norm / h.alpha + h.Gamma)}};
    d["unverified_impulse_constants"] = s.system.schedule.has_unverified_constants();

    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : window_table(c, *s.op, s.u0, r, s.system.schedule))
        table.push_back({{"T", row.T},           {"n_T", row.n_T},     {"q", json_number(row.q)},
                         {"delta", row.delta},   {"d1", json_number(row.d1)},
                         {"admissible", row.admissible}});
    d["window"] = {{"r", r}, {"u0_norm", s.u0.norm()}, {"table", table}};
    try {
        const LocalSolveReport w = find_local_window(c, *s.op, s.u0, r, s.system.schedule);
        d["window"]["selected"] = {{"delta0", w.delta0},
                                   {"T0", w.T0},
                                   {"q", w.contraction_q},
                                   {"d1", w.d1_value},
                                   {"n_T", w.n_T},
                                   {"impulse_free_T0", w.impulse_free_T0}};
    } catch (const NoAdmissibleWindow& e) {
        d["window"]["selected"] = nullptr;
        d["window"]["error"] = e.what();
        out.exit_code = exit_check_failed;
        out.message = e.what();
    }
    return out;
}

int cmd_simulate(const fs::path& config, const RunOptions& opt, std::ostream& err) {
    return guarded(config, opt, err, [&](const Scenario& s) {
        const auto start = std::chrono::steady_clock::now();
        const Trajectory traj = integrate(*s.op, s.system, s.u0, s.omega, s.solver.horizon_T, s.solver);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_file(opt.out_dir / "trajectory.csv", trajectory_csv(s, traj));

        nlohmann::json run = {{"format", "impulsive run v1"},
                              {"config", config.string()},
                              {"problem", problem_json(s)},
                              {"solver", solver_json(s.solver)},
                              {"constants", harness_json(s.harness_constants())},
                              {"samples", traj.samples.size()},
                              {"impulses", traj.impulses.size()},
                              {"final_norm_H", traj.final_state().norm()},
                              {"timings", {{"integrate_seconds", seconds}}}};
        write_file(opt.out_dir / "run.json", run.dump(2) + "\n");
        return static_cast<int>(exit_ok);
    });
}

int cmd_verify(const fs::path& config, const RunOptions& opt, std::ostream& err) {
    return guarded(config, opt, err, [&](const Scenario& s) {
        const VerifyOutcome v = run_verification(s);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : v.reports) arr.push_back(verify::to_json(r));
        write_file(opt.out_dir / "reports.json", arr.dump(2) + "\n");
        write_file(opt.out_dir / "bounds.csv", bounds_csv(v.reports));
        if (!v.message.empty()) err << v.message << (v.message.back() == '\n' ? "" : "\n");
        return v.exit_code;
    });
}

int cmd_constants(const fs::path& config, const RunOptions& opt, std::ostream& err) {
    return guarded(config, opt, err, [&](const Scenario& s) {
        const ConstantsOutcome c = compute_constants(s);
        write_file(opt.out_dir / "constants.json", c.doc.dump(2) + "\n");
        if (!c.message.empty()) err << c.message << '\n';
        return c.exit_code;
    });
}

}  // namespace impulsive::app
