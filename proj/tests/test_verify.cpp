#include "impulsive/errors.hpp"
#include "impulsive/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace impulsive;
using namespace impulsive::verify;

namespace {

std::shared_ptr<const DiagonalOperator> scalar_op() {
    return std::make_shared<const DiagonalOperator>(std::vector<double>{1.0}, 0.0);
}

// u' + u = c, u(0) = u0, jump +a at t = 1.
Trajectory linear_run(double u0, double c, double a, double T = 2.0, double dt = 1e-3) {
    const auto op = scalar_op();
    const DrivenSystem sys{BilinearForm::zero(op),
                           make_profile_forcing(TimeProfile::constant(1.0), StateVector{c}, 0.0,
                                                tanh_saturation, 1.0),
                           ImpulseSchedule({1.0}, {ImpulseOperator::constant_jump(StateVector{a})})};
    SolverConfig cfg;
    cfg.dt = dt;
    return integrate(*op, sys, StateVector{u0}, HullPoint{}, T, cfg);
}

// Synthetic two-sample path with an optional impulse record at t_imp.
Trajectory path(std::vector<std::pair<double, StateVector>> pts, double t_imp = -1.0) {
    Trajectory tr;
    for (auto& [t, u] : pts) tr.samples.push_back({t, u, t == t_imp});
    if (t_imp >= 0.0) tr.impulses.push_back({0, t_imp, StateVector(pts.front().second.dim()), 0.0});
    return tr;
}

}  // namespace

TEST_CASE("bound curve examples") {
    const std::vector<double> ts{0.0, 0.5, 1.0, 3.0};
    for (double b : bound_curve_eq35(2.0, 1.0, 0.5, {}, ts)) CHECK(b == doctest::Approx(2.0).epsilon(1e-15));

    // Frozen from the long double closed form e^{-2} + 0.5 e^{-1}.
    const double frozen = 0.319275;
    CHECK(static_cast<double>(std::exp(-2.0L) + 0.5L * std::exp(-1.0L)) == doctest::Approx(frozen).epsilon(1e-6));
    const std::vector<ImpulseHit> hit{{1.0, 0.5}};
    const std::vector<double> t2{2.0};
    CHECK(bound_curve_eq35(1.0, 0.0, 1.0, hit, t2)[0] == doctest::Approx(frozen).epsilon(1e-6));

    const auto curve = bound_curve_eq35(3.0, 1.0, 1.0, {}, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(curve[i] == doctest::Approx(2.0 * std::exp(-ts[i]) + 1.0).epsilon(1e-15));

    // Impulses count from their own time on.
    const std::vector<double> at{0.999, 1.0};
    const auto c2 = bound_curve_eq35(1.0, 0.0, 1.0, hit, at);
    CHECK(c2[0] == doctest::Approx(std::exp(-0.999)));
    CHECK(c2[1] == doctest::Approx(std::exp(-1.0) + 0.5));
    CHECK_THROWS_AS(bound_curve_eq35(1.0, 0.0, 0.0, {}, ts), DomainError);
}

TEST_CASE("C(r) case split") {
    CHECK(c_of_r(3.0, 1.0, 1.0) == 3.0);
    CHECK(c_of_r(0.5, 1.0, 1.0) == 1.0);
    CHECK(c_of_r(1.0, 2.0, 2.0) == 1.0);
}

TEST_CASE("global bound examples") {
    const Trajectory zero = path({{0.0, StateVector{0.0}}, {1.0, StateVector{0.0}}});
    const auto r0 = check_global_bound_b(zero, 0.0, 0.0, 1.0, 0.0);
    CHECK(r0.verdict == Verdict::pass);
    CHECK(r0.params.at("sup_norm") == 0.0);

    const Trajectory tr = path({{0.0, StateVector{3.0}}, {1.0, StateVector{4.4}}});
    const auto r1 = check_global_bound_b(tr, 3.0, 1.0, 1.0, 0.5);
    CHECK(r1.params.at("bound_2C_plus_Gamma") == doctest::Approx(6.5));
    CHECK(r1.params.at("sharper_bound") == doctest::Approx(4.5));
    CHECK(r1.verdict == Verdict::pass);
    const Trajectory over = path({{0.0, StateVector{3.0}}, {1.0, StateVector{4.6}}});
    CHECK(check_global_bound_b(over, 3.0, 1.0, 1.0, 0.5).verdict == Verdict::fail);

    const Trajectory small = path({{0.0, StateVector{0.5}}, {1.0, StateVector{1.4}}});
    const auto r2 = check_global_bound_b(small, 0.5, 1.0, 1.0, 0.0);
    CHECK(r2.params.at("C(r)") == 1.0);
    CHECK(r2.params.at("bound_2C_plus_Gamma") == doctest::Approx(2.0));
    CHECK(r2.verdict == Verdict::pass);

    CHECK_THROWS_AS(check_global_bound_b(tr, 3.0, 1.0, 1.0, INFINITY), PreconditionFailure);
}

TEST_CASE("max_violation is max(measured - predicted)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<double, StateVector>> pts;
        for (int i = 0; i < 20; ++i) pts.push_back({0.1 * i, StateVector{unif(rng)}});
        const double u0 = pts.front().second.norm();
        const auto r = check_global_bound_b(path(pts), u0, 1.0, 1.0, 0.2);
        double expect = -INFINITY;
        bool dominated = true;
        for (std::size_t i = 0; i < r.t.size(); ++i) {
            expect = std::max(expect, r.measured[i] - r.predicted[i]);
            dominated = dominated && r.measured[i] <= r.predicted[i] + r.tolerance;
        }
        CHECK(r.max_violation == expect);
        if (r.verdict == Verdict::pass) CHECK(dominated);
        if (!dominated) CHECK(r.verdict == Verdict::fail);
    }
}

TEST_CASE("linear scalar case saturates the comparison bound") {
    const Trajectory tr = linear_run(1.0, 0.0, 0.5);
    DissipativityParams p;
    p.alpha = 1.0;
    p.f1_norm = 0.0;
    p.Gamma = 0.5;
    p.entry_tol = 0.1;
    const auto res = check_dissipativity(tr, p);
    CHECK(res.eq35.verdict == Verdict::pass);
    CHECK(std::abs(res.eq35.max_violation) <= 1e-10);
    double slack = 0.0;
    for (std::size_t i = 0; i < res.eq35.t.size(); ++i)
        slack = std::max(slack, res.eq35.predicted[i] - res.eq35.measured[i]);
    CHECK(slack <= 1e-10);
    CHECK(res.absorbing.verdict == Verdict::pass);
    CHECK(res.absorbing.params.at("entry_time") <= res.absorbing.params.at("entry_time_formula"));

    p.Gamma = INFINITY;
    CHECK_THROWS_AS(check_dissipativity(tr, p), PreconditionFailure);
}

TEST_CASE("bound and linear trajectory scale together") {
    const double s = 3.0;
    const Trajectory t1 = linear_run(1.0, 0.4, 0.5);
    const Trajectory ts = linear_run(s, s * 0.4, s * 0.5);
    REQUIRE(t1.samples.size() == ts.samples.size());
    for (std::size_t i = 0; i < t1.samples.size(); ++i)
        CHECK(ts.samples[i].u[0] == doctest::Approx(s * t1.samples[i].u[0]).epsilon(1e-12));

    const auto times = t1.times();
    const auto b1 = bound_curve_eq35(1.0, 0.4, 1.0, impulse_hits(t1), times);
    const auto bs = bound_curve_eq35(s, s * 0.4, 1.0, impulse_hits(ts), times);
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(bs[i] == doctest::Approx(s * b1[i]).epsilon(1e-12));
}

TEST_CASE("absorbing check needs a long enough horizon") {
    const Trajectory tr = linear_run(5.0, 0.0, 0.5, 0.5);
    DissipativityParams p;
    p.Gamma = 0.5;
    CHECK(check_dissipativity(tr, p).absorbing.verdict == Verdict::inapplicable);
}

TEST_CASE("toy skew run obeys the dissipativity bounds") {
    const auto op = std::make_shared<const DiagonalOperator>(std::vector<double>{1.0, 1.5, 2.0, 3.0}, 0.0);
    const Forcing f = make_profile_forcing(TimeProfile::constant(1.0), StateVector{0.5, 0.2, 0.0, 0.1}, 0.0,
                                           tanh_saturation, 2.0);
    const ImpulseSchedule sched({1.0, 2.5}, {ImpulseOperator::constant_jump(StateVector{0.3, 0.0, 0.0, 0.0}),
                                             ImpulseOperator::scaled_saturation(0.2, StateVector{0.0, 1.0, 0.0, 0.0})});
    const DrivenSystem sys{make_skew_bilinear(op, TimeProfile::sine(0.5, 2.0)), f, sched};
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const StateVector u0{1.5, -1.0, 0.5, 0.8};
    const Trajectory tr = integrate(*op, sys, u0, HullPoint{}, 10.0, cfg);
    DissipativityParams p;
    p.alpha = op->coercivity();
    p.f1_norm = f.bounds().sup_norm_f1;
    p.Gamma = sched.Gamma();
    double sup = 0.0;
    for (double n : tr.norms()) sup = std::max(sup, n);
    p.dt2_budget = dt2_budget(cfg.dt, sup);
    const auto res = check_dissipativity(tr, p);
    CHECK(res.eq35.verdict == Verdict::pass);
    CHECK(res.absorbing.verdict == Verdict::pass);
    CHECK(check_global_bound_b(tr, u0.norm(), p.f1_norm, p.alpha, p.Gamma, 1e-6 + p.dt2_budget).verdict ==
          Verdict::pass);
}

TEST_CASE("contraction examples") {
    ContractionParams p;
    p.alpha = 0.5;
    p.f1_norm = 1.0;  // ball radius 2
    p.C2 = 0.5;
    CHECK(contraction_rate_beta(p) == 0.5);

    // Frozen from 1.5 e^{-1}, long double.
    const double frozen = 0.551819;
    CHECK(static_cast<double>(1.5L * std::exp(-1.0L)) == doctest::Approx(frozen).epsilon(1e-6));
    const Trajectory a = path({{0.0, StateVector{1.0}}, {1.0, StateVector{0.5}}, {2.0, StateVector{0.3}}}, 1.0);
    const Trajectory b = path({{0.0, StateVector{0.0}}, {1.0, StateVector{0.0}}, {2.0, StateVector{0.0}}});
    const auto r = check_contraction_28(a, b, p);
    CHECK(r.predicted.back() == doctest::Approx(frozen).epsilon(1e-6));
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.params.at("stays_in_r0_ball") == 1.0);

    const auto same = check_contraction_28(a, a, p);
    CHECK(same.verdict == Verdict::pass);
    for (double m : same.measured) CHECK(m == 0.0);

    const Trajectory far = path({{0.0, StateVector{3.0}}, {1.0, StateVector{0.0}}, {2.0, StateVector{0.0}}});
    CHECK(check_contraction_28(far, b, p).verdict == Verdict::precondition_failed);

    ContractionParams neg = p;
    neg.Binf = 1.0;
    CHECK(contraction_rate_beta(neg) < 0.0);
    CHECK(check_contraction_28(far, b, neg).verdict == Verdict::inapplicable);

    ContractionParams inf = p;
    inf.Gamma = INFINITY;
    CHECK(check_contraction_28(a, b, inf).verdict == Verdict::precondition_failed);

    const Trajectory short_path = path({{0.0, StateVector{0.0}}});
    CHECK_THROWS_AS(check_contraction_28(a, short_path, p), ContractViolation);
}

TEST_CASE("picard rate verdicts") {
    LocalSolveReport rep;
    rep.iter_residuals = {1.0, 0.8, 0.4, 0.2, 0.1, 0.0};
    rep.contraction_q = 0.6;
    const auto ok = check_picard_rate(rep);
    CHECK(ok.verdict == Verdict::pass);
    CHECK(ok.measured.size() == 4);  // the first ratio is skipped
    CHECK(ok.measured.front() == doctest::Approx(0.5));

    rep.contraction_q = 0.4;
    CHECK(check_picard_rate(rep).verdict == Verdict::fail);
    rep.contraction_q = 0.499;
    CHECK(check_picard_rate(rep, 1e-3).verdict == Verdict::pass);
    rep.contraction_q = 1.2;
    CHECK(check_picard_rate(rep).verdict == Verdict::inapplicable);
}

TEST_CASE("orthogonality verdicts") {
    const auto op = std::make_shared<const DiagonalOperator>(std::vector<double>{1.0, 2.0}, 0.0);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<std::pair<StateVector, StateVector>> pairs;
    for (int i = 0; i < 20; ++i) pairs.push_back({StateVector{g(rng), g(rng)}, StateVector{g(rng), g(rng)}});
    CHECK(check_orthogonality(make_skew_bilinear(op, TimeProfile::constant(1.0)), pairs).verdict == Verdict::pass);
    const BilinearForm sym(op, TimeProfile::constant(1.0),
                           [](const StateVector& u, const StateVector& v) { return u[0] * v; }, 1.0);
    CHECK(check_orthogonality(sym, pairs).verdict == Verdict::fail);
}

TEST_CASE("report json") {
    LocalSolveReport rep;
    rep.contraction_q = INFINITY;
    const auto j = to_json(check_picard_rate(rep));
    CHECK(j.at("theorem_id") == "picard_rate");
    CHECK(j.at("verdict") == "inapplicable");
    CHECK(j.at("params").at("q") == "inf");
    for (const char* key : {"params", "t", "predicted", "measured", "max_violation", "tolerance", "message"})
        CHECK(j.contains(key));
    CHECK(json_number(-INFINITY) == "-inf");
    CHECK(json_number(NAN) == "nan");
    CHECK(json_number(1.5) == 1.5);
}

TEST_CASE("orthogonality is sampled along the hull") {
    const auto op = std::make_shared<const DiagonalOperator>(std::vector<double>{1.0, 2.0}, 0.0);
    // q vanishes at tau = 0, so only shifted hull points test anything.
    const BilinearForm sym(op, TimeProfile::sine(1.0, 1.0),
                           [](const StateVector& u, const StateVector& v) { return u[0] * v; }, 1.0);
    const std::vector<std::pair<StateVector, StateVector>> pairs{{StateVector{1.0, 0.0}, StateVector{1.0, 1.0}}};
    CHECK(check_orthogonality(sym, pairs).verdict == Verdict::pass);
    const std::vector<HullPoint> omegas{HullPoint{1.0}};
    CHECK(check_orthogonality(sym, pairs, 1e-10, omegas).verdict == Verdict::fail);
}
