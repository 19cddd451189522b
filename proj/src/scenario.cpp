#include "impulsive/scenario.hpp"

#include "impulsive/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace impulsive {

namespace {

using config::ConfigError;
using config::Document;
using config::Table;
using Keys = std::vector<std::string_view>;

constexpr long long kMaxSeed = 1LL << 53;

const Keys kProfileKeys = {"profile", "value", "amplitude", "frequency", "phase", "times", "values"};
const Keys kImpulseOpKeys = {"kind", "amplitude", "vector", "field", "field_seed", "kolmogorov_k"};

Keys join(Keys a, const Keys& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// What the builders of vectors need to know about the problem.
struct Space {
    std::size_t dim;
    std::shared_ptr<const ns2d::TorusGrid> grid;
    double nu;
};

TimeProfile parse_profile(const Table& t, double default_value) {
    const std::string kind = t.string("profile", "constant");
    if (kind == "constant") return TimeProfile::constant(t.number("value", default_value));
    if (kind == "sine")
        return TimeProfile::sine(t.number("amplitude"), t.number("frequency"), t.number("phase", 0.0));
    if (kind == "piecewise") {
        try {
            return TimeProfile::piecewise(t.numbers("times"), t.numbers("values"));
        } catch (const ContractViolation& e) {
            t.fail("times", e.what());
        }
    }
    t.fail("profile", "expected constant, sine or piecewise; got '" + kind + "'");
}

StateVector explicit_vector(const Table& t, std::string_view key, std::size_t dim) {
    std::vector<double> v = t.numbers(key);
    if (v.size() != dim)
        t.fail(key, "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
    return StateVector(std::move(v));
}

StateVector named_field(const Space& sp, const Table& t, std::string_view key) {
    const std::string name = t.string(key);
    if (!sp.grid) t.fail(key, "named fields need problem kind ns2d");
    const auto& grid = *sp.grid;
    if (name == "taylor_green") return ns2d::taylor_green(grid, 0.0, sp.nu);
    if (name == "kolmogorov")
        return ns2d::kolmogorov_pattern(grid, 1.0,
                                        static_cast<int>(t.integer("kolmogorov_k", 1, 1, grid.kmax())));
    if (name == "random_divfree")
        return ns2d::random_divfree(
            grid, static_cast<std::uint64_t>(t.integer("field_seed", 1, 0, kMaxSeed)), 0.5);
    t.fail(key, "unknown field '" + name + "' (taylor_green, kolmogorov, random_divfree)");
}

// An explicit vector as given, or a named field scaled to unit norm.
StateVector vector_or_field(const Space& sp, const Table& t) {
    if (t.has("vector") && t.has("field")) t.fail("field", "give either vector or field, not both");
    if (t.has("vector")) return explicit_vector(t, "vector", sp.dim);
    if (!t.has("field")) t.fail("vector", "required key missing (or give field)");
    StateVector v = named_field(sp, t, "field");
    const double n = v.norm();
    if (n == 0.0) t.fail("field", "field vanishes on the retained modes");
    v *= 1.0 / n;
    return v;
}

ImpulseOperator parse_impulse_op(const Space& sp, const Table& t) {
    const std::string kind = t.string("kind");
    const double amp = t.number("amplitude", 1.0);
    if (kind == "zero") return ImpulseOperator::zero();
    if (kind == "constant_jump") {
        StateVector c = vector_or_field(sp, t);
        c *= amp;
        return ImpulseOperator::constant_jump(std::move(c));
    }
    if (kind == "scaled_saturation") {
        StateVector dir = vector_or_field(sp, t);
        if (dir.norm() == 0.0) t.fail("vector", "direction must be nonzero");
        return ImpulseOperator::scaled_saturation(amp, std::move(dir));
    }
    t.fail("kind", "expected zero, constant_jump or scaled_saturation; got '" + kind + "'");
}

ImpulseSchedule parse_schedule(const Document& doc, const Space& sp) {
    std::vector<double> times;
    std::vector<ImpulseOperator> ops;
    for (const Table& t : doc.array("impulse")) {
        t.restrict_keys(join({"time"}, kImpulseOpKeys));
        const double time = t.number("time");
        if (!(time > 0.0)) t.fail("time", "impulse times must be positive");
        if (!times.empty() && !(time > times.back()))
            t.fail("time", "impulse times must be strictly increasing");
        times.push_back(time);
        ops.push_back(parse_impulse_op(sp, t));
    }
    ImpulseSchedule schedule(std::move(times), std::move(ops));
    if (doc.has_table("impulse_repeat")) {
        const Table t = doc.table("impulse_repeat");
        t.restrict_keys(join({"period"}, kImpulseOpKeys));
        const double period = t.number("period");
        if (!(period > 0.0)) t.fail("period", "must be positive");
        schedule.set_periodic_tail(period, parse_impulse_op(sp, t));
    }
    return schedule;
}

StateVector parse_u0(const Document& doc, const Space& sp, std::uint64_t seed) {
    const Table t = doc.table("u0");
    t.restrict_keys({"kind", "coefficients", "seed", "energy", "norm"});
    const std::string kind = t.string("kind", "zero");
    const auto u0_seed = static_cast<std::uint64_t>(
        t.integer("seed", static_cast<long long>(seed), 0, kMaxSeed));
    if (kind == "zero") return StateVector(sp.dim);
    if (kind == "explicit") return explicit_vector(t, "coefficients", sp.dim);
    if (kind == "random") {
        const double norm = t.number("norm", 1.0);
        if (norm < 0.0) t.fail("norm", "must be nonnegative");
        std::mt19937_64 rng(u0_seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        StateVector v(sp.dim);
        for (std::size_t j = 0; j < sp.dim; ++j) v[j] = normal(rng);
        v *= norm / v.norm();
        return v;
    }
    if (!sp.grid) t.fail("kind", "'" + kind + "' needs problem kind ns2d, or use explicit/random/zero");
    if (kind == "taylor_green") return ns2d::taylor_green(*sp.grid, 0.0, sp.nu);
    if (kind == "random_divfree") {
        const double energy = t.number("energy", 0.5);
        if (energy < 0.0) t.fail("energy", "must be nonnegative");
        return ns2d::random_divfree(*sp.grid, u0_seed, energy);
    }
    t.fail("kind", "unknown initial state '" + kind + "'");
}

SolverConfig parse_solver(const Table& t) {
    t.restrict_keys({"dt", "quad_substeps", "picard_tol", "picard_max_iter", "horizon_T",
                     "blowup_factor"});
    SolverConfig c;
    c.dt = t.number("dt", c.dt);
    c.quad_substeps = static_cast<int>(t.integer("quad_substeps", c.quad_substeps, 1, 1 << 20));
    c.picard_tol = t.number("picard_tol", c.picard_tol);
    c.picard_max_iter = static_cast<int>(t.integer("picard_max_iter", c.picard_max_iter, 1, 1 << 20));
    c.horizon_T = t.number("horizon_T", c.horizon_T);
    c.blowup_factor = t.number("blowup_factor", c.blowup_factor);
    return c;
}

VerifySettings parse_verify(const Table& t, std::uint64_t seed) {
    t.restrict_keys({"dissipativity", "global_bound", "contraction", "picard_rate", "orthogonality",
                     "abs_tol", "dt2_budget", "entry_tol", "pairs", "pair_seed", "radius",
                     "ratio_tol", "orthogonality_samples", "orthogonality_tol"});
    VerifySettings v;
    v.dissipativity = t.boolean("dissipativity", v.dissipativity);
    v.global_bound = t.boolean("global_bound", v.global_bound);
    v.contraction = t.boolean("contraction", v.contraction);
    v.picard_rate = t.boolean("picard_rate", v.picard_rate);
    v.orthogonality = t.boolean("orthogonality", v.orthogonality);
    v.abs_tol = t.number("abs_tol", v.abs_tol);
    v.dt2_budget = t.maybe_number("dt2_budget");
    v.entry_tol = t.number("entry_tol", v.entry_tol);
    if (!(v.entry_tol > 0.0)) t.fail("entry_tol", "must be positive");
    v.pairs = static_cast<int>(t.integer("pairs", v.pairs, 1, 100000));
    v.pair_seed = static_cast<std::uint64_t>(
        t.integer("pair_seed", static_cast<long long>(seed + 1), 0, kMaxSeed));
    v.radius_r = t.number("radius", v.radius_r);
    if (!(v.radius_r > 0.0)) t.fail("radius", "must be positive");
    v.ratio_tol = t.number("ratio_tol", v.ratio_tol);
    v.orthogonality_samples =
        static_cast<int>(t.integer("orthogonality_samples", v.orthogonality_samples, 1, 1000000));
    v.orthogonality_tol = t.number("orthogonality_tol", v.orthogonality_tol);
    return v;
}

ConstantOverrides parse_overrides(const Table& t) {
    t.restrict_keys({"alpha", "f1_norm", "Binf", "Gamma", "C", "C2", "K2", "K3"});
    ConstantOverrides o;
    o.alpha = t.maybe_number("alpha");
    o.f1_norm = t.maybe_number("f1_norm");
    o.Binf = t.maybe_number("Binf");
    o.Gamma = t.maybe_number("Gamma");
    o.C = t.maybe_number("C");
    o.C2 = t.maybe_number("C2");
    o.K2 = t.maybe_number("K2");
    o.K3 = t.maybe_number("K3");
    if (o.alpha && !(*o.alpha > 0.0)) t.fail("alpha", "must be positive");
    return o;
}

}  // namespace

HarnessConstants Scenario::harness_constants() const {
    const auto& fb = system.forcing.bounds();
    HarnessConstants h{};
    h.alpha = overrides.alpha.value_or(op->coercivity());
    h.f1_norm = overrides.f1_norm.value_or(fb.sup_norm_f1);
    h.Binf = overrides.Binf.value_or(system.bilinear.norm_bound());
    h.Gamma = overrides.Gamma.value_or(system.schedule.Gamma());
    h.C = overrides.C.value_or(fb.lipschitz_u);
    h.K2 = overrides.K2.value_or(system.schedule.K2());
    h.K3 = overrides.K3.value_or(system.schedule.K3());
    h.C2 = overrides.C2.value_or(h.K3);
    return h;
}

Constants Scenario::local_constants() const {
    Constants c = constants_of(*op, system);
    if (overrides.Binf) c.Binf = *overrides.Binf;
    if (overrides.K2) c.K2 = *overrides.K2;
    if (overrides.K3) c.K3 = *overrides.K3;
    return c;
}

Scenario build_scenario(const Document& doc, std::optional<std::uint64_t> seed_override) {
    doc.restrict_sections({"problem", "toy", "ns2d", "q", "forcing", "impulse", "impulse_repeat",
                           "u0", "solver", "hull", "verify", "constants", "output"});

    const Table problem = doc.table("problem");
    problem.restrict_keys({"kind", "seed"});
    const std::string kind_name = problem.string("kind");
    const std::uint64_t seed = seed_override.value_or(
        static_cast<std::uint64_t>(problem.integer("seed", 1, 0, kMaxSeed)));

    ProblemKind kind;
    Space sp{0, nullptr, 0.0};
    std::shared_ptr<const DiagonalOperator> op;
    const Table q_table = doc.table("q");
    q_table.restrict_keys(kProfileKeys);
    const TimeProfile q = parse_profile(q_table, 1.0);
    std::optional<BilinearForm> bilinear;

    if (kind_name == "abstract_toy") {
        kind = ProblemKind::abstract_toy;
        if (doc.has_table("ns2d")) doc.table("ns2d").fail("n_modes", "section [ns2d] given for abstract_toy");
        const Table t = doc.table("toy");
        t.restrict_keys({"eigenvalues", "delta", "bilinear"});
        std::vector<double> eig = t.numbers("eigenvalues");
        try {
            op = std::make_shared<const DiagonalOperator>(std::move(eig), t.number("delta", 0.0));
        } catch (const std::exception& e) {
            t.fail("eigenvalues", e.what());
        }
        sp.dim = op->dim();
        const std::string b = t.string("bilinear", "none");
        if (b == "none") {
            bilinear = BilinearForm::zero(op);
        } else if (b == "skew") {
            if (sp.dim < 2 || sp.dim % 2 != 0) t.fail("bilinear", "skew form needs an even dimension");
            bilinear = make_skew_bilinear(op, q);
        } else {
            t.fail("bilinear", "expected none or skew; got '" + b + "'");
        }
    } else if (kind_name == "ns2d") {
        kind = ProblemKind::ns2d;
        if (doc.has_table("toy")) doc.table("toy").fail("eigenvalues", "section [toy] given for ns2d");
        const Table t = doc.table("ns2d");
        t.restrict_keys({"n_modes", "nu", "delta", "backend"});
        const int n = static_cast<int>(t.integer("n_modes", 32, 8, 4096));
        if (n % 2 != 0) t.fail("n_modes", "must be even");
        const std::string backend = t.string("backend", "openmp");
        if (backend != "openmp" && backend != "serial") t.fail("backend", "expected openmp or serial");
        sp.nu = t.number("nu", 0.1);
        if (!(sp.nu > 0.0)) t.fail("nu", "must be positive");
        sp.grid = std::make_shared<const ns2d::TorusGrid>(
            n, backend == "serial" ? kernels::Backend::serial : kernels::Backend::openmp);
        try {
            op = std::make_shared<const DiagonalOperator>(
                ns2d::stokes_operator(sp.nu, *sp.grid, t.number("delta", 0.5)));
        } catch (const std::exception& e) {
            t.fail("delta", e.what());
        }
        sp.dim = op->dim();
        bilinear = ns2d::make_ns_bilinear(sp.grid, op, sp.nu, q);
    } else {
        problem.fail("kind", "expected abstract_toy or ns2d; got '" + kind_name + "'");
    }

    const Table ft = doc.table("forcing");
    ft.restrict_keys(join(kProfileKeys, {"pattern", "pattern_amplitude", "kolmogorov_k", "lipschitz"}));
    Forcing forcing = Forcing::zero(sp.dim);
    if (doc.has_table("forcing")) {
        const TimeProfile profile = parse_profile(ft, 1.0);
        const double lip = ft.number("lipschitz", 0.0);
        if (lip < 0.0) ft.fail("lipschitz", "must be nonnegative");
        StateVector pattern(sp.dim);
        if (kind == ProblemKind::ns2d) {
            const std::string name = ft.string("pattern", "none");
            if (name == "kolmogorov") {
                pattern = ns2d::kolmogorov_pattern(
                    *sp.grid, ft.number("pattern_amplitude", 1.0),
                    static_cast<int>(ft.integer("kolmogorov_k", 1, 1, sp.grid->kmax())));
            } else if (name != "none") {
                ft.fail("pattern", "expected kolmogorov or none; got '" + name + "'");
            }
            forcing = ns2d::make_ns_forcing(sp.grid, profile, std::move(pattern), lip);
        } else {
            if (ft.has("pattern")) pattern = explicit_vector(ft, "pattern", sp.dim);
            pattern *= ft.number("pattern_amplitude", 1.0);
            forcing = make_profile_forcing(profile, std::move(pattern), lip, tanh_saturation,
                                           std::sqrt(static_cast<double>(sp.dim)));
        }
    }

    ImpulseSchedule schedule = parse_schedule(doc, sp);

    Scenario s(DrivenSystem{std::move(*bilinear), std::move(forcing), std::move(schedule)});
    s.kind = kind;
    s.source = doc.source();
    s.seed = seed;
    s.op = op;
    s.grid = sp.grid;
    s.nu = sp.nu;
    s.u0 = parse_u0(doc, sp, seed);

    const Table solver = doc.table("solver");
    s.solver = parse_solver(solver);
    try {
        s.solver.validate(s.system.schedule);
    } catch (const ContractViolation& e) {
        solver.fail("dt", e.what());
    }

    const Table hull = doc.table("hull");
    hull.restrict_keys({"shift"});
    s.omega.shift_tau = hull.number("shift", 0.0);
    if (s.omega.shift_tau < 0.0) hull.fail("shift", "must be nonnegative");

    s.verify = parse_verify(doc.table("verify"), seed);
    s.overrides = parse_overrides(doc.table("constants"));

    const Table out = doc.table("output");
    out.restrict_keys({"coefficients", "stride"});
    s.dump_coefficients = out.boolean("coefficients", false);
    s.output_stride = static_cast<int>(out.integer("stride", 1, 1, 1 << 30));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    return build_scenario(config::parse_file(path), seed_override);
}

StateVector random_in_ball(std::size_t dim, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    StateVector v(dim);
    double n = 0.0;
    while (n == 0.0) {
        for (std::size_t j = 0; j < dim; ++j) v[j] = normal(rng);
        n = v.norm();
    }
    const double rho = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim));
    v *= rho / n;
    return v;
}

}  // namespace impulsive
