#include "impulsive/ns2d.hpp"

#include "impulsive/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

namespace impulsive::ns2d {

namespace {

constexpr double kPi = std::numbers::pi;
// Basis normalisation: |cos(k.x)|_{L^2} = pi sqrt 2 on the 2pi-torus.
const double kBasisScale = kPi * std::numbers::sqrt2;

// FFTW planning is not thread safe; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::span<cplx> s) { return reinterpret_cast<fftw_complex*>(s.data()); }

struct Perp {
    double e1;
    double e2;
};

Perp perp(const Mode& m) {
    const double k = std::sqrt(static_cast<double>(m.k_sq));
    return {-m.k2 / k, m.k1 / k};
}

// Split the transform W of w1 + i w2 (w1, w2 real) into the two spectra.
void unpack_real_pair(const TorusGrid& grid, std::span<const cplx> packed, int k1, int k2,
                      cplx& w1, cplx& w2) {
    const cplx a = packed[grid.index(k1, k2)];
    const cplx b = std::conj(packed[grid.index(-k1, -k2)]);
    w1 = 0.5 * (a + b);
    w2 = cplx(0.0, -0.5) * (a - b);
}

// Project a pair of spectra onto the state basis.
StateVector project_spectra(const TorusGrid& grid, std::span<const cplx> w1,
                            std::span<const cplx> w2) {
    StateVector out(grid.state_dim());
    const auto modes = grid.modes();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const auto [e1, e2] = perp(modes[m]);
        const std::size_t p = grid.index(modes[m].k1, modes[m].k2);
        const cplx s = e1 * w1[p] + e2 * w2[p];
        out[2 * m] = 2.0 * kBasisScale * s.real();
        out[2 * m + 1] = -2.0 * kBasisScale * s.imag();
    }
    return out;
}

StateVector project_packed(const TorusGrid& grid, std::span<const cplx> packed) {
    StateVector out(grid.state_dim());
    const auto modes = grid.modes();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        cplx w1, w2;
        unpack_real_pair(grid, packed, modes[m].k1, modes[m].k2, w1, w2);
        const auto [e1, e2] = perp(modes[m]);
        const cplx s = e1 * w1 + e2 * w2;
        out[2 * m] = 2.0 * kBasisScale * s.real();
        out[2 * m + 1] = -2.0 * kBasisScale * s.imag();
    }
    return out;
}

void check_state(const TorusGrid& grid, const StateVector& u) {
    if (u.dim() != grid.state_dim())
        throw ContractViolation("ns2d: state dim " + std::to_string(u.dim()) + " != " +
                                std::to_string(grid.state_dim()));
}

void check_dealiased(const TorusGrid& grid, const VelocityField& f) {
    const int n = grid.n();
    if (f.u1_hat.size() != grid.points() || f.u2_hat.size() != grid.points())
        throw ContractViolation("ns2d: velocity field has wrong grid size");
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int k1 = kernels::wavenumber(i, n);
            const int k2 = kernels::wavenumber(j, n);
            if (std::abs(k1) <= grid.kmax() && std::abs(k2) <= grid.kmax()) continue;
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            if (f.u1_hat[p] != cplx{} || f.u2_hat[p] != cplx{})
                throw ContractViolation("ns2d: input not dealiased (energy at k=(" +
                                        std::to_string(k1) + "," + std::to_string(k2) + "))");
        }
    }
}

// Spectrum of the packed gradient d1 v_i + i d2 v_i from v_hat_i.
std::vector<cplx> packed_gradient(const TorusGrid& grid, std::span<const cplx> v_hat) {
    const int n = grid.n();
    std::vector<cplx> g(grid.points());
    for (int i = 0; i < n; ++i) {
        const double k1 = kernels::wavenumber(i, n);
        for (int j = 0; j < n; ++j) {
            const double k2 = kernels::wavenumber(j, n);
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            // i k1 v + i (i k2 v)
            g[p] = cplx(0.0, k1) * v_hat[p] - k2 * v_hat[p];
        }
    }
    return g;
}

std::vector<cplx> packed_velocity(const TorusGrid& grid, const VelocityField& f) {
    std::vector<cplx> z(grid.points());
    for (std::size_t p = 0; p < z.size(); ++p) z[p] = f.u1_hat[p] + cplx(0.0, 1.0) * f.u2_hat[p];
    return z;
}

}  // namespace

// ---------------------------------------------------------------------------
// TorusGrid

TorusGrid::TorusGrid(int n_modes, kernels::Backend backend)
    : n_(n_modes), kmax_((n_modes - 1) / 3), backend_(backend) {
    if (n_modes < 8 || n_modes % 2 != 0)
        throw ContractViolation("TorusGrid: n_modes must be even and >= 8, got " +
                                std::to_string(n_modes));
    for (int k1 = 0; k1 <= kmax_; ++k1)
        for (int k2 = -kmax_; k2 <= kmax_; ++k2)
            if (k1 > 0 || k2 > 0) modes_.push_back({k1, k2, k1 * k1 + k2 * k2});
    std::stable_sort(modes_.begin(), modes_.end(),
                     [](const Mode& a, const Mode& b) { return a.k_sq < b.k_sq; });

    std::vector<cplx> scratch(points());
    std::lock_guard lock(planner_mutex());
    auto* buf = as_fftw(scratch);
    plan_forward_ = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_inverse_ = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

TorusGrid::~TorusGrid() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
}

void TorusGrid::inverse(std::span<cplx> data) const {
    if (data.size() != points()) throw ContractViolation("TorusGrid::inverse: wrong buffer size");
    fftw_execute_dft(static_cast<fftw_plan>(plan_inverse_), as_fftw(data), as_fftw(data));
}

void TorusGrid::forward(std::span<cplx> data) const {
    if (data.size() != points()) throw ContractViolation("TorusGrid::forward: wrong buffer size");
    fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(data), as_fftw(data));
    const double scale = 1.0 / static_cast<double>(points());
    for (auto& c : data) c *= scale;
}

bool TorusGrid::retained(int k1, int k2) const noexcept {
    return std::abs(k1) <= kmax_ && std::abs(k2) <= kmax_ && (k1 != 0 || k2 != 0);
}

// ---------------------------------------------------------------------------
// Conversions

VelocityField to_velocity(const TorusGrid& grid, const StateVector& u) {
    check_state(grid, u);
    VelocityField f{std::vector<cplx>(grid.points()), std::vector<cplx>(grid.points())};
    const auto modes = grid.modes();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const auto [e1, e2] = perp(modes[m]);
        const cplx s = cplx(u[2 * m], -u[2 * m + 1]) / (2.0 * kBasisScale);
        const std::size_t p = grid.index(modes[m].k1, modes[m].k2);
        const std::size_t q = grid.index(-modes[m].k1, -modes[m].k2);
        f.u1_hat[p] = e1 * s;
        f.u2_hat[p] = e2 * s;
        f.u1_hat[q] = e1 * std::conj(s);
        f.u2_hat[q] = e2 * std::conj(s);
    }
    return f;
}

StateVector to_state(const TorusGrid& grid, const VelocityField& field) {
    return project_spectra(grid, field.u1_hat, field.u2_hat);
}

VelocityField leray_project(const TorusGrid& grid, VelocityField field) {
    kernels::leray_project(grid.backend(), grid.n(), field.u1_hat, field.u2_hat);
    return field;
}

double divergence_residual(const TorusGrid& grid, const VelocityField& field) {
    const int n = grid.n();
    double div = 0.0;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k1 = kernels::wavenumber(i, n);
        for (int j = 0; j < n; ++j) {
            const double k2 = kernels::wavenumber(j, n);
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            div = std::max(div, std::abs(k1 * field.u1_hat[p] + k2 * field.u2_hat[p]));
            scale = std::max(scale, std::sqrt(k1 * k1 + k2 * k2) *
                                        std::hypot(std::abs(field.u1_hat[p]),
                                                   std::abs(field.u2_hat[p])));
        }
    }
    return scale == 0.0 ? 0.0 : div / scale;
}

DiagonalOperator stokes_operator(double nu, const TorusGrid& grid, double delta) {
    if (!(nu > 0.0)) throw ContractViolation("stokes_operator: nu must be positive");
    std::vector<double> eig;
    eig.reserve(grid.state_dim());
    for (const auto& m : grid.modes()) {
        eig.push_back(nu * m.k_sq);
        eig.push_back(nu * m.k_sq);
    }
    return DiagonalOperator(std::move(eig), delta);
}

// ---------------------------------------------------------------------------
// Nonlinear term

StateVector nonlinear_term(const TorusGrid& grid, double q_val, const VelocityField& u,
                           const VelocityField& v) {
    check_dealiased(grid, u);
    check_dealiased(grid, v);

    std::vector<cplx> vel = packed_velocity(grid, u);
    std::vector<cplx> g1 = packed_gradient(grid, v.u1_hat);
    std::vector<cplx> g2 = packed_gradient(grid, v.u2_hat);
    grid.inverse(vel);
    grid.inverse(g1);
    grid.inverse(g2);

    std::vector<cplx> w(grid.points());
    kernels::advect_pointwise(grid.backend(), vel, g1, g2, w);
    grid.forward(w);

    StateVector out = project_packed(grid, w);
    out *= q_val;
    return out;
}

StateVector nonlinear_term(const TorusGrid& grid, double q_val, const StateVector& u,
                           const StateVector& v) {
    check_state(grid, u);
    check_state(grid, v);
    return nonlinear_term(grid, q_val, to_velocity(grid, u), to_velocity(grid, v));
}

StateVector nonlinear_term_reference(const TorusGrid& grid, double q_val, const StateVector& u,
                                     const StateVector& v) {
    check_state(grid, u);
    check_state(grid, v);
    const VelocityField uf = to_velocity(grid, u);
    const VelocityField vf = to_velocity(grid, v);
    const int K = grid.kmax();

    struct Coef {
        int k1, k2;
        cplx a1, a2;
    };
    std::vector<Coef> us;
    std::vector<Coef> vs;
    for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = -K; k2 <= K; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const std::size_t p = grid.index(k1, k2);
            us.push_back({k1, k2, uf.u1_hat[p], uf.u2_hat[p]});
            vs.push_back({k1, k2, vf.u1_hat[p], vf.u2_hat[p]});
        }

    // (u.grad v)_i^(k) = sum_{p+q=k} (u^(p) . i q) v_i^(q)
    std::vector<cplx> w1(grid.points());
    std::vector<cplx> w2(grid.points());
    for (const auto& a : us) {
        for (const auto& b : vs) {
            const int k1 = a.k1 + b.k1;
            const int k2 = a.k2 + b.k2;
            if (!grid.retained(k1, k2)) continue;
            const cplx adv = cplx(0.0, 1.0) * (a.a1 * static_cast<double>(b.k1) +
                                               a.a2 * static_cast<double>(b.k2));
            const std::size_t p = grid.index(k1, k2);
            w1[p] += adv * b.a1;
            w2[p] += adv * b.a2;
        }
    }
    StateVector out = project_spectra(grid, w1, w2);
    out *= q_val;
    return out;
}

// ---------------------------------------------------------------------------
// Forcing, fields, norms

StateVector project_forcing(const TorusGrid& grid, std::span<const double> phi1,
                            std::span<const double> phi2) {
    if (phi1.size() != grid.points() || phi2.size() != grid.points())
        throw ContractViolation("project_forcing: field not sampled on the physical grid");
    std::vector<cplx> packed(grid.points());
    for (std::size_t p = 0; p < packed.size(); ++p) packed[p] = cplx(phi1[p], phi2[p]);
    grid.forward(packed);

    VelocityField f{std::vector<cplx>(grid.points()), std::vector<cplx>(grid.points())};
    const int n = grid.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            unpack_real_pair(grid, packed, kernels::wavenumber(i, n), kernels::wavenumber(j, n),
                             f.u1_hat[p], f.u2_hat[p]);
        }
    f.u1_hat[0] = 0.0;
    f.u2_hat[0] = 0.0;
    return to_state(grid, leray_project(grid, std::move(f)));
}

StateVector taylor_green(const TorusGrid& grid, double t, double nu) {
    if (t < 0.0) throw DomainError("taylor_green: negative time");
    const int n = grid.n();
    std::vector<double> u1(grid.points());
    std::vector<double> u2(grid.points());
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * i / n;
        for (int j = 0; j < n; ++j) {
            const double y = 2.0 * kPi * j / n;
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            u1[p] = std::cos(x) * std::sin(y);
            u2[p] = -std::sin(x) * std::cos(y);
        }
    }
    StateVector s = project_forcing(grid, u1, u2);
    s *= std::exp(-2.0 * nu * t);
    return s;
}

StateVector random_divfree(const TorusGrid& grid, std::uint64_t seed, double energy) {
    if (energy < 0.0) throw ContractViolation("random_divfree: energy must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVector s(grid.state_dim());
    const auto modes = grid.modes();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const double w = 1.0 / modes[m].k_sq;
        s[2 * m] = w * normal(rng);
        s[2 * m + 1] = w * normal(rng);
    }
    const double norm = s.norm();
    if (norm > 0.0) s *= std::sqrt(2.0 * energy) / norm;
    return s;
}

PhysicalField to_physical(const TorusGrid& grid, const StateVector& u) {
    const VelocityField f = to_velocity(grid, u);
    std::vector<cplx> z = packed_velocity(grid, f);
    grid.inverse(z);
    PhysicalField out{std::vector<double>(grid.points()), std::vector<double>(grid.points())};
    for (std::size_t p = 0; p < z.size(); ++p) {
        out.u1[p] = z[p].real();
        out.u2[p] = z[p].imag();
    }
    return out;
}

double physical_l2_norm(const TorusGrid& grid, const PhysicalField& field) {
    double s = 0.0;
    for (std::size_t p = 0; p < field.u1.size(); ++p)
        s += field.u1[p] * field.u1[p] + field.u2[p] * field.u2[p];
    const double cell = 2.0 * kPi / grid.n();
    return std::sqrt(s) * cell;
}

double gradient_l2_norm(const TorusGrid& grid, const StateVector& u) {
    const VelocityField f = to_velocity(grid, u);
    std::vector<cplx> g1 = packed_gradient(grid, f.u1_hat);
    std::vector<cplx> g2 = packed_gradient(grid, f.u2_hat);
    grid.inverse(g1);
    grid.inverse(g2);
    double s = 0.0;
    for (std::size_t p = 0; p < g1.size(); ++p) s += std::norm(g1[p]) + std::norm(g2[p]);
    const double cell = 2.0 * kPi / grid.n();
    return std::sqrt(s) * cell;
}

double nonlinear_norm_bound(const TorusGrid& grid, double nu, double delta) {
    // |u|_inf <= sqrt(#modes) |u|_H / (pi sqrt 2), |grad v| <= sqrt 2 K |v|_H,
    // |A^{-delta} P w| <= nu^{-delta} |w|.
    const double modes = static_cast<double>(grid.modes().size());
    return std::sqrt(modes) * grid.kmax() * std::pow(nu, -delta) / kPi;
}

BilinearForm make_ns_bilinear(std::shared_ptr<const TorusGrid> grid,
                              std::shared_ptr<const DiagonalOperator> op, double nu,
                              TimeProfile q) {
    const double bound = nonlinear_norm_bound(*grid, nu, op->frac_exponent());
    auto base = [grid](const StateVector& u, const StateVector& v) {
        return nonlinear_term(*grid, 1.0, u, v);
    };
    return BilinearForm(std::move(op), std::move(q), std::move(base), bound);
}

Forcing make_ns_forcing(std::shared_ptr<const TorusGrid> grid, TimeProfile profile,
                        StateVector pattern, double lip) {
    check_state(*grid, pattern);
    auto saturation = [grid](const StateVector& u) {
        const VelocityField f = to_velocity(*grid, u);
        std::vector<cplx> z = packed_velocity(*grid, f);
        grid->inverse(z);
        std::vector<cplx> t(z.size());
        kernels::tanh_pointwise(grid->backend(), 1.0, z, t);
        grid->forward(t);
        return project_packed(*grid, t);
    };
    // |P tanh(u)|_H <= |tanh(u)|_{L^2} <= 2 pi sqrt 2
    const double sat_bound = 2.0 * kPi * std::numbers::sqrt2;
    return make_profile_forcing(std::move(profile), std::move(pattern), lip, saturation, sat_bound);
}

StateVector kolmogorov_pattern(const TorusGrid& grid, double amplitude, int k_f) {
    const int n = grid.n();
    std::vector<double> u1(grid.points());
    std::vector<double> u2(grid.points(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double y = 2.0 * kPi * j / n;
            u1[static_cast<std::size_t>(i) * n + j] = amplitude * std::sin(k_f * y);
        }
    return project_forcing(grid, u1, u2);
}

}  // namespace impulsive::ns2d
