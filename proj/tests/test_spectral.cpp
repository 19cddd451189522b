#include "impulsive/errors.hpp"
#include "impulsive/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace impulsive;

namespace {

StateVector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    StateVector v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = g(rng);
    return v;
}

}  // namespace

TEST_CASE("state vector arithmetic") {
    StateVector a{3.0, 4.0};
    StateVector b{1.0, -1.0};
    CHECK(a.norm() == doctest::Approx(5.0));
    CHECK(a.dot(b) == doctest::Approx(-1.0));
    CHECK((a + b) == StateVector{4.0, 3.0});
    CHECK((a - b) == StateVector{2.0, 5.0});
    CHECK((2.0 * b) == StateVector{2.0, -2.0});
    a.axpy(0.5, b);
    CHECK(a == StateVector{3.5, 3.5});
    CHECK(distance(StateVector{0.0, 0.0}, StateVector{3.0, 4.0}) == doctest::Approx(5.0));
    CHECK_THROWS_AS(a += StateVector{1.0}, ContractViolation);
    CHECK_THROWS_AS((void)a.dot(StateVector(3)), ContractViolation);
}

TEST_CASE("operator construction rejects bad spectra") {
    CHECK_THROWS_AS(DiagonalOperator({}, 0.5), ContractViolation);
    CHECK_THROWS_AS(DiagonalOperator({2.0, 1.0}, 0.5), ContractViolation);
    CHECK_THROWS_AS(DiagonalOperator({0.0, 1.0}, 0.5), ContractViolation);
    CHECK_THROWS_AS(DiagonalOperator({1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(DiagonalOperator({1.0}, -0.1), DomainError);
    CHECK_NOTHROW(DiagonalOperator({1.0, 1.0, 2.0}, 0.0));  // multiplicities
}

TEST_CASE("smoothing constants") {
    CHECK(DiagonalOperator({1.0}, 0.0).smoothing_constant() == 1.0);
    const double d = 0.5;
    CHECK(DiagonalOperator({1.0}, d).smoothing_constant() == doctest::Approx(std::pow(d / std::exp(1.0), d)));
    CHECK(DiagonalOperator({1.0}, d).smoothing_exponent() == d);
    CHECK(DiagonalOperator::semigroup_constant() == 1.0);
}

TEST_CASE("semigroup examples") {
    const DiagonalOperator a1({1.0}, 0.5);
    CHECK(semigroup_apply(a1, 0.0, StateVector{1.0})[0] == 1.0);
    CHECK(semigroup_apply(a1, std::log(2.0), StateVector{1.0})[0] == doctest::Approx(0.5).epsilon(1e-15));

    // Frozen from the long double closed form e^{-lambda t}.
    const double frozen[2] = {0.367879, 0.135335};
    CHECK(static_cast<double>(std::exp(-1.0L)) == doctest::Approx(frozen[0]).epsilon(1e-6));
    CHECK(static_cast<double>(std::exp(-2.0L)) == doctest::Approx(frozen[1]).epsilon(1e-5));
    const DiagonalOperator a2({1.0, 2.0}, 0.5);
    const StateVector u = semigroup_apply(a2, 1.0, StateVector{1.0, 1.0});
    CHECK(u[0] == doctest::Approx(frozen[0]).epsilon(1e-6));
    CHECK(u[1] == doctest::Approx(frozen[1]).epsilon(1e-5));

    CHECK_THROWS_AS(semigroup_apply(a2, -1e-3, StateVector{1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(semigroup_apply(a2, 1.0, StateVector{1.0}), ContractViolation);
}

TEST_CASE("semigroup property and contractivity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 3.0);
    std::vector<double> eig(6);
    for (auto& e : eig) e = 0.1 + unif(rng);
    std::sort(eig.begin(), eig.end());
    const DiagonalOperator a(eig, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        const StateVector u = random_vector(6, rng);
        const double t = unif(rng), s = unif(rng);
        const StateVector lhs = semigroup_apply(a, t + s, u);
        const StateVector rhs = semigroup_apply(a, t, semigroup_apply(a, s, u));
        CHECK(distance(lhs, rhs) <= 1e-14 * (1.0 + u.norm()));
        // |e^{-At}u| <= K e^{-a t}|u| with K = 1
        CHECK(lhs.norm() <= std::exp(-a.coercivity() * (t + s)) * u.norm() * (1.0 + 1e-14));
    }
}

TEST_CASE("phi1 examples") {
    const DiagonalOperator a1({1.0}, 0.0);
    CHECK(phi1_apply(a1, 1e-12, StateVector{1.0})[0] == doctest::Approx(1e-12).epsilon(1e-10));
    // (1 - e^{-1}) / 1 and 3 (1 - e^{-1}) / 2, long double oracle.
    const double f1 = 0.632121, f2 = 0.948181;
    CHECK(static_cast<double>(1.0L - std::exp(-1.0L)) == doctest::Approx(f1).epsilon(1e-6));
    CHECK(static_cast<double>(3.0L * (1.0L - std::exp(-1.0L)) / 2.0L) == doctest::Approx(f2).epsilon(1e-6));
    CHECK(phi1_apply(a1, 1.0, StateVector{1.0})[0] == doctest::Approx(f1).epsilon(1e-6));
    CHECK(phi1_apply(DiagonalOperator({2.0}, 0.0), 0.5, StateVector{3.0})[0] == doctest::Approx(f2).epsilon(1e-6));
    CHECK_THROWS_AS(phi1_apply(a1, 0.0, StateVector{1.0}), DomainError);
}

TEST_CASE("phi weights are accurate across the series switch") {
    // Compare with long double evaluations away from cancellation trouble
    // and with the series on both sides of the crossover.
    for (double x : {1e-10, 1e-9, 1e-8, 2e-8, 1e-6, 1e-3, 0.05, 0.099, 0.1, 0.101, 0.5, 3.0, 40.0}) {
        const long double xl = x;
        const long double p1 = -std::expm1(-xl) / xl;
        const long double p2 = (xl + std::expm1(-xl)) / (xl * xl);
        CHECK(phi1_scalar(x, 1.0) == doctest::Approx(static_cast<double>(p1)).epsilon(1e-13));
        if (x >= 1e-3)
            CHECK(phi2_scalar(x, 1.0) == doctest::Approx(static_cast<double>(p2)).epsilon(1e-12));
        else
            CHECK(phi2_scalar(x, 1.0) == doctest::Approx(0.5 - x / 6.0 + x * x / 24.0).epsilon(1e-14));
    }
}

TEST_CASE("phi1 integrates constants exactly") {
    // u(h) = e^{-lambda h} u0 + phi1 c solves u' + lambda u = c.
    for (double lambda : {1e-6, 0.3, 1.0, 250.0})
        for (double h : {1e-4, 0.1, 2.0}) {
            const double exact = std::exp(-lambda * h) * 2.0 - std::expm1(-lambda * h) / lambda * 0.7;
            const double step = std::exp(-lambda * h) * 2.0 + phi1_scalar(lambda, h) * 0.7;
            CHECK(step == doctest::Approx(exact).epsilon(1e-13));
        }
}

TEST_CASE("fractional norm examples") {
    CHECK(fractional_norm(DiagonalOperator({4.0}, 0.5), 0.0, StateVector{3.0}) == doctest::Approx(3.0));
    CHECK(fractional_norm(DiagonalOperator({4.0}, 0.5), 0.5, StateVector{1.0}) == doctest::Approx(2.0));
    const double frozen = 2.828427;
    CHECK(std::sqrt(8.0) == doctest::Approx(frozen).epsilon(1e-6));
    CHECK(fractional_norm(DiagonalOperator({1.0, 4.0}, 0.5), -0.5, StateVector{2.0, 4.0}) ==
          doctest::Approx(frozen).epsilon(1e-6));
}

TEST_CASE("negative powers are dominated by the coercivity bound") {
    std::mt19937_64 rng(3);
    const DiagonalOperator a({0.5, 1.0, 2.0, 8.0}, 0.5);
    for (int i = 0; i < 20; ++i) {
        const StateVector u = random_vector(4, rng);
        CHECK(fractional_norm(a, -0.5, u) <= std::pow(0.5, -0.5) * u.norm() * (1 + 1e-14));
    }
}

TEST_CASE("increment form of the exponential step") {
    std::mt19937_64 rng(12);
    const DiagonalOperator a({1e-3, 0.5, 4.0, 300.0}, 0.0);
    for (double h : {1e-6, 1e-2, 0.7, 5.0}) {
        const StateVector u = random_vector(4, rng), w = random_vector(4, rng);
        const StateVector ref = semigroup_apply(a, h, u) + phi1_apply(a, h, w);
        CHECK(distance(etd1_apply(a, h, u, w), ref) <= 1e-14 * (u.norm() + w.norm()));
    }
    // 10^5 steps of u' + 1e-3 u = 0.7 from u = 1 against the closed form.
    const DiagonalOperator slow({1e-3}, 0.0);
    StateVector u{1.0};
    for (int i = 0; i < 100000; ++i) u = etd1_apply(slow, 1e-5, u, StateVector{0.7});
    const long double t = 1.0L, lam = 1e-3L;
    const double exact = static_cast<double>(std::exp(-lam * t) - std::expm1(-lam * t) / lam * 0.7L);
    CHECK(std::abs(u[0] - exact) <= 1e-13);
    CHECK_THROWS_AS(etd1_apply(slow, 1.0, StateVector{1.0, 2.0}, StateVector{1.0}), ContractViolation);
}
