#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace impulsive {

/// Element of H as real coefficients in the eigenbasis of A.
/// |u|_H^2 = sum_j u_j^2.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::size_t dim) : coeffs_(dim, 0.0) {}
    explicit StateVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}
    StateVector(std::initializer_list<double> coeffs) : coeffs_(coeffs) {}

    [[nodiscard]] std::size_t dim() const noexcept { return coeffs_.size(); }
    [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::span<double> coeffs() noexcept { return coeffs_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return coeffs_; }

    double& operator[](std::size_t j) { return coeffs_[j]; }
    double operator[](std::size_t j) const { return coeffs_[j]; }

    [[nodiscard]] double norm() const;
    [[nodiscard]] double dot(const StateVector& other) const;

    StateVector& operator+=(const StateVector& rhs);
    StateVector& operator-=(const StateVector& rhs);
    StateVector& operator*=(double s);
    /// this += s * x
    StateVector& axpy(double s, const StateVector& x);

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::vector<double> coeffs_;
};

StateVector operator+(StateVector lhs, const StateVector& rhs);
StateVector operator-(StateVector lhs, const StateVector& rhs);
StateVector operator*(double s, StateVector v);

/// |a - b|_H
double distance(const StateVector& a, const StateVector& b);

/// Self-adjoint coercive operator stored by its eigenvalues (ascending, with
/// repeats allowed for multiplicities). Generates e^{-At} with K = 1 and
/// satisfies ||e^{-At}||_{L(F,H)} <= K1 t^{-delta} for F = D(A^{-delta}),
/// K1 = (delta/e)^delta.
class DiagonalOperator {
public:
    explicit DiagonalOperator(std::vector<double> eigenvalues, double frac_exponent_delta = 0.5);

    [[nodiscard]] std::size_t dim() const noexcept { return eigenvalues_.size(); }
    [[nodiscard]] std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    [[nodiscard]] double coercivity() const noexcept { return eigenvalues_.front(); }
    [[nodiscard]] double frac_exponent() const noexcept { return delta_; }

    /// K of the semigroup bound |e^{-At}| <= K e^{-at}.
    [[nodiscard]] static constexpr double semigroup_constant() noexcept { return 1.0; }
    /// K1 = (delta/e)^delta (equals 1 when delta = 0, i.e. F = H).
    [[nodiscard]] double smoothing_constant() const noexcept;
    /// alpha1 = delta.
    [[nodiscard]] double smoothing_exponent() const noexcept { return delta_; }

private:
    std::vector<double> eigenvalues_;
    double delta_;
};

/// Component j of the result is e^{-lambda_j t} u_j.
StateVector semigroup_apply(const DiagonalOperator& a, double t, const StateVector& u);

/// A^{-1}(I - e^{-Ah}) w, exact per mode.
StateVector phi1_apply(const DiagonalOperator& a, double h, const StateVector& w);

/// e^{-Ah} u + phi1(h) w, evaluated as u + phi1(h)(w - A u). Over many small
/// steps this avoids the drift a rounded e^{-lambda h} factor accumulates.
StateVector etd1_apply(const DiagonalOperator& a, double h, const StateVector& u, const StateVector& w);

/// Weight of the linear-in-time part of the forcing over a step:
/// int_0^h e^{-A(h-s)} (s/h) ds w = h (x - 1 + e^{-x}) / x^2 w, x = lambda h.
StateVector phi2_apply(const DiagonalOperator& a, double h, const StateVector& w);

/// Scalar versions, exposed for tests and the quadrature weights.
double phi1_scalar(double lambda, double h);
double phi2_scalar(double lambda, double h);

/// ||A^alpha u||_H = (sum_j lambda_j^{2 alpha} u_j^2)^{1/2}.
double fractional_norm(const DiagonalOperator& a, double alpha, const StateVector& u);

}  // namespace impulsive
