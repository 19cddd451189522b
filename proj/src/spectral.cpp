#include "impulsive/spectral.hpp"

#include "impulsive/errors.hpp"
#include "impulsive/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace impulsive {

namespace {

void check_dim(const DiagonalOperator& a, const StateVector& u, const char* op) {
    if (a.dim() != u.dim())
        throw ContractViolation(std::string(op) + ": operator dim " + std::to_string(a.dim()) +
                                " != state dim " + std::to_string(u.dim()));
}

void check_same_dim(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim())
        throw ContractViolation("state dimension mismatch: " + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()));
}

// Below this, 1 - e^{-x} loses digits; three Taylor terms are exact to roundoff.
constexpr double kPhi1SeriesThreshold = 1e-8;
// (x - 1 + e^{-x}) / x^2 is summed as a series below this.
constexpr double kPhi2SeriesThreshold = 0.1;

}  // namespace

double StateVector::norm() const {
    double s = 0.0;
    for (double c : coeffs_) s += c * c;
    return std::sqrt(s);
}

double StateVector::dot(const StateVector& other) const {
    check_same_dim(*this, other);
    double s = 0.0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) s += coeffs_[j] * other.coeffs_[j];
    return s;
}

StateVector& StateVector::operator+=(const StateVector& rhs) {
    check_same_dim(*this, rhs);
    for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] += rhs.coeffs_[j];
    return *this;
}

StateVector& StateVector::operator-=(const StateVector& rhs) {
    check_same_dim(*this, rhs);
    for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] -= rhs.coeffs_[j];
    return *this;
}

StateVector& StateVector::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

StateVector& StateVector::axpy(double s, const StateVector& x) {
    check_same_dim(*this, x);
    for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] += s * x.coeffs_[j];
    return *this;
}

StateVector operator+(StateVector lhs, const StateVector& rhs) { return lhs += rhs; }
StateVector operator-(StateVector lhs, const StateVector& rhs) { return lhs -= rhs; }
StateVector operator*(double s, StateVector v) { return v *= s; }

double distance(const StateVector& a, const StateVector& b) {
    check_same_dim(a, b);
    double s = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return std::sqrt(s);
}

DiagonalOperator::DiagonalOperator(std::vector<double> eigenvalues, double frac_exponent_delta)
    : eigenvalues_(std::move(eigenvalues)), delta_(frac_exponent_delta) {
    if (eigenvalues_.empty()) throw ContractViolation("DiagonalOperator: no eigenvalues");
    if (!std::is_sorted(eigenvalues_.begin(), eigenvalues_.end()))
        throw ContractViolation("DiagonalOperator: eigenvalues must be ascending");
    if (!(eigenvalues_.front() > 0.0))
        throw ContractViolation("DiagonalOperator: coercivity must be positive");
    if (!(delta_ >= 0.0 && delta_ < 1.0))
        throw DomainError("DiagonalOperator: fractional exponent must lie in [0, 1)");
}

double DiagonalOperator::smoothing_constant() const noexcept {
    if (delta_ == 0.0) return 1.0;
    return std::pow(delta_ / std::numbers::e, delta_);
}

StateVector semigroup_apply(const DiagonalOperator& a, double t, const StateVector& u) {
    check_dim(a, u, "semigroup_apply");
    if (t < 0.0) throw DomainError("semigroup_apply: negative time");
    StateVector out(u.dim());
    kernels::omp::diag_exp_scale(a.eigenvalues(), t, u.coeffs(), out.coeffs());
    return out;
}

double phi1_scalar(double lambda, double h) {
    const double x = lambda * h;
    if (x < kPhi1SeriesThreshold) return h * (1.0 - x / 2.0 + x * x / 6.0);
    return -std::expm1(-x) / lambda;
}

double phi2_scalar(double lambda, double h) {
    const double x = lambda * h;
    if (x < kPhi2SeriesThreshold) {
        // sum_{k>=0} (-x)^k / (k+2)!
        double term = 0.5;
        double sum = 0.5;
        for (int k = 1; k <= 12; ++k) {
            term *= -x / (k + 2);
            sum += term;
        }
        return h * sum;
    }
    return h * (x + std::expm1(-x)) / (x * x);
}

StateVector phi1_apply(const DiagonalOperator& a, double h, const StateVector& w) {
    check_dim(a, w, "phi1_apply");
    if (!(h > 0.0)) throw DomainError("phi1_apply: step must be positive");
    StateVector out(w.dim());
    const auto lam = a.eigenvalues();
    for (std::size_t j = 0; j < w.dim(); ++j) out[j] = phi1_scalar(lam[j], h) * w[j];
    return out;
}

StateVector etd1_apply(const DiagonalOperator& a, double h, const StateVector& u, const StateVector& w) {
    check_dim(a, u, "etd1_apply");
    check_dim(a, w, "etd1_apply");
    if (!(h > 0.0)) throw DomainError("etd1_apply: step must be positive");
    StateVector out(u.dim());
    const auto lam = a.eigenvalues();
    for (std::size_t j = 0; j < u.dim(); ++j) out[j] = u[j] + phi1_scalar(lam[j], h) * (w[j] - lam[j] * u[j]);
    return out;
}

StateVector phi2_apply(const DiagonalOperator& a, double h, const StateVector& w) {
    check_dim(a, w, "phi2_apply");
    if (!(h > 0.0)) throw DomainError("phi2_apply: step must be positive");
    StateVector out(w.dim());
    const auto lam = a.eigenvalues();
    for (std::size_t j = 0; j < w.dim(); ++j) out[j] = phi2_scalar(lam[j], h) * w[j];
    return out;
}

double fractional_norm(const DiagonalOperator& a, double alpha, const StateVector& u) {
    check_dim(a, u, "fractional_norm");
    const auto lam = a.eigenvalues();
    double s = 0.0;
    for (std::size_t j = 0; j < u.dim(); ++j) {
        const double w = alpha == 0.0 ? u[j] : std::pow(lam[j], alpha) * u[j];
        s += w * w;
    }
    return std::sqrt(s);
}

}  // namespace impulsive
