#pragma once

#include <stdexcept>
#include <string>

namespace impulsive {

/// Caller broke a documented precondition (dimension mismatch, impulse
/// inside a step interval, non-dealiased input, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (negative time,
/// alpha1 >= 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Local fixed-point search found no (delta, T) pair with d1 <= r and q < 1.
class NoAdmissibleWindow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PicardError : public std::runtime_error {
public:
    enum class Kind { diverged, max_iter };

    PicardError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// |u|_H left the blow-up guard; the trajectory cannot be prolonged.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, double norm)
        : std::runtime_error("blow-up guard tripped at t=" + std::to_string(t) +
                             " (|u|_H=" + std::to_string(norm) + ")"),
          t_(t) {}

    [[nodiscard]] double time() const noexcept { return t_; }

private:
    double t_;
};

/// Theorem hypothesis not satisfied by the supplied data.
class PreconditionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace impulsive
