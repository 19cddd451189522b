#pragma once

// Scenario files: what to simulate (problem, data, schedule, u0), how
// (solver settings, hull shift) and which certificates to produce.

#include "impulsive/config.hpp"
#include "impulsive/driving.hpp"
#include "impulsive/mild_solver.hpp"
#include "impulsive/ns2d.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace impulsive {

enum class ProblemKind { abstract_toy, ns2d };

struct VerifySettings {
    bool dissipativity = true; // EQ3_5_bound and absorbing_set
    bool global_bound = true;
    bool contraction = false;
    bool picard_rate = false;
    bool orthogonality = false;
    double abs_tol = 1e-6;
    std::optional<double> dt2_budget; // default: dt^2 * sup|u|_H
    double entry_tol = 1e-3;
    int pairs = 10;
    std::uint64_t pair_seed = 0;
    double radius_r = 1.0; // r of the local window search
    double ratio_tol = 1e-3;
    int orthogonality_samples = 100;
    double orthogonality_tol = 1e-10;
};

/// Replacements for measured constants, keyed by their symbols.
struct ConstantOverrides {
    std::optional<double> alpha, f1_norm, Binf, Gamma, C, C2, K2, K3;
};

/// Constants the certificates are evaluated with, after overrides.
struct HarnessConstants {
    double alpha;
    double f1_norm;
    double Binf;
    double Gamma;
    double C;  // Lipschitz constant of f in u
    double C2; // Lipschitz constant of the impulses (K3)
    double K2;
    double K3;
};

struct Scenario {
    explicit Scenario(DrivenSystem sys) : system(std::move(sys)) {}

    ProblemKind kind = ProblemKind::abstract_toy;
    std::string source;
    std::uint64_t seed = 1;

    std::shared_ptr<const DiagonalOperator> op;
    std::shared_ptr<const ns2d::TorusGrid> grid; // ns2d only
    double nu = 0.0;                             // ns2d only

    DrivenSystem system;
    StateVector u0;
    SolverConfig solver;
    HullPoint omega;

    VerifySettings verify;
    ConstantOverrides overrides;

    bool dump_coefficients = false;
    int output_stride = 1;

    [[nodiscard]] std::size_t dim() const noexcept { return op->dim(); }
    [[nodiscard]] HarnessConstants harness_constants() const;
    /// Constants for the local window search, with K2/K3/Binf overrides applied.
    [[nodiscard]] Constants local_constants() const;
};

/// Builds a scenario from a parsed file. `seed_override` replaces
/// [problem].seed. Throws config::ConfigError with the offending line.
Scenario build_scenario(const config::Document& doc,
                        std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Uniformly distributed point of the closed ball of given radius.
StateVector random_in_ball(std::size_t dim, double radius, std::uint64_t seed);

}  // namespace impulsive
