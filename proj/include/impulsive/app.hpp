#pragma once

// The three commands behind the `impulsive` executable, plus the pieces the
// tests drive directly (CSV formatting, the verification run, the
// constants table).

#include "impulsive/scenario.hpp"
#include "impulsive/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace impulsive::app {

enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_config_error = 2,
    exit_numerical_abort = 3,
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0; // 0 keeps the OpenMP default
};

/// Shortest decimal string that reads back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

inline constexpr const char* kTrajectoryHeader = "# impulsive trajectory v1";

/// Header line, column line, then one row per kept sample.
std::string trajectory_csv(const Scenario& s, const Trajectory& traj);

struct CsvTrajectory {
    std::vector<double> t;
    std::vector<double> norm_H;
    std::vector<double> norm_V;
    std::vector<bool> is_impulse;
};
CsvTrajectory read_trajectory_csv(const std::filesystem::path& path);

struct VerifyOutcome {
    std::vector<verify::TheoremReport> reports;
    int exit_code = exit_ok;
    std::string message;
};

/// Runs every enabled certificate. Blow-ups propagate as BlowUpError.
VerifyOutcome run_verification(const Scenario& s);

/// bounds.csv body: theorem_id, series, t, measured, predicted.
std::string bounds_csv(const std::vector<verify::TheoremReport>& reports);

struct ConstantsOutcome {
    nlohmann::json doc;
    int exit_code = exit_ok;
    std::string message;
};
ConstantsOutcome compute_constants(const Scenario& s);

int cmd_simulate(const std::filesystem::path& config, const RunOptions& opt, std::ostream& err);
int cmd_verify(const std::filesystem::path& config, const RunOptions& opt, std::ostream& err);
int cmd_constants(const std::filesystem::path& config, const RunOptions& opt, std::ostream& err);

}  // namespace impulsive::app
