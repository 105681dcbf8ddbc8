#pragma once

#include "islab/config.hpp"
#include "islab/island.hpp"
#include "islab/links.hpp"
#include "islab/rescaling.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace islab {

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    /// "<=", ">=", "<" or "=="
    std::string relation;
    bool pass = false;
};

Check check_at_most(std::string name, double value, double tol);
Check check_at_least(std::string name, double value, double tol);
Check check_less(std::string name, double value, double bound);
Check check_equal(std::string name, double value, double expected);

struct RunReport {
    std::string suite;
    std::map<std::string, std::string> config;
    std::vector<Check> checks;
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::string> artifacts;
    /// not written to any artifact
    double wall_clock_seconds = 0.0;
    bool passed() const;
    /// deterministic JSON form (no timing)
    nlohmann::json to_json() const;
};

/// Cross-field violations for the selected suite (geometry, radii, rescaling ranges).
std::vector<std::string> suite_violations(const ExperimentConfig& cfg);

SurgeryProfile island_profile(const ExperimentConfig& cfg);
LinkGeometry link_geometry(const ExperimentConfig& cfg);
/// Preset selected by rescaling.configuration with N, lambda, mu, r and box applied.
RescalingConfig rescaling_config(const ExperimentConfig& cfg);

/// Executes the suite and writes its artifacts under cfg.output(). Numeric failures inside the
/// suite propagate as SolverError / DomainError.
RunReport run_suite(const ExperimentConfig& cfg);

/// Writes report.json for a finished run.
void write_report(const RunReport& report, const std::string& dir);

}  // namespace islab
