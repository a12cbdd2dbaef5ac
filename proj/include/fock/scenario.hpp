#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fock/carleson.hpp"
#include "fock/core.hpp"
#include "fock/measure.hpp"
#include "fock/quadrature.hpp"

namespace fock {

struct NamedMeasure {
    std::string name;
    MeasureModel measure;
};

/// A family for the equivalence suite: named members, or one base measure scaled by each
/// factor (the scaling form also checks that banded ratios do not move with the scale).
struct FamilySpec {
    std::string name;
    std::vector<std::string> members;
    std::string base;
    std::vector<double> scales;
    double p = 1.0;
    double q = 1.0;
};

/// Grid of emitted Berezin and averaging profiles (n = 1: square grid inside a disc).
struct ProfileSpec {
    double radius = 3.0;
    double step = 0.25;
    double t = 2.0;
    double delta = 1.0;
};

struct ScenarioConfig {
    FockParams params{1.0, 1};
    std::vector<NamedMeasure> measures;
    double lattice_r = 1.0;
    double bound_radius = 6.0;
    std::vector<std::pair<double, double>> exponents;
    std::vector<FamilySpec> families;
    QuadratureOptions quad;
    /// Absolute tolerance of the trace, Berezin-identity and kernel-norm checks.
    double check_tol = 1e-6;
    /// Relative quadrature tolerance of norm estimates (lower bounds, ratios).
    double estimate_tol = 1e-4;
    /// Tolerance of the reproducing-identity residual.
    double reproducing_tol = 1e-8;
    double band = 10.0;
    ProfileSpec profiles;
    std::filesystem::path output_dir = "fock_out";
    std::uint64_t seed = 20240531;
    int workers = 1;
};

/// Parses and validates a JSON scenario. Errors name the source line and the field path.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Re-validates fields that command-line overrides may have changed.
void validate_config(const ScenarioConfig& cfg);

/// Carleson settings derived from a scenario.
CarlesonSettings scenario_settings(const ScenarioConfig& cfg);

struct CaseResult {
    std::string measure;
    double p = 1.0;
    double q = 1.0;
    std::optional<ClassificationReport> report;
    /// Module error that stopped this combination, empty on success.
    std::string error;
};

struct SuiteResult {
    std::string suite;
    std::string subject;
    bool passed = true;
    /// Largest violation measured by the suite (0 for yes/no checks).
    double max_error = 0.0;
    std::string detail;
};

struct FamilyResult {
    std::string name;
    std::optional<EquivalenceTable> table;
    std::string error;
};

struct RunReport {
    std::vector<CaseResult> cases;
    std::vector<SuiteResult> suites;
    std::vector<FamilyResult> families;
    double seconds = 0.0;

    bool passed() const;
};

/// Runs every measure x exponent pair, every family and every invariant suite on up to
/// cfg.workers threads, then writes the CSV tables and report.txt into cfg.output_dir.
RunReport run_scenario(const ScenarioConfig& cfg);

enum class ProfileKind { berezin, averaging };

/// CSV rows (re, im per coordinate, value) of the t-Berezin transform or the averaging
/// function at the given points.
void emit_profiles(const FockParams& params, const MeasureModel& mu, ProfileKind kind,
                   const std::vector<CPoint>& grid, double parameter, std::ostream& out,
                   const QuadratureOptions& opts = {});

/// Same, into a file.
void emit_profiles(const FockParams& params, const MeasureModel& mu, ProfileKind kind,
                   const std::vector<CPoint>& grid, double parameter,
                   const std::filesystem::path& out, const QuadratureOptions& opts = {});

/// Points of the profile grid of a scenario.
std::vector<CPoint> profile_grid(const FockParams& params, const ProfileSpec& spec);

} // namespace fock
