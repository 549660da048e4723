#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phaseslide/dynamics.hpp"

namespace phaseslide {

/// Initial / target / source field description.
struct FieldSpec {
    enum class Kind { constant, tanh, file };
    Kind kind = Kind::constant;
    double value = 0.0;
    // tanh profile: outside + (inside - outside)/2 * (1 + tanh((radius - |x - center|)/width))
    std::vector<double> center;
    double radius = 0.0;
    double width = 1.0;
    double inside = 0.0;
    double outside = 0.0;
    std::string file;

    bool operator==(const FieldSpec&) const = default;
};

/// Everything a run needs. Defaults reproduce the reference scenario
/// "scenario-1d-eradication".
struct RunConfig {
    int dim = 1;
    std::vector<int> cells{256};
    std::vector<double> extent{1.0};

    double horizon = 1.0;
    double dt = 1e-3;

    ModelParams model;

    PotentialKind potential = PotentialKind::obstacle;
    double c0 = 1.0;
    double domain_margin = 1e-6;
    double epsilon = 5e-2;
    double rho = 31.5;

    FieldSpec phi0{FieldSpec::Kind::tanh, 0.0, {0.0}, 0.6, 0.05, 0.9, -0.9, {}};
    FieldSpec phistar{FieldSpec::Kind::constant, -0.9, {}, 0.0, 1.0, 0.0, 0.0, {}};
    FieldSpec sigma0{FieldSpec::Kind::constant, 0.5, {}, 0.0, 1.0, 0.0, 0.0, {}};
    FieldSpec source{FieldSpec::Kind::constant, 0.0, {}, 0.0, 1.0, 0.0, 0.0, {}};

    BoundaryData mu_gamma;

    std::optional<double> delta_slide;
    bool csh_estimate = true;
    double csh_value = 0.0;
    bool chat_pilot = true;
    double chat_value = 0.0;
    double rho_pilot = 10.0;
    std::optional<double> laplacian_phistar;

    std::string output_dir = "out";
    long snapshot_stride = 100;
    bool write_pgm = false;

    /// Relative file paths are resolved against this directory.
    std::filesystem::path base_dir;

    bool operator==(const RunConfig&) const = default;
};

/// Parses `key = value` lines with optional `[section]` headers (TOML subset:
/// numbers, booleans, double-quoted strings, flat numeric arrays, `#` comments).
/// Unknown keys, type mismatches and constraint violations throw ConfigError.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

/// Writes every key; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Materializes fields and validates against the model assumptions.
SimulationSetup build_setup(const RunConfig& config);
ScalarField build_field(const FieldSpec& spec, const Grid& grid, const std::filesystem::path& base_dir,
                        const std::string& key);

} // namespace phaseslide
