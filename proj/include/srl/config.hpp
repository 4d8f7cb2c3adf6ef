#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srl/params.hpp"

namespace srl {

enum class RunMode { steady, spectrum, sweep, scaling, oracle_check, fig5 };

const char* to_string(RunMode m);
std::optional<RunMode> mode_from_string(const std::string& name);

struct ConfigError : std::runtime_error {
    ConfigError(int line_number, const std::string& message)
        : std::runtime_error(line_number > 0
                                 ? "line " + std::to_string(line_number) + ": " + message
                                 : message),
          line(line_number) {}
    int line;
};

struct GeometrySpec {
    std::optional<double> spacing;            // equidistant chain spacing
    std::vector<Eigen::Vector3d> positions;   // explicit positions override
    Eigen::Vector3d dipole{0.0, 0.0, 1.0};
    bool interactions = true;
};

struct SweepSpec {
    std::string axis = "spacing";
    std::string scale = "log";
    double min = 0.05;
    double max = 100.0;
    int points = 200;
    bool compute_spectrum = true;
    bool refine = false;
    std::string objective = "max_photon";
    int n_min = 2;
    int n_max = 5;
    double n_target = 1e6;
};

struct OutputSpec {
    std::string dir = ".";
    std::string prefix = "srl";
};

struct RunConfig {
    RunMode mode = RunMode::steady;  // set by the CLI, not the file
    SystemParams params;
    double tolerance = 1e-10;
    int max_iterations = 80;
    std::optional<double> gamma_hz;  // optional physical scale for reporting
    int fock_cutoff = 3;
    GeometrySpec geometry;
    SweepSpec sweep;
    OutputSpec output;
    std::vector<std::string> warnings;  // non-fatal validation notes
};

// Flat sectioned key-value text: sections [system], [geometry], [sweep],
// [output]; '#' comments; every key validated, unknown keys rejected with
// the offending line.
RunConfig parse_config(const std::string& text);

// Canonical emission; parse_config(canonical_config(c)) reproduces c.
std::string canonical_config(const RunConfig& config);

}  // namespace srl
