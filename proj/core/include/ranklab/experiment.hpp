#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ranklab/initial_law.hpp"
#include "ranklab/profile.hpp"

namespace ranklab {

/// Profile section: a named preset or explicit tables.
struct ProfileConfig {
    enum class Kind { Atlas, Explicit, MeanField, SmoothedAtlas };
    Kind kind = Kind::Atlas;
    int n = 0;  // finite size for atlas/explicit and for discretization
    double gamma = 1.0;
    double width = 0.1;  // smoothed-atlas spike support
    std::vector<double> drifts;
    std::vector<double> diffusions;
    std::vector<std::pair<double, double>> b_knots;
    std::vector<std::pair<double, double>> sigma2_knots;

    /// Finite-size coefficients; discretizes mean-field kinds (requires n).
    CoefficientProfile finite(int n_override = 0) const;
    /// Mean-field form; throws for kinds without one.
    MeanFieldProfile meanfield() const;
};

struct InitialLawConfig {
    enum class Kind { Point, Uniform, Gaussian, Samples };
    Kind kind = Kind::Gaussian;
    double at = 0.0;
    double a = 0.0, b = 1.0;
    double mean = 0.0, variance = 1.0;
    std::string path;  // sample file

    InitialLaw build() const;
};

struct SimSection {
    int n = 1;
    double dt = 1e-3;
    double t_end = 1.0;
    std::uint64_t seed = 0;
    InitialLawConfig initial_law;
    std::vector<double> record_times;
    double record_stride = 0.0;  // if > 0, times are record_from, +stride, ...
    double record_from = 0.0;
    double burn_in_fraction = 0.2;
    enum class OutputMode { Positions, Quantiles };
    OutputMode output_mode = OutputMode::Quantiles;
    std::vector<double> quantile_levels{0.1, 0.25, 0.5, 0.75, 0.9};

    std::vector<double> resolved_record_times() const;
};

struct PdeSection {
    double x_min = -10.0, x_max = 10.0;
    int nx = 1000;
    double t_end = 1.0;
    std::vector<double> record_times;
    int flux_order = 2;
    InitialLawConfig initial_law;
    std::string restart_from;  // grid file; overrides initial_law if set
};

struct WaveExperimentSection {
    std::vector<double> shifts{-1.0, 1.0};
    std::vector<double> weights{0.5, 0.5};
    double horizon = 20.0;
    double x_min = -10.0, x_max = 30.0;
    int nx = 2000;
    double record_stride = 1.0;
};

struct WaveSection {
    double target_mean = 0.0;
    double x_min = -10.0, x_max = 10.0;
    int samples = 400;  // export resolution of the (x, phi) table
    std::optional<WaveExperimentSection> experiment;
};

struct CapitalSection {
    double top_fraction = 0.1;
    int density_points = 200;
    bool from_simulation = false;  // also run the sim section and fit the curve
};

struct StabilitySection {
    double drift_tol = 1e-9;
};

struct ExperimentConfig {
    int schema_version = 1;
    std::string out_dir = "out";
    ProfileConfig profile;
    std::optional<SimSection> sim;
    std::optional<PdeSection> pde;
    std::optional<WaveSection> wave;
    std::optional<CapitalSection> capital;
    StabilitySection stability;
};

/// Strict parse: unknown keys are rejected with their dotted path.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const std::vector<std::string>& overrides = {});

/// Canonical fully-resolved JSON; parsing it back yields the same config.
std::string serialize_config(const ExperimentConfig& cfg);

enum class Command { Simulate, Stability, Pde, Wave, Capital };

Command parse_command(const std::string& name);

struct RunResult {
    std::vector<std::filesystem::path> outputs;  // includes the provenance sidecar
};

/// Executes one command: writes the declared tables atomically into
/// cfg.out_dir plus a provenance sidecar holding the resolved config.
RunResult run_command(Command cmd, const ExperimentConfig& cfg);

}  // namespace ranklab
