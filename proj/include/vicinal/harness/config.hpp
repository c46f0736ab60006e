#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vicinal/continuum.hpp"
#include "vicinal/errors.hpp"
#include "vicinal/step_chain.hpp"

namespace vicinal::harness {

/// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class ExperimentKind { Run, EpsSweep, StepVsPde, Refine, Longtime, Crosscheck, CheckAll };
enum class OutputFormat { Csv, Json };

struct InitialCondition {
    enum class Type { Constant, SineCubed, DegenerateSine, StepsUniformPerturbed };
    Type type = Type::Constant;
    double c = 1.0;          ///< constant value
    double A = 0.0;          ///< sine_cubed amplitude, u^3 = M + A sin(2 pi h)
    double M = 1.0;          ///< sine_cubed mean
    std::size_t N = 0;       ///< number of steps
    double amplitude = 0.0;  ///< step position jitter, fraction of the mean terrace
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Run;
    InitialCondition initial;
    std::size_t n = 256;
    /// A scalar epsilon is stored as a one-element list.
    std::vector<double> epsilon{0.0};
    bool epsilon_is_list = false;
    double t_end = 0.0;
    continuum::Scheme scheme = continuum::Scheme::SemiImplicit;
    continuum::Mobility mobility = continuum::Mobility::Secant;
    double cfl_safety = 0.4;
    double report_every = 0.0;
    /// Semi-implicit step; zero lets the solver choose.
    double dt = 0.0;
    double positivity_floor = 0.0;
    std::filesystem::path out_dir = "out";
    OutputFormat format = OutputFormat::Csv;
    std::uint64_t seed = 1;
    /// Step counts for step_vs_pde.
    std::vector<std::size_t> steps_list{32, 64, 128};
    /// Velocity law for step-chain runs.
    steps::VelocityModel model = steps::Adl{};
    /// Relative sup-norm tolerance of the long-time stop.
    double stop_tolerance = 1e-6;
    /// Write a snapshot every this many reports (plus the first and last).
    std::size_t snapshot_every = 10;
    /// check_all only: run the reduced suite.
    bool quick = false;
};

/// Parses and validates; fills defaults (n = 256, cfl_safety = 0.4, report_every = t_end/100,
/// format = csv). Throws ConfigError naming the field or the violated invariant.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Reads a JSON file and parses it. Syntax errors carry the line and column.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Echo of the effective configuration, used in run metadata.
nlohmann::json to_json(const ExperimentConfig& cfg);

std::string to_string(ExperimentKind kind);

} // namespace vicinal::harness
