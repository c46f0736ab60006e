// Command-line front end.
//
// Exit codes: 0 success, 1 a verdict failed, 2 configuration or input error,
// 3 numerical failure (collision, step-size underflow, non-finite values, singular solve).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vicinal/errors.hpp"
#include "vicinal/harness/acceptance.hpp"
#include "vicinal/harness/config.hpp"
#include "vicinal/harness/experiments.hpp"
#include "vicinal/harness/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerdictFailed = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

using namespace vicinal;

void apply_overrides(harness::ExperimentConfig& cfg, const std::string& out_dir, const std::string& format) {
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (format == "csv") cfg.format = harness::OutputFormat::Csv;
    else if (format == "json") cfg.format = harness::OutputFormat::Json;
}

int report(const harness::RunArtifacts& art) {
    if (!art.series.empty()) std::cout << "series:   " << art.series.string() << '\n';
    if (!art.snapshots.empty())
        std::cout << "snapshots: " << art.snapshots.size() << " files in " << art.snapshots.front().parent_path().string() << '\n';
    std::cout << "verdicts: " << art.verdicts.string() << '\n';
    std::cout << "metadata: " << art.metadata.string() << '\n';
    std::size_t failed = 0;
    for (const auto& v : art.verdict_list)
        if (!v.satisfied) {
            ++failed;
            std::cout << "FAILED   " << v.name << " (lhs " << harness::format_double(v.lhs) << ", rhs "
                      << harness::format_double(v.rhs) << ")\n";
        }
    std::cout << art.verdict_list.size() - failed << "/" << art.verdict_list.size() << " verdicts satisfied, "
              << art.wall_seconds << " s\n";
    return failed == 0 ? kOk : kVerdictFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Step-flow and continuum simulations of vicinal surfaces"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format;
    bool quick = false;

    auto* run = app.add_subcommand("run", "Run the experiment described by a configuration file");
    run->add_option("--config", config_path, "JSON configuration file")->required();
    run->add_option("--out-dir", out_dir, "Output directory (overrides the configuration)");
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto* sweep = app.add_subcommand("sweep", "Run an epsilon sweep from a configuration file");
    sweep->add_option("--config", config_path, "JSON configuration file")->required();
    sweep->add_option("--out-dir", out_dir, "Output directory (overrides the configuration)");
    sweep->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto* check = app.add_subcommand("check", "Run the acceptance suite");
    check->add_flag("--quick", quick, "Skip the long runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (check->parsed()) {
            const auto results = harness::run_acceptance(quick, &std::cout);
            std::size_t pass = 0, fail = 0, skip = 0;
            for (const auto& r : results) (r.skipped ? skip : r.passed ? pass : fail)++;
            std::cout << pass << " passed, " << fail << " failed, " << skip << " skipped\n";
            return fail == 0 ? kOk : kVerdictFailed;
        }
        auto cfg = harness::load_config(config_path);
        apply_overrides(cfg, out_dir, format);
        if (sweep->parsed()) {
            if (cfg.kind != harness::ExperimentKind::Run && cfg.kind != harness::ExperimentKind::EpsSweep)
                throw harness::ConfigError("sweep needs a configuration of kind run or eps_sweep");
            if (cfg.initial.type == harness::InitialCondition::Type::StepsUniformPerturbed)
                throw harness::ConfigError("sweep needs a continuum initial condition");
            cfg.kind = harness::ExperimentKind::EpsSweep;
            if (!cfg.epsilon_is_list) {
                cfg.epsilon = {1e-2, 1e-3, 1e-4};
                cfg.epsilon_is_list = true;
            }
        }
        return report(harness::run_experiment(cfg));
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const harness::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}
