#include "vicinal/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace vicinal::harness {

namespace {

using nlohmann::json;

const std::vector<std::pair<std::string, ExperimentKind>> kKinds = {
    {"run", ExperimentKind::Run},         {"eps_sweep", ExperimentKind::EpsSweep},
    {"step_vs_pde", ExperimentKind::StepVsPde}, {"refine", ExperimentKind::Refine},
    {"longtime", ExperimentKind::Longtime}, {"crosscheck", ExperimentKind::Crosscheck},
    {"check_all", ExperimentKind::CheckAll},
};

template <class T>
T field(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + key + "' is missing or has the wrong type");
    }
}

template <class T>
T field_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return field<T>(j, key);
}

double positive(const json& j, const std::string& key, double fallback) {
    const double v = field_or<double>(j, key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("field '" + key + "' must be a positive number");
    return v;
}

InitialCondition parse_initial(const json& j, std::uint64_t seed) {
    InitialCondition ic;
    ic.seed = seed;
    if (j.is_string()) {
        if (j.get<std::string>() == "degenerate_sine") {
            ic.type = InitialCondition::Type::DegenerateSine;
            return ic;
        }
        throw ConfigError("unknown initial condition '" + j.get<std::string>() + "'");
    }
    if (!j.is_object() || j.size() != 1) throw ConfigError("field 'initial' must name exactly one initial condition");
    const std::string name = j.begin().key();
    const json& body = j.begin().value();
    if (name == "constant") {
        ic.type = InitialCondition::Type::Constant;
        ic.c = body.is_number() ? body.get<double>() : field<double>(body, "c");
        if (!(ic.c > 0.0)) throw ConfigError("constant initial value must be positive");
    } else if (name == "sine_cubed") {
        ic.type = InitialCondition::Type::SineCubed;
        ic.A = field<double>(body, "A");
        ic.M = field<double>(body, "M");
        if (!(ic.M > 0.0) || !(std::abs(ic.A) < ic.M)) throw ConfigError("sine_cubed needs |A| < M: u³ must stay positive");
    } else if (name == "degenerate_sine") {
        ic.type = InitialCondition::Type::DegenerateSine;
    } else if (name == "steps_uniform_perturbed") {
        ic.type = InitialCondition::Type::StepsUniformPerturbed;
        ic.N = field<std::size_t>(body, "N");
        ic.amplitude = field_or<double>(body, "amplitude", 0.0);
        ic.seed = field_or<std::uint64_t>(body, "seed", seed);
        if (ic.N < 4) throw ConfigError("steps_uniform_perturbed needs N ≥ 4");
        if (!(ic.amplitude >= 0.0 && ic.amplitude < 1.0))
            throw ConfigError("steps_uniform_perturbed amplitude must lie in [0, 1) to keep steps ordered");
    } else {
        throw ConfigError("unknown initial condition '" + name + "'");
    }
    return ic;
}

steps::VelocityModel parse_model(const json& j) {
    const auto name = field_or<std::string>(j, "model", "adl");
    if (name == "adl") return steps::Adl{};
    if (name == "dl") return steps::Dl{positive(j, "dk", 1.0)};
    if (name == "bcf") return steps::Bcf{positive(j, "dk", 1.0)};
    throw ConfigError("field 'model' must be adl, dl or bcf");
}

} // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [name, k] : kKinds)
        if (k == kind) return name;
    return "unknown";
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    ExperimentConfig cfg;

    const auto kind = field<std::string>(j, "kind");
    bool found = false;
    for (const auto& [name, k] : kKinds)
        if (name == kind) {
            cfg.kind = k;
            found = true;
        }
    if (!found) throw ConfigError("field 'kind' has unknown value '" + kind + "'");

    cfg.seed = field_or<std::uint64_t>(j, "seed", 1);
    cfg.quick = field_or<bool>(j, "quick", false);
    if (cfg.kind == ExperimentKind::CheckAll) {
        cfg.out_dir = field_or<std::string>(j, "out_dir", "out");
        return cfg;
    }

    if (!j.contains("initial")) throw ConfigError("field 'initial' is required for kind " + kind);
    cfg.initial = parse_initial(j.at("initial"), cfg.seed);
    const bool steps_initial = cfg.initial.type == InitialCondition::Type::StepsUniformPerturbed;
    if (steps_initial && cfg.kind != ExperimentKind::Run)
        throw ConfigError("steps_uniform_perturbed is only valid for kind run");

    if (!j.contains("t_end")) throw ConfigError("field 't_end' is required for kind " + kind);
    cfg.t_end = positive(j, "t_end", 1.0);

    cfg.n = field_or<std::size_t>(j, "n", 256);
    if (cfg.n < 8) throw ConfigError("field 'n' must be at least 8");

    if (j.contains("epsilon")) {
        const auto& e = j.at("epsilon");
        if (e.is_array()) {
            cfg.epsilon = field<std::vector<double>>(j, "epsilon");
            cfg.epsilon_is_list = true;
            if (cfg.epsilon.empty()) throw ConfigError("field 'epsilon' must not be an empty list");
        } else {
            cfg.epsilon = {field<double>(j, "epsilon")};
        }
        for (double v : cfg.epsilon)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("field 'epsilon' must be non-negative");
    }
    if (cfg.kind == ExperimentKind::EpsSweep && !cfg.epsilon_is_list) {
        cfg.epsilon = {1e-2, 1e-3, 1e-4};
        cfg.epsilon_is_list = true;
    }

    const auto scheme = field_or<std::string>(j, "scheme", "semi_implicit");
    if (scheme == "semi_implicit") cfg.scheme = continuum::Scheme::SemiImplicit;
    else if (scheme == "explicit_rk4") cfg.scheme = continuum::Scheme::ExplicitRk4;
    else throw ConfigError("field 'scheme' must be semi_implicit or explicit_rk4");

    const auto mobility = field_or<std::string>(j, "mobility", "secant");
    if (mobility == "secant") cfg.mobility = continuum::Mobility::Secant;
    else if (mobility == "lagged") cfg.mobility = continuum::Mobility::Lagged;
    else throw ConfigError("field 'mobility' must be secant or lagged");

    cfg.cfl_safety = positive(j, "cfl_safety", 0.4);
    cfg.report_every = positive(j, "report_every", cfg.t_end / 100.0);
    cfg.dt = field_or<double>(j, "dt", 0.0);
    if (!(cfg.dt >= 0.0)) throw ConfigError("field 'dt' must be non-negative");
    cfg.positivity_floor = field_or<double>(j, "positivity_floor", 0.0);
    if (!(cfg.positivity_floor >= 0.0)) throw ConfigError("field 'positivity_floor' must be non-negative");
    cfg.out_dir = field_or<std::string>(j, "out_dir", "out");

    const auto format = field_or<std::string>(j, "format", "csv");
    if (format == "csv") cfg.format = OutputFormat::Csv;
    else if (format == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError("field 'format' must be csv or json");

    if (j.contains("steps_list")) {
        cfg.steps_list = field<std::vector<std::size_t>>(j, "steps_list");
        if (cfg.steps_list.empty()) throw ConfigError("field 'steps_list' must not be empty");
        for (auto N : cfg.steps_list)
            if (N < 8) throw ConfigError("field 'steps_list' entries must be at least 8 for step_vs_pde");
    }
    cfg.model = parse_model(j);
    cfg.stop_tolerance = positive(j, "stop_tolerance", 1e-6);
    cfg.snapshot_every = field_or<std::size_t>(j, "snapshot_every", 10);
    if (cfg.snapshot_every == 0) throw ConfigError("field 'snapshot_every' must be positive");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["kind"] = to_string(cfg.kind);
    const auto& ic = cfg.initial;
    switch (ic.type) {
    case InitialCondition::Type::Constant: j["initial"] = {{"constant", {{"c", ic.c}}}}; break;
    case InitialCondition::Type::SineCubed: j["initial"] = {{"sine_cubed", {{"A", ic.A}, {"M", ic.M}}}}; break;
    case InitialCondition::Type::DegenerateSine: j["initial"] = "degenerate_sine"; break;
    case InitialCondition::Type::StepsUniformPerturbed:
        j["initial"] = {{"steps_uniform_perturbed", {{"N", ic.N}, {"amplitude", ic.amplitude}, {"seed", ic.seed}}}};
        break;
    }
    j["n"] = cfg.n;
    if (cfg.epsilon_is_list) j["epsilon"] = cfg.epsilon;
    else j["epsilon"] = cfg.epsilon.front();
    j["t_end"] = cfg.t_end;
    j["scheme"] = cfg.scheme == continuum::Scheme::SemiImplicit ? "semi_implicit" : "explicit_rk4";
    j["mobility"] = cfg.mobility == continuum::Mobility::Secant ? "secant" : "lagged";
    j["cfl_safety"] = cfg.cfl_safety;
    j["report_every"] = cfg.report_every;
    j["dt"] = cfg.dt;
    j["positivity_floor"] = cfg.positivity_floor;
    j["out_dir"] = cfg.out_dir.string();
    j["format"] = cfg.format == OutputFormat::Csv ? "csv" : "json";
    j["seed"] = cfg.seed;
    j["steps_list"] = cfg.steps_list;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, steps::Adl>) j["model"] = "adl";
            else {
                j["model"] = std::is_same_v<M, steps::Dl> ? "dl" : "bcf";
                j["dk"] = m.dk;
            }
        },
        cfg.model);
    j["stop_tolerance"] = cfg.stop_tolerance;
    j["snapshot_every"] = cfg.snapshot_every;
    return j;
}

} // namespace vicinal::harness
