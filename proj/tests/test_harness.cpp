#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vicinal/harness/config.hpp"
#include "vicinal/harness/experiments.hpp"
#include "vicinal/harness/initial.hpp"
#include "vicinal/harness/io.hpp"

using namespace vicinal;
using namespace vicinal::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(VICINAL_TEST_TMP) / "harness" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

energetics::EnergyReport sample_report(double t) {
    energetics::EnergyReport r;
    r.t = t;
    r.F = 0.1 + t / 3.0;
    r.E = std::exp(-t) / 7.0;
    r.D = 1e-300 * (1 + t);
    r.F_eps = -2.0 / 3.0;
    r.m = std::sqrt(2.0) * t;
    r.m_reg = 1.0 / 3.0;
    r.u_min = 0.1;
    r.u_max = 12345.678901234567;
    r.dt = 1e-9 / 3.0;
    return r;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("config defaults and validation") {
    const auto cfg = parse_config(json::parse(R"({"kind": "run", "initial": {"constant": 1.5}, "t_end": 0.01})"));
    CHECK(cfg.kind == ExperimentKind::Run);
    CHECK(cfg.n == 256);
    CHECK(cfg.cfl_safety == 0.4);
    CHECK(cfg.report_every == doctest::Approx(1e-4));
    CHECK(cfg.format == OutputFormat::Csv);
    CHECK(cfg.initial.c == 1.5);
    CHECK(cfg.epsilon == std::vector<double>{0.0});

    CHECK_THROWS_WITH_AS(parse_config(json::parse(R"({"kind": "run", "initial": {"sine_cubed": {"A": 1.5, "M": 1}}, "t_end": 1})")),
                         doctest::Contains("u³ must stay positive"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(json::parse(R"({"kind": "run", "initial": "degenerate_sine"})")),
                         doctest::Contains("t_end"), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"kind": "nope"})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"kind": "run", "initial": {"constant": 1}, "t_end": 1, "n": 4})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"kind": "run", "initial": {"constant": 1}, "t_end": 1, "format": "xml"})")),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config(json::parse(R"({"kind": "eps_sweep", "initial": {"steps_uniform_perturbed": {"N": 8}}, "t_end": 1})")),
        ConfigError);

    const auto sweep = parse_config(json::parse(R"({"kind": "eps_sweep", "initial": "degenerate_sine", "t_end": 1e-3})"));
    CHECK(sweep.epsilon == std::vector<double>{1e-2, 1e-3, 1e-4});
    CHECK(parse_config(json::parse(R"({"kind": "check_all"})")).kind == ExperimentKind::CheckAll);

    const auto steps = parse_config(json::parse(
        R"({"kind": "run", "initial": {"steps_uniform_perturbed": {"N": 16, "amplitude": 0.2, "seed": 9}}, "t_end": 1e-6, "model": "bcf", "dk": 2})"));
    CHECK(steps.initial.N == 16);
    CHECK(steps.initial.seed == 9);
    CHECK(std::get<steps::Bcf>(steps.model).dk == 2.0);
}

TEST_CASE("config files") {
    const auto dir = scratch("config");
    std::ofstream(dir / "bad.json") << "{\n  \"kind\": \"run\",\n  oops\n}";
    CHECK_THROWS_WITH_AS(load_config(dir / "bad.json"), doctest::Contains("line"), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);

    std::ofstream(dir / "good.json") << R"({"kind": "run", "initial": {"sine_cubed": {"A": 0.1, "M": 1}}, "t_end": 1e-4, "epsilon": 1e-3})";
    const auto cfg = load_config(dir / "good.json");
    const auto echo = parse_config(to_json(cfg));
    CHECK(echo.initial.A == 0.1);
    CHECK(echo.epsilon == cfg.epsilon);
    CHECK(echo.t_end == cfg.t_end);
    CHECK(to_string(ExperimentKind::EpsSweep) == "eps_sweep");
}

TEST_CASE("series files round trip exactly") {
    const auto dir = scratch("series");
    const std::vector<energetics::EnergyReport> reps{sample_report(0.0), sample_report(0.1), sample_report(1.0 / 3.0)};

    const auto csv = write_series(reps, dir / "s.csv", OutputFormat::Csv);
    const auto lines = lines_of(csv);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "t,F,E,D,F_eps,m,m_reg,u_min,u_max,dt");
    const auto js = write_series(reps, dir / "s.json", OutputFormat::Json);
    CHECK(json::parse(slurp(js)).at("series").size() == 3);

    for (const auto& p : {csv, js}) {
        const auto back = read_series(p);
        REQUIRE(back.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(back[k].t == reps[k].t);
            CHECK(back[k].F == reps[k].F);
            CHECK(back[k].E == reps[k].E);
            CHECK(back[k].D == reps[k].D);
            CHECK(back[k].F_eps == reps[k].F_eps);
            CHECK(back[k].m == reps[k].m);
            CHECK(back[k].m_reg == reps[k].m_reg);
            CHECK(back[k].u_min == reps[k].u_min);
            CHECK(back[k].u_max == reps[k].u_max);
            CHECK(back[k].dt == reps[k].dt);
        }
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK_THROWS_AS(read_series(dir / "absent.csv"), IoError);
}

TEST_CASE("non-finite values survive JSON") {
    const auto dir = scratch("inf");
    auto r = sample_report(0.0);
    r.m = std::numeric_limits<double>::infinity();
    r.E = std::numeric_limits<double>::quiet_NaN();
    const std::vector<energetics::EnergyReport> reps{r};
    for (auto f : {OutputFormat::Json, OutputFormat::Csv}) {
        const auto back = read_series(write_series(reps, dir / ("s" + extension(f)), f));
        CHECK(std::isinf(back[0].m));
        CHECK(std::isnan(back[0].E));
    }
}

TEST_CASE("snapshot files") {
    const auto dir = scratch("snap");
    const auto u = PeriodicField::constant(make_grid(8), 1.0);
    const auto p = write_snapshot(0.25, u, 1e-3, dir / "u.csv", OutputFormat::Csv);
    const auto lines = lines_of(p);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0].rfind("# t=0.25 n=8 epsilon=", 0) == 0);
    CHECK(lines[1] == "h,u");
    CHECK(lines[2] == "0,1");
    CHECK(lines[3] == "0.125,1");
    for (const auto& ext : {"u.csv", "u.json"}) {
        const auto f = std::string(ext) == "u.csv" ? OutputFormat::Csv : OutputFormat::Json;
        const auto s = read_snapshot(write_snapshot(0.25, u, 1e-3, dir / ext, f));
        CHECK(s.t == 0.25);
        CHECK(s.epsilon == 1e-3);
        REQUIRE(s.u.size() == 8);
        CHECK(s.h[7] == 0.875);
        CHECK(s.u[4] == 1.0);
    }
}

TEST_CASE("generator and initial data") {
    Xorshift64Star a(42), b(42), z(0), zs(0x9E3779B97F4A7C15ULL);
    for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());
    CHECK(z.next() == zs.next());

    // Reference value of the first xorshift64* output for seed 1.
    std::uint64_t s = 1;
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    Xorshift64Star one(1);
    CHECK(one.next() == s * 0x2545F4914F6CDD1DULL);
    for (int k = 0; k < 1000; ++k) {
        const double x = one.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }

    const auto c1 = perturbed_uniform_steps(8, 0.5, 3);
    const auto c2 = perturbed_uniform_steps(8, 0.5, 3);
    CHECK(std::vector<double>(c1.positions().begin(), c1.positions().end()) ==
          std::vector<double>(c2.positions().begin(), c2.positions().end()));
    const auto flat = perturbed_uniform_steps(8, 0.0, 3);
    for (std::size_t i = 0; i < 8; ++i) CHECK(flat.positions()[i] == doctest::Approx(i / 8.0));

    InitialCondition sc;
    sc.type = InitialCondition::Type::SineCubed;
    sc.A = 0.1;
    sc.M = 1.0;
    CHECK(initial_m0(sc) == doctest::Approx(1.0011165472738761).epsilon(1e-14));
    CHECK(initial_value(sc, 0.25) == doctest::Approx(std::cbrt(1.1)));
    InitialCondition c;
    c.c = 4.0;
    CHECK(initial_m0(c) == 0.25);

    const auto f = random_phase_field(make_grid(64), 5);
    CHECK(max_abs_difference(f, random_phase_field(make_grid(64), 5)) == 0.0);
    CHECK(f.min() > 2.0 - 0.5 * (1 + 0.25 + 1.0 / 9 + 1.0 / 16) - 1e-12);
    CHECK(integrate(f) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constant run writes a flat series and satisfied verdicts") {
    auto cfg = parse_config(json::parse(R"({"kind": "run", "initial": {"constant": 1.3}, "t_end": 1e-4, "n": 32, "epsilon": 1e-3})"));
    cfg.out_dir = scratch("constant");
    const auto art = run_experiment(cfg);
    CHECK(art.all_satisfied);
    const auto series = read_series(art.series);
    CHECK(series.size() == 101);
    for (const auto& r : series) {
        CHECK(r.E == 0.0);
        CHECK(r.D == 0.0);
    }
    CHECK(fs::exists(art.verdicts));
    const auto meta = json::parse(slurp(art.metadata));
    CHECK(meta.contains("code_version"));
    CHECK(meta.contains("config"));
    CHECK_FALSE(art.snapshots.empty());
}

TEST_CASE("runs are deterministic") {
    const auto cfg_text = R"({"kind": "run", "initial": {"sine_cubed": {"A": 0.2, "M": 1}}, "t_end": 1e-4, "n": 64, "epsilon": 1e-3})";
    auto a = parse_config(json::parse(cfg_text));
    auto b = a;
    a.out_dir = scratch("det_a");
    b.out_dir = scratch("det_b");
    const auto ra = run_experiment(a);
    const auto rb = run_experiment(b);
    CHECK(slurp(ra.series) == slurp(rb.series));
    REQUIRE(ra.snapshots.size() == rb.snapshots.size());
    CHECK(slurp(ra.snapshots.back()) == slurp(rb.snapshots.back()));

    auto s = parse_config(json::parse(
        R"({"kind": "run", "initial": {"steps_uniform_perturbed": {"N": 16, "amplitude": 0.3, "seed": 4}}, "t_end": 1e-6})"));
    s.out_dir = scratch("det_steps_a");
    const auto sa = slurp(run_experiment(s).series);
    s.out_dir = scratch("det_steps_b");
    CHECK(sa == slurp(run_experiment(s).series));
}

TEST_CASE("long-time limit matches the conserved quantity") {
    auto cfg = parse_config(json::parse(
        R"({"kind": "longtime", "initial": {"sine_cubed": {"A": 0.1, "M": 1}}, "t_end": 0.02, "n": 64, "dt": 1e-6, "report_every": 1e-4})"));
    cfg.out_dir = scratch("longtime");
    const auto art = run_experiment(cfg);
    CHECK(art.all_satisfied);
    CHECK(art.summary.at("abs_error").get<double>() <= 1e-4);
    CHECK(art.summary.at("prediction").get<double>() == doctest::Approx(1.0 / 1.0011165472738761).epsilon(1e-4));
}

TEST_CASE("epsilon sweep respects the positivity bound") {
    InitialCondition deg;
    deg.type = InitialCondition::Type::DegenerateSine;
    continuum::SolverOptions o;
    o.mobility = continuum::Mobility::Secant;
    o.report_every = 1e-5;
    o.keep_snapshots = false;
    const std::vector<double> eps{1e-2, 1e-3};
    const auto rows = eps_sweep(deg, eps, 1e-4, 64, o);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.satisfied);
        CHECK(r.u_min_seen >= r.lower_bound);
        CHECK(r.m_reg_drift <= 1e-8);
    }
    CHECK(rows[0].lower_bound == doctest::Approx(10 * rows[1].lower_bound));
}

}
