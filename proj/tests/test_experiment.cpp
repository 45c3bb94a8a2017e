#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mimetic/experiment.hpp"

using namespace mimetic;
namespace fs = std::filesystem;

namespace
{
    struct TempDir
    {
        fs::path path;
        explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("mimetic_test_" + name)) { fs::remove_all(path); }
        ~TempDir() { fs::remove_all(path); }
    };

    std::string slurp(const fs::path& p)
    {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    std::vector<std::vector<std::string>> read_csv(const fs::path& p)
    {
        std::vector<std::vector<std::string>> rows;
        std::istringstream is(slurp(p));
        std::string line;
        while (std::getline(is, line))
        {
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
                cells.push_back(cell);
            if (!line.empty() && line.back() == ',')
                cells.emplace_back();
            rows.push_back(cells);
        }
        return rows;
    }

    std::string config_error(const std::string& text)
    {
        try
        {
            parse_config_text(text, "cfg.json");
        }
        catch (const ConfigError& e)
        {
            return e.what();
        }
        return {};
    }

    ExperimentConfig small_wave(const fs::path& out)
    {
        ExperimentConfig cfg = parse_config_text(R"({"problem": "wave", "domain": [-3, 3], "n_cells": 60, "t_end": 2, "ic_center": 0, "ic_width": 4})");
        cfg.output_dir = out;
        return cfg;
    }
} // namespace

TEST_CASE("wave config defaults")
{
    const auto cfg = parse_config_text(R"({"problem": "wave", "n_cells": 32, "t_end": 1})");
    CHECK(cfg.problem == Problem::Wave);
    CHECK(cfg.a == 0.0);
    CHECK(cfg.b == 1.0);
    CHECK(cfg.order == 4);
    REQUIRE(cfg.cfl);
    CHECK(*cfg.cfl == 0.5);
    CHECK_FALSE(cfg.dt);
    CHECK(cfg.schemes == all_schemes());
    CHECK(cfg.drift_threshold == 1e-6);
    CHECK(cfg.time_step() == doctest::Approx(0.5 / 32));
}

TEST_CASE("shallow water config defaults and time step")
{
    const auto cfg = parse_config_text(R"({
        // comments are accepted
        "problem": "shallow_water", "n_cells": 600, "t_end": 10
    })");
    CHECK(cfg.a == -30.0);
    CHECK(cfg.b == 30.0);
    CHECK(cfg.ic_offset == 1.0);
    CHECK(cfg.ic_amplitude == 0.1);
    CHECK(std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::RRK) == cfg.schemes.end());
    const auto g = cfg.grid();
    // deepest sampled point is the center at x = 0.05
    const double c = std::sqrt(2.0 + 0.1 * std::exp(-0.0025));
    CHECK(cfg.wave_speed(g) == doctest::Approx(c).epsilon(1e-14));
    CHECK(cfg.time_step(g) == doctest::Approx(0.5 * 0.1 / c).epsilon(1e-14));
}

TEST_CASE("explicit dt and scheme list")
{
    const auto cfg = parse_config_text(R"({"problem": "wave", "n_cells": 32, "t_end": 1, "dt": 0.01, "schemes": ["rk4", "pefrl"], "rrk_time": "nominal"})");
    CHECK(cfg.time_step() == 0.01);
    CHECK(cfg.schemes == std::vector<Scheme>{Scheme::RK4, Scheme::PEFRL});
    CHECK_FALSE(cfg.rrk_relaxed_time);
}

TEST_CASE("config diagnostics name the key and line")
{
    const std::string both = config_error("{\"problem\": \"wave\", \"n_cells\": 32, \"t_end\": 1,\n \"cfl\": 0.5,\n \"dt\": 0.1}");
    CHECK(both.find("cfg.json:3") != std::string::npos);
    CHECK(both.find("'dt'") != std::string::npos);

    const std::string unknown = config_error("{\"problem\": \"wave\",\n \"n_cells\": 32, \"t_end\": 1,\n\n \"cfll\": 0.5}");
    CHECK(unknown.find("cfg.json:4") != std::string::npos);
    CHECK(unknown.find("'cfll'") != std::string::npos);

    const std::string missing = config_error(R"({"problem": "wave", "n_cells": 32})");
    CHECK(missing.find("t_end") != std::string::npos);

    CHECK(config_error(R"({"problem": "wave", "n_cells": -4, "t_end": 1})").find("'n_cells'") != std::string::npos);
    CHECK(config_error(R"({"problem": "wave", "n_cells": 32, "t_end": 1, "order": 3})").find("'order'") != std::string::npos);
    CHECK(config_error(R"({"problem": "heat", "n_cells": 32, "t_end": 1})").find("'problem'") != std::string::npos);
    CHECK(config_error(R"({"problem": "wave", "n_cells": 32, "t_end": 1, "schemes": ["RK5"]})").find("RK5") != std::string::npos);
    CHECK(config_error(R"({"problem": "wave", "n_cells": 32, "t_end": 1, "domain": [1, 0]})").find("'domain'") != std::string::npos);
    CHECK(config_error(R"({"problem": "wave", "n_cells": 32, "t_end": 1, "ic_width": {"x": 1}})").find("nested") != std::string::npos);
    CHECK(config_error("{\"problem\": \"wave\",\n \"n_cells\": 32,, }").find("cfg.json:2") != std::string::npos);
    CHECK(config_error("[1, 2]").find("object") != std::string::npos);
    CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("energy experiment writes csv and summary")
{
    TempDir dir("energy");
    ExperimentConfig cfg = small_wave(dir.path);
    cfg.record_every = 7;
    const EnergyResult res = run_energy_experiment(cfg);
    REQUIRE(res.all_ok());
    CHECK(res.files.size() == cfg.schemes.size() + 1);

    for (const SchemeOutcome& o : res.outcomes)
    {
        const auto rows = read_csv(dir.path / ("energy_" + std::string(scheme_name(o.scheme)) + ".csv"));
        const bool relaxed = o.scheme == Scheme::RRK || o.scheme == Scheme::RRKRoot;
        CHECK(rows[0] == (relaxed ? std::vector<std::string>{"t", "H", "rel_drift", "gamma"} : std::vector<std::string>{"t", "H", "rel_drift"}));
        CHECK(std::stod(rows[1][0]) == 0.0);
        CHECK(std::stod(rows[1][2]) == 0.0);

        const long steps = o.record->steps;
        const std::size_t expected = 1 + static_cast<std::size_t>(steps / cfg.record_every) + (steps % cfg.record_every != 0 ? 1 : 0);
        CHECK(rows.size() - 1 == expected);
        CHECK(std::stod(rows.back()[0]) == o.record->final_time);
        if (!relaxed)
            CHECK(o.record->final_time == doctest::Approx(cfg.t_end).epsilon(1e-12));
        if (relaxed)
            for (std::size_t i = 1; i < rows.size(); ++i)
            {
                const double gamma = std::stod(rows[i][3]);
                CHECK(gamma > 0.9);
                CHECK(gamma < 1.1);
            }
    }

    const auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));
    CHECK(summary["drift_threshold"].get<double>() == 1e-6);
    for (const SchemeOutcome& o : res.outcomes)
        CHECK(summary["schemes"][std::string(scheme_name(o.scheme))]["max_rel_drift"].get<double>() == max_relative_drift(*o.record));
    CHECK(summary["schemes"]["RRK"]["max_rel_drift"].get<double>() < 1e-12);
    CHECK(summary["schemes"]["RK4"]["ok"].get<bool>());
}

TEST_CASE("energy csvs are byte-identical across runs")
{
    TempDir a("det_a"), b("det_b");
    ExperimentConfig cfg = small_wave(a.path);
    run_energy_experiment(cfg);
    cfg.output_dir = b.path;
    cfg.parallel = false;
    run_energy_experiment(cfg);
    for (Scheme sc : cfg.schemes)
    {
        const std::string name = "energy_" + std::string(scheme_name(sc)) + ".csv";
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
}

TEST_CASE("failed run is reported in the summary")
{
    TempDir dir("fail");
    ExperimentConfig cfg = parse_config_text(R"({"problem": "shallow_water", "n_cells": 60, "t_end": 5, "dt": 2.0, "schemes": ["RK4"], "ic_amplitude": 0.9})");
    cfg.output_dir = dir.path;
    const EnergyResult res = run_energy_experiment(cfg);
    CHECK_FALSE(res.all_ok());
    REQUIRE(res.outcomes.size() == 1);
    CHECK_FALSE(res.outcomes[0].error.empty());
    CHECK(res.outcomes[0].failed_step == 0);
    CHECK(res.outcomes[0].error.find("depth") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));
    CHECK_FALSE(summary["schemes"]["RK4"]["ok"].get<bool>());
    CHECK(summary["schemes"]["RK4"]["failed_step"].get<long>() == res.outcomes[0].failed_step);
}

TEST_CASE("summary threshold flag and number formatting")
{
    RunRecord rec;
    rec.scheme = Scheme::RK4;
    rec.times = {0.0, 1.0};
    rec.energies = {1.0, 1.1};
    rec.final_time = 1.0;
    rec.steps = 1;
    SchemeOutcome o{Scheme::RK4, rec, {}, -1};
    CHECK(max_relative_drift(rec) == doctest::Approx(0.1));

    auto flag = [&](double thr) { return nlohmann::json::parse(emit_summary({o}, thr))["schemes"]["RK4"]["within_threshold"].get<bool>(); };
    CHECK_FALSE(flag(1e-3));
    CHECK(flag(0.2));

    RunRecord single = rec;
    single.times = {0.0};
    single.energies = {2.0};
    const auto js = nlohmann::json::parse(emit_summary({SchemeOutcome{Scheme::PEFRL, single, {}, -1}}, 1e-6));
    CHECK(js["schemes"]["PEFRL"]["max_rel_drift"].get<double>() == 0.0);

    CHECK_THROWS_AS(emit_summary({}, 1e-6), DomainError);
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("convergence study")
{
    TempDir dir("conv");
    ExperimentConfig cfg = parse_config_text(R"({"problem": "wave", "n_cells": 16, "t_end": 0.5, "schemes": ["RK4", "Leapfrog"]})");
    cfg.output_dir = dir.path;
    CHECK_THROWS_AS(run_convergence_study(cfg, {16}), ConfigError);
    CHECK_THROWS_AS(run_convergence_study(cfg, {32, 16}), ConfigError);
    CHECK_THROWS_AS(run_convergence_study(cfg, {4, 16}), ConfigError);

    const auto rows = run_convergence_study(cfg, {16, 32, 64});
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        if (i % 3 == 0)
        {
            CHECK_FALSE(rows[i].order);
            continue;
        }
        CHECK(rows[i].error < rows[i - 1].error);
        REQUIRE(rows[i].order);
        CHECK(rows[i].dt == doctest::Approx(0.5 * rows[i].h));
    }

    const auto csv = read_csv(dir.path / "convergence.csv");
    CHECK(csv[0] == std::vector<std::string>{"scheme", "n_cells", "h", "dt", "error", "order", "rhs_evals"});
    REQUIRE(csv.size() == 7);
    for (std::size_t i = 2; i < csv.size(); ++i)
    {
        if (csv[i][5].empty())
            continue;
        const double recomputed = std::log2(std::stod(csv[i - 1][4]) / std::stod(csv[i][4]));
        CHECK(std::stod(csv[i][5]) == doctest::Approx(recomputed).epsilon(1e-12));
    }
    CHECK(rows[2].order.value() == doctest::Approx(4.0).epsilon(0.08));
    CHECK(rows[5].order.value() == doctest::Approx(2.0).epsilon(0.08));

    ExperimentConfig sw = cfg;
    sw.problem = Problem::ShallowWater;
    CHECK_THROWS_AS(run_convergence_study(sw, {16, 32}), ConfigError);
}

TEST_CASE("timing benchmark")
{
    TempDir dir("bench");
    ExperimentConfig cfg = small_wave(dir.path);
    cfg.schemes = {Scheme::RK4, Scheme::ForestRuth};
    CHECK_THROWS_AS(run_timing_benchmark(cfg, 2), ConfigError);
    const auto rows = run_timing_benchmark(cfg, 3);
    REQUIRE(rows.size() == 2);
    for (const TimingRow& r : rows)
    {
        CHECK(r.samples.size() == 3);
        CHECK(r.median_seconds > 0.0);
        CHECK(r.rhs_evaluations == r.steps * evaluations_per_step(r.scheme));
    }
    const auto csv = read_csv(dir.path / "timing.csv");
    CHECK(csv[0] == std::vector<std::string>{"scheme", "median_seconds", "rhs_evals", "steps", "seconds_per_eval"});
    CHECK(csv.size() == 3);
}
