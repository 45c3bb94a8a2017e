#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mimetic/experiment.hpp"

namespace
{
    std::vector<int> parse_list(const std::string& s)
    {
        std::vector<int> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            if (item.empty())
                continue;
            std::size_t used = 0;
            const int n = std::stoi(item, &used);
            if (used != item.size())
                throw mimetic::ConfigError("bad cell count '" + item + "' in --n");
            out.push_back(n);
        }
        return out;
    }
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mimetic operators and symplectic time integration experiments"};
    app.require_subcommand(1);

    std::string config;
    std::string refinements = "16,32,64,128";
    int repeats = 5;
    int order = 4;
    int cells = 16;
    double a = 0.0;
    double b = 1.0;
    std::string out_dir = "ops";

    auto* energy = app.add_subcommand("energy", "Energy-vs-time traces, one CSV per scheme plus summary.json");
    energy->add_option("config", config, "experiment config (flat JSON)")->required();

    auto* converge = app.add_subcommand("converge", "Standing-wave convergence table");
    converge->add_option("config", config, "experiment config (flat JSON)")->required();
    converge->add_option("--n", refinements, "comma-separated cell counts");

    auto* bench = app.add_subcommand("bench", "Median wall time per scheme");
    bench->add_option("config", config, "experiment config (flat JSON)")->required();
    bench->add_option("--repeats", repeats, "runs per scheme (>= 3)");

    auto* dump = app.add_subcommand("dump-ops", "Write every operator as Matrix Market files");
    dump->add_option("--order", order, "mimetic order (2 or 4)");
    dump->add_option("--cells", cells, "number of cells");
    dump->add_option("--a", a, "left endpoint");
    dump->add_option("--b", b, "right endpoint");
    dump->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*energy)
        {
            const mimetic::ExperimentConfig cfg = mimetic::parse_config(config);
            const mimetic::EnergyResult res = mimetic::run_energy_experiment(cfg);
            for (const auto& o : res.outcomes)
            {
                if (o.record)
                    std::printf("%-9s max |H-H0|/H0 = %.3e  (%ld steps, %ld evals, %.3f s)\n", std::string(mimetic::scheme_name(o.scheme)).c_str(), mimetic::max_relative_drift(*o.record), o.record->steps, o.record->rhs_evaluations, o.record->wall_seconds);
                else
                    std::fprintf(stderr, "%s failed: %s\n", std::string(mimetic::scheme_name(o.scheme)).c_str(), o.error.c_str());
            }
            std::printf("wrote %zu files to %s\n", res.files.size(), cfg.output_dir.string().c_str());
            return res.all_ok() ? 0 : 3;
        }
        if (*converge)
        {
            const mimetic::ExperimentConfig cfg = mimetic::parse_config(config);
            const auto rows = mimetic::run_convergence_study(cfg, parse_list(refinements));
            std::cout << mimetic::convergence_csv(rows);
            return 0;
        }
        if (*bench)
        {
            const mimetic::ExperimentConfig cfg = mimetic::parse_config(config);
            const auto rows = mimetic::run_timing_benchmark(cfg, repeats);
            std::cout << mimetic::timing_csv(rows);
            return 0;
        }
        if (*dump)
        {
            const mimetic::StaggeredGrid1D grid(a, b, cells);
            const auto ops = mimetic::operator_set(order, grid);
            for (const auto& p : mimetic::dump_operator_set(*ops, out_dir))
                std::cout << p.string() << '\n';
            return 0;
        }
    }
    catch (const mimetic::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const mimetic::DomainError& e)
    {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    }
    catch (const mimetic::NumericalFailure& e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    catch (const mimetic::ConstructionError& e)
    {
        std::cerr << "operator construction failed: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
