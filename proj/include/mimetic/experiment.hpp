#ifndef MIMETIC_EXPERIMENT_HPP
#define MIMETIC_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mimetic/integrators.hpp"

namespace mimetic
{
    enum class Problem
    {
        Wave,
        ShallowWater
    };

    struct ExperimentConfig
    {
        Problem problem = Problem::Wave;
        double a = 0.0;
        double b = 1.0;
        int n_cells = 0;
        int order = 4;
        std::vector<Scheme> schemes;
        std::optional<double> cfl;   // exactly one of cfl / dt is set after parsing
        std::optional<double> dt;
        double t_end = 0.0;
        int record_every = 1;

        double ic_center = 0.5;
        double ic_width = 100.0;
        double ic_amplitude = 1.0;
        double ic_offset = 0.0;
        double d0 = 1.0;
        double g = 1.0;

        std::filesystem::path output_dir = "out";
        double rrk_tol = 1e-12;
        bool rrk_relaxed_time = true;
        double drift_threshold = 1e-6;
        bool parallel = true;

        StaggeredGrid1D grid() const { return {a, b, n_cells}; }
        /// dt, or cfl h / wave_speed.
        double time_step() const;
        double time_step(const StaggeredGrid1D& grid) const;
        /// 1 for the wave equation; sqrt(g max(d0 + e)) over the initial
        /// surface for shallow water.
        double wave_speed(const StaggeredGrid1D& grid) const;
    };

    /// Flat JSON object. Required keys: problem, n_cells, t_end. Throws
    /// ConfigError naming the key (and line when known).
    ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
    ExperimentConfig parse_config(const std::filesystem::path& path);

    std::unique_ptr<HamiltonianSystem> make_system(const ExperimentConfig& cfg, const StaggeredGrid1D& grid);
    PhaseState make_initial_state(const ExperimentConfig& cfg, const StaggeredGrid1D& grid);

    struct SchemeOutcome
    {
        Scheme scheme{};
        std::optional<RunRecord> record;
        std::string error;   // set when the run failed
        long failed_step = -1;
    };

    struct EnergyResult
    {
        std::vector<SchemeOutcome> outcomes;
        std::vector<std::filesystem::path> files;
        bool all_ok() const noexcept;
    };

    /// One CSV per scheme (energy_<scheme>.csv, header t,H,rel_drift[,gamma])
    /// and summary.json in cfg.output_dir.
    EnergyResult run_energy_experiment(const ExperimentConfig& cfg);

    /// CSV body for one run.
    std::string energy_csv(const RunRecord& rec);

    struct ConvergenceRow
    {
        Scheme scheme{};
        int n_cells = 0;
        double h = 0.0;
        double dt = 0.0;
        double error = 0.0;
        std::optional<double> order;
        long rhs_evaluations = 0;
    };

    /// Standing wave sin(pi x) cos(pi t) on [0, 1] for every scheme and
    /// refinement; writes convergence.csv. Needs at least two refinements.
    std::vector<ConvergenceRow> run_convergence_study(const ExperimentConfig& cfg, const std::vector<int>& refinements);
    std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

    struct TimingRow
    {
        Scheme scheme{};
        double median_seconds = 0.0;
        long rhs_evaluations = 0;
        long steps = 0;
        double seconds_per_evaluation = 0.0;
        std::vector<double> samples;
    };

    /// Sequential runs, median of repeats (>= 3); writes timing.csv.
    std::vector<TimingRow> run_timing_benchmark(const ExperimentConfig& cfg, int repeats);
    std::string timing_csv(const std::vector<TimingRow>& rows);

    /// max |H - H0| / |H0| over the record
    double max_relative_drift(const RunRecord& rec);

    /// JSON summary, numbers with 17 significant digits.
    std::string emit_summary(const std::vector<SchemeOutcome>& outcomes, double drift_threshold);

    /// %.17g
    std::string format_number(double x);
} // namespace mimetic

#endif
