#include "mimetic/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mimetic
{
    namespace
    {
        using json = nlohmann::json;

        // 1-based line of the first occurrence of "key" in the text, or 0.
        int line_of_key(const std::string& text, const std::string& key)
        {
            const std::size_t pos = text.find('"' + key + '"');
            if (pos == std::string::npos)
                return 0;
            return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
        }

        int line_of_byte(const std::string& text, std::size_t byte)
        {
            byte = std::min(byte, text.size());
            return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
        }

        class KeyReader
        {
        public:
            KeyReader(const json& obj, const std::string& text, const std::string& origin)
                : obj_(obj), text_(text), origin_(origin) {}

            [[noreturn]] void fail(const std::string& key, const std::string& msg) const
            {
                const int line = line_of_key(text_, key);
                std::string where = origin_;
                if (line > 0)
                    where += ":" + std::to_string(line);
                throw ConfigError(where + ": key '" + key + "': " + msg);
            }

            bool has(const std::string& key) const { return obj_.contains(key); }

            double number(const std::string& key) const
            {
                const json& v = obj_.at(key);
                if (!v.is_number())
                    fail(key, "expected a number");
                return v.get<double>();
            }

            int integer(const std::string& key) const
            {
                const json& v = obj_.at(key);
                if (!v.is_number_integer())
                    fail(key, "expected an integer");
                const auto x = v.get<long long>();
                if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                    fail(key, "out of range");
                return static_cast<int>(x);
            }

            std::string string(const std::string& key) const
            {
                const json& v = obj_.at(key);
                if (!v.is_string())
                    fail(key, "expected a string");
                return v.get<std::string>();
            }

            bool boolean(const std::string& key) const
            {
                const json& v = obj_.at(key);
                if (!v.is_boolean())
                    fail(key, "expected true or false");
                return v.get<bool>();
            }

            const json& raw(const std::string& key) const { return obj_.at(key); }

        private:
            const json& obj_;
            const std::string& text_;
            const std::string& origin_;
        };

        const std::set<std::string>& known_keys()
        {
            static const std::set<std::string> keys{
                "problem", "domain", "n_cells", "order", "schemes", "cfl", "dt", "t_end", "record_every",
                "ic_center", "ic_width", "ic_amplitude", "ic_offset", "d0", "g", "output_dir",
                "rrk_tol", "rrk_time", "drift_threshold", "parallel"};
            return keys;
        }

        double median(std::vector<double> v)
        {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }

        void write_file(const std::filesystem::path& path, const std::string& body)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot write " + path.string());
            os << body;
        }

        IntegrateOptions integrate_options(const ExperimentConfig& cfg)
        {
            IntegrateOptions opt;
            opt.record_every = cfg.record_every;
            opt.bisection.tol = cfg.rrk_tol;
            opt.relaxed_time = cfg.rrk_relaxed_time;
            return opt;
        }

        SchemeOutcome run_one(const ExperimentConfig& cfg, const HamiltonianSystem& sys, const PhaseState& s0, Scheme scheme, double dt)
        {
            SchemeOutcome out;
            out.scheme = scheme;
            try
            {
                out.record = integrate(sys, scheme, s0, cfg.t_end, dt, integrate_options(cfg));
            }
            catch (const NumericalFailure& e)
            {
                out.error = e.what();
                out.failed_step = e.step();
            }
            return out;
        }
    } // namespace

    std::string format_number(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    double ExperimentConfig::time_step() const { return time_step(grid()); }

    double ExperimentConfig::time_step(const StaggeredGrid1D& g_) const
    {
        if (dt)
            return *dt;
        return cfl_dt(g_, cfl.value_or(0.5), wave_speed(g_));
    }

    double ExperimentConfig::wave_speed(const StaggeredGrid1D& g_) const
    {
        if (problem == Problem::Wave)
            return 1.0;
        // sqrt(g (d0 + e)) at the deepest point of the initial surface
        const PhaseState s0 = make_initial_state(*this, g_);
        const double e_max = *std::max_element(s0.u.begin(), s0.u.end());
        if (!(d0 + e_max > 0.0))
            throw ConfigError("initial surface leaves no water column (d0 + max e <= 0)");
        return std::sqrt(g * (d0 + e_max));
    }

    ExperimentConfig parse_config_text(const std::string& text, const std::string& origin)
    {
        json obj;
        try
        {
            obj = json::parse(text, nullptr, true, true);
        }
        catch (const json::parse_error& e)
        {
            throw ConfigError(origin + ":" + std::to_string(line_of_byte(text, e.byte)) + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object())
            throw ConfigError(origin + ": config must be a JSON object");

        const KeyReader r(obj, text, origin);
        for (const auto& [key, value] : obj.items())
        {
            if (!known_keys().contains(key))
                r.fail(key, "unknown key");
            if (key != "domain" && key != "schemes" && (value.is_object() || value.is_array()))
                r.fail(key, "nested values are not allowed");
        }
        for (const char* key : {"problem", "n_cells", "t_end"})
            if (!r.has(key))
                throw ConfigError(origin + ": missing required key '" + key + "'");

        ExperimentConfig cfg;
        const std::string problem = r.string("problem");
        if (problem == "wave")
            cfg.problem = Problem::Wave;
        else if (problem == "shallow_water")
            cfg.problem = Problem::ShallowWater;
        else
            r.fail("problem", "expected \"wave\" or \"shallow_water\", got \"" + problem + "\"");

        if (cfg.problem == Problem::ShallowWater)
        {
            cfg.a = -30.0;
            cfg.b = 30.0;
            cfg.ic_center = 0.0;
            cfg.ic_width = 1.0;
            cfg.ic_amplitude = 0.1;
            cfg.ic_offset = 1.0;
            cfg.drift_threshold = 1e-3;
        }

        if (r.has("domain"))
        {
            const json& d = r.raw("domain");
            if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
                r.fail("domain", "expected [a, b]");
            cfg.a = d[0].get<double>();
            cfg.b = d[1].get<double>();
            if (!(cfg.b > cfg.a))
                r.fail("domain", "needs a < b");
        }

        cfg.n_cells = r.integer("n_cells");
        if (cfg.n_cells < 1)
            r.fail("n_cells", "must be at least 1");
        if (r.has("order"))
        {
            cfg.order = r.integer("order");
            if (!valid_order(cfg.order))
                r.fail("order", "must be 2 or 4");
        }
        if (cfg.n_cells < 2 * cfg.order)
            r.fail("n_cells", "order " + std::to_string(cfg.order) + " needs at least " + std::to_string(2 * cfg.order) + " cells");

        if (r.has("schemes"))
        {
            const json& s = r.raw("schemes");
            if (!s.is_array() || s.empty())
                r.fail("schemes", "expected a non-empty list of scheme names");
            for (const json& item : s)
            {
                if (!item.is_string())
                    r.fail("schemes", "scheme names must be strings");
                const auto sc = parse_scheme(item.get<std::string>());
                if (!sc)
                    r.fail("schemes", "unknown scheme \"" + item.get<std::string>() + "\"");
                if (std::find(cfg.schemes.begin(), cfg.schemes.end(), *sc) != cfg.schemes.end())
                    r.fail("schemes", "duplicate scheme \"" + item.get<std::string>() + "\"");
                cfg.schemes.push_back(*sc);
            }
        }
        else
        {
            for (Scheme s : all_schemes())
                if (!(cfg.problem == Problem::ShallowWater && s == Scheme::RRK))
                    cfg.schemes.push_back(s);
        }

        if (r.has("cfl") && r.has("dt"))
            r.fail("dt", "set exactly one of cfl and dt");
        if (r.has("dt"))
        {
            cfg.dt = r.number("dt");
            if (!(*cfg.dt > 0.0))
                r.fail("dt", "must be positive");
        }
        else
        {
            cfg.cfl = r.has("cfl") ? r.number("cfl") : 0.5;
            if (!(*cfg.cfl > 0.0))
                r.fail("cfl", "must be positive");
        }

        cfg.t_end = r.number("t_end");
        if (!(cfg.t_end > 0.0))
            r.fail("t_end", "must be positive");
        if (r.has("record_every"))
        {
            cfg.record_every = r.integer("record_every");
            if (cfg.record_every < 1)
                r.fail("record_every", "must be at least 1");
        }

        if (r.has("ic_center"))
            cfg.ic_center = r.number("ic_center");
        if (r.has("ic_width"))
        {
            cfg.ic_width = r.number("ic_width");
            if (!(cfg.ic_width > 0.0))
                r.fail("ic_width", "must be positive");
        }
        if (r.has("ic_amplitude"))
            cfg.ic_amplitude = r.number("ic_amplitude");
        if (r.has("ic_offset"))
            cfg.ic_offset = r.number("ic_offset");
        if (r.has("d0"))
        {
            cfg.d0 = r.number("d0");
            if (!(cfg.d0 > 0.0))
                r.fail("d0", "must be positive");
        }
        if (r.has("g"))
        {
            cfg.g = r.number("g");
            if (!(cfg.g > 0.0))
                r.fail("g", "must be positive");
        }
        if (r.has("output_dir"))
            cfg.output_dir = r.string("output_dir");
        if (r.has("rrk_tol"))
        {
            cfg.rrk_tol = r.number("rrk_tol");
            if (!(cfg.rrk_tol > 0.0))
                r.fail("rrk_tol", "must be positive");
        }
        if (r.has("rrk_time"))
        {
            const std::string mode = r.string("rrk_time");
            if (mode == "relaxed")
                cfg.rrk_relaxed_time = true;
            else if (mode == "nominal")
                cfg.rrk_relaxed_time = false;
            else
                r.fail("rrk_time", "expected \"relaxed\" or \"nominal\"");
        }
        if (r.has("drift_threshold"))
        {
            cfg.drift_threshold = r.number("drift_threshold");
            if (!(cfg.drift_threshold > 0.0))
                r.fail("drift_threshold", "must be positive");
        }
        if (r.has("parallel"))
            cfg.parallel = r.boolean("parallel");
        return cfg;
    }

    ExperimentConfig parse_config(const std::filesystem::path& path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw ConfigError(path.string() + ": cannot open config file");
        std::ostringstream ss;
        ss << is.rdbuf();
        return parse_config_text(ss.str(), path.string());
    }

    std::unique_ptr<HamiltonianSystem> make_system(const ExperimentConfig& cfg, const StaggeredGrid1D& grid)
    {
        auto ops = operator_set(cfg.order, grid);
        if (cfg.problem == Problem::Wave)
            return std::make_unique<WaveSystem>(std::move(ops));
        return std::make_unique<ShallowWaterSystem>(std::move(ops), cfg.d0, cfg.g);
    }

    PhaseState make_initial_state(const ExperimentConfig& cfg, const StaggeredGrid1D& grid)
    {
        if (cfg.problem == Problem::Wave)
        {
            PhaseState s = gaussian_ic(grid, cfg.ic_center, cfg.ic_width, cfg.ic_amplitude);
            if (cfg.ic_offset != 0.0)
                for (std::size_t j = 1; j + 1 < s.u.size(); ++j)
                    s.u[j] += cfg.ic_offset;
            return s;
        }
        return shallow_water_ic(grid, cfg.ic_center, cfg.ic_width, cfg.ic_amplitude, cfg.ic_offset);
    }

    bool EnergyResult::all_ok() const noexcept
    {
        return std::all_of(outcomes.begin(), outcomes.end(), [](const SchemeOutcome& o) { return o.record.has_value(); });
    }

    double max_relative_drift(const RunRecord& rec)
    {
        if (rec.energies.empty())
            return 0.0;
        const double h0 = rec.energies.front();
        double worst = 0.0;
        for (double e : rec.energies)
            worst = std::max(worst, std::abs(e - h0) / std::abs(h0));
        return worst;
    }

    std::string energy_csv(const RunRecord& rec)
    {
        const bool relaxed = !rec.gammas.empty();
        std::string out = relaxed ? "t,H,rel_drift,gamma\n" : "t,H,rel_drift\n";
        const double h0 = rec.energies.empty() ? 0.0 : rec.energies.front();
        for (std::size_t i = 0; i < rec.times.size(); ++i)
        {
            out += format_number(rec.times[i]);
            out += ',';
            out += format_number(rec.energies[i]);
            out += ',';
            out += format_number(i == 0 ? 0.0 : (rec.energies[i] - h0) / h0);
            if (relaxed)
            {
                out += ',';
                out += format_number(rec.gammas[i]);
            }
            out += '\n';
        }
        return out;
    }

    EnergyResult run_energy_experiment(const ExperimentConfig& cfg)
    {
        const StaggeredGrid1D grid = cfg.grid();
        const auto sys = make_system(cfg, grid);
        const PhaseState s0 = make_initial_state(cfg, grid);
        const double dt = cfg.time_step(grid);

        EnergyResult res;
        if (cfg.parallel && cfg.schemes.size() > 1)
        {
            std::vector<std::future<SchemeOutcome>> jobs;
            for (Scheme sc : cfg.schemes)
                jobs.push_back(std::async(std::launch::async, [&, sc] { return run_one(cfg, *sys, s0, sc, dt); }));
            for (auto& j : jobs)
                res.outcomes.push_back(j.get());
        }
        else
        {
            for (Scheme sc : cfg.schemes)
                res.outcomes.push_back(run_one(cfg, *sys, s0, sc, dt));
        }

        std::filesystem::create_directories(cfg.output_dir);
        for (const SchemeOutcome& o : res.outcomes)
        {
            if (!o.record)
                continue;
            const auto path = cfg.output_dir / ("energy_" + std::string(scheme_name(o.scheme)) + ".csv");
            write_file(path, energy_csv(*o.record));
            res.files.push_back(path);
        }
        const auto summary = cfg.output_dir / "summary.json";
        write_file(summary, emit_summary(res.outcomes, cfg.drift_threshold));
        res.files.push_back(summary);
        return res;
    }

    std::vector<ConvergenceRow> run_convergence_study(const ExperimentConfig& cfg, const std::vector<int>& refinements)
    {
        if (refinements.size() < 2)
            throw ConfigError("convergence study needs at least two refinements");
        if (cfg.problem != Problem::Wave)
            throw ConfigError("convergence study needs problem \"wave\" (standing wave on [0, 1])");
        for (std::size_t i = 0; i < refinements.size(); ++i)
        {
            if (refinements[i] < 2 * cfg.order)
                throw ConfigError("refinement " + std::to_string(refinements[i]) + " is below the minimum of " + std::to_string(2 * cfg.order) + " cells");
            if (i > 0 && refinements[i] <= refinements[i - 1])
                throw ConfigError("refinements must be strictly increasing");
        }

        struct Case
        {
            Scheme scheme;
            int n;
        };
        std::vector<Case> cases;
        for (Scheme sc : cfg.schemes)
            for (int n : refinements)
                cases.push_back({sc, n});

        auto run_case = [&cfg](const Case& c) {
            const StaggeredGrid1D grid(0.0, 1.0, c.n);
            const WaveSystem sys(operator_set(cfg.order, grid));
            PhaseState s0;
            s0.u = grid.extended_centers();
            for (double& x : s0.u)
                x = wave_standing_exact(x, 0.0);
            s0.u.front() = s0.u.back() = 0.0;
            s0.v.assign(grid.extended_count(), 0.0);

            const double dt = cfg.dt ? *cfg.dt * (static_cast<double>(cfg.n_cells) / c.n) : cfl_dt(grid, cfg.cfl.value_or(0.5), 1.0);
            IntegrateOptions opt = integrate_options(cfg);
            opt.record_every = std::numeric_limits<int>::max();
            const RunRecord rec = integrate(sys, c.scheme, s0, cfg.t_end, dt, opt);

            const std::vector<double> x = grid.extended_centers();
            double err = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j)
                err = std::max(err, std::abs(rec.final_state.u[j] - wave_standing_exact(x[j], rec.final_time)));
            return ConvergenceRow{c.scheme, c.n, grid.h(), dt, err, std::nullopt, rec.rhs_evaluations};
        };

        std::vector<ConvergenceRow> rows(cases.size());
        if (cfg.parallel)
        {
            std::vector<std::future<ConvergenceRow>> jobs;
            for (const Case& c : cases)
                jobs.push_back(std::async(std::launch::async, run_case, c));
            for (std::size_t i = 0; i < jobs.size(); ++i)
                rows[i] = jobs[i].get();
        }
        else
        {
            for (std::size_t i = 0; i < cases.size(); ++i)
                rows[i] = run_case(cases[i]);
        }

        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].scheme == rows[i - 1].scheme)
                rows[i].order = std::log(rows[i - 1].error / rows[i].error) / std::log(rows[i - 1].h / rows[i].h);

        std::filesystem::create_directories(cfg.output_dir);
        write_file(cfg.output_dir / "convergence.csv", convergence_csv(rows));
        return rows;
    }

    std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
    {
        std::string out = "scheme,n_cells,h,dt,error,order,rhs_evals\n";
        for (const ConvergenceRow& r : rows)
        {
            out += std::string(scheme_name(r.scheme)) + ',' + std::to_string(r.n_cells) + ',' + format_number(r.h) + ',' + format_number(r.dt) + ',' + format_number(r.error) + ',';
            if (r.order)
                out += format_number(*r.order);
            out += ',' + std::to_string(r.rhs_evaluations) + '\n';
        }
        return out;
    }

    std::vector<TimingRow> run_timing_benchmark(const ExperimentConfig& cfg, int repeats)
    {
        if (repeats < 3)
            throw ConfigError("timing benchmark needs at least 3 repeats, got " + std::to_string(repeats));
        const StaggeredGrid1D grid = cfg.grid();
        const auto sys = make_system(cfg, grid);
        const PhaseState s0 = make_initial_state(cfg, grid);
        const double dt = cfg.time_step(grid);
        const IntegrateOptions opt = integrate_options(cfg);

        std::vector<TimingRow> rows;
        for (Scheme sc : cfg.schemes)
        {
            TimingRow row;
            row.scheme = sc;
            for (int r = 0; r < repeats; ++r)
            {
                const RunRecord rec = integrate(*sys, sc, s0, cfg.t_end, dt, opt);
                if (r > 0 && rec.rhs_evaluations != row.rhs_evaluations)
                    throw NumericalFailure("rhs evaluation count changed between repeats of " + std::string(scheme_name(sc)));
                row.rhs_evaluations = rec.rhs_evaluations;
                row.steps = rec.steps;
                row.samples.push_back(rec.wall_seconds);
            }
            row.median_seconds = median(row.samples);
            row.seconds_per_evaluation = row.rhs_evaluations > 0 ? row.median_seconds / static_cast<double>(row.rhs_evaluations) : 0.0;
            rows.push_back(std::move(row));
        }
        std::filesystem::create_directories(cfg.output_dir);
        write_file(cfg.output_dir / "timing.csv", timing_csv(rows));
        return rows;
    }

    std::string timing_csv(const std::vector<TimingRow>& rows)
    {
        std::string out = "scheme,median_seconds,rhs_evals,steps,seconds_per_eval\n";
        for (const TimingRow& r : rows)
            out += std::string(scheme_name(r.scheme)) + ',' + format_number(r.median_seconds) + ',' + std::to_string(r.rhs_evaluations) + ',' + std::to_string(r.steps) + ',' + format_number(r.seconds_per_evaluation) + '\n';
        return out;
    }

    std::string emit_summary(const std::vector<SchemeOutcome>& outcomes, double drift_threshold)
    {
        if (outcomes.empty())
            throw DomainError("summary needs at least one run");
        auto quote = [](std::string_view s) { return json(std::string(s)).dump(); };

        std::string out = "{\n  \"drift_threshold\": " + format_number(drift_threshold) + ",\n  \"schemes\": {\n";
        for (std::size_t i = 0; i < outcomes.size(); ++i)
        {
            const SchemeOutcome& o = outcomes[i];
            out += "    " + quote(scheme_name(o.scheme)) + ": {";
            if (o.record)
            {
                const RunRecord& r = *o.record;
                const double drift = max_relative_drift(r);
                const double h0 = r.energies.front();
                const double final_drift = (r.energies.back() - h0) / h0;
                out += "\"ok\": true";
                out += ", \"final_time\": " + format_number(r.final_time);
                out += ", \"initial_energy\": " + format_number(h0);
                out += ", \"final_energy\": " + format_number(r.energies.back());
                out += ", \"max_rel_drift\": " + format_number(drift);
                out += ", \"final_rel_drift\": " + format_number(final_drift);
                out += ", \"steps\": " + std::to_string(r.steps);
                out += ", \"rhs_evaluations\": " + std::to_string(r.rhs_evaluations);
                out += ", \"wall_seconds\": " + format_number(r.wall_seconds);
                out += std::string(", \"within_threshold\": ") + (drift <= drift_threshold ? "true" : "false");
            }
            else
            {
                out += "\"ok\": false, \"failed_step\": " + std::to_string(o.failed_step) + ", \"error\": " + quote(o.error);
            }
            out += i + 1 < outcomes.size() ? "},\n" : "}\n";
        }
        out += "  }\n}\n";
        return out;
    }
} // namespace mimetic
