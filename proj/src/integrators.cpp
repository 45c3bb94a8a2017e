#include "mimetic/integrators.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

namespace mimetic
{
    namespace
    {
        void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y)
        {
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] += alpha * x[i];
        }

        PhaseState shifted(const PhaseState& s, double alpha, const PhaseState& d)
        {
            PhaseState out = s;
            axpy(alpha, d.u, out.u);
            axpy(alpha, d.v, out.v);
            return out;
        }

        PhaseState splitting_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt, const SplittingCoefficients& c)
        {
            PhaseState x = s;
            std::vector<double> rate;
            for (std::size_t i = 0; i < c.kick.size(); ++i)
            {
                sys.position_rate(x, t, rate);
                axpy(c.drift[i] * dt, rate, x.u);
                sys.apply_boundary(x);
                sys.velocity_rate(x, t, rate);
                axpy(c.kick[i] * dt, rate, x.v);
                sys.apply_boundary(x);
            }
            if (c.drift.back() != 0.0)
            {
                sys.position_rate(x, t, rate);
                axpy(c.drift.back() * dt, rate, x.u);
                sys.apply_boundary(x);
            }
            return x;
        }

        std::string lower(std::string_view s)
        {
            std::string out(s);
            for (char& ch : out)
                ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            return out;
        }
    } // namespace

    std::string_view scheme_name(Scheme s) noexcept
    {
        switch (s)
        {
        case Scheme::RK4: return "RK4";
        case Scheme::RRK: return "RRK";
        case Scheme::RRKRoot: return "RRK-root";
        case Scheme::ForestRuth: return "FRuth";
        case Scheme::PEFRL: return "PEFRL";
        case Scheme::Leapfrog: return "Leapfrog";
        case Scheme::Composition4: return "COMP4";
        }
        return "?";
    }

    const std::vector<Scheme>& all_schemes()
    {
        static const std::vector<Scheme> all{Scheme::RK4, Scheme::RRK, Scheme::RRKRoot, Scheme::ForestRuth, Scheme::PEFRL, Scheme::Leapfrog, Scheme::Composition4};
        return all;
    }

    std::optional<Scheme> parse_scheme(std::string_view name)
    {
        const std::string key = lower(name);
        for (Scheme s : all_schemes())
            if (lower(scheme_name(s)) == key)
                return s;
        if (key == "rrk_analytic")
            return Scheme::RRK;
        if (key == "rrk_bisection" || key == "rrk-bisection")
            return Scheme::RRKRoot;
        if (key == "forestruth" || key == "forest_ruth" || key == "fr")
            return Scheme::ForestRuth;
        if (key == "composition4")
            return Scheme::Composition4;
        return std::nullopt;
    }

    int evaluations_per_step(Scheme s) noexcept
    {
        switch (s)
        {
        case Scheme::RK4:
        case Scheme::RRK:
        case Scheme::RRKRoot:
        case Scheme::PEFRL: return 4;
        case Scheme::ForestRuth: return 3;
        case Scheme::Leapfrog: return 1;
        case Scheme::Composition4: return 5;
        }
        return 0;
    }

    int scheme_order(Scheme s) noexcept { return s == Scheme::Leapfrog ? 2 : 4; }

    bool is_symplectic(Scheme s) noexcept
    {
        return s == Scheme::ForestRuth || s == Scheme::PEFRL || s == Scheme::Leapfrog || s == Scheme::Composition4;
    }

    ButcherTableau ButcherTableau::rk4()
    {
        return {{{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
                {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6},
                {0, 0.5, 0.5, 1}};
    }

    ButcherTableau ButcherTableau::implicit_midpoint() { return {{{0.5}}, {1.0}, {0.5}}; }

    double symplecticity_residual(const ButcherTableau& t)
    {
        const std::size_t s = t.stages();
        if (t.a.size() != s || t.c.size() != s)
            throw DomainError("malformed Butcher tableau");
        double worst = 0.0;
        for (std::size_t i = 0; i < s; ++i)
        {
            if (t.a[i].size() != s)
                throw DomainError("malformed Butcher tableau");
            for (std::size_t j = i; j < s; ++j)
                worst = std::max(worst, std::abs(t.b[i] * t.a[i][j] + t.b[j] * t.a[j][i] - t.b[i] * t.b[j]));
        }
        return worst;
    }

    PhaseState rk4_direction(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt)
    {
        PhaseState k1 = sys.rhs(s, t);
        PhaseState x = shifted(s, 0.5 * dt, k1);
        sys.apply_boundary(x);
        PhaseState k2 = sys.rhs(x, t + 0.5 * dt);
        x = shifted(s, 0.5 * dt, k2);
        sys.apply_boundary(x);
        PhaseState k3 = sys.rhs(x, t + 0.5 * dt);
        x = shifted(s, dt, k3);
        sys.apply_boundary(x);
        const PhaseState k4 = sys.rhs(x, t + dt);

        PhaseState d = std::move(k1);
        for (std::size_t i = 0; i < d.u.size(); ++i)
            d.u[i] = (d.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]) / 6.0;
        for (std::size_t i = 0; i < d.v.size(); ++i)
            d.v[i] = (d.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]) / 6.0;
        return d;
    }

    PhaseState rk4_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt)
    {
        if (dt == 0.0)
            return s;
        PhaseState out = shifted(s, dt, rk4_direction(sys, s, t, dt));
        sys.apply_boundary(out);
        return out;
    }

    double rrk_gamma_analytic(const HamiltonianSystem& sys, const PhaseState& s, const PhaseState& d, double dt)
    {
        if (!sys.quadratic_energy())
            throw NumericalFailure("analytic relaxation needs a quadratic energy; use the bisection solver for " + std::string(sys.name()));
        const double e = sys.energy_product(s, d);
        const double tt = sys.energy_product(d, d);
        if (tt == 0.0)
        {
            if (e == 0.0)
                return 1.0;
            throw NumericalFailure("relaxation quadratic has no nontrivial root (T = 0, E != 0)");
        }
        return -2.0 * e / (dt * tt);
    }

    double rrk_gamma_bisection(const HamiltonianSystem& sys, const PhaseState& s, const PhaseState& d, double dt, const BisectionOptions& opt)
    {
        const double h0 = sys.energy(s);
        auto r = [&](double gamma) { return sys.energy(shifted(s, gamma * dt, d)) - h0; };

        if (r(1.0) == 0.0)
            return 1.0;

        double lo = opt.lo;
        double hi = opt.hi;
        double rlo = r(lo);
        double rhi = r(hi);
        while (rlo * rhi > 0.0 && (lo > opt.min_lo || hi < opt.max_hi))
        {
            lo = std::max(opt.min_lo, 0.5 * lo);
            hi = std::min(opt.max_hi, 2.0 * hi);
            rlo = r(lo);
            rhi = r(hi);
        }
        if (rlo * rhi > 0.0)
        {
            char buf[200];
            std::snprintf(buf, sizeof buf, "relaxation residual has no sign change on [%g, %g]: r = %.3e, %.3e", lo, hi, rlo, rhi);
            throw NumericalFailure(buf);
        }
        if (rlo == 0.0)
            return lo;
        if (rhi == 0.0)
            return hi;

        for (int it = 0; it < opt.max_iterations && hi - lo > opt.tol; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            const double rm = r(mid);
            if (rm == 0.0)
                return mid;
            if ((rm < 0.0) == (rlo < 0.0))
            {
                lo = mid;
                rlo = rm;
            }
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    RelaxedStep rrk_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt, GammaMode mode, const BisectionOptions& opt)
    {
        const PhaseState d = rk4_direction(sys, s, t, dt);
        const double gamma = mode == GammaMode::Analytic ? rrk_gamma_analytic(sys, s, d, dt) : rrk_gamma_bisection(sys, s, d, dt, opt);
        PhaseState out = shifted(s, gamma * dt, d);
        sys.apply_boundary(out);
        return {std::move(out), gamma};
    }

    SplittingCoefficients forest_ruth_coefficients()
    {
        const double x = (std::cbrt(2.0) + 1.0 / std::cbrt(2.0) - 1.0) / 6.0;
        return {{x + 0.5, -x, -x, x + 0.5}, {2 * x + 1, -4 * x - 1, 2 * x + 1}};
    }

    SplittingCoefficients pefrl_coefficients()
    {
        constexpr double xi = 0.1644986515575760;
        constexpr double lambda = -0.2094333910398989e-01;
        constexpr double chi = 0.1235692651138917e+01;
        return {{xi, chi, 1.0 - 2.0 * (chi + xi), chi, xi},
                {(1.0 - 2.0 * lambda) / 2.0, lambda, lambda, (1.0 - 2.0 * lambda) / 2.0}};
    }

    SplittingCoefficients composition4_coefficients()
    {
        const double r = std::sqrt(19.0);
        const std::array<double, 5> beta{(14.0 - r) / 108.0, (-23.0 - 20.0 * r) / 270.0, 1.0 / 5.0, (-2.0 + 10.0 * r) / 135.0, (146.0 + 5.0 * r) / 540.0};
        // alpha_k = beta_{6-k}, alpha_0 = 0
        std::array<double, 6> alpha{};
        for (int k = 1; k <= 5; ++k)
            alpha[static_cast<std::size_t>(k)] = beta[static_cast<std::size_t>(5 - k)];

        SplittingCoefficients c;
        for (std::size_t k = 0; k < 5; ++k)
        {
            c.drift.push_back(beta[k] + alpha[k]);
            c.kick.push_back(beta[k] + alpha[k + 1]);
        }
        c.drift.push_back(alpha[5]);
        return c;
    }

    PhaseState forest_ruth_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt)
    {
        static const SplittingCoefficients c = forest_ruth_coefficients();
        return splitting_step(sys, s, t, dt, c);
    }

    PhaseState pefrl_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt)
    {
        static const SplittingCoefficients c = pefrl_coefficients();
        return splitting_step(sys, s, t, dt, c);
    }

    PhaseState composition4_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt)
    {
        static const SplittingCoefficients c = composition4_coefficients();
        return splitting_step(sys, s, t, dt, c);
    }

    PhaseState leapfrog_step(const HamiltonianSystem& sys, const PhaseState& staggered, double t, double dt)
    {
        PhaseState x = staggered;
        std::vector<double> rate;
        sys.position_rate(x, t, rate);
        axpy(dt, rate, x.u);
        sys.apply_boundary(x);
        sys.velocity_rate(x, t + 0.5 * dt, rate);
        axpy(dt, rate, x.v);
        sys.apply_boundary(x);
        return x;
    }

    PhaseState leapfrog_stagger(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt)
    {
        PhaseState x = s;
        std::vector<double> rate;
        sys.position_rate(x, t, rate);
        axpy(-0.5 * dt, rate, x.u);
        sys.apply_boundary(x);
        return x;
    }

    PhaseState leapfrog_synchronize(const HamiltonianSystem& sys, const PhaseState& staggered, double t, double dt)
    {
        PhaseState x = staggered;
        std::vector<double> rate;
        sys.position_rate(x, t, rate);
        axpy(0.5 * dt, rate, x.u);
        sys.apply_boundary(x);
        return x;
    }

    PhaseState step(const HamiltonianSystem& sys, Scheme scheme, const PhaseState& s, double t, double dt, const BisectionOptions& opt)
    {
        switch (scheme)
        {
        case Scheme::RK4: return rk4_step(sys, s, t, dt);
        case Scheme::RRK: return rrk_step(sys, s, t, dt, GammaMode::Analytic, opt).state;
        case Scheme::RRKRoot: return rrk_step(sys, s, t, dt, GammaMode::Bisection, opt).state;
        case Scheme::ForestRuth: return forest_ruth_step(sys, s, t, dt);
        case Scheme::PEFRL: return pefrl_step(sys, s, t, dt);
        case Scheme::Composition4: return composition4_step(sys, s, t, dt);
        case Scheme::Leapfrog:
        {
            const PhaseState x = leapfrog_step(sys, leapfrog_stagger(sys, s, t, dt), t, dt);
            return leapfrog_synchronize(sys, x, t + dt, dt);
        }
        }
        throw DomainError("unknown scheme");
    }

    RunRecord integrate(const HamiltonianSystem& sys, Scheme scheme, const PhaseState& s0, double t_end, double dt, const IntegrateOptions& opt)
    {
        if (!(dt > 0.0) || !(t_end > 0.0))
            throw DomainError("integrate needs dt > 0 and t_end > 0");
        if (opt.record_every < 1)
            throw DomainError("record_every must be at least 1");
        sys.check_state(s0);

        const auto start = std::chrono::steady_clock::now();
        const CountingSystem counted(sys);
        const bool relaxed = scheme == Scheme::RRK || scheme == Scheme::RRKRoot;
        const bool staggered = scheme == Scheme::Leapfrog;

        RunRecord rec;
        rec.scheme = scheme;
        rec.times.push_back(0.0);
        rec.energies.push_back(sys.energy(s0));
        if (relaxed)
            rec.gammas.push_back(1.0);

        PhaseState s = s0;
        double t = 0.0;
        double gamma = 1.0;
        // Leapfrog carries (u^{n-1/2}, v^n); lf_dt is the step it was staggered with.
        double lf_dt = dt;
        if (staggered)
            s = leapfrog_stagger(counted, s, t, lf_dt);

        // Steps whose nominal end is within this of t_end count as landing on it.
        const double eps = 1e-12 * std::max(1.0, t_end);
        long n = 0;
        while (t_end - t > eps)
        {
            const double h = std::min(dt, t_end - t);
            const bool last = t + h >= t_end - eps;
            try
            {
                switch (scheme)
                {
                case Scheme::RRK:
                case Scheme::RRKRoot:
                {
                    RelaxedStep r = rrk_step(counted, s, t, h, scheme == Scheme::RRK ? GammaMode::Analytic : GammaMode::Bisection, opt.bisection);
                    s = std::move(r.state);
                    gamma = r.gamma;
                    break;
                }
                case Scheme::Leapfrog:
                    if (h != lf_dt)
                    {
                        s = leapfrog_stagger(counted, leapfrog_synchronize(counted, s, t, lf_dt), t, h);
                        lf_dt = h;
                    }
                    s = leapfrog_step(counted, s, t, h);
                    break;
                default:
                    s = step(counted, scheme, s, t, h, opt.bisection);
                }
                for (double x : s.u)
                    if (!std::isfinite(x))
                        throw NumericalFailure("non-finite state");
                for (double x : s.v)
                    if (!std::isfinite(x))
                        throw NumericalFailure("non-finite state");
            }
            catch (const NumericalFailure& e)
            {
                throw NumericalFailure(std::string(scheme_name(scheme)) + " step " + std::to_string(n) + " (t = " + std::to_string(t) + "): " + e.what(), n);
            }

            ++n;
            if (relaxed && opt.relaxed_time)
                t += gamma * h;
            else
                t = last ? t_end : t + h;

            if (last || n % opt.record_every == 0)
            {
                const PhaseState sync = staggered ? leapfrog_synchronize(counted, s, t, lf_dt) : PhaseState{};
                const PhaseState& now = staggered ? sync : s;
                double e;
                try
                {
                    e = sys.energy(now);
                }
                catch (const NumericalFailure& ex)
                {
                    throw NumericalFailure(std::string(scheme_name(scheme)) + " step " + std::to_string(n - 1) + ": " + ex.what(), n - 1);
                }
                rec.times.push_back(t);
                rec.energies.push_back(e);
                if (relaxed)
                    rec.gammas.push_back(gamma);
            }
            if (last)
                break;
        }

        rec.final_state = staggered ? leapfrog_synchronize(sys, s, t, lf_dt) : std::move(s);
        rec.final_time = t;
        rec.steps = n;
        rec.rhs_evaluations = counted.count();
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return rec;
    }
} // namespace mimetic
