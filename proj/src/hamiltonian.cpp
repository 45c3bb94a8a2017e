#include "mimetic/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mimetic
{
    void HamiltonianSystem::rhs(const PhaseState& s, double t, PhaseState& ds) const
    {
        position_rate(s, t, ds.u);
        velocity_rate(s, t, ds.v);
    }

    PhaseState HamiltonianSystem::rhs(const PhaseState& s, double t) const
    {
        PhaseState ds;
        rhs(s, t, ds);
        return ds;
    }

    double HamiltonianSystem::energy_product(const PhaseState&, const PhaseState&) const
    {
        throw DomainError(std::string(name()) + " energy is not a quadratic form");
    }

    void HamiltonianSystem::check_state(const PhaseState& s) const
    {
        if (s.u.size() != u_size() || s.v.size() != v_size())
            throw DomainError(std::string(name()) + ": state has lengths (" + std::to_string(s.u.size()) + ", " + std::to_string(s.v.size()) + "), expected (" + std::to_string(u_size()) + ", " + std::to_string(v_size()) + ")");
    }

    // ---- wave ----

    WaveSystem::WaveSystem(std::shared_ptr<const OperatorSet> ops, std::vector<double> source)
        : ops_(std::move(ops)), source_(std::move(source))
    {
        if (!ops_)
            throw DomainError("wave system needs operators");
        if (!source_.empty() && source_.size() != ops_->grid.extended_count())
            throw DomainError("wave source must live on extended centers");
    }

    void WaveSystem::position_rate(const PhaseState& s, double, std::vector<double>& du) const
    {
        check_state(s);
        du = s.v;
        du.front() = 0.0;
        du.back() = 0.0;
    }

    void WaveSystem::velocity_rate(const PhaseState& s, double, std::vector<double>& dv) const
    {
        check_state(s);
        dv.resize(s.u.size());
        ops_->laplacian.apply(s.u, dv);
        if (!source_.empty())
            for (std::size_t j = 0; j < dv.size(); ++j)
                dv[j] += source_[j];
        dv.front() = 0.0;
        dv.back() = 0.0;
    }

    double WaveSystem::energy_product(const PhaseState& a, const PhaseState& b) const
    {
        check_state(a);
        check_state(b);
        const SparseMatrix& g = ops_->gradient.matrix();
        const std::vector<double> ga = g.apply(a.u);
        const std::vector<double> gb = g.apply(b.u);
        return inner_q(ops_->q, a.v, b.v) + inner_p(ops_->p, ga, gb);
    }

    double WaveSystem::energy(const PhaseState& s) const { return 0.5 * energy_product(s, s); }

    void WaveSystem::apply_boundary(PhaseState& s) const
    {
        s.u.front() = s.u.back() = 0.0;
        s.v.front() = s.v.back() = 0.0;
    }

    // ---- shallow water ----

    ShallowWaterSystem::ShallowWaterSystem(std::shared_ptr<const OperatorSet> ops, double d0, double g)
        : ops_(std::move(ops)), d0_(d0), g_(g)
    {
        if (!ops_)
            throw DomainError("shallow water system needs operators");
        if (!(d0 > 0.0) || !(g > 0.0))
            throw DomainError("shallow water needs d0 > 0 and g > 0");
    }

    std::vector<double> ShallowWaterSystem::depth(const std::vector<double>& e) const
    {
        std::vector<double> d = ops_->interp_g.matrix().apply(e);
        for (std::size_t i = 0; i < d.size(); ++i)
        {
            d[i] += d0_;
            if (!(d[i] > 0.0))
                throw NumericalFailure("non-positive total depth " + std::to_string(d[i]) + " at node " + std::to_string(i));
        }
        return d;
    }

    void ShallowWaterSystem::position_rate(const PhaseState& s, double, std::vector<double>& de) const
    {
        check_state(s);
        std::vector<double> flux = depth(s.u);
        for (std::size_t i = 0; i < flux.size(); ++i)
            flux[i] *= s.v[i];
        de.resize(s.u.size());
        ops_->divergence_ext.apply(flux, de);
        for (double& x : de)
            x = -x;
        de.front() = 0.0;
        de.back() = 0.0;
    }

    void ShallowWaterSystem::velocity_rate(const PhaseState& s, double, std::vector<double>& du) const
    {
        check_state(s);
        const SparseMatrix& g = ops_->gradient.matrix();
        const std::vector<double> ue = ops_->interp_d.matrix().apply(s.v);
        const std::vector<double> grad_u = g.apply(ue);
        du.resize(s.v.size());
        g.apply(s.u, du);
        for (std::size_t i = 0; i < du.size(); ++i)
            du[i] = -g_ * du[i] - s.v[i] * grad_u[i];
        du.front() = 0.0;
        du.back() = 0.0;
    }

    double ShallowWaterSystem::energy(const PhaseState& s) const
    {
        check_state(s);
        const std::vector<double> d = depth(s.u);
        double kinetic = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            kinetic += ops_->p[i] * d[i] * s.v[i] * s.v[i];
        return 0.5 * (g_ * inner_q(ops_->q, s.u, s.u) + kinetic);
    }

    void ShallowWaterSystem::apply_boundary(PhaseState& s) const
    {
        s.v.front() = 0.0;
        s.v.back() = 0.0;
    }

    // ---- harmonic oscillator ----

    void HarmonicOscillator::position_rate(const PhaseState& s, double, std::vector<double>& du) const
    {
        check_state(s);
        du.assign(1, s.v[0]);
    }

    void HarmonicOscillator::velocity_rate(const PhaseState& s, double, std::vector<double>& dv) const
    {
        check_state(s);
        dv.assign(1, -s.u[0]);
    }

    double HarmonicOscillator::energy_product(const PhaseState& a, const PhaseState& b) const
    {
        check_state(a);
        check_state(b);
        return a.u[0] * b.u[0] + a.v[0] * b.v[0];
    }

    double HarmonicOscillator::energy(const PhaseState& s) const { return 0.5 * energy_product(s, s); }

    PhaseState HarmonicOscillator::exact(const PhaseState& s0, double t)
    {
        const double c = std::cos(t);
        const double sn = std::sin(t);
        return {{c * s0.u[0] + sn * s0.v[0]}, {-sn * s0.u[0] + c * s0.v[0]}};
    }

    std::unique_ptr<HamiltonianSystem> harmonic_oscillator() { return std::make_unique<HarmonicOscillator>(); }

    // ---- free functions ----

    PhaseState wave_rhs(const OperatorSet& ops, const PhaseState& s, const std::vector<double>& source)
    {
        // Non-owning handle; the system does not outlive this call.
        const WaveSystem sys(std::shared_ptr<const OperatorSet>(&ops, [](const OperatorSet*) {}), source);
        return sys.rhs(s, 0.0);
    }

    double wave_hamiltonian(const OperatorSet& ops, const PhaseState& s)
    {
        const WaveSystem sys(std::shared_ptr<const OperatorSet>(&ops, [](const OperatorSet*) {}));
        return sys.energy(s);
    }

    PhaseState shallow_water_rhs(const OperatorSet& ops, const PhaseState& s, double d0, double g)
    {
        const ShallowWaterSystem sys(std::shared_ptr<const OperatorSet>(&ops, [](const OperatorSet*) {}), d0, g);
        return sys.rhs(s, 0.0);
    }

    double shallow_water_hamiltonian(const OperatorSet& ops, const PhaseState& s, double d0, double g)
    {
        const ShallowWaterSystem sys(std::shared_ptr<const OperatorSet>(&ops, [](const OperatorSet*) {}), d0, g);
        return sys.energy(s);
    }

    double wave_standing_exact(double x, double t)
    {
        return std::sin(std::numbers::pi * x) * std::cos(std::numbers::pi * t);
    }

    double wave_standing_velocity(double x, double t)
    {
        return -std::numbers::pi * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * t);
    }

    PhaseState gaussian_ic(const StaggeredGrid1D& grid, double center, double width, double amplitude)
    {
        PhaseState s;
        s.u = grid.extended_centers();
        for (double& x : s.u)
            x = amplitude * std::exp(-width * (x - center) * (x - center));
        s.u.front() = s.u.back() = 0.0;
        s.v.assign(grid.extended_count(), 0.0);
        return s;
    }

    PhaseState shallow_water_ic(const StaggeredGrid1D& grid, double center, double width, double amplitude, double offset)
    {
        PhaseState s;
        s.u = grid.extended_centers();
        for (double& x : s.u)
            x = offset + amplitude * std::exp(-width * (x - center) * (x - center));
        s.v.assign(grid.node_count(), 0.0);
        return s;
    }

    double cfl_dt(const StaggeredGrid1D& grid, double cfl, double wave_speed)
    {
        if (!(cfl > 0.0) || !(wave_speed > 0.0))
            throw DomainError("cfl and wave speed must be positive");
        return cfl * grid.h() / wave_speed;
    }
} // namespace mimetic
