#ifndef MIMETIC_HAMILTONIAN_HPP
#define MIMETIC_HAMILTONIAN_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mimetic/operators.hpp"

namespace mimetic
{
    /// Phase-space point (u, v). The layouts depend on the system: the wave
    /// equation keeps both on extended centers, shallow water keeps the
    /// elevation (u slot) on extended centers and the velocity (v slot) on nodes.
    struct PhaseState
    {
        std::vector<double> u;
        std::vector<double> v;

        friend bool operator==(const PhaseState&, const PhaseState&) = default;
    };

    /// Semi-discrete Hamiltonian system u' = position_rate, v' = velocity_rate.
    ///
    /// Splitting schemes drift u with position_rate and kick v with
    /// velocity_rate, each evaluated at the current full state. For separable
    /// systems position_rate is just v and velocity_rate depends on u only.
    class HamiltonianSystem
    {
    public:
        virtual ~HamiltonianSystem() = default;

        virtual std::string_view name() const noexcept = 0;
        virtual std::size_t u_size() const noexcept = 0;
        virtual std::size_t v_size() const noexcept = 0;
        virtual bool separable() const noexcept { return true; }

        virtual void position_rate(const PhaseState& s, double t, std::vector<double>& du) const = 0;
        virtual void velocity_rate(const PhaseState& s, double t, std::vector<double>& dv) const = 0;

        /// Both rates at once.
        void rhs(const PhaseState& s, double t, PhaseState& ds) const;
        PhaseState rhs(const PhaseState& s, double t) const;

        virtual double energy(const PhaseState& s) const = 0;

        /// True when energy(s) = energy_product(s, s) / 2 for a symmetric
        /// bilinear form.
        virtual bool quadratic_energy() const noexcept { return false; }
        virtual double energy_product(const PhaseState& a, const PhaseState& b) const;

        /// Overwrites boundary entries with the prescribed values.
        virtual void apply_boundary(PhaseState&) const {}

        /// Throws DomainError unless the state has this system's layout.
        void check_state(const PhaseState& s) const;
    };

    /// u_t = v, v_t = L u + F with homogeneous Dirichlet values. Both fields on
    /// extended centers. H = (<v, v>_Q + <G u, G u>_P) / 2.
    class WaveSystem final : public HamiltonianSystem
    {
    public:
        explicit WaveSystem(std::shared_ptr<const OperatorSet> ops, std::vector<double> source = {});

        std::string_view name() const noexcept override { return "wave"; }
        std::size_t u_size() const noexcept override { return ops_->grid.extended_count(); }
        std::size_t v_size() const noexcept override { return ops_->grid.extended_count(); }

        void position_rate(const PhaseState& s, double t, std::vector<double>& du) const override;
        void velocity_rate(const PhaseState& s, double t, std::vector<double>& dv) const override;
        double energy(const PhaseState& s) const override;
        bool quadratic_energy() const noexcept override { return true; }
        double energy_product(const PhaseState& a, const PhaseState& b) const override;
        void apply_boundary(PhaseState& s) const override;

        const OperatorSet& operators() const noexcept { return *ops_; }
        const std::vector<double>& source() const noexcept { return source_; }

    private:
        std::shared_ptr<const OperatorSet> ops_;
        std::vector<double> source_;
    };

    /// Nonlinear shallow water with flat bottom:
    ///   e_t = -D_hat((d0 + I_G e) u),   u_t = -g G e - u (G I_D u),
    /// e on extended centers (u slot of PhaseState), velocity on nodes (v slot).
    /// Boundary entries of both rates are held at zero.
    class ShallowWaterSystem final : public HamiltonianSystem
    {
    public:
        ShallowWaterSystem(std::shared_ptr<const OperatorSet> ops, double d0, double g);

        std::string_view name() const noexcept override { return "shallow_water"; }
        std::size_t u_size() const noexcept override { return ops_->grid.extended_count(); }
        std::size_t v_size() const noexcept override { return ops_->grid.node_count(); }
        bool separable() const noexcept override { return false; }

        void position_rate(const PhaseState& s, double t, std::vector<double>& de) const override;
        void velocity_rate(const PhaseState& s, double t, std::vector<double>& du) const override;
        /// (g <e, e>_Q + <(d0 + I_G e) u, u>_P) / 2
        double energy(const PhaseState& s) const override;
        void apply_boundary(PhaseState& s) const override;

        double d0() const noexcept { return d0_; }
        double g() const noexcept { return g_; }
        const OperatorSet& operators() const noexcept { return *ops_; }

        /// d0 + I_G e at nodes. Throws NumericalFailure if any entry is <= 0.
        std::vector<double> depth(const std::vector<double>& e) const;

    private:
        std::shared_ptr<const OperatorSet> ops_;
        double d0_;
        double g_;
    };

    /// p' = q, q' = -p with p in the u slot and q in the v slot; H = (p^2 + q^2)/2.
    class HarmonicOscillator final : public HamiltonianSystem
    {
    public:
        std::string_view name() const noexcept override { return "harmonic_oscillator"; }
        std::size_t u_size() const noexcept override { return 1; }
        std::size_t v_size() const noexcept override { return 1; }

        void position_rate(const PhaseState& s, double t, std::vector<double>& du) const override;
        void velocity_rate(const PhaseState& s, double t, std::vector<double>& dv) const override;
        double energy(const PhaseState& s) const override;
        bool quadratic_energy() const noexcept override { return true; }
        double energy_product(const PhaseState& a, const PhaseState& b) const override;

        /// Rotation of s by angle t.
        static PhaseState exact(const PhaseState& s0, double t);
    };

    std::unique_ptr<HamiltonianSystem> harmonic_oscillator();

    // Free-function forms.
    PhaseState wave_rhs(const OperatorSet& ops, const PhaseState& s, const std::vector<double>& source = {});
    double wave_hamiltonian(const OperatorSet& ops, const PhaseState& s);
    PhaseState shallow_water_rhs(const OperatorSet& ops, const PhaseState& s, double d0, double g);
    double shallow_water_hamiltonian(const OperatorSet& ops, const PhaseState& s, double d0, double g);

    /// sin(pi x) cos(pi t)
    double wave_standing_exact(double x, double t);
    /// d/dt of wave_standing_exact
    double wave_standing_velocity(double x, double t);

    /// u = amplitude exp(-width (x - center)^2) on extended centers, v = 0,
    /// boundary entries zeroed.
    PhaseState gaussian_ic(const StaggeredGrid1D& grid, double center = 0.5, double width = 100.0, double amplitude = 1.0);

    /// e = offset + amplitude exp(-width (x - center)^2) on extended centers,
    /// velocity zero.
    PhaseState shallow_water_ic(const StaggeredGrid1D& grid, double center, double width, double amplitude, double offset);

    /// cfl h / wave_speed
    double cfl_dt(const StaggeredGrid1D& grid, double cfl, double wave_speed);
} // namespace mimetic

#endif
