#ifndef MIMETIC_INTEGRATORS_HPP
#define MIMETIC_INTEGRATORS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mimetic/hamiltonian.hpp"

namespace mimetic
{
    enum class Scheme
    {
        RK4,
        RRK,          // relaxation RK4, analytic gamma
        RRKRoot,      // relaxation RK4, bisection gamma
        ForestRuth,
        PEFRL,
        Leapfrog,
        Composition4
    };

    /// RK4, RRK, RRK-root, FRuth, PEFRL, Leapfrog, COMP4
    std::string_view scheme_name(Scheme s) noexcept;
    /// Accepts the names above, case-insensitively.
    std::optional<Scheme> parse_scheme(std::string_view name);
    const std::vector<Scheme>& all_schemes();

    /// Force (velocity_rate) evaluations per step.
    int evaluations_per_step(Scheme s) noexcept;
    /// Nominal global order.
    int scheme_order(Scheme s) noexcept;
    bool is_symplectic(Scheme s) noexcept;

    struct ButcherTableau
    {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        std::vector<double> c;

        std::size_t stages() const noexcept { return b.size(); }
        static ButcherTableau rk4();
        static ButcherTableau implicit_midpoint();
    };

    /// max_ij |b_i a_ij + b_j a_ji - b_i b_j|
    double symplecticity_residual(const ButcherTableau& t);

    // ---- single steps ----

    /// Classical RK4 update direction d = sum b_i k_i.
    PhaseState rk4_direction(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt);
    PhaseState rk4_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt);

    /// gamma = -2E / (dt T) with E = B(s, d), T = B(d, d) for the energy form B.
    double rrk_gamma_analytic(const HamiltonianSystem& sys, const PhaseState& s, const PhaseState& d, double dt);

    struct BisectionOptions
    {
        double tol = 1e-12;
        int max_iterations = 200;
        double lo = 0.5;
        double hi = 1.5;
        double min_lo = 0.1;
        double max_hi = 2.0;
    };

    /// Root of r(gamma) = H(s + gamma dt d) - H(s) by bisection.
    double rrk_gamma_bisection(const HamiltonianSystem& sys, const PhaseState& s, const PhaseState& d, double dt, const BisectionOptions& opt = {});

    enum class GammaMode
    {
        Analytic,
        Bisection
    };

    struct RelaxedStep
    {
        PhaseState state;
        double gamma;
    };

    RelaxedStep rrk_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt, GammaMode mode, const BisectionOptions& opt = {});

    PhaseState forest_ruth_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt);
    PhaseState pefrl_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt);
    PhaseState composition4_step(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt);

    /// Staggered leapfrog on (u^{n-1/2}, v^n):
    ///   u^{n+1/2} = u^{n-1/2} + dt u'(.),  v^{n+1} = v^n + dt v'(u^{n+1/2}, .)
    PhaseState leapfrog_step(const HamiltonianSystem& sys, const PhaseState& staggered, double t, double dt);
    /// (u^0, v^0) -> (u^{-1/2}, v^0)
    PhaseState leapfrog_stagger(const HamiltonianSystem& sys, const PhaseState& s, double t, double dt);
    /// (u^{n-1/2}, v^n) -> (u^n, v^n)
    PhaseState leapfrog_synchronize(const HamiltonianSystem& sys, const PhaseState& staggered, double t, double dt);

    /// Drift/kick coefficient lists of the splitting schemes. drift has one
    /// more entry than kick.
    struct SplittingCoefficients
    {
        std::vector<double> drift;
        std::vector<double> kick;
    };

    SplittingCoefficients forest_ruth_coefficients();
    SplittingCoefficients pefrl_coefficients();
    SplittingCoefficients composition4_coefficients();

    /// Wraps a system and counts velocity_rate calls.
    class CountingSystem final : public HamiltonianSystem
    {
    public:
        explicit CountingSystem(const HamiltonianSystem& inner) : inner_(inner) {}

        std::string_view name() const noexcept override { return inner_.name(); }
        std::size_t u_size() const noexcept override { return inner_.u_size(); }
        std::size_t v_size() const noexcept override { return inner_.v_size(); }
        bool separable() const noexcept override { return inner_.separable(); }
        void position_rate(const PhaseState& s, double t, std::vector<double>& du) const override { inner_.position_rate(s, t, du); }
        void velocity_rate(const PhaseState& s, double t, std::vector<double>& dv) const override
        {
            ++count_;
            inner_.velocity_rate(s, t, dv);
        }
        double energy(const PhaseState& s) const override { return inner_.energy(s); }
        bool quadratic_energy() const noexcept override { return inner_.quadratic_energy(); }
        double energy_product(const PhaseState& a, const PhaseState& b) const override { return inner_.energy_product(a, b); }
        void apply_boundary(PhaseState& s) const override { inner_.apply_boundary(s); }

        long count() const noexcept { return count_; }

    private:
        const HamiltonianSystem& inner_;
        mutable long count_ = 0;
    };

    // ---- integration loop ----

    struct IntegrateOptions
    {
        int record_every = 1;
        BisectionOptions bisection{};
        /// RRK advances time by gamma dt; set to false to advance by dt.
        bool relaxed_time = true;
    };

    struct RunRecord
    {
        Scheme scheme{};
        std::vector<double> times;
        std::vector<double> energies;
        std::vector<double> gammas;   // RRK only, aligned with times (1 at t = 0)
        PhaseState final_state;
        double final_time = 0.0;
        long steps = 0;
        long rhs_evaluations = 0;
        double wall_seconds = 0.0;
    };

    /// Steps from t = 0 until t_end. The last step is shortened to land on t_end
    /// (RRK lands within the relaxation of that step; final_time is the true time).
    /// Records (t, H) at t = 0, every record_every steps and after the final step.
    /// Step failures are rethrown as NumericalFailure carrying the step index.
    RunRecord integrate(const HamiltonianSystem& sys, Scheme scheme, const PhaseState& s0, double t_end, double dt, const IntegrateOptions& opt = {});

    /// One step of any scheme from a synchronized state (leapfrog staggers and
    /// synchronizes within the call).
    PhaseState step(const HamiltonianSystem& sys, Scheme scheme, const PhaseState& s, double t, double dt, const BisectionOptions& opt = {});
} // namespace mimetic

#endif
