#ifndef MIMETIC_OPERATORS_HPP
#define MIMETIC_OPERATORS_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimetic/grid.hpp"
#include "mimetic/sparse.hpp"

namespace mimetic
{
    /// A sparse linear map from fields of layout From to fields of layout To on
    /// one grid. Shapes are checked when the operator is created; field lengths
    /// are checked when it is applied.
    template <Layout From, Layout To>
    class GridOperator
    {
    public:
        GridOperator() = default;
        GridOperator(const StaggeredGrid1D& grid, SparseMatrix m)
            : m_(std::move(m))
        {
            if (m_.rows() != layout_size(grid, To) || m_.cols() != layout_size(grid, From))
                throw DomainError("operator shape does not match " + std::string(layout_name(From)) + " -> " + std::string(layout_name(To)) + " layout");
        }

        const SparseMatrix& matrix() const noexcept { return m_; }

        Field<To> operator()(const Field<From>& x) const
        {
            if (x.size() != m_.cols())
                throw DomainError("field length does not match operator");
            std::vector<double> y(m_.rows());
            m_.apply(x.values(), y);
            return Field<To>(std::move(y), typename Field<To>::unchecked_tag{});
        }

        void apply(std::span<const double> x, std::span<double> y) const { m_.apply(x, y); }

    private:
        SparseMatrix m_;
    };

    /// Supported mimetic orders.
    bool valid_order(int order) noexcept;

    /// Staggered gradient (N+1)x(N+2): extended centers -> nodes. Interior rows
    /// are the centered order-k stencil; rows whose centered stencil would leave
    /// the grid use the nearest k+1 extended-center points, with coefficients
    /// that differentiate x^0..x^k exactly at the node.
    SparseMatrix build_gradient(int order, const StaggeredGrid1D& grid);

    /// Staggered divergence N x (N+1): nodes -> centers, built the same way.
    SparseMatrix build_divergence(int order, const StaggeredGrid1D& grid);

    /// D with a zero row prepended and appended: (N+2) x (N+1).
    SparseMatrix extend_divergence(const SparseMatrix& divergence);

    /// Diagonal quadrature weights for extended centers (q) and nodes (p).
    ///
    /// Weights are h away from the boundaries. Near each boundary the weights
    /// are solved from the two discrete conservation laws
    ///     1^T Q D_hat = e_N - e_0,     1^T P G = e_{N+1} - e_0,
    /// taking the solution closest to h. For k = 4 the minimal-width closures
    /// make the correction a geometrically decaying tail (ratio about 1/26), so
    /// band weights are solved per side; beyond the band every weight is h.
    /// The extended-center weights at x = a and x = b are not constrained by
    /// either law and are set to h.
    struct Quadratures
    {
        std::vector<double> q;   // N+2
        std::vector<double> p;   // N+1
        int band = 0;            // weights solved per side
    };

    Quadratures build_quadratures(int order, const StaggeredGrid1D& grid, const SparseMatrix& divergence_ext, const SparseMatrix& gradient);

    /// B_hat = Q D_hat + G^T P, (N+2) x (N+1).
    SparseMatrix boundary_operator(std::span<const double> q, const SparseMatrix& divergence_ext, const SparseMatrix& gradient, std::span<const double> p);

    /// L = D_hat G, (N+2) x (N+2); first and last rows are zero.
    SparseMatrix laplacian(const SparseMatrix& divergence_ext, const SparseMatrix& gradient);

    struct Interpolants
    {
        SparseMatrix nodes_to_extended;   // I_D, (N+2) x (N+1)
        SparseMatrix extended_to_nodes;   // I_G, (N+1) x (N+2)
    };

    /// Local k-point Lagrange interpolation between nodes and extended centers.
    /// Rows at x = a and x = b copy the coincident boundary value.
    Interpolants build_interpolants(int order, const StaggeredGrid1D& grid);

    /// Every operator of one order on one grid.
    struct OperatorSet
    {
        OperatorSet(int order, const StaggeredGrid1D& grid);

        int order;
        StaggeredGrid1D grid;

        GridOperator<Layout::Node, Layout::Center> divergence;          // D
        GridOperator<Layout::Extended, Layout::Node> gradient;          // G
        GridOperator<Layout::Node, Layout::Extended> divergence_ext;    // D_hat
        std::vector<double> q;                                          // Q diagonal
        std::vector<double> p;                                          // P diagonal
        GridOperator<Layout::Node, Layout::Extended> boundary;          // B_hat
        GridOperator<Layout::Node, Layout::Extended> interp_d;          // I_D
        GridOperator<Layout::Extended, Layout::Node> interp_g;          // I_G
        GridOperator<Layout::Extended, Layout::Extended> laplacian;     // L

        // Rows of B_hat in [first_interior_row, N+1-first_interior_row] are
        // outside the boundary closures and vanish.
        std::size_t first_interior_row = 0;
        int weight_band = 0;
    };

    /// Builds (or returns the cached) operator set for (order, grid).
    std::shared_ptr<const OperatorSet> operator_set(int order, const StaggeredGrid1D& grid);

    double inner_q(const OperatorSet& ops, const ExtendedField& f, const ExtendedField& g);
    double inner_p(const OperatorSet& ops, const NodeField& u, const NodeField& v);
    double inner_q(std::span<const double> q, std::span<const double> f, std::span<const double> g);
    double inner_p(std::span<const double> p, std::span<const double> u, std::span<const double> v);

    /// |<D_hat v, f>_Q + <v, G f>_P - (v_N f_N - v_0 f_0)|
    double mimetic_identity_residual(const OperatorSet& ops, const NodeField& v, const ExtendedField& f);

    /// Matrix Market coordinate format, 1-based indices, 17 significant digits.
    void write_matrix_market(std::ostream& os, const SparseMatrix& m, std::string_view comment = {});

    /// Writes D, G, D_hat, Q, P, B_hat, I_D, I_G and L as <name>.mtx into dir.
    std::vector<std::filesystem::path> dump_operator_set(const OperatorSet& ops, const std::filesystem::path& dir);
} // namespace mimetic

#endif
