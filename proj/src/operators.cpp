#include "mimetic/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

#include <Eigen/Dense>

namespace mimetic
{
    namespace
    {
        // Weights w with sum_m w_m (x_m - x0)^p = d^p/dx^p... restricted to the
        // first derivative: exact for monomials of degree 0..n-1.
        // Coordinates are scaled by h for conditioning.
        std::vector<double> derivative_weights(std::span<const double> pts, double x0, double h)
        {
            const auto n = static_cast<Eigen::Index>(pts.size());
            Eigen::MatrixXd v(n, n);
            for (Eigen::Index m = 0; m < n; ++m)
            {
                const double s = (pts[static_cast<std::size_t>(m)] - x0) / h;
                double pw = 1.0;
                for (Eigen::Index r = 0; r < n; ++r)
                {
                    v(r, m) = pw;
                    pw *= s;
                }
            }
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
            rhs(1) = 1.0;

            Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
            if (!lu.isInvertible())
                throw ConstructionError("singular stencil Vandermonde system");
            Eigen::VectorXd w = lu.solve(rhs);

            std::vector<double> out(pts.size());
            for (Eigen::Index m = 0; m < n; ++m)
                out[static_cast<std::size_t>(m)] = w(m) / h;
            return out;
        }

        // Lagrange interpolation weights at x0.
        std::vector<double> lagrange_weights(std::span<const double> pts, double x0)
        {
            std::vector<double> w(pts.size(), 1.0);
            for (std::size_t m = 0; m < pts.size(); ++m)
                for (std::size_t l = 0; l < pts.size(); ++l)
                    if (l != m)
                        w[m] *= (x0 - pts[l]) / (pts[m] - pts[l]);
            return w;
        }

        void require_order(int order, const StaggeredGrid1D& grid)
        {
            if (!valid_order(order))
                throw DomainError("mimetic order must be 2 or 4, got " + std::to_string(order));
            if (grid.cells() < 2 * order)
                throw DomainError("order " + std::to_string(order) + " operators need at least " + std::to_string(2 * order) + " cells, got " + std::to_string(grid.cells()));
        }

        // One row per target point: a derivative (or interpolation) stencil over
        // `width` consecutive source points, centered when possible and shifted
        // inward near the ends. Source points are src[lo..hi].
        template <typename WeightFn>
        SparseMatrix assemble(const std::vector<double>& targets, const std::vector<double>& src, std::size_t width,
                              std::size_t lo, std::size_t hi, std::ptrdiff_t center_offset, WeightFn&& weights)
        {
            std::vector<Triplet> t;
            t.reserve(targets.size() * (width + 1));
            for (std::size_t r = 0; r < targets.size(); ++r)
            {
                // first index of the centered stencil for row r
                std::ptrdiff_t first = static_cast<std::ptrdiff_t>(r) + center_offset;
                first = std::clamp<std::ptrdiff_t>(first, static_cast<std::ptrdiff_t>(lo), static_cast<std::ptrdiff_t>(hi + 1 - width));
                const auto f = static_cast<std::size_t>(first);
                std::span<const double> pts(src.data() + f, width);
                const std::vector<double> w = weights(pts, targets[r]);
                for (std::size_t m = 0; m < width; ++m)
                    if (w[m] != 0.0)
                        t.push_back({r, f + m, w[m]});
            }
            return SparseMatrix(targets.size(), src.size(), std::move(t));
        }

        // Solves sum_j w_j A(j, i) = target_i for the free w_j closest to h,
        // all other weights fixed at h. Verifies every column afterwards.
        std::vector<double> solve_weights(const SparseMatrix& a, std::span<const double> target, const std::vector<std::size_t>& free, double h, std::string_view what)
        {
            std::vector<double> w(a.rows(), h);

            // r_i = target_i - sum_j w_j A(j, i) with the initial weights
            std::vector<double> resid(target.begin(), target.end());
            const SparseMatrix at = a.transpose();
            at.apply_add(-1.0, w, resid);

            // columns touched by free rows
            std::vector<std::size_t> cols;
            for (std::size_t j : free)
                for (std::size_t c : a.row_columns(j))
                    cols.push_back(c);
            std::sort(cols.begin(), cols.end());
            cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cols.size()), static_cast<Eigen::Index>(free.size()));
            Eigen::VectorXd rhs(static_cast<Eigen::Index>(cols.size()));
            for (std::size_t ci = 0; ci < cols.size(); ++ci)
            {
                rhs(static_cast<Eigen::Index>(ci)) = resid[cols[ci]];
                for (std::size_t fj = 0; fj < free.size(); ++fj)
                    m(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(fj)) = a.at(free[fj], cols[ci]);
            }

            // The equations are consistent, so the minimum-norm least-squares
            // solution is the exact solution with least deviation from h.
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
            const Eigen::VectorXd dw = cod.solve(rhs);
            for (std::size_t fj = 0; fj < free.size(); ++fj)
                w[free[fj]] += dw(static_cast<Eigen::Index>(fj));

            std::vector<double> check(target.begin(), target.end());
            at.apply_add(-1.0, w, check);
            double err = 0.0;
            for (double c : check)
                err = std::max(err, std::abs(c));
            if (err > 1e-12)
            {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%.*s conservation law violated by %.3e after weight solve", static_cast<int>(what.size()), what.data(), err);
                throw ConstructionError(buf);
            }
            return w;
        }

        // Weights solved per side. k = 2 closes in two; k = 4 carries a tail
        // decaying like (13 - sqrt(168))^j, which is below 1e-19 after 14.
        int band_for_order(int order) noexcept { return order == 2 ? 2 : 14; }
    } // namespace

    bool valid_order(int order) noexcept { return order == 2 || order == 4; }

    SparseMatrix build_gradient(int order, const StaggeredGrid1D& grid)
    {
        require_order(order, grid);
        const std::vector<double> nodes = grid.nodes();
        const std::vector<double> ext = grid.extended_centers();
        const double h = grid.h();
        const auto half = static_cast<std::ptrdiff_t>(order / 2);

        // Interior row i uses ext[i-k/2+1 .. i+k/2], all cell centers. Rows near
        // the boundary fall back to the k+1 points ext[0..k] (or the mirror).
        std::vector<Triplet> t;
        const std::size_t n_ext = ext.size();
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(i) - half + 1;
            const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(i) + half;
            std::size_t f;
            std::size_t width;
            if (first >= 1 && last <= static_cast<std::ptrdiff_t>(n_ext) - 2)
            {
                f = static_cast<std::size_t>(first);
                width = static_cast<std::size_t>(order);
            }
            else
            {
                width = static_cast<std::size_t>(order) + 1;
                f = first < 1 ? 0 : n_ext - width;
            }
            const std::vector<double> w = derivative_weights(std::span<const double>(ext.data() + f, width), nodes[i], h);
            for (std::size_t m = 0; m < width; ++m)
                t.push_back({i, f + m, w[m]});
        }
        return SparseMatrix(nodes.size(), n_ext, std::move(t));
    }

    SparseMatrix build_divergence(int order, const StaggeredGrid1D& grid)
    {
        require_order(order, grid);
        const std::vector<double> nodes = grid.nodes();
        const std::vector<double> centers = grid.centers();
        const double h = grid.h();
        const auto half = static_cast<std::ptrdiff_t>(order / 2);
        const auto n_nodes = static_cast<std::ptrdiff_t>(nodes.size());

        std::vector<Triplet> t;
        for (std::size_t c = 0; c < centers.size(); ++c)
        {
            const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(c) - half + 1;
            const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(c) + half;
            std::size_t f;
            std::size_t width;
            if (first >= 0 && last <= n_nodes - 1)
            {
                f = static_cast<std::size_t>(first);
                width = static_cast<std::size_t>(order);
            }
            else
            {
                width = static_cast<std::size_t>(order) + 1;
                f = first < 0 ? 0 : nodes.size() - width;
            }
            const std::vector<double> w = derivative_weights(std::span<const double>(nodes.data() + f, width), centers[c], h);
            for (std::size_t m = 0; m < width; ++m)
                t.push_back({c, f + m, w[m]});
        }
        return SparseMatrix(centers.size(), nodes.size(), std::move(t));
    }

    SparseMatrix extend_divergence(const SparseMatrix& divergence)
    {
        std::vector<Triplet> t = divergence.triplets();
        for (Triplet& e : t)
            ++e.row;
        return SparseMatrix(divergence.rows() + 2, divergence.cols(), std::move(t));
    }

    Quadratures build_quadratures(int order, const StaggeredGrid1D& grid, const SparseMatrix& divergence_ext, const SparseMatrix& gradient)
    {
        require_order(order, grid);
        const std::size_t n = static_cast<std::size_t>(grid.cells());
        if (divergence_ext.rows() != n + 2 || divergence_ext.cols() != n + 1 || gradient.rows() != n + 1 || gradient.cols() != n + 2)
            throw DomainError("operators do not match the grid");

        const double h = grid.h();
        std::size_t band = static_cast<std::size_t>(band_for_order(order));
        // Bands from both sides would meet: solve every weight at once.
        const bool full = n < 2 * band + static_cast<std::size_t>(order) + 2;
        if (full)
            band = (n + 2) / 2;

        // q: rows 1..N of D_hat carry the conservation law; q_0, q_{N+1} are free.
        std::vector<std::size_t> free_q;
        for (std::size_t j = 1; j <= n; ++j)
            if (full || j <= band || j >= n + 1 - band)
                free_q.push_back(j);
        std::vector<double> target_q(n + 1, 0.0);
        target_q.front() = -1.0;
        target_q.back() = 1.0;

        std::vector<std::size_t> free_p;
        for (std::size_t i = 0; i <= n; ++i)
            if (full || i < band || i > n - band)
                free_p.push_back(i);
        std::vector<double> target_p(n + 2, 0.0);
        target_p.front() = -1.0;
        target_p.back() = 1.0;

        Quadratures out;
        out.q = solve_weights(divergence_ext, target_q, free_q, h, "divergence");
        out.p = solve_weights(gradient, target_p, free_p, h, "gradient");
        out.q.front() = h;
        out.q.back() = h;
        out.band = static_cast<int>(band);

        const auto bad_q = std::find_if(out.q.begin(), out.q.end(), [](double w) { return !(w > 0.0); });
        const auto bad_p = std::find_if(out.p.begin(), out.p.end(), [](double w) { return !(w > 0.0); });
        if (bad_q != out.q.end() || bad_p != out.p.end())
            throw ConstructionError("non-positive quadrature weight for order " + std::to_string(order) + ", N = " + std::to_string(n));
        return out;
    }

    SparseMatrix boundary_operator(std::span<const double> q, const SparseMatrix& divergence_ext, const SparseMatrix& gradient, std::span<const double> p)
    {
        if (q.size() != divergence_ext.rows() || p.size() != gradient.rows() || gradient.cols() != divergence_ext.rows() || gradient.rows() != divergence_ext.cols())
            throw DomainError("shape mismatch assembling the boundary operator");
        return divergence_ext.scale_rows(q).add(gradient.transpose().scale_cols(p));
    }

    SparseMatrix laplacian(const SparseMatrix& divergence_ext, const SparseMatrix& gradient)
    {
        return divergence_ext.multiply(gradient);
    }

    Interpolants build_interpolants(int order, const StaggeredGrid1D& grid)
    {
        require_order(order, grid);
        const std::vector<double> nodes = grid.nodes();
        const std::vector<double> ext = grid.extended_centers();
        const auto width = static_cast<std::size_t>(order);
        const auto half = static_cast<std::ptrdiff_t>(order / 2);
        const std::size_t n = static_cast<std::size_t>(grid.cells());

        auto lagrange = [](std::span<const double> pts, double x0) { return lagrange_weights(pts, x0); };

        // I_D: extended center j sits between nodes j-1 and j; stencil starts
        // at node j - k/2 and is shifted to stay inside 0..N.
        SparseMatrix id = assemble(ext, nodes, width, 0, n, -half, lagrange);
        // I_G: node i sits between ext[i] and ext[i+1]; stencil starts at
        // ext[i - k/2 + 1].
        SparseMatrix ig = assemble(nodes, ext, width, 0, n + 1, -half + 1, lagrange);

        // Boundary rows copy the coincident value exactly.
        auto pin_ends = [](const SparseMatrix& m, std::size_t first_col, std::size_t last_col) {
            std::vector<Triplet> t;
            for (const Triplet& e : m.triplets())
                if (e.row != 0 && e.row != m.rows() - 1)
                    t.push_back(e);
            t.push_back({0, first_col, 1.0});
            t.push_back({m.rows() - 1, last_col, 1.0});
            return SparseMatrix(m.rows(), m.cols(), std::move(t));
        };
        return {pin_ends(id, 0, n), pin_ends(ig, 0, n + 1)};
    }

    OperatorSet::OperatorSet(int order_, const StaggeredGrid1D& grid_)
        : order(order_), grid(grid_)
    {
        SparseMatrix d = build_divergence(order, grid);
        SparseMatrix g = build_gradient(order, grid);
        SparseMatrix dh = extend_divergence(d);
        Quadratures w = build_quadratures(order, grid, dh, g);
        SparseMatrix bh = boundary_operator(w.q, dh, g, w.p);
        SparseMatrix l = mimetic::laplacian(dh, g);
        Interpolants interp = build_interpolants(order, grid);

        divergence = {grid, std::move(d)};
        gradient = {grid, std::move(g)};
        divergence_ext = {grid, std::move(dh)};
        q = std::move(w.q);
        p = std::move(w.p);
        boundary = {grid, std::move(bh)};
        laplacian = {grid, std::move(l)};
        interp_d = {grid, std::move(interp.nodes_to_extended)};
        interp_g = {grid, std::move(interp.extended_to_nodes)};
        weight_band = w.band;

        // See the derivation in build_quadratures: rows past the weight band
        // and past the boundary stencils are untouched by the closures.
        const std::size_t k = static_cast<std::size_t>(order);
        const std::size_t band = static_cast<std::size_t>(weight_band);
        first_interior_row = std::max({band + k / 2, k + 1, band + 1});
    }

    std::shared_ptr<const OperatorSet> operator_set(int order, const StaggeredGrid1D& grid)
    {
        using Key = std::tuple<int, double, double, int>;
        static std::mutex mutex;
        static std::map<Key, std::shared_ptr<const OperatorSet>> cache;

        const Key key{order, grid.a(), grid.b(), grid.cells()};
        std::lock_guard lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
        auto ops = std::make_shared<const OperatorSet>(order, grid);
        cache.emplace(key, ops);
        return ops;
    }

    double inner_q(std::span<const double> q, std::span<const double> f, std::span<const double> g)
    {
        if (f.size() != q.size() || g.size() != q.size())
            throw DomainError("inner_q: field length does not match the quadrature");
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j)
            s += f[j] * q[j] * g[j];
        return s;
    }

    double inner_p(std::span<const double> p, std::span<const double> u, std::span<const double> v)
    {
        if (u.size() != p.size() || v.size() != p.size())
            throw DomainError("inner_p: field length does not match the quadrature");
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            s += u[i] * p[i] * v[i];
        return s;
    }

    double inner_q(const OperatorSet& ops, const ExtendedField& f, const ExtendedField& g)
    {
        return inner_q(ops.q, f.values(), g.values());
    }

    double inner_p(const OperatorSet& ops, const NodeField& u, const NodeField& v)
    {
        return inner_p(ops.p, u.values(), v.values());
    }

    double mimetic_identity_residual(const OperatorSet& ops, const NodeField& v, const ExtendedField& f)
    {
        if (!v.matches(ops.grid) || !f.matches(ops.grid))
            throw DomainError("identity residual: fields do not match the operator grid");
        const ExtendedField dv = ops.divergence_ext(v);
        const NodeField gf = ops.gradient(f);
        const double boundary = v[v.size() - 1] * f[f.size() - 1] - v[0] * f[0];
        return std::abs(inner_q(ops, dv, f) + inner_p(ops, v, gf) - boundary);
    }

    void write_matrix_market(std::ostream& os, const SparseMatrix& m, std::string_view comment)
    {
        os << "%%MatrixMarket matrix coordinate real general\n";
        if (!comment.empty())
            os << "% " << comment << '\n';
        os << m.rows() << ' ' << m.cols() << ' ' << m.nonzeros() << '\n';
        char buf[64];
        for (const Triplet& e : m.triplets())
        {
            std::snprintf(buf, sizeof buf, "%.17g", e.value);
            os << e.row + 1 << ' ' << e.col + 1 << ' ' << buf << '\n';
        }
    }

    std::vector<std::filesystem::path> dump_operator_set(const OperatorSet& ops, const std::filesystem::path& dir)
    {
        std::filesystem::create_directories(dir);
        const std::string tag = "order " + std::to_string(ops.order) + ", N = " + std::to_string(ops.grid.cells());
        const std::pair<const char*, const SparseMatrix*> mats[] = {
            {"D", &ops.divergence.matrix()},
            {"G", &ops.gradient.matrix()},
            {"D_hat", &ops.divergence_ext.matrix()},
            {"B_hat", &ops.boundary.matrix()},
            {"I_D", &ops.interp_d.matrix()},
            {"I_G", &ops.interp_g.matrix()},
            {"L", &ops.laplacian.matrix()},
        };
        const SparseMatrix q = SparseMatrix::diagonal(ops.q);
        const SparseMatrix p = SparseMatrix::diagonal(ops.p);

        std::vector<std::filesystem::path> written;
        auto emit = [&](const char* name, const SparseMatrix& m) {
            const std::filesystem::path path = dir / (std::string(name) + ".mtx");
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot open " + path.string());
            write_matrix_market(os, m, std::string(name) + ", " + tag);
            written.push_back(path);
        };
        for (const auto& [name, m] : mats)
            emit(name, *m);
        emit("Q", q);
        emit("P", p);
        return written;
    }
} // namespace mimetic
