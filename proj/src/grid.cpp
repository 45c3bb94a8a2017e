#include "mimetic/grid.hpp"

#include <cmath>
#include <string>

namespace mimetic
{
    StaggeredGrid1D::StaggeredGrid1D(double a, double b, int n_cells)
        : a_(a), b_(b), n_(n_cells), h_(0.0)
    {
        if (n_cells < 1)
            throw DomainError("grid needs at least one cell, got " + std::to_string(n_cells));
        if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
            throw DomainError("grid requires finite a < b");
        h_ = (b - a) / n_cells;
    }

    double StaggeredGrid1D::node(std::size_t i) const
    {
        if (i == static_cast<std::size_t>(n_))
            return b_;
        return a_ + static_cast<double>(i) * h_;
    }

    double StaggeredGrid1D::center(std::size_t i) const
    {
        return a_ + (static_cast<double>(i) + 0.5) * h_;
    }

    double StaggeredGrid1D::extended(std::size_t j) const
    {
        if (j == 0)
            return a_;
        if (j == static_cast<std::size_t>(n_) + 1)
            return b_;
        return center(j - 1);
    }

    std::vector<double> StaggeredGrid1D::nodes() const
    {
        std::vector<double> x(node_count());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = node(i);
        return x;
    }

    std::vector<double> StaggeredGrid1D::centers() const
    {
        std::vector<double> x(center_count());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = center(i);
        return x;
    }

    std::vector<double> StaggeredGrid1D::extended_centers() const
    {
        std::vector<double> x(extended_count());
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = extended(j);
        return x;
    }

    StaggeredGrid1D build_grid(double a, double b, int n_cells)
    {
        return StaggeredGrid1D(a, b, n_cells);
    }

    std::string_view layout_name(Layout layout) noexcept
    {
        switch (layout)
        {
        case Layout::Node:
            return "node";
        case Layout::Center:
            return "center";
        case Layout::Extended:
            return "extended-center";
        }
        return "unknown";
    }

    std::size_t layout_size(const StaggeredGrid1D& grid, Layout layout) noexcept
    {
        switch (layout)
        {
        case Layout::Node:
            return grid.node_count();
        case Layout::Center:
            return grid.center_count();
        case Layout::Extended:
            return grid.extended_count();
        }
        return 0;
    }

    std::vector<double> layout_coordinates(const StaggeredGrid1D& grid, Layout layout)
    {
        switch (layout)
        {
        case Layout::Node:
            return grid.nodes();
        case Layout::Center:
            return grid.centers();
        case Layout::Extended:
            return grid.extended_centers();
        }
        return {};
    }

    ExtendedField extend_center_field(const StaggeredGrid1D& grid, const CenterField& f, double left, double right)
    {
        if (!f.matches(grid))
            throw DomainError("center field does not match grid");
        std::vector<double> out;
        out.reserve(grid.extended_count());
        out.push_back(left);
        out.insert(out.end(), f.vector().begin(), f.vector().end());
        out.push_back(right);
        return ExtendedField(grid, std::move(out));
    }

    CenterField interior_of(const StaggeredGrid1D& grid, const ExtendedField& f)
    {
        if (!f.matches(grid))
            throw DomainError("extended field does not match grid");
        return CenterField(grid, std::vector<double>(f.vector().begin() + 1, f.vector().end() - 1));
    }
} // namespace mimetic
