#ifndef MIMETIC_GRID_HPP
#define MIMETIC_GRID_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mimetic/errors.hpp"

namespace mimetic
{
    /// Uniform staggered grid on [a, b] with N cells.
    ///
    /// Three point sets live on it:
    ///   nodes             a + i h,           i = 0..N       (N+1 points)
    ///   centers           a + (i + 1/2) h,   i = 0..N-1     (N points)
    ///   extended centers  [a, centers..., b]                (N+2 points)
    class StaggeredGrid1D
    {
    public:
        StaggeredGrid1D(double a, double b, int n_cells);

        double a() const noexcept { return a_; }
        double b() const noexcept { return b_; }
        int cells() const noexcept { return n_; }
        double h() const noexcept { return h_; }
        double length() const noexcept { return b_ - a_; }

        std::size_t node_count() const noexcept { return static_cast<std::size_t>(n_) + 1; }
        std::size_t center_count() const noexcept { return static_cast<std::size_t>(n_); }
        std::size_t extended_count() const noexcept { return static_cast<std::size_t>(n_) + 2; }

        double node(std::size_t i) const;
        double center(std::size_t i) const;
        double extended(std::size_t j) const;

        std::vector<double> nodes() const;
        std::vector<double> centers() const;
        std::vector<double> extended_centers() const;

        friend bool operator==(const StaggeredGrid1D&, const StaggeredGrid1D&) = default;

    private:
        double a_;
        double b_;
        int n_;
        double h_;
    };

    /// Throws DomainError unless b > a and n_cells >= 1.
    StaggeredGrid1D build_grid(double a, double b, int n_cells);

    enum class Layout
    {
        Node,
        Center,
        Extended
    };

    std::string_view layout_name(Layout layout) noexcept;
    std::size_t layout_size(const StaggeredGrid1D& grid, Layout layout) noexcept;
    std::vector<double> layout_coordinates(const StaggeredGrid1D& grid, Layout layout);

    /// Real values tagged with the point set they live on. The layout is part of
    /// the type, so operators can only be applied to fields of the right kind;
    /// the length is checked against the grid at construction.
    template <Layout L>
    class Field
    {
    public:
        static constexpr Layout layout = L;

        // For producers that already guarantee the length (operator output).
        struct unchecked_tag {};
        Field(std::vector<double> values, unchecked_tag) : values_(std::move(values)) {}

        explicit Field(const StaggeredGrid1D& grid)
            : values_(layout_size(grid, L), 0.0) {}

        Field(const StaggeredGrid1D& grid, std::vector<double> values)
            : values_(std::move(values))
        {
            if (values_.size() != layout_size(grid, L))
                throw DomainError(std::string("field length does not match ") + std::string(layout_name(L)) + " count of the grid");
        }

        std::size_t size() const noexcept { return values_.size(); }
        double operator[](std::size_t i) const { return values_[i]; }
        double& operator[](std::size_t i) { return values_[i]; }

        std::span<const double> values() const noexcept { return values_; }
        std::span<double> values() noexcept { return values_; }
        const std::vector<double>& vector() const noexcept { return values_; }
        std::vector<double>& vector() noexcept { return values_; }

        bool matches(const StaggeredGrid1D& grid) const noexcept { return values_.size() == layout_size(grid, L); }

    private:
        std::vector<double> values_;
    };

    using NodeField = Field<Layout::Node>;
    using CenterField = Field<Layout::Center>;
    using ExtendedField = Field<Layout::Extended>;

    /// [left, f..., right]
    ExtendedField extend_center_field(const StaggeredGrid1D& grid, const CenterField& f, double left, double right);

    /// Drops the two boundary entries of an extended field.
    CenterField interior_of(const StaggeredGrid1D& grid, const ExtendedField& f);

    template <Layout L>
    Field<L> sample(const std::function<double(double)>& fn, const StaggeredGrid1D& grid)
    {
        std::vector<double> x = layout_coordinates(grid, L);
        for (double& xi : x)
            xi = fn(xi);
        return Field<L>(grid, std::move(x));
    }
} // namespace mimetic

#endif
