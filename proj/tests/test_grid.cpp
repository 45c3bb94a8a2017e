#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "mimetic/grid.hpp"

using namespace mimetic;

TEST_CASE("unit interval with four cells")
{
    const auto g = build_grid(0.0, 1.0, 4);
    CHECK(g.h() == 0.25);
    CHECK(g.nodes() == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(g.centers() == std::vector<double>{0.125, 0.375, 0.625, 0.875});
    CHECK(g.extended_centers() == std::vector<double>{0, 0.125, 0.375, 0.625, 0.875, 1});
}

TEST_CASE("long domain spacing")
{
    const auto g = build_grid(-30.0, 30.0, 600);
    CHECK(g.h() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g.node_count() == 601);
    CHECK(g.center_count() == 600);
    CHECK(g.extended_count() == 602);
}

TEST_CASE("single cell")
{
    const auto g = build_grid(0.0, 1.0, 1);
    CHECK(g.nodes() == std::vector<double>{0, 1});
    CHECK(g.centers() == std::vector<double>{0.5});
    CHECK(g.extended_centers() == std::vector<double>{0, 0.5, 1});
}

TEST_CASE("invalid grids throw")
{
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 0), DomainError);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, -3), DomainError);
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 4), DomainError);
    CHECK_THROWS_AS(build_grid(2.0, 1.0, 4), DomainError);
}

TEST_CASE("node spacing within two ulps for large N")
{
    for (int n : {7, 600, 100003})
    {
        const auto g = build_grid(-30.0, 30.0, n);
        const auto x = g.nodes();
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
        {
            // a + i h is rounded at the scale of the larger of |a| and |x|
            const double scale = std::max({std::abs(g.a()), std::abs(x[i]), std::abs(x[i + 1])});
            const double ulp = std::nextafter(scale, INFINITY) - scale;
            REQUIRE(std::abs((x[i + 1] - x[i]) - g.h()) <= 2 * ulp);
        }
        CHECK(x.back() == 30.0);
    }
}

TEST_CASE("extend center field")
{
    const auto g1 = build_grid(0.0, 1.0, 1);
    const auto e = extend_center_field(g1, CenterField(g1, {5.0}), 1.0, 2.0);
    CHECK(e.vector() == std::vector<double>{1, 5, 2});

    const auto g = build_grid(0.0, 1.0, 6);
    CHECK(extend_center_field(g, CenterField(g), 0, 0).vector() == std::vector<double>(8, 0.0));

    const auto xc = sample<Layout::Center>([](double x) { return x; }, g);
    const auto xe = extend_center_field(g, xc, 0.0, 1.0);
    CHECK(xe.vector() == sample<Layout::Extended>([](double x) { return x; }, g).vector());

    CHECK_THROWS_AS(extend_center_field(g, CenterField(g1, {1.0}), 0, 0), DomainError);
}

TEST_CASE("round trip through extension")
{
    const auto g = build_grid(-2.0, 3.0, 13);
    std::vector<double> v(13);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::sin(1.3 * static_cast<double>(i)) * 1e3;
    const CenterField f(g, v);
    CHECK(interior_of(g, extend_center_field(g, f, -7.0, 11.0)).vector() == v);
}

TEST_CASE("sampling")
{
    const auto g = build_grid(0.0, 1.0, 4);
    CHECK(sample<Layout::Node>([](double) { return 0.0; }, g).vector() == std::vector<double>(5, 0.0));
    CHECK(sample<Layout::Extended>([](double x) { return x; }, g).vector() == std::vector<double>{0, 0.125, 0.375, 0.625, 0.875, 1});

    const auto gauss = sample<Layout::Center>([](double x) { return std::exp(-100 * (x - 0.5) * (x - 0.5)); }, g);
    const double xs[] = {0.125, 0.375, 0.625, 0.875};
    for (int i = 0; i < 4; ++i)
        CHECK(gauss[i] == doctest::Approx(std::exp(-100 * (xs[i] - 0.5) * (xs[i] - 0.5))).epsilon(1e-15));

    for (Layout l : {Layout::Node, Layout::Center, Layout::Extended})
    {
        const auto x = layout_coordinates(g, l);
        CHECK(x.size() == layout_size(g, l));
    }
    auto constant = [](double) { return 3.5; };
    const auto cn = sample<Layout::Node>(constant, g);
    const auto cc = sample<Layout::Center>(constant, g);
    const auto ce = sample<Layout::Extended>(constant, g);
    CHECK(cn.vector() == std::vector<double>(5, 3.5));
    CHECK(cc.vector() == std::vector<double>(4, 3.5));
    CHECK(ce.vector() == std::vector<double>(6, 3.5));
}

TEST_CASE("field length is checked")
{
    const auto g = build_grid(0.0, 1.0, 4);
    CHECK_THROWS_AS(NodeField(g, std::vector<double>(4)), DomainError);
    CHECK_THROWS_AS(ExtendedField(g, std::vector<double>(5)), DomainError);
    CHECK_NOTHROW(ExtendedField(g, std::vector<double>(6)));
    CHECK(NodeField(g).matches(g));
    CHECK_FALSE(NodeField(g).matches(build_grid(0.0, 1.0, 5)));
}
