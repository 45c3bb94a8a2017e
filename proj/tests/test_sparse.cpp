#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "mimetic/sparse.hpp"

using namespace mimetic;

namespace
{
    using Dense = std::vector<std::vector<double>>;

    Dense dense_multiply(const Dense& a, const Dense& b)
    {
        Dense c(a.size(), std::vector<double>(b[0].size(), 0.0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t k = 0; k < b.size(); ++k)
                for (std::size_t j = 0; j < b[0].size(); ++j)
                    c[i][j] += a[i][k] * b[k][j];
        return c;
    }

    SparseMatrix sample_matrix()
    {
        return SparseMatrix(3, 4, {{0, 1, 2.0}, {2, 3, -1.0}, {0, 1, 0.5}, {1, 0, 4.0}, {2, 0, 3.0}});
    }
}

TEST_CASE("construction sorts and sums duplicates")
{
    const auto m = sample_matrix();
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 4);
    CHECK(m.nonzeros() == 4);
    CHECK(m.at(0, 1) == 2.5);
    CHECK(m.at(2, 0) == 3.0);
    CHECK(m.at(2, 3) == -1.0);
    CHECK(m.at(1, 1) == 0.0);
    CHECK(m.row_columns(2).size() == 2);
    CHECK(m.row_columns(2)[0] == 0);
    CHECK(m.row_max_abs(2) == 3.0);
}

TEST_CASE("out-of-range triplets are rejected")
{
    CHECK_THROWS(SparseMatrix(2, 2, {{2, 0, 1.0}}));
    CHECK_THROWS(SparseMatrix(2, 2, {{0, 2, 1.0}}));
}

TEST_CASE("apply and apply_add")
{
    const auto m = sample_matrix();
    const std::vector<double> x{1, 2, 3, 4};
    const auto y = m.apply(x);
    CHECK(y == std::vector<double>{5, 4, -1});
    std::vector<double> z{1, 1, 1};
    m.apply_add(2.0, x, z);
    CHECK(z == std::vector<double>{11, 9, -1});
    std::vector<double> bad(2);
    CHECK_THROWS(m.apply(x, bad));
}

TEST_CASE("transpose, multiply, add, scaling agree with dense arithmetic")
{
    const auto a = sample_matrix();
    const auto at = a.transpose();
    const Dense ad = a.to_dense();
    const Dense atd = at.to_dense();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(ad[i][j] == atd[j][i]);

    CHECK(a.multiply(at).to_dense() == dense_multiply(ad, atd));

    const auto s = a.add(a, 2.0, -0.5);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(s.at(i, j) == doctest::Approx(1.5 * ad[i][j]));

    const std::vector<double> dr{1, 2, 3};
    const std::vector<double> dc{1, -1, 2, 0.5};
    const auto r = a.scale_rows(dr);
    const auto c = a.scale_cols(dc);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
        {
            CHECK(r.at(i, j) == dr[i] * ad[i][j]);
            CHECK(c.at(i, j) == ad[i][j] * dc[j]);
        }

    CHECK_THROWS(a.multiply(a));
    CHECK_THROWS(a.add(at));
}

TEST_CASE("diagonal")
{
    const std::vector<double> d{1, 2, 3};
    const auto m = SparseMatrix::diagonal(d);
    CHECK(m.rows() == 3);
    CHECK(m.nonzeros() == 3);
    CHECK(m.apply(std::vector<double>{1, 1, 1}) == d);
}

TEST_CASE("triplets round trip")
{
    const auto a = sample_matrix();
    const auto b = SparseMatrix(a.rows(), a.cols(), a.triplets());
    CHECK(a.to_dense() == b.to_dense());
}
