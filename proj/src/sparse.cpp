#include "mimetic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimetic/errors.hpp"

namespace mimetic
{
    SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
        : rows_(rows), cols_(cols)
    {
        for (const Triplet& t : entries)
        {
            if (t.row >= rows || t.col >= cols)
                throw DomainError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
        }

        std::sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
            return x.row != y.row ? x.row < y.row : x.col < y.col;
        });

        row_ptr_.assign(rows + 1, 0);
        col_idx_.reserve(entries.size());
        values_.reserve(entries.size());

        for (std::size_t k = 0; k < entries.size();)
        {
            const std::size_t r = entries[k].row;
            const std::size_t c = entries[k].col;
            double v = 0.0;
            for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k)
                v += entries[k].value;
            col_idx_.push_back(c);
            values_.push_back(v);
            ++row_ptr_[r + 1];
        }

        for (std::size_t r = 0; r < rows; ++r)
            row_ptr_[r + 1] += row_ptr_[r];
    }

    SparseMatrix SparseMatrix::diagonal(std::span<const double> d)
    {
        std::vector<Triplet> t;
        t.reserve(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            t.push_back({i, i, d[i]});
        return SparseMatrix(d.size(), d.size(), std::move(t));
    }

    void SparseMatrix::apply(std::span<const double> x, std::span<double> y) const
    {
        if (x.size() != cols_ || y.size() != rows_)
            throw DomainError("shape mismatch in matrix-vector product");
        for (std::size_t r = 0; r < rows_; ++r)
        {
            double s = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                s += values_[k] * x[col_idx_[k]];
            y[r] = s;
        }
    }

    std::vector<double> SparseMatrix::apply(std::span<const double> x) const
    {
        std::vector<double> y(rows_);
        apply(x, y);
        return y;
    }

    void SparseMatrix::apply_add(double alpha, std::span<const double> x, std::span<double> y) const
    {
        if (x.size() != cols_ || y.size() != rows_)
            throw DomainError("shape mismatch in matrix-vector product");
        for (std::size_t r = 0; r < rows_; ++r)
        {
            double s = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                s += values_[k] * x[col_idx_[k]];
            y[r] += alpha * s;
        }
    }

    double SparseMatrix::at(std::size_t r, std::size_t c) const
    {
        if (r >= rows_ || c >= cols_)
            throw DomainError("index outside matrix");
        const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
        const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
        const auto it = std::lower_bound(first, last, c);
        if (it == last || *it != c)
            return 0.0;
        return values_[static_cast<std::size_t>(it - col_idx_.begin())];
    }

    std::span<const std::size_t> SparseMatrix::row_columns(std::size_t r) const
    {
        return std::span<const std::size_t>(col_idx_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
    }

    std::span<const double> SparseMatrix::row_values(std::size_t r) const
    {
        return std::span<const double>(values_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
    }

    double SparseMatrix::row_max_abs(std::size_t r) const
    {
        double m = 0.0;
        for (double v : row_values(r))
            m = std::max(m, std::abs(v));
        return m;
    }

    std::vector<Triplet> SparseMatrix::triplets() const
    {
        std::vector<Triplet> t;
        t.reserve(values_.size());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                t.push_back({r, col_idx_[k], values_[k]});
        return t;
    }

    SparseMatrix SparseMatrix::transpose() const
    {
        std::vector<Triplet> t = triplets();
        for (Triplet& e : t)
            std::swap(e.row, e.col);
        return SparseMatrix(cols_, rows_, std::move(t));
    }

    std::vector<std::vector<double>> SparseMatrix::to_dense() const
    {
        std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                d[r][col_idx_[k]] = values_[k];
        return d;
    }

    SparseMatrix SparseMatrix::multiply(const SparseMatrix& other) const
    {
        if (cols_ != other.rows_)
            throw DomainError("shape mismatch in matrix product");
        std::vector<Triplet> t;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            {
                const std::size_t m = col_idx_[k];
                for (std::size_t l = other.row_ptr_[m]; l < other.row_ptr_[m + 1]; ++l)
                    t.push_back({r, other.col_idx_[l], values_[k] * other.values_[l]});
            }
        return SparseMatrix(rows_, other.cols_, std::move(t));
    }

    SparseMatrix SparseMatrix::add(const SparseMatrix& other, double alpha, double beta) const
    {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw DomainError("shape mismatch in matrix sum");
        std::vector<Triplet> t = triplets();
        for (Triplet& e : t)
            e.value *= alpha;
        for (Triplet e : other.triplets())
        {
            e.value *= beta;
            t.push_back(e);
        }
        return SparseMatrix(rows_, cols_, std::move(t));
    }

    SparseMatrix SparseMatrix::scale_rows(std::span<const double> d) const
    {
        if (d.size() != rows_)
            throw DomainError("row scaling length mismatch");
        SparseMatrix out = *this;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                out.values_[k] *= d[r];
        return out;
    }

    SparseMatrix SparseMatrix::scale_cols(std::span<const double> d) const
    {
        if (d.size() != cols_)
            throw DomainError("column scaling length mismatch");
        SparseMatrix out = *this;
        for (std::size_t k = 0; k < values_.size(); ++k)
            out.values_[k] *= d[col_idx_[k]];
        return out;
    }
} // namespace mimetic
