#ifndef MIMETIC_SPARSE_HPP
#define MIMETIC_SPARSE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace mimetic
{
    struct Triplet
    {
        std::size_t row;
        std::size_t col;
        double value;
    };

    /// Compressed-row sparse matrix. Immutable after construction; entries within
    /// a row are sorted by column and duplicates are summed.
    class SparseMatrix
    {
    public:
        SparseMatrix() = default;
        SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

        static SparseMatrix diagonal(std::span<const double> d);

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }
        std::size_t nonzeros() const noexcept { return values_.size(); }

        // y = A x. y is overwritten.
        void apply(std::span<const double> x, std::span<double> y) const;
        std::vector<double> apply(std::span<const double> x) const;
        // y += alpha A x
        void apply_add(double alpha, std::span<const double> x, std::span<double> y) const;

        double at(std::size_t r, std::size_t c) const;

        std::span<const std::size_t> row_columns(std::size_t r) const;
        std::span<const double> row_values(std::size_t r) const;
        double row_max_abs(std::size_t r) const;

        SparseMatrix transpose() const;
        std::vector<std::vector<double>> to_dense() const;
        std::vector<Triplet> triplets() const;

        // this * other
        SparseMatrix multiply(const SparseMatrix& other) const;
        // alpha * this + beta * other
        SparseMatrix add(const SparseMatrix& other, double alpha = 1.0, double beta = 1.0) const;
        // diag(d) * this
        SparseMatrix scale_rows(std::span<const double> d) const;
        // this * diag(d)
        SparseMatrix scale_cols(std::span<const double> d) const;

    private:
        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        std::vector<std::size_t> row_ptr_{0};
        std::vector<std::size_t> col_idx_;
        std::vector<double> values_;
    };
} // namespace mimetic

#endif
