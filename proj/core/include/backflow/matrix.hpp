#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace backflow {

using cdouble = std::complex<double>;

/// Dense row-major complex matrix. Small on purpose: the library only needs
/// square Hermitian forms of a few hundred rows.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ComplexMatrix zeros(std::size_t n) { return ComplexMatrix(n, n); }
    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    cdouble& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    const cdouble& operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<cdouble> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const cdouble> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<const cdouble> data() const noexcept { return data_; }

    double frobenius_norm() const;
    /// max_{i,j} |A(j,i) - conj(A(i,j))|
    double hermitian_defect() const;

    std::vector<cdouble> multiply(std::span<const cdouble> v) const;
    /// v^H A v
    cdouble quadratic_form(std::span<const cdouble> v) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cdouble> data_;
};

double norm2(std::span<const cdouble> v);

}  // namespace backflow
