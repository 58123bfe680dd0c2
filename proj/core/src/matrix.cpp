#include "backflow/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace backflow {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::hermitian_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i; j < cols_; ++j) {
            worst = std::max(worst, std::abs((*this)(j, i) - std::conj((*this)(i, j))));
        }
    }
    return worst;
}

std::vector<cdouble> ComplexMatrix::multiply(std::span<const cdouble> v) const {
    assert(v.size() == cols_);
    std::vector<cdouble> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        cdouble acc = 0.0;
        const auto r = row(i);
        for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * v[j];
        out[i] = acc;
    }
    return out;
}

cdouble ComplexMatrix::quadratic_form(std::span<const cdouble> v) const {
    const auto av = multiply(v);
    cdouble acc = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) acc += std::conj(v[i]) * av[i];
    return acc;
}

double norm2(std::span<const cdouble> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace backflow
