#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace backflow::detail {

/// In-place unnormalized complex DFT of fixed length, backed by FFTW.
/// forward:  X_m = sum_j x_j e^{-2 pi i jm/n};  backward uses e^{+...}.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const noexcept { return n_; }
    void forward(std::span<std::complex<double>> data);
    void backward(std::span<std::complex<double>> data);

private:
    std::size_t n_;
    void* buffer_;
    void* fwd_;
    void* bwd_;
};

}  // namespace backflow::detail
