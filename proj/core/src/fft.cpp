#include "fft.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "backflow/errors.hpp"

namespace backflow::detail {

namespace {
// Only fftw_execute is thread-safe; planning is not.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidArgument("FFT length must be positive");
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(n);
    buffer_ = buf;
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(buffer_);
}

namespace {
void run(void* plan, void* buffer, std::span<std::complex<double>> data, std::size_t n) {
    if (data.size() != n) throw InvalidArgument("FFT input length mismatch");
    auto* buf = static_cast<std::complex<double>*>(buffer);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(static_cast<fftw_plan>(plan));
    std::copy(buf, buf + n, data.begin());
}
}  // namespace

void FftPlan::forward(std::span<std::complex<double>> data) { run(fwd_, buffer_, data, n_); }
void FftPlan::backward(std::span<std::complex<double>> data) { run(bwd_, buffer_, data, n_); }

}  // namespace backflow::detail
