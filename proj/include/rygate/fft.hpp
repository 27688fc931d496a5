#pragma once

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace rygate::fft {

/// RAII pair of in-place c2c FFTW plans for `howmany` contiguous lines of
/// length n (line j occupies [j*n, (j+1)*n)). Plans are created once with
/// FFTW_ESTIMATE | FFTW_UNALIGNED so they can be executed on any caller
/// buffer; execution through the new-array interface is thread safe,
/// planner access is serialized by a global mutex.
class Plan {
 public:
    Plan(int n, int howmany = 1) : n_(n), howmany_(howmany) {
        if (n < 1 || howmany < 1) throw std::invalid_argument("fft::Plan: bad size");
        std::vector<std::complex<double>> proto(static_cast<size_t>(n) * howmany);
        auto* p = reinterpret_cast<fftw_complex*>(proto.data());
        std::lock_guard<std::mutex> lock(planner_mutex());
        constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_many_dft(1, &n_, howmany_, p, nullptr, 1, n_, p, nullptr, 1, n_,
                                  FFTW_FORWARD, flags);
        bwd_ = fftw_plan_many_dft(1, &n_, howmany_, p, nullptr, 1, n_, p, nullptr, 1, n_,
                                  FFTW_BACKWARD, flags);
        if (!fwd_ || !bwd_) throw std::runtime_error("fft::Plan: planner failed");
    }

    ~Plan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
    }

    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    void forward(std::complex<double>* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(fwd_, p, p);
    }

    /// Unnormalized inverse; caller divides by n.
    void backward(std::complex<double>* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(bwd_, p, p);
    }

    int size() const { return n_; }
    int lines() const { return howmany_; }

 private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    int n_;
    int howmany_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace rygate::fft
