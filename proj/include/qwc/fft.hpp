#pragma once

#include <fftw3.h>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "qwc/errors.hpp"
#include "qwc/math.hpp"

namespace qwc {

namespace detail {

// One forward + one backward FFTW plan per transform size. Plans are created
// with FFTW_ESTIMATE (deterministic across runs) and FFTW_UNALIGNED so they
// can execute on any caller-provided buffers via the new-array interface,
// which is thread-safe. Plan creation itself is serialized by a mutex.
class FftPlan {
public:
    explicit FftPlan(std::int64_t n) : n_(n) {
        std::vector<cplx> a(static_cast<std::size_t>(n)), b(a);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()),
                                as_fftw(b.data()), FFTW_FORWARD, flags);
        bwd_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()),
                                as_fftw(b.data()), FFTW_BACKWARD, flags);
        if (!fwd_ || !bwd_) throw Error("FFTW plan creation failed");
    }
    ~FftPlan() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void forward(const cplx* in, cplx* out) const {
        fftw_execute_dft(fwd_, as_fftw(const_cast<cplx*>(in)), as_fftw(out));
    }
    void backward(const cplx* in, cplx* out) const {
        fftw_execute_dft(bwd_, as_fftw(const_cast<cplx*>(in)), as_fftw(out));
    }
    std::int64_t size() const { return n_; }

private:
    static fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
    std::int64_t n_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

inline const FftPlan& fft_plan(std::int64_t n) {
    static std::mutex mtx;
    static std::map<std::int64_t, std::unique_ptr<FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPlan>(n);
    return *slot;
}

} // namespace detail

/// Unnormalized DFT: out[m] = sum_j in[j] exp(-2*pi*i*j*m/n).
inline void dft_forward(const std::vector<cplx>& in, std::vector<cplx>& out) {
    out.resize(in.size());
    detail::fft_plan(static_cast<std::int64_t>(in.size())).forward(in.data(), out.data());
}

/// Unnormalized inverse DFT: out[j] = sum_m in[m] exp(+2*pi*i*j*m/n).
inline void dft_backward(const std::vector<cplx>& in, std::vector<cplx>& out) {
    out.resize(in.size());
    detail::fft_plan(static_cast<std::int64_t>(in.size())).backward(in.data(), out.data());
}

} // namespace qwc
