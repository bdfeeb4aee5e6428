#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qwc/chirp.hpp"
#include "qwc/errors.hpp"
#include "qwc/waveform.hpp"

namespace qwc {

struct DechirpOptions {
    enum class Mode { Numeric, ClosedForm };
    Mode mode = Mode::Numeric;

    /// Spectral amplitudes below this fraction of the peak are masked during
    /// unwrapping and filled by linear extrapolation.
    double mask_threshold = 1e-8;

    // Closed-form mode parameters (Gaussian target): gamma(k) =
    // -phi(alpha^{-1}((1/sqrt(b)) exp(-k^2/sigma^2))).
    double b = 2.0;
    double sigma = 0.0;
};

namespace detail {

// Sorted-by-k traversal: position i in [0, n) corresponds to signed
// frequency index i - n/2, i.e. DFT index (i + n/2) mod n.
inline std::size_t dft_index(std::int64_t i, std::int64_t n) {
    const std::int64_t f = i - n / 2;
    return static_cast<std::size_t>(f < 0 ? f + n : f);
}

// Predictor-based unwrap step: choose the 2*pi branch of raw - base closest
// to the predicted increment.
inline double unwrap_step(double raw, double base, double predicted) {
    double delta = raw - base;
    delta -= 2.0 * pi * std::round((delta - predicted) / (2.0 * pi));
    return base + delta;
}

} // namespace detail

/// Output-shaper design. Numeric mode measures the residual spectral phase
/// of the converted pulse, i.e. gamma(k) = -arg FT(input * e^{-i phi}),
/// unwrapped continuously in k and referenced to gamma(0) = 0; applying it
/// makes the converted pulse transform-limited. Closed-form mode evaluates
/// the Gaussian-target formula gamma(k) = -phi(alpha^{-1}((1/sqrt(b))
/// e^{-k^2/sigma^2})) with the amplitude inverted by monotone bisection;
/// it inherits the sign/width conventions of the closed-form chirp and is
/// kept as a validation target only.
inline SpectralPhase design_dechirp(const ComplexWaveform& input, const PhaseProfile& chirp,
                                    const DechirpOptions& opts = {}) {
    if (!(input.grid == chirp.grid))
        throw ConfigError("design_dechirp: input and chirp must share a grid");
    const Grid& g = input.grid;
    const std::int64_t n = g.n_points;

    SpectralPhase out;
    out.grid = g;
    out.gamma.assign(static_cast<std::size_t>(n), 0.0);

    if (opts.mode == DechirpOptions::Mode::ClosedForm) {
        if (!(opts.sigma > 0.0))
            throw ConfigError("design_dechirp: closed-form mode requires sigma > 0");
        if (!(opts.b > 0.0))
            throw ConfigError("design_dechirp: closed-form mode requires b > 0");

        // Invert |alpha_1| on the decreasing branch right of its peak.
        std::vector<double> amp(static_cast<std::size_t>(n));
        for (std::size_t j = 0; j < amp.size(); ++j) amp[j] = std::abs(input.samples[j]);
        const auto peak = static_cast<std::int64_t>(
            std::max_element(amp.begin(), amp.end()) - amp.begin());
        for (std::int64_t j = peak; j + 1 < n && amp[static_cast<std::size_t>(j + 1)] > 0.0; ++j)
            if (amp[static_cast<std::size_t>(j + 1)] > amp[static_cast<std::size_t>(j)] * (1.0 + 1e-12))
                throw BranchError("design_dechirp: |alpha_1| is not monotone on the inversion branch");

        auto invert = [&](double v) {
            // Bisection on the sampled branch, then linear interpolation.
            std::int64_t lo = peak, hi = n - 1;
            v = std::clamp(v, amp[static_cast<std::size_t>(hi)], amp[static_cast<std::size_t>(lo)]);
            while (hi - lo > 1) {
                const std::int64_t mid = (lo + hi) / 2;
                (amp[static_cast<std::size_t>(mid)] >= v ? lo : hi) = mid;
            }
            const double a0 = amp[static_cast<std::size_t>(lo)], a1 = amp[static_cast<std::size_t>(hi)];
            const double t = (a0 == a1) ? 0.0 : (a0 - v) / (a0 - a1);
            return g.z(lo) + t * g.dz();
        };
        auto phi_at = [&](double z) {
            const double x = (z - g.z_min) / g.dz();
            const auto j = static_cast<std::int64_t>(std::clamp(std::floor(x), 0.0,
                                                                static_cast<double>(n - 2)));
            const double t = x - static_cast<double>(j);
            return (1.0 - t) * chirp.phi[static_cast<std::size_t>(j)] +
                   t * chirp.phi[static_cast<std::size_t>(j + 1)];
        };

        for (std::int64_t m = 0; m < n; ++m) {
            const double k = g.k(m);
            const double v = std::exp(-k * k / sq(opts.sigma)) / std::sqrt(opts.b);
            out.gamma[static_cast<std::size_t>(m)] = -phi_at(invert(v));
        }
        const double g0 = out.gamma[0];
        for (double& v : out.gamma) v -= g0;
        return out;
    }

    // Numeric mode.
    ComplexWaveform chirped = input;
    for (std::int64_t j = 0; j < n; ++j) {
        const double ph = -chirp.phi[static_cast<std::size_t>(j)];
        chirped.samples[static_cast<std::size_t>(j)] *= cplx(std::cos(ph), std::sin(ph));
    }
    const SpectralAmplitude spec = to_spectrum(chirped);

    double peak = 0.0;
    for (const cplx& c : spec.samples) peak = std::max(peak, std::abs(c));
    const double floor = opts.mask_threshold * peak;

    std::vector<double> raw(static_cast<std::size_t>(n));
    std::vector<char> valid(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t m = detail::dft_index(i, n);
        raw[static_cast<std::size_t>(i)] = -std::arg(spec.samples[m]);
        valid[static_cast<std::size_t>(i)] = std::abs(spec.samples[m]) >= floor;
    }

    // Unwrap outward from k = 0 with first-order slope continuation.
    std::vector<double> unw(raw);
    const std::int64_t c = n / 2;
    std::int64_t first_valid = c, last_valid = c;
    {
        double base = raw[static_cast<std::size_t>(c)], pred = 0.0;
        std::int64_t gap = 1;
        for (std::int64_t i = c + 1; i < n; ++i) {
            if (!valid[static_cast<std::size_t>(i)]) {
                ++gap;
                continue;
            }
            const double u = detail::unwrap_step(raw[static_cast<std::size_t>(i)], base,
                                                 pred * static_cast<double>(gap));
            pred = (u - base) / static_cast<double>(gap);
            unw[static_cast<std::size_t>(i)] = u;
            base = u;
            gap = 1;
            last_valid = i;
        }
        base = raw[static_cast<std::size_t>(c)];
        pred = 0.0;
        gap = 1;
        for (std::int64_t i = c - 1; i >= 0; --i) {
            if (!valid[static_cast<std::size_t>(i)]) {
                ++gap;
                continue;
            }
            const double u = detail::unwrap_step(raw[static_cast<std::size_t>(i)], base,
                                                 pred * static_cast<double>(gap));
            pred = (u - base) / static_cast<double>(gap);
            unw[static_cast<std::size_t>(i)] = u;
            base = u;
            gap = 1;
            first_valid = i;
        }
    }

    // Fill masked samples by linear extrapolation from the valid band; the
    // slope is measured over a short stencil to damp endpoint noise.
    auto edge_slope = [&](std::int64_t i0, int dir) {
        const std::int64_t span = std::min<std::int64_t>(8, dir > 0 ? last_valid - i0 : i0 - first_valid);
        if (span < 1) return 0.0;
        return (unw[static_cast<std::size_t>(i0 + dir * span)] - unw[static_cast<std::size_t>(i0)]) /
               static_cast<double>(dir * span);
    };
    if (last_valid < n - 1) {
        const double s = edge_slope(last_valid, -1);
        for (std::int64_t i = last_valid + 1; i < n; ++i)
            unw[static_cast<std::size_t>(i)] =
                unw[static_cast<std::size_t>(last_valid)] + s * static_cast<double>(i - last_valid);
    }
    if (first_valid > 0) {
        const double s = edge_slope(first_valid, +1);
        for (std::int64_t i = first_valid - 1; i >= 0; --i)
            unw[static_cast<std::size_t>(i)] =
                unw[static_cast<std::size_t>(first_valid)] - s * static_cast<double>(first_valid - i);
    }
    // Interior gaps: linear interpolation between the flanking valid points.
    for (std::int64_t i = first_valid; i <= last_valid; ++i) {
        if (valid[static_cast<std::size_t>(i)]) continue;
        std::int64_t r = i;
        while (r <= last_valid && !valid[static_cast<std::size_t>(r)]) ++r;
        const std::int64_t l = i - 1;
        for (std::int64_t q = i; q < r; ++q) {
            const double t = static_cast<double>(q - l) / static_cast<double>(r - l);
            unw[static_cast<std::size_t>(q)] = (1.0 - t) * unw[static_cast<std::size_t>(l)] +
                                               t * unw[static_cast<std::size_t>(r)];
        }
        i = r;
    }

    const double g0 = unw[static_cast<std::size_t>(c)];
    for (std::int64_t i = 0; i < n; ++i)
        out.gamma[detail::dft_index(i, n)] = unw[static_cast<std::size_t>(i)] - g0;
    return out;
}

/// Apply the output pulse shaper: out = IFT(e^{i gamma(k)} FT(w)). Unitary,
/// norm-preserving up to roundoff.
inline ComplexWaveform apply_dechirp(const ComplexWaveform& w, const SpectralPhase& sp) {
    if (!(w.grid == sp.grid)) throw ConfigError("apply_dechirp: waveform and phase grids differ");
    SpectralAmplitude s = to_spectrum(w);
    for (std::size_t m = 0; m < s.samples.size(); ++m) {
        const double ph = sp.gamma[m];
        s.samples[m] *= cplx(std::cos(ph), std::sin(ph));
    }
    ComplexWaveform out = from_spectrum(s);
    out.normalized = w.normalized;
    return out;
}

} // namespace qwc
