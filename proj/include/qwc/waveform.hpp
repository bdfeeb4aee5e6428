#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qwc/errors.hpp"
#include "qwc/fft.hpp"
#include "qwc/grid.hpp"
#include "qwc/math.hpp"

namespace qwc {

/// Sampled complex mode amplitude A(z) on a grid, units 1/sqrt(length).
struct ComplexWaveform {
    Grid grid;
    std::vector<cplx> samples;
    bool normalized = false;

    /// Riemann-sum norm integral(|A|^2 dz); spectrally accurate on the
    /// periodic grid for smooth decaying fields.
    double norm() const {
        double s = 0.0;
        for (const cplx& a : samples) s += std::norm(a);
        return s * grid.dz();
    }
};

/// Complex spectral amplitude over the DFT-conjugate k-grid, stored in
/// natural DFT order (index m, signed frequency grid.freq_index(m)).
/// Convention: samples[m] ~ Atilde(k_m) = integral A(z) exp(-i k_m z) dz,
/// so Parseval reads sum |Atilde|^2 dk/(2*pi) = sum |A|^2 dz.
struct SpectralAmplitude {
    Grid grid;
    std::vector<cplx> samples;

    /// Norm in the spectral measure dk/(2*pi); equals the z-space norm.
    double norm() const {
        double s = 0.0;
        for (const cplx& a : samples) s += std::norm(a);
        return s * grid.dk() / (2.0 * pi);
    }
};

/// Analytic waveform families plus a pass-through for custom samples.
/// Times are expressed as lengths via c = 1.
struct WaveformSpec {
    enum class Kind { Exponential, Gaussian, Custom };

    Kind kind = Kind::Exponential;
    double tau = 1.0;     // exponential decay time
    double rise = 0.0;    // turn-on time of the leading-edge ramp
    double sigma = 1.0;   // Gaussian amplitude std
    double center = 0.0;  // Gaussian center
    std::vector<cplx> samples;

    /// Single-sided exponential A ~ S(z) exp(-z/(2 tau)) for z >= 0 with
    /// ramp S(z) = 1 - exp(-z/rise) (S = 1 when rise = 0).
    static WaveformSpec exponential(double tau, double rise = 0.0) {
        if (!(tau > 0.0)) throw ConfigError("WaveformSpec.tau: must be > 0");
        if (rise < 0.0) throw ConfigError("WaveformSpec.rise: must be >= 0");
        WaveformSpec s;
        s.kind = Kind::Exponential;
        s.tau = tau;
        s.rise = rise;
        return s;
    }

    /// Gaussian A ~ exp(-(z - center)^2 / (2 sigma^2)).
    static WaveformSpec gaussian(double sigma, double center = 0.0) {
        if (!(sigma > 0.0)) throw ConfigError("WaveformSpec.sigma: must be > 0");
        WaveformSpec s;
        s.kind = Kind::Gaussian;
        s.sigma = sigma;
        s.center = center;
        return s;
    }

    static WaveformSpec custom(std::vector<cplx> samples) {
        WaveformSpec s;
        s.kind = Kind::Custom;
        s.samples = std::move(samples);
        return s;
    }
};

namespace detail {

// Fraction of the analytic norm lying outside [z_min, z_max].
inline double norm_outside(const WaveformSpec& spec, const Grid& g) {
    if (spec.kind == WaveformSpec::Kind::Exponential) {
        // |A|^2 ~ (1 - e^{-z/rise})^2 e^{-z/tau} on z >= 0; the ramp only
        // suppresses the head, so e^{-z/tau} bounds the tails.
        double missing = std::exp(-std::max(g.z_max, 0.0) / spec.tau);
        if (g.z_min > 0.0) missing += 1.0 - std::exp(-g.z_min / spec.tau);
        return missing;
    }
    if (spec.kind == WaveformSpec::Kind::Gaussian) {
        // |A|^2 ~ exp(-(z-c)^2/sigma^2).
        const double right = 0.5 * std::erfc((g.z_max - spec.center) / spec.sigma);
        const double left = 0.5 * std::erfc((spec.center - g.z_min) / spec.sigma);
        return left + right;
    }
    return 0.0;
}

} // namespace detail

/// Build a unit-norm waveform from an analytic spec. Throws TruncationError
/// if more than 1% of the norm falls outside the grid.
inline ComplexWaveform build_waveform(const WaveformSpec& spec, const Grid& grid) {
    if (detail::norm_outside(spec, grid) > 0.01)
        throw TruncationError("waveform support: more than 1% of the norm lies outside the grid");

    ComplexWaveform w;
    w.grid = grid;
    w.samples.resize(static_cast<std::size_t>(grid.n_points));
    switch (spec.kind) {
    case WaveformSpec::Kind::Exponential:
        for (std::int64_t j = 0; j < grid.n_points; ++j) {
            const double z = grid.z(j);
            double a = 0.0;
            if (z >= 0.0) {
                const double ramp = spec.rise > 0.0 ? 1.0 - std::exp(-z / spec.rise) : 1.0;
                a = ramp * std::exp(-z / (2.0 * spec.tau));
            }
            w.samples[static_cast<std::size_t>(j)] = a;
        }
        break;
    case WaveformSpec::Kind::Gaussian:
        for (std::int64_t j = 0; j < grid.n_points; ++j) {
            const double u = (grid.z(j) - spec.center) / spec.sigma;
            w.samples[static_cast<std::size_t>(j)] = std::exp(-0.5 * u * u);
        }
        break;
    case WaveformSpec::Kind::Custom:
        if (static_cast<std::int64_t>(spec.samples.size()) != grid.n_points)
            throw ConfigError("WaveformSpec.samples: size must match Grid.n_points");
        w.samples = spec.samples;
        break;
    }

    const double n = w.norm();
    if (!(n > 0.0)) throw ConfigError("waveform norm: field is identically zero");
    const double scale = 1.0 / std::sqrt(n);
    for (cplx& a : w.samples) a *= scale;
    w.normalized = true;
    return w;
}

/// Forward transform Atilde(k_m) = dz * exp(-i k_m z_min) * DFT(A)[m].
inline SpectralAmplitude to_spectrum(const ComplexWaveform& w) {
    SpectralAmplitude s;
    s.grid = w.grid;
    dft_forward(w.samples, s.samples);
    const double dz = w.grid.dz();
    for (std::int64_t m = 0; m < w.grid.n_points; ++m) {
        const double ph = -w.grid.k(m) * w.grid.z_min;
        s.samples[static_cast<std::size_t>(m)] *= dz * cplx(std::cos(ph), std::sin(ph));
    }
    return s;
}

/// Exact inverse of to_spectrum.
inline ComplexWaveform from_spectrum(const SpectralAmplitude& s) {
    std::vector<cplx> twisted(s.samples.size());
    for (std::int64_t m = 0; m < s.grid.n_points; ++m) {
        const double ph = s.grid.k(m) * s.grid.z_min;
        twisted[static_cast<std::size_t>(m)] =
            s.samples[static_cast<std::size_t>(m)] * cplx(std::cos(ph), std::sin(ph));
    }
    ComplexWaveform w;
    w.grid = s.grid;
    dft_backward(twisted, w.samples);
    const double scale = 1.0 / (s.grid.dz() * static_cast<double>(s.grid.n_points));
    for (cplx& a : w.samples) a *= scale;
    return w;
}

/// Spectral derivative dA/dz. The Nyquist mode is zeroed to keep the
/// derivative of a real field real.
inline ComplexWaveform spectral_derivative(const ComplexWaveform& w) {
    std::vector<cplx> spec;
    dft_forward(w.samples, spec);
    for (std::int64_t m = 0; m < w.grid.n_points; ++m) {
        if (w.grid.freq_index(m) == -w.grid.n_points / 2)
            spec[static_cast<std::size_t>(m)] = 0.0;
        else
            spec[static_cast<std::size_t>(m)] *= cplx(0.0, w.grid.k(m));
    }
    ComplexWaveform d;
    d.grid = w.grid;
    dft_backward(spec, d.samples);
    const double scale = 1.0 / static_cast<double>(w.grid.n_points);
    for (cplx& a : d.samples) a *= scale;
    return d;
}

/// Band-limited periodic translation f(z) -> f(z - shift) of a real profile.
inline std::vector<double> translate_periodic(const std::vector<double>& f, const Grid& grid,
                                              double shift) {
    std::vector<cplx> in(f.begin(), f.end()), spec, out;
    dft_forward(in, spec);
    for (std::int64_t m = 0; m < grid.n_points; ++m) {
        const double ph = -grid.k(m) * shift;
        spec[static_cast<std::size_t>(m)] *= cplx(std::cos(ph), std::sin(ph));
    }
    dft_backward(spec, out);
    std::vector<double> res(f.size());
    const double scale = 1.0 / static_cast<double>(grid.n_points);
    for (std::size_t j = 0; j < f.size(); ++j) res[j] = out[j].real() * scale;
    return res;
}

/// Inner product integral(conj(a) * b dz) on a shared grid.
inline cplx overlap(const ComplexWaveform& a, const ComplexWaveform& b) {
    if (!(a.grid == b.grid)) throw ConfigError("overlap: waveforms must share a grid");
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.samples.size(); ++j)
        s += std::conj(a.samples[j]) * b.samples[j];
    return s * a.grid.dz();
}

/// Relative L2 mismatch of the envelopes |a| and |b|:
/// ||(|a| - |b|)|| / ||b||.
inline double envelope_mismatch(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        num += sq(std::abs(a[j]) - std::abs(b[j]));
        den += std::norm(b[j]);
    }
    return std::sqrt(num / den);
}

} // namespace qwc
