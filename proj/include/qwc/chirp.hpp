#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qwc/errors.hpp"
#include "qwc/grid.hpp"
#include "qwc/math.hpp"
#include "qwc/quadrature.hpp"
#include "qwc/waveform.hpp"

namespace qwc {

/// Escort phase profile phi(z) with its derivative (the local chirp), on a
/// shared grid. phi(z_ref) = 0 at the declared reference sample.
struct PhaseProfile {
    Grid grid;
    std::vector<double> phi;    // radians
    std::vector<double> dphi;   // rad / length
    std::vector<double> d2phi;  // rad / length^2
    std::int64_t ref_index = 0;
};

/// Output-shaper spectral phase gamma(k), stored in natural DFT order with
/// gamma(k=0) = 0.
struct SpectralPhase {
    Grid grid;
    std::vector<double> gamma;
};

/// Boundary constants of the stationary-phase construction. The chirp slope
/// is sigma_k * erf_inv(a + b * P(z)) with P the cumulative input power, so
/// both a and a + b must lie in [-1, 1].
struct ChirpBoundary {
    double a = 1.0;
    double b = -2.0;

    /// Maps the input power onto the whole target spectrum (chirp slope runs
    /// through both signs).
    static ChirpBoundary full_spectrum() { return {1.0, -2.0}; }
    /// Maps the input power onto k >= 0 only (single-signed chirp slope).
    static ChirpBoundary half_spectrum() { return {1.0, -1.0}; }

    void validate(double total_power) const {
        if (b == 0.0) throw BoundaryError("ChirpBoundary.b: must be nonzero");
        const double tol = 1e-9;
        if (std::abs(a) > 1.0 + tol || std::abs(a + b * total_power) > 1.0 + tol)
            throw BoundaryError("ChirpBoundary: a and a + b*P_total must lie in [-1, 1]");
    }
};

struct ChirpOptions {
    /// Power fraction below which a grid point counts as outside the input
    /// support; the erf quantile argument is frozen there (one-sided limit)
    /// and the slope is tapered to zero further out.
    double support_epsilon = 1e-6;
    /// Close the phase integral inside the dead zone so that phi is
    /// periodic on the grid (required for spectral escort translation).
    bool periodize = true;
    /// Hard safety clip on |erf_inv| output.
    double quantile_clip = 8.0;
    /// Minimum product of target spectral width and input rms width.
    double min_compression = 5.0;
};

namespace detail {

inline double rms_width(const ComplexWaveform& w) {
    double m1 = 0.0, m2 = 0.0;
    for (std::int64_t j = 0; j < w.grid.n_points; ++j) {
        const double p = std::norm(w.samples[static_cast<std::size_t>(j)]) * w.grid.dz();
        m1 += w.grid.z(j) * p;
        m2 += sq(w.grid.z(j)) * p;
    }
    return std::sqrt(std::max(m2 - m1 * m1, 0.0));
}

// Cosine roll from 0 at i0 to 1 at i1 (half-open index math, i1 > i0).
inline double cos_roll(std::int64_t i, std::int64_t i0, std::int64_t i1) {
    const double u = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
    return 0.5 * (1.0 - std::cos(pi * std::clamp(u, 0.0, 1.0)));
}

} // namespace detail

/// Stationary-phase chirp designer: the slope phi'(z) is the erf quantile of
/// the cumulative input power, phi'(z) = sigma_k * erf_inv(a + b P(z)), so
/// that |FT(input * e^{i phi})| matches a Gaussian target spectrum of
/// amplitude std sigma_k. phi is the trapezoidal integral of the slope,
/// gauged to zero at the P = 1/2 point. Outside the input support the
/// quantile argument is frozen at its one-sided limit, the slope is tapered
/// to zero, and (by default) a closure bump in the dead zone makes phi
/// periodic on the grid.
inline PhaseProfile design_chirp_cdf(const ComplexWaveform& input, double target_spectral_width,
                                     const ChirpBoundary& boundary, const ChirpOptions& opts = {}) {
    if (!input.normalized) throw ConfigError("design_chirp_cdf: input must be normalized");
    if (!(target_spectral_width > 0.0))
        throw ConfigError("design_chirp_cdf: target_spectral_width must be > 0");

    const Grid& g = input.grid;
    const auto n = static_cast<std::size_t>(g.n_points);
    const double dz = g.dz();

    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = std::norm(input.samples[j]);
    std::vector<double> P = cumtrapz(p, dz);
    // Normalize the cumulative power by its own trapezoid total so the
    // quantile argument spans exactly [a, a + b]; this keeps the discrete
    // CDF consistent with the unit-norm input to O(dz^2).
    if (!(P.back() > 0.0)) throw ConfigError("design_chirp_cdf: input power is zero");
    const double inv_total = 1.0 / P.back();
    for (double& v : P) v *= inv_total;
    const double total = 1.0;
    boundary.validate(total);

    if (target_spectral_width * detail::rms_width(input) < opts.min_compression)
        throw ConfigError("design_chirp_cdf: stationary-phase validity requires compression >= 5");

    // Support window in index space.
    const double eps = opts.support_epsilon * total;
    std::int64_t j_lo = 0, j_hi = g.n_points - 1;
    while (j_lo < g.n_points - 1 && P[static_cast<std::size_t>(j_lo)] <= eps) ++j_lo;
    while (j_hi > 0 && P[static_cast<std::size_t>(j_hi)] >= total - eps) --j_hi;
    if (j_hi <= j_lo) throw ConfigError("design_chirp_cdf: input support is degenerate");

    // Quantile slope with the argument frozen outside the support.
    const double P_lo = P[static_cast<std::size_t>(j_lo)];
    const double P_hi = P[static_cast<std::size_t>(j_hi)];
    std::vector<double> dphi(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double Pc = std::clamp(P[j], P_lo, P_hi);
        double arg = boundary.a + boundary.b * Pc;
        if (std::abs(arg) > 1.0) {
            if (std::abs(arg) > 1.0 + 1e-9)
                throw BoundaryError("design_chirp_cdf: erf quantile argument left (-1, 1) "
                                    "inside the input support");
            arg = std::clamp(arg, -1.0, 1.0);
        }
        const double y = std::clamp(erf_inv(arg), -opts.quantile_clip, opts.quantile_clip);
        dphi[j] = target_spectral_width * y;
    }

    // Taper the slope to zero across the dead zones.
    const std::int64_t margin = std::max<std::int64_t>(8, g.n_points / 64);
    const std::int64_t m_l = std::min(j_lo, margin);
    const std::int64_t m_r = std::min(g.n_points - 1 - j_hi, margin);
    for (std::int64_t j = 0; j < j_lo; ++j)
        dphi[static_cast<std::size_t>(j)] *=
            (m_l > 0) ? detail::cos_roll(j, j_lo - m_l, j_lo) : 1.0;
    for (std::int64_t j = j_hi + 1; j < g.n_points; ++j)
        dphi[static_cast<std::size_t>(j)] *=
            (m_r > 0) ? detail::cos_roll(2 * j_hi + m_r - j, j_hi, j_hi + m_r) : 1.0;

    // Closure: a Hann bump in the larger dead zone zeroes the cyclic integral
    // of the slope (a plain sum on the periodic grid), making the integrated
    // phi periodic and flat across the wrap.
    if (opts.periodize) {
        const std::int64_t left_free = j_lo - m_l;
        const std::int64_t right_free = g.n_points - 1 - (j_hi + m_r);
        const std::int64_t pad = 4;
        std::int64_t b0 = 0, b1 = 0;
        if (left_free >= right_free && left_free >= 24) {
            b0 = pad;
            b1 = left_free - pad;
        } else if (right_free >= 24) {
            b0 = j_hi + m_r + 1 + pad;
            b1 = g.n_points - pad;
        }
        if (b1 - b0 >= 8) {
            double slope_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) slope_sum += dphi[j];
            double bump_sum = 0.0;
            std::vector<double> bump(static_cast<std::size_t>(b1 - b0));
            for (std::int64_t j = b0; j < b1; ++j) {
                const double u = static_cast<double>(j - b0) / static_cast<double>(b1 - 1 - b0);
                bump[static_cast<std::size_t>(j - b0)] = 0.5 * (1.0 - std::cos(2.0 * pi * u));
                bump_sum += bump[static_cast<std::size_t>(j - b0)];
            }
            const double scale = -slope_sum / bump_sum;
            for (std::int64_t j = b0; j < b1; ++j)
                dphi[static_cast<std::size_t>(j)] += scale * bump[static_cast<std::size_t>(j - b0)];
        }
    }

    PhaseProfile prof;
    prof.grid = g;
    prof.dphi = dphi;
    prof.phi = cumtrapz(dphi, dz);

    // Gauge: phi = 0 where the cumulative power crosses half the total.
    std::int64_t ref = j_lo;
    while (ref < j_hi && P[static_cast<std::size_t>(ref)] < 0.5 * total) ++ref;
    const double phi_ref = prof.phi[static_cast<std::size_t>(ref)];
    for (double& v : prof.phi) v -= phi_ref;
    prof.ref_index = ref;

    prof.d2phi.assign(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j)
        prof.d2phi[j] = (dphi[j + 1] - dphi[j - 1]) / (2.0 * dz);
    return prof;
}

/// Closed-form chirp for a single-sided exponential input (decay tau)
/// mapped to a Gaussian target: phi(z) = (sqrt(2)/sigma) *
/// integral_0^z erf_inv(exp(-zeta/tau)) dzeta on a grid starting at z = 0.
/// sigma is the Gaussian 1/e^2 time constant: the target amplitude is
/// exp(-z^2/sigma^2) and the target spectral amplitude std is sqrt(2)/sigma.
/// The integrable endpoint singularity at zeta = 0 is handled by the
/// substitution y = erf_inv(exp(-zeta/tau)), which maps the first cell onto
/// a smooth Gaussian-tail integral.
inline PhaseProfile chirp_exp_gauss_closed_form(double tau, double sigma, const Grid& grid) {
    if (!(tau > 0.0) || !(sigma > 0.0))
        throw ConfigError("chirp_exp_gauss_closed_form: tau and sigma must be > 0");
    if (tau / sigma < 5.0)
        throw ConfigError("chirp_exp_gauss_closed_form: requires compression tau/sigma >= 5");
    if (grid.z_min != 0.0)
        throw ConfigError("chirp_exp_gauss_closed_form: grid must start at z = 0");

    const auto n = static_cast<std::size_t>(grid.n_points);
    const double pref = std::sqrt(2.0) / sigma;
    const double dz = grid.dz();

    PhaseProfile prof;
    prof.grid = grid;
    prof.phi.resize(n);
    prof.dphi.resize(n);
    prof.d2phi.assign(n, 0.0);
    prof.ref_index = 0;

    // Slope: one-sided half-cell limit at the singular z = 0 endpoint.
    prof.dphi[0] = pref * erf_inv(std::exp(-0.5 * dz / tau));
    for (std::size_t j = 1; j < n; ++j)
        prof.dphi[j] = pref * erf_inv(std::exp(-grid.z(static_cast<std::int64_t>(j)) / tau));

    // First cell in the substituted variable: integral_0^z erf_inv(e^{-u}) du
    // = integral_{y(z)}^{inf} y (2/sqrt(pi)) e^{-y^2} / erf(y) dy.
    auto sub_integrand = [](double y) {
        if (y < 1e-12) return 1.0;
        return y * (2.0 / std::sqrt(pi)) * std::exp(-y * y) / std::erf(y);
    };
    const double y1 = erf_inv(std::exp(-dz / tau));
    prof.phi[0] = 0.0;
    prof.phi[1] = pref * tau * adaptive_simpson(sub_integrand, y1, y1 + 12.0, 1e-13);

    // Remaining cells on the smooth integrand.
    auto integrand = [&](double zeta) { return erf_inv(std::exp(-zeta / tau)); };
    for (std::size_t j = 2; j < n; ++j) {
        const double a = grid.z(static_cast<std::int64_t>(j) - 1);
        const double b = grid.z(static_cast<std::int64_t>(j));
        prof.phi[j] = prof.phi[j - 1] + pref * adaptive_simpson(integrand, a, b, 1e-13);
    }

    for (std::size_t j = 1; j + 1 < n; ++j)
        prof.d2phi[j] = (prof.dphi[j + 1] - prof.dphi[j - 1]) / (2.0 * dz);
    return prof;
}

/// Gaussian-to-Gaussian closed form: phi(z) = sigma z^2 / (2 mu) for an
/// input of amplitude std mu; sigma is the target spectral amplitude std.
inline PhaseProfile chirp_gauss_gauss(double mu, double sigma, const Grid& grid) {
    if (!(mu > 0.0) || !(sigma > 0.0))
        throw ConfigError("chirp_gauss_gauss: mu and sigma must be > 0");
    const auto n = static_cast<std::size_t>(grid.n_points);
    PhaseProfile prof;
    prof.grid = grid;
    prof.phi.resize(n);
    prof.dphi.resize(n);
    prof.d2phi.assign(n, sigma / mu);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double z = grid.z(static_cast<std::int64_t>(j));
        prof.phi[j] = sigma * z * z / (2.0 * mu);
        prof.dphi[j] = sigma * z / mu;
        if (std::abs(z) < best) {
            best = std::abs(z);
            prof.ref_index = static_cast<std::int64_t>(j);
        }
    }
    return prof;
}

/// Dechirp paired with chirp_gauss_gauss: gamma(k) = -mu k^2 / (2 sigma).
inline SpectralPhase dechirp_gauss_gauss(double mu, double sigma, const Grid& grid) {
    SpectralPhase sp;
    sp.grid = grid;
    sp.gamma.resize(static_cast<std::size_t>(grid.n_points));
    for (std::int64_t m = 0; m < grid.n_points; ++m)
        sp.gamma[static_cast<std::size_t>(m)] = -mu * sq(grid.k(m)) / (2.0 * sigma);
    return sp;
}

} // namespace qwc
