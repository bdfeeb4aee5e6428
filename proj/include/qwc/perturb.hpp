#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qwc/chirp.hpp"
#include "qwc/errors.hpp"
#include "qwc/escort.hpp"
#include "qwc/photon_stats.hpp"
#include "qwc/propagate.hpp"
#include "qwc/waveform.hpp"

namespace qwc {

/// Second-order perturbative fidelity report. fidelity = |1 + i theta +
/// re_u12| truncated to second order; error = 1 - fidelity. A negative
/// error (or one above 0.1) flags breakdown of the expansion.
struct ErrorReport {
    double theta = 0.0;    // Im <U_11>
    double re_u12 = 0.0;   // Re <U_12>
    double fidelity = 1.0;
    double error = 0.0;
    std::optional<double> u_err;
    bool validity_warning = false;
    std::string warning;
};

/// Compensation phase that cancels the leading GVM error:
/// Delta_opt(z) = (1/8) (u_e - u) phi'(z) L = pi (v_e - v) phi'(z) / (4 Omega).
/// Both parameterizations are evaluated and must agree to 1e-12.
inline std::vector<double> optimal_compensation(const PhaseProfile& chirp,
                                                const DispersionParams& disp,
                                                const EscortConfig& cfg) {
    const double cu = 0.125 * (cfg.u_e - disp.u);
    const double cv = pi * (cfg.v_e() - disp.v(cfg)) / (4.0 * cfg.omega);
    std::vector<double> delta(chirp.dphi.size());
    for (std::size_t j = 0; j < delta.size(); ++j) {
        delta[j] = cu * chirp.dphi[j];
        const double alt = cv * chirp.dphi[j];
        if (std::abs(delta[j] - alt) > 1e-12 * (1.0 + std::abs(delta[j])))
            throw Error("optimal_compensation: u- and v-parameterizations disagree");
    }
    return delta;
}

/// h(z) = 4 Omega Delta(z) + pi (v - v_e) phi'(z); the compensation is
/// optimal where h vanishes identically.
inline std::vector<double> h_profile(const std::vector<double>& delta, const PhaseProfile& chirp,
                                     const DispersionParams& disp, const EscortConfig& cfg) {
    if (!delta.empty() && delta.size() != chirp.dphi.size())
        throw ConfigError("h_profile: delta must share the chirp grid");
    const double c = pi * (disp.v(cfg) - cfg.v_e());
    std::vector<double> h(chirp.dphi.size());
    for (std::size_t j = 0; j < h.size(); ++j)
        h[j] = (delta.empty() ? 0.0 : 4.0 * cfg.omega * delta[j]) + c * chirp.dphi[j];
    return h;
}

/// Internal diagnostics g+-(z) = 4 pi Omega Delta - (pi^2 +- 8) v_e phi'.
inline std::vector<double> g_plus_profile(const std::vector<double>& delta,
                                          const PhaseProfile& chirp, const EscortConfig& cfg) {
    std::vector<double> g(chirp.dphi.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        g[j] = (delta.empty() ? 0.0 : 4.0 * pi * cfg.omega * delta[j]) -
               (pi * pi + 8.0) * cfg.v_e() * chirp.dphi[j];
    return g;
}

inline std::vector<double> g_minus_profile(const std::vector<double>& delta,
                                           const PhaseProfile& chirp, const EscortConfig& cfg) {
    std::vector<double> g(chirp.dphi.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        g[j] = (delta.empty() ? 0.0 : 4.0 * pi * cfg.omega * delta[j]) -
               (pi * pi - 8.0) * cfg.v_e() * chirp.dphi[j];
    return g;
}

namespace detail {

// integral |2 A' - i (1 + rho) phi' A|^2 dz with rho = u_e / u; the A'
// derivative is spectral.
inline double shape_integral(const ComplexWaveform& input, const PhaseProfile& chirp,
                             double rho) {
    const auto d = spectral_derivative(input);
    double s = 0.0;
    for (std::size_t j = 0; j < input.samples.size(); ++j) {
        const cplx v = 2.0 * d.samples[j] -
                       cplx(0.0, 1.0) * (1.0 + rho) * chirp.dphi[j] * input.samples[j];
        s += std::norm(v);
    }
    return s * input.grid.dz();
}

} // namespace detail

/// Dimensionless-GVM error scale: 1 - F = (u / u_err)^2 at optimal
/// compensation. Unbounded (infinity) when the shape integral vanishes.
inline double perturbative_u_err(const ComplexWaveform& input, const PhaseProfile& chirp,
                                 double ue_over_u, const PhotonStatistics& stats) {
    if (!input.normalized) throw ConfigError("perturbative_u_err: input must be normalized");
    const double I = detail::shape_integral(input, chirp, ue_over_u);
    const double c = stats.n_mean * I / (32.0 * pi * pi);
    if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(c);
}

/// Optimally compensated error in dimensionless-GVM form:
/// 1 - F = <n> u^2 L^2 / (32 pi^2) * integral |2A' - i(1 + u_e/u) phi' A|^2.
inline double optimal_error(const ComplexWaveform& input, const PhaseProfile& chirp, double u,
                            double ue_over_u, const PhotonStatistics& stats) {
    return stats.n_mean * u * u / (32.0 * pi * pi) *
           detail::shape_integral(input, chirp, ue_over_u);
}

/// Full second-order error report for arbitrary compensation:
///   theta    = <n> / (4 Omega) * integral h |A|^2
///   Re<U_12> = (1/32 Omega^2) { -<n(n-1)> (integral h |A|^2)^2
///              + <n> integral h^2 |A|^2
///              - 4 <n> integral |2 v A' - i (v + v_e) phi' A|^2 }
/// composed as F = 1 + Re<U_12> + theta^2/2. Errors outside [0, 0.1] set the
/// validity warning (the expansion's own structure permits F > 1 at large h,
/// signalling breakdown rather than physical gain).
inline ErrorReport perturbative_error(const ComplexWaveform& input, const PhaseProfile& chirp,
                                      const std::vector<double>& delta,
                                      const DispersionParams& disp, const EscortConfig& cfg,
                                      const PhotonStatistics& stats) {
    if (!input.normalized) throw ConfigError("perturbative_error: input must be normalized");
    if (!(input.grid == chirp.grid))
        throw ConfigError("perturbative_error: input and chirp grids differ");

    const double dz = input.grid.dz();
    const double omega = cfg.omega;
    const double v = disp.v(cfg), ve = cfg.v_e();

    const auto h = h_profile(delta, chirp, disp, cfg);
    double ih1 = 0.0, ih2 = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double p = std::norm(input.samples[j]);
        ih1 += h[j] * p;
        ih2 += h[j] * h[j] * p;
    }
    ih1 *= dz;
    ih2 *= dz;

    const auto d = spectral_derivative(input);
    double i3 = 0.0;
    for (std::size_t j = 0; j < input.samples.size(); ++j) {
        const cplx w = 2.0 * v * d.samples[j] -
                       cplx(0.0, 1.0) * (v + ve) * chirp.dphi[j] * input.samples[j];
        i3 += std::norm(w);
    }
    i3 *= dz;

    ErrorReport rep;
    rep.theta = stats.n_mean * ih1 / (4.0 * omega);
    rep.re_u12 = (-stats.n_pair * ih1 * ih1 + stats.n_mean * ih2 - 4.0 * stats.n_mean * i3) /
                 (32.0 * omega * omega);
    rep.fidelity = 1.0 + rep.re_u12 + 0.5 * sq(rep.theta);
    rep.error = -(rep.re_u12 + 0.5 * sq(rep.theta));
    if (disp.u != 0.0)
        rep.u_err = perturbative_u_err(input, chirp, cfg.u_e / disp.u, stats);
    if (rep.error < 0.0 || rep.error > 0.1) {
        rep.validity_warning = true;
        rep.warning = rep.error < 0.0
                          ? "perturbative error is negative: expansion breakdown (large h)"
                          : "perturbative error exceeds 0.1: outside the u_err regime";
    }
    return rep;
}

} // namespace qwc
