#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qwc/chirp.hpp"
#include "qwc/errors.hpp"
#include "qwc/parallel.hpp"
#include "qwc/perturb.hpp"
#include "qwc/photon_stats.hpp"
#include "qwc/propagate.hpp"
#include "qwc/waveform.hpp"

namespace qwc {

/// Overlap fidelity of the transferred state against the ideal
/// dispersion-free output -e^{-i phi} A: with O the mode overlap,
/// F = |sum_n |c_n|^2 O^n| (single photon: |O|). Evaluated before the
/// output shaper, which cannot change it.
inline double overlap_fidelity(const ComplexWaveform& input, const PhaseProfile& chirp,
                               const ComplexWaveform& a2_final, const PhotonStatistics& stats) {
    if (!input.normalized)
        throw ConfigError("overlap_fidelity: input must be normalized");
    if (!(input.grid == a2_final.grid) || !(input.grid == chirp.grid))
        throw ConfigError("overlap_fidelity: grids differ");

    cplx o = 0.0;
    for (std::size_t j = 0; j < input.samples.size(); ++j) {
        const double ph = -chirp.phi[j];
        const cplx ideal = -cplx(std::cos(ph), std::sin(ph)) * input.samples[j];
        o += std::conj(ideal) * a2_final.samples[j];
    }
    o *= input.grid.dz();

    cplx f = 0.0;
    cplx opow = 1.0;
    for (std::size_t n = 0; n < stats.coefficients.size(); ++n) {
        f += std::norm(stats.coefficients[n]) * opow;
        opow *= o;
    }
    return std::abs(f);
}

/// Fidelity of an entangled input: the eigenvalue-weighted average of the
/// pure-state fidelities.
inline double entangled_fidelity(const std::vector<double>& weights,
                                 const std::vector<double>& pure_fidelities) {
    if (weights.size() != pure_fidelities.size())
        throw ConfigError("entangled_fidelity: weights and fidelities differ in length");
    double wsum = 0.0, f = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        wsum += weights[j];
        f += weights[j] * pure_fidelities[j];
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ConfigError("entangled_fidelity: weights must be normalized");
    return f;
}

struct SweepRow {
    double u = 0.0;
    double error_sim = std::numeric_limits<double>::quiet_NaN();
    double error_pert = std::numeric_limits<double>::quiet_NaN();
    double compression = 0.0;
    std::int64_t n_points = 0;
    std::int64_t n_steps = 0;
    bool ok = false;
    std::string message;
};

struct FitResult {
    double u_err_fit = 0.0;
    double residual = 0.0;  // RMS of relative deviations from the fitted law
};

namespace detail {

// Fixed-slope log-log least squares on pre-filtered points; with a single
// point it degenerates to the direct solution u_err = u / sqrt(error).
inline FitResult fit_u_err_core(const std::vector<double>& us, const std::vector<double>& es) {
    double mean = 0.0;
    for (std::size_t j = 0; j < us.size(); ++j)
        mean += std::log(us[j]) - 0.5 * std::log(es[j]);
    mean /= static_cast<double>(us.size());

    FitResult fit;
    fit.u_err_fit = std::exp(mean);
    double rss = 0.0;
    for (std::size_t j = 0; j < us.size(); ++j) {
        const double model = sq(us[j] / fit.u_err_fit);
        rss += sq((es[j] - model) / model);
    }
    fit.residual = std::sqrt(rss / static_cast<double>(us.size()));
    return fit;
}

inline void usable_points(const std::vector<SweepRow>& rows, std::vector<double>& us,
                          std::vector<double>& es) {
    for (const auto& r : rows) {
        if (!(r.u > 0.0) || !std::isfinite(r.error_sim) || !(r.error_sim > 0.0)) continue;
        us.push_back(r.u);
        es.push_back(r.error_sim);
    }
}

} // namespace detail

/// Least-squares fit of error = (u / u_err)^2 in log-log space with the
/// slope fixed at 2 (only the intercept is free). Rows with non-positive or
/// non-finite simulated error are excluded; fewer than three usable rows
/// with distinct u is an error.
inline FitResult fit_u_err(const std::vector<SweepRow>& rows) {
    std::vector<double> us, es;
    detail::usable_points(rows, us, es);
    std::vector<double> distinct(us);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        throw FitError("fit_u_err: need at least 3 usable rows with distinct u > 0");
    return detail::fit_u_err_core(us, es);
}

/// One conversion scenario: single-sided exponential input of decay tau and
/// rise time rise*tau mapped to a Gaussian target at the given compression
/// ratio tau/sigma, swept over the dimensionless GVM u at fixed u_e/u.
struct SweepConfig {
    double tau = 1.0;
    double rise = 0.02;          // in units of tau
    double compression = 100.0;  // tau / sigma
    double ue_over_u = -2.0 / 3.0;
    std::vector<double> u_values;
    double delta_scale = 1.0;    // Delta = scale * Delta_opt
    double omega = pi / 2.0;
    double z_min = -2.0;
    double z_max = 18.0;
    std::int64_t n_points = 0;   // 0: automatic
    std::int64_t n_steps = 0;    // 0: automatic
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
    PhotonStatistics photon = fock_state(1);
    int jobs = 1;
};

/// Resolution policy: grid fine enough to resolve the target width and the
/// chirped bandwidth with a wide aliasing margin.
inline std::int64_t auto_n_points(double compression) {
    return std::max<std::int64_t>(4096,
                                  next_power_of_two(static_cast<std::int64_t>(64.0 * compression)));
}

inline std::int64_t auto_n_steps(double compression) {
    return compression > 100.0 ? 2048 : 1024;
}

/// Reference cases: conversion in periodically poled lithium niobate with
/// u_e/u = -2/3 (case 1) and the type-II matched point u_e/u = -1 (case 2).
inline SweepConfig case1_config() { return SweepConfig{}; }

inline SweepConfig case2_config() {
    SweepConfig cfg;
    cfg.ue_over_u = -1.0;
    return cfg;
}

namespace detail {

struct SweepScene {
    Grid grid;
    ComplexWaveform input;
    PhaseProfile chirp;
};

inline SweepScene make_scene(const SweepConfig& cfg) {
    SweepScene sc;
    const std::int64_t n = cfg.n_points > 0 ? cfg.n_points : auto_n_points(cfg.compression);
    sc.grid = build_grid(n, cfg.z_min, cfg.z_max);
    sc.input = build_waveform(WaveformSpec::exponential(cfg.tau, cfg.rise * cfg.tau), sc.grid);
    const double sigma_k = std::sqrt(2.0) * cfg.compression / cfg.tau;
    sc.chirp = design_chirp_cdf(sc.input, sigma_k, ChirpBoundary::full_spectrum());
    return sc;
}

} // namespace detail

/// Simulated and perturbative conversion error for each u in the config,
/// with Delta = delta_scale * Delta_opt. Rows keep config order; failed
/// propagations are recorded per row rather than aborting the sweep.
inline std::vector<SweepRow> sweep_error_vs_u(const SweepConfig& cfg) {
    if (cfg.u_values.empty()) return {};
    const auto scene = detail::make_scene(cfg);
    const std::int64_t n_steps = cfg.n_steps > 0 ? cfg.n_steps : auto_n_steps(cfg.compression);

    std::vector<SweepRow> rows(cfg.u_values.size());
    parallel_for(cfg.jobs, static_cast<std::int64_t>(rows.size()), [&](std::int64_t i) {
        SweepRow& row = rows[static_cast<std::size_t>(i)];
        row.u = cfg.u_values[static_cast<std::size_t>(i)];
        row.compression = cfg.compression;
        row.n_points = scene.grid.n_points;
        row.n_steps = n_steps;

        DispersionParams disp{.u = row.u, .beta1 = cfg.beta1, .beta2 = cfg.beta2};
        EscortConfig ecfg;
        ecfg.omega = cfg.omega;
        ecfg.u_e = cfg.ue_over_u * row.u;
        ecfg.beta3 = cfg.beta3;
        ecfg.chirp = scene.chirp;
        ecfg.compensation = optimal_compensation(scene.chirp, disp, ecfg);
        for (double& v : ecfg.compensation) v *= cfg.delta_scale;

        row.error_pert = perturbative_error(scene.input, scene.chirp, ecfg.compensation, disp,
                                            ecfg, cfg.photon)
                             .error;
        try {
            const auto res = run_transfer(scene.input, ecfg, disp, n_steps);
            row.error_sim =
                1.0 - overlap_fidelity(scene.input, scene.chirp, res.a2_final, cfg.photon);
            row.ok = true;
        } catch (const Error& e) {
            row.ok = false;
            row.message = e.what();
        }
    });
    return rows;
}

struct CompressionRow {
    double compression = 0.0;
    double u_err_fit = 0.0;
    double u_err_pert = 0.0;
    double fit_residual = 0.0;
    std::vector<SweepRow> rows;
};

/// For each compression ratio: pick u values as fractions of the
/// perturbative u_err, run the u sweep, and fit the quadratic error law.
inline std::vector<CompressionRow> sweep_u_err_vs_compression(
    const SweepConfig& base, const std::vector<double>& compressions,
    const std::vector<double>& u_fractions = {0.02, 0.04, 0.06, 0.08}) {
    std::vector<CompressionRow> out;
    out.reserve(compressions.size());
    for (const double ratio : compressions) {
        SweepConfig cfg = base;
        cfg.compression = ratio;
        cfg.n_points = 0;
        cfg.n_steps = 0;

        const auto scene = detail::make_scene(cfg);
        CompressionRow row;
        row.compression = ratio;
        row.u_err_pert =
            perturbative_u_err(scene.input, scene.chirp, cfg.ue_over_u, cfg.photon);

        cfg.u_values.clear();
        for (const double f : u_fractions) cfg.u_values.push_back(f * row.u_err_pert);
        row.rows = sweep_error_vs_u(cfg);

        std::vector<double> us, es;
        detail::usable_points(row.rows, us, es);
        if (us.empty()) throw FitError("sweep_u_err_vs_compression: no usable rows at ratio " +
                                       std::to_string(ratio));
        const auto fit = detail::fit_u_err_core(us, es);
        row.u_err_fit = fit.u_err_fit;
        row.fit_residual = fit.residual;
        out.push_back(std::move(row));
    }
    return out;
}

/// Half-width K of the band holding `fraction` of the chirped input's
/// spectral power.
inline double chirped_bandwidth(const ComplexWaveform& input, const PhaseProfile& chirp,
                                double fraction = 0.999) {
    ComplexWaveform chirped = input;
    for (std::size_t j = 0; j < chirped.samples.size(); ++j) {
        const double ph = chirp.phi[j];
        chirped.samples[j] *= cplx(std::cos(ph), std::sin(ph));
    }
    const auto spec = to_spectrum(chirped);
    const Grid& g = input.grid;
    std::vector<double> power(static_cast<std::size_t>(g.n_points / 2) + 1, 0.0);
    double total = 0.0;
    for (std::int64_t m = 0; m < g.n_points; ++m) {
        const double p = std::norm(spec.samples[static_cast<std::size_t>(m)]);
        const auto bin = static_cast<std::size_t>(std::abs(g.freq_index(m)));
        power[std::min(bin, power.size() - 1)] += p;
        total += p;
    }
    double acc = 0.0;
    for (std::size_t bin = 0; bin < power.size(); ++bin) {
        acc += power[bin];
        if (acc >= fraction * total) return static_cast<double>(bin) * g.dk();
    }
    return g.k_max();
}

/// GVD magnitude for the insignificance check: the dispersion phase over the
/// full chirped bandwidth and one transfer time is 0.1 rad, i.e.
/// beta = 0.2 / (k_bw^2 T).
inline double default_gvd_beta(const ComplexWaveform& input, const PhaseProfile& chirp,
                               double omega) {
    const double kbw = chirped_bandwidth(input, chirp);
    const double T = pi / (2.0 * omega);
    return 0.2 / (kbw * kbw * T);
}

} // namespace qwc
