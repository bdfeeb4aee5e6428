#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qwc/chirp.hpp"
#include "qwc/errors.hpp"
#include "qwc/fft.hpp"
#include "qwc/waveform.hpp"

namespace qwc {

/// Classical escort pulse: coupling rate, dimensionless group-velocity
/// mismatch u_e (v_e = u_e * v0 with v0 = omega L / (2 pi), L = 1), escort
/// GVD, the designed chirp and an optional compensation phase on the same
/// grid.
struct EscortConfig {
    double omega = pi / 2.0;
    double u_e = 0.0;
    double beta3 = 0.0;
    PhaseProfile chirp;
    std::vector<double> compensation;  // Delta(z); empty means zero

    /// Couple the escort-GVD amplitude correction (the imaginary phi''
    /// part of the dispersed escort phase) into the rotation rate. Off by
    /// default; it is an O(eps^2) amplitude effect kept for sensitivity
    /// studies.
    bool escort_gvd_amplitude = false;

    double transfer_time() const { return pi / (2.0 * omega); }
    double v0() const { return omega / (2.0 * pi); }
    double v_e() const { return u_e * v0(); }

    void validate() const {
        if (!(omega > 0.0)) throw ConfigError("EscortConfig.omega: must be > 0");
        if (!compensation.empty() && compensation.size() != chirp.phi.size())
            throw ConfigError("EscortConfig.compensation: must share the chirp grid");
    }
};

/// Evaluates the dispersed escort phase chi(z, t) = phi(z - v_e t) +
/// Delta(z - v_e t) - (beta3 t / 2) phi'(z)^2. The translation is
/// band-limited on the periodic grid, using a spectrum of phi + Delta
/// cached at construction.
class EscortPhaseEvaluator {
public:
    explicit EscortPhaseEvaluator(const EscortConfig& cfg) : cfg_(&cfg), grid_(cfg.chirp.grid) {
        cfg.validate();
        const auto n = static_cast<std::size_t>(grid_.n_points);
        combined_.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            combined_[j] = cfg.chirp.phi[j] +
                           (cfg.compensation.empty() ? 0.0 : cfg.compensation[j]);
        if (cfg.v_e() != 0.0) {
            std::vector<cplx> tmp(combined_.begin(), combined_.end());
            dft_forward(tmp, spectrum_);
        }
        if (cfg.beta3 != 0.0) {
            slope_sq_.resize(n);
            for (std::size_t j = 0; j < n; ++j) slope_sq_[j] = sq(cfg.chirp.dphi[j]);
        }
    }

    /// chi(., t) into out (resized as needed).
    void eval(double t, std::vector<double>& out) const {
        const auto n = static_cast<std::size_t>(grid_.n_points);
        out.resize(n);
        const double shift = cfg_->v_e() * t;
        if (shift == 0.0) {
            std::copy(combined_.begin(), combined_.end(), out.begin());
        } else {
            std::vector<cplx> spec(spectrum_), res;
            for (std::int64_t m = 0; m < grid_.n_points; ++m) {
                const double ph = -grid_.k(m) * shift;
                spec[static_cast<std::size_t>(m)] *= cplx(std::cos(ph), std::sin(ph));
            }
            dft_backward(spec, res);
            const double scale = 1.0 / static_cast<double>(grid_.n_points);
            for (std::size_t j = 0; j < n; ++j) out[j] = res[j].real() * scale;
        }
        if (cfg_->beta3 != 0.0) {
            const double c = 0.5 * cfg_->beta3 * t;
            for (std::size_t j = 0; j < n; ++j) out[j] -= c * slope_sq_[j];
        }
    }

    /// Pointwise coupling-rate factor exp(-beta3 t phi'' / 2); identity
    /// unless the escort GVD amplitude correction is enabled.
    void coupling_factor(double t, std::vector<double>& out) const {
        const auto n = static_cast<std::size_t>(grid_.n_points);
        out.assign(n, 1.0);
        if (!cfg_->escort_gvd_amplitude || cfg_->beta3 == 0.0) return;
        const double c = 0.5 * cfg_->beta3 * t;
        for (std::size_t j = 0; j < n; ++j) out[j] = std::exp(-c * cfg_->chirp.d2phi[j]);
    }

    bool time_dependent() const { return cfg_->v_e() != 0.0 || cfg_->beta3 != 0.0; }

private:
    const EscortConfig* cfg_;
    Grid grid_;
    std::vector<double> combined_;
    std::vector<double> slope_sq_;
    std::vector<cplx> spectrum_;
};

/// Escort phase samples chi(., t) for t in [0, T].
inline std::vector<double> escort_phase(const EscortConfig& cfg, double t) {
    if (t < 0.0 || t > cfg.transfer_time() * (1.0 + 1e-12))
        throw ConfigError("escort_phase: t must lie in [0, T]");
    EscortPhaseEvaluator ev(cfg);
    std::vector<double> chi;
    ev.eval(t, chi);
    return chi;
}

} // namespace qwc
