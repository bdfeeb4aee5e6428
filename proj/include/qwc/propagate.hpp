#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "qwc/escort.hpp"
#include "qwc/errors.hpp"
#include "qwc/fft.hpp"
#include "qwc/waveform.hpp"

namespace qwc {

/// Group-velocity parameters of the quantum modes. u is the dimensionless
/// mismatch, v = u * v0 with v0 = omega L / (2 pi); |u| < 1 is assumed by
/// the perturbative comparisons but not enforced here.
struct DispersionParams {
    double u = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;

    double v(const EscortConfig& cfg) const { return u * cfg.v0(); }
};

struct TransferResult {
    ComplexWaveform a1_final;
    ComplexWaveform a2_final;
    double transfer_time = 0.0;
    double norm_drift = 0.0;
    std::int64_t steps = 0;
};

struct StepControls {
    std::int64_t alias_check_every = 64;
    double alias_threshold = 1e-6;  // max spectral power fraction in the outer band
    double alias_band = 0.1;        // outer fraction of the k grid
    double norm_tolerance = 1e-9;
};

namespace detail {

// Strang-split integrator for the coupled amplitude equations
//   dA1/dt = -v dA1/dz + (i b1/2) d2A1/dz2 + Omega e^{+i chi} A2
//   dA2/dt = +v dA2/dz + (i b2/2) d2A2/dz2 - Omega e^{-i chi} A1
// The linear part acts as spectral multipliers, the coupling as an exact
// pointwise 2x2 rotation with chi frozen at the step midpoint. Every factor
// is unitary, so the total norm is conserved to roundoff.
class Propagator {
public:
    Propagator(const Grid& grid, const EscortConfig& cfg, const DispersionParams& disp,
               const StepControls& controls)
        : grid_(grid), cfg_(&cfg), disp_(disp), controls_(controls), escort_(cfg) {
        if (!(cfg.chirp.grid == grid))
            throw ConfigError("Propagator: chirp and field grids differ");
        v_ = disp.v(cfg);
        linear_active_ = (v_ != 0.0) || (disp.beta1 != 0.0) || (disp.beta2 != 0.0);
        if (!escort_.time_dependent()) escort_.eval(0.0, chi_static_);
    }

    // Spectral multipliers for a linear substep of duration dt.
    void prepare_linear(double dt, std::vector<cplx>& m1, std::vector<cplx>& m2) const {
        const auto n = static_cast<std::size_t>(grid_.n_points);
        m1.resize(n);
        m2.resize(n);
        for (std::int64_t m = 0; m < grid_.n_points; ++m) {
            const double k = grid_.k(m);
            const double p1 = (-v_ * k - 0.5 * disp_.beta1 * k * k) * dt;
            const double p2 = (+v_ * k - 0.5 * disp_.beta2 * k * k) * dt;
            m1[static_cast<std::size_t>(m)] = cplx(std::cos(p1), std::sin(p1));
            m2[static_cast<std::size_t>(m)] = cplx(std::cos(p2), std::sin(p2));
        }
    }

    void linear_step(std::vector<cplx>& a, const std::vector<cplx>& mult, bool tally_alias) {
        dft_forward(a, spec_);
        if (tally_alias) alias_tally(spec_);
        const double scale = 1.0 / static_cast<double>(grid_.n_points);
        for (std::size_t m = 0; m < a.size(); ++m) spec_[m] *= mult[m];
        dft_backward(spec_, a);
        for (cplx& c : a) c *= scale;
    }

    void coupling_step(std::vector<cplx>& a1, std::vector<cplx>& a2, double t_mid, double dt) {
        const std::vector<double>* chi = &chi_static_;
        if (escort_.time_dependent()) {
            escort_.eval(t_mid, chi_buf_);
            chi = &chi_buf_;
        }
        const double theta = cfg_->omega * dt;
        if (cfg_->escort_gvd_amplitude && cfg_->beta3 != 0.0) {
            escort_.coupling_factor(t_mid, gain_buf_);
            for (std::size_t j = 0; j < a1.size(); ++j) {
                const double th = theta * gain_buf_[j];
                rotate(a1[j], a2[j], std::cos(th), std::sin(th), (*chi)[j]);
            }
        } else {
            const double c = std::cos(theta), s = std::sin(theta);
            for (std::size_t j = 0; j < a1.size(); ++j) rotate(a1[j], a2[j], c, s, (*chi)[j]);
        }
    }

    bool linear_active() const { return linear_active_; }

    // The tally accumulates over both modes of a step; the fraction is
    // judged against the combined state power, since a mode that is nearly
    // drained carries no meaningful fraction of its own.
    void alias_tally(const std::vector<cplx>& spec) {
        const std::int64_t n = grid_.n_points;
        const auto cut = static_cast<std::int64_t>((1.0 - controls_.alias_band) *
                                                   static_cast<double>(n / 2));
        for (std::int64_t m = 0; m < n; ++m) {
            const double p = std::norm(spec[static_cast<std::size_t>(m)]);
            alias_total_ += p;
            if (std::abs(grid_.freq_index(m)) >= cut) alias_outer_ += p;
        }
    }

    void alias_evaluate() {
        const double outer = alias_outer_, total = alias_total_;
        alias_outer_ = alias_total_ = 0.0;
        if (total > 0.0 && outer > controls_.alias_threshold * total) {
            std::ostringstream msg;
            msg << "spectral aliasing: outer " << controls_.alias_band * 100.0
                << "% of the k grid holds " << outer / total
                << " of the combined power (threshold " << controls_.alias_threshold << ")";
            throw SimulationError(msg.str());
        }
    }

private:
    static void rotate(cplx& x1, cplx& x2, double c, double s, double chi) {
        const cplx e(std::cos(chi), std::sin(chi));
        const cplx n1 = c * x1 + s * e * x2;
        const cplx n2 = -s * std::conj(e) * x1 + c * x2;
        x1 = n1;
        x2 = n2;
    }

    Grid grid_;
    const EscortConfig* cfg_;
    DispersionParams disp_;
    StepControls controls_;
    EscortPhaseEvaluator escort_;
    double v_ = 0.0;
    bool linear_active_ = false;
    double alias_outer_ = 0.0, alias_total_ = 0.0;
    std::vector<double> chi_static_, chi_buf_, gain_buf_;
    std::vector<cplx> spec_;
};

} // namespace detail

/// One Strang split step (half linear, midpoint coupling, half linear).
inline void propagate_step(ComplexWaveform& a1, ComplexWaveform& a2, const EscortConfig& cfg,
                           const DispersionParams& disp, double t, double dt,
                           const StepControls& controls = {}) {
    if (!(dt > 0.0) || dt > cfg.transfer_time() / 256.0 * (1.0 + 1e-12))
        throw ConfigError("propagate_step: dt must be positive and <= T/256");
    if (!(a1.grid == a2.grid)) throw ConfigError("propagate_step: field grids differ");
    detail::Propagator prop(a1.grid, cfg, disp, controls);
    std::vector<cplx> m1, m2;
    if (prop.linear_active()) {
        prop.prepare_linear(0.5 * dt, m1, m2);
        prop.linear_step(a1.samples, m1, true);
        prop.linear_step(a2.samples, m2, true);
        prop.alias_evaluate();
    }
    prop.coupling_step(a1.samples, a2.samples, t + 0.5 * dt, dt);
    if (prop.linear_active()) {
        prop.linear_step(a1.samples, m1, false);
        prop.linear_step(a2.samples, m2, false);
    }
}

/// Integrate the state transfer from t = 0 to t_final (default the transfer
/// time T = pi / (2 Omega)) with mode 2 initially empty. Interior linear
/// half-steps are merged pairwise; the composition is identical to repeated
/// propagate_step calls.
inline TransferResult run_transfer(const ComplexWaveform& input, const EscortConfig& cfg,
                                   const DispersionParams& disp, std::int64_t n_steps,
                                   double t_final = -1.0, const StepControls& controls = {}) {
    cfg.validate();
    if (!input.normalized) throw ConfigError("run_transfer: input must be normalized");
    const double T = cfg.transfer_time();
    if (t_final < 0.0) t_final = T;
    if (n_steps < 1) throw ConfigError("run_transfer: n_steps must be >= 1");
    const double dt = t_final / static_cast<double>(n_steps);
    if (dt > T / 256.0 * (1.0 + 1e-12))
        throw ConfigError("run_transfer: step size must satisfy dt <= T/256 (n_steps >= 256 "
                          "over one transfer)");

    detail::Propagator prop(input.grid, cfg, disp, controls);
    TransferResult res;
    res.a1_final = input;
    res.a2_final.grid = input.grid;
    res.a2_final.samples.assign(input.samples.size(), cplx(0.0, 0.0));
    res.transfer_time = T;
    res.steps = n_steps;

    auto& a1 = res.a1_final.samples;
    auto& a2 = res.a2_final.samples;

    if (prop.linear_active()) {
        std::vector<cplx> h1, h2, f1, f2;
        prop.prepare_linear(0.5 * dt, h1, h2);
        prop.prepare_linear(dt, f1, f2);
        prop.linear_step(a1, h1, true);
        prop.linear_step(a2, h2, true);
        prop.alias_evaluate();
        for (std::int64_t s = 0; s < n_steps; ++s) {
            prop.coupling_step(a1, a2, (static_cast<double>(s) + 0.5) * dt, dt);
            const bool last = (s == n_steps - 1);
            const bool check = (s % controls.alias_check_every == 0) || last;
            prop.linear_step(a1, last ? h1 : f1, check);
            prop.linear_step(a2, last ? h2 : f2, check);
            if (check) prop.alias_evaluate();
        }
    } else {
        for (std::int64_t s = 0; s < n_steps; ++s)
            prop.coupling_step(a1, a2, (static_cast<double>(s) + 0.5) * dt, dt);
    }

    res.norm_drift = std::abs(res.a1_final.norm() + res.a2_final.norm() - 1.0);
    if (res.norm_drift > controls.norm_tolerance) {
        std::ostringstream msg;
        msg << "norm drift " << res.norm_drift << " exceeds tolerance "
            << controls.norm_tolerance << " after " << n_steps << " steps";
        throw SimulationError(msg.str());
    }
    res.a1_final.normalized = false;
    res.a2_final.normalized = false;
    return res;
}

} // namespace qwc
