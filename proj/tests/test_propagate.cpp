#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "qwc/chirp.hpp"
#include "qwc/escort.hpp"
#include "qwc/propagate.hpp"
#include "qwc/waveform.hpp"

using namespace qwc;

namespace {

PhaseProfile harmonic_profile(const Grid& g) {
    // Band-limited periodic phase, analytically translatable.
    PhaseProfile p;
    p.grid = g;
    const auto n = static_cast<std::size_t>(g.n_points);
    p.phi.resize(n);
    p.dphi.resize(n);
    p.d2phi.resize(n);
    const double L = g.length();
    for (std::int64_t j = 0; j < g.n_points; ++j) {
        const double w1 = 2.0 * pi / L, w3 = 6.0 * pi / L;
        const double z = g.z(j);
        p.phi[static_cast<std::size_t>(j)] = 2.0 * std::sin(w1 * z) + 0.5 * std::cos(w3 * z);
        p.dphi[static_cast<std::size_t>(j)] = 2.0 * w1 * std::cos(w1 * z) - 0.5 * w3 * std::sin(w3 * z);
        p.d2phi[static_cast<std::size_t>(j)] = -2.0 * w1 * w1 * std::sin(w1 * z) - 0.5 * w3 * w3 * std::cos(w3 * z);
    }
    return p;
}

PhaseProfile flat_profile(const Grid& g) {
    PhaseProfile p;
    p.grid = g;
    p.phi.assign(static_cast<std::size_t>(g.n_points), 0.0);
    p.dphi = p.phi;
    p.d2phi = p.phi;
    return p;
}

double ideal_overlap_fidelity(const ComplexWaveform& input, const PhaseProfile& chirp,
                              const ComplexWaveform& a2) {
    cplx o = 0.0;
    for (std::size_t j = 0; j < input.samples.size(); ++j) {
        const double ph = chirp.phi[j];
        const cplx ideal = -cplx(std::cos(-ph), std::sin(-ph)) * input.samples[j];
        o += std::conj(ideal) * a2.samples[j];
    }
    return std::abs(o * input.grid.dz());
}

} // namespace

TEST_CASE("escort phase at t = 0 and without escort motion") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    EscortConfig cfg;
    cfg.chirp = harmonic_profile(g);
    cfg.compensation.assign(static_cast<std::size_t>(g.n_points), 0.25);

    const auto chi0 = escort_phase(cfg, 0.0);
    for (std::size_t j = 0; j < chi0.size(); ++j)
        REQUIRE(chi0[j] == cfg.chirp.phi[j] + 0.25);

    cfg.u_e = 0.0;
    cfg.beta3 = 0.0;
    const auto chiT = escort_phase(cfg, cfg.transfer_time());
    for (std::size_t j = 0; j < chi0.size(); ++j) REQUIRE(chiT[j] == chi0[j]);
}

TEST_CASE("escort phase translation matches the analytic profile") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    EscortConfig cfg;
    cfg.chirp = harmonic_profile(g);
    cfg.u_e = 0.8;  // v_e = 0.2, shift = 0.1 at t = 0.5 (non-integer cells)

    const double t = 0.5;
    const double shift = cfg.v_e() * t;
    const auto chi = escort_phase(cfg, t);
    const double L = g.length();
    for (std::int64_t j = 0; j < g.n_points; ++j) {
        const double z = g.z(j) - shift;
        const double expect = 2.0 * std::sin(2.0 * pi * z / L) + 0.5 * std::cos(6.0 * pi * z / L);
        REQUIRE(chi[static_cast<std::size_t>(j)] == Approx(expect).margin(1e-12));
    }
}

TEST_CASE("escort phase translation of a designed chirp by whole cells") {
    const Grid g = build_grid(2048, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = design_chirp_cdf(input, std::sqrt(2.0) * 25.0, ChirpBoundary::full_spectrum());

    const std::int64_t cells = 3;
    const double t = 0.7;
    cfg.u_e = cells * g.dz() / (t * cfg.v0());
    const auto chi = escort_phase(cfg, t);
    const auto& phi = cfg.chirp.phi;
    const auto n = static_cast<std::size_t>(g.n_points);
    for (std::size_t j = 0; j < n; ++j)
        REQUIRE(chi[j] == Approx(phi[(j + n - cells) % n]).margin(1e-8));
}

TEST_CASE("escort GVD term subtracts the squared slope") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    EscortConfig cfg;
    cfg.chirp = harmonic_profile(g);
    cfg.beta3 = 0.02;

    const double t = 0.5;
    const auto chi = escort_phase(cfg, t);
    for (std::size_t j = 0; j < chi.size(); ++j) {
        const double expect = cfg.chirp.phi[j] - 0.5 * cfg.beta3 * t * sq(cfg.chirp.dphi[j]);
        REQUIRE(chi[j] == Approx(expect).margin(1e-12));
    }
}

TEST_CASE("single step reproduces the bare rotation") {
    const Grid g = build_grid(512, -2.0, 18.0);
    auto a1 = build_waveform(WaveformSpec::gaussian(1.0, 5.0), g);
    ComplexWaveform a2;
    a2.grid = g;
    a2.samples.assign(a1.samples.size(), cplx(0.0, 0.0));
    const auto a0 = a1.samples;

    EscortConfig cfg;
    cfg.chirp = flat_profile(g);
    const DispersionParams disp;  // u = 0, beta = 0
    const double dt = cfg.transfer_time() / 512.0;
    propagate_step(a1, a2, cfg, disp, 0.0, dt);

    const double c = std::cos(cfg.omega * dt), s = std::sin(cfg.omega * dt);
    for (std::size_t j = 0; j < a0.size(); ++j) {
        REQUIRE(std::abs(a1.samples[j] - c * a0[j]) < 1e-14);
        REQUIRE(std::abs(a2.samples[j] + s * a0[j]) < 1e-14);
    }
}

TEST_CASE("single step with a chirp imprints the escort phase") {
    const Grid g = build_grid(512, -2.0, 18.0);
    auto a1 = build_waveform(WaveformSpec::gaussian(1.0, 5.0), g);
    ComplexWaveform a2;
    a2.grid = g;
    a2.samples.assign(a1.samples.size(), cplx(0.0, 0.0));
    const auto a0 = a1.samples;

    EscortConfig cfg;
    cfg.chirp = harmonic_profile(g);
    const DispersionParams disp;
    const double dt = cfg.transfer_time() / 300.0;
    propagate_step(a1, a2, cfg, disp, 0.0, dt);

    const double s = std::sin(cfg.omega * dt);
    for (std::size_t j = 0; j < a0.size(); ++j) {
        const double ph = -cfg.chirp.phi[j];
        REQUIRE(std::abs(a2.samples[j] + s * cplx(std::cos(ph), std::sin(ph)) * a0[j]) < 1e-14);
    }
}

TEST_CASE("decoupled transport advects the envelopes in opposite directions") {
    const Grid g = build_grid(1024, -8.0, 8.0);
    auto a1 = build_waveform(WaveformSpec::gaussian(0.5, -2.0), g);
    auto a2w = build_waveform(WaveformSpec::gaussian(0.5, 2.0), g);
    ComplexWaveform a2 = a2w;
    const auto a1_0 = a1.samples;
    const auto a2_0 = a2.samples;

    EscortConfig cfg;
    cfg.omega = 1e-14;  // coupling negligible over one step
    cfg.chirp = flat_profile(g);
    DispersionParams disp;
    const double dt = 1.0;
    const std::int64_t cells = 4;
    disp.u = cells * g.dz() / (dt * cfg.v0());  // v dt = 4 cells
    propagate_step(a1, a2, cfg, disp, 0.0, dt);

    const auto n = static_cast<std::size_t>(g.n_points);
    for (std::size_t j = 0; j < n; ++j) {
        REQUIRE(std::abs(a1.samples[j] - a1_0[(j + n - cells) % n]) < 1e-11);
        REQUIRE(std::abs(a2.samples[j] - a2_0[(j + cells) % n]) < 1e-11);
    }
}

TEST_CASE("norm is conserved to roundoff per step") {
    // Smooth input: its spectrum stays far from the grid edge, so the
    // aliasing guard is quiet and the unitarity check is clean.
    const Grid g = build_grid(2048, -2.0, 18.0);
    auto a1 = build_waveform(WaveformSpec::gaussian(0.5, 4.0), g);
    ComplexWaveform a2;
    a2.grid = g;
    a2.samples.assign(a1.samples.size(), cplx(0.0, 0.0));

    EscortConfig cfg;
    cfg.chirp = design_chirp_cdf(a1, 40.0, ChirpBoundary::full_spectrum());
    cfg.u_e = -0.02;
    cfg.beta3 = 1e-6;
    DispersionParams disp{.u = 0.03, .beta1 = 1e-6, .beta2 = 2e-6};

    const double dt = cfg.transfer_time() / 1024.0;
    propagate_step(a1, a2, cfg, disp, 0.0, dt);
    propagate_step(a1, a2, cfg, disp, dt, dt);
    CHECK(std::abs(a1.norm() + a2.norm() - 1.0) < 1e-12);
}

TEST_CASE("ideal transfer is exact for any chirp") {
    const Grid g = build_grid(2048, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = design_chirp_cdf(input, std::sqrt(2.0) * 25.0, ChirpBoundary::full_spectrum());
    const DispersionParams disp;

    const auto res = run_transfer(input, cfg, disp, 4096);
    CHECK(res.norm_drift <= 1e-9);
    CHECK(ideal_overlap_fidelity(input, cfg.chirp, res.a2_final) >= 1.0 - 1e-9);
    CHECK(res.a1_final.norm() < 1e-18);
}

TEST_CASE("half-time probe splits the population evenly") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = flat_profile(g);
    const DispersionParams disp;

    const auto res = run_transfer(input, cfg, disp, 2048, 0.5 * cfg.transfer_time());
    CHECK(res.a1_final.norm() == Approx(0.5).margin(1e-9));
    CHECK(res.a2_final.norm() == Approx(0.5).margin(1e-9));
}

TEST_CASE("double transfer returns the input up to sign") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = harmonic_profile(g);
    const DispersionParams disp;

    const auto res = run_transfer(input, cfg, disp, 1024, 2.0 * cfg.transfer_time());
    for (std::size_t j = 0; j < input.samples.size(); ++j)
        REQUIRE(std::abs(std::abs(res.a1_final.samples[j]) - std::abs(input.samples[j])) < 1e-8);
    CHECK(res.a2_final.norm() < 1e-16);
}

TEST_CASE("dispersion-free completeness for a smooth chirp") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = harmonic_profile(g);
    const DispersionParams disp;

    const auto res = run_transfer(input, cfg, disp, 512);
    for (std::size_t j = 0; j < input.samples.size(); ++j) {
        const double ph = -cfg.chirp.phi[j];
        const cplx ideal = -cplx(std::cos(ph), std::sin(ph)) * input.samples[j];
        REQUIRE(std::abs(res.a2_final.samples[j] - ideal) < 1e-8);
    }
}

TEST_CASE("strang splitting converges at second order") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::gaussian(0.5, 4.0), g);
    EscortConfig cfg;
    cfg.chirp = design_chirp_cdf(input, 30.0, ChirpBoundary::full_spectrum());
    cfg.u_e = -0.05 * 2.0 / 3.0;
    DispersionParams disp{.u = 0.05};

    auto solve = [&](std::int64_t steps) { return run_transfer(input, cfg, disp, steps); };
    const auto ref = solve(4096);
    auto dev = [&](const TransferResult& r) {
        double s = 0.0;
        for (std::size_t j = 0; j < r.a2_final.samples.size(); ++j)
            s += std::norm(r.a2_final.samples[j] - ref.a2_final.samples[j]);
        return std::sqrt(s * g.dz());
    };
    const double e1 = dev(solve(512));
    const double e2 = dev(solve(1024));
    INFO("coarse " << e1 << " fine " << e2 << " ratio " << e1 / e2);
    CHECK(e1 / e2 > 3.2);
    CHECK(e1 / e2 < 5.2);
}

TEST_CASE("aliasing guard rejects an under-resolved grid") {
    const Grid g = build_grid(256, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = design_chirp_cdf(input, std::sqrt(2.0) * 25.0, ChirpBoundary::full_spectrum());
    DispersionParams disp{.u = 0.05};
    CHECK_THROWS_AS(run_transfer(input, cfg, disp, 512), SimulationError);
}

TEST_CASE("step-size preconditions are enforced") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = flat_profile(g);
    CHECK_THROWS_AS(run_transfer(input, cfg, DispersionParams{}, 100), ConfigError);

    auto a1 = input;
    ComplexWaveform a2;
    a2.grid = g;
    a2.samples.assign(a1.samples.size(), cplx(0.0, 0.0));
    const double dt = cfg.transfer_time() / 100.0;  // coarser than T/256
    CHECK_THROWS_AS(propagate_step(a1, a2, cfg, DispersionParams{}, 0.0, dt), ConfigError);
}

TEST_CASE("norm guard reports a drift breach") {
    const Grid g = build_grid(1024, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
    EscortConfig cfg;
    cfg.chirp = flat_profile(g);
    StepControls controls;
    controls.norm_tolerance = 1e-30;  // force the guard
    CHECK_THROWS_AS(run_transfer(input, cfg, DispersionParams{}, 512, -1.0, controls),
                    SimulationError);
}

TEST_CASE("merged transfer composition matches repeated single steps") {
    const Grid g = build_grid(512, -2.0, 18.0);
    const auto input = build_waveform(WaveformSpec::gaussian(0.5, 4.0), g);
    EscortConfig cfg;
    cfg.chirp = harmonic_profile(g);
    cfg.u_e = -0.04;
    DispersionParams disp{.u = 0.06, .beta1 = 1e-5, .beta2 = 1e-5};

    const std::int64_t steps = 512;
    const double dt = cfg.transfer_time() / static_cast<double>(steps);
    auto a1 = input;
    ComplexWaveform a2;
    a2.grid = g;
    a2.samples.assign(a1.samples.size(), cplx(0.0, 0.0));
    for (std::int64_t s = 0; s < steps; ++s)
        propagate_step(a1, a2, cfg, disp, static_cast<double>(s) * dt, dt);

    const auto merged = run_transfer(input, cfg, disp, steps);
    for (std::size_t j = 0; j < a1.samples.size(); ++j) {
        REQUIRE(std::abs(a1.samples[j] - merged.a1_final.samples[j]) < 1e-11);
        REQUIRE(std::abs(a2.samples[j] - merged.a2_final.samples[j]) < 1e-11);
    }
}
