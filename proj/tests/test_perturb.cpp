#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "qwc/chirp.hpp"
#include "qwc/perturb.hpp"
#include "qwc/photon_stats.hpp"
#include "qwc/waveform.hpp"

using namespace qwc;

namespace {

PhaseProfile flat_profile(const Grid& g) {
    PhaseProfile p;
    p.grid = g;
    p.phi.assign(static_cast<std::size_t>(g.n_points), 0.0);
    p.dphi = p.phi;
    p.d2phi = p.phi;
    return p;
}

struct Case1 {
    Grid grid;
    ComplexWaveform input;
    PhaseProfile chirp;
    EscortConfig cfg;
    DispersionParams disp;
    std::vector<double> delta_opt;
};

// Exponential-to-Gaussian conversion at compression ratio tau/sigma = 100,
// rise 0.02 tau, u_e/u = -2/3, u = 0.013 unless overridden.
Case1 make_case1(double u = 0.013, double ratio = 100.0) {
    Case1 c;
    c.grid = build_grid(8192, -2.0, 18.0);
    c.input = build_waveform(WaveformSpec::exponential(1.0, 0.02), c.grid);
    c.chirp = design_chirp_cdf(c.input, std::sqrt(2.0) * ratio, ChirpBoundary::full_spectrum());
    c.cfg.chirp = c.chirp;
    c.cfg.u_e = -2.0 / 3.0 * u;
    c.disp.u = u;
    c.delta_opt = optimal_compensation(c.chirp, c.disp, c.cfg);
    return c;
}

} // namespace

TEST_CASE("optimal compensation basics") {
    const Grid g = build_grid(1024, -8.0, 8.0);
    const auto chirp = chirp_gauss_gauss(1.0, 20.0, g);

    EscortConfig cfg;
    cfg.chirp = chirp;
    DispersionParams disp;

    // u_e = u: no compensation needed.
    cfg.u_e = 0.02;
    disp.u = 0.02;
    for (double v : optimal_compensation(chirp, disp, cfg)) REQUIRE(v == 0.0);

    // Gaussian-input chirp phi' = sigma z / mu gives Delta_opt =
    // (u_e - u) sigma z / (8 mu).
    cfg.u_e = -0.01;
    disp.u = 0.015;
    const auto delta = optimal_compensation(chirp, disp, cfg);
    for (std::int64_t j = 0; j < g.n_points; j += 37) {
        const double expect = (cfg.u_e - disp.u) * 20.0 * g.z(j) / 8.0;
        REQUIRE(delta[static_cast<std::size_t>(j)] == Approx(expect).margin(1e-12));
    }

    // Linearity in (u_e - u).
    EscortConfig cfg2 = cfg;
    DispersionParams disp2 = disp;
    cfg2.u_e = 2.0 * cfg.u_e - disp.u;  // doubles u_e - u
    const auto delta2 = optimal_compensation(chirp, disp2, cfg2);
    for (std::size_t j = 0; j < delta.size(); j += 53)
        REQUIRE(delta2[j] == Approx(2.0 * delta[j]).margin(1e-15));
}

TEST_CASE("h profile definition") {
    const Grid g = build_grid(1024, -8.0, 8.0);
    const auto chirp = chirp_gauss_gauss(1.0, 20.0, g);
    EscortConfig cfg;
    cfg.chirp = chirp;
    cfg.u_e = -0.01;
    DispersionParams disp{.u = 0.015};

    // Delta = Delta_opt collapses h to zero.
    const auto h0 = h_profile(optimal_compensation(chirp, disp, cfg), chirp, disp, cfg);
    for (double v : h0) REQUIRE(std::abs(v) < 1e-12);

    // Delta = 0 leaves pi (v - v_e) phi'.
    const auto h1 = h_profile({}, chirp, disp, cfg);
    const double c = pi * (disp.v(cfg) - cfg.v_e());
    for (std::size_t j = 0; j < h1.size(); j += 41)
        REQUIRE(h1[j] == Approx(c * chirp.dphi[j]).margin(1e-14));

    // Constant slope gives constant h.
    PhaseProfile lin = flat_profile(g);
    for (std::size_t j = 0; j < lin.dphi.size(); ++j) lin.dphi[j] = 3.0;
    const auto h2 = h_profile({}, lin, disp, cfg);
    for (double v : h2) REQUIRE(v == Approx(c * 3.0).margin(1e-14));
}

TEST_CASE("no dispersion means no perturbative error") {
    const Grid g = build_grid(1024, -8.0, 8.0);
    const auto input = build_waveform(WaveformSpec::gaussian(0.5), g);
    EscortConfig cfg;
    cfg.chirp = chirp_gauss_gauss(0.5, 30.0, g);
    const DispersionParams disp;  // u = 0
    const auto rep = perturbative_error(input, cfg.chirp, {}, disp, cfg, fock_state(1));
    CHECK(rep.error == 0.0);
    CHECK(rep.fidelity == 1.0);
    CHECK_FALSE(rep.validity_warning);
}

TEST_CASE("gaussian single-photon error matches the analytic value") {
    // For a flat chirp and width-w Gaussian, integral |A'|^2 = 1/(2 w^2),
    // so 1 - F = u^2 L^2 / (16 pi^2 w^2).
    const Grid g = build_grid(2048, -8.0, 8.0);
    const double w = 0.5, u = 0.01;
    const auto input = build_waveform(WaveformSpec::gaussian(w), g);
    EscortConfig cfg;
    cfg.chirp = flat_profile(g);
    cfg.u_e = -0.003;  // enters only through phi' = 0 here
    DispersionParams disp{.u = u};

    const auto rep = perturbative_error(input, cfg.chirp, {}, disp, cfg, fock_state(1));
    const double expect = u * u / (16.0 * pi * pi * w * w);
    CHECK(rep.error == Approx(expect).epsilon(1e-6));
}

TEST_CASE("case-1 perturbative error reproduces the expected magnitude") {
    const auto c = make_case1();
    const auto rep =
        perturbative_error(c.input, c.chirp, c.delta_opt, c.disp, c.cfg, fock_state(1));
    INFO("1 - F = " << rep.error);
    CHECK(rep.error >= 3.5e-4);
    CHECK(rep.error <= 1.05e-3);
    CHECK_FALSE(rep.validity_warning);
}

TEST_CASE("reduction identity at h = 0") {
    const auto c = make_case1(0.008);
    const auto rep =
        perturbative_error(c.input, c.chirp, c.delta_opt, c.disp, c.cfg, fock_state(1));
    const double eq6 = optimal_error(c.input, c.chirp, c.disp.u, -2.0 / 3.0, fock_state(1));
    CHECK(rep.error == Approx(eq6).epsilon(1e-12));
}

TEST_CASE("u_err consistency and scaling") {
    const auto c = make_case1(0.01);
    const auto one = fock_state(1);
    const double ue1 = perturbative_u_err(c.input, c.chirp, -2.0 / 3.0, one);

    // (u / u_err)^2 equals the h = 0 error.
    const auto rep = perturbative_error(c.input, c.chirp, c.delta_opt, c.disp, c.cfg, one);
    CHECK(rep.error == Approx(sq(c.disp.u / ue1)).epsilon(1e-12));
    REQUIRE(rep.u_err.has_value());
    CHECK(*rep.u_err == Approx(ue1).epsilon(1e-15));

    // 1/sqrt(<n>) scaling.
    const double ue4 = perturbative_u_err(c.input, c.chirp, -2.0 / 3.0, fock_state(4));
    CHECK(ue4 == Approx(0.5 * ue1).epsilon(1e-12));

    // Vanishing mechanism: flat chirp, plane-wave-free field... a constant
    // field has A' = 0; with phi' = 0 the integral vanishes.
    const Grid g = build_grid(64, 0.0, 64.0);
    std::vector<cplx> ones(64, 1.0);
    const auto flat_field = build_waveform(WaveformSpec::custom(ones), g);
    CHECK(std::isinf(perturbative_u_err(flat_field, flat_profile(g), 0.0, one)));
}

TEST_CASE("u_err decreases with compression ratio") {
    double prev = std::numeric_limits<double>::infinity();
    for (double ratio : {25.0, 50.0, 100.0, 200.0}) {
        const auto n = std::max<std::int64_t>(4096, next_power_of_two(
                                                        static_cast<std::int64_t>(64.0 * ratio)));
        const Grid g = build_grid(n, -2.0, 18.0);
        const auto input = build_waveform(WaveformSpec::exponential(1.0, 0.02), g);
        const auto chirp =
            design_chirp_cdf(input, std::sqrt(2.0) * ratio, ChirpBoundary::full_spectrum());
        const double ue = perturbative_u_err(input, chirp, -2.0 / 3.0, fock_state(1));
        INFO("ratio " << ratio << " u_err " << ue);
        REQUIRE(ue < prev);
        prev = ue;
    }
}

TEST_CASE("error is linear in the photon number at h = 0") {
    const auto c = make_case1(0.006);
    const double e1 =
        perturbative_error(c.input, c.chirp, c.delta_opt, c.disp, c.cfg, fock_state(1)).error;
    for (int n : {2, 3}) {
        const double en =
            perturbative_error(c.input, c.chirp, c.delta_opt, c.disp, c.cfg, fock_state(n)).error;
        REQUIRE(en == Approx(n * e1).epsilon(1e-12));
    }
}

TEST_CASE("compensation scan flags breakdown away from the optimum") {
    const auto c = make_case1();
    const auto opt =
        perturbative_error(c.input, c.chirp, c.delta_opt, c.disp, c.cfg, fock_state(1));
    for (double s : {0.0, 0.5, 1.5, 2.0}) {
        std::vector<double> delta(c.delta_opt);
        for (double& v : delta) v *= s;
        const auto rep = perturbative_error(c.input, c.chirp, delta, c.disp, c.cfg, fock_state(1));
        // Optimality holds whenever the report is valid; at these parameters
        // the h^2 term drives the printed expansion negative, which must be
        // flagged rather than reported as an improvement.
        if (!rep.validity_warning) REQUIRE(rep.error >= opt.error);
        if (s == 0.0 || s == 2.0) REQUIRE(rep.validity_warning);
    }
}

TEST_CASE("g diagnostics follow their definitions") {
    const Grid g = build_grid(1024, -8.0, 8.0);
    PhaseProfile lin = flat_profile(g);
    for (std::size_t j = 0; j < lin.dphi.size(); ++j) lin.dphi[j] = 2.0;
    EscortConfig cfg;
    cfg.chirp = lin;
    cfg.u_e = 0.04;

    const auto gp = g_plus_profile({}, lin, cfg);
    const auto gm = g_minus_profile({}, lin, cfg);
    const double ve = cfg.v_e();
    for (std::size_t j = 0; j < gp.size(); j += 101) {
        REQUIRE(gp[j] == Approx(-(pi * pi + 8.0) * ve * 2.0).margin(1e-14));
        REQUIRE(gm[j] == Approx(-(pi * pi - 8.0) * ve * 2.0).margin(1e-14));
    }

    std::vector<double> delta(gp.size(), 0.1);
    const auto gpd = g_plus_profile(delta, lin, cfg);
    for (std::size_t j = 0; j < gpd.size(); j += 101)
        REQUIRE(gpd[j] == Approx(0.4 * pi * cfg.omega - (pi * pi + 8.0) * ve * 2.0).margin(1e-12));
}
