#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwc/analysis.hpp"
#include "qwc/dechirp.hpp"
#include "qwc/io.hpp"
#include "qwc/materials.hpp"
#include "qwc/qwc_version.hpp"

namespace qwc {

/// Fully resolved run configuration. Every field has a definite value after
/// parsing; the manifest echoes the effective configuration so a run can be
/// reproduced bit-identically from its own manifest.
struct RunConfig {
    // grid
    std::int64_t n_points = 0;  // 0: automatic from the compression ratio
    double z_min = -2.0;
    double z_max = 18.0;

    // input waveform
    std::string input_kind = "exponential";  // exponential | gaussian | file
    double tau = 1.0;
    double rise = 0.02;  // units of tau
    double gauss_sigma = 1.0;
    double gauss_center = 0.0;
    std::string input_file;

    // design target
    double compression = 100.0;  // tau / sigma
    std::string coverage = "full";
    double support_epsilon = 1e-6;
    bool periodize = true;
    std::string chirp_file;  // load the escort phase instead of designing it

    // escort and dispersion
    double omega = pi / 2.0;
    double ue_over_u = -2.0 / 3.0;
    std::optional<double> u_e_abs;  // absolute u_e overrides ue_over_u * u
    double beta3 = 0.0;
    double delta_scale = 1.0;
    double u = 0.013;
    double beta1 = 0.0;
    double beta2 = 0.0;

    // integration
    std::int64_t n_steps = 0;  // 0: automatic

    // photon statistics
    int fock_n = 1;
    std::vector<cplx> photon_coefficients;  // overrides fock_n when nonempty

    // sweeps
    int case_id = 1;
    std::vector<double> u_values;
    std::vector<double> compressions;
    std::vector<double> u_fractions;

    // material command
    std::string material_data;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    std::vector<std::string> axes{"o", "o", "o"};
    double material_omega = 0.0;
    double material_length = 0.0;

    // execution
    std::string output_dir = "out";
    int jobs = 0;  // 0: resolve from QWC_JOBS or hardware
    bool dry_run = false;
};

namespace cli_detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

inline RunConfig parse_config(const nlohmann::json& root) {
    cli_detail::reject_unknown_keys(root,
                                    {"grid", "input", "target", "design", "escort", "dispersion",
                                     "run", "photon", "sweep", "material", "output_dir", "jobs"},
                                    "top level");
    RunConfig c;
    if (root.contains("grid")) {
        const auto& g = root["grid"];
        reject_unknown_keys(g, {"n_points", "z_min", "z_max"}, "grid");
        c.n_points = g.value("n_points", c.n_points);
        c.z_min = g.value("z_min", c.z_min);
        c.z_max = g.value("z_max", c.z_max);
    }
    if (root.contains("input")) {
        const auto& i = root["input"];
        reject_unknown_keys(i, {"kind", "tau", "rise", "sigma", "center", "path"}, "input");
        c.input_kind = i.value("kind", c.input_kind);
        c.tau = i.value("tau", c.tau);
        c.rise = i.value("rise", c.rise);
        c.gauss_sigma = i.value("sigma", c.gauss_sigma);
        c.gauss_center = i.value("center", c.gauss_center);
        c.input_file = i.value("path", c.input_file);
    }
    if (root.contains("target")) {
        const auto& t = root["target"];
        reject_unknown_keys(t, {"compression", "sigma"}, "target");
        if (t.contains("sigma"))
            c.compression = c.tau / t["sigma"].get<double>();
        c.compression = t.value("compression", c.compression);
    }
    if (root.contains("design")) {
        const auto& d = root["design"];
        reject_unknown_keys(d, {"coverage", "support_epsilon", "periodize", "chirp_file"},
                            "design");
        c.coverage = d.value("coverage", c.coverage);
        c.support_epsilon = d.value("support_epsilon", c.support_epsilon);
        c.periodize = d.value("periodize", c.periodize);
        c.chirp_file = d.value("chirp_file", c.chirp_file);
    }
    if (root.contains("escort")) {
        const auto& e = root["escort"];
        reject_unknown_keys(e, {"omega", "ue_over_u", "u_e", "beta3", "delta_scale"}, "escort");
        c.omega = e.value("omega", c.omega);
        c.ue_over_u = e.value("ue_over_u", c.ue_over_u);
        if (e.contains("u_e")) c.u_e_abs = e["u_e"].get<double>();
        c.beta3 = e.value("beta3", c.beta3);
        c.delta_scale = e.value("delta_scale", c.delta_scale);
    }
    if (root.contains("dispersion")) {
        const auto& d = root["dispersion"];
        reject_unknown_keys(d, {"u", "beta1", "beta2"}, "dispersion");
        c.u = d.value("u", c.u);
        c.beta1 = d.value("beta1", c.beta1);
        c.beta2 = d.value("beta2", c.beta2);
    }
    if (root.contains("run")) {
        const auto& r = root["run"];
        reject_unknown_keys(r, {"n_steps"}, "run");
        c.n_steps = r.value("n_steps", c.n_steps);
    }
    if (root.contains("photon")) {
        const auto& p = root["photon"];
        reject_unknown_keys(p, {"fock", "coefficients"}, "photon");
        c.fock_n = p.value("fock", c.fock_n);
        if (p.contains("coefficients"))
            for (const auto& s : p["coefficients"])
                c.photon_coefficients.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
    }
    if (root.contains("sweep")) {
        const auto& s = root["sweep"];
        reject_unknown_keys(s, {"case", "u_values", "compressions", "u_fractions"}, "sweep");
        c.case_id = s.value("case", c.case_id);
        if (s.contains("u_values")) c.u_values = s["u_values"].get<std::vector<double>>();
        if (s.contains("compressions"))
            c.compressions = s["compressions"].get<std::vector<double>>();
        if (s.contains("u_fractions"))
            c.u_fractions = s["u_fractions"].get<std::vector<double>>();
    }
    if (root.contains("material")) {
        const auto& m = root["material"];
        reject_unknown_keys(m, {"data", "lambda1", "lambda2", "lambda3", "axes", "omega", "length"},
                            "material");
        c.material_data = m.value("data", c.material_data);
        c.lambda1 = m.value("lambda1", c.lambda1);
        c.lambda2 = m.value("lambda2", c.lambda2);
        c.lambda3 = m.value("lambda3", c.lambda3);
        if (m.contains("axes")) c.axes = m["axes"].get<std::vector<std::string>>();
        c.material_omega = m.value("omega", c.material_omega);
        c.material_length = m.value("length", c.material_length);
    }
    c.output_dir = root.value("output_dir", c.output_dir);
    c.jobs = root.value("jobs", c.jobs);
    if (c.case_id == 2) c.ue_over_u = root.contains("escort") &&
                                              root["escort"].contains("ue_over_u")
                                          ? c.ue_over_u
                                          : -1.0;
    return c;
}

inline nlohmann::json effective_json(const RunConfig& c) {
    nlohmann::json j;
    j["grid"] = {{"n_points", c.n_points}, {"z_min", c.z_min}, {"z_max", c.z_max}};
    nlohmann::json input = {{"kind", c.input_kind}, {"tau", c.tau}, {"rise", c.rise},
                            {"sigma", c.gauss_sigma}, {"center", c.gauss_center}};
    if (!c.input_file.empty()) input["path"] = c.input_file;
    j["input"] = input;
    j["target"] = {{"compression", c.compression}};
    nlohmann::json design = {{"coverage", c.coverage},
                             {"support_epsilon", c.support_epsilon},
                             {"periodize", c.periodize}};
    if (!c.chirp_file.empty()) design["chirp_file"] = c.chirp_file;
    j["design"] = design;
    nlohmann::json escort = {{"omega", c.omega},
                             {"ue_over_u", c.ue_over_u},
                             {"beta3", c.beta3},
                             {"delta_scale", c.delta_scale}};
    if (c.u_e_abs) escort["u_e"] = *c.u_e_abs;
    j["escort"] = escort;
    j["dispersion"] = {{"u", c.u}, {"beta1", c.beta1}, {"beta2", c.beta2}};
    j["run"] = {{"n_steps", c.n_steps}};
    nlohmann::json photon = {{"fock", c.fock_n}};
    if (!c.photon_coefficients.empty()) {
        auto& arr = photon["coefficients"] = nlohmann::json::array();
        for (const cplx& v : c.photon_coefficients) arr.push_back({v.real(), v.imag()});
    }
    j["photon"] = photon;
    j["sweep"] = {{"case", c.case_id},
                  {"u_values", c.u_values},
                  {"compressions", c.compressions},
                  {"u_fractions", c.u_fractions}};
    if (!c.material_data.empty())
        j["material"] = {{"data", c.material_data}, {"lambda1", c.lambda1},
                         {"lambda2", c.lambda2},   {"lambda3", c.lambda3},
                         {"axes", c.axes},         {"omega", c.material_omega},
                         {"length", c.material_length}};
    j["output_dir"] = c.output_dir;
    j["jobs"] = c.jobs;
    return j;
}

inline RunConfig load_config(const std::string& path) {
    nlohmann::json j = read_json(path);
    if (j.contains("tool") && j.contains("config")) j = j["config"];  // manifest rerun
    return parse_config(j);
}

inline int resolved_jobs(const RunConfig& c) {
    if (c.jobs > 0) return c.jobs;
    if (const char* env = std::getenv("QWC_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return default_jobs();
}

struct Scene {
    Grid grid;
    ComplexWaveform input;
    PhaseProfile chirp;
    double sigma_k = 0.0;
};

inline Grid make_grid(const RunConfig& c) {
    const std::int64_t n = c.n_points > 0 ? c.n_points : auto_n_points(c.compression);
    return build_grid(n, c.z_min, c.z_max);
}

inline ComplexWaveform make_input(const RunConfig& c, const Grid& g) {
    if (c.input_kind == "exponential")
        return build_waveform(WaveformSpec::exponential(c.tau, c.rise * c.tau), g);
    if (c.input_kind == "gaussian")
        return build_waveform(WaveformSpec::gaussian(c.gauss_sigma, c.gauss_center), g);
    if (c.input_kind == "file") {
        auto w = read_waveform_csv(c.input_file);
        if (!(w.grid == g) && c.n_points > 0)
            throw ConfigError("input file grid does not match the configured grid");
        return w;
    }
    throw ConfigError("input.kind must be exponential, gaussian or file");
}

inline Scene make_scene(const RunConfig& c) {
    Scene sc;
    sc.grid = make_grid(c);
    sc.input = make_input(c, sc.grid);
    if (c.input_kind == "file") sc.grid = sc.input.grid;
    sc.sigma_k = std::sqrt(2.0) * c.compression / c.tau;
    if (!c.chirp_file.empty()) {
        sc.chirp = read_phase_csv(c.chirp_file);
        if (!(sc.chirp.grid == sc.grid))
            throw ConfigError("design.chirp_file: phase grid does not match the run grid");
        return sc;
    }
    ChirpOptions opts;
    opts.support_epsilon = c.support_epsilon;
    opts.periodize = c.periodize;
    const ChirpBoundary boundary = c.coverage == "half" ? ChirpBoundary::half_spectrum()
                                                        : ChirpBoundary::full_spectrum();
    sc.chirp = design_chirp_cdf(sc.input, sc.sigma_k, boundary, opts);
    return sc;
}

inline EscortConfig make_escort(const RunConfig& c, const Scene& sc, const DispersionParams& disp) {
    EscortConfig e;
    e.omega = c.omega;
    e.u_e = c.u_e_abs ? *c.u_e_abs : c.ue_over_u * disp.u;
    e.beta3 = c.beta3;
    e.chirp = sc.chirp;
    e.compensation = optimal_compensation(sc.chirp, disp, e);
    for (double& v : e.compensation) v *= c.delta_scale;
    return e;
}

inline PhotonStatistics make_photon(const RunConfig& c) {
    if (!c.photon_coefficients.empty()) return photon_stats(c.photon_coefficients);
    return fock_state(c.fock_n);
}

inline SweepConfig make_sweep(const RunConfig& c) {
    SweepConfig s = c.case_id == 2 ? case2_config() : case1_config();
    s.tau = c.tau;
    s.rise = c.rise;
    s.compression = c.compression;
    s.ue_over_u = c.ue_over_u;
    s.u_values = c.u_values;
    s.delta_scale = c.delta_scale;
    s.omega = c.omega;
    s.z_min = c.z_min;
    s.z_max = c.z_max;
    s.n_points = c.n_points;
    s.n_steps = c.n_steps;
    s.beta1 = c.beta1;
    s.beta2 = c.beta2;
    s.beta3 = c.beta3;
    s.photon = make_photon(c);
    s.jobs = resolved_jobs(c);
    return s;
}

class Manifest {
public:
    Manifest(const RunConfig& c, std::string command)
        : config_(c), command_(std::move(command)),
          start_(std::chrono::steady_clock::now()) {}

    void write(const std::string& dir) const {
        nlohmann::json j;
        j["tool"] = "qwc";
        j["version"] = qwc_version;
        j["command"] = command_;
        j["config"] = effective_json(config_);
        j["timings"] = {{"wall_seconds",
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                             .count()}};
        write_json(dir + "/manifest.json", j);
    }

private:
    RunConfig config_;
    std::string command_;
    std::chrono::steady_clock::time_point start_;
};

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);
}

inline void validate_only(const RunConfig& c, const std::string& command) {
    const Grid g = make_grid(c);
    if (c.input_kind != "file") (void)make_input(c, g);
    ChirpBoundary boundary = c.coverage == "half" ? ChirpBoundary::half_spectrum()
                                                  : ChirpBoundary::full_spectrum();
    boundary.validate(1.0);
    if (command == "simulate" || command == "convert") {
        const double T = pi / (2.0 * c.omega);
        const std::int64_t steps = c.n_steps > 0 ? c.n_steps : auto_n_steps(c.compression);
        if (T / static_cast<double>(steps) > T / 256.0)
            throw ConfigError("run.n_steps: step size must satisfy dt <= T/256");
    }
    std::cout << "config ok (dry run)\n";
}

// Subcommand bodies. Each returns after writing its outputs and manifest.

inline void cmd_design(const RunConfig& c) {
    const auto sc = make_scene(c);
    Manifest manifest(c, "design");
    ensure_dir(c.output_dir);
    write_waveform_csv(c.output_dir + "/input.csv", sc.input);
    write_phase_csv(c.output_dir + "/phase.csv", sc.chirp);
    write_spectral_phase_csv(c.output_dir + "/gamma.csv", design_dechirp(sc.input, sc.chirp));
    manifest.write(c.output_dir);
}

inline void cmd_dechirp(const RunConfig& c) {
    const auto sc = make_scene(c);
    Manifest manifest(c, "dechirp");
    ensure_dir(c.output_dir);
    write_spectral_phase_csv(c.output_dir + "/gamma.csv", design_dechirp(sc.input, sc.chirp));
    manifest.write(c.output_dir);
}

inline nlohmann::json run_and_report(const RunConfig& c, const Scene& sc,
                                     ComplexWaveform* a2_out, SpectralPhase* gamma_out) {
    DispersionParams disp{.u = c.u, .beta1 = c.beta1, .beta2 = c.beta2};
    const EscortConfig escort = make_escort(c, sc, disp);
    const auto photon = make_photon(c);
    const std::int64_t steps = c.n_steps > 0 ? c.n_steps : auto_n_steps(c.compression);

    const auto pert = perturbative_error(sc.input, sc.chirp, escort.compensation, disp, escort,
                                         photon);
    const auto res = run_transfer(sc.input, escort, disp, steps);
    const double fidelity = overlap_fidelity(sc.input, sc.chirp, res.a2_final, photon);

    nlohmann::json rep;
    rep["fidelity_sim"] = fidelity;
    rep["error_sim"] = 1.0 - fidelity;
    rep["error_pert"] = pert.error;
    rep["u_err_pert"] = pert.u_err ? *pert.u_err : 0.0;
    rep["theta"] = pert.theta;
    rep["re_u12"] = pert.re_u12;
    rep["validity_warning"] = pert.validity_warning;
    rep["norm_drift"] = res.norm_drift;
    rep["transfer_time"] = res.transfer_time;
    rep["n_steps"] = res.steps;
    rep["n_points"] = sc.grid.n_points;
    if (a2_out) *a2_out = res.a2_final;
    if (gamma_out) *gamma_out = design_dechirp(sc.input, sc.chirp);
    return rep;
}

inline void cmd_simulate(const RunConfig& c) {
    const auto sc = make_scene(c);
    Manifest manifest(c, "simulate");
    ComplexWaveform a2;
    const auto rep = run_and_report(c, sc, &a2, nullptr);
    ensure_dir(c.output_dir);
    write_waveform_csv(c.output_dir + "/a2_final.csv", a2);
    write_json(c.output_dir + "/report.json", rep);
    manifest.write(c.output_dir);
}

inline void cmd_error(const RunConfig& c) {
    const auto sc = make_scene(c);
    Manifest manifest(c, "error");
    DispersionParams disp{.u = c.u, .beta1 = c.beta1, .beta2 = c.beta2};
    const EscortConfig escort = make_escort(c, sc, disp);
    const auto rep = perturbative_error(sc.input, sc.chirp, escort.compensation, disp, escort,
                                        make_photon(c));
    nlohmann::json j;
    j["theta"] = rep.theta;
    j["re_u12"] = rep.re_u12;
    j["fidelity"] = rep.fidelity;
    j["error"] = rep.error;
    if (rep.u_err) j["u_err"] = *rep.u_err;
    j["validity_warning"] = rep.validity_warning;
    if (!rep.warning.empty()) j["warning"] = rep.warning;
    ensure_dir(c.output_dir);
    write_json(c.output_dir + "/report.json", j);
    manifest.write(c.output_dir);
}

inline void cmd_sweep_u(const RunConfig& c) {
    SweepConfig s = make_sweep(c);
    if (s.u_values.empty()) s.u_values = {0.004, 0.008, 0.013, 0.02};
    Manifest manifest(c, "sweep-u");
    const auto rows = sweep_error_vs_u(s);
    ensure_dir(c.output_dir);
    write_sweep_csv(c.output_dir + "/rows.csv", rows);
    write_sweep_csv(c.output_dir + (c.case_id == 2 ? "/panel_c.csv" : "/panel_a.csv"), rows);
    manifest.write(c.output_dir);
}

inline void cmd_sweep_compression(const RunConfig& c) {
    SweepConfig s = make_sweep(c);
    Manifest manifest(c, "sweep-compression");
    const auto compressions =
        c.compressions.empty() ? std::vector<double>{25.0, 50.0, 100.0, 200.0} : c.compressions;
    const auto fractions = c.u_fractions.empty() ? std::vector<double>{0.02, 0.04, 0.06, 0.08}
                                                 : c.u_fractions;
    const auto rows = sweep_u_err_vs_compression(s, compressions, fractions);
    ensure_dir(c.output_dir);
    write_compression_csv(c.output_dir + (c.case_id == 2 ? "/panel_d.csv" : "/panel_b.csv"), rows);
    std::vector<SweepRow> all;
    for (const auto& r : rows) all.insert(all.end(), r.rows.begin(), r.rows.end());
    write_sweep_csv(c.output_dir + "/rows.csv", all);
    manifest.write(c.output_dir);
}

inline void cmd_fit(const std::string& input, const std::string& output) {
    const auto rows = read_sweep_csv(input);
    const auto fit = fit_u_err(rows);
    nlohmann::json j;
    j["u_err_fit"] = fit.u_err_fit;
    j["residual"] = fit.residual;
    if (output.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_json(output, j);
        std::cout << "u_err_fit = " << fmt17(fit.u_err_fit) << "\n";
    }
}

inline void cmd_material(const RunConfig& c) {
    if (c.material_data.empty()) throw ConfigError("material.data: path to a Sellmeier file required");
    const auto set = SellmeierSet::load(c.material_data);
    const double l3 = c.lambda3 > 0.0 ? c.lambda3 : escort_wavelength(c.lambda1, c.lambda2);
    const double omega = c.material_omega > 0.0 ? c.material_omega : 1e9;
    const double L = c.material_length > 0.0 ? c.material_length : 0.05;
    const auto t = group_params(set, c.lambda1, c.lambda2, l3, c.axes, omega, L);
    nlohmann::json j;
    j["lambda1_nm"] = t.lambda1;
    j["lambda2_nm"] = t.lambda2;
    j["lambda3_nm"] = t.lambda3;
    j["v1"] = t.v1;
    j["v2"] = t.v2;
    j["v3"] = t.v3;
    j["v"] = t.v;
    j["v_e"] = t.v_e;
    j["beta1"] = t.beta1;
    j["beta2"] = t.beta2;
    j["beta3"] = t.beta3;
    j["u"] = t.u;
    j["u_e"] = t.u_e;
    ensure_dir(c.output_dir);
    write_json(c.output_dir + "/material.json", j);
    std::cout << j.dump(2) << "\n";
}

inline void cmd_convert(const RunConfig& c) {
    const auto sc = make_scene(c);
    Manifest manifest(c, "convert");
    ComplexWaveform a2;
    SpectralPhase gamma;
    auto rep = run_and_report(c, sc, &a2, &gamma);
    const auto output = apply_dechirp(a2, gamma);

    // Envelope match against the design target: amplitude std sigma/sqrt(2)
    // centered at z = 0 by the gamma(0) = 0 gauge.
    const double sigma = c.tau / c.compression;
    const auto target =
        build_waveform(WaveformSpec::gaussian(sigma / std::sqrt(2.0), 0.0), sc.grid);
    rep["envelope_mismatch"] = envelope_mismatch(output.samples, target.samples);

    ensure_dir(c.output_dir);
    write_waveform_csv(c.output_dir + "/input.csv", sc.input);
    write_phase_csv(c.output_dir + "/phase.csv", sc.chirp);
    write_spectral_phase_csv(c.output_dir + "/gamma.csv", gamma);
    write_waveform_csv(c.output_dir + "/a2_final.csv", a2);
    write_waveform_csv(c.output_dir + "/output.csv", output);
    write_json(c.output_dir + "/report.json", rep);
    manifest.write(c.output_dir);
}

} // namespace cli_detail

/// Command-line entry point; returns the process exit code (0 success,
/// 2 configuration error, 3 simulation-validity error).
inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"qwc: quantum optical waveform conversion by chirped-escort three-wave mixing"};
    app.require_subcommand(1);

    std::string config_path, fit_input, fit_output;
    std::string output_dir_flag;
    std::int64_t n_steps_flag = -1, n_points_flag = -1;
    double u_flag = std::numeric_limits<double>::quiet_NaN();
    int jobs_flag = -1;
    bool dry_run = false;

    const auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "JSON run configuration");
        if (needs_config) opt->required();
        cmd->add_option("--output-dir", output_dir_flag, "override config output_dir");
        cmd->add_option("--n-steps", n_steps_flag, "override run.n_steps");
        cmd->add_option("--n-points", n_points_flag, "override grid.n_points");
        cmd->add_option("--u", u_flag, "override dispersion.u");
        cmd->add_option("--jobs", jobs_flag, "worker threads (QWC_JOBS as fallback)");
        cmd->add_flag("--dry-run", dry_run, "validate the configuration without computing");
    };

    auto* design = app.add_subcommand("design", "synthesize the escort chirp and output dechirp");
    add_common(design, true);
    auto* dechirp = app.add_subcommand("dechirp", "compute the output-shaper spectral phase");
    add_common(dechirp, true);
    auto* simulate = app.add_subcommand("simulate", "run the dispersive state transfer");
    add_common(simulate, true);
    auto* error_cmd = app.add_subcommand("error", "evaluate the perturbative error report");
    add_common(error_cmd, true);
    auto* sweep_u = app.add_subcommand("sweep-u", "error versus GVM sweep");
    add_common(sweep_u, true);
    auto* sweep_comp = app.add_subcommand("sweep-compression", "u_err versus compression sweep");
    add_common(sweep_comp, true);
    auto* convert = app.add_subcommand("convert", "full design-simulate-dechirp pipeline");
    add_common(convert, true);

    auto* fit = app.add_subcommand("fit", "fit the quadratic error law to sweep rows");
    fit->add_option("--input", fit_input, "sweep rows CSV")->required();
    fit->add_option("--output", fit_output, "fit report JSON (stdout if omitted)");

    auto* material = app.add_subcommand("material", "group-velocity parameters from Sellmeier data");
    add_common(material, true);

    std::vector<const char*> argv;
    argv.push_back("qwc");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) {
            cli_detail::cmd_fit(fit_input, fit_output);
            return 0;
        }
        RunConfig cfg = cli_detail::load_config(config_path);
        if (!output_dir_flag.empty()) cfg.output_dir = output_dir_flag;
        if (n_steps_flag >= 0) cfg.n_steps = n_steps_flag;
        if (n_points_flag >= 0) cfg.n_points = n_points_flag;
        if (!std::isnan(u_flag)) cfg.u = u_flag;
        if (jobs_flag > 0) cfg.jobs = jobs_flag;
        cfg.dry_run = dry_run;

        const std::string command = app.get_subcommands().front()->get_name();
        if (cfg.dry_run) {
            cli_detail::validate_only(cfg, command);
            return 0;
        }
        if (design->parsed()) cli_detail::cmd_design(cfg);
        else if (dechirp->parsed()) cli_detail::cmd_dechirp(cfg);
        else if (simulate->parsed()) cli_detail::cmd_simulate(cfg);
        else if (error_cmd->parsed()) cli_detail::cmd_error(cfg);
        else if (sweep_u->parsed()) cli_detail::cmd_sweep_u(cfg);
        else if (sweep_comp->parsed()) cli_detail::cmd_sweep_compression(cfg);
        else if (material->parsed()) cli_detail::cmd_material(cfg);
        else if (convert->parsed()) cli_detail::cmd_convert(cfg);
        return 0;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace qwc
