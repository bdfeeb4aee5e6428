#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwc/analysis.hpp"
#include "qwc/chirp.hpp"
#include "qwc/grid.hpp"
#include "qwc/waveform.hpp"

namespace qwc {

/// Decimal formatting used for every file we emit: 17 significant digits
/// round-trip any double bit-exactly.
inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

// Grid header comment carries the exact grid so that read/write round-trips
// are bit-identical (the z column alone cannot reconstruct z_max exactly).
inline void write_grid_comment(std::ofstream& out, const Grid& g) {
    out << "# grid n_points=" << g.n_points << " z_min=" << fmt17(g.z_min)
        << " z_max=" << fmt17(g.z_max) << "\n";
}

inline bool parse_grid_comment(const std::string& line, Grid& g) {
    std::int64_t n = 0;
    double lo = 0.0, hi = 0.0;
    if (std::sscanf(line.c_str(), "# grid n_points=%lld z_min=%lf z_max=%lf",
                    reinterpret_cast<long long*>(&n), &lo, &hi) != 3)
        return false;
    g = build_grid(n, lo, hi);
    return true;
}

inline std::vector<std::vector<double>> read_csv_rows(std::ifstream& in, std::size_t columns,
                                                      Grid* grid_out) {
    std::vector<std::vector<double>> rows;
    std::string line;
    bool have_grid = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            Grid g;
            if (!have_grid && grid_out && parse_grid_comment(line, g)) {
                *grid_out = g;
                have_grid = true;
            }
            continue;
        }
        if (line.find_first_of("0123456789+-.") != 0) continue;  // header row
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != columns)
            throw IoError("CSV row has " + std::to_string(row.size()) + " columns, expected " +
                          std::to_string(columns));
        rows.push_back(std::move(row));
    }
    if (grid_out && !have_grid) {
        if (rows.size() < 2) throw IoError("CSV too short to reconstruct a grid");
        const auto n = static_cast<std::int64_t>(rows.size());
        const double dz = rows[1][0] - rows[0][0];
        *grid_out = build_grid(n, rows[0][0], rows[0][0] + dz * static_cast<double>(n));
    }
    return rows;
}

} // namespace detail

inline void write_waveform_csv(const std::string& path, const ComplexWaveform& w) {
    auto out = detail::open_out(path);
    detail::write_grid_comment(out, w.grid);
    out << "z,re,im\n";
    for (std::int64_t j = 0; j < w.grid.n_points; ++j) {
        const cplx& a = w.samples[static_cast<std::size_t>(j)];
        out << fmt17(w.grid.z(j)) << ',' << fmt17(a.real()) << ',' << fmt17(a.imag()) << "\n";
    }
}

inline ComplexWaveform read_waveform_csv(const std::string& path) {
    auto in = detail::open_in(path);
    ComplexWaveform w;
    const auto rows = detail::read_csv_rows(in, 3, &w.grid);
    if (static_cast<std::int64_t>(rows.size()) != w.grid.n_points)
        throw IoError("waveform CSV row count does not match its grid");
    w.samples.reserve(rows.size());
    for (const auto& r : rows) w.samples.emplace_back(r[1], r[2]);
    w.normalized = std::abs(w.norm() - 1.0) < 1e-9;
    return w;
}

inline void write_phase_csv(const std::string& path, const PhaseProfile& p) {
    auto out = detail::open_out(path);
    detail::write_grid_comment(out, p.grid);
    out << "# ref_index=" << p.ref_index << "\n";
    out << "z,phi,dphi\n";
    for (std::int64_t j = 0; j < p.grid.n_points; ++j) {
        const auto u = static_cast<std::size_t>(j);
        out << fmt17(p.grid.z(j)) << ',' << fmt17(p.phi[u]) << ',' << fmt17(p.dphi[u]) << "\n";
    }
}

inline PhaseProfile read_phase_csv(const std::string& path) {
    auto in = detail::open_in(path);
    PhaseProfile p;

    std::vector<std::vector<double>> rows;
    std::string line;
    bool have_grid = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long long ref = 0;
        if (std::sscanf(line.c_str(), "# ref_index=%lld", &ref) == 1) {
            p.ref_index = ref;
            continue;
        }
        if (line[0] == '#') {
            Grid g;
            if (!have_grid && detail::parse_grid_comment(line, g)) {
                p.grid = g;
                have_grid = true;
            }
            continue;
        }
        if (line.find_first_of("0123456789+-.") != 0) continue;
        std::vector<double> row;
        std::stringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != 3) throw IoError("phase CSV row must have 3 columns");
        rows.push_back(std::move(row));
    }
    if (!have_grid) {
        if (rows.size() < 2) throw IoError("phase CSV too short to reconstruct a grid");
        const auto n = static_cast<std::int64_t>(rows.size());
        const double dz = rows[1][0] - rows[0][0];
        p.grid = build_grid(n, rows[0][0], rows[0][0] + dz * static_cast<double>(n));
    }
    if (static_cast<std::int64_t>(rows.size()) != p.grid.n_points)
        throw IoError("phase CSV row count does not match its grid");
    p.phi.reserve(rows.size());
    p.dphi.reserve(rows.size());
    for (const auto& r : rows) {
        p.phi.push_back(r[1]);
        p.dphi.push_back(r[2]);
    }
    p.d2phi.assign(rows.size(), 0.0);
    const double dz = p.grid.dz();
    for (std::size_t j = 1; j + 1 < rows.size(); ++j)
        p.d2phi[j] = (p.dphi[j + 1] - p.dphi[j - 1]) / (2.0 * dz);
    return p;
}

/// Spectral phase in ascending-k order for plotting; the grid comment allows
/// exact reconstruction of the DFT layout.
inline void write_spectral_phase_csv(const std::string& path, const SpectralPhase& sp) {
    auto out = detail::open_out(path);
    detail::write_grid_comment(out, sp.grid);
    out << "k,gamma\n";
    const std::int64_t n = sp.grid.n_points;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t f = i - n / 2;
        const auto m = static_cast<std::size_t>(f < 0 ? f + n : f);
        out << fmt17(sp.grid.dk() * static_cast<double>(f)) << ',' << fmt17(sp.gamma[m]) << "\n";
    }
}

inline SpectralPhase read_spectral_phase_csv(const std::string& path) {
    auto in = detail::open_in(path);
    SpectralPhase sp;
    const auto rows = detail::read_csv_rows(in, 2, &sp.grid);
    const std::int64_t n = sp.grid.n_points;
    if (static_cast<std::int64_t>(rows.size()) != n)
        throw IoError("spectral phase CSV row count does not match its grid");
    sp.gamma.assign(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t f = i - n / 2;
        const auto m = static_cast<std::size_t>(f < 0 ? f + n : f);
        sp.gamma[m] = rows[static_cast<std::size_t>(i)][1];
    }
    return sp;
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    auto out = detail::open_out(path);
    out << "compression,u,error_sim,error_pert,n_points,n_steps\n";
    for (const auto& r : rows) {
        out << fmt17(r.compression) << ',' << fmt17(r.u) << ',' << fmt17(r.error_sim) << ','
            << fmt17(r.error_pert) << ',' << r.n_points << ',' << r.n_steps << "\n";
    }
}

inline std::vector<SweepRow> read_sweep_csv(const std::string& path) {
    auto in = detail::open_in(path);
    const auto raw = detail::read_csv_rows(in, 6, nullptr);
    std::vector<SweepRow> rows;
    rows.reserve(raw.size());
    for (const auto& r : raw) {
        SweepRow row;
        row.compression = r[0];
        row.u = r[1];
        row.error_sim = r[2];
        row.error_pert = r[3];
        row.n_points = static_cast<std::int64_t>(r[4]);
        row.n_steps = static_cast<std::int64_t>(r[5]);
        row.ok = std::isfinite(row.error_sim);
        rows.push_back(row);
    }
    return rows;
}

inline void write_compression_csv(const std::string& path,
                                  const std::vector<CompressionRow>& rows) {
    auto out = detail::open_out(path);
    out << "compression,u_err_fit,u_err_pert,fit_residual\n";
    for (const auto& r : rows)
        out << fmt17(r.compression) << ',' << fmt17(r.u_err_fit) << ',' << fmt17(r.u_err_pert)
            << ',' << fmt17(r.fit_residual) << "\n";
}

inline nlohmann::json waveform_to_json(const ComplexWaveform& w) {
    nlohmann::json j;
    j["grid"] = {{"n_points", w.grid.n_points}, {"z_min", w.grid.z_min}, {"z_max", w.grid.z_max}};
    j["normalized"] = w.normalized;
    auto& s = j["samples"] = nlohmann::json::array();
    for (const cplx& a : w.samples) s.push_back({a.real(), a.imag()});
    return j;
}

inline ComplexWaveform waveform_from_json(const nlohmann::json& j) {
    ComplexWaveform w;
    const auto& g = j.at("grid");
    w.grid = build_grid(g.at("n_points").get<std::int64_t>(), g.at("z_min").get<double>(),
                        g.at("z_max").get<double>());
    for (const auto& s : j.at("samples"))
        w.samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
    if (static_cast<std::int64_t>(w.samples.size()) != w.grid.n_points)
        throw IoError("waveform JSON sample count does not match its grid");
    w.normalized = j.value("normalized", false);
    return w;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = detail::open_out(path);
    out << j.dump(2) << "\n";
}

inline nlohmann::json read_json(const std::string& path) {
    auto in = detail::open_in(path);
    nlohmann::json j;
    in >> j;
    return j;
}

} // namespace qwc
