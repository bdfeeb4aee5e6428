#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwc/errors.hpp"
#include "qwc/math.hpp"

namespace qwc {

inline constexpr double speed_of_light = 299792458.0;  // m/s

/// Sellmeier refractive-index model n^2(lambda) = 1 + sum_i B_i lambda^2 /
/// (lambda^2 - C_i), lambda in micrometers, per polarization axis.
struct SellmeierSet {
    struct Axis {
        std::vector<double> coefficients;  // B1, C1, B2, C2, ...
        double range_lo_um = 0.0;
        double range_hi_um = 0.0;
        std::string source;
    };
    std::string material;
    std::map<std::string, Axis> axes;

    const Axis& axis(const std::string& name) const {
        const auto it = axes.find(name);
        if (it == axes.end())
            throw ConfigError("SellmeierSet: unknown axis '" + name + "' for " + material);
        return it->second;
    }

    /// Parse one entry or an array of entries of the form
    /// {material, axis, model: "sellmeier", coefficients, range_um, source}.
    static SellmeierSet from_json(const nlohmann::json& j) {
        SellmeierSet set;
        const auto parse_one = [&set](const nlohmann::json& e) {
            if (e.at("model").get<std::string>() != "sellmeier")
                throw ConfigError("SellmeierSet: unsupported model '" +
                                  e.at("model").get<std::string>() + "'");
            Axis ax;
            ax.coefficients = e.at("coefficients").get<std::vector<double>>();
            if (ax.coefficients.empty() || ax.coefficients.size() % 2 != 0)
                throw ConfigError("SellmeierSet: coefficients must be (B, C) pairs");
            const auto range = e.at("range_um").get<std::vector<double>>();
            if (range.size() != 2 || !(range[0] < range[1]))
                throw ConfigError("SellmeierSet: range_um must be [lo, hi] with lo < hi");
            ax.range_lo_um = range[0];
            ax.range_hi_um = range[1];
            ax.source = e.value("source", "");
            const auto mat = e.at("material").get<std::string>();
            if (set.material.empty()) set.material = mat;
            set.axes[e.at("axis").get<std::string>()] = std::move(ax);
        };
        if (j.is_array())
            for (const auto& e : j) parse_one(e);
        else
            parse_one(j);
        if (set.axes.empty()) throw ConfigError("SellmeierSet: no axis entries");
        return set;
    }

    static SellmeierSet load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("SellmeierSet: cannot open " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

/// Refractive index at lambda (micrometers) on the given axis.
inline double sellmeier_index(const SellmeierSet& set, double lambda_um,
                              const std::string& axis) {
    const auto& ax = set.axis(axis);
    if (lambda_um < ax.range_lo_um || lambda_um > ax.range_hi_um)
        throw ConfigError("sellmeier_index: lambda " + std::to_string(lambda_um) +
                          " um outside validity range of " + set.material);
    const double l2 = lambda_um * lambda_um;
    double n2 = 1.0;
    for (std::size_t i = 0; i + 1 < ax.coefficients.size(); i += 2)
        n2 += ax.coefficients[i] * l2 / (l2 - ax.coefficients[i + 1]);
    if (!(n2 > 1.0))
        throw ConfigError("sellmeier_index: n^2 <= 1, model invalid at this wavelength");
    return std::sqrt(n2);
}

/// Escort carrier wavelength from photon energy conservation:
/// 1/lambda3 = 1/lambda_in - 1/lambda_out.
inline double escort_wavelength(double lambda_in, double lambda_out) {
    if (!(lambda_in > 0.0) || !(lambda_out > lambda_in))
        throw ConfigError("escort_wavelength: requires lambda_out > lambda_in > 0");
    return lambda_in * lambda_out / (lambda_out - lambda_in);
}

/// Group-velocity and dispersion parameters of a conversion triple.
/// Wavelengths in nm, velocities in m/s, GVD in m^2/s.
struct DispersionTriple {
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double v1 = 0.0, v2 = 0.0, v3 = 0.0;
    double v = 0.0;    // (v1 - v2)/2
    double v_e = 0.0;  // v3 - (v1 + v2)/2
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
    double u = 0.0, u_e = 0.0;
};

namespace detail {

struct IndexDerivatives {
    double n = 0.0;
    double dn = 0.0;   // per um
    double d2n = 0.0;  // per um^2
};

// Richardson-extrapolated central differences on steps {4h, 2h, h} with
// relative step h = 1e-4 lambda, two extrapolation levels. Throws if the
// levels disagree beyond 1e-6 relative.
inline IndexDerivatives index_derivatives(const SellmeierSet& set, double lambda_um,
                                          const std::string& axis) {
    const double h = 1e-4 * lambda_um;
    const auto n_at = [&](double l) { return sellmeier_index(set, l, axis); };

    IndexDerivatives out;
    out.n = n_at(lambda_um);

    const auto richardson = [](double a4, double a2, double a1) {
        const double r1 = (4.0 * a2 - a4) / 3.0;
        const double r1b = (4.0 * a1 - a2) / 3.0;
        const double r2 = (16.0 * r1b - r1) / 15.0;
        const double scale = std::max({std::abs(r2), std::abs(a1), 1e-30});
        if (std::abs(r2 - r1b) > 1e-6 * scale)
            throw Error("group_params: derivative extrapolation did not converge");
        return r2;
    };

    const auto d1 = [&](double hh) { return (n_at(lambda_um + hh) - n_at(lambda_um - hh)) / (2.0 * hh); };
    const auto d2 = [&](double hh) {
        return (n_at(lambda_um + hh) - 2.0 * out.n + n_at(lambda_um - hh)) / (hh * hh);
    };
    out.dn = richardson(d1(4.0 * h), d1(2.0 * h), d1(h));
    out.d2n = richardson(d2(4.0 * h), d2(2.0 * h), d2(h));
    return out;
}

} // namespace detail

/// Group velocities v_g = c / (n - lambda dn/dlambda) and GVD
/// beta = -c lambda^3 n'' / (2 pi n_g^3) for the three modes, plus the GVM
/// parameters v, v_e and their dimensionless forms u = v/v0, u_e = v_e/v0
/// with v0 = Omega L / (2 pi). Omega in rad/s, L in meters.
inline DispersionTriple group_params(const SellmeierSet& set, double lambda1_nm,
                                     double lambda2_nm, double lambda3_nm,
                                     const std::vector<std::string>& axes, double omega,
                                     double L) {
    if (axes.size() != 3) throw ConfigError("group_params: need one axis per mode");
    if (!(omega > 0.0) || !(L > 0.0))
        throw ConfigError("group_params: Omega and L must be > 0");
    const double inv_match = std::abs(1.0 / lambda1_nm - 1.0 / lambda2_nm);
    if (std::abs(inv_match - 1.0 / lambda3_nm) > 1e-6 * (1.0 / lambda3_nm))
        throw ConfigError("group_params: energy conservation 1/l3 = |1/l1 - 1/l2| violated");

    DispersionTriple t;
    t.lambda1 = lambda1_nm;
    t.lambda2 = lambda2_nm;
    t.lambda3 = lambda3_nm;

    const double lams[3] = {lambda1_nm, lambda2_nm, lambda3_nm};
    double vg[3], beta[3];
    for (int i = 0; i < 3; ++i) {
        const double l_um = lams[i] * 1e-3;
        const auto d = detail::index_derivatives(set, l_um, axes[static_cast<std::size_t>(i)]);
        const double ng = d.n - l_um * d.dn;
        vg[i] = speed_of_light / ng;
        // n'' per um^2 and lambda^3 in um^3 combine to um = 1e-6 m.
        beta[i] = -speed_of_light * (l_um * l_um * l_um) * d.d2n / (2.0 * pi * ng * ng * ng) * 1e-6;
    }
    t.v1 = vg[0];
    t.v2 = vg[1];
    t.v3 = vg[2];
    t.beta1 = beta[0];
    t.beta2 = beta[1];
    t.beta3 = beta[2];
    t.v = 0.5 * (t.v1 - t.v2);
    t.v_e = t.v3 - 0.5 * (t.v1 + t.v2);
    const double v0 = omega * L / (2.0 * pi);
    t.u = t.v / v0;
    t.u_e = t.v_e / v0;
    return t;
}

} // namespace qwc
