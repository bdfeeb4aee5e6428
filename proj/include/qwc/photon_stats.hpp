#pragma once

#include <cmath>
#include <vector>

#include "qwc/errors.hpp"
#include "qwc/math.hpp"

namespace qwc {

/// Number-state expansion sum_n c_n |n> of the single-mode input state,
/// with the two moments entering the error theory.
struct PhotonStatistics {
    std::vector<cplx> coefficients;  // normalized, index = photon number
    double n_mean = 0.0;             // <n>
    double n_pair = 0.0;             // <n(n-1)>
};

/// Normalizes the coefficient list and computes the moments.
inline PhotonStatistics photon_stats(const std::vector<cplx>& c) {
    double total = 0.0;
    for (const cplx& v : c) total += std::norm(v);
    if (!(total > 0.0)) throw ConfigError("PhotonStatistics: all-zero coefficient list");

    PhotonStatistics st;
    st.coefficients.resize(c.size());
    const double scale = 1.0 / std::sqrt(total);
    for (std::size_t n = 0; n < c.size(); ++n) {
        st.coefficients[n] = c[n] * scale;
        const double p = std::norm(st.coefficients[n]);
        const double nn = static_cast<double>(n);
        st.n_mean += nn * p;
        st.n_pair += nn * (nn - 1.0) * p;
    }
    return st;
}

/// Number state |n>.
inline PhotonStatistics fock_state(int n) {
    if (n < 0) throw ConfigError("fock_state: photon number must be >= 0");
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1, 0.0);
    c.back() = 1.0;
    return photon_stats(c);
}

} // namespace qwc
