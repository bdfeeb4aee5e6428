#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qwc/errors.hpp"
#include "qwc/math.hpp"

namespace qwc {

/// Uniform periodic spatial grid z_j = z_min + j*dz, j = 0..n_points-1,
/// with the standard DFT-conjugate wavenumber grid. Lengths are in units of
/// the characteristic length L (internally L = 1).
struct Grid {
    std::int64_t n_points = 0;
    double z_min = 0.0;
    double z_max = 0.0;

    double length() const { return z_max - z_min; }
    double dz() const { return length() / static_cast<double>(n_points); }
    double dk() const { return 2.0 * pi / length(); }
    double z(std::int64_t j) const { return z_min + static_cast<double>(j) * dz(); }

    /// Signed DFT frequency index: 0,1,..,n/2-1,-n/2,..,-1.
    std::int64_t freq_index(std::int64_t m) const {
        return m < n_points / 2 ? m : m - n_points;
    }
    double k(std::int64_t m) const { return dk() * static_cast<double>(freq_index(m)); }
    double k_max() const { return pi / dz(); }

    bool operator==(const Grid&) const = default;
};

/// Validated grid constructor. n_points must be a power of two >= 64 and the
/// interval non-empty.
inline Grid build_grid(std::int64_t n_points, double z_min, double z_max) {
    if (!is_power_of_two(n_points) || n_points < 64)
        throw ConfigError("Grid.n_points: must be a power of two >= 64, got " +
                          std::to_string(n_points));
    if (!(z_max > z_min))
        throw ConfigError("Grid interval: z_max must exceed z_min");
    return Grid{n_points, z_min, z_max};
}

} // namespace qwc
