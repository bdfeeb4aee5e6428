#include <catch2/catch.hpp>

#include <cmath>
#include <limits>

#include "qwc/math.hpp"

using namespace qwc;

namespace {

// Independent oracle: bracketed bisection on std::erf, no shared code with
// the rational-approximation path under test.
double erf_inv_bisect(double x) {
    double lo = 0.0, hi = 8.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::erf(mid) < std::abs(x) ? lo : hi) = mid;
    }
    return x < 0 ? -0.5 * (lo + hi) : 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("erf_inv inverts erf to near machine precision") {
    for (double x : {1e-12, 1e-6, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999, 1.0 - 1e-9, 1.0 - 1e-13}) {
        const double y = erf_inv(x);
        CHECK(std::erf(y) == Approx(x).epsilon(1e-14).margin(1e-300));
        CHECK(erf_inv(-x) == -y);  // odd by construction
    }
}

TEST_CASE("erf_inv matches bisection oracle") {
    for (double x : {0.05, 0.25, 0.6180339887, 0.95, 0.9999}) {
        CHECK(erf_inv(x) == Approx(erf_inv_bisect(x)).epsilon(1e-12));
    }
}

TEST_CASE("erf_inv edge cases") {
    CHECK(erf_inv(0.0) == 0.0);
    CHECK(std::isinf(erf_inv(1.0)));
    CHECK(erf_inv(-1.0) == -std::numeric_limits<double>::infinity());
    CHECK(std::isnan(erf_inv(1.5)));
    CHECK(std::isnan(erf_inv(-2.0)));
}

TEST_CASE("power-of-two helpers") {
    CHECK(is_power_of_two(64));
    CHECK_FALSE(is_power_of_two(100));
    CHECK_FALSE(is_power_of_two(0));
    CHECK(next_power_of_two(1600) == 2048);
    CHECK(next_power_of_two(2048) == 2048);
}

TEST_CASE("cumtrapz integrates a linear function exactly") {
    std::vector<double> f = {0.0, 1.0, 2.0, 3.0};
    auto F = cumtrapz(f, 0.5);
    CHECK(F[0] == 0.0);
    CHECK(F[3] == Approx(2.25).epsilon(1e-15));
}
