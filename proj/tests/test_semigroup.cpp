#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "polyflow/grid.hpp"
#include "polyflow/semigroup.hpp"

using namespace polyflow;

TEST_CASE("phi functions against quad-careful references") {
    CHECK(phi1(0.0) == 1.0);
    CHECK(phi2(0.0) == 0.5);
    CHECK(phi1(1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(phi2(-2.0) == doctest::Approx((std::exp(-2.0) - 1.0 + 2.0) / 4.0).epsilon(1e-14));
    // Series branch continuity.
    for (double z : {1e-5, -1e-5, 9.9e-5, -9.9e-5, 1.1e-4, -1.1e-4}) {
        CHECK(phi1(z) == doctest::Approx(1.0 + z / 2.0 + z * z / 6.0).epsilon(1e-12));
        CHECK(phi2(z) == doctest::Approx(0.5 + z / 6.0 + z * z / 24.0).epsilon(1e-12));
    }
}

TEST_CASE("free evolution damps single modes exactly") {
    const GridSpec g = make_grid(1, 2.0 * M_PI, 64);
    for (int m : {1, 2, 3}) {
        const int q = 3;
        Field u0 = sample(g, 1, [&](const double* x, double* out) { out[0] = std::cos(q * x[0]); });
        const double t = 0.01;
        const Field ut = apply_G(u0, m, t);
        const double factor = std::exp(-t * std::pow(static_cast<double>(q * q), m));
        Field expect = sample(
            g, 1, [&](const double* x, double* out) { out[0] = factor * std::cos(q * x[0]); });
        CHECK(max_abs_diff(ut, expect) < 1e-12);
    }
}

TEST_CASE("gaussian variance grows by 2t under the m=1 semigroup") {
    // Periodized gaussian with sigma^2 = 1 evolves to sigma^2 = 1 + 2t.
    const GridSpec g = make_grid(1, 40.0, 512);
    auto gauss = [&](double s2) {
        return sample(g, 1, [&](const double* x, double* out) {
            double acc = 0.0;
            for (int im = -3; im <= 3; ++im) {
                const double d = x[0] - 20.0 + im * g.length;
                acc += std::exp(-d * d / (2.0 * s2)) / std::sqrt(2.0 * M_PI * s2);
            }
            out[0] = acc;
        });
    };
    const double t = 0.7;
    const Field evolved = apply_G(gauss(1.0), 1, t);
    CHECK(max_abs_diff(evolved, gauss(1.0 + 2.0 * t)) < 1e-10);
}

TEST_CASE("semigroup property") {
    const GridSpec g = make_grid(1, 10.0, 64);
    Field u0 = sample(g, 1, [](const double* x, double* out) {
        out[0] = std::sin(2.0 * M_PI * x[0] / 10.0) + 0.5 * std::cos(6.0 * M_PI * x[0] / 10.0);
    });
    for (int m : {1, 2}) {
        const Field one = apply_G(u0, m, 0.3);
        const Field two = apply_G(apply_G(u0, m, 0.1), m, 0.2);
        CHECK(max_abs_diff(one, two) < 1e-13);
    }
}

TEST_CASE("duhamel: constant forcing closed form") {
    // f(x,t) = c(x) constant in time: S f(t) = (1 - e^{-t lambda})/lambda * c
    // per mode; exact for the piecewise-linear reconstruction.
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 64);
    const int m = 1;
    const double T = 0.5;
    const std::size_t M = 256;
    const double q = 2.0 / 8.0;  // mode k=2, xi = 1/4
    Trajectory f = make_trajectory(g, 1, T, M);
    for (std::size_t j = 0; j < f.fields.size(); ++j)
        for (std::size_t i = 0; i < g.npts(); ++i)
            f.fields[j].at(0, i) = std::cos(q * coord(g, static_cast<int>(i)));
    const Trajectory s = apply_S(f, m, DuhamelScheme{2, f.dt()});
    const double lam = std::pow(q * q, m);
    for (std::size_t j = 0; j < s.fields.size(); ++j) {
        const double amp = (1.0 - std::exp(-s.times[j] * lam)) / lam;
        for (std::size_t i = 0; i < g.npts(); i += 7) {
            const double expect = amp * std::cos(q * coord(g, static_cast<int>(i)));
            CHECK(std::abs(s.fields[j].at(0, i) - expect) < 1e-10);
        }
    }
}

TEST_CASE("duhamel: resonant forcing on a slow mode") {
    // f = e^{-lambda t} c(x) drives S f(t) = t e^{-lambda t} c; the scheme is
    // second order, so a slow mode reaches 1e-10 at dt = T/256.
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 64);
    const int m = 1;
    const double T = 0.5;
    const std::size_t M = 256;
    const double q = 1.0 / 8.0;
    const double lam = q * q;
    Trajectory f = make_trajectory(g, 1, T, M);
    for (std::size_t j = 0; j < f.fields.size(); ++j) {
        const double w = std::exp(-lam * f.times[j]);
        for (std::size_t i = 0; i < g.npts(); ++i)
            f.fields[j].at(0, i) = w * std::cos(q * coord(g, static_cast<int>(i)));
    }
    const Trajectory s = apply_S(f, m, DuhamelScheme{2, f.dt()});
    double worst = 0.0;
    for (std::size_t j = 0; j < s.fields.size(); ++j) {
        const double amp = s.times[j] * std::exp(-lam * s.times[j]);
        for (std::size_t i = 0; i < g.npts(); i += 5) {
            const double expect = amp * std::cos(q * coord(g, static_cast<int>(i)));
            worst = std::max(worst, std::abs(s.fields[j].at(0, i) - expect));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("first order scheme is only first order") {
    const GridSpec g = make_grid(1, 2.0 * M_PI, 32);
    const double T = 0.5;
    auto run = [&](std::size_t M, int order) {
        Trajectory f = make_trajectory(g, 1, T, M);
        for (std::size_t j = 0; j < f.fields.size(); ++j)
            for (std::size_t i = 0; i < g.npts(); ++i)
                f.fields[j].at(0, i) = std::sin(f.times[j]) * std::cos(coord(g, static_cast<int>(i)));
        const Trajectory s = apply_S(f, 1, DuhamelScheme{order, f.dt()});
        // Reference: lambda = 1, forced response of sin(t).
        // integral e^{-(t-s)} sin(s) ds = (sin t - cos t + e^{-t})/2.
        const double t = T;
        const double exact = 0.5 * (std::sin(t) - std::cos(t) + std::exp(-t));
        return std::abs(s.fields.back().at(0, 0) - exact);
    };
    const double e1a = run(64, 1), e1b = run(128, 1);
    const double e2a = run(64, 2), e2b = run(128, 2);
    CHECK(e1a / e1b > 1.7);  // ~ first order
    CHECK(e1a / e1b < 2.4);
    CHECK(e2a / e2b > 3.4);  // ~ second order
    CHECK(e2b < e1b);
}

TEST_CASE("duhamel residual identifies the mild decomposition") {
    const GridSpec g = make_grid(1, 2.0 * M_PI, 32);
    const double T = 0.25;
    const std::size_t M = 64;
    Field u0 = sample(g, 1, [](const double* x, double* out) { out[0] = std::cos(x[0]); });
    Trajectory f = make_trajectory(g, 1, T, M);
    for (std::size_t j = 0; j < f.fields.size(); ++j)
        for (std::size_t i = 0; i < g.npts(); ++i)
            f.fields[j].at(0, i) = std::sin(2.0 * coord(g, static_cast<int>(i)));
    // u := G u0 + S f satisfies residual ~ 0.
    Trajectory u = g_trajectory(u0, 1, T, M);
    const Trajectory s = apply_S(f, 1, DuhamelScheme{2, f.dt()});
    for (std::size_t j = 0; j < u.fields.size(); ++j)
        for (std::size_t i = 0; i < u.fields[j].values.size(); ++i)
            u.fields[j].values[i] += s.fields[j].values[i];
    CHECK(duhamel_residual(u, f, u0, 1, 2) < 1e-12);
    // Breaking the decomposition is detected.
    u.fields[3].values[0] += 0.01;
    CHECK(duhamel_residual(u, f, u0, 1, 2) > 0.005);
}

TEST_CASE("scheme validation") {
    const GridSpec g = make_grid(1, 1.0, 8);
    Trajectory f = make_trajectory(g, 1, 1.0, 8);
    CHECK_THROWS_AS(apply_S(f, 1, DuhamelScheme{3, f.dt()}), std::invalid_argument);
    CHECK_THROWS_AS(apply_S(f, 1, DuhamelScheme{2, 0.5 * f.dt()}), std::invalid_argument);
}
