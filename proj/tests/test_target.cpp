#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "polyflow/grid.hpp"
#include "polyflow/target.hpp"

using namespace polyflow;

TEST_CASE("sphere construction guards") {
    CHECK_THROWS_AS(make_sphere(3, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(make_sphere(3, 0.45, 0.5, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(make_sphere(1), std::invalid_argument);
    const TargetManifold tm = make_sphere();
    CHECK(tm.l == 3);
}

TEST_CASE("projection is identity on the sphere and radial outside") {
    const TargetManifold tm = make_sphere();
    std::mt19937 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> y = {g(rng), g(rng), g(rng)};
        double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        if (r < 1e-6) continue;
        // On the sphere.
        std::vector<double> u = {y[0] / r, y[1] / r, y[2] / r};
        const std::vector<double> pu = project(tm, u);
        for (int c = 0; c < 3; ++c) CHECK(std::abs(pu[c] - u[c]) < 1e-14);
        // Outside the blend band: exact normalization.
        std::vector<double> v = {1.7 * u[0], 1.7 * u[1], 1.7 * u[2]};
        const std::vector<double> pv = project(tm, v);
        for (int c = 0; c < 3; ++c) CHECK(std::abs(pv[c] - u[c]) < 1e-14);
    }
    // Vanishes below the inner cutoff.
    const std::vector<double> small = {0.1, 0.05, -0.08};
    for (double c : project(tm, small)) CHECK(c == 0.0);
}

TEST_CASE("projection is smooth across the blend band") {
    const TargetManifold tm = make_sphere();
    // March |y| through the band and watch the radial factor stay C^1-flat
    // at the edges.
    auto radial = [&](double r) {
        const std::vector<double> y = {r, 0.0, 0.0};
        return project(tm, y)[0];
    };
    CHECK(std::abs(radial(tm.cutoff_inner) - 0.0) < 1e-14);
    CHECK(std::abs(radial(tm.cutoff_outer) - 1.0) < 1e-14);
    const double eps = 1e-6;
    CHECK(std::abs(radial(tm.cutoff_inner + eps) - radial(tm.cutoff_inner)) < 1e-10);
    CHECK(std::abs(radial(tm.cutoff_outer) - radial(tm.cutoff_outer - eps)) < 1e-10);
}

TEST_CASE("jacobian matches finite differences") {
    const TargetManifold tm = make_sphere();
    std::mt19937 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        double y[3] = {g(rng), g(rng), g(rng)};
        double J[9];
        projection_jacobian(tm, y, J);
        const double h = 1e-6;
        for (int b = 0; b < 3; ++b) {
            double yp[3] = {y[0], y[1], y[2]}, ym[3] = {y[0], y[1], y[2]};
            yp[b] += h;
            ym[b] -= h;
            double pp[3], pm[3];
            project(tm, yp, pp);
            project(tm, ym, pm);
            for (int a = 0; a < 3; ++a)
                CHECK(std::abs(J[a * 3 + b] - (pp[a] - pm[a]) / (2.0 * h)) < 5e-6);
        }
        // Symmetry.
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(std::abs(J[a * 3 + b] - J[b * 3 + a]) < 1e-12);
    }
}

TEST_CASE("on-sphere jacobian is the tangent projector") {
    const TargetManifold tm = make_sphere();
    double u[3] = {0.6, 0.0, 0.8};
    double J[9];
    projection_jacobian(tm, u, J);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double expect = (a == b ? 1.0 : 0.0) - u[a] * u[b];
            CHECK(std::abs(J[a * 3 + b] - expect) < 1e-13);
        }
}

TEST_CASE("second fundamental form against the hessian oracle") {
    // A(y)(v,w) = -D^2 Pi(y)(v,w) for unit y and tangent v, w; centered
    // second differences of the projection supply the oracle.
    const TargetManifold tm = make_sphere();
    const std::vector<double> y = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    std::vector<double> v = {1.0, -1.0, 0.0}, w = {1.0, 1.0, -2.0};
    for (auto* t : {&v, &w}) {
        double n = 0.0;
        for (double c : *t) n += c * c;
        for (double& c : *t) c /= std::sqrt(n);
    }
    const std::vector<double> a = second_fundamental(tm, y, v, w);
    // Closed form on the sphere: (v . w) y = 0 here since v, w orthogonal.
    for (double c : a) CHECK(std::abs(c) < 1e-12);

    const std::vector<double> avv = second_fundamental(tm, y, v, v);
    const double h = 1e-4;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> yp = y, ym = y;
        for (int d = 0; d < 3; ++d) {
            yp[d] += h * v[d];
            ym[d] -= h * v[d];
        }
        const double hess =
            (project(tm, yp)[c] - 2.0 * project(tm, y)[c] + project(tm, ym)[c]) / (h * h);
        CHECK(std::abs(avv[c] + hess) < 1e-5);
    }
}

TEST_CASE("second fundamental form rejects bad input") {
    const TargetManifold tm = make_sphere();
    const std::vector<double> y = {1.0, 0.0, 0.0};
    const std::vector<double> tangent = {0.0, 1.0, 0.0};
    const std::vector<double> not_tangent = {0.5, 1.0, 0.0};
    CHECK_THROWS_AS(second_fundamental(tm, {0.9, 0.0, 0.0}, tangent, tangent),
                    std::invalid_argument);
    CHECK_THROWS_AS(second_fundamental(tm, y, not_tangent, tangent), std::invalid_argument);
}

TEST_CASE("Q and rho vanish exactly on N") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI, 32);
    Field u = sample(g, 3, [](const double* x, double* out) {
        out[0] = std::cos(x[0]);
        out[1] = std::sin(x[0]);
        out[2] = 0.0;
    });
    const QRho qr = q_and_rho(u, tm);
    CHECK(qr.rho_total < 1e-28);
    CHECK(qr.inside_tube);
    for (double v : qr.Q.values) CHECK(std::abs(v) < 1e-15);

    // Push one point off the sphere: rho picks up (1/2) dist^2 weight.
    u.at(0, 5) *= 1.2;
    const QRho qr2 = q_and_rho(u, tm);
    CHECK(qr2.rho_total > 0.0);
    const auto [d, df] = dist_to_N(u);
    CHECK(d == doctest::Approx(std::hypot(1.2 * std::cos(5 * g.h()), std::sin(5 * g.h())) - 1.0));
}

TEST_CASE("tube flag trips beyond delta_N") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 1.0, 8);
    Field u = make_field(g, 3);
    for (std::size_t i = 0; i < g.npts(); ++i) u.at(2, i) = 1.0;
    u.at(2, 0) = 1.0 + tm.delta_N + 0.01;
    CHECK(!q_and_rho(u, tm).inside_tube);
}
