#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "polyflow/grid.hpp"
#include "polyflow/nonlinearity.hpp"
#include "polyflow/target.hpp"

using namespace polyflow;

namespace {

Field equator_wrap(const GridSpec& g, int k) {
    const double b = 2.0 * M_PI / g.length;
    return sample(g, 3, [=](const double* x, double* out) {
        out[0] = std::cos(k * b * x[0]);
        out[1] = std::sin(k * b * x[0]);
        out[2] = 0.0;
    });
}

Field bump_map(const GridSpec& g, double a, double kappa) {
    return sample(g, 3, [=](const double* x, double* out) {
        const double th = a * std::exp(kappa * (std::cos(2.0 * M_PI * x[0] / g.length) - 1.0));
        out[0] = std::sin(th);
        out[1] = 0.0;
        out[2] = std::cos(th);
    });
}

}  // namespace

TEST_CASE("multi index enumeration and multinomials") {
    CHECK(multi_indices(1, 3).size() == 1);
    CHECK(multi_indices(2, 2).size() == 3);  // (2,0),(1,1),(0,2)
    CHECK(multi_indices(3, 2).size() == 6);
    CHECK(multinomial({2, 0, 0}) == 1.0);
    CHECK(multinomial({1, 1, 0}) == 2.0);
    CHECK(multinomial({1, 1, 1}) == 6.0);
    // Sum of multiplicities recovers n^r.
    double total = 0.0;
    for (const MultiIndex& a : multi_indices(3, 3)) total += multinomial(a);
    CHECK(total == 27.0);
}

TEST_CASE("tensor magnitude matches the direct gradient norm") {
    const GridSpec g = make_grid(2, 2.0 * M_PI, 32);
    Field f = sample(g, 1, [](const double* x, double* out) {
        out[0] = std::sin(2.0 * x[0]) * std::cos(x[1]);
    });
    const TensorField t = grad_tensor(to_spectral(f), 1);
    const Field mag = tensor_magnitude(t);
    Field expect = sample(g, 1, [](const double* x, double* out) {
        const double fx = 2.0 * std::cos(2.0 * x[0]) * std::cos(x[1]);
        const double fy = -std::sin(2.0 * x[0]) * std::sin(x[1]);
        out[0] = std::hypot(fx, fy);
    });
    CHECK(max_abs_diff(mag, expect) < 1e-10);
}

TEST_CASE("hessian magnitude counts mixed entries twice") {
    const GridSpec g = make_grid(2, 2.0 * M_PI, 32);
    Field f = sample(g, 1, [](const double* x, double* out) { out[0] = std::sin(x[0] + x[1]); });
    const Field mag = tensor_magnitude(grad_tensor(to_spectral(f), 2));
    // Hessian of sin(x+y) has all four entries -sin(x+y): |H| = 2|sin|.
    Field expect = sample(
        g, 1, [](const double* x, double* out) { out[0] = 2.0 * std::abs(std::sin(x[0] + x[1])); });
    CHECK(max_abs_diff(mag, expect) < 1e-9);
}

TEST_CASE("div_k is the contracted spectral divergence") {
    const GridSpec g = make_grid(2, 2.0 * M_PI, 32);
    // Rank-1 tensor T = (sin x cos y, cos x sin y); div T = 2 cos x cos y.
    TensorField t;
    t.spec = g;
    t.rank = 1;
    t.comps = 1;
    t.idx = multi_indices(2, 1);
    t.entry.push_back(
        sample(g, 1, [](const double* x, double* out) { out[0] = std::sin(x[0]) * std::cos(x[1]); }));
    t.entry.push_back(
        sample(g, 1, [](const double* x, double* out) { out[0] = std::cos(x[0]) * std::sin(x[1]); }));
    const Field d = div_k(t);
    Field expect = sample(
        g, 1, [](const double* x, double* out) { out[0] = 2.0 * std::cos(x[0]) * std::cos(x[1]); });
    CHECK(max_abs_diff(d, expect) < 1e-10);
}

TEST_CASE("jacobian field is the tangent projector on the sphere") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI, 32);
    const Field u = equator_wrap(g, 2);
    const Field J = jacobian_field(u, tm);
    for (std::size_t i = 0; i < g.npts(); i += 3)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const double expect = (a == b ? 1.0 : 0.0) - u.at(a, i) * u.at(b, i);
                CHECK(std::abs(J.at(a * 3 + b, i) - expect) < 1e-13);
            }
}

TEST_CASE("composite derivatives obey the chain rule") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 128);
    const Field u = bump_map(g, 0.6, 2.0);
    const CompositeDerivs cd = composite_derivatives(u, tm, 2);
    CHECK(cd.resolved);
    REQUIRE(cd.grads.size() == 2);

    // First derivative: d_x ext(u) = J(u) d_x u, both sides spectral.
    const TensorField du = grad_tensor(to_spectral(u), 1);
    const Field J = jacobian_field(u, tm);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.npts(); ++i)
        for (int a = 0; a < 3; ++a) {
            double rhs = 0.0;
            for (int b = 0; b < 3; ++b) rhs += J.at(a * 3 + b, i) * du.entry[0].at(b, i);
            worst = std::max(worst, std::abs(cd.grads[0].entry[0].at(a, i) - rhs));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("m=1 nonlinearity oracle: equator wrap gives q^2 u") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 64);
    const int k = 2;
    const double q = k * 2.0 * M_PI / g.length;
    const Field u = equator_wrap(g, k);
    const Field f = f_tilde(u, tm, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.npts(); ++i)
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(f.at(c, i) - q * q * u.at(c, i)));
    CHECK(worst < 1e-8);
}

TEST_CASE("wrap is stationary for every flow order: f_tilde = q^{2m} u") {
    // The wrap is harmonic, hence polyharmonic; the flow's right side must
    // cancel (-1)^m Delta^m u = (-1)^m (-q^2)^m u exactly.
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 64);
    const int k = 2;
    const double q = k * 2.0 * M_PI / g.length;
    const Field u = equator_wrap(g, k);
    for (int m : {1, 2, 3}) {
        const Field f = f_tilde(u, tm, m);
        const double lam = std::pow(q * q, m);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.npts(); ++i)
            for (int c = 0; c < 3; ++c)
                worst = std::max(worst, std::abs(f.at(c, i) - lam * u.at(c, i)));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("trace form agrees with the divergence form, m=1") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 128);
    for (const Field& u : {equator_wrap(g, 1), equator_wrap(g, 2), bump_map(g, 0.8, 3.0),
                           bump_map(g, 0.3, 1.0)}) {
        const Field fd = f_tilde(u, tm, 1);
        const Field fg = f_gastel_m1(u, tm);
        CHECK(max_abs_diff(fd, fg) < 1e-8);
    }
    CHECK_THROWS_AS(f_gastel_m1(equator_wrap(g, 1), tm, 2), std::invalid_argument);
}

TEST_CASE("f_k ranks and free indices") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 64);
    const Field u = bump_map(g, 0.5, 2.0);
    for (int m : {2, 3})
        for (int k = 0; k <= m - 1; ++k) {
            const TensorField t = f_k(u, k, tm, m);
            CHECK(t.rank == k);
            CHECK(static_cast<int>(t.idx.size()) == static_cast<int>(multi_indices(g.n, k).size()));
        }
}

TEST_CASE("divergence assembly matches f_tilde") {
    const TargetManifold tm = make_sphere();
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 64);
    const Field u = bump_map(g, 0.5, 2.0);
    for (int m : {1, 2}) {
        Field acc = make_field(g, 3);
        for (int k = 0; k <= m - 1; ++k) {
            const Field dk = div_k(f_k(u, k, tm, m));
            for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += dk.values[i];
        }
        CHECK(max_abs_diff(acc, f_tilde(u, tm, m)) < 1e-12);
    }
}

TEST_CASE("energy of the wrap") {
    const GridSpec g = make_grid(1, 2.0 * M_PI * 8.0, 64);
    const int k = 2;
    const double q = k * 2.0 * M_PI / g.length;
    const Field u = equator_wrap(g, k);
    for (int m : {1, 2, 3})
        CHECK(energy_m(u, m) == doctest::Approx(0.5 * std::pow(q, 2 * m) * g.length).epsilon(1e-10));
}
