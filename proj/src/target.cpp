#include "polyflow/target.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polyflow {

namespace {

// Quintic smoothstep in s = |y|^2, C2-matched at both ends of the blend band.
double quintic(double tau) { return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau)); }
double quintic_d(double tau) { return 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau); }

struct RadialBlend {
    double phi;   // extension is phi(|y|^2) * y
    double dphi;  // d phi / d s
};

RadialBlend blend(const TargetManifold& tm, double s) {
    const double s_in = tm.cutoff_inner * tm.cutoff_inner;
    const double s_out = tm.cutoff_outer * tm.cutoff_outer;
    if (s >= s_out) {
        const double r = std::sqrt(s);
        return {1.0 / r, -0.5 / (s * r)};
    }
    if (s <= s_in) return {0.0, 0.0};
    const double ds = s_out - s_in;
    const double tau = (s - s_in) / ds;
    const double q = quintic(tau);
    const double r = std::sqrt(s);
    return {q / r, quintic_d(tau) / (ds * r) - 0.5 * q / (s * r)};
}

double norm_sq(const double* y, int l) {
    double s = 0.0;
    for (int a = 0; a < l; ++a) s += y[a] * y[a];
    return s;
}

}  // namespace

TargetManifold make_sphere(int l, double delta_N, double cutoff_inner, double cutoff_outer) {
    if (l < 2) throw std::invalid_argument("target: embedding dimension must be >= 2");
    if (!(delta_N > 0.0 && delta_N < 0.5))
        throw std::invalid_argument("target: delta_N must lie in (0, 1/2)");
    if (!(0.0 < cutoff_inner && cutoff_inner < cutoff_outer && cutoff_outer <= 1.0 - delta_N))
        throw std::invalid_argument("target: cutoff band must sit inside the singular-free ball");
    return {l, delta_N, cutoff_inner, cutoff_outer};
}

void project(const TargetManifold& tm, const double* y, double* out) {
    const RadialBlend b = blend(tm, norm_sq(y, tm.l));
    for (int a = 0; a < tm.l; ++a) out[a] = b.phi * y[a];
}

std::vector<double> project(const TargetManifold& tm, const std::vector<double>& y) {
    if (static_cast<int>(y.size()) != tm.l) throw std::invalid_argument("project: wrong point dimension");
    std::vector<double> out(tm.l);
    project(tm, y.data(), out.data());
    return out;
}

Field project(const TargetManifold& tm, const Field& u) {
    if (u.comps != tm.l) throw std::invalid_argument("project: field components != target dimension");
    Field out = make_field(u.spec, u.comps, u.time);
    const std::size_t np = u.spec.npts();
    std::vector<double> y(tm.l), p(tm.l);
    for (std::size_t i = 0; i < np; ++i) {
        for (int a = 0; a < tm.l; ++a) y[a] = u.at(a, i);
        project(tm, y.data(), p.data());
        for (int a = 0; a < tm.l; ++a) out.at(a, i) = p[a];
    }
    return out;
}

void projection_jacobian(const TargetManifold& tm, const double* y, double* J) {
    const RadialBlend b = blend(tm, norm_sq(y, tm.l));
    for (int a = 0; a < tm.l; ++a)
        for (int c = 0; c < tm.l; ++c)
            J[a * tm.l + c] = 2.0 * b.dphi * y[a] * y[c] + (a == c ? b.phi : 0.0);
}

QRho q_and_rho(const Field& u, const TargetManifold& tm) {
    if (u.comps != tm.l) throw std::invalid_argument("q_and_rho: field components != target dimension");
    QRho qr;
    qr.Q = make_field(u.spec, u.comps, u.time);
    const std::size_t np = u.spec.npts();
    std::vector<double> y(tm.l), p(tm.l);
    double rho = 0.0;
    double max_dist = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        for (int a = 0; a < tm.l; ++a) y[a] = u.at(a, i);
        project(tm, y.data(), p.data());
        double qsq = 0.0;
        for (int a = 0; a < tm.l; ++a) {
            const double q = y[a] - p[a];
            qr.Q.at(a, i) = q;
            qsq += q * q;
        }
        rho += 0.5 * qsq;
        max_dist = std::max(max_dist, std::abs(std::sqrt(norm_sq(y.data(), tm.l)) - 1.0));
    }
    qr.rho_total = rho * u.spec.cell_volume();
    qr.inside_tube = max_dist < tm.delta_N;
    return qr;
}

std::vector<double> second_fundamental(const TargetManifold& tm, const std::vector<double>& y,
                                       const std::vector<double>& v, const std::vector<double>& w) {
    if (static_cast<int>(y.size()) != tm.l || static_cast<int>(v.size()) != tm.l ||
        static_cast<int>(w.size()) != tm.l)
        throw std::invalid_argument("second_fundamental: wrong dimensions");
    const double r = std::sqrt(norm_sq(y.data(), tm.l));
    if (std::abs(r - 1.0) > 1e-10)
        throw std::invalid_argument("second_fundamental: base point must lie on the sphere");
    double yv = 0.0, yw = 0.0, vw = 0.0;
    for (int a = 0; a < tm.l; ++a) {
        yv += y[a] * v[a];
        yw += y[a] * w[a];
        vw += v[a] * w[a];
    }
    if (std::abs(yv) > 1e-10 || std::abs(yw) > 1e-10) {
        std::ostringstream msg;
        msg << "second_fundamental: non-tangent input, y.v = " << yv << ", y.w = " << yw;
        throw std::invalid_argument(msg.str());
    }
    std::vector<double> out(tm.l);
    for (int a = 0; a < tm.l; ++a) out[a] = vw * y[a];
    return out;
}

std::pair<double, Field> dist_to_N(const Field& u) {
    Field d = make_field(u.spec, 1, u.time);
    const std::size_t np = u.spec.npts();
    double max_dist = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        double s = 0.0;
        for (int c = 0; c < u.comps; ++c) s += u.at(c, i) * u.at(c, i);
        const double dist = std::abs(std::sqrt(s) - 1.0);
        d.at(0, i) = dist;
        max_dist = std::max(max_dist, dist);
    }
    return {max_dist, std::move(d)};
}

}  // namespace polyflow
