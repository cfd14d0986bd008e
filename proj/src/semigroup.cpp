#include "polyflow/semigroup.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace polyflow {

namespace {

void check_order(int m) {
    if (m < 1 || m > 3) throw std::invalid_argument("semigroup: flow order m must be 1, 2, or 3");
}

// |xi|^{2m} per mode.
std::vector<double> mode_symbols(const GridSpec& spec, int m) {
    std::vector<double> lam(spec.npts());
    const double base = 2.0 * M_PI / spec.length;
    std::array<int, 3> ix{};
    for (std::size_t i = 0; i < spec.npts(); ++i) {
        unflatten(spec, i, ix);
        double s = 0.0;
        for (int d = 0; d < spec.n; ++d) {
            const double xi = base * wavenumber(ix[d], spec.points);
            s += xi * xi;
        }
        lam[i] = std::pow(s, m);
    }
    return lam;
}

}  // namespace

double phi1(double z) {
    if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 1e-4) return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0));
    return (std::expm1(z) - z) / (z * z);
}

SpectralField apply_G(const SpectralField& u0, int m, double t) {
    check_order(m);
    if (t < 0.0) throw std::invalid_argument("apply_G: negative time rejected");
    SpectralField out = u0;
    out.time = u0.time + t;
    const std::vector<double> lam = mode_symbols(u0.spec, m);
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double e = std::exp(-t * lam[i]);
        for (int c = 0; c < u0.comps; ++c) out.at(c, i) *= e;
    }
    return out;
}

Field apply_G(const Field& u0, int m, double t) { return to_field(apply_G(to_spectral(u0), m, t)); }

Trajectory g_trajectory(const Field& u0, int m, double T, std::size_t steps) {
    check_order(m);
    Trajectory tr = make_trajectory(u0.spec, u0.comps, T, steps);
    const SpectralField su0 = to_spectral(u0);
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
        tr.fields[j] = to_field(apply_G(su0, m, tr.times[j]));
        tr.fields[j].time = tr.times[j];
    }
    return tr;
}

Trajectory apply_S(const Trajectory& f, int m, const DuhamelScheme& scheme) {
    check_order(m);
    if (scheme.order != 1 && scheme.order != 2)
        throw std::invalid_argument("apply_S: scheme order must be 1 or 2");
    if (f.times.size() < 2) throw std::invalid_argument("apply_S: need at least two time samples");
    if (!f.uniform()) throw std::invalid_argument("apply_S: forcing must be on a uniform time grid");
    const double dt = f.dt();
    if (std::abs(scheme.dt - dt) > 1e-12 * std::max(1.0, dt))
        throw std::invalid_argument("apply_S: scheme.dt does not match the forcing time grid");

    const GridSpec& spec = f.fields[0].spec;
    const int comps = f.fields[0].comps;
    const std::size_t np = spec.npts();
    const std::vector<double> lam = mode_symbols(spec, m);

    std::vector<double> E(np), w1(np), w2(np);
    for (std::size_t i = 0; i < np; ++i) {
        const double z = -dt * lam[i];
        E[i] = std::exp(z);
        w1[i] = dt * phi1(z);
        w2[i] = dt * phi2(z);
    }

    std::vector<SpectralField> fhat;
    fhat.reserve(f.fields.size());
    for (const Field& fj : f.fields) fhat.push_back(to_spectral(fj));

    Trajectory out;
    out.times = f.times;
    out.fields.reserve(f.fields.size());
    SpectralField w = make_spectral(spec, comps, f.times[0]);
    out.fields.push_back(to_field(w));
    out.fields.back().time = f.times[0];
    for (std::size_t j = 0; j + 1 < f.times.size(); ++j) {
        SpectralField next = make_spectral(spec, comps, f.times[j + 1]);
        for (std::size_t i = 0; i < np; ++i)
            for (int c = 0; c < comps; ++c) {
                std::complex<double> v = E[i] * w.at(c, i) + w1[i] * fhat[j].at(c, i);
                if (scheme.order == 2)
                    v += w2[i] * (fhat[j + 1].at(c, i) - fhat[j].at(c, i));
                next.at(c, i) = v;
            }
        w = std::move(next);
        out.fields.push_back(to_field(w));
        out.fields.back().time = f.times[j + 1];
    }
    return out;
}

double duhamel_residual(const Trajectory& u, const Trajectory& f, const Field& u0, int m,
                        int scheme_order) {
    check_shared_grid(u, f);
    Trajectory sf = apply_S(f, m, DuhamelScheme{scheme_order, f.dt()});
    const SpectralField su0 = to_spectral(u0);
    double res = 0.0;
    for (std::size_t j = 0; j < u.times.size(); ++j) {
        Field g = to_field(apply_G(su0, m, u.times[j]));
        Field diff = u.fields[j];
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= g.values[i] + sf.fields[j].values[i];
        res = std::max(res, sup_norm(diff));
    }
    return res;
}

}  // namespace polyflow
