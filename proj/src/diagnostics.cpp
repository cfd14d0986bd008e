#include "polyflow/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "polyflow/nonlinearity.hpp"
#include "polyflow/norms.hpp"
#include "polyflow/semigroup.hpp"
#include "polyflow/solver.hpp"

namespace polyflow {

namespace {

Field angle_field(const GridSpec& spec, const std::function<double(double)>& theta,
                  bool equatorial) {
    Field f = make_field(spec, 3);
    std::array<int, 3> ix{};
    for (std::size_t i = 0; i < spec.npts(); ++i) {
        unflatten(spec, i, ix);
        const double th = theta(coord(spec, ix[0]));
        if (equatorial) {
            f.at(0, i) = std::cos(th);
            f.at(1, i) = std::sin(th);
            f.at(2, i) = 0.0;
        } else {
            f.at(0, i) = std::sin(th);
            f.at(1, i) = 0.0;
            f.at(2, i) = std::cos(th);
        }
    }
    return f;
}

}  // namespace

Field bank_constant(const GridSpec& spec) {
    Field f = make_field(spec, 3);
    for (std::size_t i = 0; i < spec.npts(); ++i) f.at(2, i) = 1.0;
    return f;
}

Field bank_equator(const GridSpec& spec, int q) {
    const double base = 2.0 * M_PI / spec.length;
    return angle_field(spec, [=](double x) { return q * base * x; }, true);
}

Field bank_bump(const GridSpec& spec, double amplitude, double kappa) {
    const double L = spec.length;
    return angle_field(
        spec,
        [=](double x) { return amplitude * std::exp(kappa * (std::cos(2.0 * M_PI * x / L) - 1.0)); },
        false);
}

Field bank_log_oscillation(const GridSpec& spec, double eps, double x0_frac, double mu) {
    const double L = spec.length;
    const double x0 = x0_frac * L;
    if (mu <= 0.0) mu = 8.0 * spec.h();
    return angle_field(
        spec,
        [=](double x) {
            const double d = (L / M_PI) * std::abs(std::sin(M_PI * (x - x0) / L));
            return eps * 0.5 * std::log(d * d + mu * mu);
        },
        true);
}

std::vector<BankEntry> make_test_bank(const GridSpec& spec, const std::vector<double>& eps) {
    std::vector<BankEntry> bank;
    bank.push_back({"constant", bank_constant(spec)});
    bank.push_back({"equator_q1", bank_equator(spec, 1)});
    bank.push_back({"equator_q2", bank_equator(spec, 2)});
    bank.push_back({"bump", bank_bump(spec, 0.8, 3.0)});
    for (double e : eps) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "logosc_%g", e);
        bank.push_back({buf, bank_log_oscillation(spec, e)});
    }
    return bank;
}

SmoothingReport smoothing_report(const Field& u0, int m, double R, double T, std::size_t steps,
                                 int stride) {
    SmoothingReport rep;
    rep.bmo = bmo_seminorm(u0, R, stride);
    if (T < 0.0) T = std::pow(R, 2 * m);
    if (rep.bmo < 1e-14) {
        rep.vacuous = true;
        return rep;
    }
    const Trajectory gu0 = g_trajectory(u0, m, T, steps);
    const NormReport nr = x_norm(gu0, m, R, stride);
    rep.sup_bound = nr.sup_inf;
    for (int k = 1; k <= m; ++k) {
        rep.c_sup.push_back(nr.x_sup_parts[k - 1] / rep.bmo);
        rep.c_cyl.push_back(nr.x_cyl_parts[k - 1] / rep.bmo);
    }
    rep.c_carleson = carleson_functional(u0, m, R, stride).value / (rep.bmo * rep.bmo);
    return rep;
}

DistanceReport distance_report(const Field& u0, int m, double R, double T, std::size_t steps,
                               int stride) {
    DistanceReport rep;
    rep.bmo = bmo_seminorm(u0, R, stride);
    if (T < 0.0) T = std::pow(R, 2 * m);
    const Trajectory gu0 = g_trajectory(u0, m, T, steps);
    for (const Field& f : gu0.fields) rep.max_dist = std::max(rep.max_dist, dist_to_N(f).first);

    // Large-time limit of the free evolution is the mean of u0.
    double mean_sq = 0.0;
    for (int c = 0; c < u0.comps; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < u0.spec.npts(); ++i) s += u0.at(c, i);
        s /= static_cast<double>(u0.spec.npts());
        mean_sq += s * s;
    }
    rep.delta_floor = std::abs(std::sqrt(mean_sq) - 1.0);
    double excess = rep.max_dist - rep.delta_floor;
    if (excess < 0.0) excess = rep.max_dist;  // saturation estimate overshoots the horizon
    rep.K_hat = rep.bmo > 1e-14 ? excess / rep.bmo : 0.0;
    return rep;
}

SBoundReport s_bound_report(const GridSpec& spec, int m, int k, double T, std::size_t steps,
                            std::uint64_t seed, int count, int stride) {
    if (k < 0 || k > m - 1) throw std::invalid_argument("s_bound_report: need 0 <= k <= m-1");
    SBoundReport rep;
    MultiIndex alpha{};
    alpha[0] = k;
    for (int c = 0; c < count; ++c) {
        Field psi = band_limited_noise(spec, 3, seed + static_cast<std::uint64_t>(c));
        // Half the draws decay in time so the bound is exercised off the
        // constant-in-time special case.
        const double rate = (c % 2 == 0) ? 0.0 : 1.0 / std::max(T, 1e-12);
        Trajectory f = make_trajectory(spec, 3, T, steps);
        for (std::size_t j = 0; j < f.fields.size(); ++j) {
            const double w = std::exp(-rate * f.times[j]);
            for (std::size_t i = 0; i < psi.values.size(); ++i)
                f.fields[j].values[i] = w * psi.values[i];
        }
        const double denom = yk_norm(f, k, m, -1.0, stride);
        if (denom < 1e-14) {
            ++rep.skipped;
            continue;
        }
        Trajectory df = f;
        for (Field& fj : df.fields) {
            SpectralField sf = derivative(to_spectral(fj), alpha);
            fj = to_field(sf);
        }
        const Trajectory s = apply_S(df, m, DuhamelScheme{2, f.dt()});
        rep.ratios.push_back(x_norm_total(s, m, -1.0, stride) / denom);
        rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
    }
    return rep;
}

ConstraintReport constraint_report(const Trajectory& traj, const TargetManifold& tm, int m) {
    if (traj.fields.empty()) throw std::invalid_argument("constraint_report: empty trajectory");
    ConstraintReport rep;
    const double hvol = traj.fields[0].spec.cell_volume();
    double worst_mass_ratio = 0.0;
    for (std::size_t j = 0; j < traj.fields.size(); ++j) {
        const Field& u = traj.fields[j];
        QRho qr = q_and_rho(u, tm);
        if (!qr.inside_tube) {
            rep.truncated = true;
            rep.exit_time = traj.times[j];
            break;
        }
        rep.rho.push_back(qr.rho_total);
        rep.max_rho = std::max(rep.max_rho, qr.rho_total);
        rep.grad_q_sq.push_back(2.0 * energy_m(qr.Q, m));

        const Field F = f_tilde(u, tm, m);
        const Field J = jacobian_field(u, tm);
        const int l = u.comps;
        double inner = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < u.spec.npts(); ++i) {
            double fn = 0.0, qn = 0.0;
            for (int a = 0; a < l; ++a) {
                double jf = 0.0;
                for (int b = 0; b < l; ++b) jf += J.at(a * l + b, i) * F.at(b, i);
                inner += jf * qr.Q.at(a, i);
                fn += F.at(a, i) * F.at(a, i);
                qn += qr.Q.at(a, i) * qr.Q.at(a, i);
            }
            mass += std::sqrt(fn) * std::sqrt(qn);
        }
        rep.ortho.push_back(inner * hvol);
        if (mass * hvol > 1e-300)
            worst_mass_ratio = std::max(worst_mass_ratio, std::abs(inner) / mass);
    }
    rep.ortho_normalized = worst_mass_ratio;

    const double dt = traj.dt();
    for (std::size_t j = 1; j + 1 < rep.rho.size(); ++j) {
        const double drho = (rep.rho[j + 1] - rep.rho[j - 1]) / (2.0 * dt);
        rep.residual = std::max(rep.residual, std::abs(drho + rep.grad_q_sq[j] + rep.ortho[j]));
    }
    return rep;
}

double tangency_residual(const Field& u, int m, const TargetManifold& tm) {
    const auto [dist, df] = dist_to_N(u);
    if (dist > 1e-10) throw std::invalid_argument("tangency_residual: field must map into the sphere");

    const GridSpec& spec = u.spec;
    SpectralField uh = to_spectral(u);
    const double base = 2.0 * M_PI / spec.length;
    std::array<int, 3> ix{};
    for (std::size_t i = 0; i < spec.npts(); ++i) {
        unflatten(spec, i, ix);
        double s = 0.0;
        for (int d = 0; d < spec.n; ++d) {
            const double xi = base * wavenumber(ix[d], spec.points);
            s += xi * xi;
        }
        const double sym = -std::pow(s, m);  // (-1)^{m+1} Delta^m in Fourier
        for (int c = 0; c < u.comps; ++c) uh.at(c, i) *= sym;
    }
    Field w = to_field(uh);
    const Field F = f_tilde(u, tm, m);
    for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] += F.values[i];

    const double wsup = sup_norm(w);
    if (wsup < 1e-10) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.npts(); ++i) {
        double dot = 0.0;
        for (int c = 0; c < u.comps; ++c) dot += u.at(c, i) * w.at(c, i);
        worst = std::max(worst, std::abs(dot));
    }
    return worst / wsup;
}

DissipationReport dissipation_report(const Trajectory& traj, int m) {
    DissipationReport rep;
    for (const Field& f : traj.fields) rep.energy.push_back(energy_m(f, m));
    for (std::size_t j = 1; j < rep.energy.size(); ++j)
        rep.max_uphill = std::max(rep.max_uphill, rep.energy[j] - rep.energy[j - 1]);
    return rep;
}

}  // namespace polyflow
