#include "polyflow/solver.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "polyflow/nonlinearity.hpp"
#include "polyflow/semigroup.hpp"

namespace polyflow {

namespace {

bool finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

Trajectory forcing_trajectory(const Trajectory& u, const TargetManifold& tm, int m) {
    Trajectory f;
    f.times = u.times;
    f.fields.reserve(u.fields.size());
    for (const Field& uj : u.fields) f.fields.push_back(f_tilde(uj, tm, m));
    return f;
}

Trajectory add_trajectories(const Trajectory& a, const Trajectory& b) {
    check_shared_grid(a, b);
    Trajectory out = a;
    for (std::size_t j = 0; j < out.fields.size(); ++j)
        for (std::size_t i = 0; i < out.fields[j].values.size(); ++i)
            out.fields[j].values[i] += b.fields[j].values[i];
    return out;
}

Trajectory diff_trajectories(const Trajectory& a, const Trajectory& b) {
    check_shared_grid(a, b);
    Trajectory out = a;
    for (std::size_t j = 0; j < out.fields.size(); ++j)
        for (std::size_t i = 0; i < out.fields[j].values.size(); ++i)
            out.fields[j].values[i] -= b.fields[j].values[i];
    return out;
}

// One application of the solution map T(u) = G u0 + S(forcing(u)).
Trajectory apply_T(const Trajectory& gu0, const Trajectory& u, const TargetManifold& tm, int m) {
    const Trajectory f = forcing_trajectory(u, tm, m);
    const Trajectory sf = apply_S(f, m, DuhamelScheme{2, f.dt()});
    return add_trajectories(gu0, sf);
}

}  // namespace

void validate(const FlowParams& p) {
    if (p.m < 1 || p.m > 3) throw std::invalid_argument("solver: flow order m must be 1, 2, or 3");
    if (!(p.T > 0.0)) throw std::invalid_argument("solver: final time T must be positive");
    if (p.M < 8) throw std::invalid_argument("solver: need at least 8 time steps");
    if (!(p.picard_tol > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
    if (p.picard_max < 1) throw std::invalid_argument("solver: picard_max must be positive");
    if (!(p.ball_radius > 0.0)) throw std::invalid_argument("solver: ball radius must be positive");
}

std::pair<Trajectory, SolveDiagnostics> picard_solve(const Field& u0, const FlowParams& p,
                                                     const TargetManifold& tm) {
    validate(p);
    const auto [dist0, dfield] = dist_to_N(u0);
    if (dist0 > 1e-10)
        throw std::invalid_argument("picard_solve: initial data must map into the sphere");

    const Trajectory gu0 = g_trajectory(u0, p.m, p.T, p.M);
    Trajectory u = gu0;
    SolveDiagnostics diag;

    int rising = 0;
    for (int it = 0; it < p.picard_max; ++it) {
        Trajectory next = apply_T(gu0, u, tm, p.m);
        for (std::size_t j = 0; j < next.fields.size(); ++j)
            if (!finite(next.fields[j])) {
                diag.status = SolveStatus::Aborted;
                diag.abort_index = it;
                diag.iterations = it;
                return {std::move(u), std::move(diag)};
            }
        const double dist = x_norm_total(diff_trajectories(next, u), p.m, -1.0, p.norm_stride);
        diag.iterate_distances.push_back(dist);
        u = std::move(next);
        diag.iterations = it + 1;
        if (dist < p.picard_tol) {
            diag.status = SolveStatus::Converged;
            break;
        }
        const std::size_t n = diag.iterate_distances.size();
        if (n >= 2 && diag.iterate_distances[n - 1] > diag.iterate_distances[n - 2]) {
            if (++rising >= 3) {
                diag.status = SolveStatus::Diverged;
                break;
            }
        } else {
            rising = 0;
        }
        if (it + 1 == p.picard_max) diag.status = SolveStatus::MaxIterations;
    }

    for (std::size_t j = 1; j < diag.iterate_distances.size(); ++j)
        if (diag.iterate_distances[j - 1] > 0.0)
            diag.theta_hat =
                std::max(diag.theta_hat, diag.iterate_distances[j] / diag.iterate_distances[j - 1]);

    const Trajectory f = forcing_trajectory(u, tm, p.m);
    diag.duhamel_residual = duhamel_residual(u, f, u0, p.m, 2);
    for (const Field& uj : u.fields) {
        diag.constraint_drift = std::max(diag.constraint_drift, dist_to_N(uj).first);
        diag.energy_trace.push_back(energy_m(uj, p.m));
    }
    return {std::move(u), std::move(diag)};
}

Trajectory imex_solve(const Field& u0, const FlowParams& p, const TargetManifold& tm, int order) {
    validate(p);
    if (order != 1 && order != 2) throw std::invalid_argument("imex_solve: order must be 1 or 2");

    const GridSpec& spec = u0.spec;
    const std::size_t np = spec.npts();
    const double dt = p.T / static_cast<double>(p.M);
    const double base = 2.0 * M_PI / spec.length;

    std::vector<double> E(np), w1(np), w2(np);
    std::array<int, 3> ix{};
    for (std::size_t i = 0; i < np; ++i) {
        unflatten(spec, i, ix);
        double s = 0.0;
        for (int d = 0; d < spec.n; ++d) {
            const double xi = base * wavenumber(ix[d], spec.points);
            s += xi * xi;
        }
        const double z = -dt * std::pow(s, p.m);
        E[i] = std::exp(z);
        w1[i] = dt * phi1(z);
        w2[i] = dt * phi2(z);
    }

    Trajectory tr = make_trajectory(spec, u0.comps, p.T, p.M);
    tr.fields[0] = u0;
    tr.fields[0].time = 0.0;
    SpectralField uh = to_spectral(u0);
    for (std::size_t step = 0; step < p.M; ++step) {
        const SpectralField fh = to_spectral(f_tilde(tr.fields[step], tm, p.m));
        SpectralField next = make_spectral(spec, u0.comps, tr.times[step + 1]);
        for (std::size_t i = 0; i < np; ++i)
            for (int c = 0; c < u0.comps; ++c)
                next.at(c, i) = E[i] * uh.at(c, i) + w1[i] * fh.at(c, i);
        Field next_field = to_field(next);
        if (order == 2) {
            // ETD2RK corrector on the predicted endpoint forcing.
            const SpectralField fh1 = to_spectral(f_tilde(next_field, tm, p.m));
            for (std::size_t i = 0; i < np; ++i)
                for (int c = 0; c < u0.comps; ++c)
                    next.at(c, i) += w2[i] * (fh1.at(c, i) - fh.at(c, i));
            next_field = to_field(next);
        }
        if (!finite(next_field))
            throw std::runtime_error("imex_solve: NaN at step " + std::to_string(step + 1));
        next_field.time = tr.times[step + 1];
        tr.fields[step + 1] = next_field;
        uh = std::move(next);
    }
    return tr;
}

Field band_limited_noise(const GridSpec& spec, int comps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int kmax = std::max(1, spec.points / 8);
    Field f = make_field(spec, comps);
    std::array<int, 3> ix{};
    // Sum of low modes with seeded amplitudes and phases keeps the field
    // real and exactly band-limited.
    for (int c = 0; c < comps; ++c) {
        std::vector<std::array<double, 3>> ks;
        std::vector<double> amp, phase;
        for (int k0 = -kmax; k0 <= kmax; ++k0)
            for (int k1 = (spec.n > 1 ? -kmax : 0); k1 <= (spec.n > 1 ? kmax : 0); ++k1)
                for (int k2 = (spec.n > 2 ? -kmax : 0); k2 <= (spec.n > 2 ? kmax : 0); ++k2) {
                    if (k0 == 0 && k1 == 0 && k2 == 0) continue;
                    ks.push_back({static_cast<double>(k0), static_cast<double>(k1),
                                  static_cast<double>(k2)});
                    amp.push_back(gauss(rng));
                    phase.push_back(gauss(rng));
                }
        const double base = 2.0 * M_PI / spec.length;
        for (std::size_t i = 0; i < spec.npts(); ++i) {
            unflatten(spec, i, ix);
            double v = 0.0;
            for (std::size_t q = 0; q < ks.size(); ++q) {
                double arg = 0.0;
                for (int d = 0; d < spec.n; ++d) arg += base * ks[q][d] * coord(spec, ix[d]);
                v += amp[q] * std::cos(arg + phase[q]);
            }
            f.at(c, i) = v / std::sqrt(static_cast<double>(ks.size()));
        }
    }
    return f;
}

namespace {

// Constant-in-time perturbation trajectory scaled to a target X-distance.
Trajectory perturbed(const Trajectory& gu0, const Field& psi, double target, int m, int stride) {
    Trajectory delta;
    delta.times = gu0.times;
    for (std::size_t j = 0; j < gu0.fields.size(); ++j) {
        Field f = psi;
        f.time = gu0.times[j];
        delta.fields.push_back(std::move(f));
    }
    const double norm = x_norm_total(delta, m, -1.0, stride);
    const double scale = norm > 0.0 ? target / norm : 0.0;
    for (Field& f : delta.fields)
        for (double& v : f.values) v *= scale;
    return add_trajectories(gu0, delta);
}

}  // namespace

ContractionProbe contraction_probe(const Field& u0, const FlowParams& p, const TargetManifold& tm,
                                   int pairs) {
    validate(p);
    if (pairs < 5) throw std::invalid_argument("contraction_probe: need at least 5 pairs");
    const Trajectory gu0 = g_trajectory(u0, p.m, p.T, p.M);

    ContractionProbe probe;
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    int drawn = 0;
    while (static_cast<int>(probe.ratios.size()) < pairs && drawn < 4 * pairs) {
        const std::uint64_t s1 = rng(), s2 = rng();
        const double a = p.ball_radius * unif(rng);
        const double b = p.ball_radius * unif(rng);
        ++drawn;
        const Trajectory u = perturbed(gu0, band_limited_noise(u0.spec, u0.comps, s1), a, p.m,
                                       p.norm_stride);
        const Trajectory v = perturbed(gu0, band_limited_noise(u0.spec, u0.comps, s2), b, p.m,
                                       p.norm_stride);
        const double denom = x_norm_total(diff_trajectories(u, v), p.m, -1.0, p.norm_stride);
        if (denom < 1e-12) continue;  // degenerate pair, redraw
        const Trajectory Tu = apply_T(gu0, u, tm, p.m);
        const Trajectory Tv = apply_T(gu0, v, tm, p.m);
        const double num = x_norm_total(diff_trajectories(Tu, Tv), p.m, -1.0, p.norm_stride);
        probe.ratios.push_back(num / denom);
        probe.theta_hat = std::max(probe.theta_hat, num / denom);
    }
    return probe;
}

BallReport ball_check(const Field& u0, const FlowParams& p, const TargetManifold& tm, int samples) {
    validate(p);
    const Trajectory gu0 = g_trajectory(u0, p.m, p.T, p.M);
    BallReport rep;
    rep.center_x = x_seminorm(gu0, p.m, -1.0, p.norm_stride);
    rep.center_y = x_norm_total(diff_trajectories(apply_T(gu0, gu0, tm, p.m), gu0), p.m, -1.0,
                                p.norm_stride);
    rep.sample_distances.push_back(rep.center_y);

    std::mt19937_64 rng(p.seed + 77);
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    for (int s = 1; s < samples; ++s) {
        const std::uint64_t fs = rng();
        const double a = p.ball_radius * unif(rng);
        const Trajectory u = perturbed(gu0, band_limited_noise(u0.spec, u0.comps, fs), a, p.m,
                                       p.norm_stride);
        const Trajectory Tu = apply_T(gu0, u, tm, p.m);
        rep.sample_distances.push_back(
            x_norm_total(diff_trajectories(Tu, gu0), p.m, -1.0, p.norm_stride));
    }
    for (double d : rep.sample_distances) {
        rep.worst_margin = std::max(rep.worst_margin, d);
        if (d > p.ball_radius) rep.all_inside = false;
    }
    return rep;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need matching lists of size >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace polyflow
