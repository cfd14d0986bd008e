#include "polyflow/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "polyflow/grid.hpp"

namespace polyflow {

namespace {

void check_order(int m) {
    if (m < 1 || m > 3) throw std::invalid_argument("kernel: flow order m must be 1, 2, or 3");
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    // Seed with enough panels that oscillation is not missed by the first split.
    const int panels = 64;
    double total = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + p * w, pb = pa + w, pm = 0.5 * (pa + pb);
        const double fa = f(pa), fm = f(pm), fb = f(pb);
        total += adapt(f, pa, pb, fa, fm, fb, simpson(f, pa, pb, fa, fm, fb), tol / panels, 30);
    }
    return total;
}

// Frequency cutoff for the profile integrand e^{-xi^{2m}}; tail below 1e-16.
double xi_cutoff(int m, double absx) {
    return std::pow(40.0 + 10.0 * std::log1p(absx), 1.0 / (2.0 * m));
}

double cubic_interp(const std::vector<double>& ys, double dx, double x) {
    const double u = x / dx;
    const long j = std::lround(std::floor(u));
    const long i0 = std::clamp(j - 1, 0L, static_cast<long>(ys.size()) - 4);
    const double s = u - (i0 + 1);
    const double y0 = ys[i0], y1 = ys[i0 + 1], y2 = ys[i0 + 2], y3 = ys[i0 + 3];
    // 4-point Lagrange on unit-spaced nodes -1, 0, 1, 2 around s in [0,1].
    return y0 * (-(s) * (s - 1.0) * (s - 2.0) / 6.0) + y1 * ((s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0) +
           y2 * (-(s + 1.0) * s * (s - 2.0) / 2.0) + y3 * ((s + 1.0) * s * (s - 1.0) / 6.0);
}

}  // namespace

double multiplier(double xi_norm_sq, int m, double t) {
    check_order(m);
    if (xi_norm_sq < 0.0) throw std::invalid_argument("multiplier: |xi|^2 must be nonnegative");
    if (t < 0.0) throw std::invalid_argument("multiplier: negative time rejected");
    return std::exp(-t * std::pow(xi_norm_sq, m));
}

double profile_deriv_1d(int m, int k, double x) {
    check_order(m);
    if (k < 0) throw std::invalid_argument("profile: derivative order must be nonnegative");
    const double ax = std::abs(x);
    const double cut = xi_cutoff(m, ax);
    const double phase = 0.5 * M_PI * k;
    const auto integrand = [&](double xi) {
        return std::pow(xi, k) * std::cos(ax * xi + phase) * std::exp(-std::pow(xi, 2 * m));
    };
    const double val = integrate(integrand, 0.0, cut, 1e-13) / M_PI;
    const double parity = (x < 0.0 && k % 2 != 0) ? -1.0 : 1.0;
    return parity * val;
}

KernelProfile profile_g(int m, int n, const std::vector<double>& xs, int max_deriv) {
    check_order(m);
    if (n < 1 || n > 3) throw std::invalid_argument("profile: dimension must be 1, 2, or 3");
    if (xs.empty()) throw std::invalid_argument("profile: empty sample set");

    KernelProfile p;
    p.m = m;
    p.n = n;
    p.xs = xs;
    p.samples.assign(max_deriv + 1, std::vector<double>(xs.size(), 0.0));
    p.normalization = 1.0;

    if (n == 1) {
        for (int k = 0; k <= max_deriv; ++k)
            for (std::size_t i = 0; i < xs.size(); ++i) p.samples[k][i] = profile_deriv_1d(m, k, xs[i]);
        return p;
    }

    // Oversampled inverse transform on a box wide enough for the tails.
    double maxx = 0.0;
    for (double x : xs) maxx = std::max(maxx, std::abs(x));
    const int N = (n == 2) ? 512 : 128;
    const double Lb = std::max(2.0 * (maxx + 8.0), 30.0);
    const GridSpec spec = make_grid(n, Lb, N);
    SpectralField sf = make_spectral(spec, 1);
    const double base = 2.0 * M_PI / Lb;
    std::array<int, 3> ix{};
    for (std::size_t i = 0; i < spec.npts(); ++i) {
        unflatten(spec, i, ix);
        double s = 0.0;
        for (int d = 0; d < n; ++d) {
            const double xi = base * wavenumber(ix[d], N);
            s += xi * xi;
        }
        sf.at(0, i) = std::exp(-std::pow(s, m)) / std::pow(Lb, n);
    }
    for (int k = 0; k <= max_deriv; ++k) {
        MultiIndex alpha{k, 0, 0};
        Field gk = to_field(derivative(sf, alpha, 6));
        // Axial line x = (x1, 0, 0).
        std::vector<double> line(N);
        std::array<int, 3> jx{0, 0, 0};
        for (int j = 0; j < N; ++j) {
            jx[0] = j;
            line[j] = gk.at(0, flat_index(spec, jx));
        }
        const double dx = spec.h();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double x = std::abs(xs[i]);
            const double parity = (xs[i] < 0.0 && k % 2 != 0) ? -1.0 : 1.0;
            p.samples[k][i] = parity * cubic_interp(line, dx, x);
        }
    }
    return p;
}

DecayFit verify_decay(const KernelProfile& p, int k, double L) {
    if (k < 0 || k >= static_cast<int>(p.samples.size()))
        throw std::invalid_argument("verify_decay: derivative order not sampled");
    double range = 0.0;
    for (double x : p.xs) range = std::max(range, std::abs(x));
    if (range < 10.0)
        throw std::invalid_argument("verify_decay: sample range must cover |x| >= 10");

    auto fit_up_to = [&](double cap) {
        double c = 0.0;
        for (std::size_t i = 0; i < p.xs.size(); ++i) {
            const double ax = std::abs(p.xs[i]);
            if (ax > cap) continue;
            c = std::max(c, std::abs(p.samples[k][i]) * std::pow(1.0 + ax, L));
        }
        return c;
    };

    DecayFit fit;
    fit.k = k;
    fit.L = L;
    fit.sample_range = range;
    fit.C_fit = fit_up_to(range);
    const double half = fit_up_to(0.5 * range);
    fit.growth = half > 0.0 ? fit.C_fit / half - 1.0 : 0.0;
    fit.range_stable = fit.growth <= 0.10;
    return fit;
}

L1ScalingResult l1_scaling_check(int m, int k, const std::vector<double>& ts) {
    check_order(m);
    if (ts.empty()) throw std::invalid_argument("l1_scaling: empty time list");
    for (double t : ts) {
        if (!(t > 0.0)) throw std::invalid_argument("l1_scaling: times must be positive");
        if (t < 1e-6)
            throw std::invalid_argument(
                "l1_scaling: t below 1e-6 under-resolves the kernel; rescale times");
    }

    L1ScalingResult res;
    res.ts = ts;
    const double y_max = 40.0;
    for (double t : ts) {
        const double scale = std::pow(t, 1.0 / (2.0 * m));
        const double X = y_max * scale;
        const auto absb = [&](double x) {
            return std::abs(std::pow(scale, -(1.0 + k)) * profile_deriv_1d(m, k, x / scale));
        };
        const double half = integrate(absb, 0.0, X, 1e-9);
        res.weighted.push_back(std::pow(t, k / (2.0 * m)) * 2.0 * half);
    }
    double lo = res.weighted[0], hi = res.weighted[0];
    for (double v : res.weighted) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    res.max_rel_dev = hi > 0.0 ? (hi - lo) / hi : 0.0;
    return res;
}

}  // namespace polyflow
