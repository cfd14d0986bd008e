#include "polyflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polyflow/nonlinearity.hpp"
#include "polyflow/semigroup.hpp"

namespace polyflow {

namespace {

// Prefix table for O(1) periodic box sums of a scalar sample array.
class BoxSum {
  public:
    BoxSum(const GridSpec& spec, const double* vals) : spec_(spec) {
        const int N = spec.points;
        // Inactive axes get extent 2: slot 0 is the zero prefix, slot 1 the data.
        dims_ = {2, 2, 2};
        for (int d = 0; d < spec.n; ++d) dims_[d] = N + 1;
        P_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], 0.0);
        std::array<int, 3> ix{};
        for (std::size_t i = 0; i < spec.npts(); ++i) {
            unflatten(spec, i, ix);
            at(ix[0] + 1, ix[1] + 1, ix[2] + 1) = vals[i];
        }
        // Running sums along each active axis.
        for (int d = 0; d < spec.n; ++d)
            for (int a = 0; a < dims_[0]; ++a)
                for (int b = 0; b < dims_[1]; ++b)
                    for (int c = 0; c < dims_[2]; ++c) {
                        std::array<int, 3> j{a, b, c};
                        if (j[d] == 0) continue;
                        std::array<int, 3> p = j;
                        p[d] -= 1;
                        at(j[0], j[1], j[2]) += at(p[0], p[1], p[2]);
                    }
    }

    // Sum over the periodic window starting at a (inclusive) of width w per axis.
    double window(const std::array<int, 3>& a, const std::array<int, 3>& w) const {
        const int N = spec_.points;
        // Split each axis into at most two non-wrapping segments.
        std::array<std::array<int, 2>, 3> seg_lo{}, seg_len{};
        std::array<int, 3> nseg{1, 1, 1};
        for (int d = 0; d < spec_.n; ++d) {
            int start = ((a[d] % N) + N) % N;
            int width = std::min(w[d], N);
            if (start + width <= N) {
                seg_lo[d][0] = start;
                seg_len[d][0] = width;
                nseg[d] = 1;
            } else {
                seg_lo[d][0] = start;
                seg_len[d][0] = N - start;
                seg_lo[d][1] = 0;
                seg_len[d][1] = width - (N - start);
                nseg[d] = 2;
            }
        }
        double total = 0.0;
        for (int s0 = 0; s0 < nseg[0]; ++s0)
            for (int s1 = 0; s1 < nseg[1]; ++s1)
                for (int s2 = 0; s2 < nseg[2]; ++s2)
                    total += rect(seg_lo[0][s0], seg_len[0][s0], seg_lo[1][s1], seg_len[1][s1],
                                  seg_lo[2][s2], seg_len[2][s2]);
        return total;
    }

  private:
    double& at(int a, int b, int c) {
        return P_[(static_cast<std::size_t>(a) * dims_[1] + b) * dims_[2] + c];
    }
    double at(int a, int b, int c) const {
        return P_[(static_cast<std::size_t>(a) * dims_[1] + b) * dims_[2] + c];
    }
    double rect(int a, int wa, int b, int wb, int c, int wc) const {
        if (spec_.n < 2) {
            b = 0;
            wb = 1;
        }
        if (spec_.n < 3) {
            c = 0;
            wc = 1;
        }
        const int a1 = a + wa, b1 = b + wb, c1 = c + wc;
        return at(a1, b1, c1) - at(a, b1, c1) - at(a1, b, c1) - at(a1, b1, c) + at(a, b, c1) +
               at(a, b1, c) + at(a1, b, c) - at(a, b, c);
    }

    GridSpec spec_;
    std::array<int, 3> dims_;
    std::vector<double> P_;
};

// Periodic sup-norm ball of radius r: indices within floor(r/h) cells.
void window_of(const GridSpec& spec, const std::array<int, 3>& center, double r,
               std::array<int, 3>& a, std::array<int, 3>& w) {
    const int half = static_cast<int>(std::floor(r / spec.h()));
    a = {0, 0, 0};
    w = {1, 1, 1};
    for (int d = 0; d < spec.n; ++d) {
        a[d] = center[d] - half;
        w[d] = std::min(2 * half + 1, spec.points);
    }
}

double radius_cap(const GridSpec& spec, double R) {
    if (R > spec.length / 4.0 + 1e-12)
        throw std::invalid_argument("norms: radius cap exceeds L/4");
    return R;
}

}  // namespace

CylinderSet make_cylinders(const GridSpec& spec, double R, int stride) {
    radius_cap(spec, R);
    if (stride < 1) throw std::invalid_argument("norms: stride must be positive");
    CylinderSet cs;
    for (double r = spec.length / 4.0; r >= 2.0 * spec.h() && cs.radii.size() < 32; r *= 0.5)
        if (r <= R + 1e-12) cs.radii.push_back(r);
    std::array<int, 3> c{0, 0, 0};
    const int N = spec.points;
    if (spec.n == 1) {
        for (c[0] = 0; c[0] < N; c[0] += stride) cs.centers.push_back(c);
    } else if (spec.n == 2) {
        for (c[0] = 0; c[0] < N; c[0] += stride)
            for (c[1] = 0; c[1] < N; c[1] += stride) cs.centers.push_back(c);
    } else {
        for (c[0] = 0; c[0] < N; c[0] += stride)
            for (c[1] = 0; c[1] < N; c[1] += stride)
                for (c[2] = 0; c[2] < N; c[2] += stride) cs.centers.push_back(c);
    }
    return cs;
}

double bmo_seminorm(const Field& f, double R, int stride) {
    const GridSpec& spec = f.spec;
    const CylinderSet cs = make_cylinders(spec, R, stride);
    const double vol = spec.cell_volume();

    std::vector<BoxSum> comp_sums;
    comp_sums.reserve(f.comps);
    for (int c = 0; c < f.comps; ++c) comp_sums.emplace_back(spec, f.comp(c));

    double best = 0.0;
    std::array<int, 3> a{}, w{};
    std::vector<double> mean(f.comps);
    for (const auto& center : cs.centers)
        for (double r : cs.radii) {
            window_of(spec, center, r, a, w);
            double count = 1.0;
            for (int d = 0; d < spec.n; ++d) count *= w[d];
            for (int c = 0; c < f.comps; ++c) mean[c] = comp_sums[c].window(a, w) / count;

            // Second pass: euclidean deviation from the window mean.
            double dev = 0.0;
            std::array<int, 3> ix{};
            const int N = spec.points;
            for (int i0 = 0; i0 < w[0]; ++i0) {
                ix[0] = ((a[0] + i0) % N + N) % N;
                for (int i1 = 0; i1 < (spec.n > 1 ? w[1] : 1); ++i1) {
                    ix[1] = spec.n > 1 ? ((a[1] + i1) % N + N) % N : 0;
                    for (int i2 = 0; i2 < (spec.n > 2 ? w[2] : 1); ++i2) {
                        ix[2] = spec.n > 2 ? ((a[2] + i2) % N + N) % N : 0;
                        const std::size_t idx = flat_index(spec, ix);
                        double s = 0.0;
                        for (int c = 0; c < f.comps; ++c) {
                            const double d = f.at(c, idx) - mean[c];
                            s += d * d;
                        }
                        dev += std::sqrt(s);
                    }
                }
            }
            best = std::max(best, std::pow(r, -spec.n) * dev * vol);
        }
    return best;
}

double NormReport::seminorm() const {
    double s = 0.0;
    for (double v : x_sup_parts) s += v;
    for (double v : x_cyl_parts) s += v;
    return s;
}

double NormReport::total() const { return sup_inf + seminorm(); }

namespace {

double auto_radius(const GridSpec& spec, double T, int m, double R) {
    if (R > 0.0) return radius_cap(spec, R);
    return std::min(spec.length / 4.0, std::pow(T, 1.0 / (2.0 * m)));
}

// Trapezoid of s(t) over [0, cap] on the trajectory time grid, with a linear
// fractional last segment.
double time_integral(const std::vector<double>& times, const std::vector<double>& s, double cap) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        const double t0 = times[j], t1 = times[j + 1];
        if (t0 >= cap) break;
        if (t1 <= cap) {
            acc += 0.5 * (s[j] + s[j + 1]) * (t1 - t0);
        } else {
            const double frac = (cap - t0) / (t1 - t0);
            const double scap = s[j] + frac * (s[j + 1] - s[j]);
            acc += 0.5 * (s[j] + scap) * (cap - t0);
            break;
        }
    }
    return acc;
}

}  // namespace

NormReport x_norm(const Trajectory& u, int m, double R, int stride) {
    if (u.times.empty()) throw std::invalid_argument("x_norm: empty trajectory");
    bool has_positive = false;
    for (double t : u.times)
        if (t > 0.0) has_positive = true;
    if (!has_positive) throw std::invalid_argument("x_norm: no positive-time samples");

    const GridSpec& spec = u.fields[0].spec;
    const double T = u.times.back();
    const double Rcap = auto_radius(spec, T, m, R);
    const CylinderSet cs = make_cylinders(spec, Rcap, stride);
    const double vol = spec.cell_volume();

    NormReport rep;
    rep.x_sup_parts.assign(m, 0.0);
    rep.x_cyl_parts.assign(m, 0.0);

    for (std::size_t j = 0; j < u.times.size(); ++j)
        if (u.times[j] > 0.0) rep.sup_inf = std::max(rep.sup_inf, sup_norm(u.fields[j]));

    for (int k = 1; k <= m; ++k) {
        const double p = 2.0 * m / k;
        std::vector<BoxSum> tables;
        std::vector<double> spatial_max;
        tables.reserve(u.times.size());
        for (std::size_t j = 0; j < u.times.size(); ++j) {
            const Field mag = tensor_magnitude(grad_tensor(to_spectral(u.fields[j]), k));
            double mx = 0.0;
            std::vector<double> pw(mag.values.size());
            for (std::size_t i = 0; i < mag.values.size(); ++i) {
                mx = std::max(mx, mag.values[i]);
                pw[i] = std::pow(mag.values[i], p);
            }
            spatial_max.push_back(mx);
            tables.emplace_back(spec, pw.data());
            if (u.times[j] > 0.0)
                rep.x_sup_parts[k - 1] = std::max(
                    rep.x_sup_parts[k - 1], std::pow(u.times[j], k / (2.0 * m)) * mx);
        }

        std::array<int, 3> a{}, w{};
        std::vector<double> s(u.times.size());
        for (const auto& center : cs.centers)
            for (double r : cs.radii) {
                window_of(spec, center, r, a, w);
                for (std::size_t j = 0; j < u.times.size(); ++j)
                    s[j] = tables[j].window(a, w) * vol;
                const double integral = time_integral(u.times, s, std::pow(r, 2.0 * m));
                rep.x_cyl_parts[k - 1] = std::max(
                    rep.x_cyl_parts[k - 1], std::pow(std::pow(r, -spec.n) * integral, k / (2.0 * m)));
            }
    }
    return rep;
}

double x_norm_total(const Trajectory& u, int m, double R, int stride) {
    return x_norm(u, m, R, stride).total();
}

double x_seminorm(const Trajectory& u, int m, double R, int stride) {
    return x_norm(u, m, R, stride).seminorm();
}

double yk_norm(const Trajectory& f, int k, int m, double R, int stride) {
    if (k < 0 || k > m - 1) throw std::invalid_argument("yk_norm: k out of range 0..m-1");
    if (f.times.empty()) throw std::invalid_argument("yk_norm: empty trajectory");
    const GridSpec& spec = f.fields[0].spec;
    const double T = f.times.back();
    const double Rcap = auto_radius(spec, T, m, R);
    const CylinderSet cs = make_cylinders(spec, Rcap, stride);
    const double vol = spec.cell_volume();
    const double expo = (2.0 * m - k) / (2.0 * m);
    const double p = 1.0 / expo;  // 2m/(2m-k)

    double sup_part = 0.0;
    std::vector<BoxSum> tables;
    tables.reserve(f.times.size());
    for (std::size_t j = 0; j < f.times.size(); ++j) {
        const Field& fj = f.fields[j];
        std::vector<double> pw(spec.npts());
        double mx = 0.0;
        for (std::size_t i = 0; i < spec.npts(); ++i) {
            double s = 0.0;
            for (int c = 0; c < fj.comps; ++c) s += fj.at(c, i) * fj.at(c, i);
            const double mag = std::sqrt(s);
            mx = std::max(mx, mag);
            pw[i] = std::pow(mag, p);
        }
        tables.emplace_back(spec, pw.data());
        if (f.times[j] > 0.0) sup_part = std::max(sup_part, std::pow(f.times[j], expo) * mx);
    }

    double cyl_part = 0.0;
    std::array<int, 3> a{}, w{};
    std::vector<double> s(f.times.size());
    for (const auto& center : cs.centers)
        for (double r : cs.radii) {
            window_of(spec, center, r, a, w);
            for (std::size_t j = 0; j < f.times.size(); ++j) s[j] = tables[j].window(a, w) * vol;
            const double integral = time_integral(f.times, s, std::pow(r, 2.0 * m));
            cyl_part = std::max(cyl_part, std::pow(std::pow(r, -spec.n) * integral, expo));
        }
    return sup_part + cyl_part;
}

CarlesonResult carleson_functional(const Field& f, int m, double R, int stride, int time_nodes) {
    const GridSpec& spec = f.spec;
    radius_cap(spec, R);
    const CylinderSet cs = make_cylinders(spec, R, stride);
    const double vol = spec.cell_volume();
    const SpectralField sf = to_spectral(f);

    CarlesonResult res;
    res.min_reliable_t = 2.0 * spec.h();

    for (double r : cs.radii) {
        const double t_lo = r / 512.0;
        if (t_lo < res.min_reliable_t) res.resolved = false;
        std::vector<double> ts(time_nodes);
        const double ratio = std::pow(r / t_lo, 1.0 / (time_nodes - 1));
        for (int j = 0; j < time_nodes; ++j) ts[j] = t_lo * std::pow(ratio, j);

        // Per node: |t grad(G f)(., t^{2m})|^2 summed over directions/components.
        std::vector<BoxSum> tables;
        tables.reserve(time_nodes);
        for (int j = 0; j < time_nodes; ++j) {
            const double t = ts[j];
            SpectralField w = apply_G(sf, m, std::pow(t, 2.0 * m));
            std::vector<double> sq(spec.npts(), 0.0);
            for (int d = 0; d < spec.n; ++d) {
                MultiIndex alpha{0, 0, 0};
                alpha[d] = 1;
                const Field g = to_field(derivative(w, alpha, 6));
                for (std::size_t i = 0; i < sq.size(); ++i)
                    for (int c = 0; c < g.comps; ++c) sq[i] += t * t * g.at(c, i) * g.at(c, i);
            }
            tables.emplace_back(spec, sq.data());
        }

        std::array<int, 3> a{}, w{};
        for (const auto& center : cs.centers) {
            window_of(spec, center, r, a, w);
            double integral = 0.0;
            for (int j = 0; j + 1 < time_nodes; ++j) {
                const double s0 = tables[j].window(a, w) * vol;
                const double s1 = tables[j + 1].window(a, w) * vol;
                integral += 0.5 * (s0 + s1) * std::log(ts[j + 1] / ts[j]);
            }
            res.value = std::max(res.value, std::pow(r, -spec.n) * integral);
        }
    }
    return res;
}

}  // namespace polyflow
