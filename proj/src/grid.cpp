#include "polyflow/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace polyflow {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Cached in-place c2c plans per (rank, N).  FFTW_UNALIGNED lets the plans run
// on plain vector storage.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, PlanPair> g_plans;

PlanPair& plans_for(const GridSpec& spec) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(spec.n, spec.points);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;

    int dims[3] = {spec.points, spec.points, spec.points};
    std::vector<std::complex<double>> scratch(spec.npts());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair p;
    p.fwd = fftw_plan_dft(spec.n, dims, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft(spec.n, dims, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
    return g_plans.emplace(key, p).first->second;
}

void run_plan(fftw_plan plan, std::complex<double>* data) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace

GridSpec make_grid(int n, double length, int points) {
    if (n < 1 || n > 3) throw std::invalid_argument("grid: dimension must be 1, 2, or 3");
    if (!(length > 0.0)) throw std::invalid_argument("grid: box length must be positive");
    if (points < 8) throw std::invalid_argument("grid: need at least 8 points per dimension");
    if (!is_pow2(points)) throw std::invalid_argument("grid: points per dimension must be a power of two");
    GridSpec spec{n, length, points};
    if (spec.npts() > (std::size_t{1} << 26))
        throw std::invalid_argument("grid: total sample count exceeds memory budget");
    return spec;
}

Field make_field(const GridSpec& spec, int comps, double time) {
    if (comps < 1) throw std::invalid_argument("field: comps must be positive");
    Field f;
    f.spec = spec;
    f.comps = comps;
    f.time = time;
    f.values.assign(spec.npts() * comps, 0.0);
    return f;
}

SpectralField make_spectral(const GridSpec& spec, int comps, double time) {
    if (comps < 1) throw std::invalid_argument("spectral: comps must be positive");
    SpectralField sf;
    sf.spec = spec;
    sf.comps = comps;
    sf.time = time;
    sf.coeffs.assign(spec.npts() * comps, {0.0, 0.0});
    return sf;
}

std::size_t flat_index(const GridSpec& spec, const std::array<int, 3>& ix) {
    std::size_t idx = 0;
    for (int d = 0; d < spec.n; ++d) idx = idx * spec.points + static_cast<std::size_t>(ix[d]);
    return idx;
}

void unflatten(const GridSpec& spec, std::size_t i, std::array<int, 3>& ix) {
    ix = {0, 0, 0};
    for (int d = spec.n - 1; d >= 0; --d) {
        ix[d] = static_cast<int>(i % spec.points);
        i /= spec.points;
    }
}

Field sample(const GridSpec& spec, int comps,
             const std::function<void(const double* x, double* out)>& fn, double time) {
    Field f = make_field(spec, comps, time);
    std::array<int, 3> ix{};
    std::vector<double> x(spec.n), out(comps);
    for (std::size_t i = 0; i < spec.npts(); ++i) {
        unflatten(spec, i, ix);
        for (int d = 0; d < spec.n; ++d) x[d] = coord(spec, ix[d]);
        fn(x.data(), out.data());
        for (int c = 0; c < comps; ++c) f.at(c, i) = out[c];
    }
    return f;
}

SpectralField to_spectral(const Field& f) {
    const std::size_t np = f.spec.npts();
    for (int c = 0; c < f.comps; ++c)
        for (std::size_t i = 0; i < np; ++i)
            if (!std::isfinite(f.at(c, i))) {
                std::array<int, 3> ix{};
                unflatten(f.spec, i, ix);
                std::ostringstream msg;
                msg << "to_spectral: non-finite value at component " << c << ", index (" << ix[0];
                if (f.spec.n > 1) msg << "," << ix[1];
                if (f.spec.n > 2) msg << "," << ix[2];
                msg << ")";
                throw std::invalid_argument(msg.str());
            }

    SpectralField sf = make_spectral(f.spec, f.comps, f.time);
    PlanPair& pp = plans_for(f.spec);
    const double norm = 1.0 / static_cast<double>(np);
    for (int c = 0; c < f.comps; ++c) {
        for (std::size_t i = 0; i < np; ++i) sf.at(c, i) = f.at(c, i);
        run_plan(pp.fwd, sf.comp(c));
        for (std::size_t i = 0; i < np; ++i) sf.at(c, i) *= norm;
    }
    return sf;
}

Field to_field(const SpectralField& sf) {
    const std::size_t np = sf.spec.npts();
    Field f = make_field(sf.spec, sf.comps, sf.time);
    PlanPair& pp = plans_for(sf.spec);
    std::vector<std::complex<double>> buf(np);
    for (int c = 0; c < sf.comps; ++c) {
        std::memcpy(buf.data(), sf.comp(c), np * sizeof(std::complex<double>));
        run_plan(pp.bwd, buf.data());
        for (std::size_t i = 0; i < np; ++i) f.at(c, i) = buf[i].real();
    }
    return f;
}

double imag_residue(const SpectralField& sf) {
    const std::size_t np = sf.spec.npts();
    PlanPair& pp = plans_for(sf.spec);
    std::vector<std::complex<double>> buf(np);
    double max_im = 0.0, max_re = 0.0;
    for (int c = 0; c < sf.comps; ++c) {
        std::memcpy(buf.data(), sf.comp(c), np * sizeof(std::complex<double>));
        run_plan(pp.bwd, buf.data());
        for (std::size_t i = 0; i < np; ++i) {
            max_im = std::max(max_im, std::abs(buf[i].imag()));
            max_re = std::max(max_re, std::abs(buf[i].real()));
        }
    }
    return max_re > 0.0 ? max_im / max_re : max_im;
}

SpectralField derivative(const SpectralField& sf, const MultiIndex& alpha, int max_order) {
    if (order(alpha) > max_order)
        throw std::invalid_argument("derivative: multi-index order exceeds configured cap");
    for (int d = 0; d < 3; ++d)
        if (alpha[d] < 0) throw std::invalid_argument("derivative: negative multi-index entry");

    SpectralField out = sf;
    const int N = sf.spec.points;
    const double base = 2.0 * M_PI / sf.spec.length;
    std::array<int, 3> ix{};
    const std::size_t np = sf.spec.npts();
    for (std::size_t i = 0; i < np; ++i) {
        unflatten(sf.spec, i, ix);
        std::complex<double> factor{1.0, 0.0};
        bool kill = false;
        for (int d = 0; d < sf.spec.n; ++d) {
            if (alpha[d] == 0) continue;
            const int k = wavenumber(ix[d], N);
            // Unpaired Nyquist mode cannot carry an odd derivative and stay real.
            if (k == N / 2 && (alpha[d] % 2 != 0)) {
                kill = true;
                break;
            }
            const std::complex<double> ixi{0.0, base * k};
            for (int p = 0; p < alpha[d]; ++p) factor *= ixi;
        }
        for (int c = 0; c < sf.comps; ++c) out.at(c, i) = kill ? 0.0 : factor * sf.at(c, i);
    }
    return out;
}

void dealias_inplace(SpectralField& sf, double keep_fraction) {
    const int N = sf.spec.points;
    const double cutoff = keep_fraction * (N / 2);
    std::array<int, 3> ix{};
    const std::size_t np = sf.spec.npts();
    for (std::size_t i = 0; i < np; ++i) {
        unflatten(sf.spec, i, ix);
        bool zero = false;
        for (int d = 0; d < sf.spec.n; ++d)
            if (std::abs(wavenumber(ix[d], N)) > cutoff) {
                zero = true;
                break;
            }
        if (zero)
            for (int c = 0; c < sf.comps; ++c) sf.at(c, i) = 0.0;
    }
}

SpectralField dealias(const SpectralField& sf, double keep_fraction) {
    SpectralField out = sf;
    dealias_inplace(out, keep_fraction);
    return out;
}

double sup_norm(const Field& f) {
    const std::size_t np = f.spec.npts();
    double m = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        double s = 0.0;
        for (int c = 0; c < f.comps; ++c) s += f.at(c, i) * f.at(c, i);
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double l2_sq(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return s * f.spec.cell_volume();
}

double max_abs_diff(const Field& a, const Field& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

bool Trajectory::uniform(double tol) const {
    if (times.size() < 2) return true;
    const double d0 = times[1] - times[0];
    for (std::size_t j = 1; j + 1 < times.size(); ++j)
        if (std::abs((times[j + 1] - times[j]) - d0) > tol * std::max(1.0, d0)) return false;
    return true;
}

Trajectory make_trajectory(const GridSpec& spec, int comps, double T, std::size_t steps) {
    if (!(T > 0.0) || steps < 1) throw std::invalid_argument("trajectory: need T > 0 and steps >= 1");
    Trajectory tr;
    tr.times.resize(steps + 1);
    tr.fields.reserve(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        tr.times[j] = T * static_cast<double>(j) / static_cast<double>(steps);
        tr.fields.push_back(make_field(spec, comps, tr.times[j]));
    }
    return tr;
}

void check_shared_grid(const Trajectory& a, const Trajectory& b) {
    if (a.times.size() != b.times.size()) throw std::invalid_argument("trajectories: time grids differ");
    for (std::size_t j = 0; j < a.times.size(); ++j)
        if (std::abs(a.times[j] - b.times[j]) > 1e-12 * std::max(1.0, a.times.back()))
            throw std::invalid_argument("trajectories: time grids differ");
    if (!a.fields.empty() && !b.fields.empty() &&
        !(a.fields[0].spec == b.fields[0].spec && a.fields[0].comps == b.fields[0].comps))
        throw std::invalid_argument("trajectories: field shapes differ");
}

namespace {

constexpr std::uint32_t kFieldVersion = 1;
constexpr std::uint32_t kTrajVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_field_stream(std::ostream& os, const Field& f) {
    os.write("PFLD", 4);
    put_u32(os, kFieldVersion);
    put_u32(os, static_cast<std::uint32_t>(f.spec.n));
    put_u32(os, static_cast<std::uint32_t>(f.spec.points));
    put_u32(os, static_cast<std::uint32_t>(f.comps));
    put_f64(os, f.spec.length);
    put_f64(os, f.time);
    const std::size_t np = f.spec.npts();
    for (std::size_t i = 0; i < np; ++i)
        for (int c = 0; c < f.comps; ++c) put_f64(os, f.at(c, i));
}

Field read_field_stream(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "PFLD", 4) != 0)
        throw std::runtime_error("snapshot: bad magic, expected PFLD");
    const std::uint32_t version = get_u32(is);
    if (version != kFieldVersion) throw std::runtime_error("snapshot: unsupported PFLD version");
    const int n = static_cast<int>(get_u32(is));
    const int points = static_cast<int>(get_u32(is));
    const int comps = static_cast<int>(get_u32(is));
    const double length = get_f64(is);
    const double t = get_f64(is);
    Field f = make_field(make_grid(n, length, points), comps, t);
    const std::size_t np = f.spec.npts();
    for (std::size_t i = 0; i < np; ++i)
        for (int c = 0; c < comps; ++c) f.at(c, i) = get_f64(is);
    if (!is) throw std::runtime_error("snapshot: truncated PFLD record");
    return f;
}

}  // namespace

void write_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    write_field_stream(os, f);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    return read_field_stream(is);
}

void write_trajectory(const std::string& path, const Trajectory& tr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    os.write("PTRJ", 4);
    put_u32(os, kTrajVersion);
    put_u32(os, static_cast<std::uint32_t>(tr.fields.size()));
    for (const Field& f : tr.fields) write_field_stream(os, f);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "PTRJ", 4) != 0)
        throw std::runtime_error("snapshot: bad magic, expected PTRJ");
    if (get_u32(is) != kTrajVersion) throw std::runtime_error("snapshot: unsupported PTRJ version");
    const std::uint32_t count = get_u32(is);
    Trajectory tr;
    tr.fields.reserve(count);
    for (std::uint32_t j = 0; j < count; ++j) {
        tr.fields.push_back(read_field_stream(is));
        tr.times.push_back(tr.fields.back().time);
    }
    return tr;
}

}  // namespace polyflow
