#ifndef POLYFLOW_GRID_HPP
#define POLYFLOW_GRID_HPP

#include <array>
#include <complex>
#include <functional>
#include <cstddef>
#include <string>
#include <vector>

namespace polyflow {

// Periodic box [0,L)^n sampled with N points per dimension.
struct GridSpec {
    int n = 1;            // spatial dimension, 1..3
    double length = 0.0;  // box edge length L
    int points = 0;       // samples per dimension, power of two, >= 8

    double h() const { return length / points; }
    std::size_t npts() const {
        std::size_t p = 1;
        for (int d = 0; d < n; ++d) p *= static_cast<std::size_t>(points);
        return p;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < n; ++d) v *= h();
        return v;
    }
    bool operator==(const GridSpec&) const = default;
};

// Throws std::invalid_argument on violated invariants.
GridSpec make_grid(int n, double length, int points);

using MultiIndex = std::array<int, 3>;

inline int order(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

// Real-valued map sample u : box -> R^l, stored component-major:
// values[c * npts + i] with i the row-major grid index.
struct Field {
    GridSpec spec;
    int comps = 1;
    double time = 0.0;
    std::vector<double> values;

    double& at(int c, std::size_t i) { return values[static_cast<std::size_t>(c) * spec.npts() + i]; }
    double at(int c, std::size_t i) const { return values[static_cast<std::size_t>(c) * spec.npts() + i]; }
    const double* comp(int c) const { return values.data() + static_cast<std::size_t>(c) * spec.npts(); }
    double* comp(int c) { return values.data() + static_cast<std::size_t>(c) * spec.npts(); }
};

Field make_field(const GridSpec& spec, int comps, double time = 0.0);

// Fourier coefficients over the lattice xi = (2*pi/L) k, k per-dim in
// [-N/2, N/2).  Coefficient at xi=0 equals the field mean.
struct SpectralField {
    GridSpec spec;
    int comps = 1;
    double time = 0.0;
    std::vector<std::complex<double>> coeffs;

    std::complex<double>& at(int c, std::size_t i) {
        return coeffs[static_cast<std::size_t>(c) * spec.npts() + i];
    }
    std::complex<double> at(int c, std::size_t i) const {
        return coeffs[static_cast<std::size_t>(c) * spec.npts() + i];
    }
    std::complex<double>* comp(int c) { return coeffs.data() + static_cast<std::size_t>(c) * spec.npts(); }
    const std::complex<double>* comp(int c) const {
        return coeffs.data() + static_cast<std::size_t>(c) * spec.npts();
    }
};

SpectralField make_spectral(const GridSpec& spec, int comps, double time = 0.0);

// Row-major flat index <-> per-dimension indices.
std::size_t flat_index(const GridSpec& spec, const std::array<int, 3>& ix);
void unflatten(const GridSpec& spec, std::size_t i, std::array<int, 3>& ix);

// Signed integer wavenumber for axis index j in [0,N).
inline int wavenumber(int j, int N) { return (j <= N / 2) ? j : j - N; }

// Physical coordinate of grid index ix along dimension d.
inline double coord(const GridSpec& spec, int j) { return spec.h() * j; }

Field sample(const GridSpec& spec, int comps,
             const std::function<void(const double* x, double* out)>& fn, double time = 0.0);

SpectralField to_spectral(const Field& f);
Field to_field(const SpectralField& sf);

// Residual imaginary mass of the inverse transform relative to field magnitude.
double imag_residue(const SpectralField& sf);

// Multiply coefficients by (i xi)^alpha.  |alpha| must not exceed max_order.
SpectralField derivative(const SpectralField& sf, const MultiIndex& alpha, int max_order = 6);

// Zero every coefficient with |k_d| above keep_fraction * N/2 on any axis.
SpectralField dealias(const SpectralField& sf, double keep_fraction = 2.0 / 3.0);
void dealias_inplace(SpectralField& sf, double keep_fraction = 2.0 / 3.0);

double sup_norm(const Field& f);          // max_x euclidean norm over components
double l2_sq(const Field& f);             // sum |values|^2 * h^n
double max_abs_diff(const Field& a, const Field& b);

// Time-indexed fields on a shared grid; times strictly increasing from 0.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> fields;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    bool uniform(double tol = 1e-12) const;
};

Trajectory make_trajectory(const GridSpec& spec, int comps, double T, std::size_t steps);
void check_shared_grid(const Trajectory& a, const Trajectory& b);

// Field snapshot file, magic "PFLD": version, n, N, l, t, then row-major
// point-major little-endian doubles (l components per point).
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

// Trajectory container, magic "PTRJ": version, count, then PFLD records.
void write_trajectory(const std::string& path, const Trajectory& tr);
Trajectory read_trajectory(const std::string& path);

}  // namespace polyflow

#endif
