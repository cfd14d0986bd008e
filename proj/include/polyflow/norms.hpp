#ifndef POLYFLOW_NORMS_HPP
#define POLYFLOW_NORMS_HPP

#include <vector>

#include "polyflow/grid.hpp"

namespace polyflow {

// Discrete suprema are taken over subsampled centers (every stride-th grid
// point per axis) and dyadic radii {L/2^j} capped by R; balls are periodic
// sup-norm boxes of half-width r.
struct CylinderSet {
    std::vector<std::array<int, 3>> centers;
    std::vector<double> radii;
};

CylinderSet make_cylinders(const GridSpec& spec, double R, int stride = 4);

// sup over centers and radii <= R of r^{-n} * integral of |f - mean| over
// the window; vector fields use the euclidean deviation norm.
double bmo_seminorm(const Field& f, double R, int stride = 4);

struct NormReport {
    double sup_inf = 0.0;               // sup_t ||f(t)||_inf, t > 0
    std::vector<double> x_sup_parts;    // k = 1..m: sup_t t^{k/2m} ||grad^k f||_inf
    std::vector<double> x_cyl_parts;    // k = 1..m: cylinder suprema
    double bmo = 0.0;
    double carleson = 0.0;
    std::vector<double> yk_parts;

    double seminorm() const;            // sum of sup and cylinder parts
    double total() const;               // sup_inf + seminorm
};

// The parabolic fixed-point norm; R < 0 selects min(L/4, T^{1/2m}).
NormReport x_norm(const Trajectory& u, int m, double R = -1.0, int stride = 4);
double x_norm_total(const Trajectory& u, int m, double R = -1.0, int stride = 4);
double x_seminorm(const Trajectory& u, int m, double R = -1.0, int stride = 4);

// sup_t t^{(2m-k)/2m} ||f||_inf plus the cylinder component, 0 <= k <= m-1.
double yk_norm(const Trajectory& f, int k, int m, double R = -1.0, int stride = 4);

struct CarlesonResult {
    double value = 0.0;
    bool resolved = true;       // smallest quadrature t at least the grid scale
    double min_reliable_t = 0.0;
};

// sup over cylinders of r^{-n} int_0^r int_{B_r} |t grad G f(., t^{2m})|^2 dx dt/t.
CarlesonResult carleson_functional(const Field& f, int m, double R, int stride = 4,
                                   int time_nodes = 20);

}  // namespace polyflow

#endif
