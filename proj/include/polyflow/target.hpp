#ifndef POLYFLOW_TARGET_HPP
#define POLYFLOW_TARGET_HPP

#include <utility>
#include <vector>

#include "polyflow/grid.hpp"

namespace polyflow {

// Round sphere S^{l-1} with its nearest-point projection Pi(y) = y/|y|,
// extended to all of R^l by a quintic blend vanishing at the origin.
struct TargetManifold {
    int l = 3;
    double delta_N = 0.45;      // tubular neighborhood radius
    double cutoff_inner = 0.4;  // |y| below which the extension is 0
    double cutoff_outer = 0.5;  // |y| above which the extension equals Pi
};

TargetManifold make_sphere(int l = 3, double delta_N = 0.45, double cutoff_inner = 0.4,
                           double cutoff_outer = 0.5);

// Smooth extension of the projection; total on R^l, 0 at the origin.
void project(const TargetManifold& tm, const double* y, double* out);
std::vector<double> project(const TargetManifold& tm, const std::vector<double>& y);
Field project(const TargetManifold& tm, const Field& u);

// Jacobian d(extension)/dy at y, row-major l x l (symmetric).
void projection_jacobian(const TargetManifold& tm, const double* y, double* J);

// Displacement Q = u - Pi(u) and the total penalty integral of rho = |Q|^2/2.
struct QRho {
    Field Q;
    double rho_total = 0.0;
    bool inside_tube = true;  // max dist to N stayed below delta_N
};
QRho q_and_rho(const Field& u, const TargetManifold& tm);

// Second fundamental form of the sphere: A(y)(v,w) = (v.w) y.
// Requires |y| = 1 and tangency of v, w to 1e-10.
std::vector<double> second_fundamental(const TargetManifold& tm, const std::vector<double>& y,
                                       const std::vector<double>& v, const std::vector<double>& w);

// Pointwise | |u(x)| - 1 | and its max.
std::pair<double, Field> dist_to_N(const Field& u);

}  // namespace polyflow

#endif
