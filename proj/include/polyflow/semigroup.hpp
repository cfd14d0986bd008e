#ifndef POLYFLOW_SEMIGROUP_HPP
#define POLYFLOW_SEMIGROUP_HPP

#include "polyflow/grid.hpp"

namespace polyflow {

// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2; series branch for
// small |z| to dodge cancellation.
double phi1(double z);
double phi2(double z);

// Free evolution: per-mode multiplication by exp(-t |xi|^{2m}).
SpectralField apply_G(const SpectralField& u0, int m, double t);
Field apply_G(const Field& u0, int m, double t);

// Free-evolution trajectory of u0 sampled on a uniform time grid.
Trajectory g_trajectory(const Field& u0, int m, double T, std::size_t steps);

// Reconstruction order of the forcing in time inside each step.
struct DuhamelScheme {
    int order = 2;  // 1: piecewise constant, 2: piecewise linear
    double dt = 0.0;
};

// Duhamel integral S f: exact per-mode exponential integration of the
// reconstructed forcing; the result trajectory starts at zero.
Trajectory apply_S(const Trajectory& f, int m, const DuhamelScheme& scheme);

// sup over time samples of ||u(t) - G u0(t) - S f(t)||_inf.
double duhamel_residual(const Trajectory& u, const Trajectory& f, const Field& u0, int m,
                        int scheme_order = 2);

}  // namespace polyflow

#endif
