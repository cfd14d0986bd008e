#ifndef POLYFLOW_SOLVER_HPP
#define POLYFLOW_SOLVER_HPP

#include <cstdint>
#include <vector>

#include "polyflow/grid.hpp"
#include "polyflow/norms.hpp"
#include "polyflow/target.hpp"

namespace polyflow {

struct FlowParams {
    int m = 1;
    double T = 0.25;
    std::size_t M = 64;          // time steps
    int picard_max = 40;
    double picard_tol = 1e-9;
    double ball_radius = 0.1;    // admissible X-distance from the free evolution
    std::uint64_t seed = 1;
    int norm_stride = 4;
};

void validate(const FlowParams& p);

enum class SolveStatus { Converged, MaxIterations, Diverged, Aborted };

struct SolveDiagnostics {
    SolveStatus status = SolveStatus::Converged;
    int iterations = 0;
    int abort_index = -1;                   // iterate (or step) where NaN appeared
    std::vector<double> iterate_distances;  // X-norm distance per iteration
    double theta_hat = 0.0;                 // max successive-distance ratio
    double duhamel_residual = 0.0;
    double constraint_drift = 0.0;          // max over time of max dist to N
    std::vector<double> energy_trace;
};

// Fixed-point iteration for u = G u0 + S(sum_k div^k F_k(u)), started from
// the free evolution; non-convergence is reported, not thrown.
std::pair<Trajectory, SolveDiagnostics> picard_solve(const Field& u0, const FlowParams& p,
                                                     const TargetManifold& tm);

// Exponential-integrator time march for the same flow; first-order ETD by
// default, optional predictor-corrector second order.
Trajectory imex_solve(const Field& u0, const FlowParams& p, const TargetManifold& tm,
                      int order = 1);

struct ContractionProbe {
    std::vector<double> ratios;
    double theta_hat = 0.0;
};

// Lipschitz-factor samples of the solution map on the ball around G u0.
ContractionProbe contraction_probe(const Field& u0, const FlowParams& p, const TargetManifold& tm,
                                   int pairs);

struct BallReport {
    bool all_inside = true;
    double worst_margin = 0.0;  // max over samples of ||T(u) - Gu0||_X
    double center_x = 0.0;      // [Gu0]_X seminorm
    double center_y = 0.0;      // ||T(Gu0) - Gu0||_X
    std::vector<double> sample_distances;
};

BallReport ball_check(const Field& u0, const FlowParams& p, const TargetManifold& tm,
                      int samples = 5);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Seeded band-limited gaussian field (lowest points/8 modes per axis).
Field band_limited_noise(const GridSpec& spec, int comps, std::uint64_t seed);

}  // namespace polyflow

#endif
