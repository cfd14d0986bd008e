#ifndef POLYFLOW_DIAGNOSTICS_HPP
#define POLYFLOW_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "polyflow/grid.hpp"
#include "polyflow/target.hpp"

namespace polyflow {

// Named sphere-valued initial maps used across the verification reports.
struct BankEntry {
    std::string name;
    Field u0;
};

Field bank_constant(const GridSpec& spec);
Field bank_equator(const GridSpec& spec, int q);
Field bank_bump(const GridSpec& spec, double amplitude, double kappa);
// u0 = (cos(eps*lambda), sin(eps*lambda), 0) with lambda a mollified
// periodic log-distance profile centered at x0_frac * L; mu is the
// mollification scale (default 8h, pass an absolute value for refinement
// studies so the datum stays fixed).
Field bank_log_oscillation(const GridSpec& spec, double eps, double x0_frac = 0.37,
                           double mu = -1.0);

std::vector<BankEntry> make_test_bank(const GridSpec& spec,
                                      const std::vector<double>& eps = {0.01, 0.05, 0.1});

// Measured constants of the free-evolution smoothing bounds: each left side
// is a piece of the X-norm of the G-trajectory, divided by the BMO side.
struct SmoothingReport {
    bool vacuous = false;  // zero BMO input (constants)
    double bmo = 0.0;
    std::vector<double> c_sup;  // k = 1..m: sup_t t^{k/2m}||grad^k||_inf / bmo
    std::vector<double> c_cyl;  // k = 1..m: cylinder supremum / bmo
    double c_carleson = 0.0;    // carleson functional / bmo^2
    double sup_bound = 0.0;     // sup_t ||Gu0||_inf (bounded, not compared)
};

SmoothingReport smoothing_report(const Field& u0, int m, double R, double T = -1.0,
                                 std::size_t steps = 64, int stride = 4);

// Distance of the free evolution to the sphere against the BMO seminorm.
struct DistanceReport {
    double bmo = 0.0;
    double max_dist = 0.0;     // max over (x,t) of ||Gu0| - 1|
    double delta_floor = 0.0;  // large-time saturation: distance of the mean
    double K_hat = 0.0;        // (max_dist - delta_floor) / bmo
};

DistanceReport distance_report(const Field& u0, int m, double R, double T = -1.0,
                               std::size_t steps = 64, int stride = 4);

// Operator bound of the forced response on derivative forcings:
// ratios ||S(d^alpha f)||_X / ||f||_{Y^k} over seeded band-limited f.
struct SBoundReport {
    std::vector<double> ratios;
    double max_ratio = 0.0;
    int skipped = 0;  // zero-forcing draws
};

SBoundReport s_bound_report(const GridSpec& spec, int m, int k, double T, std::size_t steps,
                            std::uint64_t seed, int count = 4, int stride = 4);

// Penalty-identity audit along a trajectory: d/dt int rho + int |grad^m Q|^2
// plus the orthogonality term, which vanishes for tangent forcing.
struct ConstraintReport {
    std::vector<double> rho;        // int rho(u(t))
    std::vector<double> grad_q_sq;  // int |grad^m Q(u(t))|^2
    std::vector<double> ortho;      // int <dPi(u) F(u), Q(u)>
    double max_rho = 0.0;
    double residual = 0.0;          // max over interior samples of the identity defect
    double ortho_normalized = 0.0;  // |ortho| over the pointwise-summed |F||Q| mass
    bool truncated = false;         // trajectory left the tube
    double exit_time = -1.0;
};

ConstraintReport constraint_report(const Trajectory& traj, const TargetManifold& tm, int m);

// Normalized normal component of w = (-1)^{m+1} Delta^m u + F(u) for u on
// the sphere; tangency of the flow's right-hand side.
double tangency_residual(const Field& u, int m, const TargetManifold& tm);

struct DissipationReport {
    std::vector<double> energy;  // E_m(u(t)) per sample
    double max_uphill = 0.0;     // largest positive increment
};

DissipationReport dissipation_report(const Trajectory& traj, int m);

}  // namespace polyflow

#endif
