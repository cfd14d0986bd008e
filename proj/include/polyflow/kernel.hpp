#ifndef POLYFLOW_KERNEL_HPP
#define POLYFLOW_KERNEL_HPP

#include <vector>

namespace polyflow {

// Fourier multiplier of the free semigroup: exp(-t |xi|^{2m}).
double multiplier(double xi_norm_sq, int m, double t);

// Self-similar profile g of the order-2m heat kernel, normalized so that
// the zero-frequency multiplier is 1 (unit mass).  samples[k][i] holds the
// k-th axial derivative of g at xs[i].
struct KernelProfile {
    int m = 1;
    int n = 1;
    std::vector<double> xs;
    std::vector<std::vector<double>> samples;
    double normalization = 1.0;
};

// n = 1: adaptive quadrature of the oscillatory profile integral.
// n >= 2: oversampled inverse transform, axial samples by cubic interpolation.
KernelProfile profile_g(int m, int n, const std::vector<double>& xs, int max_deriv = 3);

// Pointwise axial kernel derivative d^k g / dx^k at a single point (n = 1).
double profile_deriv_1d(int m, int k, double x);

struct DecayFit {
    int k = 0;
    double L = 0.0;
    double C_fit = 0.0;
    double sample_range = 0.0;
    double growth = 0.0;       // relative growth of C_fit from half range to full range
    bool range_stable = true;  // growth <= 10%
};

// Fitted constant for |g^(k)(x)| <= C (1+|x|)^{-L} over the sampled range.
DecayFit verify_decay(const KernelProfile& p, int k, double L);

struct L1ScalingResult {
    std::vector<double> ts;
    std::vector<double> weighted;  // t^{k/2m} * ||d^k b(.,t)||_L1, n = 1
    double max_rel_dev = 0.0;
};

// Checks the t-independence of t^{k/2m} ||grad^k b(.,t)||_L1 (n = 1).
L1ScalingResult l1_scaling_check(int m, int k, const std::vector<double>& ts);

}  // namespace polyflow

#endif
