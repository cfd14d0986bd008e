#ifndef POLYFLOW_NONLINEARITY_HPP
#define POLYFLOW_NONLINEARITY_HPP

#include <vector>

#include "polyflow/grid.hpp"
#include "polyflow/target.hpp"

namespace polyflow {

// Symmetric spatial tensor with vector (or matrix) values per grid point.
// Entries are stored per multi-index |alpha| = rank; repeated-index
// multiplicities are applied at contraction time.
struct TensorField {
    GridSpec spec;
    int rank = 0;
    int comps = 1;
    double time = 0.0;
    std::vector<MultiIndex> idx;
    std::vector<Field> entry;
};

// Multi-indices alpha with |alpha| = r over n dimensions, lexicographic.
std::vector<MultiIndex> multi_indices(int n, int r);
double multinomial(const MultiIndex& alpha);

// grad^r of a spectral field, one entry per symmetric multi-index.
TensorField grad_tensor(const SpectralField& sf, int r, int max_order = 6);

// Pointwise euclidean tensor norm |T|(x) with index multiplicities.
Field tensor_magnitude(const TensorField& t);

// Jacobian field x -> d(extension)(u(x)), l*l components row-major.
Field jacobian_field(const Field& u, const TargetManifold& tm);

struct CompositeDerivs {
    std::vector<TensorField> grads;  // grads[j-1] = grad^j of the composed map
    double tail_fraction = 0.0;      // spectral tail energy of the composition
    bool resolved = true;            // tail below 1e-6
};

// grad^j of x -> extension(u(x)) for j = 1..up_to, spectral differentiation
// of the pointwise composition.
CompositeDerivs composite_derivatives(const Field& u, const TargetManifold& tm, int up_to);

// The divergence-form pieces of the nonlinearity: sum_k div^k(F_k(u)) equals
// the flow's right-hand side.  F_k carries k free spatial indices.
TensorField f_k(const Field& u, int k, const TargetManifold& tm, int m);

Field f_tilde(const Field& u, const TargetManifold& tm, int m);

// div^k applied spectrally to all free indices of a rank-k tensor.
Field div_k(const TensorField& t);

// 0.5 * integral of |grad^m u|^2 over the box.
double energy_m(const Field& u, int m);

// Trace form of the m = 1 nonlinearity: sum_i A(ext(u))(d_i u, d_i u).
Field f_gastel_m1(const Field& u, const TargetManifold& tm, int m = 1);

}  // namespace polyflow

#endif
