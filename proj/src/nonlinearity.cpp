#include "polyflow/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

namespace polyflow {

namespace {

void check_order(int m) {
    if (m < 1 || m > 3) throw std::invalid_argument("nonlinearity: flow order m must be 1, 2, or 3");
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

Field dealias_field(const Field& f) { return to_field(dealias(to_spectral(f))); }

SpectralField laplacian(const SpectralField& sf) {
    SpectralField out = make_spectral(sf.spec, sf.comps, sf.time);
    for (int d = 0; d < sf.spec.n; ++d) {
        MultiIndex alpha{0, 0, 0};
        alpha[d] = 2;
        SpectralField dd = derivative(sf, alpha, 6);
        for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += dd.coeffs[i];
    }
    return out;
}

// Pointwise matrix (l x l) times vector (l), dealiased afterwards.
Field mat_vec(const Field& A, const Field& B) {
    const int l = B.comps;
    if (A.comps != l * l) throw std::invalid_argument("mat_vec: shape mismatch");
    Field out = make_field(B.spec, l, B.time);
    const std::size_t np = B.spec.npts();
    for (std::size_t i = 0; i < np; ++i)
        for (int a = 0; a < l; ++a) {
            double s = 0.0;
            for (int b = 0; b < l; ++b) s += A.at(a * l + b, i) * B.at(b, i);
            out.at(a, i) = s;
        }
    return dealias_field(out);
}

void add_scaled(Field& acc, const Field& f, double c) {
    for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += c * f.values[i];
}

MultiIndex add_multi(const MultiIndex& a, const MultiIndex& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

std::size_t find_entry(const TensorField& t, const MultiIndex& alpha) {
    for (std::size_t e = 0; e < t.idx.size(); ++e)
        if (t.idx[e] == alpha) return e;
    throw std::logic_error("tensor: multi-index not found");
}

TensorField make_tensor(const GridSpec& spec, int rank, int comps, double time) {
    TensorField t;
    t.spec = spec;
    t.rank = rank;
    t.comps = comps;
    t.time = time;
    t.idx = multi_indices(spec.n, rank);
    for (std::size_t e = 0; e < t.idx.size(); ++e) t.entry.push_back(make_field(spec, comps, time));
    return t;
}

// Contract all p indices of the matrix-valued tensor A (grad^p of the
// Jacobian field) against the leading indices of the symmetric rank-q
// vector tensor B, q >= p.  Result rank q - p.
TensorField contract_full(const TensorField& A, const TensorField& B) {
    if (A.rank > B.rank) throw std::invalid_argument("contract: first factor rank too large");
    TensorField out = make_tensor(B.spec, B.rank - A.rank, B.comps, B.time);
    for (std::size_t e = 0; e < out.idx.size(); ++e) {
        Field acc = make_field(B.spec, B.comps, B.time);
        for (std::size_t ae = 0; ae < A.idx.size(); ++ae) {
            const Field prod = mat_vec(A.entry[ae], B.entry[find_entry(B, add_multi(A.idx[ae], out.idx[e]))]);
            add_scaled(acc, prod, multinomial(A.idx[ae]));
        }
        out.entry[e] = std::move(acc);
    }
    return out;
}

// Symmetrized outer product of a matrix-valued tensor with a vector tensor,
// weighted so that div^{p+q} of the result reproduces the unsymmetrized sum.
void accumulate_outer_sym(TensorField& acc, const TensorField& A, const TensorField& B, double coef) {
    for (std::size_t ae = 0; ae < A.idx.size(); ++ae)
        for (std::size_t be = 0; be < B.idx.size(); ++be) {
            const MultiIndex gamma = add_multi(A.idx[ae], B.idx[be]);
            const double w =
                coef * multinomial(A.idx[ae]) * multinomial(B.idx[be]) / multinomial(gamma);
            const Field prod = mat_vec(A.entry[ae], B.entry[be]);
            add_scaled(acc.entry[find_entry(acc, gamma)], prod, w);
        }
}

void accumulate_tensor(TensorField& acc, const TensorField& t, double coef) {
    for (std::size_t e = 0; e < t.idx.size(); ++e)
        add_scaled(acc.entry[find_entry(acc, t.idx[e])], t.entry[e], coef);
}

}  // namespace

std::vector<MultiIndex> multi_indices(int n, int r) {
    std::vector<MultiIndex> out;
    if (n == 1) {
        out.push_back({r, 0, 0});
        return out;
    }
    for (int a0 = r; a0 >= 0; --a0) {
        if (n == 2) {
            out.push_back({a0, r - a0, 0});
        } else {
            for (int a1 = r - a0; a1 >= 0; --a1) out.push_back({a0, a1, r - a0 - a1});
        }
    }
    return out;
}

double multinomial(const MultiIndex& alpha) {
    const int r = order(alpha);
    double v = 1.0;
    int used = 0;
    for (int d = 0; d < 3; ++d)
        for (int i = 1; i <= alpha[d]; ++i) {
            ++used;
            v = v * used / i;
        }
    (void)r;
    return v;
}

TensorField grad_tensor(const SpectralField& sf, int r, int max_order) {
    TensorField t = make_tensor(sf.spec, r, sf.comps, sf.time);
    for (std::size_t e = 0; e < t.idx.size(); ++e) t.entry[e] = to_field(derivative(sf, t.idx[e], max_order));
    return t;
}

Field tensor_magnitude(const TensorField& t) {
    Field out = make_field(t.spec, 1, t.time);
    const std::size_t np = t.spec.npts();
    for (std::size_t i = 0; i < np; ++i) {
        double s = 0.0;
        for (std::size_t e = 0; e < t.idx.size(); ++e) {
            const double w = multinomial(t.idx[e]);
            for (int c = 0; c < t.comps; ++c) {
                const double v = t.entry[e].at(c, i);
                s += w * v * v;
            }
        }
        out.at(0, i) = std::sqrt(s);
    }
    return out;
}

Field jacobian_field(const Field& u, const TargetManifold& tm) {
    if (u.comps != tm.l) throw std::invalid_argument("jacobian_field: comps != target dimension");
    const int l = tm.l;
    Field out = make_field(u.spec, l * l, u.time);
    const std::size_t np = u.spec.npts();
    std::vector<double> y(l), J(l * l);
    for (std::size_t i = 0; i < np; ++i) {
        for (int a = 0; a < l; ++a) y[a] = u.at(a, i);
        projection_jacobian(tm, y.data(), J.data());
        for (int ab = 0; ab < l * l; ++ab) out.at(ab, i) = J[ab];
    }
    return out;
}

CompositeDerivs composite_derivatives(const Field& u, const TargetManifold& tm, int up_to) {
    if (up_to < 1 || up_to > 6)
        throw std::invalid_argument("composite_derivatives: order must be in 1..6");
    CompositeDerivs cd;
    const Field P = project(tm, u);
    SpectralField sP = to_spectral(P);

    // Spectral tail of the composed field relative to its fluctuation energy.
    const int N = sP.spec.points;
    const double cut = (2.0 / 3.0) * (N / 2);
    double tail = 0.0, total = 0.0;
    std::array<int, 3> ix{};
    for (std::size_t i = 0; i < sP.spec.npts(); ++i) {
        unflatten(sP.spec, i, ix);
        bool dc = true, outside = false;
        for (int d = 0; d < sP.spec.n; ++d) {
            const int k = wavenumber(ix[d], N);
            if (k != 0) dc = false;
            if (std::abs(k) > cut) outside = true;
        }
        if (dc) continue;
        for (int c = 0; c < sP.comps; ++c) {
            const double e = std::norm(sP.at(c, i));
            total += e;
            if (outside) tail += e;
        }
    }
    cd.tail_fraction = total > 0.0 ? tail / total : 0.0;
    cd.resolved = cd.tail_fraction <= 1e-6;

    dealias_inplace(sP);
    for (int j = 1; j <= up_to; ++j) cd.grads.push_back(grad_tensor(sP, j));
    return cd;
}

TensorField f_k(const Field& u, int k, const TargetManifold& tm, int m) {
    check_order(m);
    if (k < 0 || k > m - 1) throw std::invalid_argument("f_k: index k out of range 0..m-1");

    SpectralField sU = dealias(to_spectral(u));
    SpectralField sJ = dealias(to_spectral(jacobian_field(u, tm)));
    const double sign_m = (m % 2 == 0) ? 1.0 : -1.0;

    if (k <= m - 2) {
        const TensorField A = grad_tensor(sJ, m - k);
        const TensorField B = grad_tensor(sU, m);
        TensorField F = contract_full(A, B);
        const double coef = ((k % 2 == 0) ? -1.0 : 1.0) * binom(m, k);
        for (Field& e : F.entry)
            for (double& v : e.values) v *= coef;
        return F;
    }

    // k = m - 1: the leading contraction plus the div-expanded remainder of
    // the order-m product-rule sum.
    TensorField F = make_tensor(u.spec, m - 1, u.comps, u.time);
    accumulate_tensor(F, contract_full(grad_tensor(sJ, 1), grad_tensor(sU, m)), sign_m * m);
    if (m >= 2) {
        const SpectralField sLapJ = laplacian(sJ);
        const SpectralField sLapU = laplacian(sU);
        for (int kk = 0; kk <= m - 2; ++kk) {
            const double c = sign_m * binom(m - 1, kk);
            accumulate_outer_sym(F, grad_tensor(sLapJ, m - kk - 2), grad_tensor(sU, kk + 1), c);
            accumulate_outer_sym(F, grad_tensor(sJ, m - kk - 1), grad_tensor(sLapU, kk), c);
        }
    }
    return F;
}

Field div_k(const TensorField& t) {
    SpectralField acc = make_spectral(t.spec, t.comps, t.time);
    for (std::size_t e = 0; e < t.idx.size(); ++e) {
        SpectralField d = derivative(to_spectral(t.entry[e]), t.idx[e], 6);
        const double w = multinomial(t.idx[e]);
        for (std::size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += w * d.coeffs[i];
    }
    return to_field(acc);
}

Field f_tilde(const Field& u, const TargetManifold& tm, int m) {
    check_order(m);
    Field out = make_field(u.spec, u.comps, u.time);
    for (int k = 0; k <= m - 1; ++k) {
        const Field contrib = div_k(f_k(u, k, tm, m));
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += contrib.values[i];
    }
    return out;
}

double energy_m(const Field& u, int m) {
    check_order(m);
    const TensorField g = grad_tensor(to_spectral(u), m);
    double e = 0.0;
    for (std::size_t i = 0; i < g.idx.size(); ++i) e += multinomial(g.idx[i]) * l2_sq(g.entry[i]);
    return 0.5 * e;
}

Field f_gastel_m1(const Field& u, const TargetManifold& tm, int m) {
    if (m != 1)
        throw std::invalid_argument("f_gastel_m1: trace form implemented for m = 1 only");
    const Field P = project(tm, u);
    SpectralField sU = dealias(to_spectral(u));

    Field grad_sq = make_field(u.spec, 1, u.time);
    for (int d = 0; d < u.spec.n; ++d) {
        MultiIndex alpha{0, 0, 0};
        alpha[d] = 1;
        const Field du = to_field(derivative(sU, alpha, 6));
        for (std::size_t i = 0; i < grad_sq.values.size(); ++i) {
            double s = 0.0;
            for (int c = 0; c < u.comps; ++c) s += du.at(c, i) * du.at(c, i);
            grad_sq.at(0, i) += s;
        }
    }
    grad_sq = dealias_field(grad_sq);

    Field out = make_field(u.spec, u.comps, u.time);
    for (std::size_t i = 0; i < u.spec.npts(); ++i)
        for (int c = 0; c < u.comps; ++c) out.at(c, i) = grad_sq.at(0, i) * P.at(c, i);
    return dealias_field(out);
}

}  // namespace polyflow
