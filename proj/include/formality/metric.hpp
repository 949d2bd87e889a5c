#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "formality/matrix.hpp"
#include "formality/multivector.hpp"

namespace formality {

// Pointwise metric g presented through the inner products of the basis
// covectors: G[i][j] = <e_i, e_j>_g on the space the multivectors live in.
// Note the covector convention: rescaling the underlying metric g -> rho^2 g
// scales covector inner products down, i.e. G -> G / rho^2 (see
// conformal_rescale). Positive definiteness is checked on construction via
// leading principal minors, exactly in rational mode.
template <class S>
class GramMetric {
  public:
    explicit GramMetric(Matrix<S> gram) : gram_(std::move(gram)) {
        if (gram_.rows() != gram_.cols()) throw std::invalid_argument("Gram matrix not square");
        if (gram_.rows() < 2 || gram_.rows() > kMaxDim)
            throw std::invalid_argument("metric dimension must be in [2, 12]");
        if (!gram_.is_symmetric()) throw std::domain_error("Gram matrix not symmetric");
        blade_t lead = 0;
        for (int k = 0; k < gram_.rows(); ++k) {
            lead |= blade_t(1) << k;
            if (!(minor_det(gram_, lead, lead) > S(0)))
                throw std::domain_error("Gram matrix not positive definite");
        }
    }

    static GramMetric identity(int n) { return GramMetric(Matrix<S>::identity(n)); }

    int dim() const { return gram_.rows(); }
    const Matrix<S>& gram() const { return gram_; }

  private:
    Matrix<S> gram_;
};

// Gram matrix of the conformally rescaled metric rho^2 g. Covectors shrink
// when the metric grows, hence the division.
template <class S>
GramMetric<S> conformal_rescale(const GramMetric<S>& g, const S& rho) {
    if (!(rho > S(0))) throw std::invalid_argument("conformal factor must be positive");
    Matrix<S> m = g.gram();
    const S factor = S(1) / (rho * rho);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m.at(i, j) *= factor;
    return GramMetric<S>(std::move(m));
}

// Cotangent-space pullback matrix (the role of Df(x)^T). Invertibility is
// required by the metric pullback, not by the form pullback.
template <class S>
struct LinearMap {
    Matrix<S> matrix;

    explicit LinearMap(Matrix<S> m) : matrix(std::move(m)) {
        if (matrix.rows() != matrix.cols()) throw std::invalid_argument("linear map not square");
    }
    static LinearMap identity(int n) { return LinearMap(Matrix<S>::identity(n)); }
    int dim() const { return matrix.rows(); }
};

inline GramMetric<double> to_float(const GramMetric<Rational>& g) {
    FloatMatrix m(g.dim(), g.dim());
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) m.at(i, j) = to_double(g.gram().at(i, j));
    return GramMetric<double>(std::move(m));
}

inline LinearMap<double> to_float(const LinearMap<Rational>& t) {
    FloatMatrix m(t.dim(), t.dim());
    for (int i = 0; i < t.dim(); ++i)
        for (int j = 0; j < t.dim(); ++j) m.at(i, j) = to_double(t.matrix.at(i, j));
    return LinearMap<double>(std::move(m));
}

// Grade-wise exterior-power action of a matrix: out_J = sum_I a_I det M[I, J].
// This single kernel implements both form pullback and induced-basis changes;
// it composes contravariantly, apply(M2, apply(M1, a)) = apply(M1*M2, a).
template <class S>
Multivector<S> apply_outermorphism(const Matrix<S>& m, const Multivector<S>& a) {
    if (m.rows() != a.dim() || m.cols() != a.dim())
        throw std::invalid_argument("outermorphism dimension mismatch");
    Multivector<S> out(a.dim());
    std::vector<std::vector<blade_t>> by_grade(a.dim() + 1);
    for (const auto& [bits, c] : a.terms()) {
        const int k = grade_of(bits);
        if (by_grade[k].empty()) by_grade[k] = blades_of_grade(a.dim(), k);
        for (blade_t target : by_grade[k]) {
            S d = minor_det(m, bits, target);
            if (scalar_traits<S>::is_zero(d)) continue;
            out.add_term(target, c * d);
        }
    }
    return out;
}

// Gram extension of <.,.>_g to all of /\*: <e_I, e_J>_g = det [G_ij]_{i in I,
// j in J}, extended bilinearly. Cross-grade pairs vanish by definition.
template <class S>
S metric_inner(const GramMetric<S>& g, const Multivector<S>& a, const Multivector<S>& b) {
    a.require_same_dim(b);
    if (a.dim() != g.dim()) throw std::invalid_argument("metric dimension mismatch");
    S acc = scalar_traits<S>::zero();
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            if (grade_of(ia) != grade_of(ib)) continue;
            acc += ca * cb * minor_det(g.gram(), ia, ib);
        }
    return acc;
}

namespace detail {

// Non-normalizing Gram-Schmidt. Row i of `frame` holds the i-th orthogonal
// basis vector in e-coordinates (unit lower triangular); sq_lengths[i] is its
// g-squared-length, positive for SPD input. No pivoting: SPD makes every
// leading minor nonzero.
template <class S>
struct OrthoFrame {
    Matrix<S> frame;
    std::vector<S> sq_lengths;
};

template <class S>
OrthoFrame<S> gram_schmidt(const GramMetric<S>& g) {
    const int n = g.dim();
    const Matrix<S>& G = g.gram();
    OrthoFrame<S> out{Matrix<S>::identity(n), std::vector<S>(n, scalar_traits<S>::zero())};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            S proj = scalar_traits<S>::zero();  // <e_i, frame_j>_g
            for (int k = 0; k < n; ++k) proj += out.frame.at(j, k) * G.at(i, k);
            if (scalar_traits<S>::is_zero(proj)) continue;
            S f = proj / out.sq_lengths[j];
            for (int k = 0; k <= j; ++k) out.frame.at(i, k) -= f * out.frame.at(j, k);
        }
        S d = scalar_traits<S>::zero();
        for (int k = 0; k <= i; ++k)
            for (int l = 0; l <= i; ++l)
                d += out.frame.at(i, k) * out.frame.at(i, l) * G.at(k, l);
        out.sq_lengths[i] = std::move(d);
    }
    return out;
}

// Clifford product for a diagonal form: shared generators contribute their
// squared lengths, the sign is the usual reordering parity.
template <class S>
Multivector<S> diagonal_clifford(const std::vector<S>& sq_lengths, const Multivector<S>& a,
                                 const Multivector<S>& b) {
    Multivector<S> out(a.dim());
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            S term = ca * cb;
            if (reorder_sign(ia, ib) < 0) term = -term;
            blade_t shared = ia & ib;
            while (shared != 0) {
                const int i = std::countr_zero(shared);
                term *= sq_lengths[i];
                shared &= shared - 1;
            }
            out.add_term(ia ^ ib, std::move(term));
        }
    return out;
}

}  // namespace detail

// Clifford product of Cl(R^n, <.,.>_g): orthogonalize, multiply with the
// diagonal rule, map back. Exact in rational mode.
template <class S>
Multivector<S> clifford_metric(const GramMetric<S>& g, const Multivector<S>& a,
                               const Multivector<S>& b) {
    a.require_same_dim(b);
    if (a.dim() != g.dim()) throw std::invalid_argument("metric dimension mismatch");
    const auto basis = detail::gram_schmidt(g);
    const auto to_ortho = inverse(basis.frame);
    const auto pa = apply_outermorphism(to_ortho, a);
    const auto pb = apply_outermorphism(to_ortho, b);
    const auto prod = detail::diagonal_clifford(basis.sq_lengths, pa, pb);
    return apply_outermorphism(basis.frame, prod);
}

inline double metric_norm(const GramMetric<double>& g, const FloatMultivector& a) {
    return std::sqrt(metric_inner(g, a, a));
}

// Hodge star of g, fixed by a ^ star_g(b) = <a,b>_g vol_g with vol_g the
// positively oriented unit-norm top form e_{12...n} / sqrt(det G). Float
// only: the volume normalization needs a square root.
inline FloatMultivector hodge_star_metric(const GramMetric<double>& g,
                                          const FloatMultivector& a) {
    if (a.dim() != g.dim()) throw std::invalid_argument("metric dimension mismatch");
    const int n = a.dim();
    const blade_t full = (blade_t(1) << n) - 1;
    const double sqrt_det = std::sqrt(to_double(determinant(g.gram())));
    FloatMultivector out(n);
    for (int k = 0; k <= n; ++k) {
        const auto part = grade_project(a, k);
        if (part.is_zero()) continue;
        for (blade_t bits : blades_of_grade(n, k)) {
            const double ip = metric_inner(g, FloatMultivector::blade(n, bits), part);
            if (ip == 0.0) continue;
            const blade_t comp = full & ~bits;
            out.add_term(comp, reorder_sign(bits, comp) * ip / sqrt_det);
        }
    }
    return out;
}

// Scaled Clifford product: conformally invariant rescaling of <a ._g b>_k by
// |<a ._g b>_k|_g^{(l+m-k)/(l+m)} in the denominator. Grade-0 output is the
// constant 1 by definition; vanishing grade parts contribute 0; two scalars
// multiply as scalars. The genuine grade-0 Clifford component this discards
// stays available via grade_project(clifford_metric(...), 0).
inline FloatMultivector scaled_clifford(const GramMetric<double>& g, const FloatMultivector& a,
                                        const FloatMultivector& b) {
    a.require_same_dim(b);
    const auto la = a.homogeneous_grade();
    const auto lb = b.homogeneous_grade();
    if (!la || !lb)
        throw std::invalid_argument("scaled clifford product requires homogeneous inputs");
    const int l = *la, m = *lb, n = a.dim();
    if (l == 0 && m == 0) return FloatMultivector::scalar(n, a.coeff(0) * b.coeff(0));

    const auto prod = clifford_metric(g, a, b);
    auto out = FloatMultivector::scalar(n, 1.0);
    for (int k = 1; k <= n; ++k) {
        auto part = grade_project(prod, k);
        if (part.is_zero()) continue;
        const double norm = metric_norm(g, part);
        if (norm == 0.0) continue;  // 0/0 reads as 0
        const double exponent = double(l + m - k) / double(l + m);
        out += std::pow(norm, -exponent) * part;
    }
    return out;
}

// Extension to mixed-grade inputs by summing over homogeneous component
// pairs. Kept separate so the core operation keeps its sharp contract.
inline FloatMultivector scaled_clifford_sum(const GramMetric<double>& g,
                                            const FloatMultivector& a,
                                            const FloatMultivector& b) {
    const int n = a.dim();
    FloatMultivector out(n);
    for (int l = 0; l <= n; ++l) {
        const auto al = grade_project(a, l);
        if (al.is_zero() && l > 0) continue;
        for (int m = 0; m <= n; ++m) {
            const auto bm = grade_project(b, m);
            if (bm.is_zero() && m > 0) continue;
            out += scaled_clifford(g, al, bm);
        }
    }
    return out;
}

// Exterior-power action on forms; see apply_outermorphism for the
// composition order: pullback(T2) after pullback(T1) equals pullback(T1*T2).
template <class S>
Multivector<S> pullback_form(const LinearMap<S>& t, const Multivector<S>& a) {
    return apply_outermorphism(t.matrix, a);
}

// Gram matrix G' of f*g, the unique one with
// metric_inner(G', f*a, f*b) = metric_inner(G, a, b): G' = T^-1 G T^-T.
template <class S>
GramMetric<S> pullback_metric(const LinearMap<S>& t, const GramMetric<S>& g) {
    if (t.dim() != g.dim()) throw std::invalid_argument("pullback dimension mismatch");
    if (scalar_traits<S>::is_zero(determinant(t.matrix)))
        throw std::domain_error("metric pullback requires an invertible map");
    const auto tinv = inverse(t.matrix);
    return GramMetric<S>(tinv * g.gram() * tinv.transpose());
}

// Naturality of the Clifford product under pullback (exact) and of the
// scaled product (float, relative tolerance). Exists as a named property
// check; always true for valid inputs.
inline bool check_pullback_naturality(const LinearMap<Rational>& t, const GramMetric<Rational>& g,
                                      const RatMultivector& a, const RatMultivector& b,
                                      double rel_tol = 1e-9) {
    if (!a.homogeneous_grade() || !b.homogeneous_grade())
        throw std::invalid_argument("naturality check requires homogeneous inputs");
    const auto gp = pullback_metric(t, g);  // throws on singular t
    const auto lhs_exact = clifford_metric(gp, pullback_form(t, a), pullback_form(t, b));
    const auto rhs_exact = pullback_form(t, clifford_metric(g, a, b));
    if (lhs_exact != rhs_exact) return false;

    const auto tf = to_float(t);
    const auto gf = to_float(g);
    const auto gpf = pullback_metric(tf, gf);
    const auto af = to_float(a);
    const auto bf = to_float(b);
    const auto lhs = scaled_clifford(gpf, pullback_form(tf, af), pullback_form(tf, bf));
    const auto rhs = pullback_form(tf, scaled_clifford(gf, af, bf));
    const double scale = std::max({1.0, std::sqrt(euclidean_norm_sq(lhs)),
                                   std::sqrt(euclidean_norm_sq(rhs))});
    return std::sqrt(euclidean_norm_sq(lhs - rhs)) <= rel_tol * scale;
}

}  // namespace formality
