#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "formality/rational.hpp"

namespace formality {

// Blades are subsets of {1,...,n} packed into a bitmask: bit i-1 set means
// the basis covector e_i participates. The canonical blade e_I is the wedge
// of its members in ascending index order; grade = popcount.
using blade_t = std::uint32_t;

inline constexpr int kMaxDim = 12;

inline int grade_of(blade_t bits) { return std::popcount(bits); }

// Sign of sorting the concatenation e_A e_B into ascending order, counting
// transpositions of distinct generators. Valid both for the wedge (disjoint
// masks) and for the Euclidean Clifford product, where shared generators
// annihilate in pairs via e_i e_i = 1 after the same reordering.
inline int reorder_sign(blade_t a, blade_t b) {
    int swaps = 0;
    a >>= 1;
    while (a != 0) {
        swaps += std::popcount(a & b);
        a >>= 1;
    }
    return (swaps & 1) ? -1 : 1;
}

// All grade-k blade masks in n dimensions, ascending.
inline std::vector<blade_t> blades_of_grade(int n, int k) {
    std::vector<blade_t> out;
    const blade_t top = blade_t(1) << n;
    for (blade_t b = 0; b < top; ++b)
        if (std::popcount(b) == k) out.push_back(b);
    return out;
}

// Graded element of the exterior algebra over R^n, stored as a sparse
// blade -> coefficient table with zero coefficients dropped. The scalar
// type S is either Rational (canonical, exact) or double (mirror mode);
// the two never mix within one value. Immutable in spirit: operations
// return fresh values and never mutate their arguments.
template <class S>
class Multivector {
  public:
    explicit Multivector(int dim) : dim_(dim) {
        if (dim < 2 || dim > kMaxDim)
            throw std::invalid_argument("multivector dimension must be in [2, 12]");
    }

    static Multivector zero(int dim) { return Multivector(dim); }

    static Multivector scalar(int dim, S value) {
        Multivector m(dim);
        m.add_term(0, std::move(value));
        return m;
    }

    static Multivector blade(int dim, blade_t bits, S coeff = scalar_traits<S>::one()) {
        Multivector m(dim);
        m.add_term(bits, std::move(coeff));
        return m;
    }

    // e_i, 1-based.
    static Multivector basis_vector(int dim, int i) {
        if (i < 1 || i > dim) throw std::invalid_argument("basis vector index out of range");
        return blade(dim, blade_t(1) << (i - 1));
    }

    int dim() const { return dim_; }
    const std::map<blade_t, S>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    S coeff(blade_t bits) const {
        auto it = terms_.find(bits);
        return it == terms_.end() ? scalar_traits<S>::zero() : it->second;
    }

    void add_term(blade_t bits, S delta) {
        if (bits >= (blade_t(1) << dim_))
            throw std::invalid_argument("blade index out of range for dimension");
        if (scalar_traits<S>::is_zero(delta)) return;
        auto it = terms_.find(bits);
        if (it == terms_.end()) {
            terms_.emplace(bits, std::move(delta));
        } else {
            it->second += delta;
            if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
        }
    }

    // Grade if every stored term has the same one. The zero multivector
    // reports grade 0 (it is the zero scalar).
    std::optional<int> homogeneous_grade() const {
        if (terms_.empty()) return 0;
        int g = grade_of(terms_.begin()->first);
        for (const auto& [bits, c] : terms_)
            if (grade_of(bits) != g) return std::nullopt;
        return g;
    }

    bool operator==(const Multivector& other) const {
        return dim_ == other.dim_ && terms_ == other.terms_;
    }
    bool operator!=(const Multivector& other) const { return !(*this == other); }

    Multivector operator-() const {
        Multivector out(dim_);
        for (const auto& [bits, c] : terms_) out.terms_.emplace(bits, -c);
        return out;
    }

    Multivector& operator+=(const Multivector& other) {
        require_same_dim(other);
        for (const auto& [bits, c] : other.terms_) add_term(bits, c);
        return *this;
    }
    Multivector& operator-=(const Multivector& other) {
        require_same_dim(other);
        for (const auto& [bits, c] : other.terms_) add_term(bits, -c);
        return *this;
    }
    Multivector& operator*=(const S& factor) {
        if (scalar_traits<S>::is_zero(factor)) {
            terms_.clear();
            return *this;
        }
        for (auto& [bits, c] : terms_) c *= factor;
        return *this;
    }

    friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
    friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
    friend Multivector operator*(const S& s, Multivector a) { return a *= s; }
    friend Multivector operator*(Multivector a, const S& s) { return a *= s; }

    void require_same_dim(const Multivector& other) const {
        if (dim_ != other.dim_)
            throw std::invalid_argument("multivector dimension mismatch");
    }

  private:
    int dim_;
    std::map<blade_t, S> terms_;
};

using RatMultivector = Multivector<Rational>;
using FloatMultivector = Multivector<double>;

inline FloatMultivector to_float(const RatMultivector& a) {
    FloatMultivector out(a.dim());
    for (const auto& [bits, c] : a.terms()) out.add_term(bits, to_double(c));
    return out;
}

// Exterior product. On blades: e_I ^ e_J = +-e_{I u J} when disjoint, 0
// otherwise, the sign being the parity of the merge permutation.
template <class S>
Multivector<S> wedge(const Multivector<S>& a, const Multivector<S>& b) {
    a.require_same_dim(b);
    Multivector<S> out(a.dim());
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            if ((ia & ib) != 0) continue;
            S term = ca * cb;
            if (reorder_sign(ia, ib) < 0) term = -term;
            out.add_term(ia | ib, std::move(term));
        }
    return out;
}

template <class S>
Multivector<S> grade_project(const Multivector<S>& a, int k) {
    if (k < 0 || k > a.dim()) throw std::invalid_argument("grade out of range");
    Multivector<S> out(a.dim());
    for (const auto& [bits, c] : a.terms())
        if (grade_of(bits) == k) out.add_term(bits, c);
    return out;
}

// Inner product that makes the induced blade basis orthonormal. Cross-grade
// pairs contribute nothing since distinct blades never share a key.
template <class S>
S euclidean_inner(const Multivector<S>& a, const Multivector<S>& b) {
    a.require_same_dim(b);
    S acc = scalar_traits<S>::zero();
    for (const auto& [bits, ca] : a.terms()) {
        auto cb = b.coeff(bits);
        if (!scalar_traits<S>::is_zero(cb)) acc += ca * cb;
    }
    return acc;
}

template <class S>
S euclidean_norm_sq(const Multivector<S>& a) {
    return euclidean_inner(a, a);
}

// Hodge star for the Euclidean metric and standard orientation, fixed by
// e_I ^ *e_I = e_{12...n}. Satisfies ** = (-1)^{k(n-k)} on grade k.
template <class S>
Multivector<S> hodge_star(const Multivector<S>& a) {
    const blade_t full = (blade_t(1) << a.dim()) - 1;
    Multivector<S> out(a.dim());
    for (const auto& [bits, c] : a.terms()) {
        const blade_t comp = full & ~bits;
        S term = c;
        if (reorder_sign(bits, comp) < 0) term = -term;
        out.add_term(comp, std::move(term));
    }
    return out;
}

// Clifford product of Cl(R^n, euclidean): e_i e_i = 1, e_i e_j = -e_j e_i.
// Blade pairs multiply to the symmetric-difference blade; shared generators
// annihilate after reordering, contributing only the transposition sign.
template <class S>
Multivector<S> clifford_euclidean(const Multivector<S>& a, const Multivector<S>& b) {
    a.require_same_dim(b);
    Multivector<S> out(a.dim());
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            S term = ca * cb;
            if (reorder_sign(ia, ib) < 0) term = -term;
            out.add_term(ia ^ ib, std::move(term));
        }
    return out;
}

// |<a.b>_k| <= 2^n |a||b|, checked on squares so exact mode stays exact.
template <class S>
bool clifford_grade_bound_check(const Multivector<S>& a, const Multivector<S>& b, int k) {
    a.require_same_dim(b);
    const auto part = grade_project(clifford_euclidean(a, b), k);
    S bound = euclidean_norm_sq(a) * euclidean_norm_sq(b);
    for (int i = 0; i < a.dim(); ++i) bound *= S(4);
    return euclidean_norm_sq(part) <= bound;
}

}  // namespace formality
