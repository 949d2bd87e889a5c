#pragma once

// Shared test helpers: seeded random generators for exact-rational inputs and
// slow reference implementations ("oracles") that stay independent of the
// library's bit-twiddling code paths.

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "formality/matrix.hpp"
#include "formality/metric.hpp"
#include "formality/multivector.hpp"

namespace testutil {

using formality::blade_t;
using formality::GramMetric;
using formality::Matrix;
using formality::RatMatrix;
using formality::Rational;
using formality::RatMultivector;

using Rng = std::mt19937_64;

inline Rational rand_rational(Rng& rng, int lo = -9, int hi = 9, int max_den = 9,
                              bool nonzero = false) {
    std::uniform_int_distribution<int> num(lo, hi);
    std::uniform_int_distribution<int> den(1, max_den);
    for (;;) {
        Rational q(num(rng), den(rng));
        q.canonicalize();
        if (!nonzero || sgn(q) != 0) return q;
    }
}

// Sparse random multivector; grade < 0 means mixed grades.
inline RatMultivector rand_multivector(Rng& rng, int n, int terms, int grade = -1) {
    RatMultivector out(n);
    const auto pool =
        grade < 0 ? std::vector<blade_t>() : formality::blades_of_grade(n, grade);
    std::uniform_int_distribution<blade_t> any(0, (blade_t(1) << n) - 1);
    for (int t = 0; t < terms; ++t) {
        blade_t bits;
        if (grade < 0) {
            bits = any(rng);
        } else {
            std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
            bits = pool[pick(rng)];
        }
        out.add_term(bits, rand_rational(rng, -9, 9, 9, true));
    }
    return out;
}

inline RatMatrix rand_matrix(Rng& rng, int n, int lo = -3, int hi = 3, int max_den = 2) {
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = rand_rational(rng, lo, hi, max_den);
    return m;
}

// A^T A + I is symmetric positive definite for any rational A.
inline GramMetric<Rational> rand_spd_metric(Rng& rng, int n) {
    const RatMatrix a = rand_matrix(rng, n);
    RatMatrix g = a.transpose() * a;
    for (int i = 0; i < n; ++i) g.at(i, i) += Rational(1);
    return GramMetric<Rational>(std::move(g));
}

inline formality::LinearMap<Rational> rand_invertible_map(Rng& rng, int n) {
    for (;;) {
        RatMatrix m = rand_matrix(rng, n);
        if (!formality::is_zero(formality::determinant(m)))
            return formality::LinearMap<Rational>(std::move(m));
    }
}

// Signed permutation matrices: exactly orthogonal, exactly rational.
inline formality::LinearMap<Rational> rand_signed_permutation(Rng& rng, int n) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    RatMatrix m(n, n);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < n; ++i) m.at(i, perm[i]) = Rational(coin(rng) ? 1 : -1);
    return formality::LinearMap<Rational>(std::move(m));
}

// ---------------------------------------------------------------------------
// Reference Clifford/wedge arithmetic on sorted index lists. Signs come from
// moving one generator at a time, never from the popcount trick the library
// uses, so agreement is meaningful.

using IndexBlade = std::vector<int>;  // strictly ascending generator indices

struct NaiveMultivector {
    std::map<IndexBlade, Rational> terms;

    void add(const IndexBlade& blade, const Rational& c) {
        if (sgn(c) == 0) return;
        auto [it, fresh] = terms.try_emplace(blade, c);
        if (!fresh) {
            it->second += c;
            if (sgn(it->second) == 0) terms.erase(it);
        }
    }
};

// blade * e_i: walk e_i leftwards past every larger generator; a twin
// annihilates (e_i e_i = 1), otherwise e_i lands in its sorted slot.
inline std::pair<IndexBlade, int> blade_times_generator(const IndexBlade& blade, int i) {
    int larger = 0;
    for (int j : blade)
        if (j > i) ++larger;
    const int sign = (larger % 2 == 0) ? 1 : -1;
    IndexBlade out = blade;
    auto it = std::find(out.begin(), out.end(), i);
    if (it != out.end()) {
        out.erase(it);
    } else {
        out.insert(std::lower_bound(out.begin(), out.end(), i), i);
    }
    return {out, sign};
}

inline NaiveMultivector naive_clifford(const NaiveMultivector& a, const NaiveMultivector& b) {
    NaiveMultivector out;
    for (const auto& [ba, ca] : a.terms)
        for (const auto& [bb, cb] : b.terms) {
            IndexBlade acc = ba;
            int sign = 1;
            for (int i : bb) {
                auto [next, s] = blade_times_generator(acc, i);
                acc = std::move(next);
                sign *= s;
            }
            out.add(acc, Rational(sign) * ca * cb);
        }
    return out;
}

inline NaiveMultivector naive_wedge(const NaiveMultivector& a, const NaiveMultivector& b) {
    NaiveMultivector out;
    for (const auto& [ba, ca] : a.terms)
        for (const auto& [bb, cb] : b.terms) {
            bool shared = false;
            for (int i : bb)
                if (std::find(ba.begin(), ba.end(), i) != ba.end()) shared = true;
            if (shared) continue;
            IndexBlade acc = ba;
            int sign = 1;
            for (int i : bb) {
                auto [next, s] = blade_times_generator(acc, i);
                acc = std::move(next);
                sign *= s;
            }
            out.add(acc, Rational(sign) * ca * cb);
        }
    return out;
}

inline NaiveMultivector to_naive(const RatMultivector& a) {
    NaiveMultivector out;
    for (const auto& [bits, c] : a.terms()) {
        IndexBlade blade;
        for (int i = 1; i <= a.dim(); ++i)
            if (bits & (blade_t(1) << (i - 1))) blade.push_back(i);
        out.add(blade, c);
    }
    return out;
}

inline RatMultivector from_naive(const NaiveMultivector& a, int dim) {
    RatMultivector out(dim);
    for (const auto& [blade, c] : a.terms) {
        blade_t bits = 0;
        for (int i : blade) bits |= blade_t(1) << (i - 1);
        out.add_term(bits, c);
    }
    return out;
}

}  // namespace testutil
