#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace formality {

// Exact arbitrary-precision rational. All exact-mode arithmetic in the
// library is closed over this type; no operation introduces rounding.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline int sign(const Rational& q) { return sgn(q); }

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

inline double to_double(const Rational& q) { return q.get_d(); }

// "3", "-7/2". Round-trips exactly through parse_rational.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational parse_rational(const std::string& text) {
    Rational q;
    if (q.set_str(text, 10) != 0)
        throw std::invalid_argument("malformed rational '" + text + "'");
    if (sgn(q.get_den()) == 0)
        throw std::invalid_argument("rational with zero denominator: '" + text + "'");
    q.canonicalize();
    return q;
}

// Scalar-mode traits shared by the exact and float instantiations of the
// multivector machinery. Exact mode compares against literal zero; float
// mode drops nothing (callers handle tolerances explicitly).
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& v) { return sgn(v) == 0; }
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static bool is_zero(double v) { return v == 0.0; }
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
};

}  // namespace formality
