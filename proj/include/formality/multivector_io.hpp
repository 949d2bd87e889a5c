#pragma once

#include <string>

#include "formality/multivector.hpp"

namespace formality {

// Fixture/CLI text format: `3 + 2*e1 - 1/2*e13`. Blade suffixes are the
// ascending member indices as digits; any blade containing an index >= 10
// switches to the list form `e{1,3,11}`. The zero multivector prints "0".
// Terms print in (grade, blade) order, so rational-mode output is canonical
// and parse(print(x)) == x exactly.
std::string blade_name(blade_t bits);
std::string to_text(const RatMultivector& a);
std::string to_text(const FloatMultivector& a);

// Rational mode only; `dim` fixes the ambient dimension and bounds indices.
RatMultivector parse_multivector(const std::string& text, int dim);

std::ostream& operator<<(std::ostream& os, const RatMultivector& a);
std::ostream& operator<<(std::ostream& os, const FloatMultivector& a);

}  // namespace formality
