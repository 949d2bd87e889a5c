#include "formality/multivector_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <vector>

namespace formality {

namespace {

std::vector<int> blade_indices(blade_t bits) {
    std::vector<int> idx;
    for (int i = 1; i <= kMaxDim; ++i)
        if (bits & (blade_t(1) << (i - 1))) idx.push_back(i);
    return idx;
}

std::string format_coeff(const Rational& c) { return to_string(c); }

std::string format_coeff(double c) {
    char buf[64];
    // shortest representation that round-trips a double
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), c);
    return std::string(buf, end);
}

template <class S>
bool is_unit(const S& c) {
    return c == S(1);
}
template <class S>
bool is_neg_unit(const S& c) {
    return c == S(-1);
}

template <class S>
std::string render(const Multivector<S>& a) {
    if (a.is_zero()) return "0";

    std::vector<std::pair<blade_t, S>> terms(a.terms().begin(), a.terms().end());
    std::stable_sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
        int gx = grade_of(x.first), gy = grade_of(y.first);
        return gx != gy ? gx < gy : x.first < y.first;
    });

    std::ostringstream out;
    bool first = true;
    for (const auto& [bits, c] : terms) {
        const bool neg = c < S(0);
        if (first) {
            if (neg) out << "-";
            first = false;
        } else {
            out << (neg ? " - " : " + ");
        }
        S mag = neg ? S(-c) : c;
        if (bits == 0) {
            out << format_coeff(mag);
        } else if (is_unit(mag)) {
            out << blade_name(bits);
        } else {
            out << format_coeff(mag) << "*" << blade_name(bits);
        }
    }
    return out.str();
}

struct Parser {
    std::string s;  // whitespace stripped up front
    size_t pos = 0;
    int dim;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("multivector parse error at offset " +
                                    std::to_string(pos) + ": " + what);
    }

    bool done() const { return pos >= s.size(); }
    char peek() const { return done() ? '\0' : s[pos]; }
    bool eat(char c) {
        if (peek() != c) return false;
        ++pos;
        return true;
    }

    std::string take_digits() {
        size_t start = pos;
        while (!done() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("expected digits");
        return s.substr(start, pos - start);
    }

    Rational parse_number() {
        std::string num = take_digits();
        if (eat('/')) return parse_rational(num + "/" + take_digits());
        return parse_rational(num);
    }

    blade_t parse_blade() {
        if (!eat('e')) fail("expected blade 'e...'");
        std::vector<int> idx;
        if (eat('{')) {
            do {
                idx.push_back(static_cast<int>(std::stol(take_digits())));
            } while (eat(','));
            if (!eat('}')) fail("expected '}'");
        } else {
            std::string digits = take_digits();
            for (char d : digits) idx.push_back(d - '0');
        }
        blade_t bits = 0;
        int prev = 0;
        for (int i : idx) {
            if (i < 1 || i > dim) fail("blade index " + std::to_string(i) + " out of range");
            if (i <= prev) fail("blade indices must be strictly ascending");
            prev = i;
            bits |= blade_t(1) << (i - 1);
        }
        return bits;
    }

    // term := number | number '*'? blade | blade   (sign handled by caller)
    void parse_term(RatMultivector& acc, bool negative) {
        Rational coeff(1);
        blade_t bits = 0;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            coeff = parse_number();
            if (eat('*')) {
                bits = parse_blade();
            } else if (peek() == 'e') {
                bits = parse_blade();
            }
        } else if (peek() == 'e') {
            bits = parse_blade();
        } else {
            fail("expected a coefficient or blade");
        }
        if (negative) coeff = -coeff;
        acc.add_term(bits, std::move(coeff));
    }

    RatMultivector parse() {
        RatMultivector acc(dim);
        bool negative = eat('-');
        if (!negative) eat('+');
        parse_term(acc, negative);
        while (!done()) {
            if (eat('+'))
                parse_term(acc, false);
            else if (eat('-'))
                parse_term(acc, true);
            else
                fail("expected '+' or '-'");
        }
        return acc;
    }
};

}  // namespace

std::string blade_name(blade_t bits) {
    if (bits == 0) return "1";
    const auto idx = blade_indices(bits);
    if (idx.back() <= 9) {
        std::string name = "e";
        for (int i : idx) name += static_cast<char>('0' + i);
        return name;
    }
    std::string name = "e{";
    for (size_t j = 0; j < idx.size(); ++j) {
        if (j) name += ",";
        name += std::to_string(idx[j]);
    }
    return name + "}";
}

std::string to_text(const RatMultivector& a) { return render(a); }
std::string to_text(const FloatMultivector& a) { return render(a); }

std::ostream& operator<<(std::ostream& os, const RatMultivector& a) { return os << to_text(a); }
std::ostream& operator<<(std::ostream& os, const FloatMultivector& a) { return os << to_text(a); }

RatMultivector parse_multivector(const std::string& text, int dim) {
    std::string stripped;
    stripped.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) stripped.push_back(c);
    if (stripped.empty()) throw std::invalid_argument("empty multivector text");
    if (stripped == "0") return RatMultivector::zero(dim);
    Parser p{std::move(stripped), 0, dim};
    return p.parse();
}

}  // namespace formality
