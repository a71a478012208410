#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace rmatch {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational arithmetic. Canonical form (gcd 1, positive denominator)
// is maintained by the backend on every operation.
using Rational = boost::multiprecision::cpp_rational;

inline BigInt int_pow(BigInt base, unsigned exp) {
    BigInt out = 1;
    while (exp) {
        if (exp & 1u) out *= base;
        base *= base;
        exp >>= 1u;
    }
    return out;
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) { return -floor_div(-a, b); }

/// Smallest integer >= q.
inline BigInt rational_ceil(const Rational& q) {
    return ceil_div(numerator(q), denominator(q));
}

/// Serializes with the denominator always present, e.g. "2/1".
inline std::string to_fraction_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

/// Parses "p/q" or a bare integer "p".
inline Rational parse_fraction(const std::string& text) {
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad fraction: " + text);
    }
}

}  // namespace rmatch
