#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "qcw/errors.hpp"

namespace qcw {

// Expression templates are disabled so that arithmetic results are plain
// values; generic template code (ternaries, accumulators, containers of
// coefficients) relies on that.
using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

// Canonical text form: "p" for integers, "p/q" otherwise, q > 0, gcd(p,q)=1.
inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// Parses the canonical form (also accepts surrounding whitespace-free signed
// integers and fractions such as "-3/4").
inline Rational parse_rational(const std::string& s) {
    try {
        const auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw UsageError("rational with zero denominator: " + s);
        return Rational(num, den);
    } catch (const std::exception&) {
        throw UsageError("cannot parse rational: " + s);
    }
}

// r^e for arbitrary integer e (negative exponents require r != 0).
inline Rational rational_pow(const Rational& r, long e) {
    if (e == 0) return Rational(1);
    Rational base = r;
    bool invert = e < 0;
    unsigned long n = invert ? static_cast<unsigned long>(-(e + 1)) + 1ul
                             : static_cast<unsigned long>(e);
    if (invert) {
        if (base == 0) throw AlgebraError("zero raised to a negative power");
        base = Rational(1) / base;
    }
    Rational acc(1);
    while (n > 0) {
        if (n & 1ul) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

inline Integer integer_pow(Integer base, unsigned long e) {
    Integer acc(1);
    while (e > 0) {
        if (e & 1ul) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

// Exact floor of p/q for integers (q > 0).
inline Integer floor_div(const Integer& p, const Integer& q) {
    Integer quo = p / q;
    if ((p % q) != 0 && ((p < 0) != (q < 0))) --quo;
    return quo;
}

} // namespace qcw
