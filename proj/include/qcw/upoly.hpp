#pragma once

#include <initializer_list>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qcw/errors.hpp"
#include "qcw/rational.hpp"

namespace qcw {

inline Rational field_inverse(const Rational& r) {
    if (r == 0) throw AlgebraError("inverse of zero");
    return Rational(1) / r;
}

// Dense univariate polynomial with coefficients in C (ascending order, no
// trailing zeros).  C must provide +, -, unary -, *, ==, default zero, and
// multiplication by Rational.  Division-flavored operations additionally use
// field_inverse(C) found by argument-dependent lookup.
template <class C>
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<C> coeffs) : c_(std::move(coeffs)) { normalize(); }
    UPoly(std::initializer_list<C> coeffs) : c_(coeffs) { normalize(); }

    static UPoly constant(C v) {
        UPoly p;
        p.c_.push_back(std::move(v));
        p.normalize();
        return p;
    }

    // coeff * t^k
    static UPoly term(C coeff, std::size_t k) {
        UPoly p;
        p.c_.assign(k + 1, C());
        p.c_[k] = std::move(coeff);
        p.normalize();
        return p;
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    C coeff(std::size_t i) const { return i < c_.size() ? c_[i] : C(); }
    const std::vector<C>& coeffs() const { return c_; }

    const C& leading() const {
        if (c_.empty()) throw AlgebraError("leading coefficient of zero polynomial");
        return c_.back();
    }

    UPoly operator-() const {
        UPoly out = *this;
        for (auto& v : out.c_) v = -v;
        return out;
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        UPoly out;
        out.c_.resize(std::max(a.c_.size(), b.c_.size()), C());
        for (std::size_t i = 0; i < out.c_.size(); ++i)
            out.c_[i] = a.coeff(i) + b.coeff(i);
        out.normalize();
        return out;
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }

    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return UPoly();
        UPoly out;
        out.c_.assign(a.c_.size() + b.c_.size() - 1, C());
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                out.c_[i + j] = out.c_[i + j] + a.c_[i] * b.c_[j];
        out.normalize();
        return out;
    }

    UPoly& operator+=(const UPoly& o) { *this = *this + o; return *this; }
    UPoly& operator-=(const UPoly& o) { *this = *this - o; return *this; }
    UPoly& operator*=(const UPoly& o) { *this = *this * o; return *this; }

    UPoly scaled(const C& s) const {
        UPoly out;
        out.c_.reserve(c_.size());
        for (const auto& v : c_) out.c_.push_back(v * s);
        out.normalize();
        return out;
    }

    bool operator==(const UPoly& o) const { return c_ == o.c_; }
    bool operator!=(const UPoly& o) const { return !(*this == o); }

    UPoly derivative() const {
        UPoly out;
        for (std::size_t i = 1; i < c_.size(); ++i)
            out.c_.push_back(c_[i] * Rational(static_cast<long>(i)));
        out.normalize();
        return out;
    }

    // Horner evaluation in any target algebra X.  lift maps coefficients
    // into X; x is the evaluation point.
    template <class X, class Lift>
    X evaluate(const X& x, Lift&& lift) const {
        X acc = lift(C());
        for (std::size_t i = c_.size(); i-- > 0;)
            acc = acc * x + lift(c_[i]);
        return acc;
    }

    // m(c*t) / c^deg(m): maps roots u to u/c while keeping the polynomial
    // monic.  Used to present branch data in a rescaled root variable.
    UPoly rescale_root(const Rational& c) const {
        if (c == 0) throw AlgebraError("rescale by zero");
        UPoly out;
        out.c_.reserve(c_.size());
        const int n = degree();
        for (std::size_t i = 0; i < c_.size(); ++i)
            out.c_.push_back(c_[i] * rational_pow(c, static_cast<long>(i) - n));
        out.normalize();
        return out;
    }

    template <class Fmt>
    std::string str(const std::string& var, Fmt&& fmt) const {
        if (c_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (c_[i] == C()) continue;
            if (!first) os << " + ";
            first = false;
            os << "(" << fmt(c_[i]) << ")";
            if (i > 0) os << "*" << var << "^" << i;
        }
        return os.str();
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back() == C()) c_.pop_back();
    }

    std::vector<C> c_;
};

// Euclidean division over a field: a = q*b + r with deg r < deg b.
template <class C>
std::pair<UPoly<C>, UPoly<C>> divrem(const UPoly<C>& a, const UPoly<C>& b) {
    if (b.is_zero()) throw AlgebraError("polynomial division by zero");
    C inv_lead = field_inverse(b.leading());
    UPoly<C> q, r = a;
    while (!r.is_zero() && r.degree() >= b.degree()) {
        const std::size_t shift = static_cast<std::size_t>(r.degree() - b.degree());
        C factor = r.leading() * inv_lead;
        UPoly<C> t = UPoly<C>::term(factor, shift);
        q += t;
        r -= t * b;
        if (!r.is_zero() && r.degree() >= static_cast<int>(shift) + b.degree())
            throw AlgebraError("division failed to reduce degree (zero divisor?)");
    }
    return {q, r};
}

template <class C>
UPoly<C> pmod(const UPoly<C>& a, const UPoly<C>& b) { return divrem(a, b).second; }

// Multiplicative identity of the coefficient field, built from any nonzero
// sample (coefficient types need not be constructible from bare integers).
template <class C>
C field_one(const C& nonzero_sample) {
    return nonzero_sample * field_inverse(nonzero_sample);
}

// Extended gcd over a field: returns (g, s, t), g monic, s*a + t*b = g.
template <class C>
std::tuple<UPoly<C>, UPoly<C>, UPoly<C>> ext_gcd(const UPoly<C>& a, const UPoly<C>& b) {
    if (a.is_zero() && b.is_zero()) throw AlgebraError("gcd(0,0)");
    const C one = field_one(a.is_zero() ? b.leading() : a.leading());
    UPoly<C> r0 = a, r1 = b;
    UPoly<C> s0 = UPoly<C>::constant(one), s1;
    UPoly<C> t0, t1 = UPoly<C>::constant(one);
    // Invariants: s*a + t*b = r for (s0,t0,r0) and (s1,t1,r1).
    while (!r1.is_zero()) {
        auto [q, r] = divrem(r0, r1);
        UPoly<C> s2 = s0 - q * s1;
        UPoly<C> t2 = t0 - q * t1;
        r0 = r1; r1 = r;
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    C inv = field_inverse(r0.leading());
    return {r0.scaled(inv), s0.scaled(inv), t0.scaled(inv)};
}

template <class C>
UPoly<C> poly_gcd(const UPoly<C>& a, const UPoly<C>& b) {
    if (a.is_zero() && b.is_zero()) return UPoly<C>();
    if (a.is_zero()) return b.scaled(field_inverse(b.leading()));
    if (b.is_zero()) return a.scaled(field_inverse(a.leading()));
    return std::get<0>(ext_gcd(a, b));
}

// Resultant over a field via the Euclidean remainder sequence.
template <class C>
C resultant(const UPoly<C>& a, const UPoly<C>& b) {
    if (a.is_zero() || b.is_zero()) return C();
    if (b.degree() == 0) {
        C out = field_one(b.leading());
        for (int i = 0; i < a.degree(); ++i) out = out * b.leading();
        return out;
    }
    UPoly<C> r = pmod(a, b);
    if (r.is_zero()) return C();
    // res(a,b) = (-1)^{deg a * deg b} * lc(b)^{deg a - deg r} * res(b, r)
    C factor = field_one(b.leading());
    for (int i = 0; i < a.degree() - r.degree(); ++i) factor = factor * b.leading();
    C out = factor * resultant(b, r);
    if ((a.degree() % 2) && (b.degree() % 2)) out = -out;
    return out;
}

// Squarefree test over a field: gcd(p, p') is constant.
template <class C>
bool is_squarefree(const UPoly<C>& p) {
    if (p.degree() <= 1) return true;
    return poly_gcd(p, p.derivative()).degree() == 0;
}

} // namespace qcw
