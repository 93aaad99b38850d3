#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcw/poly.hpp"
#include "qcw/upoly.hpp"

namespace qcw {

// Embeds a univariate polynomial in the designated variable of a ring.
inline JetPoly embed_upoly(const RingPtr& ring, std::size_t var, const UPoly<Rational>& p) {
    JetPoly out(ring);
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
        if (p.coeffs()[i] == 0) continue;
        Monomial m(ring->size(), 0);
        m[var] = static_cast<int>(i);
        out.add_term(std::move(m), p.coeffs()[i]);
    }
    return out;
}

// Extracts a polynomial supported on one variable into dense form.
inline UPoly<Rational> extract_upoly(const JetPoly& p, std::size_t var) {
    if (!p.is_zero() && !p.is_pure(var))
        throw AlgebraError("polynomial is not univariate in the requested variable");
    std::vector<Rational> c;
    for (const auto& [m, v] : p.terms()) {
        int e = m[var];
        if (e < 0) throw AlgebraError("negative exponent in univariate extraction");
        if (c.size() <= static_cast<std::size_t>(e)) c.resize(e + 1, Rational(0));
        c[e] = v;
    }
    return UPoly<Rational>(std::move(c));
}

// Element of R[1/f(v)] where R is a Ring and v its designated denominator
// variable (the first Exponential variable).  Canonical form: the
// denominator is a monic univariate polynomial in v with nonzero constant
// term; monomial factors v^k and the leading coefficient are folded into
// the (possibly Laurent) numerator, and common factors are cancelled.
//
// A default-constructed Fraction is the zero element of an unspecified ring
// (so Fraction can serve as a coefficient type for UPoly); it acquires a
// ring the first time it is combined with a ring-carrying value.
class Fraction {
public:
    Fraction() = default;

    explicit Fraction(JetPoly num)
        : num_(std::move(num)), den_({Rational(1)}) {
        init_ring();
    }

    Fraction(JetPoly num, UPoly<Rational> den)
        : num_(std::move(num)), den_(std::move(den)) {
        init_ring();
        normalize();
    }

    static Fraction from_rational(const RingPtr& ring, const Rational& r) {
        return Fraction(JetPoly::constant(ring, r));
    }

    static std::size_t denominator_var(const RingPtr& ring) {
        for (std::size_t i = 0; i < ring->size(); ++i)
            if (ring->var(i).kind == VarKind::Exponential) return i;
        throw AlgebraError("ring has no exponential variable for denominators");
    }

    bool engaged() const { return num_.has_value(); }
    bool is_zero() const { return !num_ || num_->is_zero(); }

    const RingPtr& ring() const { return require_engaged().num_->ring(); }
    const JetPoly& num() const { return *require_engaged().num_; }
    const UPoly<Rational>& den() const { return require_engaged().den_; }
    std::size_t qvar() const { return require_engaged().qvar_; }

    bool is_polynomial() const { return !num_ || den_.degree() == 0; }

    // The underlying polynomial (denominator 1), materialized in `ring`.
    JetPoly as_polynomial(const RingPtr& ring) const {
        if (!num_) return JetPoly::zero(ring);
        require_same_ring(num_->ring(), ring);
        if (den_.degree() != 0)
            throw AlgebraError("fraction has a nontrivial denominator");
        return *num_;
    }

    Fraction operator-() const {
        if (!num_) return Fraction();
        Fraction out = *this;
        out.num_ = -*out.num_;
        return out;
    }

    friend Fraction operator+(const Fraction& a, const Fraction& b) {
        if (!a.num_) return b;
        if (!b.num_) return a;
        require_same_ring(a.num_->ring(), b.num_->ring());
        JetPoly n = *a.num_ * b.den_embedded() + *b.num_ * a.den_embedded();
        return Fraction(std::move(n), a.den_ * b.den_);
    }
    friend Fraction operator-(const Fraction& a, const Fraction& b) { return a + (-b); }

    friend Fraction operator*(const Fraction& a, const Fraction& b) {
        if (!a.num_ || !b.num_) return Fraction();
        require_same_ring(a.num_->ring(), b.num_->ring());
        return Fraction(*a.num_ * *b.num_, a.den_ * b.den_);
    }

    friend Fraction operator*(const Fraction& a, const Rational& s) {
        if (!a.num_ || s == 0) {
            if (!a.num_) return Fraction();
            return Fraction(JetPoly::zero(a.num_->ring()));
        }
        Fraction out = a;
        out.num_->scale(s);
        return out;
    }
    friend Fraction operator*(const Rational& s, const Fraction& a) { return a * s; }

    // Multiplicative inverse; requires the numerator to be a monomial times
    // a univariate polynomial in the denominator variable.
    Fraction inverse() const {
        if (is_zero()) throw AlgebraError("inverse of zero fraction");
        if (!num_->is_pure(qvar_))
            throw AlgebraError("inverse requires a numerator free of other variables");
        int shift = num_->min_exponent(qvar_);
        JetPoly shifted(num_->ring());
        for (const auto& [m, c] : num_->terms()) {
            Monomial t = m;
            t[qvar_] -= shift;
            shifted.add_term(std::move(t), c);
        }
        UPoly<Rational> new_den = extract_upoly(shifted, qvar_);
        JetPoly new_num = embed_upoly(num_->ring(), qvar_, den_);
        if (shift != 0)
            new_num = new_num * JetPoly::variable(num_->ring(), qvar_, -shift);
        return Fraction(std::move(new_num), std::move(new_den));
    }

    friend Fraction operator/(const Fraction& a, const Fraction& b) {
        return a * b.inverse();
    }

    bool operator==(const Fraction& o) const {
        if (!num_) return o.is_zero();
        if (!o.num_) return is_zero();
        require_same_ring(num_->ring(), o.num_->ring());
        return *num_ * o.den_embedded() == *o.num_ * den_embedded();
    }
    bool operator!=(const Fraction& o) const { return !(*this == o); }

    // Logarithmic derivative v d/dv in the denominator variable.
    Fraction log_derivative() const {
        if (!num_) return Fraction();
        JetPoly dn = num_->log_derivative(qvar_);
        std::vector<Rational> c(den_.coeffs());
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] *= Rational(static_cast<long>(i));
        JetPoly dd = embed_upoly(num_->ring(), qvar_, UPoly<Rational>(std::move(c)));
        // (n/d)' = (n' d - n d') / d^2
        return Fraction(dn * den_embedded() - *num_ * dd, den_ * den_);
    }

    std::string str() const {
        if (!num_) return "0";
        if (is_polynomial()) return num_->str();
        return "(" + num_->str() + ") / (" +
               embed_upoly(num_->ring(), qvar_, den_).str() + ")";
    }

private:
    const Fraction& require_engaged() const {
        if (!num_) throw AlgebraError("zero fraction of unspecified ring");
        return *this;
    }

    void init_ring() {
        if (!num_->ring()) throw AlgebraError("fraction over a null ring");
        qvar_ = denominator_var(num_->ring());
        if (den_.is_zero()) throw AlgebraError("fraction with zero denominator");
    }

    JetPoly den_embedded() const {
        return embed_upoly(num_->ring(), qvar_, den_);
    }

    void normalize() {
        if (num_->is_zero()) {
            den_ = UPoly<Rational>({Rational(1)});
            return;
        }
        // Fold monomial factors of the denominator into the numerator.
        std::size_t trailing = 0;
        while (trailing < den_.coeffs().size() && den_.coeffs()[trailing] == 0)
            ++trailing;
        if (trailing > 0) {
            std::vector<Rational> c(den_.coeffs().begin() + trailing, den_.coeffs().end());
            den_ = UPoly<Rational>(std::move(c));
            *num_ = *num_ * JetPoly::variable(num_->ring(), qvar_, -static_cast<int>(trailing));
        }
        // Cancel the gcd of the denominator with the numerator's univariate
        // content in the denominator variable.
        if (den_.degree() > 0) {
            UPoly<Rational> g = poly_gcd(den_, numerator_content());
            if (g.degree() > 0) {
                den_ = divrem(den_, g).first;
                *num_ = exact_divide(*num_, embed_upoly(num_->ring(), qvar_, g));
            }
        }
        // Make the denominator monic.
        Rational lead = den_.leading();
        if (lead != 1) {
            den_ = den_.scaled(Rational(1) / lead);
            num_->scale(Rational(1) / lead);
        }
    }

    // Gcd of all coefficient slices of the numerator, viewed as univariate
    // polynomials in the denominator variable.  Shift-invariant: each slice
    // is read from its own minimal exponent, legitimate because after the
    // fold above the denominator has nonzero constant term.
    UPoly<Rational> numerator_content() const {
        std::map<Monomial, std::map<int, Rational>, GradedLexLess> slices;
        for (const auto& [m, c] : num_->terms()) {
            Monomial key = m;
            int e = key[qvar_];
            key[qvar_] = 0;
            slices[key][e] = c;
        }
        UPoly<Rational> g;
        for (const auto& [key, slice] : slices) {
            int mn = slice.begin()->first;
            std::vector<Rational> c(slice.rbegin()->first - mn + 1, Rational(0));
            for (const auto& [e, v] : slice) c[e - mn] = v;
            g = poly_gcd(g, UPoly<Rational>(std::move(c)));
            if (g.degree() == 0) break;
        }
        return g;
    }

    std::optional<JetPoly> num_;
    UPoly<Rational> den_{{Rational(1)}};
    std::size_t qvar_ = 0;
};

inline Fraction field_inverse(const Fraction& f) { return f.inverse(); }

} // namespace qcw
