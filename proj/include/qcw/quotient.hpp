#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcw/fraction.hpp"
#include "qcw/upoly.hpp"

namespace qcw {

class QuotientRing;
using QuotientRingPtr = std::shared_ptr<const QuotientRing>;

// Element of Q(q)[u] / (m(u)); the representative polynomial has degree
// < deg m and Fraction coefficients (which may carry jet variables in their
// numerators).  A default-constructed element is the zero of an unspecified
// ring, so the type can serve as a UPoly coefficient.
class QuotientElement {
public:
    QuotientElement() = default;
    QuotientElement(QuotientRingPtr ring, UPoly<Fraction> rep)
        : ring_(std::move(ring)), rep_(std::move(rep)) {}

    bool engaged() const { return ring_ != nullptr; }
    bool is_zero() const { return !ring_ || rep_.is_zero(); }
    const QuotientRingPtr& ring() const { return ring_; }
    const UPoly<Fraction>& rep() const { return rep_; }

    QuotientElement operator-() const {
        if (!ring_) return {};
        return {ring_, -rep_};
    }

    friend QuotientElement operator+(const QuotientElement& a, const QuotientElement& b);
    friend QuotientElement operator-(const QuotientElement& a, const QuotientElement& b);
    friend QuotientElement operator*(const QuotientElement& a, const QuotientElement& b);
    friend QuotientElement operator*(const QuotientElement& a, const Fraction& s);
    friend QuotientElement operator*(const QuotientElement& a, const Rational& s);

    bool operator==(const QuotientElement& o) const;
    bool operator!=(const QuotientElement& o) const { return !(*this == o); }

    std::string str() const;

private:
    QuotientRingPtr ring_;
    UPoly<Fraction> rep_;
};

// Q(q)[u]/(m(u)) for a monic squarefree m whose coefficients are fractions
// of univariate polynomials in the ring's denominator variable (no jets, no
// other variables).  The base Ring supplies the jet/Laurent environment in
// which coefficient fractions of *elements* live.
class QuotientRing : public std::enable_shared_from_this<QuotientRing> {
public:
    static QuotientRingPtr make(RingPtr base, std::string gen_name, UPoly<Fraction> modulus) {
        auto ring = QuotientRingPtr(new QuotientRing(std::move(base), std::move(gen_name),
                                                     std::move(modulus)));
        return ring;
    }

    const RingPtr& base() const { return base_; }
    const std::string& gen_name() const { return gen_name_; }
    const UPoly<Fraction>& modulus() const { return modulus_; }
    int degree() const { return modulus_.degree(); }

    QuotientElement zero() const { return {shared_from_this(), UPoly<Fraction>()}; }
    QuotientElement one() const { return from_rational(Rational(1)); }
    QuotientElement gen() const {
        return element(UPoly<Fraction>::term(Fraction::from_rational(base_, Rational(1)), 1));
    }
    QuotientElement from_fraction(const Fraction& f) const {
        return element(UPoly<Fraction>::constant(f));
    }
    QuotientElement from_rational(const Rational& r) const {
        return from_fraction(Fraction::from_rational(base_, r));
    }
    QuotientElement from_poly(const JetPoly& p) const {
        return from_fraction(Fraction(p));
    }

    // Reduce an arbitrary-degree representative.
    QuotientElement element(UPoly<Fraction> rep) const {
        if (rep.degree() >= modulus_.degree()) rep = pmod(rep, modulus_);
        return {shared_from_this(), std::move(rep)};
    }

    bool same_as(const QuotientRing& o) const {
        return gen_name_ == o.gen_name_ && modulus_ == o.modulus_ &&
               (base_ == o.base_ || *base_ == *o.base_);
    }

    // --- arithmetic helpers used by QuotientElement operators ---

    QuotientElement mul(const UPoly<Fraction>& a, const UPoly<Fraction>& b) const {
        return element(a * b);
    }

    // Multiplicative inverse.  The jet-free part is inverted with a Bezout
    // identity computed over the univariate fraction field (valid whenever
    // the representative is coprime to the modulus, even if the modulus is
    // reducible); the nilpotent jet part is then handled by a finite
    // geometric series.
    QuotientElement inverse(const QuotientElement& x) const;

    // Derivation q d/dq extended from coefficients through the generator:
    // theta(u) = -theta(m)(u) / m'(u).
    QuotientElement theta(const QuotientElement& x) const;

    // Trace of the multiplication operator of x on Q(q)[u]/(m): computed via
    // Newton power sums of the modulus, so it equals the sum of x's values
    // at all roots of m.
    Fraction trace(const QuotientElement& x) const;

    // theta(u) as an element (cached).
    const QuotientElement& theta_gen() const;

    // m'(u)^{-1} as an element (cached); requires m squarefree.
    const QuotientElement& modulus_derivative_inverse() const;

    // Present the same data in a rescaled generator xi = u / c (i.e. u = c xi):
    // returns the ring with modulus m(c xi)/c^n.
    static QuotientRingPtr rescaled(const QuotientRingPtr& ring, const Rational& c,
                                    std::string new_gen_name) {
        UPoly<Fraction> m2;
        {
            std::vector<Fraction> cs;
            const auto& cur = ring->modulus_.coeffs();
            const int n = ring->modulus_.degree();
            for (std::size_t i = 0; i < cur.size(); ++i)
                cs.push_back(cur[i] * rational_pow(c, static_cast<long>(i) - n));
            m2 = UPoly<Fraction>(std::move(cs));
        }
        return make(ring->base_, std::move(new_gen_name), std::move(m2));
    }

    // Image of an element under u -> c * xi into the rescaled ring.
    static QuotientElement rescale_element(const QuotientElement& x, const Rational& c,
                                           const QuotientRingPtr& target) {
        std::vector<Fraction> cs;
        for (std::size_t i = 0; i < x.rep().coeffs().size(); ++i)
            cs.push_back(x.rep().coeffs()[i] * rational_pow(c, static_cast<long>(i)));
        return target->element(UPoly<Fraction>(std::move(cs)));
    }

private:
    QuotientRing(RingPtr base, std::string gen_name, UPoly<Fraction> modulus)
        : base_(std::move(base)), gen_name_(std::move(gen_name)), modulus_(std::move(modulus)) {
        if (!base_) throw AlgebraError("quotient ring over null base ring");
        if (modulus_.degree() < 1) throw AlgebraError("modulus must have positive degree");
        const std::size_t qv = Fraction::denominator_var(base_);
        for (const auto& c : modulus_.coeffs()) {
            if (c.is_zero()) continue;
            if (!c.num().is_pure(qv))
                throw AlgebraError("modulus coefficients must be univariate");
        }
        Fraction lead = modulus_.leading();
        if (!(lead == Fraction::from_rational(base_, Rational(1))))
            throw AlgebraError("modulus must be monic");
    }

    RingPtr base_;
    std::string gen_name_;
    UPoly<Fraction> modulus_;
    mutable std::optional<QuotientElement> theta_gen_cache_;
    mutable std::optional<QuotientElement> dm_inv_cache_;
};

inline void require_same_qring(const QuotientRingPtr& a, const QuotientRingPtr& b) {
    if (a == b) return;
    if (a && b && a->same_as(*b)) return;
    throw AlgebraError("operands belong to different quotient rings");
}

inline QuotientElement operator+(const QuotientElement& a, const QuotientElement& b) {
    if (!a.ring_) return b;
    if (!b.ring_) return a;
    require_same_qring(a.ring_, b.ring_);
    return {a.ring_, a.rep_ + b.rep_};
}

inline QuotientElement operator-(const QuotientElement& a, const QuotientElement& b) {
    return a + (-b);
}

inline QuotientElement operator*(const QuotientElement& a, const QuotientElement& b) {
    if (!a.ring_ || !b.ring_) return {};
    require_same_qring(a.ring_, b.ring_);
    return a.ring_->mul(a.rep_, b.rep_);
}

inline QuotientElement operator*(const QuotientElement& a, const Fraction& s) {
    if (!a.ring_ || s.is_zero()) {
        if (!a.ring_) return {};
        return a.ring_->zero();
    }
    return {a.ring_, a.rep_.scaled(s)};
}

inline QuotientElement operator*(const QuotientElement& a, const Rational& s) {
    if (!a.ring_) return {};
    return a * Fraction::from_rational(a.ring_->base(), s);
}

inline bool QuotientElement::operator==(const QuotientElement& o) const {
    if (!ring_) return o.is_zero();
    if (!o.ring_) return is_zero();
    require_same_qring(ring_, o.ring_);
    return rep_ == o.rep_;
}

inline std::string QuotientElement::str() const {
    if (!ring_) return "0";
    return rep_.str(ring_->gen_name(), [](const Fraction& f) { return f.str(); });
}

inline QuotientElement field_inverse(const QuotientElement& x) {
    if (!x.ring()) throw AlgebraError("inverse of zero");
    return x.ring()->inverse(x);
}

inline QuotientElement QuotientRing::inverse(const QuotientElement& x) const {
    if (x.is_zero()) throw AlgebraError("inverse of zero element");
    require_same_qring(x.ring(), shared_from_this());
    // Split the representative into its jet-free part and the nilpotent rest.
    UPoly<Fraction> rep0, repj;
    {
        std::vector<Fraction> c0, cj;
        for (const auto& f : x.rep().coeffs()) {
            if (f.is_zero() || !f.engaged()) {
                c0.push_back(Fraction());
                cj.push_back(Fraction());
                continue;
            }
            JetPoly n0(base_), nj(base_);
            for (const auto& [m, v] : f.num().terms()) {
                if (base_->jet_degree(m) == 0) n0.add_term(m, v);
                else nj.add_term(m, v);
            }
            c0.push_back(n0.is_zero() ? Fraction() : Fraction(std::move(n0), f.den()));
            cj.push_back(nj.is_zero() ? Fraction() : Fraction(std::move(nj), f.den()));
        }
        rep0 = UPoly<Fraction>(std::move(c0));
        repj = UPoly<Fraction>(std::move(cj));
    }
    if (rep0.is_zero())
        throw AlgebraError("element is nilpotent (zero jet-free part)");
    auto [g, s, t] = ext_gcd(rep0, modulus_);
    if (g.degree() > 0)
        throw AlgebraError("element is a zero divisor modulo the modulus");
    QuotientElement inv0 = element(s); // g is the monic constant 1
    if (repj.is_zero()) return inv0;
    QuotientElement n = -(element(repj) * inv0);
    QuotientElement acc = one();
    QuotientElement pw = one();
    for (int k = 0; k < base_->jet_order(); ++k) {
        pw = pw * n;
        if (pw.is_zero()) break;
        acc = acc + pw;
    }
    return acc * inv0;
}

inline const QuotientElement& QuotientRing::modulus_derivative_inverse() const {
    if (!dm_inv_cache_) {
        UPoly<Fraction> dm = modulus_.derivative();
        auto [g, s, t] = ext_gcd(dm, modulus_);
        if (g.degree() > 0)
            throw AlgebraError("modulus is not squarefree");
        dm_inv_cache_ = element(s);
    }
    return *dm_inv_cache_;
}

inline const QuotientElement& QuotientRing::theta_gen() const {
    if (!theta_gen_cache_) {
        std::vector<Fraction> dc;
        for (const auto& c : modulus_.coeffs()) dc.push_back(c.log_derivative());
        QuotientElement theta_m = element(UPoly<Fraction>(std::move(dc)));
        theta_gen_cache_ = -(theta_m * modulus_derivative_inverse());
    }
    return *theta_gen_cache_;
}

inline QuotientElement QuotientRing::theta(const QuotientElement& x) const {
    if (x.is_zero()) return zero();
    require_same_qring(x.ring(), shared_from_this());
    std::vector<Fraction> dc;
    for (const auto& c : x.rep().coeffs()) dc.push_back(c.log_derivative());
    QuotientElement coeff_part = element(UPoly<Fraction>(std::move(dc)));
    QuotientElement chain_part = element(x.rep().derivative()) * theta_gen();
    return coeff_part + chain_part;
}

inline Fraction QuotientRing::trace(const QuotientElement& x) const {
    if (x.is_zero()) return Fraction::from_rational(base_, Rational(0));
    require_same_qring(x.ring(), shared_from_this());
    const int n = modulus_.degree();
    // Newton power sums p_k of the modulus roots:
    //   p_k + sum_{i=1}^{k-1} a_{n-i} p_{k-i} + k a_{n-k} = 0.
    std::vector<Fraction> p;
    p.push_back(Fraction::from_rational(base_, Rational(n)));
    for (int k = 1; k < n; ++k) {
        Fraction acc = modulus_.coeff(n - k) * Rational(-k);
        for (int i = 1; i < k; ++i)
            acc = acc - modulus_.coeff(n - i) * p[k - i];
        p.push_back(acc);
    }
    Fraction out = Fraction::from_rational(base_, Rational(0));
    for (int k = 0; k <= x.rep().degree(); ++k)
        out = out + x.rep().coeff(k) * p[k];
    return out;
}

} // namespace qcw
