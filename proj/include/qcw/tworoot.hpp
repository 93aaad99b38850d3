#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcw/quotient.hpp"

namespace qcw {

class TwoRootRing;
using TwoRootRingPtr = std::shared_ptr<const TwoRootRing>;

// Element of R1[u'] / (M2(u')) where R1 is a QuotientRing.  Representatives
// are reduced modulo the monic M2; coefficients are R1-elements.
class TwoRootElement {
public:
    TwoRootElement() = default;
    TwoRootElement(TwoRootRingPtr ring, UPoly<QuotientElement> rep)
        : ring_(std::move(ring)), rep_(std::move(rep)) {}

    bool is_zero() const { return !ring_ || rep_.is_zero(); }
    const TwoRootRingPtr& ring() const { return ring_; }
    const UPoly<QuotientElement>& rep() const { return rep_; }

    TwoRootElement operator-() const {
        if (!ring_) return {};
        return {ring_, -rep_};
    }

    friend TwoRootElement operator+(const TwoRootElement& a, const TwoRootElement& b);
    friend TwoRootElement operator-(const TwoRootElement& a, const TwoRootElement& b);
    friend TwoRootElement operator*(const TwoRootElement& a, const TwoRootElement& b);

    bool operator==(const TwoRootElement& o) const;
    bool operator!=(const TwoRootElement& o) const { return !(*this == o); }

    std::string str() const;

private:
    TwoRootRingPtr ring_;
    UPoly<QuotientElement> rep_;
};

// Adjoins a second root u' to a quotient ring R1 = Q(q)[u]/(m(u)).
//
//  * same-modulus form:  M2 = h(u, u') = (m(u') - m(u)) / (u' - u), the
//    difference quotient, monic of degree deg(m) - 1 in u'.  Its roots over
//    a fixed root u of m are exactly the remaining roots of m, so checks in
//    this ring cover all ordered pairs of distinct roots at once.
//  * distinct-modulus form:  M2 = g(u') for a separate squarefree monic g
//    with univariate coefficients (a second branch of a factored spectrum).
//
// The ring records the univariate polynomial annihilating u' (m or g) so the
// derivation q d/dq can be extended implicitly to u' as well.
class TwoRootRing : public std::enable_shared_from_this<TwoRootRing> {
public:
    static TwoRootRingPtr same_modulus(const QuotientRingPtr& first, std::string gen2) {
        const auto& m = first->modulus();
        const int n = m.degree();
        // h(u,u') = sum_{k=0}^{n-1} u'^k * s_k(u),  s_k(u) = sum_{j>k} m_j u^{j-1-k}.
        std::vector<QuotientElement> hk;
        for (int k = 0; k < n; ++k) {
            QuotientElement s = first->zero();
            for (int j = k + 1; j <= n; ++j) {
                QuotientElement up = power_of_gen(first, j - 1 - k);
                s = s + up * m.coeff(j);
            }
            hk.push_back(std::move(s));
        }
        return TwoRootRingPtr(new TwoRootRing(first, std::move(gen2),
                                              UPoly<QuotientElement>(std::move(hk)), m));
    }

    static TwoRootRingPtr distinct_modulus(const QuotientRingPtr& first, std::string gen2,
                                           const UPoly<Fraction>& g) {
        std::vector<QuotientElement> gk;
        for (int k = 0; k <= g.degree(); ++k)
            gk.push_back(first->from_fraction(g.coeff(k)));
        return TwoRootRingPtr(new TwoRootRing(first, std::move(gen2),
                                              UPoly<QuotientElement>(std::move(gk)), g));
    }

    // Quotient onto a monic divisor of the current second modulus (e.g. a
    // factor of the difference quotient, to isolate one pair class).
    static TwoRootRingPtr project(const TwoRootRingPtr& ring, UPoly<QuotientElement> divisor) {
        if (!pmod(ring->modulus2_, divisor).is_zero())
            throw AlgebraError("projection target does not divide the second modulus");
        return TwoRootRingPtr(new TwoRootRing(ring->first_, ring->gen2_name_,
                                              std::move(divisor), ring->second_min_poly_));
    }

    const QuotientRingPtr& first() const { return first_; }
    const std::string& gen2_name() const { return gen2_name_; }
    const UPoly<QuotientElement>& modulus2() const { return modulus2_; }
    const UPoly<Fraction>& second_min_poly() const { return second_min_poly_; }

    TwoRootElement zero() const { return {shared_from_this(), UPoly<QuotientElement>()}; }
    TwoRootElement one() const { return embed_first(first_->one()); }

    TwoRootElement embed_first(const QuotientElement& a) const {
        return element(UPoly<QuotientElement>::constant(a));
    }

    // u' as an element.
    TwoRootElement gen2() const {
        return element(UPoly<QuotientElement>::term(first_->one(), 1));
    }

    // u (the first root) as an element.
    TwoRootElement gen1() const { return embed_first(first_->gen()); }

    // a(u) -> a(u'): evaluate the representative at the second root.
    TwoRootElement embed_second(const QuotientElement& a) const {
        if (a.is_zero()) return zero();
        require_same_qring(a.ring(), first_);
        TwoRootElement acc = zero();
        const auto& cs = a.rep().coeffs();
        for (std::size_t i = cs.size(); i-- > 0;) {
            acc = acc * gen2() + embed_first(first_->from_fraction(cs[i]));
        }
        return acc;
    }

    TwoRootElement element(UPoly<QuotientElement> rep) const {
        if (rep.degree() >= modulus2_.degree()) rep = reduce(std::move(rep));
        return {shared_from_this(), std::move(rep)};
    }

    // Derivation q d/dq extended through both roots.
    TwoRootElement theta(const TwoRootElement& x) const;

    // Swap automorphism u <-> u' (well-defined for the same-modulus form,
    // whose defining ideal (m(u), h(u,u')) is symmetric).
    TwoRootElement swap_roots(const TwoRootElement& x) const {
        if (!symmetric_)
            throw AlgebraError("swap is only defined on the same-modulus two-root ring");
        TwoRootElement acc = zero();
        const auto& cs = x.rep().coeffs();
        for (std::size_t i = cs.size(); i-- > 0;) {
            acc = acc * gen1() + embed_second(cs[i]);
        }
        return acc;
    }

    bool same_as(const TwoRootRing& o) const {
        return gen2_name_ == o.gen2_name_ && modulus2_ == o.modulus2_ &&
               first_->same_as(*o.first_);
    }

    UPoly<QuotientElement> reduce(UPoly<QuotientElement> rep) const {
        return pmod(rep, modulus2_);
    }

private:
    TwoRootRing(QuotientRingPtr first, std::string gen2, UPoly<QuotientElement> modulus2,
                UPoly<Fraction> second_min_poly)
        : first_(std::move(first)), gen2_name_(std::move(gen2)),
          modulus2_(std::move(modulus2)), second_min_poly_(std::move(second_min_poly)) {
        if (modulus2_.degree() < 1)
            throw AlgebraError("second modulus must have positive degree");
        symmetric_ = (second_min_poly_ == first_->modulus()) &&
                     (modulus2_.degree() == first_->modulus().degree() - 1);
    }

    static QuotientElement power_of_gen(const QuotientRingPtr& r, int k) {
        QuotientElement acc = r->one();
        for (int i = 0; i < k; ++i) acc = acc * r->gen();
        return acc;
    }

    QuotientRingPtr first_;
    std::string gen2_name_;
    UPoly<QuotientElement> modulus2_;
    UPoly<Fraction> second_min_poly_;
    bool symmetric_ = false;
    mutable std::optional<TwoRootElement> theta_gen2_cache_;
};

inline void require_same_tworoot(const TwoRootRingPtr& a, const TwoRootRingPtr& b) {
    if (a == b) return;
    if (a && b && a->same_as(*b)) return;
    throw AlgebraError("operands belong to different two-root rings");
}

inline TwoRootElement operator+(const TwoRootElement& a, const TwoRootElement& b) {
    if (!a.ring_) return b;
    if (!b.ring_) return a;
    require_same_tworoot(a.ring_, b.ring_);
    return {a.ring_, a.rep_ + b.rep_};
}

inline TwoRootElement operator-(const TwoRootElement& a, const TwoRootElement& b) {
    return a + (-b);
}

inline TwoRootElement operator*(const TwoRootElement& a, const TwoRootElement& b) {
    if (!a.ring_ || !b.ring_) return {};
    require_same_tworoot(a.ring_, b.ring_);
    return a.ring_->element(a.rep_ * b.rep_);
}

inline bool TwoRootElement::operator==(const TwoRootElement& o) const {
    if (!ring_) return o.is_zero();
    if (!o.ring_) return is_zero();
    require_same_tworoot(ring_, o.ring_);
    return rep_ == o.rep_;
}

inline std::string TwoRootElement::str() const {
    if (!ring_) return "0";
    return rep_.str(ring_->gen2_name(),
                    [](const QuotientElement& c) { return c.str(); });
}

inline TwoRootElement TwoRootRing::theta(const TwoRootElement& x) const {
    if (x.is_zero()) return zero();
    require_same_tworoot(x.ring(), shared_from_this());
    // theta(u') = -theta(p)(u') / p'(u') for the univariate p annihilating u'.
    if (!theta_gen2_cache_) {
        const auto& p = second_min_poly_;
        std::vector<QuotientElement> dc;
        for (int k = 0; k <= p.degree(); ++k)
            dc.push_back(first_->from_fraction(p.coeff(k).log_derivative()));
        TwoRootElement theta_p = element(UPoly<QuotientElement>(std::move(dc)));
        // 1/p'(u') via the Bezout identity over Q(q): s p' + t p = 1, so the
        // inverse is s(u').  Valid in the full pair ring even when it has
        // zero divisors, because p is squarefree.
        auto [g, s, t] = ext_gcd(p.derivative(), p);
        if (g.degree() > 0) throw AlgebraError("second minimal polynomial is not squarefree");
        std::vector<QuotientElement> sc;
        for (int k = 0; k <= s.degree(); ++k)
            sc.push_back(first_->from_fraction(s.coeff(k)));
        TwoRootElement dp_inv = element(UPoly<QuotientElement>(std::move(sc)));
        theta_gen2_cache_ = -(theta_p * dp_inv);
    }
    // Coefficient derivation (theta on R1, including implicit theta(u)) plus
    // the chain term through u'.
    std::vector<QuotientElement> dc;
    for (const auto& c : x.rep().coeffs())
        dc.push_back(c.is_zero() ? QuotientElement() : first_->theta(c));
    TwoRootElement coeff_part = element(UPoly<QuotientElement>(std::move(dc)));
    TwoRootElement chain_part = element(x.rep().derivative()) * *theta_gen2_cache_;
    return coeff_part + chain_part;
}

} // namespace qcw
