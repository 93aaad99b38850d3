#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "qcw/rational.hpp"
#include "qcw/ring.hpp"

namespace qcw {

// Sparse multivariate polynomial over a Ring with coefficients in C.
// C must provide: default construction (= zero), +, -, unary -, *, ==.
// Zero coefficients are never stored.
template <class C>
class Poly {
public:
    using Terms = std::map<Monomial, C, GradedLexLess>;

    explicit Poly(RingPtr ring) : ring_(std::move(ring)) {}

    static Poly zero(RingPtr ring) { return Poly(std::move(ring)); }

    static Poly constant(RingPtr ring, C value) {
        Poly p(std::move(ring));
        Monomial m(p.ring_->size(), 0);
        p.add_term(std::move(m), std::move(value));
        return p;
    }

    static Poly monomial(RingPtr ring, Monomial m, C value) {
        Poly p(std::move(ring));
        if (!p.ring_->monomial_valid(m))
            throw AlgebraError("monomial not representable in this ring");
        p.add_term(std::move(m), std::move(value));
        return p;
    }

    static Poly variable(RingPtr ring, std::size_t index, int exp = 1) {
        Monomial m(ring->size(), 0);
        m.at(index) = exp;
        return monomial(std::move(ring), std::move(m), C(Rational(1)));
    }

    static Poly variable(RingPtr ring, const std::string& name, int exp = 1) {
        auto idx = ring->require(name);
        return variable(std::move(ring), idx, exp);
    }

    const RingPtr& ring() const { return ring_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() != 1) return false;
        return is_zero_monomial(terms_.begin()->first);
    }

    C constant_value() const {
        Monomial m(ring_->size(), 0);
        return coefficient(m);
    }

    C coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? C() : it->second;
    }

    // Terms whose exponent of variable `index` equals `e`, with that
    // exponent zeroed out.  The result lives in the same ring.
    Poly coefficient_of(std::size_t index, int e) const {
        Poly out(ring_);
        for (const auto& [m, c] : terms_) {
            if (m[index] != e) continue;
            Monomial n = m;
            n[index] = 0;
            out.add_term(std::move(n), c);
        }
        return out;
    }

    // Splits the polynomial by the exponent of one variable.
    std::map<int, Poly> collect(std::size_t index) const {
        std::map<int, Poly> out;
        for (const auto& [m, c] : terms_) {
            Monomial n = m;
            int e = n[index];
            n[index] = 0;
            auto [it, inserted] = out.try_emplace(e, ring_);
            it->second.add_term(std::move(n), c);
        }
        return out;
    }

    int min_exponent(std::size_t index) const {
        if (terms_.empty()) throw AlgebraError("min_exponent of zero polynomial");
        int best = terms_.begin()->first[index];
        for (const auto& [m, c] : terms_) best = std::min(best, m[index]);
        return best;
    }

    int max_exponent(std::size_t index) const {
        if (terms_.empty()) throw AlgebraError("max_exponent of zero polynomial");
        int best = terms_.begin()->first[index];
        for (const auto& [m, c] : terms_) best = std::max(best, m[index]);
        return best;
    }

    bool depends_on(std::size_t index) const {
        for (const auto& [m, c] : terms_)
            if (m[index] != 0) return true;
        return false;
    }

    // True when every monomial is supported on `index` alone.
    bool is_pure(std::size_t index) const {
        for (const auto& [m, c] : terms_)
            for (std::size_t i = 0; i < m.size(); ++i)
                if (i != index && m[i] != 0) return false;
        return true;
    }

    Poly operator-() const {
        Poly out(ring_);
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
        return out;
    }

    Poly& operator+=(const Poly& o) {
        require_same_ring(ring_, o.ring_);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        require_same_ring(ring_, o.ring_);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
    friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        require_same_ring(a.ring_, b.ring_);
        Poly out(a.ring_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m(ma.size());
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
                if (out.ring_->monomial_truncated(m)) continue;
                out.add_term(std::move(m), ca * cb);
            }
        }
        return out;
    }

    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }

    // Scalar operations (scalar = coefficient value).
    Poly& scale(const C& s) {
        if (s == C()) { terms_.clear(); return *this; }
        Terms out;
        for (const auto& [m, c] : terms_) {
            C v = c * s;
            if (!(v == C())) out.emplace(m, std::move(v));
        }
        terms_ = std::move(out);
        return *this;
    }
    friend Poly operator*(Poly a, const C& s) { a.scale(s); return a; }
    friend Poly operator*(const C& s, Poly a) { a.scale(s); return a; }

    Poly pow(unsigned e) const {
        Poly acc = constant(ring_, C(Rational(1)));
        Poly base = *this;
        while (e > 0) {
            if (e & 1u) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    bool operator==(const Poly& o) const {
        require_same_ring(ring_, o.ring_);
        return terms_ == o.terms_;
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // Logarithmic derivative v d/dv; only sensible for Exponential variables.
    Poly log_derivative(std::size_t index) const {
        if (ring_->var(index).kind != VarKind::Exponential)
            throw AlgebraError("log_derivative requires an exponential variable");
        Poly out(ring_);
        for (const auto& [m, c] : terms_) {
            if (m[index] == 0) continue;
            out.add_term(m, c * C(Rational(m[index])));
        }
        return out;
    }

    // Ordinary d/dv for Jet / Polynomial variables.
    Poly derivative(std::size_t index) const {
        if (ring_->var(index).kind == VarKind::Exponential)
            throw AlgebraError("derivative requires a polynomial or jet variable");
        Poly out(ring_);
        for (const auto& [m, c] : terms_) {
            if (m[index] == 0) continue;
            Monomial n = m;
            int e = n[index]--;
            out.add_term(std::move(n), c * C(Rational(e)));
        }
        return out;
    }

    // Substitute a polynomial for a variable occurring with non-negative
    // exponents only.
    Poly substitute(std::size_t index, const Poly& value) const {
        require_same_ring(ring_, value.ring_);
        auto parts = collect(index);
        Poly out(ring_);
        for (const auto& [e, part] : parts) {
            if (e < 0) throw AlgebraError("substitute into a negative exponent");
            out += part * value.pow(static_cast<unsigned>(e));
        }
        return out;
    }

    // Evaluate one variable at a rational (nonzero if negative exponents
    // occur).  The variable's exponent becomes 0 in every term.
    Poly evaluate_var(std::size_t index, const Rational& value) const {
        Poly out(ring_);
        for (const auto& [m, c] : terms_) {
            int e = m[index];
            if (e < 0 && value == 0)
                throw AlgebraError("evaluating a Laurent variable at 0");
            Monomial n = m;
            n[index] = 0;
            out.add_term(std::move(n), c * C(rational_pow(value, e)));
        }
        return out;
    }

    // Rebuild with remapped monomials (exponent-lattice substitution, e.g.
    // a group element acting on the exponents of torus characters).
    Poly remap_exponents(const std::function<Monomial(const Monomial&)>& f) const {
        Poly out(ring_);
        for (const auto& [m, c] : terms_) {
            Monomial n = f(m);
            if (!ring_->monomial_valid(n))
                throw AlgebraError("exponent remap produced an invalid monomial");
            if (ring_->monomial_truncated(n)) continue;
            out.add_term(std::move(n), c);
        }
        return out;
    }

    template <class F>
    auto map_coefficients(F&& f) const -> Poly<std::decay_t<decltype(f(std::declval<const C&>()))>> {
        using C2 = std::decay_t<decltype(f(std::declval<const C&>()))>;
        Poly<C2> out(ring_);
        for (const auto& [m, c] : terms_) out.add_term(m, f(c));
        return out;
    }

    // Canonical text form: graded-lex descending, explicit coefficients and
    // exponents, e.g. "1*u^4 + -108*q^1*u^1" and "0" for the zero polynomial.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) os << " + ";
            first = false;
            os << coeff_str(it->second);
            for (std::size_t i = 0; i < it->first.size(); ++i) {
                if (it->first[i] == 0) continue;
                os << "*" << ring_->var(i).name << "^" << it->first[i];
            }
        }
        return os.str();
    }

    // Inserts (accumulating) a term; drops zero results and jet overflow.
    void add_term(Monomial m, C c) {
        if (c == C()) return;
        if (ring_->monomial_truncated(m)) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), std::move(c));
        } else {
            it->second = it->second + c;
            if (it->second == C()) terms_.erase(it);
        }
    }

private:
    static bool is_zero_monomial(const Monomial& m) {
        return std::all_of(m.begin(), m.end(), [](int e) { return e == 0; });
    }

    static std::string coeff_str(const Rational& c) { return qcw::to_string(c); }
    template <class D>
    static std::string coeff_str(const D& c) { return std::string("(") + c.str() + ")"; }

    RingPtr ring_;
    Terms terms_;
};

using JetPoly = Poly<Rational>;

// Exact division of multivariate Laurent polynomials over Q: returns q with
// a == q*b, throwing AlgebraError when b does not divide a exactly.  Used by
// fraction-free elimination.
inline JetPoly exact_divide(const JetPoly& a, const JetPoly& b) {
    require_same_ring(a.ring(), b.ring());
    if (b.is_zero()) throw AlgebraError("exact division by zero");
    auto ring = a.ring();
    const std::size_t n = ring->size();
    if (a.is_zero()) return JetPoly::zero(ring);

    // Shift Laurent exponents so both operands are genuine polynomials with
    // minimal exponent 0 in every exponential variable.  Per-variable minimal
    // exponents are additive under multiplication in a domain, so when b
    // divides a the shifted quotient is again a polynomial.
    Monomial shift_a(n, 0), shift_b(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (ring->var(i).kind != VarKind::Exponential) continue;
        shift_a[i] = a.min_exponent(i);
        shift_b[i] = b.min_exponent(i);
    }
    auto shifted = [&](const JetPoly& p, const Monomial& s) {
        JetPoly out(ring);
        for (const auto& [m, c] : p.terms()) {
            Monomial t = m;
            for (std::size_t i = 0; i < n; ++i) t[i] -= s[i];
            out.add_term(std::move(t), c);
        }
        return out;
    };
    JetPoly rem = shifted(a, shift_a);
    JetPoly div = shifted(b, shift_b);

    JetPoly quo(ring);
    const auto& dlead = *div.terms().rbegin();
    while (!rem.is_zero()) {
        const auto& rlead = *rem.terms().rbegin();
        Monomial m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = rlead.first[i] - dlead.first[i];
            if (m[i] < 0) throw AlgebraError("not exactly divisible");
        }
        Rational c = rlead.second / dlead.second;
        JetPoly t = JetPoly::monomial(ring, m, c);
        quo += t;
        rem -= t * div;
    }
    // Undo the shifts: quo corresponds to shift (shift_a - shift_b).
    Monomial undo(n, 0);
    for (std::size_t i = 0; i < n; ++i) undo[i] = shift_a[i] - shift_b[i];
    JetPoly out(ring);
    for (const auto& [m, c] : quo.terms()) {
        Monomial t = m;
        for (std::size_t i = 0; i < n; ++i) t[i] += undo[i];
        out.add_term(std::move(t), c);
    }
    return out;
}

} // namespace qcw
