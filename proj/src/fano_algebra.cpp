#include "qcw/fano/algebra.hpp"

#include <algorithm>
#include <set>

#include "qcw/errors.hpp"

namespace qcw::fano {

Algebra::Algebra(const Model& m, CorrelatorTable table, int jet_order)
    : model_(&m),
      table_(std::move(table)),
      jet_order_(jet_order),
      ring_(Ring::make({{"q", VarKind::Exponential},
                        {"x2", VarKind::Jet},
                        {"x3", VarKind::Jet}},
                       jet_order)),
      product_cache_(16),
      product_cached_(16, false) {
    if (&table_.model() != model_ && table_.model().name != model_->name)
        throw AlgebraError("invariant table belongs to a different model");
}

std::vector<JetPoly> Algebra::basis_vector(int a) const {
    if (a < 0 || a > 3) throw AlgebraError("basis index outside 0..3");
    auto v = zero_vector();
    v[static_cast<std::size_t>(a)] = constant(Rational(1));
    return v;
}

const std::vector<JetPoly>& Algebra::basis_product(int a, int b) const {
    if (a < 0 || a > 3 || b < 0 || b > 3) throw AlgebraError("basis index outside 0..3");
    const std::size_t idx = static_cast<std::size_t>(a) * 4 + static_cast<std::size_t>(b);
    if (!product_cached_[idx]) {
        auto corr = [this](int d, const std::vector<int>& ins) {
            return table_.evaluate(d, ins);
        };
        product_cache_[idx] = pair_product<Rational>(*model_, ring_, a, b, corr);
        product_cached_[idx] = true;
    }
    return product_cache_[idx];
}

std::vector<JetPoly> Algebra::multiply(const std::vector<JetPoly>& x,
                                       const std::vector<JetPoly>& y) const {
    auto out = zero_vector();
    for (int a = 0; a < 4; ++a) {
        const auto& xa = x.at(static_cast<std::size_t>(a));
        if (xa.is_zero()) continue;
        for (int b = 0; b < 4; ++b) {
            const auto& yb = y.at(static_cast<std::size_t>(b));
            if (yb.is_zero()) continue;
            JetPoly xy = xa * yb;
            const auto& prod = basis_product(a, b);
            for (int c = 0; c < 4; ++c)
                if (!prod[static_cast<std::size_t>(c)].is_zero())
                    out[static_cast<std::size_t>(c)] += xy * prod[static_cast<std::size_t>(c)];
        }
    }
    return out;
}

std::vector<JetPoly> Algebra::euler_vector() const {
    auto v = zero_vector();
    v[1] = constant(Rational(model_->index));
    v[2] = JetPoly::variable(ring_, "x2") * Rational(-1);
    v[3] = JetPoly::variable(ring_, "x3") * Rational(-2);
    return v;
}

Matrix<JetPoly> Algebra::euler_matrix() const {
    const std::size_t x2i = ring_->require("x2");
    const std::size_t x3i = ring_->require("x3");
    Matrix<JetPoly> out(4, 4, zero());
    const auto e = euler_vector();
    for (int b = 0; b < 4; ++b) {
        auto col = multiply(e, basis_vector(b));
        for (int i = 0; i < 4; ++i)
            out.at(static_cast<std::size_t>(i), static_cast<std::size_t>(b)) =
                col[static_cast<std::size_t>(i)]
                    .evaluate_var(x2i, Rational(0))
                    .evaluate_var(x3i, Rational(0));
    }
    return out;
}

UPoly<Fraction> Algebra::euler_charpoly() const {
    std::vector<JetPoly> cp = char_poly_coeffs(euler_matrix());
    std::vector<Fraction> cs;
    cs.reserve(cp.size());
    for (const auto& c : cp) cs.emplace_back(c);
    return UPoly<Fraction>(std::move(cs));
}

namespace {

std::vector<Integer> positive_divisors(Integer n) {
    if (n < 0) n = -n;
    std::vector<Integer> out;
    if (n == 0) return out;
    for (Integer i = 1; i * i <= n; ++i) {
        if (n % i == 0) {
            out.push_back(i);
            if (i * i != n) out.push_back(n / i);
        }
    }
    return out;
}

} // namespace

std::vector<Rational> rational_roots(const UPoly<Rational>& p) {
    std::vector<Rational> out;
    if (p.degree() < 1) return out;

    std::vector<Rational> cs = p.coeffs();
    std::size_t shift = 0;
    while (shift < cs.size() && cs[shift] == 0) ++shift;
    if (shift > 0) {
        out.push_back(Rational(0));
        cs.erase(cs.begin(), cs.begin() + static_cast<std::ptrdiff_t>(shift));
    }
    UPoly<Rational> w{std::vector<Rational>(cs)};
    if (w.degree() < 1) return out;

    Integer scale = 1;
    for (const auto& c : cs) scale = lcm(scale, denominator(c));
    std::vector<Integer> b;
    b.reserve(cs.size());
    for (const auto& c : cs) b.push_back(numerator(c * Rational(scale)));

    std::set<Rational> candidates;
    for (const Integer& num : positive_divisors(b.front()))
        for (const Integer& den : positive_divisors(b.back())) {
            Rational c(num, den);
            candidates.insert(c);
            candidates.insert(-c);
        }
    for (const Rational& c : candidates) {
        Rational value(0);
        for (std::size_t i = cs.size(); i-- > 0;) value = value * c + cs[i];
        if (value == 0) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

SpectralSplit split_monomial_roots(const UPoly<Fraction>& m) {
    if (m.degree() < 1) throw AlgebraError("cannot split a constant polynomial");
    for (const auto& c : m.coeffs())
        if (!c.is_polynomial())
            throw AlgebraError("monomial-root search expects polynomial coefficients");

    const RingPtr ring = m.leading().num().ring();
    const std::size_t qi = m.leading().qvar();

    SpectralSplit split{{}, m};

    auto push_factor = [&](const Fraction& root) {
        std::vector<Fraction> lin{-root, Fraction::from_rational(ring, Rational(1))};
        UPoly<Fraction> factor{std::vector<Fraction>(lin)};
        auto [quot, rem] = divrem(split.cofactor, factor);
        if (!rem.is_zero()) throw AlgebraError("inexact split of a verified root");
        split.linear_factors.push_back(std::move(factor));
        split.cofactor = std::move(quot);
    };

    bool progress = true;
    while (progress && split.cofactor.degree() > 0) {
        progress = false;

        // Root at zero: vanishing constant coefficient.
        if (split.cofactor.coeff(0).is_zero()) {
            push_factor(Fraction::from_rational(ring, Rational(0)));
            progress = true;
            continue;
        }

        // Specialize q = 1 to get finitely many candidate ratios, then try
        // each candidate c q^j as an exact root.
        std::vector<Rational> spec;
        int max_qdeg = 0;
        for (int k = 0; k <= split.cofactor.degree(); ++k) {
            const Fraction& c = split.cofactor.coeff(k);
            if (c.is_zero()) {
                spec.push_back(Rational(0));
                continue;
            }
            if (!c.num().is_pure(qi))
                throw AlgebraError("monomial-root search expects univariate coefficients");
            spec.push_back(
                c.num().evaluate_var(qi, Rational(1)).coefficient(Monomial(ring->size(), 0)));
            max_qdeg = std::max(max_qdeg, c.num().max_exponent(qi));
        }
        UPoly<Rational> at_one{std::move(spec)};
        for (const Rational& c : rational_roots(at_one)) {
            if (c == 0) continue; // handled above
            bool found = false;
            for (int j = 0; j <= max_qdeg && !found; ++j) {
                Fraction root(JetPoly::monomial(ring, [&] {
                    Monomial mono(ring->size(), 0);
                    mono[qi] = j;
                    return mono;
                }(), c));
                auto [quot, rem] = divrem(split.cofactor, UPoly<Fraction>{std::vector<Fraction>{
                                              -root, Fraction::from_rational(ring, Rational(1))}});
                if (rem.is_zero()) {
                    split.linear_factors.push_back(UPoly<Fraction>{std::vector<Fraction>{
                        -root, Fraction::from_rational(ring, Rational(1))}});
                    split.cofactor = std::move(quot);
                    found = true;
                    progress = true;
                }
            }
            if (found) break; // restart with the reduced cofactor
        }
    }
    return split;
}

} // namespace qcw::fano
