#pragma once

#include <vector>

#include "qcw/fano/correlators.hpp"
#include "qcw/fraction.hpp"
#include "qcw/matrix.hpp"
#include "qcw/poly.hpp"

namespace qcw::fano {

// The quantum deformation of the cohomology ring of a model, with structure
// constants expanded in the Novikov variable q and in the first (or higher)
// infinitesimal neighborhood of the small locus: jet variables x2, x3.
// Elements are coordinate vectors over the basis (D0, D1, D2, D3).
class Algebra {
public:
    Algebra(const Model& m, CorrelatorTable table, int jet_order = 1);

    const Model& model() const { return *model_; }
    const CorrelatorTable& table() const { return table_; }
    const RingPtr& ring() const { return ring_; }
    int jet_order() const { return jet_order_; }

    JetPoly zero() const { return JetPoly::zero(ring_); }
    JetPoly constant(const Rational& r) const { return JetPoly::constant(ring_, r); }
    std::vector<JetPoly> zero_vector() const { return std::vector<JetPoly>(4, zero()); }
    std::vector<JetPoly> basis_vector(int a) const;

    // Cached product of two basis classes.
    const std::vector<JetPoly>& basis_product(int a, int b) const;

    std::vector<JetPoly> multiply(const std::vector<JetPoly>& x,
                                  const std::vector<JetPoly>& y) const;

    // Product with coefficients in any commutative algebra S over the base
    // ring; lift embeds a JetPoly structure constant into S.
    template <class S, class Lift>
    std::vector<S> multiply_lifted(const std::vector<S>& x, const std::vector<S>& y,
                                   Lift&& lift) const {
        std::vector<S> out(4, S());
        for (int a = 0; a < 4; ++a) {
            if (x[a] == S()) continue;
            for (int b = 0; b < 4; ++b) {
                if (y[b] == S()) continue;
                const auto& prod = basis_product(a, b);
                S xy = x[a] * y[b];
                for (int c = 0; c < 4; ++c) {
                    if (prod[c].is_zero()) continue;
                    out[c] = out[c] + xy * lift(prod[c]);
                }
            }
        }
        return out;
    }

    // The grading (Euler) vector field at the small locus with jets:
    // index * D1 + sum_{p>=2} (1-p) x_p D_p.
    std::vector<JetPoly> euler_vector() const;

    // Matrix of multiplication by the Euler field restricted to jets = 0.
    Matrix<JetPoly> euler_matrix() const;

    // Characteristic polynomial of euler_matrix(), monic in the spectral
    // variable, coefficients univariate in q.
    UPoly<Fraction> euler_charpoly() const;

    // Poincare pairing of two coordinate vectors in any scalar algebra.
    template <class S>
    static S pairing(const std::vector<S>& x, const std::vector<S>& y) {
        return x[0] * y[3] + x[1] * y[2] + x[2] * y[1] + x[3] * y[0];
    }

private:
    const Model* model_;
    CorrelatorTable table_;
    int jet_order_;
    RingPtr ring_;
    mutable std::vector<std::vector<JetPoly>> product_cache_;
    mutable std::vector<bool> product_cached_;
};

// Number of slots among the arguments that consume a jet insertion
// (divisor and identity slots do not).
inline int jet_slots(std::initializer_list<int> insertions) {
    int n = 0;
    for (int a : insertions)
        if (a >= 2) ++n;
    return n;
}

// Jet order through which the quantum part of the structure-constant
// coefficient with insertions (a, b, c) is expressible in invariants
// carrying at most `budget` non-divisor insertions.
inline int component_jet_cap(int a, int b, int c, int budget) {
    return budget - jet_slots({a, b, c});
}

// Structure constants of Da * Db for an arbitrary coefficient type and
// correlator lookup (shared by the rational algebra and the symbolic
// reconstruction).  `corr(d, insertions)` returns the coefficient value of
// a (possibly non-primitive) symbol as a C; q_cap >= 0 truncates the
// expansion above that q-degree.  With jet_budget < 0 every component is
// expanded through the ring's jet order; otherwise each component carries
// jets through component_jet_cap(a, b, c, jet_budget), the full content of
// a generating potential truncated at total jet degree jet_budget.
template <class C, class Lookup>
std::vector<Poly<C>> pair_product(const Model& m, const RingPtr& ring, int a, int b,
                                  Lookup&& corr, int q_cap = -1, int jet_budget = -1) {
    std::vector<Poly<C>> out(4, Poly<C>::zero(ring));
    if (a + b <= 3) {
        Rational cc = cup_coefficient(m, a, b);
        if (cc != 0) out[a + b].add_term(Monomial(ring->size(), 0), C(cc));
    }
    if (a == 0 || b == 0) return out;

    const std::size_t qi = ring->require("q");
    const std::size_t x2i = ring->require("x2");
    const std::size_t x3i = ring->require("x3");
    for (int c = 1; c <= 3; ++c) {
        const int comp = 3 - c;
        const int jo = jet_budget < 0 ? ring->jet_order()
                                      : component_jet_cap(a, b, c, jet_budget);
        if (jo < 0) continue;
        // Each insertion value v contributes v - 1 to the dimension
        // constraint; each jet insertion contributes at most 2.
        int d_max = ((a - 1) + (b - 1) + (c - 1) + 2 * jo) / m.index;
        if (q_cap >= 0 && q_cap < d_max) d_max = q_cap;
        for (int d = 1; d <= d_max; ++d) {
            // Taylor coefficient of x2^p x3^s: the invariant with p + s
            // extra insertions, divided by p! s!.
            for (int p = 0; p <= jo; ++p) {
                for (int s = 0; p + s <= jo; ++s) {
                    std::vector<int> ins{a, b, c};
                    ins.insert(ins.end(), static_cast<std::size_t>(p), 2);
                    ins.insert(ins.end(), static_cast<std::size_t>(s), 3);
                    C v = corr(d, ins);
                    if (v == C()) continue;
                    Rational fact(1);
                    for (int i = 2; i <= p; ++i) fact *= i;
                    for (int i = 2; i <= s; ++i) fact *= i;
                    if (fact != 1) v = v * C(Rational(1) / fact);
                    Monomial mm(ring->size(), 0);
                    mm[qi] = d;
                    mm[x2i] = p;
                    mm[x3i] = s;
                    out[comp].add_term(std::move(mm), std::move(v));
                }
            }
        }
    }
    return out;
}

// Monomial factor search: splits off all factors (u - c q^j) with rational c
// (including c = 0) from a monic polynomial with univariate coefficients.
struct SpectralSplit {
    std::vector<UPoly<Fraction>> linear_factors; // each monic of degree 1
    UPoly<Fraction> cofactor;                    // monic; degree may be 0
};
SpectralSplit split_monomial_roots(const UPoly<Fraction>& m);

// All rational roots of a rational-coefficient polynomial.
std::vector<Rational> rational_roots(const UPoly<Rational>& p);

} // namespace qcw::fano
