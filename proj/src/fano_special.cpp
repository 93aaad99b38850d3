#include "qcw/fano/special.hpp"

#include <array>
#include <utility>
#include <vector>

#include "qcw/errors.hpp"
#include "qcw/fano/correlators.hpp"

namespace qcw::fano {

namespace {

using QE = QuotientElement;

QE power_of_gen(const QuotientRingPtr& r, int k) {
    QE acc = r->one();
    for (int i = 0; i < k; ++i) acc = acc * r->gen();
    return acc;
}

} // namespace

SpecialData compute_special(const Model& model) {
    SpecialData out;
    out.model = &model;

    auto rep = reconstruct_correlators(model, default_seeds(model), {});
    out.algebra = std::make_shared<Algebra>(model, std::move(rep.table), /*jet_order=*/1);
    const Algebra& A = *out.algebra;
    const RingPtr& base = A.ring();
    const std::size_t x2i = base->require("x2");
    const std::size_t x3i = base->require("x3");

    const UPoly<Fraction> m = A.euler_charpoly();
    out.root_ring = QuotientRing::make(base, "u", m);
    const QuotientRingPtr& R = out.root_ring;
    const int n = m.degree();

    // Idempotent attached to the generic spectral value u, before jet
    // corrections: apply the difference quotient of the characteristic
    // polynomial to the multiplication operator of the grading field,
    //
    //   e0 = (1 / m'(u)) * sum_k s_k(u) * M^k(unit),
    //   s_k(u) = sum_{j > k} m_j u^{j-1-k},
    //
    // where M is the jet-free multiplication matrix.  At each individual
    // root this collapses to the Lagrange projector onto that eigenline,
    // so e0 is exactly idempotent modulo the jet variables; working in
    // the quotient ring handles every root at once.
    std::vector<std::vector<JetPoly>> pows;
    {
        const Matrix<JetPoly> M = A.euler_matrix();
        std::vector<JetPoly> v = A.basis_vector(0);
        for (int k = 0; k < n; ++k) {
            pows.push_back(v);
            if (k + 1 < n) v = M.apply(v);
        }
    }
    std::vector<QE> e0(4, R->zero());
    for (int k = 0; k < n; ++k) {
        QE s = R->zero();
        for (int j = k + 1; j <= n; ++j)
            s = s + power_of_gen(R, j - 1 - k) * m.coeff(j);
        for (int a = 0; a < 4; ++a) {
            const auto& pk = pows[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)];
            if (!pk.is_zero()) e0[static_cast<std::size_t>(a)] =
                e0[static_cast<std::size_t>(a)] + s * R->from_poly(pk);
        }
    }
    {
        const QE& dminv = R->modulus_derivative_inverse();
        for (auto& c : e0) c = c * dminv;
    }
    out.idempotent_zero = e0;

    // Products taken in the first infinitesimal neighborhood, with scalars
    // extended to the quotient ring.
    auto lift = [&](const JetPoly& p) { return R->from_poly(p); };
    auto qmul = [&](const std::vector<QE>& x, const std::vector<QE>& y) {
        return A.multiply_lifted(x, y, lift);
    };

    // Jet correction: the square defect of e0 is nilpotent of square zero,
    // so a single multiplicative correction restores exact idempotency:
    //   omega = e0 o e0 - e0,   e = e0 + omega o (1 - 2 e0).
    std::vector<QE> efull(4);
    {
        const std::vector<QE> e0sq = qmul(e0, e0);
        std::vector<QE> omega(4), mirror(4);
        for (int a = 0; a < 4; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            omega[ai] = e0sq[ai] - e0[ai];
            mirror[ai] = -(e0[ai] * Rational(2));
        }
        mirror[0] = R->one() + mirror[0];
        const std::vector<QE> e1 = qmul(omega, mirror);
        for (int a = 0; a < 4; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            efull[ai] = e0[ai] + e1[ai];
        }
    }
    out.idempotent_full = efull;

    {
        const std::vector<QE> esq = qmul(efull, efull);
        for (int a = 0; a < 4; ++a)
            if (!(esq[static_cast<std::size_t>(a)] == efull[static_cast<std::size_t>(a)]))
                throw VerificationError("idempotent correction failed for model " + model.name +
                                        ": the corrected section does not square to itself");
    }

    // Partition of unity: the sum of the idempotents over all spectral
    // values is the unit class.  The trace form of the quotient ring sums a
    // polynomial's values over every root of the modulus.
    for (int a = 0; a < 4; ++a) {
        const Fraction tr = R->trace(efull[static_cast<std::size_t>(a)]);
        const Fraction want = Fraction::from_rational(base, Rational(a == 0 ? 1 : 0));
        if (!(tr == want))
            throw VerificationError("partition of unity fails for model " + model.name +
                                    ": component " + std::to_string(a) +
                                    " of the idempotent sum is " + tr.str());
    }

    // Pairwise orthogonality: multiply the idempotent at u with the one at
    // a second, distinct root u'.  The second modulus is the difference
    // quotient of m, whose roots over a fixed u are exactly the other roots.
    out.pair_ring = TwoRootRing::same_modulus(R, "u'");
    const TwoRootRingPtr& P = out.pair_ring;
    {
        std::vector<TwoRootElement> at_u(4), at_v(4);
        for (int a = 0; a < 4; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            at_u[ai] = P->embed_first(efull[ai]);
            at_v[ai] = P->embed_second(efull[ai]);
        }
        auto plift = [&](const JetPoly& p) { return P->embed_first(R->from_poly(p)); };
        const auto prod = A.multiply_lifted(at_u, at_v, plift);
        for (int a = 0; a < 4; ++a)
            if (!prod[static_cast<std::size_t>(a)].is_zero())
                throw VerificationError("idempotents at distinct spectral values fail to be "
                                        "orthogonal for model " + model.name);
    }

    // Metric coefficient along the idempotent: eta(u) = <e0, e0>.  The
    // Frobenius property makes it equal the unit-dual component of e0; any
    // mismatch means the pairing and the product are out of step.
    const QE eta = Algebra::pairing(e0, e0);
    if (!(eta == e0[3]))
        throw VerificationError("self-pairing of the idempotent disagrees with its unit-dual "
                                "component for model " + model.name);
    out.eta = eta;

    // Spectral property of the grading field, extended to first order: the
    // jet directions shift the spectral value by the idempotent coefficients
    // of the corresponding basis classes,
    //   E o e = (u + x2 c2 + x3 c3) o e,  c_p = <D_p, e0> / eta.
    {
        const QE etainv = field_inverse(eta);
        const QE c2 = e0[1] * etainv;
        const QE c3 = e0[0] * etainv;
        const QE U = R->gen() +
                     R->from_poly(JetPoly::variable(base, "x2")) * c2 +
                     R->from_poly(JetPoly::variable(base, "x3")) * c3;
        std::vector<QE> evec(4);
        const auto ev = A.euler_vector();
        for (int a = 0; a < 4; ++a)
            evec[static_cast<std::size_t>(a)] = R->from_poly(ev[static_cast<std::size_t>(a)]);
        const std::vector<QE> Ee = qmul(evec, efull);
        for (int a = 0; a < 4; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            if (!(Ee[ai] == U * efull[ai]))
                throw VerificationError("grading field fails the spectral property at first "
                                        "order for model " + model.name);
        }
    }

    // First derivatives of the metric coefficients.  The potential of the
    // diagonal metric is the coordinate dual to the point class, so its
    // gradient data comes from the point-class component f of the corrected
    // idempotent:  split f into its value and its jet slopes, differentiate
    // the divisor direction logarithmically (the divisor coordinate enters
    // only through q), and contract with the vector-field components of e0.
    {
        auto jet_slice = [&](const Fraction& g, int which) -> Fraction {
            if (!g.engaged() || g.is_zero()) return Fraction();
            JetPoly num = which == 0
                              ? g.num().coefficient_of(x2i, 0).coefficient_of(x3i, 0)
                              : which == 2 ? g.num().coefficient_of(x2i, 1)
                                           : g.num().coefficient_of(x3i, 1);
            if (num.is_zero()) return Fraction();
            return Fraction(std::move(num), g.den());
        };
        auto component = [&](const QE& x, int which) -> QE {
            std::vector<Fraction> cs;
            for (const auto& f : x.rep().coeffs()) cs.push_back(jet_slice(f, which));
            return R->element(UPoly<Fraction>(std::move(cs)));
        };
        const QE f = efull[3];
        const QE f0 = component(f, 0);
        if (!(f0 == eta))
            throw VerificationError("jet-free part of the corrected point-class component "
                                    "disagrees with the metric coefficient for model " +
                                    model.name);
        // Directional derivatives of f along the basis vector fields,
        // evaluated on the small locus.
        const std::array<QE, 4> df = {
            R->zero(),           // unit direction: nothing depends on it
            R->theta(f0),        // divisor direction, as q d/dq through u
            component(f, 2),     // first jet direction
            component(f, 3),     // second jet direction
        };
        QE diag = R->zero();
        for (int a = 1; a <= 3; ++a)
            diag = diag + e0[static_cast<std::size_t>(a)] * df[static_cast<std::size_t>(a)];
        out.eta_diag = diag;

        TwoRootElement pair = P->zero();
        TwoRootElement pair_rev = P->zero();
        for (int a = 1; a <= 3; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            pair = pair + P->embed_first(e0[ai]) * P->embed_second(df[ai]);
            pair_rev = pair_rev + P->embed_second(e0[ai]) * P->embed_first(df[ai]);
        }
        // Symmetry of the mixed derivatives is not built into the formula;
        // it certifies the computation.
        if (!(pair == pair_rev))
            throw VerificationError("mixed metric derivatives are asymmetric for model " +
                                    model.name);
        out.eta_pair = pair;
        out.eta_pair_reverse = pair_rev;
    }

    return out;
}

QuotientElement project_branch(const QuotientRingPtr& target, const QuotientElement& x) {
    if (!target) throw AlgebraError("projection onto a null ring");
    if (!x.engaged()) return target->zero();
    require_same_ring(x.ring()->base(), target->base());
    if (!pmod(x.ring()->modulus(), target->modulus()).is_zero())
        throw AlgebraError("projection target's modulus does not divide the source modulus");
    return target->element(x.rep());
}

TwoRootElement project_pair(const TwoRootRingPtr& target, const TwoRootElement& x) {
    if (!target) throw AlgebraError("projection onto a null ring");
    if (x.is_zero()) return target->zero();
    // The second root of the target must satisfy the source's annihilating
    // polynomial, and the first root projects branch-wise.
    if (!pmod(x.ring()->second_min_poly(), target->second_min_poly()).is_zero())
        throw AlgebraError("pair projection target does not refine the second root");
    std::vector<QuotientElement> cs;
    for (const auto& c : x.rep().coeffs())
        cs.push_back(c.engaged() ? project_branch(target->first(), c)
                                 : target->first()->zero());
    return target->element(UPoly<QuotientElement>(std::move(cs)));
}

TwoRootElement rescale_pair(const TwoRootRingPtr& target, const TwoRootElement& x,
                            const Rational& c) {
    if (!target) throw AlgebraError("rescaling onto a null ring");
    std::vector<QuotientElement> cs;
    Rational ck(1);
    for (const auto& coef : x.rep().coeffs()) {
        cs.push_back(coef.engaged()
                         ? QuotientRing::rescale_element(coef, c, target->first()) * ck
                         : target->first()->zero());
        ck = ck * c;
    }
    return target->element(UPoly<QuotientElement>(std::move(cs)));
}

} // namespace qcw::fano
