#pragma once

#include <memory>
#include <vector>

#include "qcw/fano/algebra.hpp"
#include "qcw/quotient.hpp"
#include "qcw/tworoot.hpp"

namespace qcw::fano {

// Idempotents and special coordinates of a model, expressed over the ring
// obtained by adjoining one canonical coordinate u (a root of the Euler
// characteristic polynomial) to the coefficient field, plus a second
// distinct root u' for the off-diagonal data.
struct SpecialData {
    const Model* model = nullptr;
    std::shared_ptr<Algebra> algebra;       // jet order 1
    QuotientRingPtr root_ring;              // Q(q)[u]/(charpoly)
    TwoRootRingPtr pair_ring;               // adjoin a second, distinct root u'

    // Basis components (index = basis degree) of the idempotent attached
    // to the canonical coordinate u.
    std::vector<QuotientElement> idempotent_zero;  // jet-free part
    std::vector<QuotientElement> idempotent_full;  // with first-order jet terms

    QuotientElement eta;              // eta_i as a function of u_i
    QuotientElement eta_diag;         // eta_ii as a function of u_i
    TwoRootElement eta_pair;          // eta_ij with i at u, j at u'
    TwoRootElement eta_pair_reverse;  // eta_ji in the same ring
};

// Computes idempotents and special coordinates for the model and verifies
// the defining identities along the way: idempotency, partition of unity,
// pairwise orthogonality and the Euler eigenvalue property.  Throws
// VerificationError if any identity fails.
SpecialData compute_special(const Model& model);

// Reduce an element of Q(q)[u]/(m) modulo the modulus of `target`, which
// must be a monic factor of m over the same base ring.
QuotientElement project_branch(const QuotientRingPtr& target, const QuotientElement& x);

// Reduce a two-root element onto `target`: its coefficients are reduced
// onto target->first() and the second root modulo target->modulus2().
TwoRootElement project_pair(const TwoRootRingPtr& target, const TwoRootElement& x);

// Image of x under u = c*v, u' = c*v' where v, v' are the generators of
// `target` (whose moduli must be the correspondingly rescaled ones).
TwoRootElement rescale_pair(const TwoRootRingPtr& target, const TwoRootElement& x,
                            const Rational& c);

}  // namespace qcw::fano
