#pragma once

#include <string>
#include <vector>

#include "qcw/rational.hpp"

namespace qcw::fano {

// A rank-one Fano threefold model: cohomology Z in degrees (p,p), p = 0..3,
// basis D0 (unit), D1 (hyperplane), D2, D3 (point), Poincare pairing
// g(Dp, D3-p) = 1.  `index` is the Fano index (anticanonical = index * D1)
// and `degree` the normalized degree, with D1^3 = degree * D2 pairing-wise.
struct Model {
    std::string name;
    int index;     // called rho elsewhere: c1 = index * D1
    int degree;    // delta: triple self-intersection of D1
    int max_curve_degree; // largest curve degree carrying required invariants
};

const Model& model_by_name(const std::string& name);
const std::vector<Model>& all_models();

// Classical triple intersection <Da, Db, Dc> (nonzero only for a+b+c = 3).
Rational classical_triple(const Model& m, int a, int b, int c);

// Coefficient of D_{a+b} in the cup product Da * Db (zero when a+b > 3).
Rational cup_coefficient(const Model& m, int a, int b);

} // namespace qcw::fano
