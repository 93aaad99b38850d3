#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcw/dp/lattice.hpp"
#include "qcw/dp/laurent.hpp"
#include "qcw/matrix.hpp"
#include "qcw/numroots.hpp"
#include "qcw/rational.hpp"
#include "qcw/rng.hpp"
#include "qcw/upoly.hpp"

namespace qcw::dp {

// --------------------------------------------------------------------------
// Quantum multiplication on a blown-up plane with r >= 3 generic points.
//
// Cohomology basis, in slot order:
//   slot 0           : the unit class (H^0),
//   slots 1 .. r+1   : the divisor classes l_0 (line) and l_1..l_r
//                      (exceptional curves),
//   slot r+2         : the point class (H^4).
// Structure constants are Laurent polynomials in q_0..q_r (characters of
// curve classes) and are tracked to first order in the deformation
// parameter z.  Every coefficient carries a certification flag: products
// whose value would need point invariants of degree > 3 (absent from the
// support table) are marked uncertified instead of being guessed.
// --------------------------------------------------------------------------

struct JetCoeff {
    LaurentPoly z0, z1;
    bool ok0 = true, ok1 = true;  // certification flags per z-order
};

struct SurfaceElement {
    std::size_t r = 0;
    std::vector<JetCoeff> comp;  // size r+3

    std::size_t dim() const { return r + 3; }
    bool fully_certified() const;
    bool is_zero() const;  // all certified and zero
    bool operator==(const SurfaceElement& o) const;
};

class SurfaceAlgebra {
public:
    explicit SurfaceAlgebra(std::size_t r);
    SurfaceAlgebra(std::size_t r, const SupportTable& table);

    std::size_t rank() const { return r_; }
    std::size_t dim() const { return r_ + 3; }
    std::size_t nvars() const { return r_ + 1; }

    static constexpr std::size_t unit_slot() { return 0; }
    std::size_t divisor_slot(std::size_t i) const { return 1 + i; }  // l_i
    std::size_t point_slot() const { return r_ + 2; }

    SurfaceElement zero() const;
    SurfaceElement basis(std::size_t slot) const;
    SurfaceElement unit() const { return basis(unit_slot()); }
    SurfaceElement point() const { return basis(point_slot()); }
    // The divisor a*l_0 - sum b_i l_i attached to the class (a;b_1..b_r).
    SurfaceElement divisor(const LatticeVector& cls) const;
    SurfaceElement canonical_element() const;

    // Divisor class of basis slot i (unit/point slots are not classes).
    LatticeVector divisor_class(std::size_t slot) const;

    SurfaceElement add(const SurfaceElement& x, const SurfaceElement& y) const;
    SurfaceElement sub(const SurfaceElement& x, const SurfaceElement& y) const;
    SurfaceElement scale(const SurfaceElement& x, const Rational& c) const;
    // Multiplies every coefficient by a Laurent monomial.
    SurfaceElement shift(const SurfaceElement& x, const std::vector<long>& exps) const;

    // The product of two basis classes (cached).  Certification flags mark
    // the coefficients whose value would need degree >= 4 point invariants:
    //   divisor * divisor : fully certified;
    //   divisor * point   : z^1 unit coefficient uncertified;
    //   point   * point   : z^0 unit coefficient and all z^1 coefficients
    //                       of unit and divisor slots uncertified.
    const SurfaceElement& basis_product(std::size_t x, std::size_t y) const;

    // Bilinear extension with certification tracking: a contribution is
    // dropped only when a certified factor vanishes; if an uncertified
    // factor could contribute, the target coefficient is marked unknown.
    // An unknown coefficient still carries the sum of the contributions
    // that are certified (deterministic, but not the full value).
    SurfaceElement product(const SurfaceElement& x, const SurfaceElement& y) const;

    // Poincare pairing of a certified element with a divisor class:
    // the divisor part pairs through the intersection form (per z-order).
    std::array<LaurentPoly, 2> pair_with_class(const SurfaceElement& x,
                                               const LatticeVector& cls) const;

    // ---- evaluation at a torus point ------------------------------------

    // Per-point cache: value of q^beta for every supported class.
    struct PointData {
        std::vector<Rational> point;                  // q_0..q_r, all nonzero
        std::array<std::vector<Rational>, 3> values;  // per degree c-1, per class
    };
    PointData prepare_point(const std::vector<Rational>& point) const;

    // Evaluates the z^0 part of every certified slot; throws AlgebraError on
    // an uncertified slot unless allow_uncertified (which skips it).
    std::vector<Rational> eval_z0(const SurfaceElement& x,
                                  const std::vector<Rational>& point,
                                  bool allow_uncertified = false) const;

    // Matrix (columns = images of basis slots) of multiplication by the
    // divisor with the given class at z = 0; every entry is certified.
    Matrix<Rational> multiplication_matrix(const LatticeVector& cls,
                                           const PointData& pd) const;
    // Same for the first Chern class.
    Matrix<Rational> canonical_matrix(const PointData& pd) const;

    const SupportTable& table() const { return *table_; }
    const std::vector<SupportClass>& support(std::size_t degree) const;

private:
    // Per-class precomputation: packed character key, integer invariant,
    // pairings with the basis divisors (a, b_1..b_r) and the coordinates of
    // the class as a divisor (a, -b_1..-b_r).
    struct ClassData {
        LaurentPoly::Key key;
        long long value;
        std::vector<long> w;
        std::vector<long> spread;
    };
    SurfaceElement make_basis_product(std::size_t x, std::size_t y) const;
    std::size_t r_;
    const SupportTable* table_;
    std::vector<SupportClass> support_[3];  // degrees 1,2,3
    std::vector<ClassData> cdata_[3];
    std::vector<LatticeVector> dcls_;  // divisor classes, index 0..r
    mutable std::vector<std::unique_ptr<SurfaceElement>> products_;  // lazy
};

// Process-wide cache (construction of the rank-8 table is expensive).
const SurfaceAlgebra& surface_algebra(std::size_t r);

// --------------------------------------------------------------------------
// Analysis of the algebra at the symmetric point q = 1, z = 0.
// --------------------------------------------------------------------------

struct SymmetricPointReport {
    std::size_t r = 0;

    // Matrix of multiplication by the first Chern class on the invariant
    // subspace spanned by (unit, c_1, point), columns in that order.
    Matrix<Rational> invariant_matrix{3, 3, Rational(0)};
    // Its characteristic polynomial R (ascending coefficients).
    UPoly<Rational> invariant_charpoly;
    // Presentation constants: R(t) = t^3 - B t^2 - D t - 36 (9-r) C.
    Rational B, C, D;
    // The value the second coefficient takes in a published table when it
    // disagrees with the computed one (empty note otherwise).
    std::string erratum_note;

    // Root-orbit eigenvalue mu = -(1/2) * sum over the degree-1 support of
    // gw * (rho,beta)^2, and the same number certified as a double root of
    // R for r >= 5 (R(mu) = R'(mu) = 0).
    Rational mu;
    bool mu_double_root = false;

    // nu = -(1/2) * sum over the degree-2 support of gw * (rho,beta)^2,
    // the point-class eigenvalue on the root span; and the closed-form
    // identity nu = -mu^2 / (2 (9-r)).
    Rational nu;
    bool nu_identity_ok = false;
    bool nu_eigen_ok = false;  // point o rho = nu * rho, both z-orders

    // Gamma = point + (mu/(9-r)) c_1 + nu * unit.
    Rational gamma_c1_coeff, gamma_unit_coeff;
    bool rho_square_ok = false;        // rho o rho = -2 Gamma at z = 0
    bool rho_orthogonal_ok = false;    // rho o rho' = 0 (orthogonal roots)
    bool root_span_product_ok = false; // D o D' = (D,D') Gamma on the root span
    bool gamma_eigen_ok = false;       // c_1 o Gamma = mu * Gamma (certified slots)
    bool gamma_square_certified_ok = false;  // certified slots of Gamma o Gamma vanish
    // The one uncertified coefficient of Gamma o Gamma sits in the unit
    // slot; Gamma^2 = 0 forces the z^0 unit coefficient of point o point at
    // q = 1 to equal this value (reported, not assumed).
    Rational forced_point_square_unit;

    bool block_diagonal_ok = false;    // c_1-matrix splits off the root span
    bool root_block_scalar = false;    // the root-span block equals mu * id
};

// Requires 4 <= r <= 8 (the scalar eigenvalue needs a single root orbit).
SymmetricPointReport symmetric_point_analysis(std::size_t r);

// Root-span eigenvalues of multiplication by c_1 at q = 1 for r = 3, where
// they depend on the orbit: returns the sorted distinct values together
// with a flag that every root is an eigenvector.
struct RootEigenReport {
    std::vector<Rational> eigenvalues;
    bool every_root_eigenvector = false;
};
RootEigenReport root_eigen_analysis(std::size_t r);

// --------------------------------------------------------------------------
// Localization at the fixed subtorus of a root.
// --------------------------------------------------------------------------

struct SubtorusReport {
    std::size_t r = 0;
    LatticeVector rho;
    std::vector<Rational> sample;  // a point with q^rho = 1
    bool on_subtorus = false;

    // Weighted odd-moment sums vanish on every supported orbit part:
    // sum over the part of (D,beta) (rho,beta)^{2m+1} q^beta = 0 for
    // m = 0,1 with no insertion and with each basis insertion D of the
    // orthogonal complement of rho.
    bool moment_sums_ok = false;
    std::size_t moment_sum_count = 0;

    // D o rho = mu_{D,rho} * rho for D orthogonal to rho, with the scalar
    // matching -(1/2) sum gw (rho,beta)^2 (D,beta) q^beta per z-order.
    bool eigen_ok = false;
    // (D o D', rho) = 0 for D, D' orthogonal to rho (and for rho o rho).
    bool closure_ok = false;
    // point o rho = nu_rho * rho at the sample (z^0), with
    // nu_rho = -(1/2) sum over the degree-2 support of gw (rho,beta)^2 q^beta.
    bool point_eigen_ok = false;
};

// Constructs a sample point on {q^rho = 1} with small distinct prime
// coordinates away from one +-1 exponent of rho.
std::vector<Rational> subtorus_sample(std::size_t r, const LatticeVector& rho);

SubtorusReport root_subtorus_check(std::size_t r, const LatticeVector& rho,
                                   const std::vector<Rational>& sample);

// --------------------------------------------------------------------------
// Boundary behaviour in the last exceptional variable q_r.
// --------------------------------------------------------------------------

struct BoundaryClaim {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct BoundaryReport {
    std::size_t r = 0;
    std::vector<BoundaryClaim> claims;
    bool all_ok = false;
};

// Verifies, for 4 <= r <= 8, that the structure constants extend across
// q_r = 0 after rebasing l_r to e = q_r l_r, and that the fiber splits as
// <e> + (the rank r-1 algebra):
//   1. e o e - e has only terms with q_r-exponent >= 2;
//   2. e o D for D in {l_0..l_{r-1}} has only q_r-exponents >= 2;
//   3. e o point: certified coefficients have q_r-exponents >= 2;
//   4. products of {unit, l_0..l_{r-1}, point} agree with the rank r-1
//      products up to terms with q_r-exponent >= 1 (certified slots);
//   5. rebased constants have no negative q_r-exponents;
//   6. the q_r = 0 fiber constants equal the rank r-1 constants exactly,
//      e is idempotent there and annihilates the complement.
BoundaryReport boundary_extension(std::size_t r);

// --------------------------------------------------------------------------
// Semisimplicity certificates.
// --------------------------------------------------------------------------

struct CertificateAttempt {
    int point_index = 0;  // -1 = the user-supplied point
    std::vector<Rational> point;
    std::string operator_desc;
    bool squarefree = false;
};

struct SemisimplicityCertificate {
    std::size_t r = 0;
    std::uint64_t probe_seed = 0;
    bool witness_found = false;
    // Filled when a witness exists:
    std::vector<Rational> witness_point;
    std::string witness_operator;
    UPoly<Rational> witness_charpoly;
    bool user_point_given = false;
    bool user_point_ok = false;  // user point itself produced a witness
    std::vector<CertificateAttempt> attempts;
    // Numeric root isolation of the witness charpoly (empty if none).
    std::optional<NumericRootResult> witness_roots;
};

inline constexpr std::uint64_t kDefaultProbeSeed = 0x51a7eb01dULL;

// Searches for a squarefree characteristic polynomial of a certified
// multiplication operator at z = 0.  The user point (if any) is tried
// first with every operator; then up to point_budget probe points with
// small q_r, each with multiplication by c_1 and op_budget - 1 random
// divisors.  A witness proves semisimplicity at that point; exhaustion is
// inconclusive (never a disproof).
SemisimplicityCertificate semisimplicity_certificate(
    std::size_t r, const std::vector<Rational>* user_point,
    std::uint64_t probe_seed = kDefaultProbeSeed, std::size_t point_budget = 16,
    std::size_t op_budget = 4);

// Characteristic polynomial of c_1-multiplication at a point (z = 0).
UPoly<Rational> canonical_charpoly(std::size_t r, const std::vector<Rational>& point);

// --------------------------------------------------------------------------
// Symmetry of the structure constants.
// --------------------------------------------------------------------------

struct EquivarianceReport {
    std::size_t r = 0;
    std::size_t draws = 0;
    std::size_t checked = 0;
    bool all_ok = false;
};

// Verifies w(X) o w(Y) = w(X o Y) for random lattice-symmetry generators
// (adjacent transpositions and the degree-preserving reflection) and
// random basis pairs; w acts on characters by exponent transport and on
// the basis through divisor classes.  Exact comparison, masks included.
EquivarianceReport weyl_equivariance_check(std::size_t r, std::size_t draws,
                                           std::uint64_t seed);

}  // namespace qcw::dp
