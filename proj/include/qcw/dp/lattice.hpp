#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qcw/errors.hpp"
#include "qcw/rational.hpp"

namespace qcw::dp {

// A degree-two homology class on a plane blown up in r points, written
// (a; b_1,...,b_r) for the class a*l_0 - sum_i b_i*l_i, where l_0 is the
// line class and l_i the exceptional class over the i-th point.  The
// intersection pairing is diagonal: (l_0,l_0) = 1, (l_i,l_i) = -1.
struct LatticeVector {
    long a = 0;
    std::vector<long> b;

    LatticeVector() = default;
    LatticeVector(long a_, std::vector<long> b_) : a(a_), b(std::move(b_)) {}

    std::size_t rank() const { return b.size(); }

    friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
    friend auto operator<=>(const LatticeVector&, const LatticeVector&) = default;

    LatticeVector& operator+=(const LatticeVector& o);
    LatticeVector& operator-=(const LatticeVector& o);
    friend LatticeVector operator+(LatticeVector x, const LatticeVector& y) {
        x += y;
        return x;
    }
    friend LatticeVector operator-(LatticeVector x, const LatticeVector& y) {
        x -= y;
        return x;
    }
    friend LatticeVector operator*(long c, LatticeVector x);
    friend LatticeVector operator-(LatticeVector x);
};

// "(a;b1,...,br)" with no padding, e.g. "(0;-1,1,0)".
std::string to_string(const LatticeVector& v);
LatticeVector parse_lattice_vector(const std::string& s);

long pairing(const LatticeVector& x, const LatticeVector& y);
// Anticanonical degree 3a - sum b_i, i.e. the pairing with (3;1,...,1).
long degree(const LatticeVector& x);
long self_intersection(const LatticeVector& x);

LatticeVector canonical_class(std::size_t r);                   // (3;1,...,1)
LatticeVector line_class(std::size_t r);                        // l_0
LatticeVector exceptional_class(std::size_t r, std::size_t i);  // l_i, 1-based
bool is_root(const LatticeVector& v);  // degree 0 and self-intersection -2

// Quadratic reflection attached to the standard plane transformation based
// at points i,j,k: adds delta = a - b_i - b_j - b_k to a and to each of
// b_i, b_j, b_k.  Preserves pairing and degree.
LatticeVector cremona_reflect(const LatticeVector& v, std::size_t i,
                              std::size_t j, std::size_t k);
LatticeVector transpose_entries(const LatticeVector& v, std::size_t i,
                                std::size_t j);
// Reflection in a root: v + (v,root)*root.
LatticeVector root_reflect(const LatticeVector& v, const LatticeVector& root);

enum class SupportStatus { Supported, Vanishing };

struct ReducedForm {
    LatticeVector normal_form;
    SupportStatus status = SupportStatus::Vanishing;
    std::size_t steps = 0;  // reflections applied during the reduction
};

// Reduction to normal form: repeatedly sort the b-entries in decreasing
// order and, while delta = a - b_1 - b_2 - b_3 is negative, reflect on the
// top three positions.  The first coordinate strictly decreases with every
// applied reflection, so the loop terminates; a guard raises if it does
// not.  A class is Supported exactly when the terminal state matches one
// of the tabulated nonvanishing normal forms (trailing zeros dropped);
// everything else has vanishing invariant.
ReducedForm weyl_reduce(const LatticeVector& v);

struct OrbitSet {
    std::size_t r = 0;
    LatticeVector representative;
    std::vector<LatticeVector> elements;  // deduplicated, lexicographically sorted
    std::string label;                    // one of I, F, G, H, R, custom

    bool contains(const LatticeVector& v) const;
};

// Breadth-first closure of the seed under adjacent entry transpositions and
// the single reflection on positions (1,2,3).  Deduplication keys on the
// full vector.  Throws when the closure exceeds cap (wrong-seed guard).
OrbitSet enumerate_orbit(std::size_t r, const LatticeVector& seed,
                         std::string label = "custom",
                         std::size_t cap = 200000);

// The standard labeled orbits.  Each checks its cardinality against the
// expected closed value and throws VerificationError on mismatch.
OrbitSet orbit_I(std::size_t r);  // exceptional classes, seed (0;-1,0,...)
OrbitSet orbit_F(std::size_t r);  // pencil classes, seed (1;1,0,...)
OrbitSet orbit_G(std::size_t r);  // line classes, seed (1;0,...)
OrbitSet orbit_H(std::size_t r);  // seed (0;-1,-1,0,...), strictly this orbit
// All roots.  A single orbit for r >= 4; for r = 3 the disjoint union of
// the entry-difference orbit and the orbit of (1;1,1,1).
OrbitSet roots(std::size_t r);

// Vector-adds t to every element (the reflection group fixes the
// anticanonical class, so translation by its multiples commutes with the
// action and the result is again an orbit).
OrbitSet translate_orbit(const OrbitSet& s, const LatticeVector& t,
                         std::string label = "custom");

// Expected cardinalities (enumeration cross-check values).
struct CardinalityRow {
    std::size_t r;
    std::size_t roots;       // |R_r|
    std::size_t exceptional; // |I_r|
    std::size_t pencils;     // |F_r|
    std::size_t lines;       // |G_r|
    std::size_t pairs;       // |H_r|
    unsigned long long weyl; // |W_r| via |I_r| * |W_{r-1}|, |W_3| = 12
};
// Computed fresh by enumeration for r = 3..8; the Weyl order column uses
// the orbit-stabilizer product, never enumeration of the group itself.
std::vector<CardinalityRow> cardinality_grid();

// ---------------------------------------------------------------------------
// Invariant lookup table
// ---------------------------------------------------------------------------

struct SupportEntry {
    LatticeVector form;  // normal form, trailing zeros dropped
    Rational value;
    std::string note;
};

class SupportTable {
public:
    // Loads the versioned data file (see data/gw_support_table.json).
    static SupportTable load(const std::string& path);
    static const SupportTable& builtin();  // loads QCW_DATA_DIR once, cached

    const std::vector<SupportEntry>& entries() const { return entries_; }

    // Matches a reduced vector against the table: the first coordinate must
    // agree and the b-entries must agree as multisets after zero-padding.
    const SupportEntry* find(const LatticeVector& reduced) const;

private:
    std::vector<SupportEntry> entries_;
};

// One-point invariant of an arbitrary class of degree 1, 2 or 3: reduce,
// then look up.  Vanishing classes give 0.  Classes of degree outside
// {1,2,3} are not tabulated and raise AlgebraError (never silently 0).
Rational gw_invariant(const SupportTable& table, const LatticeVector& v);

struct SupportClass {
    LatticeVector beta;
    Rational value;
};

// One reflection-orbit piece of the support (an orbit or an anticanonical
// translate of one), with the common invariant value of its elements.
struct SupportPart {
    std::string label;  // e.g. "I", "F+k", "3k"
    Rational value;
    OrbitSet orbit;
};

// The support of the degree-c one-point invariant on the rank-r lattice,
// decomposed into orbit parts; values are cross-checked via gw_invariant,
// degrees are checked elementwise and the parts are verified disjoint.
std::vector<SupportPart> support_parts(const SupportTable& table,
                                       std::size_t r, long c);

// The same support flattened and sorted by class.
std::vector<SupportClass> support_classes(const SupportTable& table,
                                          std::size_t r, long c);

// ---------------------------------------------------------------------------
// Orbit moment sums
// ---------------------------------------------------------------------------

// Brute-force moment sums of an orbit S against a pair of orthogonal roots,
// each compared with its closed form:
//   (a) sum_beta                beta = deg(S)|S|/(9-r) * k_r
//   (b) sum (rho,beta)          beta = -1/2 sum (rho,beta)^2 * rho
//   (c) sum (rho,beta)^m (rho',beta) = 0 for m = 0..3, and the odd power
//       sums sum (rho,beta)^{2m+1} = 0 for m = 0,1
//   (d) sum (rho,beta)^2        beta = deg(S)/(9-r) * sum (rho,beta)^2 * k_r
//       (closed form valid for r >= 5 only; checked when requested)
//   (e) sum (rho,beta)(rho',beta) beta = 0
struct MomentSums {
    long long count = 0;
    long long q2 = 0;  // sum (rho,beta)^2
    LatticeVector sum_beta;
    bool a_ok = false;
    LatticeVector sum_rho_beta;
    bool b_ok = false;
    std::array<long long, 2> odd_power{};    // powers 1, 3
    std::array<long long, 4> cross_power{};  // m = 0..3
    bool c_ok = false;
    bool d_checked = false;
    LatticeVector sum_rho2_beta;
    bool d_ok = false;
    LatticeVector sum_cross_beta;
    bool e_ok = false;

    bool all_ok() const {
        return a_ok && b_ok && c_ok && e_ok && (!d_checked || d_ok);
    }
};

MomentSums orbit_moment_sums(const OrbitSet& S, const LatticeVector& rho,
                             const LatticeVector& rho_perp,
                             bool check_d = false);

// Rank (over the rationals) of the span of a list of lattice vectors.
std::size_t span_rank(const std::vector<LatticeVector>& vectors);

}  // namespace qcw::dp
