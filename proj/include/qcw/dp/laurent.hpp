#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qcw/dp/lattice.hpp"
#include "qcw/errors.hpp"
#include "qcw/rational.hpp"

namespace qcw::dp {

// Sparse Laurent polynomial in the torus characters q_0,...,q_{n-1} with
// rational coefficients.  Exponent tuples are identified with lattice
// vectors: the character of the class (a;b_1,...,b_r) is
// q_0^a q_1^{b_1} ... q_r^{b_r}, so n = r+1.  Tuples are packed into a
// 64-bit key (7 bits per variable, offset by 64, variable 0 highest),
// which makes the numeric key order equal the lexicographic order on
// exponent tuples; terms are kept in a sorted vector with no zero
// coefficients, so construction in class order needs no re-sorting.
class LaurentPoly {
public:
    using Key = std::uint64_t;

    LaurentPoly() = default;
    explicit LaurentPoly(std::size_t nvars) : nvars_(nvars) { check_nvars(nvars); }

    static constexpr long kMaxAbsExponent = 63;

    static Key pack(const std::vector<long>& exps);
    static std::vector<long> unpack(Key key, std::size_t nvars);
    static Key pack_class(const LatticeVector& beta);  // (a, b_1..b_r)

    static LaurentPoly constant(std::size_t nvars, Rational c);
    static LaurentPoly monomial(std::size_t nvars, const std::vector<long>& exps,
                                Rational c);
    static LaurentPoly character(const LatticeVector& beta, Rational c);

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<std::pair<Key, Rational>>& raw_terms() const { return terms_; }

    // Appends a term whose key is strictly larger than every existing key
    // (fast path for construction in class order); zero coefficients are
    // skipped.  Throws if the order invariant would break.
    void push_term(Key key, Rational c);
    void push_term(const LatticeVector& beta, Rational c) {
        push_term(pack_class(beta), std::move(c));
    }
    // General insertion at any position (merges with an existing key).
    void add_term(Key key, const Rational& c);

    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator-=(const LaurentPoly& o);
    friend LaurentPoly operator+(LaurentPoly x, const LaurentPoly& y) {
        x += y;
        return x;
    }
    friend LaurentPoly operator-(LaurentPoly x, const LaurentPoly& y) {
        x -= y;
        return x;
    }
    friend LaurentPoly operator*(const LaurentPoly& x, const LaurentPoly& y);
    LaurentPoly scaled(const Rational& c) const;
    // Multiplies by the single monomial with the given exponents (key shift).
    LaurentPoly shifted(const std::vector<long>& exps) const;

    bool operator==(const LaurentPoly& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

    // Exact evaluation; every coordinate must be nonzero when a negative
    // exponent occurs.  pow_table[v][e + kMaxAbsExponent] may be supplied by
    // callers evaluating many polynomials at one point.
    Rational eval(const std::vector<Rational>& point) const;

    // Smallest exponent of variable v over all terms; zero polynomial -> 0.
    long min_exponent(std::size_t v) const;
    long max_exponent(std::size_t v) const;

    // Keeps only the terms with exponent 0 in variable v (the restriction
    // to the v-th boundary divisor).  Throws when a negative exponent in v
    // is present (the restriction would not exist).
    LaurentPoly restrict_var_zero(std::size_t v) const;

    // Drops variable v (which must have exponent 0 everywhere), producing a
    // polynomial in one fewer variable; used to compare boundary fibers
    // with lower-rank data.
    LaurentPoly drop_var(std::size_t v) const;
    // Inserts a fresh variable with exponent 0 at position v.
    LaurentPoly insert_var(std::size_t v) const;

    // Applies a lattice map to every exponent tuple (exponents are lattice
    // vectors; an orthogonal lattice map permutes characters).  Re-sorts.
    LaurentPoly map_exponents(
        const std::function<LatticeVector(const LatticeVector&)>& f) const;

    // Decoded view in key order.
    std::vector<std::pair<std::vector<long>, Rational>> decoded() const;
    // Canonical text form, e.g. "2*q0^3*q2^-1 + 1" with variables "q0..".
    std::string to_string() const;

private:
    static void check_nvars(std::size_t n);
    std::size_t nvars_ = 0;
    std::vector<std::pair<Key, Rational>> terms_;
};

}  // namespace qcw::dp
