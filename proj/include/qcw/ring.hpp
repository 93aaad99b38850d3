#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcw/errors.hpp"

namespace qcw {

// Kinds of formal variables.
//
//  Exponential — Laurent variable (negative powers allowed).  Its natural
//                derivation is the logarithmic one, q d/dq, so exponential
//                variables never leave exponent space under differentiation.
//  Jet        — nilpotent direction:  the ring truncates every monomial
//                whose *total* degree across all Jet variables exceeds the
//                ring's jet_order (joint first-neighborhood semantics).
//  Polynomial — ordinary polynomial variable (non-negative powers only).
enum class VarKind { Exponential, Jet, Polynomial };

struct Variable {
    std::string name;
    VarKind kind;
};

using Monomial = std::vector<int>;

// An immutable description of a coefficient ring
//   Q[v_1^{±1}..][jets]/(jets)^{jet_order+1}[poly vars].
// Polynomials hold a shared_ptr to their Ring; two polynomials may be
// combined when their rings are structurally equal.
class Ring {
public:
    Ring(std::vector<Variable> vars, int jet_order, int exp_cap = -1)
        : vars_(std::move(vars)), jet_order_(jet_order), exp_cap_(exp_cap) {
        if (jet_order_ < 0) throw AlgebraError("negative jet order");
    }

    static std::shared_ptr<const Ring> make(std::vector<Variable> vars, int jet_order = 1,
                                            int exp_cap = -1) {
        return std::make_shared<const Ring>(std::move(vars), jet_order, exp_cap);
    }

    std::size_t size() const { return vars_.size(); }
    const Variable& var(std::size_t i) const { return vars_.at(i); }
    int jet_order() const { return jet_order_; }
    // When >= 0, monomials of larger total Exponential degree are truncated.
    int exp_cap() const { return exp_cap_; }

    std::optional<std::size_t> index_of(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t require(const std::string& name) const {
        auto i = index_of(name);
        if (!i) throw AlgebraError("ring has no variable named " + name);
        return *i;
    }

    // Total degree of m in the Jet variables.
    int jet_degree(const Monomial& m) const {
        int d = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].kind == VarKind::Jet) d += m[i];
        return d;
    }

    // A monomial is representable when negative exponents occur only on
    // Exponential variables (jet truncation is handled separately: an
    // overflowing monomial is simply zero in the ring).
    bool monomial_valid(const Monomial& m) const {
        if (m.size() != vars_.size()) return false;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (m[i] < 0 && vars_[i].kind != VarKind::Exponential) return false;
        return true;
    }

    bool monomial_truncated(const Monomial& m) const {
        if (jet_degree(m) > jet_order_) return true;
        if (exp_cap_ >= 0) {
            int d = 0;
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (vars_[i].kind == VarKind::Exponential) d += m[i];
            if (d > exp_cap_) return true;
        }
        return false;
    }

    bool operator==(const Ring& o) const {
        if (jet_order_ != o.jet_order_ || exp_cap_ != o.exp_cap_ ||
            vars_.size() != o.vars_.size()) return false;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name != o.vars_[i].name || vars_[i].kind != o.vars_[i].kind)
                return false;
        return true;
    }
    bool operator!=(const Ring& o) const { return !(*this == o); }

private:
    std::vector<Variable> vars_;
    int jet_order_;
    int exp_cap_;
};

using RingPtr = std::shared_ptr<const Ring>;

inline void require_same_ring(const RingPtr& a, const RingPtr& b) {
    if (a == b) return;
    if (a && b && *a == *b) return;
    throw AlgebraError("operands belong to different rings");
}

// Graded-lexicographic order: first by total degree (sum of all exponents,
// Laurent exponents counted with sign), ties broken lexicographically with
// the first variable most significant.  Used both as the term-map order and,
// reversed, as the canonical display order.
struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        long da = 0, db = 0;
        for (int e : a) da += e;
        for (int e : b) db += e;
        if (da != db) return da < db;
        return a < b;
    }
};

} // namespace qcw
