#pragma once

#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "qcw/errors.hpp"
#include "qcw/rational.hpp"

namespace qcw {

// Polynomial of degree at most two,  c0 + sum_k c_k U_k + sum_{k<=l} q_kl U_k U_l,
// in formal unknowns U_k (integer ids).  Sums stay degree <= 2; a product is
// accepted only when it cannot exceed degree two (constant * anything, or
// linear * linear).  This is exactly the closure of the associativity
// constraints: structure constants are affine in the unknown invariants and
// appear in products of two at a time.
class LinExpr {
public:
    using Key = std::pair<int, int>; // normalized: first <= second

    LinExpr() : c0_(0) {}
    explicit LinExpr(Rational c) : c0_(std::move(c)) {}

    static LinExpr unknown(int id, Rational coeff = Rational(1)) {
        LinExpr e;
        if (coeff != 0) e.lin_[id] = std::move(coeff);
        return e;
    }

    const Rational& constant_part() const { return c0_; }
    const std::map<int, Rational>& linear_part() const { return lin_; }
    const std::map<Key, Rational>& quadratic_part() const { return quad_; }
    bool is_constant() const { return lin_.empty() && quad_.empty(); }
    bool is_linear() const { return quad_.empty(); }
    bool is_zero() const { return c0_ == 0 && lin_.empty() && quad_.empty(); }

    LinExpr operator-() const {
        LinExpr out;
        out.c0_ = -c0_;
        for (const auto& [k, v] : lin_) out.lin_[k] = -v;
        for (const auto& [k, v] : quad_) out.quad_[k] = -v;
        return out;
    }

    LinExpr& operator+=(const LinExpr& o) {
        c0_ += o.c0_;
        merge(lin_, o.lin_);
        merge(quad_, o.quad_);
        return *this;
    }
    LinExpr& operator-=(const LinExpr& o) { return *this += -o; }

    friend LinExpr operator+(LinExpr a, const LinExpr& b) { a += b; return a; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { a -= b; return a; }

    friend LinExpr operator*(const LinExpr& a, const LinExpr& b) {
        if (a.is_constant()) return b.scaled(a.c0_);
        if (b.is_constant()) return a.scaled(b.c0_);
        if (!a.is_linear() || !b.is_linear())
            throw AlgebraError("product of unknown-bearing expressions exceeds degree two");
        LinExpr out = a.scaled(b.c0_);
        out += b.scaled(a.c0_);
        out.c0_ -= a.c0_ * b.c0_; // both scalings contributed a.c0*b.c0
        for (const auto& [i, vi] : a.lin_)
            for (const auto& [j, vj] : b.lin_) {
                Key k = i <= j ? Key{i, j} : Key{j, i};
                auto it = out.quad_.find(k);
                if (it == out.quad_.end()) {
                    Rational nv = vi * vj;
                    if (nv != 0) out.quad_.emplace(k, std::move(nv));
                } else {
                    it->second += vi * vj;
                    if (it->second == 0) out.quad_.erase(it);
                }
            }
        return out;
    }

    bool operator==(const LinExpr& o) const {
        return c0_ == o.c0_ && lin_ == o.lin_ && quad_ == o.quad_;
    }
    bool operator!=(const LinExpr& o) const { return !(*this == o); }

    std::string str() const {
        std::ostringstream os;
        os << qcw::to_string(c0_);
        for (const auto& [k, v] : lin_)
            os << " + " << qcw::to_string(v) << "*U" << k;
        for (const auto& [k, v] : quad_)
            os << " + " << qcw::to_string(v) << "*U" << k.first << "*U" << k.second;
        return os.str();
    }

private:
    LinExpr scaled(const Rational& s) const {
        LinExpr out;
        if (s == 0) return out;
        out.c0_ = c0_ * s;
        for (const auto& [k, v] : lin_) out.lin_[k] = v * s;
        for (const auto& [k, v] : quad_) out.quad_[k] = v * s;
        return out;
    }

    template <class K>
    static void merge(std::map<K, Rational>& into, const std::map<K, Rational>& from) {
        for (const auto& [k, v] : from) {
            auto it = into.find(k);
            if (it == into.end()) {
                into.emplace(k, v);
            } else {
                it->second += v;
                if (it->second == 0) into.erase(it);
            }
        }
    }

    Rational c0_;
    std::map<int, Rational> lin_;
    std::map<Key, Rational> quad_;
};

} // namespace qcw
