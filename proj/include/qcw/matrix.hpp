#pragma once

#include <vector>

#include "qcw/poly.hpp"
#include "qcw/upoly.hpp"

namespace qcw {

inline Rational exact_divide(const Rational& a, const Rational& b) {
    if (b == 0) throw AlgebraError("exact division by zero");
    return a / b;
}

// Exact long division in T[t] for a domain T that itself supports
// exact_divide; throws when the division is not exact.
template <class T>
UPoly<T> exact_divide(const UPoly<T>& a, const UPoly<T>& b) {
    if (b.is_zero()) throw AlgebraError("exact division by zero polynomial");
    UPoly<T> q, r = a;
    while (!r.is_zero() && r.degree() >= b.degree()) {
        T factor = exact_divide(r.leading(), b.leading());
        UPoly<T> t = UPoly<T>::term(std::move(factor),
                                    static_cast<std::size_t>(r.degree() - b.degree()));
        q += t;
        r -= t * b;
    }
    if (!r.is_zero()) throw AlgebraError("polynomial division is not exact");
    return q;
}

template <class T>
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, const T& fill)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& at(std::size_t i, std::size_t j) { return data_.at(i * cols_ + j); }
    const T& at(std::size_t i, std::size_t j) const { return data_.at(i * cols_ + j); }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw AlgebraError("matrix shape mismatch");
        Matrix out(a.rows_, b.cols_, a.data_.front() - a.data_.front());
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k)
                for (std::size_t j = 0; j < b.cols_; ++j)
                    out.at(i, j) = out.at(i, j) + a.at(i, k) * b.at(k, j);
        return out;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw AlgebraError("matrix shape mismatch");
        Matrix out = a;
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            out.data_[i] = out.data_[i] + b.data_[i];
        return out;
    }

    std::vector<T> apply(const std::vector<T>& v) const {
        if (v.size() != cols_) throw AlgebraError("matrix/vector shape mismatch");
        std::vector<T> out;
        out.reserve(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            T acc = data_.front() - data_.front();
            for (std::size_t j = 0; j < cols_; ++j) acc = acc + at(i, j) * v[j];
            out.push_back(std::move(acc));
        }
        return out;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_, cols_;
    std::vector<T> data_;
};

// Fraction-free determinant (Bareiss).  Valid over any integral domain with
// an exact_divide; every intermediate division is exact.
template <class T>
T det_bareiss(Matrix<T> m) {
    if (m.rows() != m.cols()) throw AlgebraError("determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) throw AlgebraError("determinant of empty matrix");
    const T zero = m.at(0, 0) - m.at(0, 0);
    if (n == 1) return m.at(0, 0);
    bool negate = false;
    T prev = zero; // previous pivot; replaced by 1-division skip on first step
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == zero) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m.at(swap_row, k) == zero) ++swap_row;
            if (swap_row == n) return zero;
            for (std::size_t j = 0; j < n; ++j)
                std::swap(m.at(k, j), m.at(swap_row, j));
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                T num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                m.at(i, j) = (k == 0) ? std::move(num) : exact_divide(num, prev);
            }
            m.at(i, k) = zero;
        }
        prev = m.at(k, k);
    }
    T det = m.at(n - 1, n - 1);
    return negate ? -det : det;
}

// Cofactor-expansion determinant; exponential, but valid over every
// commutative ring (used as a cross-check and for rings with nilpotents).
template <class T>
T det_cofactor(const Matrix<T>& m) {
    if (m.rows() != m.cols()) throw AlgebraError("determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 1) return m.at(0, 0);
    const T zero = m.at(0, 0) - m.at(0, 0);
    T acc = zero;
    for (std::size_t j = 0; j < n; ++j) {
        if (m.at(0, j) == zero) continue;
        Matrix<T> minor(n - 1, n - 1, zero);
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor.at(i - 1, cc++) = m.at(i, c);
            }
        }
        T term = m.at(0, j) * det_cofactor(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

// Multiplicative identity in T, synthesized from a zero sample (a generic
// ring element cannot be built from "1" without context such as the carrier
// ring).  Declared before char_poly so ordinary lookup finds the overloads
// for types living outside this namespace.
inline Rational one_like(const Rational&) { return Rational(1); }
inline JetPoly one_like(const JetPoly& zero) {
    return JetPoly::constant(zero.ring(), Rational(1));
}

// Characteristic polynomial det(t*I - M) by the Faddeev–LeVerrier scheme,
// which needs only ring operations and division by integer scalars and is
// therefore valid over any commutative Q-algebra (nilpotents included).
// Coefficients ascending, including the leading 1: result[n] = one_like.
// Returned as a plain vector so that coefficient types without a default
// constructor are usable too.
template <class T>
std::vector<T> char_poly_coeffs(const Matrix<T>& m) {
    if (m.rows() != m.cols()) throw AlgebraError("characteristic polynomial of non-square matrix");
    const std::size_t n = m.rows();
    const T zero = m.at(0, 0) - m.at(0, 0);
    // Track N = M * (previous auxiliary), c_k = -tr(N)/k, aux = N + c_k I.
    Matrix<T> aux = m; // k = 1: N = M
    std::vector<T> cs; // c_1..c_n
    for (std::size_t k = 1; k <= n; ++k) {
        T tr = zero;
        for (std::size_t i = 0; i < n; ++i) tr = tr + aux.at(i, i);
        T ck = tr * Rational(-1, static_cast<long>(k));
        cs.push_back(ck);
        if (k == n) break;
        for (std::size_t i = 0; i < n; ++i) aux.at(i, i) = aux.at(i, i) + ck;
        aux = m * aux;
    }
    std::vector<T> out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(cs[n - 1 - i]); // t^0 .. t^{n-1}
    out.push_back(one_like(zero));
    return out;
}

template <class T>
UPoly<T> char_poly(const Matrix<T>& m) {
    return UPoly<T>(char_poly_coeffs(m));
}

} // namespace qcw
