#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "qcw/rational.hpp"
#include "qcw/upoly.hpp"

namespace qcw {

struct NumericRoot {
    std::complex<double> value;
    double error_bound; // a-posteriori radius certified to contain a true root
};

struct NumericRootResult {
    std::vector<NumericRoot> roots;
    bool converged = false;
    // True when the error disks are pairwise disjoint with margin, so the
    // roots are certifiably pairwise distinct.
    bool separation_certified = false;
    int iterations = 0;
};

struct AberthOptions {
    int max_iterations = 400;
    double tolerance = 1e-13;
};

// Simultaneous root refinement (Aberth–Ehrlich) for a univariate rational
// polynomial, with a-posteriori error radii
//     r_i = n |p(z_i)| / |lc * prod_{j != i} (z_i - z_j)|,
// each disk |z - z_i| <= r_i containing at least one true root.  When the
// disks are pairwise disjoint (with a factor-2 margin) every disk contains
// exactly one root, certifying pairwise distinctness.  Precision failures
// are reported through the flags, never rounded away.
inline NumericRootResult numeric_roots(const UPoly<Rational>& p,
                                       const AberthOptions& opt = {}) {
    NumericRootResult out;
    const int n = p.degree();
    if (n <= 0) return out;

    std::vector<std::complex<double>> c(n + 1);
    for (int i = 0; i <= n; ++i)
        c[i] = std::complex<double>(static_cast<double>(p.coeff(i)), 0.0);

    auto eval = [&](std::complex<double> z, std::complex<double>& dp) {
        std::complex<double> v = c[n];
        dp = 0.0;
        for (int i = n - 1; i >= 0; --i) {
            dp = dp * z + v;
            v = v * z + c[i];
        }
        return v;
    };

    // Cauchy-style inclusion radius for initial placement.
    double lead = std::abs(c[n]);
    double radius = 0.0;
    for (int i = 0; i < n; ++i)
        radius = std::max(radius, std::abs(c[i]) / lead);
    radius = 1.0 + radius;

    std::vector<std::complex<double>> z(n);
    const double golden_angle = 2.399963229728653;
    for (int i = 0; i < n; ++i) {
        double ang = golden_angle * (i + 1) + 0.7;
        double rad = radius * (0.6 + 0.35 * (i + 1) / n);
        z[i] = std::polar(rad, ang);
    }

    bool converged = false;
    int it = 0;
    for (; it < opt.max_iterations && !converged; ++it) {
        converged = true;
        for (int i = 0; i < n; ++i) {
            std::complex<double> dp;
            std::complex<double> v = eval(z[i], dp);
            if (std::abs(v) == 0.0) continue;
            std::complex<double> w = (dp == std::complex<double>(0.0)) ? v : v / dp;
            std::complex<double> s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            std::complex<double> denom = 1.0 - w * s;
            std::complex<double> corr = (denom == std::complex<double>(0.0)) ? w : w / denom;
            z[i] -= corr;
            if (std::abs(corr) > opt.tolerance * (1.0 + std::abs(z[i])))
                converged = false;
        }
    }
    out.converged = converged;
    out.iterations = it;

    out.roots.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::complex<double> dp;
        std::complex<double> v = eval(z[i], dp);
        double prod = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) prod *= std::abs(z[i] - z[j]);
        double bound = (prod == 0.0) ? std::numeric_limits<double>::infinity()
                                     : n * std::abs(v) / (lead * prod);
        out.roots.push_back({z[i], bound});
    }

    bool separated = converged;
    for (int i = 0; i < n && separated; ++i) {
        if (!std::isfinite(out.roots[i].error_bound)) { separated = false; break; }
        for (int j = i + 1; j < n; ++j) {
            double dist = std::abs(out.roots[i].value - out.roots[j].value);
            if (!(dist > 2.0 * (out.roots[i].error_bound + out.roots[j].error_bound))) {
                separated = false;
                break;
            }
        }
    }
    out.separation_certified = separated;
    return out;
}

} // namespace qcw
