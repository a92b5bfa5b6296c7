#pragma once

// Complex polynomial root finding: eigenvalues of the balanced companion
// matrix of the monic-normalized polynomial, followed by one Newton polish
// per root on the original coefficients. Adequate for the degrees (<= ~32)
// occurring in radicand and validation work.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "sikf/errors.hpp"

namespace sikf {

using Complex = std::complex<double>;

namespace detail {

/// Horner evaluation returning p(z) and p'(z).
inline std::pair<Complex, Complex> eval_with_derivative(
    const std::vector<Complex>& c, Complex z) {
    Complex p = 0.0, dp = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[i];
    }
    return {p, dp};
}

// Osborne-style radix-2 balancing of a general complex matrix. Scaling by
// powers of two is exact, so eigenvalue accuracy can only improve.
inline void balance_in_place(Eigen::MatrixXcd& a) {
    const Eigen::Index n = a.rows();
    bool changed = true;
    for (int sweep = 0; sweep < 32 && changed; ++sweep) {
        changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                r += std::abs(a(i, j));
                c += std::abs(a(j, i));
            }
            if (r == 0.0 || c == 0.0) continue;
            const double s = r + c;
            double f = 1.0;
            while (c < r / 2.0) {
                f *= 2.0;
                c *= 2.0;
                r /= 2.0;
            }
            while (c >= r * 2.0) {
                f /= 2.0;
                c /= 2.0;
                r *= 2.0;
            }
            if (c + r < 0.95 * s) {
                changed = true;
                a.row(i) *= 1.0 / f;
                a.col(i) *= f;
            }
        }
    }
}

inline void polish_root(const std::vector<Complex>& c, Complex& z) {
    auto [p, dp] = eval_with_derivative(c, z);
    double best = std::abs(p);
    for (int it = 0; it < 3; ++it) {
        if (best == 0.0 || std::abs(dp) == 0.0) return;
        const Complex cand = z - p / dp;
        auto [pc, dpc] = eval_with_derivative(c, cand);
        const double val = std::abs(pc);
        if (!(val < best)) return;
        z = cand;
        best = val;
        p = pc;
        dp = dpc;
    }
}

} // namespace detail

/// All complex roots (with multiplicity) of the polynomial with the given
/// ascending coefficients. Coefficients below 1e-13 of the largest are
/// treated as zero when determining the degree.
inline std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
    double max_abs = 0.0;
    for (const auto& c : coeffs) max_abs = std::max(max_abs, std::abs(c));
    if (max_abs == 0.0) return {};

    while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-13 * max_abs)
        coeffs.pop_back();

    std::vector<Complex> roots;
    // Exact zero constant terms are roots at the origin.
    std::size_t shift = 0;
    while (shift + 1 < coeffs.size() && coeffs[shift] == 0.0) ++shift;
    for (std::size_t i = 0; i < shift; ++i) roots.push_back(0.0);
    if (shift > 0) coeffs.erase(coeffs.begin(), coeffs.begin() + shift);

    const std::size_t deg = coeffs.size() - 1;
    if (deg == 0) return roots;
    if (deg == 1) {
        roots.push_back(-coeffs[0] / coeffs[1]);
        return roots;
    }
    if (deg == 2) {
        const Complex a = coeffs[2], b = coeffs[1], c = coeffs[0];
        Complex s = std::sqrt(b * b - 4.0 * a * c);
        if (std::real(std::conj(b) * s) < 0.0) s = -s;
        const Complex q = -0.5 * (b + s);
        Complex r1 = q / a;
        Complex r2 = std::abs(q) > 0.0 ? c / q : -b / a - r1;
        detail::polish_root(coeffs, r1);
        detail::polish_root(coeffs, r2);
        roots.push_back(r1);
        roots.push_back(r2);
        return roots;
    }

    const std::size_t n = deg;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        companion(i, n - 1) = -coeffs[i] / coeffs[n];
    detail::balance_in_place(companion);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw numerical_error("polynomial_roots: eigenvalue iteration failed");

    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        Complex z = solver.eigenvalues()(i);
        detail::polish_root(coeffs, z);
        roots.push_back(z);
    }
    return roots;
}

/// Design rule shared by validation and locus code: a computed root counts
/// as real when its imaginary part is below 1e-9 * (1 + |root|).
inline bool root_is_real(Complex z) {
    return std::abs(z.imag()) < 1e-9 * (1.0 + std::abs(z));
}

} // namespace sikf
