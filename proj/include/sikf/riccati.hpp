#pragma once

// Closed-form solution of the frequency-parametrized scalar Riccati
// equation: error power spectral density, Kalman-gain symbol, residual
// verification, closed-loop symbol, high-frequency gain limit, and the
// complete-decentralization matching test.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/parallel.hpp"
#include "sikf/symbols.hpp"

namespace sikf {

/// Uniform symmetric frequency grid [-lambda_max, lambda_max] with n samples
/// (n even, so the origin falls between the two middle samples).
class FrequencyGrid {
public:
    FrequencyGrid(double lambda_max, std::size_t n)
        : lambda_max_(lambda_max), n_(n) {
        if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
            throw input_error("FrequencyGrid: lambda_max must be positive and finite");
        if (n < 2 || n % 2 != 0)
            throw input_error("FrequencyGrid: n must be even and at least 2");
    }

    double lambda_max() const { return lambda_max_; }
    std::size_t size() const { return n_; }
    double spacing() const { return 2.0 * lambda_max_ / static_cast<double>(n_ - 1); }
    double operator[](std::size_t i) const {
        return -lambda_max_ + spacing() * static_cast<double>(i);
    }

private:
    double lambda_max_;
    std::size_t n_;
};

struct SpectralSolution {
    FrequencyGrid grid;
    std::vector<double> p_hat;      // error PSD, positive branch
    std::vector<Complex> l_hat;     // gain symbol
    std::vector<double> residuals;  // normalized Riccati residuals
    double delta_strength = 0.0;    // high-frequency gain limit (NaN if c_hat != 1)
    bool c_identity = true;
};

struct MatchingResult {
    bool matched = false;
    double ell = 0.0;
    double max_residual = 0.0;
};

namespace detail {

struct PointData {
    double q;  // Re(a_hat)
    double b2; // |b_hat|^2
    double c2; // |c_hat|^2
    double g2; // |g_hat|^2
    Complex c; // c_hat
};

inline PointData point_data(const PlantSpec& p, double lambda) {
    PointData d{};
    d.q = eval(p.a_hat, lambda).real();
    d.b2 = std::norm(eval(p.b_hat, lambda));
    d.c = eval(p.c_hat, lambda);
    d.c2 = std::norm(d.c);
    d.g2 = std::norm(eval(p.g_hat, lambda));
    if (d.c2 == 0.0)
        throw singularity_error(
            "psd_error: observation symbol vanishes at lambda = " + std::to_string(lambda),
            Complex(lambda, 0.0));
    if (d.g2 == 0.0)
        throw singularity_error(
            "psd_error: |g_hat|^2 vanishes at lambda = " + std::to_string(lambda),
            Complex(lambda, 0.0));
    return d;
}

// Positive root of  -c2/g2 * p^2 + 2 q p + b2 = 0.  The rationalized form is
// used for q < 0; the direct form would lose up to half the mantissa to
// cancellation at high frequencies.
inline double psd_from_data(const PointData& d) {
    const double w = d.b2 * d.c2 / d.g2;
    const double s = std::sqrt(d.q * d.q + w);
    if (d.q < 0.0) return d.b2 / (s - d.q);
    return (d.g2 / d.c2) * (d.q + s);
}

} // namespace detail

/// Error power spectral density P(lambda): the positive solution of the
/// frequency-parametrized scalar Riccati equation.
inline double psd_error(const PlantSpec& plant, double lambda) {
    return detail::psd_from_data(detail::point_data(plant, lambda));
}

/// Kalman-gain symbol L(lambda) = P(lambda) conj(c_hat) / |g_hat|^2.
/// Real-valued whenever c_hat is the identity.
inline Complex gain_symbol(const PlantSpec& plant, double lambda) {
    const auto d = detail::point_data(plant, lambda);
    return detail::psd_from_data(d) * std::conj(d.c) / d.g2;
}

/// Residual of the power-spectral-density equation at (lambda, p),
/// normalized by max(1, |b_hat|^2) so tolerances are scale-free.
inline double are_residual(const PlantSpec& plant, double lambda, double p) {
    const auto d = detail::point_data(plant, lambda);
    const double lhs = 2.0 * d.q * p + d.b2 - d.c2 / d.g2 * p * p;
    return lhs / std::max(1.0, d.b2);
}

struct ClosedLoopPoint {
    Complex value;
    bool stable = false;
};

/// Closed-loop symbol a_hat - L c_hat with its spectral stability flag.
inline ClosedLoopPoint closed_loop_symbol(const PlantSpec& plant, double lambda) {
    const Complex a = eval(plant.a_hat, lambda);
    const Complex cl = a - gain_symbol(plant, lambda) * eval(plant.c_hat, lambda);
    return {cl, cl.real() < 0.0};
}

/// High-frequency limit of the gain symbol, determined from the degrees and
/// leading coefficients of Re(a_hat) and |b_hat|^2 / |g_hat|^2. This is the
/// strength of the point-supported component of the gain kernel.
/// Throws numerical_error when the limit diverges (the kernel is then not a
/// measure plus a function) and assumption_error unless c_hat == 1.
inline double delta_strength(const PlantSpec& plant) {
    if (!plant.c_is_identity())
        throw assumption_error("delta_strength: requires identity observation symbol");

    const Polynomial q = real_part_poly(plant.a_hat);
    const int dq = q.degree();
    const double q_lead = q.is_zero() ? 0.0 : q.leading().real();

    // ratio |b_hat|^2 / |g_hat|^2 as a rational function of lambda
    const RationalSymbol b2 = squared_magnitude(plant.b_hat);
    const RationalSymbol g2 = squared_magnitude(plant.g_hat);
    const bool ratio_zero = b2.num().is_zero();
    const int r_deg = ratio_zero
                          ? std::numeric_limits<int>::min()
                          : (b2.num().degree() + g2.den().degree()) -
                                (b2.den().degree() + g2.num().degree());
    const double r_lead =
        ratio_zero ? 0.0
                   : (b2.num().leading().real() * g2.den().leading().real()) /
                         (b2.den().leading().real() * g2.num().leading().real());

    const auto diverges = [&]() -> double {
        throw numerical_error(
            "delta_strength: gain symbol diverges at high frequency "
            "(deg Re(a_hat) = " + std::to_string(dq) +
            ", deg |b_hat|^2/|g_hat|^2 = " +
            std::to_string(ratio_zero ? 0 : r_deg) +
            "); kernel is not a measure plus a function");
    };

    if (dq <= 0) {
        const double q0 = dq == 0 ? q.coeffs()[0].real() : 0.0;
        if (ratio_zero || r_deg < 0) return q0 + std::abs(q0);
        if (r_deg == 0) return q0 + std::sqrt(q0 * q0 + r_lead);
        return diverges();
    }
    if (dq % 2 != 0 || q_lead > 0.0) return diverges();

    // Re(a_hat) -> -inf at both ends; the limit is that of ratio / (2 |q|).
    if (ratio_zero || r_deg < dq) return 0.0;
    if (r_deg == dq) return r_lead / (2.0 * std::abs(q_lead));
    return diverges();
}

/// Solve the Riccati equation at every grid point. Points are independent
/// and evaluated with a parallel map; the result is deterministic.
inline SpectralSolution solve_grid(const PlantSpec& plant, const FrequencyGrid& grid) {
    SpectralSolution sol{grid, {}, {}, {}, 0.0, plant.c_is_identity()};
    const std::size_t n = grid.size();
    sol.p_hat.resize(n);
    sol.l_hat.resize(n);
    sol.residuals.resize(n);

    detail::parallel_for(n, [&](std::size_t i) {
        const double lambda = grid[i];
        const auto d = detail::point_data(plant, lambda);
        const double p = detail::psd_from_data(d);
        sol.p_hat[i] = p;
        sol.l_hat[i] = p * std::conj(d.c) / d.g2;
        sol.residuals[i] =
            (2.0 * d.q * p + d.b2 - d.c2 / d.g2 * p * p) / std::max(1.0, d.b2);
    });

    sol.delta_strength = sol.c_identity
                             ? delta_strength(plant)
                             : std::numeric_limits<double>::quiet_NaN();
    return sol;
}

/// Complete-decentralization test: the gain is a pure point mass of weight
/// ell exactly when |b_hat|^2 == ell (ell - 2 Re a_hat) |g_hat|^2 for all
/// frequencies. The candidate ell is the positive root of the lambda = 0
/// equation; the identity is then checked across the grid.
inline MatchingResult matching_test(const PlantSpec& plant, const FrequencyGrid& grid,
                                    double tol = 1e-9) {
    if (!plant.c_is_identity())
        throw assumption_error("matching_test: requires identity observation symbol");
    if (!(tol > 0.0)) throw input_error("matching_test: tol must be positive");

    const auto d0 = detail::point_data(plant, 0.0);
    const double ell = d0.q + std::sqrt(d0.q * d0.q + d0.b2 / d0.g2);

    MatchingResult res;
    res.ell = ell;
    if (!(ell > 0.0)) {
        // b_hat == 0 degenerates to the open-loop predictor; report unmatched.
        res.matched = false;
        return res;
    }

    double max_res = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto d = detail::point_data(plant, grid[i]);
        const double rhs = ell * (ell - 2.0 * d.q) * d.g2;
        const double scale = std::max({1.0, d.b2, std::abs(rhs)});
        max_res = std::max(max_res, std::abs(d.b2 - rhs) / scale);
    }
    res.max_residual = max_res;
    res.matched = max_res <= tol;
    return res;
}

} // namespace sikf
