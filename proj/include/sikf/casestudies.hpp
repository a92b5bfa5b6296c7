#pragma once

// Built-in plant families: diffusion on the real line (white and spatially
// autocorrelated measurement noise) and the linearized Swift-Hohenberg
// equation. Each constructor returns the plant together with its
// dimensionless groups and the closed-form quantities known for the family
// (branch points, decay rate, point-mass strength, variance). These are the
// test anchors for the numerical machinery.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/perf.hpp"
#include "sikf/symbols.hpp"

namespace sikf {

enum class CaseKind { diffusion_white, diffusion_correlated, swift_hohenberg };

inline std::string to_string(CaseKind k) {
    switch (k) {
        case CaseKind::diffusion_white: return "diffusion-white";
        case CaseKind::diffusion_correlated: return "diffusion-correlated";
        case CaseKind::swift_hohenberg: return "swift-hohenberg";
    }
    return "?";
}

struct DimensionlessGroups {
    double l_star = 0.0;  // information lengthscale
    double pi_star = 0.0; // ratio of the problem's two lengthscales (0 if only one)
    std::string pi_definition;
};

/// Closed-form reference values for a case study, evaluated at construction.
/// Dimensionless quantities refer to frequencies scaled by l_star; the
/// dimensional decay rate is theta = theta_dimensionless / l_star.
struct CaseOracle {
    std::vector<Complex> branch_points; // dimensional z_i
    double theta = 0.0;                 // dimensional min |Re z_i|
    double theta_dimensionless = 0.0;
    double delta_strength = 0.0;
    double delta_strength_dimensionless = 0.0;
    std::optional<double> var_e; // closed form where the family provides one
    bool matched = false;        // completely decentralized
    std::optional<double> ell;   // point-mass gain when matched

    // Swift-Hohenberg extras: real parts and radii of the two branch-point
    // circles (dimensionless).
    std::optional<double> omega;
    std::optional<double> inner_radius;
    std::optional<double> outer_radius;
};

struct CaseStudy {
    CaseKind kind = CaseKind::diffusion_white;
    PlantSpec plant;
    DimensionlessGroups groups;
    CaseOracle oracle;
    // constructor parameters (unused ones stay zero)
    double kappa = 0.0, sigma_w = 0.0, sigma_v = 0.0, l_v = 0.0, l_a = 0.0;
};

// ---------------------------------------------------------------------------
// Monomial-family closed forms (shared by the diffusion oracle and tests)

/// Decay rate of the gain kernel for a_hat = -|a| lambda^(2n) with constant
/// noise scalings: sin(pi/4n) (sigma_w / |a| sigma_v)^(1/2n).
inline double monomial_theta(int n, double a_abs, double sigma_w, double sigma_v) {
    if (n < 1 || !(a_abs > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0))
        throw input_error("monomial_theta: invalid parameters");
    return std::sin(std::numbers::pi / (4.0 * n)) *
           std::pow(sigma_w / (a_abs * sigma_v), 1.0 / (2.0 * n));
}

/// The 4n finite branch points of the monomial radicand: modulus
/// (sigma_w/|a| sigma_v)^(1/2n), arguments (2k+1) pi / 4n.
inline std::vector<Complex> monomial_branch_points(int n, double a_abs,
                                                   double sigma_w, double sigma_v) {
    if (n < 1 || !(a_abs > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0))
        throw input_error("monomial_branch_points: invalid parameters");
    const double rho = std::pow(sigma_w / (a_abs * sigma_v), 1.0 / (2.0 * n));
    std::vector<Complex> pts;
    pts.reserve(static_cast<std::size_t>(4 * n));
    for (int k = 0; k < 4 * n; ++k)
        pts.push_back(std::polar(rho, (2.0 * k + 1.0) * std::numbers::pi / (4.0 * n)));
    return pts;
}

/// Monomial plant a_hat = -|a| lambda^(2n), b_hat = sigma_w, g_hat = sigma_v.
inline PlantSpec monomial_plant(int n, double a_abs, double sigma_w, double sigma_v) {
    if (n < 1 || !(a_abs > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0))
        throw input_error("monomial_plant: invalid parameters");
    std::vector<Complex> coeffs(static_cast<std::size_t>(2 * n + 1), 0.0);
    coeffs.back() = -a_abs;
    PlantSpec p;
    p.a_hat = Polynomial(std::move(coeffs));
    p.b_hat = RationalSymbol::constant(sigma_w);
    p.g_hat = RationalSymbol::constant(sigma_v);
    return p;
}

// ---------------------------------------------------------------------------
// Case-study constructors

/// Diffusion with scaled white noises: a_hat = -kappa lambda^2,
/// l* = (2 kappa sigma_v / sigma_w)^(1/2), theta = 1/l*.
inline CaseStudy diffusion_white(double kappa, double sigma_w, double sigma_v) {
    if (!(kappa > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0))
        throw input_error("diffusion_white: parameters must be positive");
    CaseStudy cs;
    cs.kind = CaseKind::diffusion_white;
    cs.kappa = kappa;
    cs.sigma_w = sigma_w;
    cs.sigma_v = sigma_v;
    cs.plant = monomial_plant(1, kappa, sigma_w, sigma_v);
    cs.plant.labels["family"] = "diffusion-white";

    cs.groups.l_star = std::sqrt(2.0 * kappa * sigma_v / sigma_w);
    cs.groups.pi_star = 0.0;
    cs.groups.pi_definition = "none (single lengthscale)";

    cs.oracle.branch_points = monomial_branch_points(1, kappa, sigma_w, sigma_v);
    cs.oracle.theta = monomial_theta(1, kappa, sigma_w, sigma_v);
    cs.oracle.theta_dimensionless = 1.0;
    cs.oracle.delta_strength = 0.0;
    cs.oracle.delta_strength_dimensionless = 0.0;
    cs.oracle.var_e = closed_form_diffusion(kappa, sigma_w, sigma_v);
    return cs;
}

namespace detail {

/// Dimensionless decay rate of the correlated-noise diffusion family.
/// Both branch expressions are evaluated in rationalized (cancellation-free)
/// form; at pi_star = 1 they agree at sqrt(2).
inline double correlated_theta_dimensionless(double pi_star) {
    const double p2 = pi_star * pi_star;
    if (pi_star < 1.0) return std::sqrt(1.0 + p2);
    return std::sqrt(2.0 / (p2 + std::sqrt(p2 * p2 - 1.0)));
}

inline std::vector<Complex> correlated_branch_points_dimensionless(double pi_star) {
    const double p2 = pi_star * pi_star;
    std::vector<Complex> z;
    if (pi_star < 1.0) {
        const double re = std::sqrt(1.0 + p2);
        const double im = std::sqrt(1.0 - p2);
        z = {{re, im}, {re, -im}, {-re, im}, {-re, -im}};
    } else {
        const double s = std::sqrt(p2 * p2 - 1.0);
        const double outer = std::sqrt(2.0 * (p2 + s));
        const double inner = std::sqrt(2.0 / (p2 + s));
        z = {{outer, 0.0}, {-outer, 0.0}, {inner, 0.0}, {-inner, 0.0}};
    }
    return z;
}

} // namespace detail

/// Diffusion with spatially autocorrelated measurement noise:
/// |g_hat|^2 = sigma_v^2 / (1 + l_v^2 lambda^2), realized by the
/// minimum-phase factor g_hat = sigma_v / (1 + i l_v lambda).
/// pi_star = l_v / l*; pi_star = 1 is the matching point where the filter
/// is completely decentralized with gain sigma_w / sigma_v.
inline CaseStudy diffusion_correlated(double kappa, double sigma_w, double sigma_v,
                                      double l_v) {
    if (!(kappa > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0) || l_v < 0.0)
        throw input_error("diffusion_correlated: invalid parameters");
    CaseStudy cs;
    cs.kind = CaseKind::diffusion_correlated;
    cs.kappa = kappa;
    cs.sigma_w = sigma_w;
    cs.sigma_v = sigma_v;
    cs.l_v = l_v;

    cs.plant = monomial_plant(1, kappa, sigma_w, sigma_v);
    cs.plant.g_hat = RationalSymbol(Polynomial::constant(sigma_v),
                                    Polynomial({1.0, Complex(0.0, l_v)}));
    cs.plant.labels["family"] = "diffusion-correlated";

    const double l_star = std::sqrt(2.0 * kappa * sigma_v / sigma_w);
    const double pi_star = l_v / l_star;
    cs.groups.l_star = l_star;
    cs.groups.pi_star = pi_star;
    cs.groups.pi_definition = "l_v / l*";

    const double theta_dl = detail::correlated_theta_dimensionless(pi_star);
    cs.oracle.theta_dimensionless = theta_dl;
    cs.oracle.theta = theta_dl / l_star;
    for (const Complex& z : detail::correlated_branch_points_dimensionless(pi_star))
        cs.oracle.branch_points.push_back(z / l_star);
    cs.oracle.delta_strength_dimensionless = 2.0 * pi_star * pi_star;
    cs.oracle.delta_strength = sigma_w / sigma_v * pi_star * pi_star;
    cs.oracle.matched = std::abs(l_v - l_star) <= 1e-12 * l_star;
    if (cs.oracle.matched) cs.oracle.ell = sigma_w / sigma_v;
    return cs;
}

namespace detail {

/// Real parts of the Swift-Hohenberg branch points in rationalized form.
/// u = 1/pi_star^2; inner circle: Omega, outer circle: Theta (< Omega).
inline double sh_omega(double u) {
    const double a = 1.0 - u;
    const double s = std::sqrt(a * a + 1.0);
    return a >= 0.0 ? std::sqrt(0.5 * (a + s)) : std::sqrt(0.5 / (s - a));
}

inline double sh_theta(double u) {
    const double a = 1.0 + u;
    const double s = std::sqrt(a * a + 1.0);
    return std::sqrt(0.5 / (a + s));
}

} // namespace detail

/// Linearized Swift-Hohenberg: a_hat = -(lambda^2 - 1/l_a^2)^2 with white
/// noises; l* = (2 sigma_v / sigma_w)^(1/4), pi_star = l_a / l*. The hidden
/// leading coefficient is 1 with units length^4/time (recorded in labels).
inline CaseStudy swift_hohenberg(double l_a, double sigma_w, double sigma_v) {
    if (!(l_a > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0))
        throw input_error("swift_hohenberg: parameters must be positive");
    CaseStudy cs;
    cs.kind = CaseKind::swift_hohenberg;
    cs.l_a = l_a;
    cs.sigma_w = sigma_w;
    cs.sigma_v = sigma_v;

    const double s = 1.0 / (l_a * l_a);
    cs.plant.a_hat = Polynomial({-s * s, 0.0, 2.0 * s, 0.0, -1.0});
    cs.plant.b_hat = RationalSymbol::constant(sigma_w);
    cs.plant.g_hat = RationalSymbol::constant(sigma_v);
    cs.plant.labels["family"] = "swift-hohenberg";
    cs.plant.labels["a"] = "1 [length^4/time]";

    const double l_star = std::pow(2.0 * sigma_v / sigma_w, 0.25);
    const double pi_star = l_a / l_star;
    cs.groups.l_star = l_star;
    cs.groups.pi_star = pi_star;
    cs.groups.pi_definition = "l_a / l*";

    const double u = 1.0 / (pi_star * pi_star);
    const double omega = detail::sh_omega(u);
    const double theta = detail::sh_theta(u);
    cs.oracle.omega = omega;
    cs.oracle.theta_dimensionless = theta;
    cs.oracle.theta = theta / l_star;
    cs.oracle.inner_radius = std::pow((1.0 - u) * (1.0 - u) + 1.0, 0.25);
    cs.oracle.outer_radius = std::pow((1.0 + u) * (1.0 + u) + 1.0, 0.25);
    for (double re : {omega, theta}) {
        const double im = 0.5 / re;
        for (const Complex z : {Complex(re, im), Complex(re, -im),
                                Complex(-re, im), Complex(-re, -im)})
            cs.oracle.branch_points.push_back(z / l_star);
    }
    cs.oracle.delta_strength = 0.0;
    cs.oracle.delta_strength_dimensionless = 0.0;
    return cs;
}

/// Limit of the dimensionless Swift-Hohenberg decay rate as pi_star -> inf
/// (the quartic-monomial regime): sqrt((sqrt(2) - 1) / 2).
inline double swift_hohenberg_theta_limit() {
    return std::sqrt(0.5 * (std::sqrt(2.0) - 1.0));
}

// ---------------------------------------------------------------------------
// Non-dimensionalization

/// Scales mapping a dimensional solution onto the dimensionless one:
///   Lambda = lambda * lambda_scale,      X = x / lambda_scale,
///   L_dim(lambda) = gain_scale * L_dimless(Lambda),
///   P_dim(lambda) = psd_scale * P_dimless(Lambda).
struct NondimensionalMap {
    double lambda_scale = 1.0; // = l_star
    double gain_scale = 1.0;   // = sigma_w / (2 sigma_v)
    double psd_scale = 1.0;    // = sigma_w sigma_v / 2
};

struct Nondimensionalized {
    CaseStudy study; // unit-scale plant with the same pi_star
    NondimensionalMap map;
};

/// Dimensionless counterpart of a case study: unit diffusivity/lengthscale
/// and noise scalings (sigma_w = 2, sigma_v = 1), leaving pi_star as the
/// only parameter.
inline Nondimensionalized nondimensionalize(const CaseStudy& cs) {
    Nondimensionalized out;
    switch (cs.kind) {
        case CaseKind::diffusion_white:
            out.study = diffusion_white(1.0, 2.0, 1.0);
            break;
        case CaseKind::diffusion_correlated:
            out.study = diffusion_correlated(1.0, 2.0, 1.0, cs.groups.pi_star);
            break;
        case CaseKind::swift_hohenberg:
            out.study = swift_hohenberg(cs.groups.pi_star, 2.0, 1.0);
            break;
    }
    out.map.lambda_scale = cs.groups.l_star;
    out.map.gain_scale = cs.sigma_w / (2.0 * cs.sigma_v);
    out.map.psd_scale = cs.sigma_w * cs.sigma_v / 2.0;
    return out;
}

} // namespace sikf
