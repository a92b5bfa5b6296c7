#pragma once

// Physical-space reconstruction of the gain kernel from its Fourier symbol.
// The point-supported component (strength = high-frequency symbol limit) is
// separated first; the regular part is recovered by an FFT approximation of
// (1/2pi) \int (L(lambda) - c_inf) e^{i lambda x} d lambda on the sampling
// grid. Also: spatial truncation, exponential decay-rate fitting, and
// normalized-variance (uncertainty) diagnostics.

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/locus.hpp"
#include "sikf/riccati.hpp"
#include "sikf/symbols.hpp"

namespace sikf {

/// Regular part of a reconstructed kernel on a uniform, origin-centered
/// spatial grid, plus the separated point-mass strength and the provenance
/// of the frequency grid it came from.
struct KernelSamples {
    std::vector<double> xs;     // ascending, x = m * dx for m = -n/2 .. n/2-1
    std::vector<double> values; // regular part
    double delta_strength = 0.0;
    double lambda_max = 0.0;
    std::size_t n = 0;
    double imag_residue = 0.0;  // max |Im| / max |Re| discarded after checks
    double edge_residual = 0.0; // |symbol - c_inf| at the grid edge
    std::optional<double> truncation_radius;
    std::optional<double> retained_mass;

    double dx() const { return xs.size() > 1 ? xs[1] - xs[0] : 0.0; }
    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

struct DecayFit {
    double theta_hat = 0.0; // fitted exponential rate (-slope of ln|L|)
    double window_lo = 0.0;
    double window_hi = 0.0;
    double r_squared = 0.0;
    double theta_ref = 0.0;
    std::size_t n_points = 0;
};

struct NormalizedVariance {
    double center = 0.0;
    double variance = 0.0;
};

struct HeisenbergReport {
    NormalizedVariance space; // of the regular kernel
    NormalizedVariance freq;  // of the symbol minus its limit
    double product = 0.0;
    /// variance / l*^2 for plants of the monomial family (scaling diagnostic)
    std::optional<double> space_variance_over_lstar_sq;
};

namespace detail {

inline double kernel_dx(const FrequencyGrid& grid) {
    return 2.0 * std::numbers::pi /
           (static_cast<double>(grid.size()) * grid.spacing());
}

} // namespace detail

/// Inverse transform of symbol samples minus c_inf on the given grid.
/// Sample m of the output sits at x_m = 2 pi m / (N d_lambda):
///   L(x_m) = d_lambda/(2 pi) (-1)^m e^{i pi m / N} F_(m mod N),
/// where F is the unscaled inverse DFT of the samples. The phase factors
/// account for the grid starting at -lambda_max; they are evaluated in
/// reduced form so no precision is lost at large m.
///
/// With enforce_edge_decay set, requires |symbol - c_inf| at the grid edge
/// to be below 1e-8 of its maximum (grid_error otherwise). The imaginary
/// residue and even symmetry of the result are always checked at 1e-10
/// relative; a violation indicates a non-identity observation symbol or an
/// asymmetric grid.
inline KernelSamples kernel_from_samples(const FrequencyGrid& grid,
                                         const std::vector<Complex>& symbol_values,
                                         double c_infinity,
                                         bool enforce_edge_decay = true) {
    const std::size_t n = grid.size();
    if (symbol_values.size() != n)
        throw input_error("kernel_from_samples: value count does not match grid");
    if (!std::isfinite(c_infinity))
        throw numerical_error("kernel_from_samples: point-mass strength is not finite");

    std::vector<Complex> f(n);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = symbol_values[i] - c_infinity;
        max_abs = std::max(max_abs, std::abs(f[i]));
    }
    const double edge = std::max(std::abs(f.front()), std::abs(f.back()));
    if (enforce_edge_decay && max_abs > 0.0 && edge > 1e-8 * max_abs)
        throw grid_error(
            "kernel_from_samples: symbol has not decayed at the grid edge "
            "(|edge|/max = " + std::to_string(edge / max_abs) +
            "); increase lambda_max");

    std::vector<Complex> F;
    Eigen::FFT<double> fft;
    fft.inv(F, f); // (1/N) sum_j f_j e^{+2 pi i j m / N}

    const double dl = grid.spacing();
    const double dx = detail::kernel_dx(grid);
    const double amp = dl * static_cast<double>(n) / (2.0 * std::numbers::pi);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n / 2);

    KernelSamples k;
    k.xs.resize(n);
    k.values.resize(n);
    k.delta_strength = c_infinity;
    k.lambda_max = grid.lambda_max();
    k.n = n;
    k.edge_residual = edge;

    double max_im = 0.0, max_re = 0.0;
    for (std::ptrdiff_t m = -half; m < half; ++m) {
        const std::size_t slot = static_cast<std::size_t>(m + half);
        const std::size_t src = static_cast<std::size_t>(m >= 0 ? m : m + static_cast<std::ptrdiff_t>(n));
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const Complex phase =
            std::polar(1.0, std::numbers::pi * static_cast<double>(m) /
                                static_cast<double>(n));
        const Complex v = amp * sign * phase * F[src];
        k.xs[slot] = static_cast<double>(m) * dx;
        k.values[slot] = v.real();
        max_im = std::max(max_im, std::abs(v.imag()));
        max_re = std::max(max_re, std::abs(v.real()));
    }
    k.imag_residue = max_re > 0.0 ? max_im / max_re : 0.0;
    if (k.imag_residue > 1e-10)
        throw grid_error("kernel_from_samples: imaginary residue " +
                         std::to_string(k.imag_residue) +
                         " exceeds 1e-10; symmetry violation (non-identity "
                         "observation symbol or asymmetric grid)");
    if (max_re > 0.0) {
        double max_asym = 0.0;
        for (std::size_t m = 1; m < n / 2; ++m)
            max_asym = std::max(
                max_asym, std::abs(k.values[half + static_cast<std::ptrdiff_t>(m)] -
                                   k.values[half - static_cast<std::ptrdiff_t>(m)]));
        if (max_asym / max_re > 1e-10)
            throw grid_error("kernel_from_samples: even-symmetry violation of " +
                             std::to_string(max_asym / max_re) + " relative");
    }
    return k;
}

/// Kernel of the gain operator from a solved spectral grid.
inline KernelSamples inverse_transform(const SpectralSolution& sol,
                                       bool enforce_edge_decay = true) {
    if (!sol.c_identity)
        throw assumption_error(
            "inverse_transform: requires identity observation symbol");
    return kernel_from_samples(sol.grid, sol.l_hat, sol.delta_strength,
                               enforce_edge_decay);
}

/// Frequency grid adequate for kernel reconstruction of this plant:
/// lambda_max grows from 40 * theta_scale until the symbol minus its limit
/// has decayed below 1e-8 of its maximum at the edge, and the spacing keeps
/// the spatial alias period well past the resolvable kernel tail.
inline FrequencyGrid default_kernel_grid(const PlantSpec& plant,
                                         double theta_scale,
                                         std::size_t max_log2_n = 22) {
    if (!(theta_scale > 0.0) || !std::isfinite(theta_scale))
        throw input_error("default_kernel_grid: theta_scale must be positive and finite");
    const double c_inf = delta_strength(plant);

    double lmax = 40.0 * theta_scale;
    double max_abs = 0.0;
    for (int iter = 0;; ++iter) {
        if (iter > 40)
            throw grid_error("default_kernel_grid: symbol does not decay; "
                             "no adequate lambda_max found");
        max_abs = 0.0;
        for (int i = 0; i <= 512; ++i) {
            const double lam = lmax * static_cast<double>(i) / 512.0;
            max_abs = std::max({max_abs,
                                std::abs(gain_symbol(plant, lam) - c_inf),
                                std::abs(gain_symbol(plant, -lam) - c_inf)});
        }
        if (max_abs == 0.0) break; // completely decentralized: any grid works
        const double edge = std::max(std::abs(gain_symbol(plant, lmax) - c_inf),
                                     std::abs(gain_symbol(plant, -lmax) - c_inf));
        if (edge <= 1e-8 * max_abs) break;
        lmax *= 2.0;
    }

    std::size_t n = std::size_t{1} << 16;
    const double target_spacing = theta_scale / 8.0;
    while (2.0 * lmax / static_cast<double>(n - 1) > target_spacing &&
           n < (std::size_t{1} << max_log2_n))
        n <<= 1;
    return FrequencyGrid(lmax, n);
}

/// Solve + reconstruct with automatically chosen grid (unless given).
inline KernelSamples reconstruct_kernel(const PlantSpec& plant,
                                        std::optional<FrequencyGrid> grid = {}) {
    if (!grid) {
        // For a decentralized plant the symbol is constant and any scale works.
        const double rate = decay_rate(plant);
        grid = default_kernel_grid(plant, std::isfinite(rate) ? rate : 1.0);
    }
    return inverse_transform(solve_grid(plant, *grid));
}

/// Zero the regular part beyond |x| > radius, keeping the point mass.
/// Records the fraction of integral \int |L| retained inside the window.
inline KernelSamples truncate(const KernelSamples& k, double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw input_error("truncate: radius must be nonnegative and finite");
    KernelSamples out = k;
    double total = 0.0, kept = 0.0;
    for (std::size_t i = 0; i < k.values.size(); ++i) {
        const double mass = std::abs(k.values[i]);
        total += mass;
        if (std::abs(k.xs[i]) > radius)
            out.values[i] = 0.0;
        else
            kept += mass;
    }
    out.truncation_radius = radius;
    out.retained_mass = total > 0.0 ? kept / total : 1.0;
    return out;
}

/// Least-squares fit of ln|L(x)| against x on the window
/// [2/theta_ref, x2], x2 the largest x with |L| above 1e-12 of the peak.
/// Samples are additionally required to exceed the frequency-truncation
/// ripple floor 2*edge_residual/(pi*x), below which reconstructed values
/// are quadrature noise rather than kernel.
inline DecayFit fit_decay_rate(const KernelSamples& k, double theta_ref) {
    if (!(theta_ref > 0.0) || !std::isfinite(theta_ref))
        throw input_error("fit_decay_rate: theta_ref must be positive and finite");
    const double peak = k.max_abs();
    if (peak == 0.0)
        throw input_error("fit_decay_rate: regular part is identically zero");

    const double x1 = 2.0 / theta_ref;
    double x2 = 0.0;
    for (std::size_t i = 0; i < k.xs.size(); ++i)
        if (k.xs[i] > 0.0 && std::abs(k.values[i]) > 1e-12 * peak)
            x2 = std::max(x2, k.xs[i]);

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < k.xs.size(); ++i) {
        const double x = k.xs[i];
        if (x < x1 || x > x2) continue;
        const double floor =
            std::max(1e-12 * peak,
                     2.0 * k.edge_residual / (std::numbers::pi * x));
        const double v = std::abs(k.values[i]);
        if (v <= floor) continue;
        xs.push_back(x);
        ys.push_back(std::log(v));
    }
    if (xs.size() < 20)
        throw grid_error("fit_decay_rate: window [" + std::to_string(x1) + ", " +
                         std::to_string(x2) + "] has only " +
                         std::to_string(xs.size()) +
                         " usable samples (< 20); refine the grid");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    const double m = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double ss_tot = syy - sy * sy / m;
    const double intercept = (sy - slope * sx) / m;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (slope * xs[i] + intercept);
        ss_res += r * r;
    }

    DecayFit fit;
    fit.theta_hat = -slope;
    fit.window_lo = xs.front();
    fit.window_hi = xs.back();
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.theta_ref = theta_ref;
    fit.n_points = xs.size();
    return fit;
}

/// Center and normalized variance of a sampled function:
/// V(f) = \int |x - m_f|^2 |f|^2 dx / \int |f|^2 dx (trapezoidal).
template <typename Scalar>
inline NormalizedVariance normalized_variance(const std::vector<Scalar>& values,
                                              const std::vector<double>& xs) {
    if (values.size() != xs.size() || xs.size() < 2)
        throw input_error("normalized_variance: need matching samples, >= 2 points");
    auto weight = [](const Scalar& v) {
        if constexpr (std::is_same_v<Scalar, double>)
            return v * v;
        else
            return std::norm(v);
    };
    double norm = 0.0, first = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double h = xs[i + 1] - xs[i];
        norm += 0.5 * h * (weight(values[i]) + weight(values[i + 1]));
        first += 0.5 * h * (xs[i] * weight(values[i]) + xs[i + 1] * weight(values[i + 1]));
    }
    if (norm <= 0.0)
        throw input_error("normalized_variance: zero norm");
    const double center = first / norm;
    double second = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double h = xs[i + 1] - xs[i];
        const double a = (xs[i] - center) * (xs[i] - center) * weight(values[i]);
        const double b = (xs[i + 1] - center) * (xs[i + 1] - center) * weight(values[i + 1]);
        second += 0.5 * h * (a + b);
    }
    return {center, second / norm};
}

/// Product of the normalized variances of the regular kernel and of the
/// symbol minus its limit. The product obeys the uncertainty bound
/// V(f) V(fhat) >= 1/4; a violation beyond 1e-9 indicates broken quadrature
/// and raises numerical_error.
inline HeisenbergReport heisenberg_check(const PlantSpec& plant,
                                         const SpectralSolution& sol,
                                         const KernelSamples& k) {
    HeisenbergReport rep;
    rep.space = normalized_variance(k.values, k.xs);

    std::vector<Complex> f(sol.l_hat.size());
    std::vector<double> lambdas(sol.l_hat.size());
    for (std::size_t i = 0; i < sol.l_hat.size(); ++i) {
        f[i] = sol.l_hat[i] - sol.delta_strength;
        lambdas[i] = sol.grid[i];
    }
    rep.freq = normalized_variance(f, lambdas);
    rep.product = rep.space.variance * rep.freq.variance;
    if (rep.product < 0.25 - 1e-9)
        throw numerical_error("heisenberg_check: variance product " +
                              std::to_string(rep.product) +
                              " violates the uncertainty bound 1/4");

    if (auto mono = as_monomial(plant)) {
        const double l_star = std::pow(2.0 * mono->a_abs * mono->sigma_v / mono->sigma_w,
                                       1.0 / (2.0 * mono->n));
        rep.space_variance_over_lstar_sq = rep.space.variance / (l_star * l_star);
    }
    return rep;
}

} // namespace sikf
