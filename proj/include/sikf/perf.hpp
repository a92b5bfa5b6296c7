#pragma once

// Steady-state filtering performance: var(e) = (1/2pi) \int P(lambda)
// d lambda by composite Gauss-Legendre quadrature with an algebraic tail
// model, the diffusion closed form, the dimensionless monomial profile f_n
// and its cached integral, and monotonicity diagnostics over sweeps.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/parallel.hpp"
#include "sikf/riccati.hpp"
#include "sikf/symbols.hpp"

namespace sikf {

enum class VarianceMethod { quadrature, closed_form, scaling_law };

struct PerfReport {
    double var_e = 0.0;
    VarianceMethod method = VarianceMethod::quadrature;
    double abs_err = 0.0;       // error estimate of the reported value
    double lambda_cut = 0.0;    // where the analytic tail model takes over
    double tail_exponent = 0.0; // fitted algebraic decay exponent of the PSD
};

namespace detail {

using gl32 = boost::math::quadrature::gauss<double, 32>;

/// Integral over [0, hi]: uniform panels on [0, lo] (count doubled until
/// converged) plus geometrically growing panels on [lo, hi]. The integrand
/// must be smooth.
inline double integrate_core(const std::function<double(double)>& f, double lo,
                             double hi, double rtol) {
    double core = 0.0, prev = 0.0;
    for (std::size_t panels = 8;; panels *= 2) {
        core = 0.0;
        const double h = lo / static_cast<double>(panels);
        for (std::size_t i = 0; i < panels; ++i)
            core += gl32::integrate(f, h * static_cast<double>(i),
                                    h * static_cast<double>(i + 1));
        if (panels > 8 && std::abs(core - prev) <= 0.25 * rtol * std::abs(core))
            break;
        if (panels > (std::size_t{1} << 14))
            throw numerical_error("integrate_core: panel refinement did not converge");
        prev = core;
    }
    double geo = 0.0;
    for (double a = lo; a < hi; a *= 2.0)
        geo += gl32::integrate(f, a, std::min(2.0 * a, hi));
    return core + geo;
}

} // namespace detail

/// var(e) by quadrature of (1/2pi) \int P d lambda. The symmetrized
/// integrand P(lambda) + P(-lambda) is integrated over [0, cut] and an
/// algebraic tail c lambda^-p, with p fitted from samples at cut and 2 cut,
/// is added; cut doubles until the tail estimate is negligible at the
/// requested tolerance. Refuses non-integrable plants, naming the degrees.
inline PerfReport error_variance(const PlantSpec& plant, double rtol = 1e-7) {
    if (!(rtol > 0.0) || rtol >= 1.0)
        throw input_error("error_variance: rtol must lie in (0, 1)");

    // Integrability from degree analysis: P decays like
    // |b_hat|^2 / (2 |Re a_hat|) at high frequency.
    const Polynomial q = real_part_poly(plant.a_hat);
    const RationalSymbol b2 = squared_magnitude(plant.b_hat);
    if (b2.num().is_zero())
        return {0.0, VarianceMethod::quadrature, 0.0, 0.0, 0.0};
    if (!std::isfinite(half_plane_sup(plant.a_hat)))
        throw numerical_error("error_variance: Re(a_hat) unbounded above");
    const int b2_deg = b2.num().degree() - b2.den().degree();
    const int p_deg = q.degree() - b2_deg;
    if (q.degree() < 2 || p_deg < 2)
        throw numerical_error(
            "error_variance: PSD tail exponent " + std::to_string(p_deg) +
            " (deg Re(a_hat) = " + std::to_string(q.degree()) +
            ", deg |b_hat|^2 = " + std::to_string(b2_deg) +
            ") is not integrable");

    const auto g = [&](double lam) {
        return psd_error(plant, lam) + psd_error(plant, -lam);
    };

    // Initial scale: where the symmetrized PSD has dropped to half its
    // origin value.
    const double g0 = g(0.0);
    double lo = 1.0;
    for (int i = 0; i < 200 && g(lo) > 0.5 * g0; ++i) lo *= 2.0;

    double cut = 8.0 * lo;
    double total = 0.0, prev_total = 0.0, tail = 0.0, p_fit = 0.0;
    for (int iter = 0;; ++iter) {
        if (iter > 60)
            throw numerical_error("error_variance: tail did not become negligible");
        const double core = detail::integrate_core(g, lo, cut, rtol);
        const double t1 = g(cut), t2 = g(2.0 * cut);
        if (!(t2 > 0.0) || !(t1 > 0.0)) {
            tail = 0.0;
            p_fit = std::numeric_limits<double>::infinity();
        } else {
            p_fit = std::log2(t1 / t2);
            if (p_fit <= 1.1)
                throw numerical_error(
                    "error_variance: observed tail exponent " +
                    std::to_string(p_fit) + " is not integrable");
            tail = t1 * cut / (p_fit - 1.0);
        }
        total = core + tail;
        const bool tail_ok = tail <= 0.1 * rtol * std::abs(total);
        const bool settled = iter > 0 && std::abs(total - prev_total) <=
                                             0.5 * rtol * std::abs(total);
        if (tail_ok && settled) break;
        prev_total = total;
        cut *= 2.0;
    }

    PerfReport rep;
    rep.var_e = total / (2.0 * std::numbers::pi);
    rep.method = VarianceMethod::quadrature;
    rep.abs_err = (std::abs(total - prev_total) + tail) / (2.0 * std::numbers::pi);
    rep.lambda_cut = cut;
    rep.tail_exponent = p_fit;
    return rep;
}

/// Diffusion with white noises: var(e) = Gamma(1/4)^2 sigma_w^{3/2}
/// sigma_v^{1/2} / (6 pi^{3/2} kappa^{1/2}).
inline double closed_form_diffusion(double kappa, double sigma_w, double sigma_v) {
    if (!(kappa > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0))
        throw input_error("closed_form_diffusion: parameters must be positive");
    const double gamma_quarter = std::tgamma(0.25);
    return gamma_quarter * gamma_quarter / (6.0 * std::pow(std::numbers::pi, 1.5)) *
           std::pow(sigma_w, 1.5) * std::sqrt(sigma_v) / std::sqrt(kappa);
}

/// Dimensionless PSD profile of the monomial family:
/// f_n(L) = 2 / (L^{2n} + sqrt(L^{4n} + 4)). Even, maximal at 0 with value 1,
/// decays like L^{-2n}.
inline double f_n(int n, double lambda) {
    if (n < 1) throw input_error("f_n: n must be >= 1");
    const double t = std::pow(lambda, 2 * n);
    return 2.0 / (t + std::sqrt(t * t + 4.0));
}

namespace detail {

/// \int_R f_n, cached per n. Gauss-Legendre on [0, 64] plus the first three
/// terms of the tail expansion f_n = L^{-2n} - L^{-6n} + 2 L^{-10n} + ...
inline double f_n_integral(int n) {
    static std::map<int, double> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    const auto f = [n](double lam) { return f_n(n, lam); };
    const double cut = 64.0;
    double half = integrate_core(f, 8.0, cut, 1e-13);
    const double e1 = static_cast<double>(2 * n - 1);
    const double e2 = static_cast<double>(6 * n - 1);
    const double e3 = static_cast<double>(10 * n - 1);
    half += std::pow(cut, -e1) / e1 - std::pow(cut, -e2) / e2 +
            2.0 * std::pow(cut, -e3) / e3;
    const double full = 2.0 * half;
    cache[n] = full;
    return full;
}

} // namespace detail

/// var(e) of the monomial plant via the dimensionless route:
/// sigma_w sigma_v / (2 pi l*) \int_R f_n, with l* = (2|a|sigma_v/sigma_w)^(1/2n).
/// The dimensionless constant is computed once per n (to ~1e-13) and cached.
inline PerfReport monomial_variance(int n, double a_abs, double sigma_w,
                                    double sigma_v, double rtol = 1e-7) {
    if (n < 1) throw input_error("monomial_variance: n must be >= 1");
    if (!(a_abs > 0.0) || !(sigma_w > 0.0) || !(sigma_v > 0.0))
        throw input_error("monomial_variance: parameters must be positive");
    if (rtol < 1e-12)
        throw input_error("monomial_variance: constant is cached to ~1e-13; "
                          "rtol below 1e-12 is not honored");
    const double l_star =
        std::pow(2.0 * a_abs * sigma_v / sigma_w, 1.0 / (2.0 * n));
    PerfReport rep;
    rep.var_e = sigma_w * sigma_v / (2.0 * std::numbers::pi * l_star) *
                detail::f_n_integral(n);
    rep.method = VarianceMethod::scaling_law;
    rep.abs_err = 1e-12 * rep.var_e;
    return rep;
}

enum class Monotonicity { strictly_decreasing, strictly_increasing, non_strict, non_monotone };

struct MonotonicityVerdict {
    Monotonicity kind = Monotonicity::non_strict;
    std::optional<std::size_t> first_violation; // for non_monotone: index of the turn
};

inline MonotonicityVerdict monotonicity_verdict(const std::vector<double>& values) {
    if (values.size() < 2) throw input_error("monotonicity_verdict: need >= 2 values");
    bool has_pos = false, has_neg = false, has_zero = false;
    std::optional<std::size_t> violation;
    int first_sign = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double d = values[i + 1] - values[i];
        const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sign > 0) has_pos = true;
        if (sign < 0) has_neg = true;
        if (sign == 0) has_zero = true;
        if (first_sign == 0) first_sign = sign;
        if (!violation && sign != 0 && first_sign != 0 && sign != first_sign)
            violation = i + 1;
    }
    MonotonicityVerdict v;
    if (has_pos && has_neg) {
        v.kind = Monotonicity::non_monotone;
        v.first_violation = violation;
    } else if (has_neg && !has_zero) {
        v.kind = Monotonicity::strictly_decreasing;
    } else if (has_pos && !has_zero) {
        v.kind = Monotonicity::strictly_increasing;
    } else {
        v.kind = Monotonicity::non_strict;
    }
    return v;
}

struct PerfSweep {
    std::vector<double> params;
    std::vector<double> var_e;
    std::vector<PerfReport> reports;
    MonotonicityVerdict verdict;
};

/// var(e) along a plant family with a monotonicity verdict.
inline PerfSweep monotonicity_sweep(const std::function<PlantSpec(double)>& family,
                                    const std::vector<double>& params,
                                    double rtol = 1e-7) {
    if (params.size() < 3)
        throw input_error("monotonicity_sweep: need at least three parameter values");
    PerfSweep sweep;
    sweep.params = params;
    sweep.reports.resize(params.size());
    sweep.var_e.resize(params.size());
    detail::parallel_for(params.size(), [&](std::size_t i) {
        sweep.reports[i] = error_variance(family(params[i]), rtol);
        sweep.var_e[i] = sweep.reports[i].var_e;
    });
    for (double v : sweep.var_e)
        if (!(v >= 0.0)) throw numerical_error("monotonicity_sweep: negative variance");
    sweep.verdict = monotonicity_verdict(sweep.var_e);
    return sweep;
}

struct PowerLawFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 0.0;
};

/// Least-squares fit of log y against log x.
inline PowerLawFit fit_power_law(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw input_error("fit_power_law: need matching samples, >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    const double m = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw input_error("fit_power_law: samples must be positive");
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    PowerLawFit fit;
    fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.log_prefactor = (sy - fit.exponent * sx) / m;
    const double ss_tot = syy - sy * sy / m;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = std::log(ys[i]) -
                         (fit.exponent * std::log(xs[i]) + fit.log_prefactor);
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace sikf
