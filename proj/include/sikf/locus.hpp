#pragma once

// Spatial-locality analysis of the gain symbol: the radicand of its
// analytic extension, finite branch points, the exponential decay rate
// theta = min |Re z_i|, and branch-point trajectories over parameter
// sweeps (the branch point locus).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/parallel.hpp"
#include "sikf/roots.hpp"
#include "sikf/symbols.hpp"

namespace sikf {

/// Tolerances of the branch-point machinery.
namespace locus_tol {
/// num/den roots closer than this (relative) are treated as a common factor.
inline constexpr double cancellation = 1e-7;
/// branch points closer than this (relative) count as a collision.
inline constexpr double collision = 1e-6;
/// roots with |Re| below this (relative) violate the no-imaginary-axis rule.
inline constexpr double imaginary_axis = 1e-9;
} // namespace locus_tol

/// Rational function under the square root of the extended gain symbol,
/// before and after the substitution lambda -> -i z. Roots are stored
/// after pairwise numerator/denominator cancellation.
struct Radicand {
    Polynomial num_lambda, den_lambda; // real coefficients, variable lambda
    Polynomial num_z, den_z;           // complex coefficients, variable z
    std::vector<Complex> num_roots;    // roots of num_z after cancellation
    std::vector<Complex> den_roots;    // roots of den_z after cancellation
    std::size_t cancelled_pairs = 0;

    Complex eval_z(Complex z) const {
        const Complex d = den_z(z);
        if (d == Complex(0.0))
            throw singularity_error("Radicand: pole hit", z);
        return num_z(z) / d;
    }

    /// Value on the imaginary axis z = i*lambda; equals
    /// Re(a_hat)^2 + |b_hat/g_hat|^2 and is real and positive there.
    Complex eval_imag_axis(double lambda) const {
        return eval_z(Complex(0.0, lambda));
    }
};

/// Finite branch points of the extended gain symbol with the decay rate
/// they induce. `entire` marks radicands that are perfect squares: the
/// extension is then entire and the filter completely decentralized.
struct BranchPointSet {
    std::vector<Complex> points; // with multiplicity, sorted by (Re, Im)
    double theta = std::numeric_limits<double>::infinity(); // min |Re|
    bool entire = false;
    bool collision = false; // some points coincide within tolerance

    /// Open analyticity strip (-theta, theta) around the imaginary axis.
    std::pair<double, double> strip() const { return {-decay_rate(), decay_rate()}; }

    /// Exponential spatial decay rate of the gain kernel; +infinity for
    /// entire extensions (point-supported kernel).
    double decay_rate() const {
        return entire ? std::numeric_limits<double>::infinity() : theta;
    }
};

struct LocusTrajectory {
    std::vector<double> params;
    std::vector<BranchPointSet> sets;
    /// pairings[k][i] = index in sets[k+1] matched with point i of sets[k];
    /// empty when the cardinality changed between k and k+1.
    std::vector<std::vector<std::size_t>> pairings;
    std::vector<std::size_t> collision_indices;   // params with coinciding points
    std::vector<std::size_t> cardinality_breaks;  // k where |sets[k]| != |sets[k+1]|

    /// Trajectory of the branch point starting at sets[0][start], following
    /// the pairings. Throws if a cardinality break interrupts the path.
    std::vector<Complex> path(std::size_t start) const {
        if (!cardinality_breaks.empty())
            throw numerical_error("LocusTrajectory::path: cardinality changed during sweep");
        std::vector<Complex> out;
        std::size_t idx = start;
        out.push_back(sets.at(0).points.at(idx));
        for (std::size_t k = 0; k + 1 < sets.size(); ++k) {
            idx = pairings[k].at(idx);
            out.push_back(sets[k + 1].points.at(idx));
        }
        return out;
    }
};

namespace detail {

inline void sort_canonical(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

/// Minimal-total-cost assignment (Hungarian algorithm with potentials,
/// O(n^3)). cost is square; returns row -> column.
inline std::vector<std::size_t> min_cost_assignment(
    const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    if (n == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0); // column -> row (1-based)
    std::vector<std::size_t> way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j)
        if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

/// Substitute lambda -> -i z coefficient-wise: c_k -> c_k (-i)^k.
inline Polynomial substitute_minus_iz(const Polynomial& p) {
    std::vector<Complex> c(p.coeffs());
    Complex f(1.0, 0.0);
    const Complex minus_i(0.0, -1.0);
    for (auto& v : c) {
        v *= f;
        f *= minus_i;
    }
    return Polynomial(std::move(c));
}

} // namespace detail

/// Radicand Re(a_hat)^2 + |b_hat|^2/|g_hat|^2 over a common denominator,
/// followed by lambda -> -i z. Numerator/denominator roots within the
/// cancellation tolerance of each other are removed pairwise.
/// Requires the identity observation symbol.
inline Radicand build_radicand(const PlantSpec& plant) {
    if (!plant.c_is_identity())
        throw assumption_error("build_radicand: requires identity observation symbol");

    const Polynomial q = real_part_poly(plant.a_hat);
    const RationalSymbol b2 = squared_magnitude(plant.b_hat);
    const RationalSymbol g2 = squared_magnitude(plant.g_hat);

    Radicand rad;
    rad.num_lambda = q * q * b2.den() * g2.num() + b2.num() * g2.den();
    rad.den_lambda = b2.den() * g2.num();
    if (rad.num_lambda.is_zero())
        throw assumption_error("build_radicand: radicand vanishes identically");

    // Constant denominators are folded into the numerator.
    if (rad.den_lambda.degree() == 0) {
        rad.num_lambda = (1.0 / rad.den_lambda.coeffs()[0]) * rad.num_lambda;
        rad.den_lambda = Polynomial::constant(1.0);
    }

    rad.num_z = detail::substitute_minus_iz(rad.num_lambda);
    rad.den_z = detail::substitute_minus_iz(rad.den_lambda);

    rad.num_roots = polynomial_roots(rad.num_z.coeffs());
    rad.den_roots = rad.den_lambda.degree() > 0
                        ? polynomial_roots(rad.den_z.coeffs())
                        : std::vector<Complex>{};

    // Numerical gcd reduction at the root level.
    for (std::size_t j = 0; j < rad.den_roots.size();) {
        const Complex r = rad.den_roots[j];
        const double tol = locus_tol::cancellation * (1.0 + std::abs(r));
        auto nearest = rad.num_roots.end();
        double best = tol;
        for (auto it = rad.num_roots.begin(); it != rad.num_roots.end(); ++it) {
            const double dist = std::abs(*it - r);
            if (dist <= best) {
                best = dist;
                nearest = it;
            }
        }
        if (nearest != rad.num_roots.end()) {
            rad.num_roots.erase(nearest);
            rad.den_roots.erase(rad.den_roots.begin() + static_cast<std::ptrdiff_t>(j));
            ++rad.cancelled_pairs;
        } else {
            ++j;
        }
    }
    detail::sort_canonical(rad.num_roots);
    detail::sort_canonical(rad.den_roots);
    return rad;
}

/// Finite branch points: the reduced roots of numerator and denominator.
/// Points within the collision tolerance are clustered and replaced by the
/// cluster mean, which restores full accuracy at double roots. A radicand
/// whose roots all pair up (and with no denominator roots) is a perfect
/// square: the extension is entire.
inline BranchPointSet branch_points(const Radicand& rad) {
    BranchPointSet out;
    out.points = rad.num_roots;
    out.points.insert(out.points.end(), rad.den_roots.begin(), rad.den_roots.end());
    if (out.points.empty()) {
        out.entire = true;
        return out;
    }
    detail::sort_canonical(out.points);

    // Cluster coincident points.
    std::vector<std::size_t> cluster_of(out.points.size());
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        bool placed = false;
        for (auto& cl : clusters) {
            const Complex rep = out.points[cl.front()];
            if (std::abs(out.points[i] - rep) <=
                locus_tol::collision * (1.0 + std::abs(rep))) {
                cl.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({i});
        cluster_of[i] = clusters.size() - 1;
    }
    bool all_even = true;
    for (const auto& cl : clusters) {
        if (cl.size() > 1) {
            out.collision = true;
            Complex mean = 0.0;
            for (std::size_t idx : cl) mean += out.points[idx];
            mean /= static_cast<double>(cl.size());
            for (std::size_t idx : cl) out.points[idx] = mean;
        }
        if (cl.size() % 2 != 0) all_even = false;
    }

    double theta = std::numeric_limits<double>::infinity();
    for (const Complex& z : out.points) {
        if (std::abs(z.real()) < locus_tol::imaginary_axis * (1.0 + std::abs(z)))
            throw assumption_error(
                "branch_points: branch point on the imaginary axis at z = (" +
                std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                "); the gain symbol is not analytic in any strip. "
                "Check the no-real-zero/pole plant assumptions.");
        theta = std::min(theta, std::abs(z.real()));
    }
    out.theta = theta;
    out.entire = rad.den_roots.empty() && all_even;
    return out;
}

/// Exponential spatial decay rate of the gain kernel; +infinity (entire
/// extension) for completely decentralized plants.
inline double decay_rate(const PlantSpec& plant) {
    return branch_points(build_radicand(plant)).decay_rate();
}

/// Branch point locus: branch-point sets along a plant family, with points
/// tracked across consecutive parameter values by minimal-total-squared-
/// distance assignment. Collisions and cardinality changes are flagged,
/// never silently dropped.
inline LocusTrajectory bpl_sweep(const std::function<PlantSpec(double)>& family,
                                 const std::vector<double>& params) {
    if (params.size() < 2)
        throw input_error("bpl_sweep: need at least two parameter values");

    LocusTrajectory traj;
    traj.params = params;
    traj.sets.resize(params.size());
    detail::parallel_for(params.size(), [&](std::size_t i) {
        traj.sets[i] = branch_points(build_radicand(family(params[i])));
    });

    for (std::size_t i = 0; i < traj.sets.size(); ++i)
        if (traj.sets[i].collision) traj.collision_indices.push_back(i);

    for (std::size_t k = 0; k + 1 < traj.sets.size(); ++k) {
        const auto& a = traj.sets[k].points;
        const auto& b = traj.sets[k + 1].points;
        if (a.size() != b.size()) {
            traj.cardinality_breaks.push_back(k);
            traj.pairings.emplace_back();
            continue;
        }
        std::vector<std::vector<double>> cost(a.size(), std::vector<double>(b.size()));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                cost[i][j] = std::norm(a[i] - b[j]);
        traj.pairings.push_back(detail::min_cost_assignment(cost));
    }
    return traj;
}

} // namespace sikf
