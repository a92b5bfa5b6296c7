#pragma once

// Fourier-symbol algebra for spatially invariant operators on the real line:
// polynomials and proper rational functions of the real spatial frequency,
// their real parts and squared magnitudes, and the extension to the complex
// frequency plane obtained by substituting lambda -> -i z.
//
// All types are immutable values after construction and safe to share
// across threads.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/roots.hpp"

namespace sikf {

/// Dense univariate polynomial with complex coefficients, ascending degree.
/// The zero polynomial has an empty coefficient list (degree -1); otherwise
/// the leading coefficient is nonzero.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
        trim();
    }

    static Polynomial constant(Complex c) { return Polynomial({c}); }
    static Polynomial from_real(const std::vector<double>& c) {
        std::vector<Complex> v(c.begin(), c.end());
        return Polynomial(std::move(v));
    }

    const std::vector<Complex>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    Complex leading() const { return is_zero() ? Complex(0.0) : coeffs_.back(); }

    bool has_real_coeffs() const {
        for (const auto& c : coeffs_)
            if (c.imag() != 0.0) return false;
        return true;
    }

    /// Horner evaluation.
    Complex operator()(Complex x) const {
        Complex p = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) p = p * x + coeffs_[i];
        return p;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<Complex> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            d[i - 1] = coeffs_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    /// Coefficient-wise complex conjugate (conjugates coefficients, not
    /// the variable): for real x, result(x) == conj(p(x)).
    Polynomial conjugate_coeffs() const {
        std::vector<Complex> c(coeffs_);
        for (auto& v : c) v = std::conj(v);
        return Polynomial(std::move(c));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(Complex s, const Polynomial& p) {
        std::vector<Complex> c(p.coeffs_);
        for (auto& v : c) v *= s;
        return Polynomial(std::move(c));
    }

    bool operator==(const Polynomial& other) const { return coeffs_ == other.coeffs_; }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == Complex(0.0)) coeffs_.pop_back();
    }
    std::vector<Complex> coeffs_;
};

/// Proper rational function num/den of the real spatial frequency.
/// Properness and the absence of real poles/zeros are plant assumptions
/// checked by validate_plant, not enforced at construction.
class RationalSymbol {
public:
    RationalSymbol() : num_(Polynomial::constant(1.0)), den_(Polynomial::constant(1.0)) {}
    RationalSymbol(Polynomial num, Polynomial den)
        : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero())
            throw input_error("RationalSymbol: denominator is the zero polynomial");
    }

    static RationalSymbol constant(Complex c) {
        return {Polynomial::constant(c), Polynomial::constant(1.0)};
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    bool is_one() const { return num_ == den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_proper() const { return num_.degree() <= den_.degree(); }

private:
    Polynomial num_, den_;
};

/// A problem instance: the four Fourier symbols of the plant operators.
/// `a_hat` is the (polynomial) symbol of the state dynamics; `b_hat` and
/// `g_hat` shape the process and measurement noise; `c_hat` is the
/// observation symbol. Unit annotations live in `labels` only.
struct PlantSpec {
    Polynomial a_hat;
    RationalSymbol b_hat;
    RationalSymbol c_hat; // defaults to 1
    RationalSymbol g_hat;
    std::map<std::string, std::string> labels;

    bool c_is_identity() const { return c_hat.is_one(); }
};

// ---------------------------------------------------------------------------
// Evaluation and extension

inline Complex eval(const Polynomial& p, double lambda) {
    if (!std::isfinite(lambda))
        throw input_error("eval: frequency must be finite");
    return p(Complex(lambda, 0.0));
}

inline Complex eval(const RationalSymbol& r, double lambda) {
    if (!std::isfinite(lambda))
        throw input_error("eval: frequency must be finite");
    const Complex d = r.den()(Complex(lambda, 0.0));
    if (d == Complex(0.0))
        throw singularity_error("eval: denominator vanishes at requested frequency",
                                Complex(lambda, 0.0));
    return r.num()(Complex(lambda, 0.0)) / d;
}

/// Extension to the complex plane: the symbol evaluated after lambda -> -i z.
/// On the imaginary axis z = i*lambda this agrees with eval(sym, lambda).
inline Complex extend(const Polynomial& p, Complex z) {
    return p(Complex(0.0, -1.0) * z);
}

inline Complex extend(const RationalSymbol& r, Complex z) {
    const Complex w = Complex(0.0, -1.0) * z;
    const Complex d = r.den()(w);
    if (d == Complex(0.0))
        throw singularity_error("extend: pole of the rational symbol hit", z);
    return r.num()(w) / d;
}

// ---------------------------------------------------------------------------
// Symbol combinations entering the spectral Riccati equation

/// Polynomial with the real parts of the coefficients. For real frequencies
/// this evaluates to Re(p(lambda)); it is idempotent by construction.
inline Polynomial real_part_poly(const Polynomial& p) {
    std::vector<Complex> c(p.coeffs());
    for (auto& v : c) v = Complex(v.real(), 0.0);
    return Polynomial(std::move(c));
}

/// Rational symbol equal to |r(lambda)|^2 for real lambda:
/// (num * conj num) / (den * conj den). The combined coefficients are real
/// algebraically; round-off imaginary parts are dropped.
inline RationalSymbol squared_magnitude(const RationalSymbol& r) {
    auto realize = [](const Polynomial& p) {
        std::vector<Complex> c(p.coeffs());
        for (auto& v : c) v = Complex(v.real(), 0.0);
        return Polynomial(std::move(c));
    };
    Polynomial num = realize(r.num() * r.num().conjugate_coeffs());
    Polynomial den = realize(r.den() * r.den().conjugate_coeffs());
    return {std::move(num), std::move(den)};
}

/// Supremum over real frequencies of Re(a(lambda)). Returns +infinity when
/// the real-part polynomial is unbounded above; otherwise the maximum over
/// its real critical points (and the origin).
inline double half_plane_sup(const Polynomial& a) {
    const Polynomial q = real_part_poly(a);
    if (q.degree() <= 0) return q.is_zero() ? 0.0 : q.coeffs()[0].real();

    const bool odd = q.degree() % 2 != 0;
    if (odd || q.leading().real() > 0.0)
        return std::numeric_limits<double>::infinity();

    double sup = q(Complex(0.0)).real();
    for (const Complex& z : polynomial_roots(q.derivative().coeffs())) {
        if (!root_is_real(z)) continue;
        sup = std::max(sup, q(Complex(z.real(), 0.0)).real());
    }
    return sup;
}

// ---------------------------------------------------------------------------
// Plant validation

struct Diagnostic {
    std::string check;
    bool passed = false;
    std::string detail;
};

inline bool all_passed(const std::vector<Diagnostic>& diags) {
    return std::all_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.passed; });
}

namespace detail {

inline std::optional<Complex> first_real_root(const Polynomial& p) {
    if (p.degree() < 1) return std::nullopt;
    for (const Complex& z : polynomial_roots(p.coeffs()))
        if (root_is_real(z)) return z;
    return std::nullopt;
}

inline void check_rational(std::vector<Diagnostic>& out, const RationalSymbol& r,
                           const std::string& name, bool forbid_real_zeros) {
    {
        Diagnostic d{"properness(" + name + ")", r.is_proper(), ""};
        if (!d.passed)
            d.detail = "deg num = " + std::to_string(r.num().degree()) +
                       " > deg den = " + std::to_string(r.den().degree());
        out.push_back(std::move(d));
    }
    {
        Diagnostic d{"no-real-poles(" + name + ")", true, ""};
        if (auto z = detail::first_real_root(r.den())) {
            d.passed = false;
            d.detail = "denominator has a real root near " + std::to_string(z->real());
        }
        out.push_back(std::move(d));
    }
    if (forbid_real_zeros) {
        Diagnostic d{"no-real-zeros(" + name + ")", true, ""};
        if (r.num().is_zero()) {
            d.passed = false;
            d.detail = "symbol is identically zero";
        } else if (auto z = detail::first_real_root(r.num())) {
            d.passed = false;
            d.detail = "numerator has a real root near " + std::to_string(z->real());
        }
        out.push_back(std::move(d));
    }
}

} // namespace detail

/// Pass/fail per plant assumption. Never mutates the spec; failures are
/// encoded in the returned list.
inline std::vector<Diagnostic> validate_plant(const PlantSpec& p) {
    std::vector<Diagnostic> out;

    detail::check_rational(out, p.b_hat, "b_hat", /*forbid_real_zeros=*/true);
    detail::check_rational(out, p.c_hat, "c_hat", /*forbid_real_zeros=*/false);
    detail::check_rational(out, p.g_hat, "g_hat", /*forbid_real_zeros=*/true);

    {
        Diagnostic d{"noise-psd-positive(g_hat)", true, ""};
        if (p.g_hat.num().is_zero()) {
            d.passed = false;
            d.detail = "|g_hat|^2 vanishes identically";
        } else if (auto z = detail::first_real_root(p.g_hat.num())) {
            d.passed = false;
            d.detail = "|g_hat|^2 vanishes near lambda = " + std::to_string(z->real());
        }
        out.push_back(std::move(d));
    }
    {
        const double sup = half_plane_sup(p.a_hat);
        Diagnostic d{"half-plane(a_hat)", std::isfinite(sup), ""};
        d.detail = d.passed ? "sup Re = " + std::to_string(sup)
                            : "Re(a_hat) unbounded above";
        out.push_back(std::move(d));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structural queries

/// Parameters of a plant of the monomial family: a_hat = -|a| lambda^(2n)
/// with constant positive b_hat, g_hat and identity c_hat.
struct MonomialForm {
    int n = 0;
    double a_abs = 0.0;
    double sigma_w = 0.0;
    double sigma_v = 0.0;
};

inline std::optional<MonomialForm> as_monomial(const PlantSpec& p) {
    const auto positive_constant = [](const RationalSymbol& r) -> std::optional<double> {
        if (r.num().degree() != 0 || r.den().degree() != 0) return std::nullopt;
        const Complex v = r.num().coeffs()[0] / r.den().coeffs()[0];
        if (std::abs(v.imag()) > 1e-14 * std::abs(v) || v.real() <= 0.0)
            return std::nullopt;
        return v.real();
    };

    if (!p.c_is_identity()) return std::nullopt;
    const int deg = p.a_hat.degree();
    if (deg < 2 || deg % 2 != 0) return std::nullopt;
    const Complex lead = p.a_hat.leading();
    if (std::abs(lead.imag()) > 1e-14 * std::abs(lead) || lead.real() >= 0.0)
        return std::nullopt;
    for (int i = 0; i < deg; ++i)
        if (std::abs(p.a_hat.coeffs()[i]) > 1e-14 * std::abs(lead)) return std::nullopt;

    const auto sw = positive_constant(p.b_hat);
    const auto sv = positive_constant(p.g_hat);
    if (!sw || !sv) return std::nullopt;
    return MonomialForm{deg / 2, -lead.real(), *sw, *sv};
}

} // namespace sikf
