#pragma once

// Error taxonomy shared by the whole library. The CLI maps these onto
// exit codes: input errors -> 1, assumption violations -> 2, grid and
// numerical failures -> 3.

#include <complex>
#include <stdexcept>
#include <string>

namespace sikf {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input: bad coefficients, nonpositive
/// parameters, non-finite arguments, schema violations.
class input_error : public error {
public:
    using error::error;
};

/// A plant assumption required by the requested operation does not hold
/// (improper symbol, real poles/zeros, non-identity observation symbol, ...).
class assumption_error : public error {
public:
    using error::error;
};

/// Evaluation hit a pole of a rational symbol.
class singularity_error : public error {
public:
    singularity_error(const std::string& what, std::complex<double> where)
        : error(what), pole_(where) {}
    std::complex<double> pole() const { return pole_; }

private:
    std::complex<double> pole_;
};

/// A grid or tolerance is inadequate for the requested computation
/// (insufficient symbol decay at the grid edge, too-short fit window, ...).
class grid_error : public error {
public:
    using error::error;
};

/// Numerical failure: non-integrable tail, divergent high-frequency limit,
/// violated mathematical identity beyond round-off.
class numerical_error : public error {
public:
    using error::error;
};

} // namespace sikf
