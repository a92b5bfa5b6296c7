#pragma once

// File formats: the JSON plant-specification document, CSV exports for
// spectral solutions, kernels, branch-point loci and performance sweeps,
// and JSON reports. All writers produce byte-deterministic output: floats
// are printed either with 17 significant digits (spectral CSV) or in
// shortest round-trip form (everything else).

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/kernel.hpp"
#include "sikf/locus.hpp"
#include "sikf/perf.hpp"
#include "sikf/riccati.hpp"
#include "sikf/symbols.hpp"

namespace sikf {

/// Shortest representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// 17 significant digits (always round-trips).
inline std::string format_double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Plant specification document
//
// {
//   "a_hat": {"coeffs": [[re, im], ...]},            // ascending degree
//   "b_hat": {"num": {"coeffs": [...]}, "den": {"coeffs": [...]}},
//   "c_hat": { ... },                                 // optional, default 1
//   "g_hat": { ... },
//   "labels": {"key": "value", ...}                   // optional
// }

namespace detail {

inline std::vector<Complex> coeffs_from_json(const nlohmann::json& j,
                                             const std::string& where) {
    if (!j.is_object() || !j.contains("coeffs"))
        throw input_error("plant spec: " + where + " must be {\"coeffs\": [[re, im], ...]}");
    const auto& arr = j.at("coeffs");
    if (!arr.is_array())
        throw input_error("plant spec: " + where + ".coeffs must be an array");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw input_error("plant spec: " + where + ".coeffs[" + std::to_string(i) +
                              "] must be a [re, im] pair of numbers");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

inline RationalSymbol rational_from_json(const nlohmann::json& j,
                                         const std::string& where) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw input_error("plant spec: " + where + " must have \"num\" and \"den\"");
    return {Polynomial(coeffs_from_json(j.at("num"), where + ".num")),
            Polynomial(coeffs_from_json(j.at("den"), where + ".den"))};
}

inline nlohmann::json coeffs_to_json(const Polynomial& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Complex& c : p.coeffs())
        arr.push_back({c.real(), c.imag()});
    return {{"coeffs", arr}};
}

} // namespace detail

inline PlantSpec plant_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw input_error("plant spec: document must be a JSON object");
    for (const char* key : {"a_hat", "b_hat", "g_hat"})
        if (!j.contains(key))
            throw input_error(std::string("plant spec: missing required field \"") +
                              key + "\"");
    PlantSpec p;
    p.a_hat = Polynomial(detail::coeffs_from_json(j.at("a_hat"), "a_hat"));
    p.b_hat = detail::rational_from_json(j.at("b_hat"), "b_hat");
    p.g_hat = detail::rational_from_json(j.at("g_hat"), "g_hat");
    if (j.contains("c_hat")) p.c_hat = detail::rational_from_json(j.at("c_hat"), "c_hat");
    if (j.contains("labels")) {
        if (!j.at("labels").is_object())
            throw input_error("plant spec: labels must be an object of strings");
        for (const auto& [k, v] : j.at("labels").items()) {
            if (!v.is_string())
                throw input_error("plant spec: labels." + k + " must be a string");
            p.labels[k] = v.get<std::string>();
        }
    }
    return p;
}

inline nlohmann::json plant_to_json(const PlantSpec& p) {
    nlohmann::json j;
    j["a_hat"] = detail::coeffs_to_json(p.a_hat);
    j["b_hat"] = {{"num", detail::coeffs_to_json(p.b_hat.num())},
                  {"den", detail::coeffs_to_json(p.b_hat.den())}};
    j["c_hat"] = {{"num", detail::coeffs_to_json(p.c_hat.num())},
                  {"den", detail::coeffs_to_json(p.c_hat.den())}};
    j["g_hat"] = {{"num", detail::coeffs_to_json(p.g_hat.num())},
                  {"den", detail::coeffs_to_json(p.g_hat.den())}};
    if (!p.labels.empty()) {
        nlohmann::json labels = nlohmann::json::object();
        for (const auto& [k, v] : p.labels) labels[k] = v;
        j["labels"] = labels;
    }
    return j;
}

inline PlantSpec load_plant_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open plant spec file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error("plant spec parse error in " + path + ": " + e.what());
    }
    return plant_from_json(j);
}

inline void save_plant_spec(const PlantSpec& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write plant spec file: " + path);
    out << plant_to_json(p).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// CSV exports

inline void write_spectral_csv(std::ostream& os, const SpectralSolution& sol) {
    os << "lambda,p_hat,re_l_hat,im_l_hat,residual\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        os << format_double17(sol.grid[i]) << ',' << format_double17(sol.p_hat[i])
           << ',' << format_double17(sol.l_hat[i].real()) << ','
           << format_double17(sol.l_hat[i].imag()) << ','
           << format_double17(sol.residuals[i]) << '\n';
    }
}

inline void write_kernel_csv(std::ostream& os, const KernelSamples& k) {
    os << "x,L\n";
    for (std::size_t i = 0; i < k.xs.size(); ++i)
        os << format_double(k.xs[i]) << ',' << format_double(k.values[i]) << '\n';
}

/// A completely decentralized kernel is a single point mass; its CSV is one
/// row at the origin carrying the mass.
inline void write_delta_kernel_csv(std::ostream& os, double strength) {
    os << "x,L\n";
    os << "# completely decentralized: point mass at the origin\n";
    os << "0," << format_double(strength) << '\n';
}

inline void write_bpl_csv(std::ostream& os, const LocusTrajectory& traj) {
    os << "parameter,point_index,re_z,im_z,theta\n";
    for (std::size_t k = 0; k < traj.params.size(); ++k) {
        const auto& set = traj.sets[k];
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            os << format_double(traj.params[k]) << ',' << i << ','
               << format_double(set.points[i].real()) << ','
               << format_double(set.points[i].imag()) << ','
               << format_double(set.theta) << '\n';
        }
    }
}

inline void write_perf_csv(std::ostream& os, const std::vector<double>& params,
                           const std::vector<PerfReport>& reports) {
    os << "parameter,var_e,method,err_estimate\n";
    for (std::size_t i = 0; i < params.size(); ++i) {
        const char* method = reports[i].method == VarianceMethod::quadrature
                                 ? "quadrature"
                                 : (reports[i].method == VarianceMethod::closed_form
                                        ? "closed-form"
                                        : "scaling-law");
        os << format_double(params[i]) << ',' << format_double(reports[i].var_e)
           << ',' << method << ',' << format_double(reports[i].abs_err) << '\n';
    }
}

} // namespace sikf
