// Command-line front end: plant validation, spectral synthesis and kernel
// reconstruction, branch-point-locus sweeps, performance sweeps, and the
// complete-decentralization matching test.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sikf/casestudies.hpp"
#include "sikf/io.hpp"
#include "sikf/kernel.hpp"
#include "sikf/locus.hpp"
#include "sikf/perf.hpp"
#include "sikf/riccati.hpp"
#include "sikf/svg.hpp"
#include "sikf/symbols.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssumption = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string spec_path;
    std::string case_name;
    double kappa = 1.0, sigw = 1.0, sigv = 1.0, lv = 1.0, la = 1.0;
    double lmax = 0.0; // 0 = choose automatically
    std::size_t n = 1 << 16;
    double rtol = 1e-7;
    double match_tol = 1e-9;
    std::string out = "out";
    std::string format = "csv,json,svg";
    std::string sweep_param;
    std::vector<double> sweep_values;
    std::vector<double> truncate_radii;
};

void add_input_options(CLI::App* cmd, Options& o) {
    auto* spec = cmd->add_option("--spec", o.spec_path,
                                 "plant specification file (JSON)")
                     ->check(CLI::ExistingFile);
    auto* cname = cmd->add_option(
        "--case", o.case_name,
        "built-in case study: diffusion-white | diffusion-correlated | swift-hohenberg");
    spec->excludes(cname);
    cname->excludes(spec);
    cmd->add_option("--kappa", o.kappa, "diffusivity (diffusion cases)");
    cmd->add_option("--sigw", o.sigw, "process-noise scaling sigma_w");
    cmd->add_option("--sigv", o.sigv, "measurement-noise scaling sigma_v");
    cmd->add_option("--lv", o.lv, "measurement-noise autocorrelation length");
    cmd->add_option("--la", o.la, "dynamics lengthscale (swift-hohenberg)");
}

void add_grid_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--lmax", o.lmax, "frequency-grid half width (0 = auto)");
    cmd->add_option("--n", o.n, "frequency-grid sample count (even)");
    cmd->add_option("--rtol", o.rtol, "relative tolerance for quadrature");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "comma list of csv,json,svg");
}

void add_sweep_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--sweep-param", o.sweep_param,
                    "parameter to sweep (kappa|sigw|sigv|lv|la|lstar|pistar)");
    cmd->add_option("--sweep-values", o.sweep_values, "sweep values")
        ->delimiter(',');
}

std::set<std::string> parse_formats(const Options& o) {
    std::set<std::string> out;
    std::stringstream ss(o.format);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item != "csv" && item != "json" && item != "svg")
            throw sikf::input_error("unknown output format: " + item);
        out.insert(item);
    }
    if (out.empty()) throw sikf::input_error("--format must name at least one format");
    return out;
}

struct BuiltPlant {
    sikf::PlantSpec plant;
    std::optional<sikf::CaseStudy> study;
};

sikf::CaseStudy build_case(const Options& o) {
    if (o.case_name == "diffusion-white")
        return sikf::diffusion_white(o.kappa, o.sigw, o.sigv);
    if (o.case_name == "diffusion-correlated")
        return sikf::diffusion_correlated(o.kappa, o.sigw, o.sigv, o.lv);
    if (o.case_name == "swift-hohenberg")
        return sikf::swift_hohenberg(o.la, o.sigw, o.sigv);
    throw sikf::input_error("unknown case study: " + o.case_name +
                            " (expected diffusion-white, diffusion-correlated "
                            "or swift-hohenberg)");
}

BuiltPlant build_plant(const Options& o) {
    if (!o.spec_path.empty())
        return {sikf::load_plant_spec(o.spec_path), std::nullopt};
    if (o.case_name.empty())
        throw sikf::input_error("exactly one of --spec or --case is required");
    auto cs = build_case(o);
    return {cs.plant, cs};
}

/// Plant family for a sweep. Derived parameters: lstar rescales kappa for
/// diffusion-white (fixing the noise scalings); pistar places the second
/// lengthscale relative to l*.
std::function<sikf::PlantSpec(double)> build_family(const Options& o) {
    if (o.case_name.empty())
        throw sikf::input_error("sweeps require --case (a parameterized family)");
    const std::string p = o.sweep_param;
    auto make = [o, p](double v) {
        Options t = o;
        if (p == "kappa") t.kappa = v;
        else if (p == "sigw") t.sigw = v;
        else if (p == "sigv") t.sigv = v;
        else if (p == "lv") t.lv = v;
        else if (p == "la") t.la = v;
        else if (p == "lstar") {
            if (o.case_name != "diffusion-white")
                throw sikf::input_error("--sweep-param lstar applies to diffusion-white");
            t.kappa = v * v * o.sigw / (2.0 * o.sigv);
        } else if (p == "pistar") {
            if (o.case_name == "diffusion-correlated")
                t.lv = v * std::sqrt(2.0 * o.kappa * o.sigv / o.sigw);
            else if (o.case_name == "swift-hohenberg")
                t.la = v * std::pow(2.0 * o.sigv / o.sigw, 0.25);
            else
                throw sikf::input_error("--sweep-param pistar applies to "
                                        "diffusion-correlated or swift-hohenberg");
        } else {
            throw sikf::input_error("unknown sweep parameter: " + p);
        }
        return build_case(t).plant;
    };
    return make;
}

sikf::FrequencyGrid spectral_grid(const Options& o, const sikf::PlantSpec& plant) {
    double lmax = o.lmax;
    if (lmax <= 0.0) {
        if (!plant.c_is_identity())
            throw sikf::input_error(
                "--lmax is required for plants with a non-identity observation symbol");
        const double rate = sikf::decay_rate(plant);
        double scale = rate;
        if (!std::isfinite(scale)) {
            // completely decentralized: use the branch-point modulus scale
            const auto rad = sikf::build_radicand(plant);
            double m = 1.0;
            for (const auto& z : rad.num_roots) m = std::max(m, std::abs(z));
            scale = m;
        }
        lmax = 40.0 * scale;
    }
    return sikf::FrequencyGrid(lmax, o.n);
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sikf::input_error("cannot write " + path.string());
    out << contents;
}

template <typename Fn>
void write_stream(const fs::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sikf::input_error("cannot write " + path.string());
    fn(out);
}

std::string sweep_tag(const Options& o, std::size_t idx) {
    if (o.sweep_param.empty()) return "";
    return "_" + o.sweep_param + std::to_string(idx);
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o) {
    const auto built = build_plant(o);
    const auto diags = sikf::validate_plant(built.plant);
    for (const auto& d : diags) {
        std::cout << (d.passed ? "[pass] " : "[FAIL] ") << d.check;
        if (!d.detail.empty()) std::cout << ": " << d.detail;
        std::cout << "\n";
    }
    const bool ok = sikf::all_passed(diags);
    std::cout << (ok ? "plant satisfies all assumptions\n"
                     : "plant violates at least one assumption\n");
    return ok ? kExitOk : kExitAssumption;
}

int cmd_synth(const Options& o) {
    const auto formats = parse_formats(o);
    fs::create_directories(o.out);

    std::vector<double> values = o.sweep_values;
    const bool sweeping = !o.sweep_param.empty();
    if (sweeping && values.empty())
        throw sikf::input_error("--sweep-param given without --sweep-values");
    if (!sweeping) values = {0.0};

    auto family = sweeping ? build_family(o) : std::function<sikf::PlantSpec(double)>();

    json bundle = json::array();
    std::vector<std::vector<std::pair<double, double>>> symbol_curves, kernel_curves;

    for (std::size_t i = 0; i < values.size(); ++i) {
        const sikf::PlantSpec plant =
            sweeping ? family(values[i]) : build_plant(o).plant;
        const std::string tag = sweeping ? sweep_tag(o, i) : "";

        const auto grid = spectral_grid(o, plant);
        const auto sol = sikf::solve_grid(plant, grid);
        if (formats.count("csv"))
            write_stream(fs::path(o.out) / ("spectral" + tag + ".csv"),
                         [&](std::ostream& os) { sikf::write_spectral_csv(os, sol); });

        json entry;
        if (sweeping) entry["parameter"] = values[i];
        entry["delta_strength"] = sol.delta_strength;

        bool decentralized = false;
        if (plant.c_is_identity()) {
            const auto match = sikf::matching_test(plant, grid, o.match_tol);
            decentralized = match.matched;
            entry["matched"] = match.matched;
            if (match.matched) entry["ell"] = match.ell;
        }
        entry["completely_decentralized"] = decentralized;

        if (decentralized) {
            if (formats.count("csv"))
                write_stream(fs::path(o.out) / ("kernel" + tag + ".csv"),
                             [&](std::ostream& os) {
                                 sikf::write_delta_kernel_csv(os, sol.delta_strength);
                             });
        } else if (plant.c_is_identity()) {
            const double theta = sikf::decay_rate(plant);
            entry["theta"] = theta;
            const auto kernel = sikf::reconstruct_kernel(plant);
            if (formats.count("csv"))
                write_stream(fs::path(o.out) / ("kernel" + tag + ".csv"),
                             [&](std::ostream& os) { sikf::write_kernel_csv(os, kernel); });
            try {
                const auto fit = sikf::fit_decay_rate(kernel, theta);
                entry["theta_hat"] = fit.theta_hat;
                entry["fit_r_squared"] = fit.r_squared;
            } catch (const sikf::error&) {
                // fit window unavailable at this grid; reported fields stay absent
            }
            if (!o.truncate_radii.empty()) {
                json masses = json::object();
                for (double radius : o.truncate_radii) {
                    const auto trunc = sikf::truncate(kernel, radius);
                    masses[sikf::format_double(radius)] = *trunc.retained_mass;
                }
                entry["retained_mass"] = masses;
            }

            if (formats.count("svg")) {
                const double l0 = std::abs(sikf::gain_symbol(plant, 0.0));
                std::vector<std::pair<double, double>> sc, kc;
                const std::size_t step = std::max<std::size_t>(1, grid.size() / 1024);
                for (std::size_t s = 0; s < grid.size(); s += step)
                    sc.emplace_back(grid[s], std::abs(sol.l_hat[s]) / l0);
                const double xwin = 6.0 / theta;
                const double k0 = kernel.values[kernel.n / 2] != 0.0
                                      ? kernel.values[kernel.n / 2]
                                      : kernel.max_abs();
                for (std::size_t s = 0; s < kernel.xs.size(); ++s)
                    if (std::abs(kernel.xs[s]) <= xwin)
                        kc.emplace_back(kernel.xs[s], kernel.values[s] / k0);
                symbol_curves.push_back(std::move(sc));
                kernel_curves.push_back(std::move(kc));
            }
        }
        bundle.push_back(entry);
    }

    if (formats.count("json")) {
        json report;
        report["command"] = "synth";
        if (sweeping) report["sweep_param"] = o.sweep_param;
        report["results"] = bundle;
        write_file(fs::path(o.out) / "synth.json", report.dump(2) + "\n");
    }

    if (formats.count("svg") && !symbol_curves.empty()) {
        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                       "#9467bd", "#ff7f0e", "#8c564b"};
        double xlo = 0, xhi = 0, ylo = 0, yhi = 1;
        for (const auto& c : symbol_curves)
            for (const auto& [x, y] : c) {
                xlo = std::min(xlo, x);
                xhi = std::max(xhi, x);
                ylo = std::min(ylo, y);
                yhi = std::max(yhi, y);
            }
        auto [y0, y1] = sikf::SvgFigure::padded(ylo, yhi);
        sikf::SvgFigure symf(xlo, xhi, y0, y1);
        symf.title("normalized gain symbol");
        for (std::size_t i = 0; i < symbol_curves.size(); ++i)
            symf.polyline(symbol_curves[i], colors[i % 6]);
        write_file(fs::path(o.out) / "symbol.svg", symf.render("lambda", "|L|/|L0|"));

        xlo = xhi = ylo = yhi = 0.0;
        for (const auto& c : kernel_curves)
            for (const auto& [x, y] : c) {
                xlo = std::min(xlo, x);
                xhi = std::max(xhi, x);
                ylo = std::min(ylo, y);
                yhi = std::max(yhi, y);
            }
        auto [ky0, ky1] = sikf::SvgFigure::padded(ylo, yhi);
        sikf::SvgFigure kerf(xlo, xhi, ky0, ky1);
        kerf.title("normalized gain kernel");
        for (std::size_t i = 0; i < kernel_curves.size(); ++i)
            kerf.polyline(kernel_curves[i], colors[i % 6]);
        write_file(fs::path(o.out) / "kernel.svg", kerf.render("x", "L/L(0)"));
    }

    std::cout << "synth: wrote " << values.size() << " result(s) to " << o.out << "\n";
    return kExitOk;
}

int cmd_bpl(const Options& o) {
    const auto formats = parse_formats(o);
    if (o.sweep_param.empty() || o.sweep_values.size() < 2)
        throw sikf::input_error("bpl requires --sweep-param and >= 2 --sweep-values");
    fs::create_directories(o.out);

    const auto traj = sikf::bpl_sweep(build_family(o), o.sweep_values);

    if (formats.count("csv"))
        write_stream(fs::path(o.out) / "bpl.csv",
                     [&](std::ostream& os) { sikf::write_bpl_csv(os, traj); });

    if (formats.count("json")) {
        json j;
        j["command"] = "bpl";
        j["sweep_param"] = o.sweep_param;
        j["params"] = traj.params;
        json thetas = json::array(), entire = json::array();
        for (const auto& s : traj.sets) {
            thetas.push_back(s.theta);
            entire.push_back(s.entire);
        }
        j["theta"] = thetas;
        j["entire_extension"] = entire;
        j["collision_indices"] = traj.collision_indices;
        j["cardinality_breaks"] = traj.cardinality_breaks;
        write_file(fs::path(o.out) / "bpl.json", j.dump(2) + "\n");
    }

    if (formats.count("svg")) {
        double m = 0.0;
        for (const auto& s : traj.sets)
            for (const auto& z : s.points)
                m = std::max({m, std::abs(z.real()), std::abs(z.imag())});
        m *= 1.1;
        sikf::SvgFigure fig(-m, m, -m, m, 560, 560);
        fig.title("branch point locus");
        const auto& last = traj.sets.back();
        if (!last.entire) fig.band_x(-last.theta, last.theta, "#d62728");
        if (traj.cardinality_breaks.empty()) {
            for (std::size_t i = 0; i < traj.sets.front().points.size(); ++i) {
                std::vector<std::pair<double, double>> path;
                for (const auto& z : traj.path(i)) path.emplace_back(z.real(), z.imag());
                fig.polyline(path, "#1f77b4", 1.0);
            }
        }
        for (std::size_t k = 0; k < traj.sets.size(); ++k) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& z : traj.sets[k].points)
                pts.emplace_back(z.real(), z.imag());
            fig.scatter(pts, k + 1 == traj.sets.size() ? "#d62728" : "#1f77b4", 2.5);
        }
        for (std::size_t idx : traj.collision_indices)
            for (const auto& z : traj.sets[idx].points)
                fig.cross(z.real(), z.imag(), "#000000");
        write_file(fs::path(o.out) / "bpl.svg", fig.render("Re z", "Im z"));
    }

    std::cout << "bpl: " << traj.params.size() << " parameter values";
    if (!traj.collision_indices.empty()) {
        std::cout << "; collisions at";
        for (std::size_t i : traj.collision_indices)
            std::cout << " " << sikf::format_double(traj.params[i]);
    }
    std::cout << "\n";
    return kExitOk;
}

int cmd_perf(const Options& o) {
    const auto formats = parse_formats(o);
    if (o.sweep_param.empty() || o.sweep_values.size() < 3)
        throw sikf::input_error("perf requires --sweep-param and >= 3 --sweep-values");
    fs::create_directories(o.out);

    const auto sweep = sikf::monotonicity_sweep(build_family(o), o.sweep_values, o.rtol);

    if (formats.count("csv"))
        write_stream(fs::path(o.out) / "perf.csv", [&](std::ostream& os) {
            sikf::write_perf_csv(os, sweep.params, sweep.reports);
        });

    const char* verdict =
        sweep.verdict.kind == sikf::Monotonicity::strictly_decreasing
            ? "strictly-decreasing"
            : sweep.verdict.kind == sikf::Monotonicity::strictly_increasing
                  ? "strictly-increasing"
                  : sweep.verdict.kind == sikf::Monotonicity::non_monotone
                        ? "non-monotone"
                        : "non-strict";

    if (formats.count("json")) {
        json j;
        j["command"] = "perf";
        j["sweep_param"] = o.sweep_param;
        j["params"] = sweep.params;
        j["var_e"] = sweep.var_e;
        j["monotonicity"] = verdict;
        if (sweep.verdict.first_violation)
            j["first_violation_index"] = *sweep.verdict.first_violation;
        bool positive = true;
        for (double v : sweep.params)
            if (!(v > 0.0)) positive = false;
        if (positive) {
            const auto fit = sikf::fit_power_law(sweep.params, sweep.var_e);
            j["power_law"] = {{"exponent", fit.exponent},
                              {"r_squared", fit.r_squared}};
        }
        write_file(fs::path(o.out) / "perf.json", j.dump(2) + "\n");
    }

    std::cout << "perf: var(e) over " << sweep.params.size() << " values is "
              << verdict << "\n";
    return kExitOk;
}

int cmd_match(const Options& o) {
    const auto formats = parse_formats(o);
    const auto built = build_plant(o);
    const auto grid = spectral_grid(o, built.plant);
    const auto res = sikf::matching_test(built.plant, grid, o.match_tol);

    if (formats.count("json")) {
        fs::create_directories(o.out);
        json j;
        j["command"] = "match";
        j["matched"] = res.matched;
        j["ell"] = res.ell;
        j["max_residual"] = res.max_residual;
        j["tol"] = o.match_tol;
        write_file(fs::path(o.out) / "match.json", j.dump(2) + "\n");
    }
    if (res.matched)
        std::cout << "matched: completely decentralized filter with gain ell = "
                  << sikf::format_double(res.ell) << "\n";
    else
        std::cout << "not matched (max residual "
                  << sikf::format_double(res.max_residual) << ", tol "
                  << sikf::format_double(o.match_tol) << ")\n";
    return kExitOk;
}

int cmd_casestudy(const Options& o) {
    if (o.case_name.empty())
        throw sikf::input_error("casestudy requires --case");
    const auto cs = build_case(o);

    int rc = cmd_validate(o);
    if (rc != kExitOk) return rc;

    Options synth_opts = o;
    synth_opts.sweep_param.clear();
    synth_opts.sweep_values.clear();
    cmd_synth(synth_opts);

    Options sweep_opts = o;
    if (o.sweep_param.empty()) {
        // default sweep of the family's natural parameter around its value
        if (cs.kind == sikf::CaseKind::diffusion_white) {
            sweep_opts.sweep_param = "lstar";
            const double base = cs.groups.l_star;
            sweep_opts.sweep_values = {0.25 * base, 0.5 * base, base, 2.0 * base,
                                       4.0 * base};
        } else {
            sweep_opts.sweep_param = "pistar";
            const double base = cs.groups.pi_star > 0.0 ? cs.groups.pi_star : 1.0;
            sweep_opts.sweep_values = {0.25 * base, 0.5 * base, base, 2.0 * base,
                                       4.0 * base};
        }
    }
    cmd_bpl(sweep_opts);
    cmd_perf(sweep_opts);

    if (cs.plant.c_is_identity()) cmd_match(o);

    json j;
    j["case"] = sikf::to_string(cs.kind);
    j["l_star"] = cs.groups.l_star;
    j["pi_star"] = cs.groups.pi_star;
    j["pi_definition"] = cs.groups.pi_definition;
    j["oracle"] = {{"theta", cs.oracle.theta},
                   {"theta_dimensionless", cs.oracle.theta_dimensionless},
                   {"delta_strength", cs.oracle.delta_strength},
                   {"matched", cs.oracle.matched}};
    if (cs.oracle.var_e) j["oracle"]["var_e"] = *cs.oracle.var_e;
    write_file(fs::path(o.out) / "casestudy.json", j.dump(2) + "\n");

    std::cout << "casestudy: full bundle in " << o.out << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral synthesis and spatial-locality analysis of optimal "
                 "estimators for spatially invariant plants"};
    app.require_subcommand(1);
    app.footer("exit codes: 0 ok, 1 usage or parse error, 2 assumption violation, "
               "3 numerical or grid failure");

    Options o;
    std::function<int()> action;

    auto* validate = app.add_subcommand("validate", "check plant assumptions");
    add_input_options(validate, o);
    validate->callback([&] { action = [&] { return cmd_validate(o); }; });

    auto* synth = app.add_subcommand(
        "synth", "solve the spectral Riccati family and reconstruct the gain kernel");
    add_input_options(synth, o);
    add_grid_options(synth, o);
    add_sweep_options(synth, o);
    synth->add_option("--truncate", o.truncate_radii,
                      "report retained kernel mass inside these radii")
        ->delimiter(',');
    synth->callback([&] { action = [&] { return cmd_synth(o); }; });

    auto* bpl = app.add_subcommand("bpl", "branch point locus over a parameter sweep");
    add_input_options(bpl, o);
    add_grid_options(bpl, o);
    add_sweep_options(bpl, o);
    bpl->callback([&] { action = [&] { return cmd_bpl(o); }; });

    auto* perf = app.add_subcommand("perf", "error variance over a parameter sweep");
    add_input_options(perf, o);
    add_grid_options(perf, o);
    add_sweep_options(perf, o);
    perf->callback([&] { action = [&] { return cmd_perf(o); }; });

    auto* match = app.add_subcommand("match", "complete-decentralization matching test");
    add_input_options(match, o);
    add_grid_options(match, o);
    match->add_option("--tol", o.match_tol, "matching tolerance");
    match->callback([&] { action = [&] { return cmd_match(o); }; });

    auto* casestudy = app.add_subcommand("casestudy",
                                         "emit the full report bundle for a case study");
    add_input_options(casestudy, o);
    add_grid_options(casestudy, o);
    add_sweep_options(casestudy, o);
    casestudy->callback([&] { action = [&] { return cmd_casestudy(o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action();
    } catch (const sikf::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const sikf::assumption_error& e) {
        std::cerr << "assumption violation: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const sikf::error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
