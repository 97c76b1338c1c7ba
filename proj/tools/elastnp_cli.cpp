#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "elastnp/asymptotics.hpp"
#include "elastnp/elastic.hpp"
#include "elastnp/geometry.hpp"
#include "elastnp/nystrom.hpp"
#include "elastnp/symbol.hpp"

using namespace elastnp;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num17(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "NaN" : (v > 0 ? "Infinity" : "-Infinity");
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON writer with every float at 17 significant digits; object keys keep insertion order
// from nlohmann (sorted), so output is deterministic.
void dump17(const json& j, std::ostream& os, int indent = 0) {
    const std::string pad(indent, ' '), pad2(indent + 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad2 << json(it.key()).dump() << ": ";
                dump17(it.value(), os, indent + 2);
            }
            os << "\n" << pad << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            bool scalars = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
            if (scalars) {
                os << "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) os << ", ";
                    dump17(j[i], os, indent);
                }
                os << "]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad2;
                dump17(j[i], os, indent + 2);
            }
            os << "\n" << pad << "]";
            return;
        }
        case json::value_t::number_float: os << num17(j.get<double>()); return;
        default: os << j.dump(); return;
    }
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    f << text;
}

std::string json_text(const json& j) {
    std::ostringstream os;
    dump17(j, os);
    os << "\n";
    return os.str();
}

SurfaceSpec load_surface(const std::string& arg) {
    if (arg.empty()) throw ConfigError("--surface is required");
    json j;
    std::string src = arg;
    if (arg.find_first_not_of(" \t\n") != std::string::npos && arg[arg.find_first_not_of(" \t\n")] != '{') {
        std::ifstream f(arg);
        if (!f) throw ConfigError("surface file '" + arg + "' not found");
        std::stringstream ss;
        ss << f.rdbuf();
        src = ss.str();
    }
    try {
        j = json::parse(src);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("surface JSON: ") + e.what());
    }
    return surface_from_json(j);
}

std::vector<int> iota_list(const std::string& sel) {
    if (sel == "all") return {-1, 0, 1};
    if (sel == "-1" || sel == "minus") return {-1};
    if (sel == "0" || sel == "zero") return {0};
    if (sel == "1" || sel == "+1" || sel == "plus") return {1};
    throw ConfigError("iota must be -1, 0, 1 or all");
}

struct Common {
    double lambda = 1.0, mu = 1.0;
    std::string output;
    LameMaterial material() const { return LameMaterial(lambda, mu); }
};

void add_material(CLI::App* sub, Common& c) {
    sub->add_option("--lambda", c.lambda, "Lame lambda")->capture_default_str();
    sub->add_option("--mu", c.mu, "shear modulus mu")->capture_default_str();
    sub->add_option("-o,--output", c.output, "output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral asymptotics of the elastic Neumann-Poincare operator"};
    app.require_subcommand(1, 1);
    Common common;

    auto* material = app.add_subcommand("material", "derived material constants (JSON)");
    add_material(material, common);

    auto* sphere = app.add_subcommand("sphere-exact", "counting curve from the closed-form ball spectrum (CSV)");
    add_material(sphere, common);
    std::string omega_sel = "zero", side_sel = "above";
    int nmax = 2000, tau_points = 41;
    double tau_min = 0, tau_max = 0, tau_ref = 0;
    sphere->add_option("--omega", omega_sel, "essential point: minus, zero, plus")
        ->check(CLI::IsMember({"minus", "zero", "plus"}))
        ->capture_default_str();
    sphere->add_option("--side", side_sel, "above or below")->check(CLI::IsMember({"above", "below"}))->capture_default_str();
    sphere->add_option("--nmax", nmax, "highest degree n")->check(CLI::Range(1, 10000000))->capture_default_str();
    sphere->add_option("--tau-min", tau_min, "smallest tau (default: lower end of the standard window)");
    sphere->add_option("--tau-max", tau_max, "largest tau (default: upper end of the standard window)");
    sphere->add_option("--tau-points", tau_points, "number of log-spaced tau values")->check(CLI::Range(2, 100000))->capture_default_str();
    sphere->add_option("--tau-ref", tau_ref, "outer window distance (default 10 tau_max)");

    auto* universal = app.add_subcommand("universal-matrix", "universal matrix over a theta grid (JSON)");
    add_material(universal, common);
    std::string iota_sel = "all";
    int n_theta = 256;
    universal->add_option("--iota", iota_sel, "-1, 0, 1 or all")->capture_default_str();
    universal->add_option("--n-theta", n_theta, "theta samples")->check(CLI::Range(4, 1 << 20))->capture_default_str();

    auto* coeffs = app.add_subcommand("coeffs", "asymptotic coefficients of a surface (JSON)");
    add_material(coeffs, common);
    std::string surface_arg;
    int n_surface = 64;
    bool no_doubling = false;
    double drift_tol = 1e-6;
    coeffs->add_option("--surface", surface_arg, "surface JSON, inline or a file path")->required();
    coeffs->add_option("--iota", iota_sel, "-1, 0, 1 or all")->capture_default_str();
    coeffs->add_option("--n-surface", n_surface, "quadrature points per chart direction")->check(CLI::Range(4, 2048))->capture_default_str();
    coeffs->add_option("--n-theta", n_theta, "theta samples")->check(CLI::Range(64, 1 << 20))->capture_default_str();
    coeffs->add_flag("--no-doubling", no_doubling, "skip the grid-doubling check");
    coeffs->add_option("--drift-tol", drift_tol, "relative drift allowed under grid doubling")->capture_default_str();

    auto* discretize = app.add_subcommand("discretize", "Nystrom spectrum of a closed surface");
    add_material(discretize, common);
    int n_grid = 13;
    double tau = 0.01, window_ref = 0.05;
    std::string eig_path;
    discretize->add_option("--surface", surface_arg, "surface JSON, inline or a file path")->required();
    discretize->add_option("--n-grid", n_grid, "cells per cube-face edge (torus: tube cells)")->check(CLI::Range(2, 200))->capture_default_str();
    discretize->add_option("--tau", tau, "inner cluster distance")->capture_default_str();
    discretize->add_option("--tau-ref", window_ref, "outer cluster distance")->capture_default_str();
    discretize->add_option("--eigenvalues", eig_path, "write eigenvalue CSV here");

    auto* audit = app.add_subcommand("audit-subsymbol", "term-wise comparison with tabulated subsymbol forms (text)");
    int audit_theta = 16;
    std::string audit_out;
    audit->add_option("--n-theta", audit_theta, "directions")->check(CLI::Range(4, 4096))->capture_default_str();
    audit->add_option("-o,--output", audit_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*material) {
            const auto m = common.material();
            json j{{"lambda", m.lambda()},     {"mu", m.mu()},
                   {"kappa", m.kappa()},       {"em", m.em()},
                   {"lambda_prime", m.lambda_prime()}, {"mu_prime", m.mu_prime()},
                   {"essential_points", json::array({-m.kappa(), 0.0, m.kappa()})}};
            emit(json_text(j), common.output);
        } else if (*sphere) {
            const auto m = common.material();
            const int iota = omega_sel == "minus" ? -1 : omega_sel == "zero" ? 0 : 1;
            const double k = m.kappa();
            const double scale = iota == 0 ? 1.0 : k;
            const double lo = tau_min > 0 ? tau_min : (iota == 0 ? 3e-4 : 6e-4 * scale);
            const double hi = tau_max > 0 ? tau_max : (iota == 0 ? 3e-3 : 6e-3 * scale);
            const auto spec = sphere_exact_eigs(m, nmax);
            CountingWindow w;
            w.tau_ref = tau_ref > 0 ? tau_ref : 10.0 * hi;
            w.gap = k;
            w.truncation_limit = side_sel == "above" ? spec.truncation_limit(iota) : 0.0;
            auto curve = counting_curve(spec.all(), iota * k, side_sel == "above" ? Side::above : Side::below,
                                        log_tau_grid(hi, lo, tau_points), w);
            emit(counting_curve_csv(curve), common.output);
            if (tau_points >= 10) {
                const auto fit = fit_tau_minus2(curve);
                std::cerr << "fitted coefficient " << num17(fit.coefficient) << " (spread " << num17(fit.spread)
                          << (fit.low_confidence ? ", low confidence" : "") << ")\n";
            }
        } else if (*universal) {
            const auto m = common.material();
            json out{{"lambda", m.lambda()}, {"mu", m.mu()}, {"n_theta", n_theta}, {"tables", json::array()}};
            for (int iota : iota_list(iota_sel)) {
                const UniversalTable t(iota, m, n_theta);
                json rows = json::array();
                for (int k = 0; k < t.size(); ++k) {
                    json re = json::array(), im = json::array();
                    for (int r = 0; r < 3; ++r) {
                        json rr = json::array(), ri = json::array();
                        for (int c = 0; c < 3; ++c) {
                            rr.push_back(t.M(k)(r, c).real());
                            ri.push_back(t.M(k)(r, c).imag());
                        }
                        re.push_back(rr);
                        im.push_back(ri);
                    }
                    rows.push_back({{"theta", t.direction(k).theta}, {"re", re}, {"im", im}});
                }
                out["tables"].push_back({{"iota", iota}, {"samples", rows}});
            }
            emit(json_text(out), common.output);
        } else if (*coeffs) {
            const auto m = common.material();
            const Surface s(load_surface(surface_arg));
            CoefficientOptions opt;
            opt.surface = {n_surface, n_surface};
            opt.n_theta = n_theta;
            opt.check_doubling = !no_doubling;
            opt.drift_tolerance = drift_tol;
            json out{{"surface", surface_to_json(s.spec())}, {"lambda", m.lambda()}, {"mu", m.mu()},
                     {"coefficients", json::array()}};
            bool bad = false;
            for (int iota : iota_list(iota_sel)) {
                const auto c = coeff_Cpm(s, iota, m, opt);
                bad = bad || c.under_resolved;
                out["coefficients"].push_back(coefficients_to_json(c));
            }
            emit(json_text(out), common.output);
            if (bad) {
                std::cerr << "error: coefficients drift under grid doubling beyond " << drift_tol << "\n";
                return kExitNumerical;
            }
        } else if (*discretize) {
            const auto m = common.material();
            const Surface s(load_surface(surface_arg));
            const auto sys = assemble_np(s, m, n_grid);
            const auto sample = np_spectrum(sys);
            const ClusterWindow w{tau, window_ref};
            const auto counts = cluster_counts(sample, m, w);
            if (!eig_path.empty()) emit(eigenvalues_csv(sample), eig_path);
            json out = cluster_json(counts, sample, w);
            out["nodes"] = sys.nodes();
            emit(json_text(out), common.output);
        } else if (*audit) {
            emit(audit_subsymbol_report(audit_theta), audit_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
