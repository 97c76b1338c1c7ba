#include "elastnp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "elastnp/parallel.hpp"

namespace elastnp {

using nlohmann::json;

std::pair<double, double> tr_pm_squared(const Mat3C& h) {
    const double scale = std::max(frobenius(h), 1e-300);
    const double defect = hermitian_defect(h);
    if (defect > 1e-10 * scale) {
        std::ostringstream os;
        os << "tr_pm_squared: matrix is not Hermitian (asymmetry " << defect << "), spectrum may be complex";
        throw NumericalError(os.str());
    }
    const auto ev = hermitian_eigvals3(0.5 * (h + adjoint(h)));
    double plus = 0, minus = 0;
    for (double v : ev) (v > 0 ? plus : minus) += v * v;
    return {plus, minus};
}

ReducedTable::ReducedTable(int iota, const LameMaterial& m, int n_theta) : iota_(iota) {
    const UniversalTable u(iota, m, n_theta);
    bm_.reserve(n_theta);
    bv_.reserve(n_theta);
    for (int k = 0; k < n_theta; ++k) {
        bm_.push_back(hermitian_reduce(u.M(k), u.direction(k), m));
        bv_.push_back(hermitian_reduce(u.swapped(k), u.direction(k), m));
    }
}

namespace {

double trace_square(const Mat3C& b) {
    double s = 0;
    for (const auto& x : b.a) s += std::norm(x);
    return s;
}

struct NodeSums {
    double plus = 0, minus = 0, total = 0;
};

}  // namespace

CpmSums cpm_from_quadrature(const SurfaceQuadrature& q, const ReducedTable& table) {
    const std::size_t n = q.nodes.size();
    std::vector<NodeSums> per(n);
    const int nt = table.size();
    parallel_for(n, [&](std::size_t i) {
        const double k1 = q.nodes[i].kappa1, k2 = q.nodes[i].kappa2;
        NodeSums s;
        for (int k = 0; k < nt; ++k) {
            const Mat3C b = table.at(k, k1, k2);
            const auto [p, m] = tr_pm_squared(b);
            s.plus += p;
            s.minus += m;
            s.total += trace_square(b);
        }
        per[i] = s;
    });
    const double c = 0.5 / (4.0 * M_PI * M_PI) * (2.0 * M_PI / nt);
    CpmSums out;
    for (std::size_t i = 0; i < n; ++i) {
        out.plus += q.weights[i] * per[i].plus;
        out.minus += q.weights[i] * per[i].minus;
        out.total += q.weights[i] * per[i].total;
    }
    out.plus *= c;
    out.minus *= c;
    out.total *= c;
    return out;
}

ABConstants coeff_AB(int iota, const LameMaterial& m, int n_theta) {
    if (n_theta < 256) throw std::invalid_argument("coeff_AB: theta grid must have at least 256 points");
    const ReducedTable t(iota, m, n_theta);
    ABConstants ab;
    for (int k = 0; k < n_theta; ++k) {
        const Mat3C& b = t.bM(k);
        const Mat3C& c = t.bV(k);
        ab.I1 += trace_square(b);
        ab.I2 += trace(b * c).real();
    }
    ab.I1 *= 2.0 * M_PI / n_theta;
    ab.I2 *= 2.0 * M_PI / n_theta;
    // Tr b^2 integrates to (k1^2 + k2^2) I1 + 2 k1 k2 I2 = 4H^2 I1 + 2K (I2 - I1)
    ab.A = ab.I1 / (2.0 * M_PI * M_PI);
    ab.B = (ab.I2 - ab.I1) / (2.0 * M_PI);
    return ab;
}

double upsilon(const ABConstants& ab) { return 2.0 / M_PI * ab.A + 2.0 * ab.B; }

namespace {

AsymptoticCoefficients evaluate_once(const Surface& s, int iota, const LameMaterial& m, Resolution res,
                                     int n_theta) {
    const auto q = s.quadrature(res);
    const ReducedTable table(iota, m, n_theta);
    const auto sums = cpm_from_quadrature(q, table);
    AsymptoticCoefficients c;
    c.iota = iota;
    c.Cplus = sums.plus;
    c.Cminus = sums.minus;
    c.Ctotal = sums.total;
    double w = 0, k = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const auto& nd = q.nodes[i];
        const double h = 0.5 * (nd.kappa1 + nd.kappa2);
        w += q.weights[i] * h * h;
        k += q.weights[i] * nd.kappa1 * nd.kappa2;
    }
    c.W = w;
    c.chi = k / (2.0 * M_PI);
    if (s.closed()) {
        if (std::abs(c.chi - std::round(c.chi)) > 1e-6) {
            std::ostringstream os;
            os << "coefficients: Gauss-Bonnet gives " << c.chi << ", surface quadrature too coarse";
            throw NumericalError(os.str());
        }
        c.chi = std::round(c.chi);
    }
    // A, B on a different theta grid than the surface sum, so the comparison is not tautological
    const auto ab = coeff_AB(iota, m, std::max(256, 2 * n_theta + 2));
    c.A = ab.A;
    c.B = ab.B;
    const double pred = c.A * c.W + c.B * c.chi;
    c.two_path_residual = std::abs(c.Ctotal - pred) / std::max(std::abs(c.Ctotal), 1e-300);
    if (c.Ctotal == 0.0 && pred == 0.0) c.two_path_residual = 0.0;
    return c;
}

}  // namespace

AsymptoticCoefficients coeff_Cpm(const Surface& s, int iota, const LameMaterial& m, const CoefficientOptions& opt) {
    if (iota < -1 || iota > 1) throw std::invalid_argument("iota must be -1, 0 or 1");
    if (opt.n_theta < 64) throw std::invalid_argument("coefficients: theta grid must have at least 64 points");
    if (!opt.check_doubling) return evaluate_once(s, iota, m, opt.surface, opt.n_theta);
    const auto coarse = evaluate_once(s, iota, m, opt.surface, opt.n_theta);
    auto fine = evaluate_once(s, iota, m, Resolution{2 * opt.surface.nu, 2 * opt.surface.nv}, 2 * opt.n_theta);
    const double d = std::abs(fine.Ctotal - coarse.Ctotal);
    fine.drift = fine.Ctotal != 0.0 ? d / std::abs(fine.Ctotal) : d;
    fine.under_resolved = fine.drift > opt.drift_tolerance;
    return fine;
}

double coeff_C_total(const Surface& s, int iota, const LameMaterial& m, const CoefficientOptions& opt) {
    return coeff_Cpm(s, iota, m, opt).Ctotal;
}

// ---- ball spectrum and counting ----

SphereSpectrum sphere_exact_eigs(const LameMaterial& m, int nmax) {
    if (nmax < 1) throw std::invalid_argument("sphere_exact_eigs: nmax >= 1");
    SphereSpectrum s{m, nmax, {}, {}, {}};
    const double lam = m.lambda(), mu = m.mu();
    for (int n = 1; n <= nmax; ++n) {
        const double nn = n;
        const double den = 2.0 * (lam + 2.0 * mu) * (4.0 * nn * nn - 1.0);
        s.zero.push_back(3.0 / (2.0 * (2.0 * nn + 1.0)));
        s.minus.push_back((3.0 * lam - 2.0 * mu * (2.0 * nn * nn - 2.0 * nn - 3.0)) / den);
        s.plus.push_back((-3.0 * lam + 2.0 * mu * (2.0 * nn * nn + 2.0 * nn - 3.0)) / den);
    }
    return s;
}

std::vector<std::pair<double, int>> SphereSpectrum::all() const {
    std::vector<std::pair<double, int>> out;
    out.reserve(3 * nmax);
    for (int n = 1; n <= nmax; ++n) {
        out.emplace_back(zero[n - 1], multiplicity(n));
        out.emplace_back(minus[n - 1], multiplicity(n));
        out.emplace_back(plus[n - 1], multiplicity(n));
    }
    return out;
}

double SphereSpectrum::truncation_limit(int iota) const {
    const double k = material.kappa();
    switch (iota) {
        case 0: return std::abs(zero.back());
        case -1: return std::abs(minus.back() + k);
        case 1: return std::abs(plus.back() - k);
        default: throw std::invalid_argument("iota must be -1, 0 or 1");
    }
}

CountingCurve counting_curve(const std::vector<std::pair<double, int>>& spectrum, double omega, Side side,
                             const std::vector<double>& taus, const CountingWindow& window) {
    if (taus.empty()) throw std::invalid_argument("counting_curve: empty tau grid");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] > 0.0)) throw std::invalid_argument("counting_curve: tau values must be positive");
        if (i > 0 && !(taus[i] < taus[i - 1])) throw std::invalid_argument("counting_curve: tau grid must be descending");
    }
    if (window.tau_ref) {
        if (!(*window.tau_ref > 0.0)) throw std::invalid_argument("counting_curve: reference distance must be positive");
        if (window.gap > 0.0 && !(*window.tau_ref < window.gap))
            throw std::invalid_argument("counting_curve: reference window reaches another essential point");
        if (!(taus.front() < *window.tau_ref))
            throw std::invalid_argument("counting_curve: tau grid must lie inside the reference window");
    }
    const double far = window.tau_ref.value_or(std::numeric_limits<double>::infinity());

    // signed distances on the requested side, sorted, then one sweep down the tau grid
    std::vector<std::pair<double, int>> d;
    for (const auto& [v, mult] : spectrum) {
        const double t = side == Side::above ? v - omega : omega - v;
        if (t > 0.0 && t < far) d.emplace_back(t, mult);
    }
    std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    CountingCurve c;
    c.omega = omega;
    c.side = side;
    c.taus = taus;
    long long count = 0;
    std::size_t k = 0;
    for (double tau : taus) {
        while (k < d.size() && d[k].first > tau) count += d[k++].second;
        c.counts.push_back(count);
        c.truncated.push_back(tau <= window.truncation_limit);
    }
    return c;
}

std::vector<double> log_tau_grid(double tau_max, double tau_min, int points) {
    if (!(tau_max > tau_min) || !(tau_min > 0.0) || points < 2)
        throw std::invalid_argument("log_tau_grid: need tau_max > tau_min > 0 and at least 2 points");
    std::vector<double> g;
    const double r = std::log(tau_min / tau_max);
    for (int i = 0; i < points; ++i) g.push_back(tau_max * std::exp(r * i / (points - 1)));
    g.back() = tau_min;
    return g;
}

TauFit fit_tau_minus2(CountingCurve& curve) {
    const auto& t = curve.taus;
    if (t.size() < 10) throw std::invalid_argument("fit_tau_minus2: need at least 10 grid points");
    const double decades = std::log10(t.front() / t.back());
    if (decades < 1.0 - 1e-9) throw std::invalid_argument("fit_tau_minus2: grid must span at least one decade");
    const double top = t.back() * 10.0 * (1.0 + 1e-12);
    std::vector<double> vals;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > top) continue;
        if (!curve.truncated.empty() && curve.truncated[i]) continue;
        vals.push_back(static_cast<double>(curve.counts[i]) * t[i] * t[i]);
    }
    TauFit f;
    f.used = static_cast<int>(vals.size());
    if (vals.empty()) {
        f.low_confidence = true;
        curve.fitted_coeff.reset();
        return f;
    }
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    f.coefficient = n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
    f.min = vals.front();
    f.max = vals.back();
    f.spread = f.coefficient > 0 ? (f.max - f.min) / f.coefficient : (f.max > 0 ? INFINITY : 0.0);
    f.low_confidence = f.spread > 0.25 || n < 3;
    curve.fitted_coeff = f.coefficient;
    return f;
}

namespace {

std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::string counting_curve_csv(const CountingCurve& c) {
    std::ostringstream os;
    os << "tau,count,count_times_tau2\n";
    for (std::size_t i = 0; i < c.taus.size(); ++i)
        os << fmt17(c.taus[i]) << "," << c.counts[i] << ","
           << fmt17(static_cast<double>(c.counts[i]) * c.taus[i] * c.taus[i]) << "\n";
    return os.str();
}

json coefficients_to_json(const AsymptoticCoefficients& c) {
    return json{{"iota", c.iota},
                {"Cplus", c.Cplus},
                {"Cminus", c.Cminus},
                {"Ctotal", c.Ctotal},
                {"A", c.A},
                {"B", c.B},
                {"W", c.W},
                {"chi", c.chi},
                {"two_path_residual", c.two_path_residual},
                {"drift", c.drift},
                {"under_resolved", c.under_resolved}};
}

AsymptoticCoefficients coefficients_from_json(const json& j) {
    static const std::vector<std::string> keys{"iota", "Cplus", "Cminus", "Ctotal", "A", "B",
                                               "W", "chi", "two_path_residual", "drift", "under_resolved"};
    if (!j.is_object()) throw std::invalid_argument("coefficients: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw std::invalid_argument("coefficients: unknown key '" + it.key() + "'");
    AsymptoticCoefficients c;
    c.iota = j.at("iota").get<int>();
    c.Cplus = j.at("Cplus").get<double>();
    c.Cminus = j.at("Cminus").get<double>();
    c.Ctotal = j.at("Ctotal").get<double>();
    c.A = j.at("A").get<double>();
    c.B = j.at("B").get<double>();
    c.W = j.at("W").get<double>();
    c.chi = j.at("chi").get<double>();
    c.two_path_residual = j.value("two_path_residual", 0.0);
    c.drift = j.value("drift", 0.0);
    c.under_resolved = j.value("under_resolved", false);
    return c;
}

}  // namespace elastnp
