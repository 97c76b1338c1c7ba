#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "elastnp/elastic.hpp"
#include "elastnp/geometry.hpp"
#include "elastnp/numerics.hpp"
#include "elastnp/symbol.hpp"

namespace elastnp {

// (sum of squared positive eigenvalues, sum of squared negative eigenvalues)
std::pair<double, double> tr_pm_squared(const Mat3C& h);

struct AsymptoticCoefficients {
    int iota = 0;
    double Cplus = 0, Cminus = 0, Ctotal = 0;
    double A = 0, B = 0;
    double W = 0;    // Willmore energy
    double chi = 0;  // Euler characteristic
    double two_path_residual = 0;  // |Ctotal - (A W + B chi)| / |Ctotal|
    double drift = 0;              // relative change of Ctotal under grid doubling
    bool under_resolved = false;
};

struct CoefficientOptions {
    Resolution surface{64, 64};
    int n_theta = 256;
    bool check_doubling = true;
    double drift_tolerance = 1e-6;
};

// Reduced symbols b = z M q and z (V M V) q on the theta grid; the reduction is linear
// in m, so b(k1, k2) = k1 bM + k2 bV.
class ReducedTable {
public:
    ReducedTable(int iota, const LameMaterial& m, int n_theta);
    int iota() const { return iota_; }
    int size() const { return static_cast<int>(bm_.size()); }
    const Mat3C& bM(int k) const { return bm_[k]; }
    const Mat3C& bV(int k) const { return bv_[k]; }
    Mat3C at(int k, double k1, double k2) const { return cplx(k1) * bm_[k] + cplx(k2) * bv_[k]; }

private:
    int iota_;
    std::vector<Mat3C> bm_, bv_;
};

struct CpmSums {
    double plus = 0, minus = 0, total = 0;
};
// 1/2 (2 pi)^-2 sum_nodes w sum_theta w_theta Tr+-^2(b)
CpmSums cpm_from_quadrature(const SurfaceQuadrature& q, const ReducedTable& table);

// C+, C-, Ctotal (A, B, W, chi filled too) on a configured surface
AsymptoticCoefficients coeff_Cpm(const Surface& s, int iota, const LameMaterial& m, const CoefficientOptions& opt = {});
double coeff_C_total(const Surface& s, int iota, const LameMaterial& m, const CoefficientOptions& opt = {});

struct ABConstants {
    double A = 0, B = 0;
    double I1 = 0, I2 = 0;  // theta integrals of Tr(bM^2), Tr(bM bV)
};
ABConstants coeff_AB(int iota, const LameMaterial& m, int n_theta = 512);
// 2 A / pi + 2 B
double upsilon(const ABConstants& ab);

// Closed-form ball spectrum, n = 1..nmax, multiplicity 2n+1.
struct SphereSpectrum {
    LameMaterial material;
    int nmax = 0;
    std::vector<double> zero, minus, plus;  // index n-1

    static int multiplicity(int n) { return 2 * n + 1; }
    // all three series as (value, multiplicity)
    std::vector<std::pair<double, int>> all() const;
    // distance from the essential point of the last computed member of the series that
    // accumulates there; counts below this distance are incomplete
    double truncation_limit(int iota) const;
};
SphereSpectrum sphere_exact_eigs(const LameMaterial& m, int nmax);

enum class Side { above, below };

struct CountingWindow {
    // reference distance tau_ref (open far end of the window); nullopt = unbounded, meaningful
    // only for a spectrum made of the single series accumulating at omega
    std::optional<double> tau_ref;
    double gap = 0;  // distance to the nearest other essential point; tau_ref must stay below it
    double truncation_limit = 0;
};

struct CountingCurve {
    double omega = 0;
    Side side = Side::above;
    std::vector<double> taus;    // descending
    std::vector<long long> counts;
    std::vector<bool> truncated;  // tau at or below the truncation limit
    std::optional<double> fitted_coeff;
};

CountingCurve counting_curve(const std::vector<std::pair<double, int>>& spectrum, double omega, Side side,
                             const std::vector<double>& taus, const CountingWindow& window);

std::vector<double> log_tau_grid(double tau_max, double tau_min, int points);

struct TauFit {
    double coefficient = 0;
    double min = 0, max = 0;
    double spread = 0;  // (max - min) / median
    int used = 0;
    bool low_confidence = false;
};
TauFit fit_tau_minus2(CountingCurve& curve);

std::string counting_curve_csv(const CountingCurve& c);
nlohmann::json coefficients_to_json(const AsymptoticCoefficients& c);
AsymptoticCoefficients coefficients_from_json(const nlohmann::json& j);

}  // namespace elastnp
