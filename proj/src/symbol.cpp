#include "elastnp/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace elastnp {

namespace {

const cplx I(0.0, 1.0);

void check_iota(int iota) {
    if (iota < -1 || iota > 1) throw std::invalid_argument("iota must be -1, 0 or 1");
}

// i * kappa * (e3 t^T - t e3^T) pattern used by k0 and its xi-derivatives
Mat3C normal_tangent_pattern(double kappa, double t1, double t2) {
    Mat3C r;
    r(0, 2) = -I * kappa * t1;
    r(1, 2) = -I * kappa * t2;
    r(2, 0) = I * kappa * t1;
    r(2, 1) = I * kappa * t2;
    return r;
}

}  // namespace

Mat3C k0(const CircleDirection& dir, const LameMaterial& m) { return normal_tangent_pattern(m.kappa(), dir.phi1, dir.phi2); }

K0Eigensystem k0_eigensystem(const CircleDirection& dir, const LameMaterial& m) {
    const double s = 1.0 / std::sqrt(2.0);
    K0Eigensystem e;
    e.values = {-m.kappa(), 0.0, m.kappa()};
    e.vectors[0] = {s * dir.phi1, s * dir.phi2, -I * s};
    e.vectors[1] = {-dir.phi2, dir.phi1, 0.0};
    e.vectors[2] = {s * dir.phi1, s * dir.phi2, I * s};
    return e;
}

Mat3C spectral_projector(int iota, const CircleDirection& dir, const LameMaterial& m) {
    check_iota(iota);
    const auto e = k0_eigensystem(dir, m);
    const auto& v = e.vectors[iota + 1];
    Mat3C p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p(i, j) = v[i] * std::conj(v[j]);
    return p;
}

Mat3C dk0_dxi(int alpha, const CircleDirection& dir, const LameMaterial& m) {
    // derivative of xi/|xi| at |xi| = 1
    const double p1 = dir.phi1, p2 = dir.phi2;
    if (alpha == 0) return normal_tangent_pattern(m.kappa(), p2 * p2, -p1 * p2);
    if (alpha == 1) return normal_tangent_pattern(m.kappa(), -p1 * p2, p1 * p1);
    throw std::invalid_argument("dk0_dxi: alpha must be 0 or 1");
}

Mat3C dk0_dx(int alpha, const CircleDirection& dir, const LameMaterial& m, double k1, double k2) {
    if (alpha != 0 && alpha != 1) throw std::invalid_argument("dk0_dx: alpha must be 0 or 1");
    // k0(x, xi) = i kappa (nu s^T - s nu^T) with nu, s the normal and the unit tangent dual to xi;
    // along x_alpha the normal tilts by -k_alpha e_alpha and the tangent by k_alpha t_alpha e3
    const double kap = alpha == 0 ? k1 : k2;
    const std::array<double, 3> t{dir.phi1, dir.phi2, 0.0};
    Mat3C r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double ea_i = (i == alpha) ? 1.0 : 0.0, ea_j = (j == alpha) ? 1.0 : 0.0;
            r(i, j) = -I * m.kappa() * kap * (ea_i * t[j] - t[i] * ea_j);
        }
    return r;
}

Mat3C dk0_dx1_cylinder(const CircleDirection& dir, const LameMaterial& m, double curvature) {
    return dk0_dx(0, dir, m, curvature, 0.0);
}

bool ft_supported(int a, int b, int p) {
    static const std::array<std::array<int, 3>, 11> table{{{2, 0, 3}, {1, 1, 3}, {0, 2, 3}, {1, 0, 3}, {0, 1, 3},
                                                          {4, 0, 5}, {3, 1, 5}, {2, 2, 5}, {1, 3, 5}, {0, 4, 5},
                                                          {0, 0, 1}}};
    return std::find(table.begin(), table.end(), std::array<int, 3>{a, b, p}) != table.end();
}

namespace {

// c * x1^e1 x2^e2 |x|^pw
struct RadialTerm {
    double c;
    int e1, e2, pw;
};

std::vector<RadialTerm> differentiate(const std::vector<RadialTerm>& f, int axis) {
    std::vector<RadialTerm> out;
    for (const auto& t : f) {
        const int e = axis == 0 ? t.e1 : t.e2;
        if (e > 0) {
            RadialTerm d = t;
            d.c *= e;
            (axis == 0 ? d.e1 : d.e2) -= 1;
            out.push_back(d);
        }
        if (t.pw != 0) {
            RadialTerm d = t;
            d.c *= t.pw;
            (axis == 0 ? d.e1 : d.e2) += 1;
            d.pw -= 2;
            out.push_back(d);
        }
    }
    return out;
}

}  // namespace

cplx ft_homogeneous(int a, int b, int p, const CircleDirection& dir) {
    if (!ft_supported(a, b, p)) {
        std::ostringstream os;
        os << "ft_homogeneous: unsupported monomial (" << a << "," << b << "," << p << ")";
        throw std::invalid_argument(os.str());
    }
    // F[|y|^-p] = 2^{2-p} pi Gamma(1 - p/2) / Gamma(p/2) |xi|^{p-2} in the plane, and
    // multiplication by y_j is i d/dxi_j
    const double c = std::pow(2.0, 2 - p) * M_PI * std::tgamma(1.0 - 0.5 * p) / std::tgamma(0.5 * p) / (2.0 * M_PI);
    std::vector<RadialTerm> f{{c, 0, 0, p - 2}};
    for (int k = 0; k < a; ++k) f = differentiate(f, 0);
    for (int k = 0; k < b; ++k) f = differentiate(f, 1);
    double s = 0;
    for (const auto& t : f) s += t.c * std::pow(dir.phi1, t.e1) * std::pow(dir.phi2, t.e2);
    cplx ipow = 1.0;
    for (int k = 0; k < a + b; ++k) ipow *= I;
    return ipow * s;
}

Mat3C symbol_of_terms(const std::vector<MonomialTerm>& terms, const CircleDirection& dir, MaterialWeights w) {
    Mat3C r;
    for (const auto& t : terms) {
        const double c = t.c_kappa * w.kappa + t.c_em * w.em;
        if (c == 0.0) continue;
        r(t.row, t.col) += c * ft_homogeneous(t.a, t.b, t.p, dir);
    }
    return r;
}

Mat3C subsymbol(const CircleDirection& dir, MaterialWeights w, double k1, double k2) {
    const auto e = quadric_kernel_expansion(k1, k2);
    return symbol_of_terms(e.antisym, dir, w) + symbol_of_terms(e.normal, dir, w);
}

Mat3C subsymbol_cylinder(const CircleDirection& dir, const LameMaterial& m, double curvature) {
    return subsymbol(dir, MaterialWeights::of(m), curvature, 0.0);
}

double p_prime(int iota, const LameMaterial& m) {
    check_iota(iota);
    double p = 1.0;
    for (int j = -1; j <= 1; ++j)
        if (j != iota) {
            const double d = (iota - j) * m.kappa();
            p *= d * d;
        }
    return p;
}

std::array<int, 5> factor_multiset(int iota) {
    check_iota(iota);
    std::array<int, 5> out{};
    int k = 0;
    bool removed = false;
    for (int v : {-1, -1, 0, 0, 1, 1}) {
        if (v == iota && !removed) {
            removed = true;
            continue;
        }
        out[k++] = v;
    }
    return out;
}

namespace {

std::array<Mat3C, 5> shifted_factors(int iota, const Mat3C& k0v, const LameMaterial& m) {
    const auto js = factor_multiset(iota);
    std::array<Mat3C, 5> f;
    for (int l = 0; l < 5; ++l) {
        const double w = js[l] * m.kappa();
        f[l] = k0v - Mat3C::diag(w, w, w);
    }
    return f;
}

Mat3C product(const std::array<Mat3C, 5>& f, int from, int to) {
    Mat3C r = Mat3C::identity();
    for (int j = from; j < to; ++j) r = r * f[j];
    return r;
}

}  // namespace

Mat3C assemble_F(int iota, const Mat3C& k0v, const Mat3C& ksub, const LameMaterial& m) {
    const auto f = shifted_factors(iota, k0v, m);
    Mat3C sum;
    for (int l = 0; l < 5; ++l) sum += product(f, 0, l) * ksub * product(f, l + 1, 5);
    return sum;
}

Mat3C assemble_G(int iota, const Mat3C& k0v, std::span<const GradientPair> grads, const LameMaterial& m) {
    const auto f = shifted_factors(iota, k0v, m);
    Mat3C sum;
    for (const auto& g : grads)
        for (int l = 0; l < 5; ++l)
            for (int q = l + 1; q < 5; ++q)
                sum += product(f, 0, l) * g.dxi * product(f, l + 1, q) * g.dx * product(f, q + 1, 5);
    return cplx(0.0, -1.0) * sum;
}

Mat3C effective_symbol_direct(int iota, double k1, double k2, const CircleDirection& dir, const LameMaterial& m) {
    const Mat3C kv = k0(dir, m);
    const Mat3C ks = subsymbol(dir, MaterialWeights::of(m), k1, k2);
    std::array<GradientPair, 2> grads{GradientPair{dk0_dxi(0, dir, m), dk0_dx(0, dir, m, k1, k2)},
                                      GradientPair{dk0_dxi(1, dir, m), dk0_dx(1, dir, m, k1, k2)}};
    const std::span<const GradientPair> active(grads.data(), k2 == 0.0 ? 1 : 2);
    return (1.0 / p_prime(iota, m)) * (assemble_F(iota, kv, ks, m) + assemble_G(iota, kv, active, m));
}

Mat3C universal_matrix(int iota, const CircleDirection& dir, const LameMaterial& m, double curvature) {
    if (curvature == 0.0) throw std::invalid_argument("universal_matrix: curvature must be nonzero");
    return (1.0 / curvature) * effective_symbol_direct(iota, curvature, 0.0, dir, m);
}

Mat3C swap_involution() {
    Mat3C v;
    v(0, 1) = v(1, 0) = v(2, 2) = 1.0;
    return v;
}

UniversalTable::UniversalTable(int iota, const LameMaterial& m, int n_theta) : iota_(iota) {
    check_iota(iota);
    if (n_theta < 4) throw std::invalid_argument("UniversalTable: need at least 4 theta samples");
    const Mat3C V = swap_involution();
    for (int k = 0; k < n_theta; ++k) {
        const auto d = CircleDirection::at(2.0 * M_PI * k / n_theta);
        dirs_.push_back(d);
        m_.push_back(universal_matrix(iota, d, m));
        vmv_.push_back(V * universal_matrix(iota, d.swapped(), m) * V);
    }
}

Mat3C effective_symbol(int iota, double k1, double k2, const CircleDirection& dir, const LameMaterial& m) {
    const Mat3C V = swap_involution();
    return cplx(k1) * universal_matrix(iota, dir, m) + cplx(k2) * (V * universal_matrix(iota, dir.swapped(), m) * V);
}

Mat3C tangent_projector(const CircleDirection& dir) {
    Mat3C p;
    p(0, 0) = dir.phi1 * dir.phi1;
    p(0, 1) = p(1, 0) = dir.phi1 * dir.phi2;
    p(1, 1) = dir.phi2 * dir.phi2;
    p(2, 2) = 1.0;
    return p;
}

Mat3C single_layer_symbol(const CircleDirection& dir, const LameMaterial& m) {
    return (1.0 / (2.0 * m.mu())) * (Mat3C::identity() - m.em() * tangent_projector(dir));
}

Mat3C q_symbol(const CircleDirection& dir, const LameMaterial& m) {
    const double c = 1.0 - std::sqrt(1.0 - m.em());
    return (1.0 / std::sqrt(2.0 * m.mu())) * (Mat3C::identity() - c * tangent_projector(dir));
}

Mat3C z_symbol(const CircleDirection& dir, const LameMaterial& m) {
    const double d = 1.0 / std::sqrt(1.0 - m.em()) - 1.0;
    return std::sqrt(2.0 * m.mu()) * (Mat3C::identity() + d * tangent_projector(dir));
}

Mat3C hermitian_reduce(const Mat3C& msym, const CircleDirection& dir, const LameMaterial& m) {
    const Mat3C b = z_symbol(dir, m) * msym * q_symbol(dir, m);
    const double defect = hermitian_defect(b);
    const double scale = std::max(frobenius(b), frobenius(msym));
    if (defect > 1e-10 * scale + 1e-15) {
        std::ostringstream os;
        os << "hermitian_reduce: reduced symbol not Hermitian (asymmetry " << defect << ", norm " << scale << ")";
        throw NumericalError(os.str());
    }
    return 0.5 * (b + adjoint(b));
}

MaterialSplit material_split(int iota, const CircleDirection& dir, std::span<const LameMaterial> materials) {
    if (materials.size() < 2) throw std::invalid_argument("material_split: need at least two materials");
    double akk = 0, akm = 0, amm = 0;
    std::vector<Mat3C> ms;
    for (const auto& m : materials) {
        akk += m.kappa() * m.kappa();
        akm += m.kappa() * m.em();
        amm += m.em() * m.em();
        ms.push_back(universal_matrix(iota, dir, m));
    }
    const double det2 = akk * amm - akm * akm;
    if (std::abs(det2) < 1e-14) throw std::invalid_argument("material_split: materials do not separate kappa and em");
    MaterialSplit s;
    for (int e = 0; e < 9; ++e) {
        cplx bk = 0, bm = 0;
        for (std::size_t j = 0; j < materials.size(); ++j) {
            bk += materials[j].kappa() * ms[j].a[e];
            bm += materials[j].em() * ms[j].a[e];
        }
        s.X.a[e] = (amm * bk - akm * bm) / det2;
        s.Y.a[e] = (akk * bm - akm * bk) / det2;
    }
    for (std::size_t j = 0; j < materials.size(); ++j) {
        const Mat3C fit = cplx(materials[j].kappa()) * s.X + cplx(materials[j].em()) * s.Y;
        s.residual = std::max(s.residual, max_abs(fit - ms[j]));
    }
    return s;
}

// ---- audit against tabulated forms ----

namespace {

// Hand-collected forms of the cylinder subsymbol (curvature k, unit covector) that circulate
// alongside the kernel expansion; kept only so the audit can list their discrepancies.
Mat3C tabulated_subsymbol_expanded(const CircleDirection& d, MaterialWeights w, double k) {
    const double p1 = d.phi1, p2 = d.phi2;
    Mat3C r = cplx(0.5 * k * w.kappa * p2 * p2) * Mat3C::identity();
    const double q = 1.5 * k * w.em * p2 * p2;
    r(0, 0) += q * p2 * p2;
    r(0, 1) += q * p1 * p2;
    r(1, 0) += q * p1 * p2;
    r(1, 1) += q * p1 * p1;
    r(0, 1) += k * w.em * p1 * p2;
    r(1, 0) -= k * w.em * p1 * p2;
    return r;
}

Mat3C tabulated_subsymbol_collected(const CircleDirection& d, MaterialWeights w, double k) {
    const double p1 = d.phi1, p2 = d.phi2;
    Mat3C r = cplx(-k * w.kappa * p2 * p2) * Mat3C::identity();
    const double q = -0.5 * k * w.em * p2 * p2;
    r(0, 0) += q * p2 * p2;
    r(0, 1) += q * p1 * p2;
    r(1, 0) += q * p1 * p2;
    r(1, 1) += q * p1 * p1;
    r(0, 1) += -1.5 * k * w.em * p1 * p2;
    r(1, 0) -= -1.5 * k * w.em * p1 * p2;
    return r;
}

Mat3C tabulated_dxi1(const CircleDirection& d, double kappa) {
    return normal_tangent_pattern(kappa, -d.phi2 * d.phi2, -d.phi1 * d.phi2);
}

Mat3C tabulated_dx1(const CircleDirection& d, double kappa, double k) {
    return Mat3C::diag(I * kappa * k * d.phi1, 0.0, I * kappa * k * d.phi1);
}

std::string classify(const std::vector<cplx>& derived, const std::vector<cplx>& other) {
    double dd = 0, oo = 0;
    cplx od = 0;
    for (std::size_t i = 0; i < derived.size(); ++i) {
        dd += std::norm(derived[i]);
        oo += std::norm(other[i]);
        od += std::conj(derived[i]) * other[i];
    }
    constexpr double tiny = 1e-24;
    if (dd < tiny && oo < tiny) return "";
    if (dd < tiny) return "present only in tabulated form";
    if (oo < tiny) return "missing from tabulated form";
    const cplx ratio = od / dd;
    double res = 0;
    for (std::size_t i = 0; i < derived.size(); ++i) res += std::norm(other[i] - ratio * derived[i]);
    std::ostringstream os;
    if (res > 1e-20 * std::max(oo, 1.0)) {
        os << "different angular shape";
        return os.str();
    }
    if (std::abs(ratio - 1.0) < 1e-12) return "match";
    if (std::abs(ratio + 1.0) < 1e-12) return "sign flip";
    os << "factor " << std::setprecision(6);
    if (std::abs(ratio.imag()) < 1e-12)
        os << ratio.real();
    else
        os << ratio;
    return os.str();
}

template <class Derived, class Other>
void compare_entries(std::ostringstream& os, const std::string& title, int n, Derived derived, Other other,
                     int& mismatches) {
    os << title << "\n";
    bool any = false;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            std::vector<cplx> dv, ov;
            for (int k = 0; k < n; ++k) {
                const auto dir = CircleDirection::at(2.0 * M_PI * (k + 0.37) / n);
                dv.push_back(derived(dir)(r, c));
                ov.push_back(other(dir)(r, c));
            }
            const std::string verdict = classify(dv, ov);
            if (verdict.empty()) continue;
            any = true;
            if (verdict != "match") ++mismatches;
            os << "  entry (" << r + 1 << "," << c + 1 << "): " << verdict << "\n";
        }
    if (!any) os << "  all entries vanish in both\n";
}

}  // namespace

std::string audit_subsymbol_report(int n_theta) {
    std::ostringstream os;
    int mismatches = 0;
    const double k = -1.0;
    os << "subsymbol audit: cylinder curvature " << k << ", " << n_theta << " directions\n";
    os << "derived = Fourier image of the kernel expansion; ratios are tabulated/derived\n\n";
    for (auto [part, w] : {std::pair{"kappa", MaterialWeights{1.0, 0.0}}, std::pair{"em", MaterialWeights{0.0, 1.0}}}) {
        const std::string p = part;
        auto derived = [&](const CircleDirection& d) { return subsymbol(d, w, k, 0.0); };
        compare_entries(
            os, "[expanded tabulation] " + p + "-linear part", n_theta, derived,
            [&](const CircleDirection& d) { return tabulated_subsymbol_expanded(d, w, k); }, mismatches);
        compare_entries(
            os, "[collected tabulation] " + p + "-linear part", n_theta, derived,
            [&](const CircleDirection& d) { return tabulated_subsymbol_collected(d, w, k); }, mismatches);
    }
    const LameMaterial unit(0.0, 1.0);
    compare_entries(
        os, "[tabulated d k0 / d xi1]", n_theta, [&](const CircleDirection& d) { return dk0_dxi(0, d, unit); },
        [&](const CircleDirection& d) { return tabulated_dxi1(d, unit.kappa()); }, mismatches);
    compare_entries(
        os, "[tabulated d k0 / d x1]", n_theta,
        [&](const CircleDirection& d) { return dk0_dx1_cylinder(d, unit, k); },
        [&](const CircleDirection& d) { return tabulated_dx1(d, unit.kappa(), k); }, mismatches);
    os << "\nmismatching entries: " << mismatches << "\n";
    return os.str();
}

}  // namespace elastnp
