#include "elastnp/elastic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace elastnp {

LameMaterial::LameMaterial(double lambda, double mu) : lambda_(lambda), mu_(mu) {
    if (!std::isfinite(lambda) || !std::isfinite(mu)) throw std::invalid_argument("Lame constants must be finite");
    if (!(mu > 0.0)) throw std::invalid_argument("Lame constants: need mu > 0");
    if (!(lambda + 2.0 * mu > 0.0)) throw std::invalid_argument("Lame constants: need lambda + 2 mu > 0");
    const double l2m = lambda + 2.0 * mu;
    kappa_ = mu / (2.0 * l2m);
    em_ = (lambda + mu) / (2.0 * l2m);
    lambda_prime_ = (lambda + 3.0 * mu) / (4.0 * M_PI * mu * l2m);
    mu_prime_ = (lambda + mu) / (4.0 * M_PI * mu * l2m);
}

EssentialPoint::EssentialPoint(int iota) : iota_(iota) {
    if (iota < -1 || iota > 1) throw std::invalid_argument("iota must be -1, 0 or 1");
}

Mat3 kelvin_matrix(const LameMaterial& m, const Vec3& d) {
    const double r = norm(d);
    if (r == 0.0) throw std::domain_error("kelvin_matrix: coincident points");
    Mat3 out = m.mu_prime() / (r * r * r) * outer(d, d);
    const double diag = m.lambda_prime() / r;
    for (int i = 0; i < 3; ++i) out(i, i) += diag;
    return out;
}

Mat3 single_layer_kernel(const LameMaterial& m, const Vec3& x, const Vec3& y) { return kelvin_matrix(m, x - y); }

Vec3 traction_apply(const LameMaterial& m, const Vec3& normal, const Mat3& grad) {
    if (std::abs(norm(normal) - 1.0) > 1e-12) throw std::invalid_argument("traction_apply: normal must be a unit vector");
    const double div = grad(0, 0) + grad(1, 1) + grad(2, 2);
    Vec3 t{};
    for (int p = 0; p < 3; ++p) {
        double s = m.lambda() * normal[p] * div;
        for (int q = 0; q < 3; ++q) s += m.lambda() * normal[q] * grad(q, p) + m.mu() * grad(p, q) * normal[q];
        t[p] = s;
    }
    return t;
}

Mat3 np_kernel(const LameMaterial& m, const Vec3& x, const Vec3& y, const Vec3& nu) {
    const Vec3 d = x - y;
    const double r2 = dot(d, d);
    if (r2 == 0.0) throw std::domain_error("np_kernel: coincident points");
    const double r = std::sqrt(r2);
    const double r3 = r2 * r;
    const double k = m.kappa();
    const double a = k / (2.0 * M_PI * r3);
    const double nd = dot(nu, d);
    const double b = -nd / (2.0 * M_PI * r3);
    const double c = 3.0 * m.em() / r2;
    Mat3 out;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            out(p, q) = a * (nu[p] * d[q] - nu[q] * d[p]) + b * (c * d[p] * d[q] + (p == q ? k : 0.0));
    return out;
}

Mat3 KernelExpansion::evaluate(const std::vector<MonomialTerm>& terms, const LameMaterial& m, double y1,
                               double y2) const {
    const double r = std::hypot(y1, y2);
    if (r == 0.0) throw std::domain_error("kernel expansion: y = 0");
    Mat3 out;
    for (const auto& t : terms)
        out(t.row, t.col) += t.coeff(m) * std::pow(y1, t.a) * std::pow(y2, t.b) / (2.0 * M_PI * std::pow(r, t.p));
    return out;
}

KernelExpansion quadric_kernel_expansion(double k1, double k2) {
    KernelExpansion e;
    // (kappa/2pi)|y|^-3 (nu d^T - d nu^T) with d = -(y1, y2, F), nu ~ (-k1 y1, -k2 y2, 1)
    e.leading = {{0, 2, 1.0, 0.0, 1, 0, 3},
                 {1, 2, 1.0, 0.0, 0, 1, 3},
                 {2, 0, -1.0, 0.0, 1, 0, 3},
                 {2, 1, -1.0, 0.0, 0, 1, 3}};
    const double dk = k1 - k2;
    if (dk != 0.0) e.antisym = {{0, 1, dk, 0.0, 1, 1, 3}, {1, 0, -dk, 0.0, 1, 1, 3}};

    // nu.d = II(y)/2, so the line is -(1/4pi) II(y) |y|^-3 (kappa E + 3 em yy^T/|y|^2)
    auto add = [&e](int r, int c, double ck, double cm, int a, int b, int p) {
        if (ck != 0.0 || cm != 0.0) e.normal.push_back({r, c, ck, cm, a, b, p});
    };
    for (int i = 0; i < 3; ++i) {
        add(i, i, -0.5 * k1, 0.0, 2, 0, 3);
        add(i, i, -0.5 * k2, 0.0, 0, 2, 3);
    }
    add(0, 0, 0.0, -1.5 * k1, 4, 0, 5);
    add(0, 0, 0.0, -1.5 * k2, 2, 2, 5);
    for (auto [r, c] : {std::pair{0, 1}, std::pair{1, 0}}) {
        add(r, c, 0.0, -1.5 * k1, 3, 1, 5);
        add(r, c, 0.0, -1.5 * k2, 1, 3, 5);
    }
    add(1, 1, 0.0, -1.5 * k1, 2, 2, 5);
    add(1, 1, 0.0, -1.5 * k2, 0, 4, 5);
    return e;
}

std::pair<Mat3, Mat3> cylinder_kernel_expansion(const LameMaterial& m, double curvature, double y1, double y2) {
    if (y1 == 0.0 && y2 == 0.0) throw std::domain_error("cylinder_kernel_expansion: y = 0");
    const auto e = quadric_kernel_expansion(curvature, 0.0);
    Mat3 first = e.evaluate(e.leading, m, y1, y2) + e.evaluate(e.antisym, m, y1, y2);
    Mat3 second = e.evaluate(e.normal, m, y1, y2);
    return {first, second};
}

}  // namespace elastnp
