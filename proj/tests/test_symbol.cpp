#include <doctest.h>

#include <algorithm>
#include <random>

#include "elastnp/symbol.hpp"

using namespace elastnp;

namespace {

const LameMaterial kMaterials[] = {LameMaterial(1, 1), LameMaterial(0, 1), LameMaterial(2, 1), LameMaterial(3, 2),
                                   LameMaterial(-0.5, 0.8)};

std::vector<CircleDirection> directions(int n) {
    std::vector<CircleDirection> out;
    for (int k = 0; k < n; ++k) out.push_back(CircleDirection::at(2.0 * M_PI * (k + 0.37) / n));
    return out;
}

Mat3C k0_at(double xi1, double xi2, const LameMaterial& m) { return k0(CircleDirection::at(std::atan2(xi2, xi1)), m); }

// k0 on the quadric x3 = (k1 y1^2 + k2 y2^2)/2 at the point above t e_alpha, written as
// i kappa (nu s^T - s nu^T) with s the unit tangent vector dual to the fixed covector
Mat3C geometric_k0(int alpha, double t, const CircleDirection& dir, const LameMaterial& m, double k1, double k2) {
    const double y1 = alpha == 0 ? t : 0.0, y2 = alpha == 1 ? t : 0.0;
    const Vec3 nu = normalized(Vec3{-k1 * y1, -k2 * y2, 1.0});
    const Vec3 x1{1, 0, k1 * y1}, x2{0, 1, k2 * y2};
    const double g11 = dot(x1, x1), g12 = dot(x1, x2), g22 = dot(x2, x2), det = g11 * g22 - g12 * g12;
    const double u1 = (g22 * dir.phi1 - g12 * dir.phi2) / det, u2 = (-g12 * dir.phi1 + g11 * dir.phi2) / det;
    const Vec3 s = normalized(u1 * x1 + u2 * x2);
    Mat3C out;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) out(p, q) = cplx(0.0, m.kappa() * (nu[p] * s[q] - s[p] * nu[q]));
    return out;
}

Mat3C random_matrix(std::mt19937& rng) {
    std::normal_distribution<double> g;
    Mat3C r;
    for (auto& x : r.a) x = {g(rng), g(rng)};
    return r;
}

}  // namespace

TEST_CASE("k0 spectrum and eigenvectors") {
    for (const auto& m : kMaterials)
        for (const auto& d : directions(16)) {
            const Mat3C kv = k0(d, m);
            const auto ev = hermitian_eig3(kv).values;
            CHECK(std::abs(ev[0] + m.kappa()) < 1e-14);
            CHECK(std::abs(ev[1]) < 1e-14);
            CHECK(std::abs(ev[2] - m.kappa()) < 1e-14);
            const auto es = k0_eigensystem(d, m);
            for (int k = 0; k < 3; ++k) {
                double res = 0;
                for (int i = 0; i < 3; ++i) {
                    cplx s = 0;
                    for (int j = 0; j < 3; ++j) s += kv(i, j) * es.vectors[k][j];
                    res += std::norm(s - es.values[k] * es.vectors[k][i]);
                }
                CHECK(std::sqrt(res) < 1e-15);
            }
            // projectors resolve the identity and reproduce k0
            Mat3C sum, rebuilt;
            for (int iota = -1; iota <= 1; ++iota) {
                const Mat3C p = spectral_projector(iota, d, m);
                CHECK(max_abs(p * p - p) < 1e-15);
                sum += p;
                rebuilt += cplx(iota * m.kappa()) * p;
            }
            CHECK(max_abs(sum - Mat3C::identity()) < 1e-15);
            CHECK(max_abs(rebuilt - kv) < 1e-15);
        }
}

TEST_CASE("xi-derivatives of k0 match central differences") {
    const double h = 1e-6;
    for (const auto& m : kMaterials)
        for (const auto& d : directions(12))
            for (int alpha = 0; alpha < 2; ++alpha) {
                const double e1 = alpha == 0 ? h : 0.0, e2 = alpha == 1 ? h : 0.0;
                const Mat3C fd = (1.0 / (2 * h)) * (k0_at(d.phi1 + e1, d.phi2 + e2, m) - k0_at(d.phi1 - e1, d.phi2 - e2, m));
                CHECK(max_abs(fd - dk0_dxi(alpha, d, m)) < 1e-8);
            }
}

TEST_CASE("x-derivatives of k0 match differences along the quadric") {
    const double h = 1e-6;
    const LameMaterial m(1, 1);
    for (auto [k1, k2] : {std::pair{-1.0, 0.0}, std::pair{-1.0, -1.0}, std::pair{-0.3, 0.9}})
        for (const auto& d : directions(12))
            for (int alpha = 0; alpha < 2; ++alpha) {
                const Mat3C fd =
                    (1.0 / (2 * h)) * (geometric_k0(alpha, h, d, m, k1, k2) - geometric_k0(alpha, -h, d, m, k1, k2));
                CHECK(max_abs(fd - dk0_dx(alpha, d, m, k1, k2)) < 1e-8);
            }
    for (const auto& d : directions(8))
        CHECK(max_abs(dk0_dx1_cylinder(d, m, -0.6) - dk0_dx(0, d, m, -0.6, 0.0)) < 1e-15);
}

TEST_CASE("Fourier images of homogeneous monomials") {
    for (const auto& d : directions(10)) {
        const double f1 = d.phi1, f2 = d.phi2;
        CHECK(std::abs(ft_homogeneous(0, 0, 1, d) - 1.0) < 1e-14);
        // y/|y|^3 = -grad(1/|y|) and multiplication by i xi for a derivative
        CHECK(std::abs(ft_homogeneous(1, 0, 3, d) - cplx(0, -f1)) < 1e-14);
        CHECK(std::abs(ft_homogeneous(0, 1, 3, d) - cplx(0, -f2)) < 1e-14);
        // y_p y_q / |y|^3 = delta_pq/|y| - d_p d_q |y|, and the image of |y|/(2 pi) is -|xi|^-3
        CHECK(std::abs(ft_homogeneous(2, 0, 3, d) - (1.0 - f1 * f1)) < 1e-14);
        CHECK(std::abs(ft_homogeneous(1, 1, 3, d) - (-f1 * f2)) < 1e-14);
        CHECK(std::abs(ft_homogeneous(0, 2, 3, d) - (1.0 - f2 * f2)) < 1e-14);
        // contractions of the quartic tensor
        CHECK(std::abs(ft_homogeneous(4, 0, 5, d) + ft_homogeneous(2, 2, 5, d) - ft_homogeneous(2, 0, 3, d)) < 1e-14);
        CHECK(std::abs(ft_homogeneous(3, 1, 5, d) + ft_homogeneous(1, 3, 5, d) - ft_homogeneous(1, 1, 3, d)) < 1e-14);
        CHECK(std::abs(ft_homogeneous(2, 2, 5, d) + ft_homogeneous(0, 4, 5, d) - ft_homogeneous(0, 2, 3, d)) < 1e-14);
    }
    // rotation covariance: (u.y)^4 / |y|^5 has the image of y1^4/|y|^5 at the rotated covector
    const double rot = 0.61, c = std::cos(rot), s = std::sin(rot);
    const int binom[] = {1, 4, 6, 4, 1};
    for (const auto& d : directions(7)) {
        cplx lhs = 0;
        for (int k = 0; k <= 4; ++k)
            lhs += double(binom[k]) * std::pow(c, 4 - k) * std::pow(s, k) * ft_homogeneous(4 - k, k, 5, d);
        const auto rotated = CircleDirection::at(d.theta - rot);
        CHECK(std::abs(lhs - ft_homogeneous(4, 0, 5, rotated)) < 1e-13);
    }
    CHECK_FALSE(ft_supported(2, 0, 2));
    CHECK_THROWS_AS(ft_homogeneous(5, 0, 5, CircleDirection::at(0)), std::invalid_argument);
}

TEST_CASE("subsymbol is linear in curvatures and covariant under the axis swap") {
    const Mat3C V = swap_involution();
    for (const auto& m : kMaterials) {
        const auto w = MaterialWeights::of(m);
        for (const auto& d : directions(9)) {
            const Mat3C a = subsymbol(d, w, -0.7, 0.0), b = subsymbol(d, w, 0.0, 1.3);
            CHECK(max_abs(subsymbol(d, w, -0.7, 1.3) - a - b) < 1e-14);
            CHECK(max_abs(b - V * subsymbol(d.swapped(), w, 1.3, 0.0) * V) < 1e-14);
            CHECK(max_abs(subsymbol_cylinder(d, m, -0.7) - a) < 1e-15);
            CHECK(max_abs(subsymbol(d, w, -1.0, -1.0) - V * subsymbol(d.swapped(), w, -1.0, -1.0) * V) < 1e-14);
        }
    }
}

TEST_CASE("p_prime and the factor multiset") {
    const LameMaterial m(1, 1);
    const double k = m.kappa();
    CHECK(p_prime(0, m) == doctest::Approx(std::pow(k, 4)));
    CHECK(p_prime(1, m) == doctest::Approx(4 * std::pow(k, 4)));
    CHECK(p_prime(-1, m) == doctest::Approx(4 * std::pow(k, 4)));
    CHECK(factor_multiset(0) == std::array<int, 5>{-1, -1, 0, 1, 1});
    CHECK(factor_multiset(1) == std::array<int, 5>{-1, -1, 0, 0, 1});
    CHECK_THROWS_AS(p_prime(2, m), std::invalid_argument);
}

TEST_CASE("F assembly sandwiches the perturbation between spectral projectors") {
    // the five-factor polynomial has double roots at the other points and a simple root at omega,
    // so its derivative along X is p' P X P
    std::mt19937 rng(17);
    for (const auto& m : kMaterials)
        for (const auto& d : directions(6))
            for (int iota = -1; iota <= 1; ++iota) {
                const Mat3C kv = k0(d, m), p = spectral_projector(iota, d, m);
                const double pp = p_prime(iota, m);
                CHECK(max_abs((1.0 / pp) * assemble_F(iota, kv, Mat3C::identity(), m) - p) < 1e-12);
                const Mat3C x = random_matrix(rng);
                CHECK(max_abs((1.0 / pp) * assemble_F(iota, kv, x, m) - p * x * p) < 1e-12);
            }
}

TEST_CASE("G assembly zero cases") {
    const LameMaterial m(1, 1);
    const auto d = CircleDirection::at(0.4);
    const Mat3C kv = k0(d, m);
    std::mt19937 rng(2);
    const Mat3C any = random_matrix(rng);
    for (int iota = -1; iota <= 1; ++iota) {
        CHECK(max_abs(assemble_G(iota, kv, {}, m)) == 0.0);
        std::array<GradientPair, 2> g{GradientPair{any, Mat3C{}}, GradientPair{Mat3C{}, any}};
        CHECK(max_abs(assemble_G(iota, kv, g, m)) == 0.0);
        // flat surface: the x-derivative of k0 vanishes
        std::array<GradientPair, 1> flat{GradientPair{dk0_dxi(0, d, m), dk0_dx(0, d, m, 0.0, 0.0)}};
        CHECK(max_abs(assemble_G(iota, kv, flat, m)) == 0.0);
    }
}

TEST_CASE("effective symbol decomposes through the universal matrix") {
    for (const auto& m : kMaterials)
        for (int iota = -1; iota <= 1; ++iota)
            for (const auto& d : directions(7)) {
                CHECK(max_abs(universal_matrix(iota, d, m, -1.0) - universal_matrix(iota, d, m, -2.5)) < 1e-11);
                for (auto [k1, k2] : {std::pair{-1.0, -1.0}, std::pair{-0.4, 0.9}, std::pair{0.0, -1.2}}) {
                    const Mat3C direct = effective_symbol_direct(iota, k1, k2, d, m);
                    CHECK(max_abs(effective_symbol(iota, k1, k2, d, m) - direct) < 1e-11);
                }
            }
    const UniversalTable t(1, LameMaterial(1, 1), 16);
    CHECK(t.size() == 16);
    CHECK(max_abs(t.M(3) - universal_matrix(1, t.direction(3), LameMaterial(1, 1))) == 0.0);
    CHECK_THROWS_AS(UniversalTable(0, LameMaterial(1, 1), 2), std::invalid_argument);
    CHECK_THROWS_AS(universal_matrix(0, CircleDirection::at(0), LameMaterial(1, 1), 0.0), std::invalid_argument);
}

TEST_CASE("sphere effective symbol has the closed-form spectrum") {
    // a sphere of radius 1 (curvatures -1): one nonzero eigenvalue, 3/4 at zero and kappa at +-kappa
    for (const auto& m : kMaterials)
        for (int iota = -1; iota <= 1; ++iota)
            for (const auto& d : directions(8)) {
                const Mat3C b = hermitian_reduce(effective_symbol(iota, -1.0, -1.0, d, m), d, m);
                const auto ev = hermitian_eigvals3(b);
                const double want = iota == 0 ? 0.75 : m.kappa();
                CHECK(std::abs(ev[0]) < 1e-12);
                CHECK(std::abs(ev[1]) < 1e-12);
                CHECK(ev[2] == doctest::Approx(want).epsilon(1e-12));
            }
}

TEST_CASE("symmetrizer symbols") {
    for (const auto& m : kMaterials)
        for (const auto& d : directions(5)) {
            const Mat3C q = q_symbol(d, m), z = z_symbol(d, m), s = single_layer_symbol(d, m);
            CHECK(max_abs(q * q - s) < 1e-14);
            CHECK(max_abs(z * q - Mat3C::identity()) < 1e-14);
            CHECK(hermitian_eigvals3(s)[0] > 0.0);
        }
    std::mt19937 rng(4);
    const auto d = CircleDirection::at(1.0);
    CHECK_THROWS_AS(hermitian_reduce(random_matrix(rng), d, LameMaterial(1, 1)), NumericalError);
}

TEST_CASE("material linearity of the universal matrix") {
    const std::array<LameMaterial, 3> fit{LameMaterial(1, 1), LameMaterial(0, 1), LameMaterial(2, 1)};
    const LameMaterial probe(3, 2);
    for (int iota = -1; iota <= 1; ++iota)
        for (const auto& d : directions(8)) {
            const auto split = material_split(iota, d, fit);
            CHECK(split.residual < 1e-12);
            const Mat3C predicted = probe.kappa() * split.X + probe.em() * split.Y;
            CHECK(max_abs(predicted - universal_matrix(iota, d, probe)) < 1e-10);
        }
    const std::array<LameMaterial, 1> one{LameMaterial(1, 1)};
    CHECK_THROWS_AS(material_split(0, CircleDirection::at(0), one), std::invalid_argument);
}

TEST_CASE("audit report flags disagreements") {
    const auto report = audit_subsymbol_report(8);
    CHECK(report.find("sign flip") != std::string::npos);
    CHECK(report.find("mismatch") != std::string::npos);
}
