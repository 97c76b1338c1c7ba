#include <doctest.h>

#include <map>

#include "elastnp/geometry.hpp"

using namespace elastnp;
using nlohmann::json;

namespace {

Surface from(const char* text) { return Surface(surface_from_json(json::parse(text))); }

double torus_willmore(double R, double r) {
    const double a = R / r;
    return M_PI * M_PI * a * a / std::sqrt(a * a - 1.0);
}

// oblate spheroid a = b > c
double oblate_area(double a, double c) {
    const double e = std::sqrt(1.0 - c * c / (a * a));
    return 2.0 * M_PI * a * a * (1.0 + (1.0 - e * e) / e * std::atanh(e));
}

}  // namespace

TEST_CASE("surface JSON round trip and validation") {
    for (const char* t : {R"({"kind":"sphere","radius":2})", R"({"kind":"ellipsoid","semiaxes":[1.5,1,0.7]})",
                          R"({"kind":"torus","R":2,"r":1})", R"({"kind":"cylinder","radius":1,"length":0.5})",
                          R"({"kind":"union","components":[{"kind":"sphere","radius":2,"orientation":"outer"},
                              {"kind":"sphere","radius":1,"orientation":"cavity"}]})"}) {
        const auto j = json::parse(t);
        CHECK(surface_to_json(surface_from_json(j)) == j);
    }
    CHECK_THROWS_AS(surface_from_json(json::parse(R"({"kind":"sphere","radius":1,"extra":0})")), std::invalid_argument);
    CHECK_THROWS_AS(surface_from_json(json::parse(R"({"kind":"sphere","radius":-1})")), std::invalid_argument);
    CHECK_THROWS_AS(surface_from_json(json::parse(R"({"kind":"torus","R":1,"r":2})")), std::invalid_argument);
    CHECK_THROWS_AS(surface_from_json(json::parse(R"({"kind":"cube"})")), std::invalid_argument);
    CHECK_THROWS_AS(surface_from_json(json::parse(R"({"radius":1})")), std::invalid_argument);
    CHECK_THROWS_AS(surface_from_json(json::parse(R"([1,2])")), std::invalid_argument);
}

TEST_CASE("sphere point data") {
    const auto s = from(R"({"kind":"sphere","radius":2})");
    CHECK(s.closed());
    const auto q = s.quadrature({16, 32});
    for (const auto& p : q.nodes) {
        CHECK(norm(p.position) == doctest::Approx(2.0));
        CHECK(dot(p.normal, p.position) == doctest::Approx(2.0));  // outward
        CHECK(p.kappa1 == doctest::Approx(-0.5));
        CHECK(p.kappa2 == doctest::Approx(-0.5));
        CHECK(std::abs(dot(p.dir1, p.normal)) < 1e-12);
        CHECK(std::abs(dot(p.dir1, p.dir2)) < 1e-12);
    }
    CHECK(q.total_weight() == doctest::Approx(16.0 * M_PI).epsilon(1e-12));
}

TEST_CASE("integral invariants against closed forms") {
    const Resolution res{48, 96};
    const auto sphere = from(R"({"kind":"sphere","radius":3})");
    CHECK(willmore_energy(sphere, res) == doctest::Approx(4.0 * M_PI).epsilon(1e-10));
    CHECK(euler_characteristic_gb(sphere, res) == doctest::Approx(2.0).scale(1).epsilon(1e-9));

    const auto torus = from(R"({"kind":"torus","R":2,"r":1})");
    CHECK(torus.quadrature(res).total_weight() == doctest::Approx(8.0 * M_PI * M_PI).epsilon(1e-12));
    CHECK(willmore_energy(torus, res) == doctest::Approx(torus_willmore(2, 1)).epsilon(1e-10));
    CHECK(euler_characteristic_gb(torus, res) == doctest::Approx(0.0).scale(1).epsilon(1e-9));

    const auto spheroid = from(R"({"kind":"ellipsoid","semiaxes":[1.5,1.5,0.7]})");
    CHECK(spheroid.quadrature(res).total_weight() == doctest::Approx(oblate_area(1.5, 0.7)).epsilon(1e-9));
    const auto ell = from(R"({"kind":"ellipsoid","semiaxes":[1.5,1,0.7]})");
    CHECK(euler_characteristic_gb(ell, res) == doctest::Approx(2.0).scale(1).epsilon(1e-9));
    CHECK(willmore_energy(ell, res) > 4.0 * M_PI);  // equality only for round spheres

    const auto shell = from(R"({"kind":"union","components":[{"kind":"sphere","radius":2,"orientation":"outer"},
                              {"kind":"sphere","radius":1,"orientation":"cavity"}]})");
    CHECK(shell.component_count() == 2);
    CHECK(euler_characteristic_gb(shell, res) == doctest::Approx(4.0).scale(1).epsilon(1e-9));
    CHECK(willmore_energy(shell, res) == doctest::Approx(8.0 * M_PI).epsilon(1e-10));
}

TEST_CASE("ellipsoid curvatures match the implicit-surface Gauss curvature") {
    const double a = 1.5, b = 1.0, c = 0.7;
    const auto s = from(R"({"kind":"ellipsoid","semiaxes":[1.5,1,0.7]})");
    for (const auto& p : s.quadrature({12, 24}).nodes) {
        const auto& x = p.position;
        CHECK(x[0] * x[0] / (a * a) + x[1] * x[1] / (b * b) + x[2] * x[2] / (c * c) == doctest::Approx(1.0));
        const Vec3 grad{x[0] / (a * a), x[1] / (b * b), x[2] / (c * c)};
        const double g2 = dot(grad, grad);
        const double gauss = 1.0 / (a * a * b * b * c * c * g2 * g2);
        CHECK(p.kappa1 * p.kappa2 == doctest::Approx(gauss).epsilon(1e-9));
        CHECK(p.kappa2 < 0.0);
        CHECK(dot(p.normal, normalized(grad)) == doctest::Approx(1.0));
    }
}

TEST_CASE("torus curvature signs and cavity orientation") {
    const auto torus = from(R"({"kind":"torus","R":2,"r":1})");
    int saddle = 0, convex = 0;
    for (const auto& p : torus.quadrature({16, 32}).nodes) {
        const double rho = std::hypot(p.position[0], p.position[1]);
        if (rho < 1.3) saddle += p.kappa1 * p.kappa2 < 0;
        if (rho > 2.7) convex += p.kappa1 * p.kappa2 > 0;
        CHECK(p.kappa1 <= p.kappa2);
    }
    CHECK(saddle > 0);
    CHECK(convex > 0);

    const auto shell = from(R"({"kind":"union","components":[{"kind":"sphere","radius":2,"orientation":"outer"},
                              {"kind":"sphere","radius":1,"orientation":"cavity"}]})");
    const auto q = shell.quadrature({8, 16});
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const auto& p = q.nodes[i];
        if (q.component[i] == 1) {
            // body lies outside the cavity, so the normal points to the centre and the cavity is concave
            CHECK(dot(p.normal, p.position) == doctest::Approx(-1.0));
            CHECK(p.kappa1 == doctest::Approx(1.0));
        } else {
            CHECK(p.kappa1 == doctest::Approx(-0.5));
        }
    }
}

TEST_CASE("cylinder patch is open") {
    const auto cyl = from(R"({"kind":"cylinder","radius":2,"length":1})");
    CHECK_FALSE(cyl.closed());
    CHECK_THROWS_AS(cyl.symmetric_grid(4), std::invalid_argument);
    for (const auto& p : cyl.quadrature({8, 8}).nodes) {
        CHECK(p.kappa1 == doctest::Approx(-0.5));
        CHECK(std::abs(p.kappa2) < 1e-12);
    }
}

TEST_CASE("cubed-sphere grid") {
    const auto s = from(R"({"kind":"sphere","radius":1})");
    CHECK_THROWS_AS(s.symmetric_grid(1), std::invalid_argument);
    double prev_err = 1.0;
    for (int n : {4, 8, 16}) {
        const auto q = s.symmetric_grid(n);
        CHECK(q.nodes.size() == static_cast<std::size_t>(6 * n * n));
        const double err = std::abs(q.total_weight() - 4.0 * M_PI);
        CHECK(err < prev_err / 3.0);  // second order
        prev_err = err;
    }
    // a quarter turn about the x3 axis permutes the nodes
    const auto q = s.symmetric_grid(6);
    std::map<std::array<long long, 3>, std::size_t> index;
    auto key = [](const Vec3& x) {
        return std::array<long long, 3>{std::llround(x[0] * 1e9), std::llround(x[1] * 1e9), std::llround(x[2] * 1e9)};
    };
    for (std::size_t i = 0; i < q.nodes.size(); ++i) index[key(q.nodes[i].position)] = i;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const auto& x = q.nodes[i].position;
        const auto it = index.find(key(Vec3{-x[1], x[0], x[2]}));
        REQUIRE(it != index.end());
        CHECK(q.weights[it->second] == doctest::Approx(q.weights[i]).epsilon(1e-12));
    }

    const auto ell = from(R"({"kind":"ellipsoid","semiaxes":[1.5,1,0.7]})");
    const auto qe = ell.symmetric_grid(12);
    const auto ref = ell.quadrature({64, 128}).total_weight();
    CHECK(qe.total_weight() == doctest::Approx(ref).epsilon(1e-2));

    const auto torus = from(R"({"kind":"torus","R":2,"r":1})");
    CHECK(torus.symmetric_grid(8).nodes.size() == 128u);
}

TEST_CASE("diameter probe on convex bodies") {
    for (const char* t : {R"({"kind":"sphere","radius":1})", R"({"kind":"ellipsoid","semiaxes":[1.5,1,0.7]})"}) {
        const auto r = diameter_convexity_probe(from(t), {32, 64});
        CHECK(r.holds);
    }
    const auto r = diameter_convexity_probe(from(R"({"kind":"ellipsoid","semiaxes":[1.5,1,0.7]})"), {32, 64});
    CHECK(r.diameter == doctest::Approx(3.0).epsilon(1e-2));  // node-limited
}

TEST_CASE("Gauss-Legendre exactness") {
    std::vector<double> w;
    const auto x = gauss_legendre_nodes(6, w);
    for (int deg = 0; deg <= 11; ++deg) {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
        const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
        CHECK(s == doctest::Approx(exact).scale(1).epsilon(1e-14));
    }
}

TEST_CASE("resolution bounds") {
    const auto s = from(R"({"kind":"sphere","radius":1})");
    CHECK_THROWS_AS(s.quadrature({1, 8}), std::invalid_argument);
}
