#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "elastnp/numerics.hpp"

namespace elastnp {

enum class Orientation { outer, cavity };

struct Sphere {
    double radius = 1.0;
};
struct Ellipsoid {
    double a = 1.0, b = 1.0, c = 1.0;
};
struct Torus {
    double R = 2.0, r = 1.0;
};
// x1^2 + (x3 + radius)^2 = radius^2, axis along x2, |x2| <= length/2 (open patch)
struct CylinderPatch {
    double radius = 1.0, length = 1.0;
};
struct UnionComponent;
struct SurfaceUnion {
    std::vector<UnionComponent> parts;
};

struct SurfaceSpec {
    std::variant<Sphere, Ellipsoid, Torus, CylinderPatch, SurfaceUnion> shape;
};

struct UnionComponent {
    SurfaceSpec spec;
    Orientation orientation = Orientation::outer;
};

SurfaceSpec surface_from_json(const nlohmann::json& j);
nlohmann::json surface_to_json(const SurfaceSpec& s);

struct SurfacePointData {
    Vec3 position{};
    Vec3 normal{};       // outward from the body
    double kappa1 = 0;   // principal curvatures, negative where the body is convex; kappa1 <= kappa2
    double kappa2 = 0;
    Vec3 dir1{}, dir2{};  // principal directions, dir2 = normal x dir1
    double area_element = 0;
};

struct Resolution {
    int nu = 32;  // first chart coordinate
    int nv = 64;  // second chart coordinate
};

struct SurfaceQuadrature {
    std::vector<SurfacePointData> nodes;
    std::vector<double> weights;
    std::vector<int> component;
    double total_weight() const;
};

class Surface {
public:
    explicit Surface(SurfaceSpec spec);

    const SurfaceSpec& spec() const { return spec_; }
    std::size_t component_count() const { return charts_.size(); }
    bool closed() const;
    // chart domain of a component: u in [u0, u1], v in [v0, v1]
    std::array<double, 4> chart_domain(std::size_t component) const;

    SurfacePointData point_data(std::size_t component, double u, double v) const;
    SurfaceQuadrature quadrature(Resolution res) const;
    // Midpoint grid that is locally symmetric around every node, for punctured (Nystrom) sums.
    // Sphere/ellipsoid: cubed sphere with n x n equiangular cells per face (6 n^2 nodes).
    // Torus: n x 2n periodic grid. Single closed component only.
    SurfaceQuadrature symmetric_grid(int n) const;

    struct Chart;

private:
    SurfaceSpec spec_;
    std::vector<std::shared_ptr<const Chart>> charts_;
};

inline Surface make_surface(SurfaceSpec spec) { return Surface(std::move(spec)); }

double willmore_energy(const Surface& s, Resolution res);
// Gauss-Bonnet: (2 pi)^-1 * integral of K dS over all components; throws if not within tol of an integer
double euler_characteristic_gb(const Surface& s, Resolution res, double tol = 1e-6);

struct DiameterReport {
    double diameter = 0;
    Vec3 end_a{}, end_b{};
    std::array<double, 2> curvatures_a{}, curvatures_b{};
    bool holds = false;  // every endpoint curvature <= -1/diameter + tol
};
DiameterReport diameter_convexity_probe(const Surface& s, Resolution res, double tol = 1e-8);

std::vector<double> gauss_legendre_nodes(int n, std::vector<double>& weights);

}  // namespace elastnp
