#include "elastnp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace elastnp {

using nlohmann::json;

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void validate(const SurfaceSpec& s, bool nested) {
    std::visit(
        [&](const auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                require_positive(sh.radius, "sphere radius");
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                require_positive(sh.a, "ellipsoid semiaxis");
                require_positive(sh.b, "ellipsoid semiaxis");
                require_positive(sh.c, "ellipsoid semiaxis");
            } else if constexpr (std::is_same_v<T, Torus>) {
                require_positive(sh.R, "torus R");
                require_positive(sh.r, "torus r");
                if (!(sh.R > sh.r)) throw std::invalid_argument("torus requires R > r");
            } else if constexpr (std::is_same_v<T, CylinderPatch>) {
                require_positive(sh.radius, "cylinder radius");
                require_positive(sh.length, "cylinder length");
            } else {
                if (nested) throw std::invalid_argument("union components cannot themselves be unions");
                if (sh.parts.empty()) throw std::invalid_argument("union needs at least one component");
                for (const auto& p : sh.parts) validate(p.spec, true);
            }
        },
        s.shape);
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw std::invalid_argument("surface spec: unknown key '" + it.key() + "'");
    }
}

double number(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("surface spec: missing key '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw std::invalid_argument(std::string("surface spec: '") + key + "' must be a number");
    return v.get<double>();
}

SurfaceSpec parse(const json& j, bool in_union) {
    if (!j.is_object()) throw std::invalid_argument("surface spec must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw std::invalid_argument("surface spec: missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    auto keys = [&](std::initializer_list<const char*> base) {
        std::vector<const char*> all(base);
        if (in_union) all.push_back("orientation");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (std::find_if(all.begin(), all.end(), [&](const char* a) { return it.key() == a; }) == all.end())
                throw std::invalid_argument("surface spec: unknown key '" + it.key() + "'");
    };
    SurfaceSpec s;
    if (kind == "sphere") {
        keys({"kind", "radius"});
        s.shape = Sphere{number(j, "radius")};
    } else if (kind == "ellipsoid") {
        keys({"kind", "semiaxes"});
        if (!j.contains("semiaxes") || !j.at("semiaxes").is_array() || j.at("semiaxes").size() != 3)
            throw std::invalid_argument("surface spec: 'semiaxes' must be an array of three numbers");
        const auto& ax = j.at("semiaxes");
        for (const auto& v : ax)
            if (!v.is_number()) throw std::invalid_argument("surface spec: 'semiaxes' must be numbers");
        s.shape = Ellipsoid{ax[0].get<double>(), ax[1].get<double>(), ax[2].get<double>()};
    } else if (kind == "torus") {
        keys({"kind", "R", "r"});
        s.shape = Torus{number(j, "R"), number(j, "r")};
    } else if (kind == "cylinder") {
        keys({"kind", "radius", "length"});
        s.shape = CylinderPatch{number(j, "radius"), number(j, "length")};
    } else if (kind == "union") {
        if (in_union) throw std::invalid_argument("union components cannot themselves be unions");
        reject_unknown(j, {"kind", "components"});
        if (!j.contains("components") || !j.at("components").is_array())
            throw std::invalid_argument("surface spec: union needs a 'components' array");
        SurfaceUnion u;
        for (const auto& c : j.at("components")) {
            UnionComponent part{parse(c, true), Orientation::outer};
            if (!c.contains("orientation")) throw std::invalid_argument("union component needs 'orientation'");
            const auto o = c.at("orientation");
            if (o == "outer")
                part.orientation = Orientation::outer;
            else if (o == "cavity")
                part.orientation = Orientation::cavity;
            else
                throw std::invalid_argument("orientation must be 'outer' or 'cavity'");
            u.parts.push_back(std::move(part));
        }
        s.shape = std::move(u);
    } else {
        throw std::invalid_argument("surface spec: unknown kind '" + kind + "'");
    }
    return s;
}

}  // namespace

SurfaceSpec surface_from_json(const json& j) {
    SurfaceSpec s = parse(j, false);
    validate(s, false);
    return s;
}

json surface_to_json(const SurfaceSpec& s) {
    return std::visit(
        [](const auto& sh) -> json {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return {{"kind", "sphere"}, {"radius", sh.radius}};
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                return {{"kind", "ellipsoid"}, {"semiaxes", {sh.a, sh.b, sh.c}}};
            } else if constexpr (std::is_same_v<T, Torus>) {
                return {{"kind", "torus"}, {"R", sh.R}, {"r", sh.r}};
            } else if constexpr (std::is_same_v<T, CylinderPatch>) {
                return {{"kind", "cylinder"}, {"radius", sh.radius}, {"length", sh.length}};
            } else {
                json parts = json::array();
                for (const auto& p : sh.parts) {
                    json c = surface_to_json(p.spec);
                    c["orientation"] = p.orientation == Orientation::outer ? "outer" : "cavity";
                    parts.push_back(std::move(c));
                }
                return {{"kind", "union"}, {"components", parts}};
            }
        },
        s.shape);
}

struct Surface::Chart {
    enum class Kind { ellipsoid, torus, cylinder };
    Kind kind;
    double p0, p1, p2;
    double orient;  // +1 if xu x xv points out of the body
    std::array<double, 4> domain;
    bool u_periodic, v_periodic;

    struct Jet {
        Vec3 x, xu, xv, xuu, xuv, xvv;
    };

    Jet jet(double u, double v) const {
        Jet j;
        switch (kind) {
        case Kind::ellipsoid: {
            // u = t in (-1,1), v = azimuth
            const double a = p0, b = p1, c = p2;
            if (!(u > -1.0 && u < 1.0)) throw std::domain_error("ellipsoid chart: t outside (-1, 1)");
            const double s = std::sqrt(1.0 - u * u);
            const double cp = std::cos(v), sp = std::sin(v);
            j.x = {a * s * cp, b * s * sp, c * u};
            j.xu = {-a * u / s * cp, -b * u / s * sp, c};
            j.xv = {-a * s * sp, b * s * cp, 0.0};
            const double s3 = s * s * s;
            j.xuu = {-a / s3 * cp, -b / s3 * sp, 0.0};
            j.xuv = {a * u / s * sp, -b * u / s * cp, 0.0};
            j.xvv = {-a * s * cp, -b * s * sp, 0.0};
            break;
        }
        case Kind::torus: {
            // u = ring angle, v = tube angle
            const double R = p0, r = p1;
            const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
            const double rho = R + r * cv;
            j.x = {rho * cu, rho * su, r * sv};
            j.xu = {-rho * su, rho * cu, 0.0};
            j.xv = {-r * sv * cu, -r * sv * su, r * cv};
            j.xuu = {-rho * cu, -rho * su, 0.0};
            j.xuv = {r * sv * su, -r * sv * cu, 0.0};
            j.xvv = {-r * cv * cu, -r * cv * su, -r * sv};
            break;
        }
        case Kind::cylinder: {
            // u = angle from the top line, v = axial coordinate
            const double R = p0;
            const double cu = std::cos(u), su = std::sin(u);
            j.x = {R * su, v, -R + R * cu};
            j.xu = {R * cu, 0.0, -R * su};
            j.xv = {0.0, 1.0, 0.0};
            j.xuu = {-R * su, 0.0, -R * cu};
            j.xuv = {0.0, 0.0, 0.0};
            j.xvv = {0.0, 0.0, 0.0};
            break;
        }
        }
        return j;
    }
};

namespace {

std::shared_ptr<const Surface::Chart> make_chart(const SurfaceSpec& s, Orientation o) {
    using Chart = Surface::Chart;
    const double flip = o == Orientation::outer ? 1.0 : -1.0;
    return std::visit(
        [&](const auto& sh) -> std::shared_ptr<const Chart> {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return std::make_shared<Chart>(Chart{Chart::Kind::ellipsoid, sh.radius, sh.radius, sh.radius,
                                                     -flip, {-1.0, 1.0, 0.0, 2 * M_PI}, false, true});
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                return std::make_shared<Chart>(
                    Chart{Chart::Kind::ellipsoid, sh.a, sh.b, sh.c, -flip, {-1.0, 1.0, 0.0, 2 * M_PI}, false, true});
            } else if constexpr (std::is_same_v<T, Torus>) {
                return std::make_shared<Chart>(
                    Chart{Chart::Kind::torus, sh.R, sh.r, 0.0, flip, {0.0, 2 * M_PI, 0.0, 2 * M_PI}, true, true});
            } else if constexpr (std::is_same_v<T, CylinderPatch>) {
                return std::make_shared<Chart>(Chart{Chart::Kind::cylinder, sh.radius, sh.length, 0.0, flip,
                                                     {0.0, 2 * M_PI, -0.5 * sh.length, 0.5 * sh.length}, true,
                                                     false});
            } else {
                throw std::logic_error("nested union");
            }
        },
        s.shape);
}

}  // namespace

Surface::Surface(SurfaceSpec spec) : spec_(std::move(spec)) {
    validate(spec_, false);
    if (auto* u = std::get_if<SurfaceUnion>(&spec_.shape)) {
        for (const auto& p : u->parts) charts_.push_back(make_chart(p.spec, p.orientation));
    } else {
        charts_.push_back(make_chart(spec_, Orientation::outer));
    }
}

bool Surface::closed() const {
    return std::none_of(charts_.begin(), charts_.end(),
                        [](const auto& c) { return c->kind == Chart::Kind::cylinder; });
}

std::array<double, 4> Surface::chart_domain(std::size_t component) const { return charts_.at(component)->domain; }

SurfacePointData Surface::point_data(std::size_t component, double u, double v) const {
    const Chart& ch = *charts_.at(component);
    const auto j = ch.jet(u, v);
    const Vec3 cr = cross(j.xu, j.xv);
    const double crn = norm(cr);
    const double E = dot(j.xu, j.xu), F = dot(j.xu, j.xv), G = dot(j.xv, j.xv);
    const double g = E * G - F * F;
    if (!(g > 1e-14 * (E * G)) || crn == 0.0) throw std::domain_error("point_data: degenerate metric");

    SurfacePointData pd;
    pd.position = j.x;
    pd.normal = (ch.orient / crn) * cr;
    pd.area_element = std::sqrt(g);
    const double L = dot(j.xuu, pd.normal), M = dot(j.xuv, pd.normal), N = dot(j.xvv, pd.normal);
    const double H = (E * N - 2 * F * M + G * L) / (2 * g);
    const double K = (L * N - M * M) / g;
    const double disc = std::sqrt(std::max(0.0, H * H - K));
    pd.kappa1 = H - disc;
    pd.kappa2 = H + disc;

    const double scale = std::max(std::abs(pd.kappa1), std::abs(pd.kappa2));
    Vec3 d1 = normalized(j.xu);
    if (disc > 1e-10 * std::max(scale, 1e-300)) {
        // (II - k I) w = 0 in chart coordinates
        const double k = pd.kappa1;
        const double a1 = N - k * G, b1 = -(M - k * F);
        const double a2 = M - k * F, b2 = -(L - k * E);
        const bool first = std::hypot(a1, b1) >= std::hypot(a2, b2);
        const double wu = first ? a1 : a2, wv = first ? b1 : b2;
        d1 = normalized(wu * j.xu + wv * j.xv);
    }
    pd.dir1 = d1;
    pd.dir2 = cross(pd.normal, d1);
    return pd;
}

std::vector<double> gauss_legendre_nodes(int n, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_nodes: n >= 1");
    std::vector<double> x(n);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        x[i] = -z;
        x[n - 1 - i] = z;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return x;
}

namespace {

struct Rule1D {
    std::vector<double> x, w;
};

Rule1D rule(double lo, double hi, int n, bool periodic) {
    Rule1D r;
    if (periodic) {
        const double h = (hi - lo) / n;
        for (int i = 0; i < n; ++i) {
            r.x.push_back(lo + i * h);
            r.w.push_back(h);
        }
    } else {
        std::vector<double> w;
        auto x = gauss_legendre_nodes(n, w);
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int i = 0; i < n; ++i) {
            r.x.push_back(mid + half * x[i]);
            r.w.push_back(half * w[i]);
        }
    }
    return r;
}

}  // namespace

double SurfaceQuadrature::total_weight() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
}

SurfaceQuadrature Surface::quadrature(Resolution res) const {
    if (res.nu < 2 || res.nv < 3) throw std::invalid_argument("quadrature: resolution below minimum (nu >= 2, nv >= 3)");
    SurfaceQuadrature q;
    for (std::size_t c = 0; c < charts_.size(); ++c) {
        const auto& ch = *charts_[c];
        const auto ru = rule(ch.domain[0], ch.domain[1], res.nu, ch.u_periodic);
        const auto rv = rule(ch.domain[2], ch.domain[3], res.nv, ch.v_periodic);
        for (std::size_t i = 0; i < ru.x.size(); ++i)
            for (std::size_t k = 0; k < rv.x.size(); ++k) {
                auto pd = point_data(c, ru.x[i], rv.x[k]);
                const double w = ru.w[i] * rv.w[k] * pd.area_element;
                if (!(w > 0.0)) throw NumericalError("quadrature: non-positive weight");
                q.nodes.push_back(pd);
                q.weights.push_back(w);
                q.component.push_back(static_cast<int>(c));
            }
    }
    return q;
}

namespace {

// Point data on the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 from the implicit form; no chart
// singularity at the poles. flip = +1 for the outer side.
SurfacePointData ellipsoid_point(double a, double b, double c, const Vec3& x, double flip) {
    const Vec3 grad{x[0] / (a * a), x[1] / (b * b), x[2] / (c * c)};
    const double g = norm(grad);
    SurfacePointData pd;
    pd.position = x;
    pd.normal = (flip / g) * grad;
    // tangent basis
    const Vec3 n = (1.0 / g) * grad;
    const Vec3 ref = std::abs(n[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    const Vec3 t1 = normalized(ref - dot(ref, n) * n);
    const Vec3 t2 = cross(n, t1);
    // second fundamental form w.r.t. the outward normal: -Hess(F)/|grad F| on the tangent plane
    const std::array<double, 3> h{1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)};
    auto form = [&](const Vec3& u, const Vec3& v) {
        return -flip * (h[0] * u[0] * v[0] + h[1] * u[1] * v[1] + h[2] * u[2] * v[2]) / g;
    };
    const double L = form(t1, t1), M = form(t1, t2), N = form(t2, t2);
    const double mean = 0.5 * (L + N), disc = std::hypot(0.5 * (L - N), M);
    pd.kappa1 = mean - disc;
    pd.kappa2 = mean + disc;
    Vec3 d1 = t1;
    if (disc > 1e-12 * std::max(std::abs(mean), 1e-300)) {
        const double w1 = M, w2 = pd.kappa1 - L;  // (II - k1) w = 0
        const double alt1 = pd.kappa1 - N, alt2 = M;
        d1 = std::hypot(w1, w2) >= std::hypot(alt1, alt2) ? normalized(w1 * t1 + w2 * t2)
                                                           : normalized(alt1 * t1 + alt2 * t2);
    }
    pd.dir1 = d1;
    pd.dir2 = cross(pd.normal, d1);
    return pd;
}

}  // namespace

SurfaceQuadrature Surface::symmetric_grid(int n) const {
    if (charts_.size() != 1 || !closed()) throw std::invalid_argument("symmetric_grid: needs a single closed component");
    if (n < 2) throw std::invalid_argument("symmetric_grid: n >= 2");
    const Chart& ch = *charts_[0];
    SurfaceQuadrature q;
    if (ch.kind == Chart::Kind::torus) {
        const auto ru = rule(ch.domain[0], ch.domain[1], 2 * n, true);
        const auto rv = rule(ch.domain[2], ch.domain[3], n, true);
        for (std::size_t i = 0; i < ru.x.size(); ++i)
            for (std::size_t k = 0; k < rv.x.size(); ++k) {
                // half-cell offset keeps the grid off the chart seams
                auto pd = point_data(0, ru.x[i] + 0.5 * (ru.x[1] - ru.x[0]), rv.x[k] + 0.5 * (rv.x[1] - rv.x[0]));
                q.weights.push_back(ru.w[i] * rv.w[k] * pd.area_element);
                q.nodes.push_back(pd);
                q.component.push_back(0);
            }
        return q;
    }
    // ellipsoid chart: orient = -1 for the outer side
    const double flip = -ch.orient;
    const double a = ch.p0, b = ch.p1, c = ch.p2;
    const double h = 0.5 * M_PI / n;
    const std::array<Vec3, 6> axes{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
    for (const Vec3& ax : axes) {
        const Vec3 e1 = std::abs(ax[2]) > 0.5 ? Vec3{1, 0, 0} : Vec3{0, 0, 1};
        const Vec3 e2 = cross(ax, e1);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const double ta = std::tan(-0.25 * M_PI + (i + 0.5) * h), tb = std::tan(-0.25 * M_PI + (k + 0.5) * h);
                const Vec3 v = ax + ta * e1 + tb * e2;
                const double vn = norm(v);
                const Vec3 p = (1.0 / vn) * v;
                // d p / d alpha = (I - p p^T) sec^2(alpha) e1 / |v|, then stretch by diag(a, b, c)
                auto dp = [&](const Vec3& e, double t) {
                    const Vec3 dv = (1.0 + t * t) * e;
                    return (1.0 / vn) * (dv - dot(dv, p) * p);
                };
                Vec3 da = dp(e1, ta), db = dp(e2, tb);
                da = {a * da[0], b * da[1], c * da[2]};
                db = {a * db[0], b * db[1], c * db[2]};
                const Vec3 x{a * p[0], b * p[1], c * p[2]};
                auto pd = ellipsoid_point(a, b, c, x, flip);
                pd.area_element = norm(cross(da, db));
                q.weights.push_back(h * h * pd.area_element);
                q.nodes.push_back(pd);
                q.component.push_back(0);
            }
    }
    return q;
}

double willmore_energy(const Surface& s, Resolution res) {
    const auto q = s.quadrature(res);
    double w = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double h = 0.5 * (q.nodes[i].kappa1 + q.nodes[i].kappa2);
        w += q.weights[i] * h * h;
    }
    return w;
}

double euler_characteristic_gb(const Surface& s, Resolution res, double tol) {
    const auto q = s.quadrature(res);
    double k = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) k += q.weights[i] * q.nodes[i].kappa1 * q.nodes[i].kappa2;
    const double chi = k / (2.0 * M_PI);
    if (std::abs(chi - std::round(chi)) > tol) {
        std::ostringstream os;
        os << "euler_characteristic_gb: " << chi << " is not within " << tol << " of an integer (quadrature too coarse)";
        throw NumericalError(os.str());
    }
    return chi;
}

DiameterReport diameter_convexity_probe(const Surface& s, Resolution res, double tol) {
    if (s.component_count() != 1 || !s.closed())
        throw std::invalid_argument("diameter_convexity_probe: needs a single closed component");
    const auto q = s.quadrature(res);
    DiameterReport rep;
    std::size_t ia = 0, ib = 0;
    double best = -1;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < q.nodes.size(); ++j) {
            const Vec3 d = q.nodes[i].position - q.nodes[j].position;
            const double dd = dot(d, d);
            if (dd > best) {
                best = dd;
                ia = i;
                ib = j;
            }
        }
    rep.diameter = std::sqrt(best);
    rep.end_a = q.nodes[ia].position;
    rep.end_b = q.nodes[ib].position;
    rep.curvatures_a = {q.nodes[ia].kappa1, q.nodes[ia].kappa2};
    rep.curvatures_b = {q.nodes[ib].kappa1, q.nodes[ib].kappa2};
    const double bound = -1.0 / rep.diameter + tol;
    rep.holds = rep.curvatures_a[1] <= bound && rep.curvatures_b[1] <= bound;
    return rep;
}

}  // namespace elastnp
