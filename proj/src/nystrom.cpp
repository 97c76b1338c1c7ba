#include "elastnp/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "elastnp/parallel.hpp"

namespace elastnp {

namespace {

void check_budget(std::size_t nodes) {
    if (3 * nodes > kMaxNystromDofs) {
        std::ostringstream os;
        os << "nystrom: " << 3 * nodes << " unknowns exceed the dense budget of " << kMaxNystromDofs;
        throw std::invalid_argument(os.str());
    }
}

void check_surface(const Surface& s) {
    if (s.component_count() != 1 || !s.closed())
        throw std::invalid_argument("nystrom: needs a single closed surface component");
}

}  // namespace

NystromSystem assemble_np(const Surface& s, const LameMaterial& m, int n_grid) {
    check_surface(s);
    NystromSystem sys;
    sys.quad = s.symmetric_grid(n_grid);
    const auto& q = sys.quad;
    const std::size_t n = q.nodes.size();
    check_budget(n);
    sys.K = DenseMatrix(3 * n);
    auto& K = sys.K;
    parallel_for(n, [&](std::size_t i) {
        const double si = std::sqrt(q.weights[i]);
        Mat3 rowsum;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            // block transpose: the orientation that reproduces every rigid motion with eigenvalue 1/2
            const Mat3 k = transpose(np_kernel(m, q.nodes[i].position, q.nodes[j].position, q.nodes[j].normal));
            const double wj = q.weights[j], sj = std::sqrt(wj);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    K(3 * i + a, 3 * j + b) = si * k(a, b) * sj;
                    rowsum(a, b) += k(a, b) * wj;
                }
        }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) K(3 * i + a, 3 * i + b) = (a == b ? 0.5 : 0.0) - rowsum(a, b);
    });
    return sys;
}

DenseMatrix assemble_single_layer(const SurfaceQuadrature& q, const LameMaterial& m) {
    const std::size_t n = q.nodes.size();
    check_budget(n);
    DenseMatrix S(3 * n);
    parallel_for(n, [&](std::size_t i) {
        const double si = std::sqrt(q.weights[i]);
        for (std::size_t j = 0; j < n; ++j) {
            Mat3 g;
            if (j == i) {
                const double rho = std::sqrt(q.weights[i] / M_PI);
                const Vec3& nu = q.nodes[i].normal;
                const double iso = m.lambda_prime() * 2.0 * M_PI * rho;
                const double tan = m.mu_prime() * M_PI * rho;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) g(a, b) = tan * ((a == b ? 1.0 : 0.0) - nu[a] * nu[b]) + (a == b ? iso : 0.0);
            } else {
                const double sj = std::sqrt(q.weights[j]);
                g = si * sj * kelvin_matrix(m, q.nodes[i].position - q.nodes[j].position);
            }
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) S(3 * i + a, 3 * j + b) = g(a, b);
        }
    });
    return S;
}

DenseMatrix assemble_single_layer(const Surface& s, const LameMaterial& m, int n_grid) {
    check_surface(s);
    return assemble_single_layer(s.symmetric_grid(n_grid), m);
}

DenseMatrix unfold(const DenseMatrix& folded, const SurfaceQuadrature& q) {
    const std::size_t n = q.nodes.size();
    if (folded.size() != 3 * n) throw std::invalid_argument("unfold: size mismatch");
    DenseMatrix out(3 * n);
    for (std::size_t r = 0; r < 3 * n; ++r)
        for (std::size_t c = 0; c < 3 * n; ++c)
            out(r, c) = folded(r, c) * std::sqrt(q.weights[c / 3] / q.weights[r / 3]);
    return out;
}

SpectrumSample np_spectrum(const NystromSystem& sys) {
    SpectrumSample s;
    s.eigenvalues = real_schur_spectrum(sys.K);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](const cplx& a, const cplx& b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    for (const auto& e : s.eigenvalues) {
        s.max_imag = std::max(s.max_imag, std::abs(e.imag()));
        s.spectral_radius = std::max(s.spectral_radius, std::abs(e));
    }
    return s;
}

ClusterCounts cluster_counts(const SpectrumSample& s, const LameMaterial& m, const ClusterWindow& w) {
    const double k = m.kappa();
    if (!(w.tau > 0.0) || !(w.tau_ref > w.tau)) throw std::invalid_argument("cluster_counts: need 0 < tau < tau_ref");
    if (!(w.tau_ref < 0.5 * k)) throw std::invalid_argument("cluster_counts: tau_ref must stay below half the gap kappa");
    ClusterCounts c;
    c.omega = {-k, 0.0, k};
    for (const auto& e : s.eigenvalues) {
        const double x = e.real();
        bool near = false;
        for (int i = 0; i < 3; ++i) {
            const double d = x - c.omega[i];
            if (std::abs(d) < w.tau_ref) near = true;
            if (d > w.tau && d < w.tau_ref) ++c.above[i];
            if (-d > w.tau && -d < w.tau_ref) ++c.below[i];
        }
        if (!near) ++c.outside;
    }
    return c;
}

std::vector<cplx> cluster_near(const SpectrumSample& s, double value, double radius) {
    std::vector<cplx> out;
    for (const auto& e : s.eigenvalues)
        if (std::abs(e.real() - value) <= radius) out.push_back(e);
    return out;
}

double symmetrizer_residual(const DenseMatrix& S, const DenseMatrix& K) {
    if (S.size() != K.size()) throw std::invalid_argument("symmetrizer_residual: size mismatch");
    const DenseMatrix skt = matmul(S, transpose(K));
    const DenseMatrix ks = matmul(K, S);
    double d = 0;
    const auto a = skt.data(), b = ks.data();
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(d) / (frobenius(S) * frobenius(K));
}

std::string eigenvalues_csv(const SpectrumSample& s) {
    std::ostringstream os;
    os << std::setprecision(17) << "re,im\n";
    for (const auto& e : s.eigenvalues) os << e.real() << "," << e.imag() << "\n";
    return os.str();
}

nlohmann::json cluster_json(const ClusterCounts& c, const SpectrumSample& s, const ClusterWindow& w) {
    nlohmann::json pts = nlohmann::json::array();
    for (int i = 0; i < 3; ++i)
        pts.push_back({{"iota", i - 1}, {"omega", c.omega[i]}, {"above", c.above[i]}, {"below", c.below[i]}});
    return {{"tau", w.tau},
            {"tau_ref", w.tau_ref},
            {"points", pts},
            {"outside", c.outside},
            {"size", s.eigenvalues.size()},
            {"max_imag", s.max_imag},
            {"spectral_radius", s.spectral_radius},
            {"largest_real", s.eigenvalues.empty() ? 0.0 : s.eigenvalues.front().real()}};
}

}  // namespace elastnp
