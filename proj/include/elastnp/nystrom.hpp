#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "elastnp/elastic.hpp"
#include "elastnp/geometry.hpp"
#include "elastnp/numerics.hpp"

namespace elastnp {

inline constexpr std::size_t kMaxNystromDofs = 6000;

// Matrices act on 3N vectors ordered node-major; both are folded with sqrt(w) on each side,
// so K here is similar to the plain Nystrom matrix K_ij w_j.
struct NystromSystem {
    SurfaceQuadrature quad;
    DenseMatrix K;
    std::size_t nodes() const { return quad.nodes.size(); }
};

// Double layer (normal at the source point) on the locally symmetric grid; diagonal blocks
// from the rigid-translation identity sum_j K_ij w_j = E / 2.
// n_grid as in Surface::symmetric_grid.
NystromSystem assemble_np(const Surface& s, const LameMaterial& m, int n_grid);

// Kelvin kernel, folded; diagonal blocks are the flat-disc integral over a disc of area w_i.
DenseMatrix assemble_single_layer(const SurfaceQuadrature& q, const LameMaterial& m);
DenseMatrix assemble_single_layer(const Surface& s, const LameMaterial& m, int n_grid);

// Unfold: plain Nystrom matrix K_ij w_j from the folded one.
DenseMatrix unfold(const DenseMatrix& folded, const SurfaceQuadrature& q);

struct SpectrumSample {
    std::vector<cplx> eigenvalues;  // sorted by descending real part
    double max_imag = 0;
    double spectral_radius = 0;
};
SpectrumSample np_spectrum(const NystromSystem& sys);

struct ClusterWindow {
    double tau = 0.01;      // inner distance
    double tau_ref = 0.05;  // outer distance, below half the gap kappa
};
struct ClusterCounts {
    std::array<double, 3> omega{};           // -kappa, 0, kappa
    std::array<long long, 3> above{}, below{};
    long long outside = 0;                    // farther than tau_ref from every point
};
ClusterCounts cluster_counts(const SpectrumSample& s, const LameMaterial& m, const ClusterWindow& w);

// eigenvalues whose real part lies within radius of value
std::vector<cplx> cluster_near(const SpectrumSample& s, double value, double radius);

// ||S K^T - K S||_F / (||S|| ||K||) on the folded matrices
double symmetrizer_residual(const DenseMatrix& S, const DenseMatrix& K);

std::string eigenvalues_csv(const SpectrumSample& s);
nlohmann::json cluster_json(const ClusterCounts& c, const SpectrumSample& s, const ClusterWindow& w);

}  // namespace elastnp
