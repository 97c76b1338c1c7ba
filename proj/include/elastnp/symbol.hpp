#pragma once

#include <span>
#include <string>
#include <vector>

#include "elastnp/elastic.hpp"
#include "elastnp/numerics.hpp"

namespace elastnp {

// Unit covector (cos theta, sin theta) in the C-frame.
struct CircleDirection {
    double theta = 0, phi1 = 1, phi2 = 0;

    static CircleDirection at(double theta) { return {theta, std::cos(theta), std::sin(theta)}; }
    // (phi1, phi2) -> (phi2, phi1)
    CircleDirection swapped() const { return at(0.5 * M_PI - theta); }
};

// Weights (kappa, em) kept separate from LameMaterial so symbols can be split into
// their kappa- and em-linear parts.
struct MaterialWeights {
    double kappa = 0, em = 0;
    static MaterialWeights of(const LameMaterial& m) { return {m.kappa(), m.em()}; }
};

// All symbol evaluators work at |xi| = 1; callers apply |xi|^degree.
Mat3C k0(const CircleDirection& dir, const LameMaterial& m);

struct K0Eigensystem {
    std::array<double, 3> values;                // -kappa, 0, kappa
    std::array<std::array<cplx, 3>, 3> vectors;  // orthonormal, matching values
};
K0Eigensystem k0_eigensystem(const CircleDirection& dir, const LameMaterial& m);
Mat3C spectral_projector(int iota, const CircleDirection& dir, const LameMaterial& m);

// d k0 / d xi_alpha at |xi| = 1, alpha in {0, 1}
Mat3C dk0_dxi(int alpha, const CircleDirection& dir, const LameMaterial& m);
// d k0 / d x_alpha at the origin of the quadric with curvatures (k1, k2), ambient frame
Mat3C dk0_dx(int alpha, const CircleDirection& dir, const LameMaterial& m, double k1, double k2);
Mat3C dk0_dx1_cylinder(const CircleDirection& dir, const LameMaterial& m, double curvature);

// Fourier transform (e^{-i y xi}) of y1^a y2^b / (2 pi |y|^p) on the unit circle.
cplx ft_homogeneous(int a, int b, int p, const CircleDirection& dir);
bool ft_supported(int a, int b, int p);

// Symbol of a list of monomial kernel terms.
Mat3C symbol_of_terms(const std::vector<MonomialTerm>& terms, const CircleDirection& dir, MaterialWeights w);

// Order -1 subsymbol at the origin of the quadric, re-derived from the kernel expansion.
Mat3C subsymbol(const CircleDirection& dir, MaterialWeights w, double k1, double k2);
Mat3C subsymbol_cylinder(const CircleDirection& dir, const LameMaterial& m, double curvature);

double p_prime(int iota, const LameMaterial& m);
// ordered multiset {-1,-1,0,0,1,1} with one copy of iota removed
std::array<int, 5> factor_multiset(int iota);

Mat3C assemble_F(int iota, const Mat3C& k0v, const Mat3C& ksub, const LameMaterial& m);

struct GradientPair {
    Mat3C dxi;  // d k0 / d xi_alpha
    Mat3C dx;   // d k0 / d x_alpha
};
// includes the 1/i prefactor
Mat3C assemble_G(int iota, const Mat3C& k0v, std::span<const GradientPair> grads, const LameMaterial& m);

// p'^-1 (F + G) at the origin of the quadric (k1, k2), computed from scratch.
Mat3C effective_symbol_direct(int iota, double k1, double k2, const CircleDirection& dir, const LameMaterial& m);

// kappa^-1 p'^-1 (F + G) on the cylinder of curvature kappa; independent of kappa.
Mat3C universal_matrix(int iota, const CircleDirection& dir, const LameMaterial& m, double curvature = -1.0);

// row/column swap of the two tangent axes
Mat3C swap_involution();

// Universal matrix sampled on a uniform theta grid, for fast effective-symbol evaluation.
class UniversalTable {
public:
    UniversalTable(int iota, const LameMaterial& m, int n_theta);
    int iota() const { return iota_; }
    int size() const { return static_cast<int>(dirs_.size()); }
    const CircleDirection& direction(int k) const { return dirs_[k]; }
    const Mat3C& M(int k) const { return m_[k]; }
    // V M(theta-hat) V
    const Mat3C& swapped(int k) const { return vmv_[k]; }

private:
    int iota_;
    std::vector<CircleDirection> dirs_;
    std::vector<Mat3C> m_, vmv_;
};

// k1 M(theta) + k2 V M(theta-hat) V
Mat3C effective_symbol(int iota, double k1, double k2, const CircleDirection& dir, const LameMaterial& m);

Mat3C single_layer_symbol(const CircleDirection& dir, const LameMaterial& m);  // degree -1
Mat3C q_symbol(const CircleDirection& dir, const LameMaterial& m);             // degree -1/2
Mat3C z_symbol(const CircleDirection& dir, const LameMaterial& m);             // degree +1/2
Mat3C tangent_projector(const CircleDirection& dir);                           // L(xi) (+) 1

// z m q, checked Hermitian to 1e-10 relative
Mat3C hermitian_reduce(const Mat3C& msym, const CircleDirection& dir, const LameMaterial& m);

// M = kappa X + em Y, least squares over the given materials
struct MaterialSplit {
    Mat3C X, Y;
    double residual = 0;
};
MaterialSplit material_split(int iota, const CircleDirection& dir, std::span<const LameMaterial> materials);

// Term-by-term comparison of the derived subsymbol and k0 gradients against tabulated forms.
std::string audit_subsymbol_report(int n_theta = 16);

}  // namespace elastnp
