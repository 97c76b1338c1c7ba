#pragma once

#include <array>
#include <vector>

#include "elastnp/numerics.hpp"

namespace elastnp {

class LameMaterial {
public:
    LameMaterial(double lambda, double mu);

    double lambda() const { return lambda_; }
    double mu() const { return mu_; }
    // essential spectrum is {-kappa, 0, kappa}
    double kappa() const { return kappa_; }
    // (lambda + mu) / (2 (lambda + 2 mu)) = 1/2 - kappa
    double em() const { return em_; }
    double lambda_prime() const { return lambda_prime_; }
    double mu_prime() const { return mu_prime_; }

private:
    double lambda_, mu_;
    double kappa_, em_, lambda_prime_, mu_prime_;
};

class EssentialPoint {
public:
    explicit EssentialPoint(int iota);
    int iota() const { return iota_; }
    double omega(const LameMaterial& m) const { return iota_ * m.kappa(); }

private:
    int iota_;
};

Mat3 kelvin_matrix(const LameMaterial& m, const Vec3& d);
Mat3 single_layer_kernel(const LameMaterial& m, const Vec3& x, const Vec3& y);

// Traction of a displacement field with the given Jacobian grad[r][s] = d u_r / d x_s,
// component form T_pq = lambda nu_p d_q + lambda nu_q d_p + mu delta_pq d_nu.
Vec3 traction_apply(const LameMaterial& m, const Vec3& normal, const Mat3& grad);

// Double-layer (Neumann-Poincare) kernel, normal taken at the integration point y.
Mat3 np_kernel(const LameMaterial& m, const Vec3& x, const Vec3& y, const Vec3& normal_at_y);

// One entry of a kernel expansion: coeff * y1^a y2^b / (2 pi |y|^p) at matrix slot (row, col).
// The coefficient is split into material parts so the expansion stays symbolic in (kappa, em).
struct MonomialTerm {
    int row, col;
    double c_kappa;  // multiplies kappa
    double c_em;     // multiplies em
    int a, b, p;

    double coeff(const LameMaterial& m) const { return c_kappa * m.kappa() + c_em * m.em(); }
};

// Expansion of np_kernel at the origin of the quadric x3 = (k1 y1^2 + k2 y2^2)/2 with
// the outward normal along +x3. Leading: odd, degree -2. Curvature terms: degree -1.
struct KernelExpansion {
    std::vector<MonomialTerm> leading;
    std::vector<MonomialTerm> antisym;  // curvature part of the nu x d line
    std::vector<MonomialTerm> normal;   // the (nu . d) line

    Mat3 evaluate(const std::vector<MonomialTerm>& terms, const LameMaterial& m, double y1, double y2) const;
};

KernelExpansion quadric_kernel_expansion(double k1, double k2);

// Cylinder x1^2 + (x3 + R)^2 = R^2 around the origin: curvature kappa = -1/R along x1.
// Returns (K1, K2): K1 is the antisymmetric line (leading + curvature part), K2 the normal line.
std::pair<Mat3, Mat3> cylinder_kernel_expansion(const LameMaterial& m, double curvature, double y1, double y2);

}  // namespace elastnp
