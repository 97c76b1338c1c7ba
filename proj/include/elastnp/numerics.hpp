#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace elastnp {

using cplx = std::complex<double>;

// Raised when an iterative kernel or a consistency check fails on valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 normalized(const Vec3& a) { return (1.0 / norm(a)) * a; }

// 3x3 matrix, row-major.
template <class T>
struct Mat3T {
    std::array<T, 9> a{};

    T& operator()(int i, int j) { return a[3 * i + j]; }
    const T& operator()(int i, int j) const { return a[3 * i + j]; }

    static Mat3T identity() {
        Mat3T m;
        m(0, 0) = m(1, 1) = m(2, 2) = T(1);
        return m;
    }
    static Mat3T diag(T d0, T d1, T d2) {
        Mat3T m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        return m;
    }

    Mat3T& operator+=(const Mat3T& o) {
        for (int k = 0; k < 9; ++k) a[k] += o.a[k];
        return *this;
    }
    Mat3T& operator-=(const Mat3T& o) {
        for (int k = 0; k < 9; ++k) a[k] -= o.a[k];
        return *this;
    }
    Mat3T& operator*=(T s) {
        for (auto& x : a) x *= s;
        return *this;
    }
};

using Mat3 = Mat3T<double>;
using Mat3C = Mat3T<cplx>;

template <class T> Mat3T<T> operator+(Mat3T<T> x, const Mat3T<T>& y) { return x += y; }
template <class T> Mat3T<T> operator-(Mat3T<T> x, const Mat3T<T>& y) { return x -= y; }
template <class T> Mat3T<T> operator*(T s, Mat3T<T> x) { return x *= s; }
inline Mat3C operator*(double s, Mat3C x) { return x *= cplx(s); }

template <class T>
Mat3T<T> operator*(const Mat3T<T>& x, const Mat3T<T>& y) {
    Mat3T<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
    return r;
}

template <class T>
Mat3T<T> transpose(const Mat3T<T>& x) {
    Mat3T<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
    return r;
}

Mat3C adjoint(const Mat3C& x);
Mat3C to_complex(const Mat3& x);
Mat3 outer(const Vec3& u, const Vec3& v);
Vec3 operator*(const Mat3& m, const Vec3& v);
double frobenius(const Mat3C& x);
double max_abs(const Mat3C& x);
cplx trace(const Mat3C& x);
cplx det(const Mat3C& x);
// max |h_pq - conj(h_qp)|
double hermitian_defect(const Mat3C& h);

struct HermitianEig3 {
    std::array<double, 3> values;       // ascending
    std::array<std::array<cplx, 3>, 3> vectors;  // vectors[k] pairs with values[k]
};

HermitianEig3 hermitian_eig3(const Mat3C& h);
std::array<double, 3> hermitian_eigvals3(const Mat3C& h);
Mat3C spd_sqrt3(const Mat3C& s);

// Dense square real matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
        if (n == 0) throw std::invalid_argument("DenseMatrix: size must be positive");
    }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::span<double> row(std::size_t i) { return {a_.data() + i * n_, n_}; }
    std::span<const double> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }
    std::span<const double> data() const { return a_; }

    static DenseMatrix identity(std::size_t n);

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

double frobenius(const DenseMatrix& a);
double trace(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

// Cyclic Jacobi; eigenvalues sorted descending.
std::vector<double> jacobi_sym_eig(DenseMatrix a, double sym_tol = 1e-10);

// In-place Cholesky of a symmetric matrix. positive is false as soon as a pivot is not
// above pivot_floor * max|diag|; min_pivot is the smallest pivot reached.
struct CholeskyReport {
    bool positive = false;
    double min_pivot = 0;
    std::size_t failed_at = 0;
};
CholeskyReport cholesky_check(DenseMatrix a, double pivot_floor = 0.0);

// Hessenberg reduction followed by Francis double-shift QR, eigenvalues only.
std::vector<cplx> real_schur_spectrum(DenseMatrix a);

void hessenberg_reduce(DenseMatrix& a);

}  // namespace elastnp
