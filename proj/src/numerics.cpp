#include "elastnp/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace elastnp {

Mat3C adjoint(const Mat3C& x) {
    Mat3C r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = std::conj(x(j, i));
    return r;
}

Mat3C to_complex(const Mat3& x) {
    Mat3C r;
    for (int k = 0; k < 9; ++k) r.a[k] = x.a[k];
    return r;
}

Mat3 outer(const Vec3& u, const Vec3& v) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = u[i] * v[j];
    return r;
}

Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {m(0, 0) * v[0] + m(0, 1) * v[1] + m(0, 2) * v[2],
            m(1, 0) * v[0] + m(1, 1) * v[1] + m(1, 2) * v[2],
            m(2, 0) * v[0] + m(2, 1) * v[1] + m(2, 2) * v[2]};
}

double frobenius(const Mat3C& x) {
    double s = 0;
    for (const auto& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

double max_abs(const Mat3C& x) {
    double m = 0;
    for (const auto& v : x.a) m = std::max(m, std::abs(v));
    return m;
}

cplx trace(const Mat3C& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

cplx det(const Mat3C& x) {
    return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
           x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
           x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

double hermitian_defect(const Mat3C& h) {
    double d = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) d = std::max(d, std::abs(h(i, j) - std::conj(h(j, i))));
    return d;
}

namespace {

using CVec = std::array<cplx, 3>;

CVec bicross(const CVec& a, const CVec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double cnorm(const CVec& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2])); }

CVec scaled(const CVec& v, cplx s) { return {s * v[0], s * v[1], s * v[2]}; }

CVec conjv(const CVec& v) { return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])}; }

// <u, v> with the first slot conjugated
cplx inner(const CVec& u, const CVec& v) {
    return std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1] + std::conj(u[2]) * v[2];
}

CVec matvec(const Mat3C& m, const CVec& v) {
    CVec r;
    for (int i = 0; i < 3; ++i) r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2];
    return r;
}

// Kernel vector of the (numerically) rank-2 matrix m via the best row cross product.
CVec null_vector(const Mat3C& m) {
    CVec r0{m(0, 0), m(0, 1), m(0, 2)}, r1{m(1, 0), m(1, 1), m(1, 2)}, r2{m(2, 0), m(2, 1), m(2, 2)};
    std::array<CVec, 3> c{bicross(r0, r1), bicross(r0, r2), bicross(r1, r2)};
    int best = 0;
    double bn = cnorm(c[0]);
    for (int k = 1; k < 3; ++k) {
        double nk = cnorm(c[k]);
        if (nk > bn) {
            bn = nk;
            best = k;
        }
    }
    if (bn == 0.0) return {1.0, 0.0, 0.0};
    return scaled(c[best], 1.0 / bn);
}

}  // namespace

HermitianEig3 hermitian_eig3(const Mat3C& h) {
    const double hn = frobenius(h);
    const double defect = hermitian_defect(h);
    if (defect > 1e-12 * std::max(hn, std::numeric_limits<double>::min())) {
        std::ostringstream os;
        os << "hermitian_eig3: input not Hermitian, asymmetry " << defect << " (norm " << hn << ")";
        throw NumericalError(os.str());
    }
    Mat3C hs = 0.5 * (h + adjoint(h));

    HermitianEig3 out;
    const double mean = trace(hs).real() / 3.0;
    Mat3C b = hs - Mat3C::diag(mean, mean, mean);
    const double r2 = frobenius(b) * frobenius(b) / 6.0;
    if (r2 <= 0.0) {
        out.values = {mean, mean, mean};
        out.vectors = {CVec{1.0, 0.0, 0.0}, CVec{0.0, 1.0, 0.0}, CVec{0.0, 0.0, 1.0}};
        return out;
    }
    const double r = std::sqrt(r2);
    const double half_det = std::clamp(det((1.0 / r) * b).real() / 2.0, -1.0, 1.0);
    const double phi = std::acos(half_det) / 3.0;
    const double lmax = mean + 2.0 * r * std::cos(phi);
    const double lmin = mean + 2.0 * r * std::cos(phi + 2.0 * M_PI / 3.0);
    const double lmid = 3.0 * mean - lmax - lmin;

    // the most isolated eigenvalue has a well-conditioned eigenvector; the other two
    // come from the exact 2x2 problem on its orthogonal complement
    const bool top_isolated = (lmax - lmid) >= (lmid - lmin);
    const double liso = top_isolated ? lmax : lmin;
    CVec v = null_vector(hs - Mat3C::diag(liso, liso, liso));

    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v[i]) < std::abs(v[k])) k = i;
    CVec e{0.0, 0.0, 0.0};
    e[k] = 1.0;
    CVec u1 = e;
    const cplx proj = inner(v, e);
    for (int i = 0; i < 3; ++i) u1[i] -= proj * v[i];
    u1 = scaled(u1, 1.0 / cnorm(u1));
    CVec u2 = bicross(conjv(v), conjv(u1));
    u2 = scaled(u2, 1.0 / cnorm(u2));

    const double a = inner(u1, matvec(hs, u1)).real();
    const double d = inner(u2, matvec(hs, u2)).real();
    const cplx off = inner(u1, matvec(hs, u2));
    const double half = 0.5 * (a - d);
    const double rad = std::hypot(half, std::abs(off));
    const double mid = 0.5 * (a + d);
    cplx x1 = 1.0, x2 = 0.0;
    if (rad > 0.0) {
        if (half >= 0.0) {
            x1 = half + rad;
            x2 = std::conj(off);
        } else {
            x1 = off;
            x2 = rad - half;
        }
        const double xn = std::sqrt(std::norm(x1) + std::norm(x2));
        x1 /= xn;
        x2 /= xn;
    }
    CVec wp, wm;
    for (int i = 0; i < 3; ++i) {
        wp[i] = x1 * u1[i] + x2 * u2[i];
        wm[i] = -std::conj(x2) * u1[i] + std::conj(x1) * u2[i];
    }
    const double liso_refined = inner(v, matvec(hs, v)).real();

    std::array<std::pair<double, CVec>, 3> pairs{
        std::pair{liso_refined, v}, std::pair{mid + rad, wp}, std::pair{mid - rad, wm}};
    std::sort(pairs.begin(), pairs.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    for (int i = 0; i < 3; ++i) {
        out.values[i] = pairs[i].first;
        out.vectors[i] = pairs[i].second;
    }
    return out;
}

// values only, trigonometric cubic; absolute accuracy ~ eps * |h|
std::array<double, 3> hermitian_eigvals3(const Mat3C& h) {
    const double hn = frobenius(h);
    const double defect = hermitian_defect(h);
    if (defect > 1e-12 * std::max(hn, std::numeric_limits<double>::min())) {
        std::ostringstream os;
        os << "hermitian_eigvals3: input not Hermitian, asymmetry " << defect << " (norm " << hn << ")";
        throw NumericalError(os.str());
    }
    const double d0 = h(0, 0).real(), d1 = h(1, 1).real(), d2 = h(2, 2).real();
    const double mean = (d0 + d1 + d2) / 3.0;
    const double b0 = d0 - mean, b1 = d1 - mean, b2 = d2 - mean;
    const cplx o01 = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
    const cplx o02 = 0.5 * (h(0, 2) + std::conj(h(2, 0)));
    const cplx o12 = 0.5 * (h(1, 2) + std::conj(h(2, 1)));
    const double off2 = std::norm(o01) + std::norm(o02) + std::norm(o12);
    const double r2 = (b0 * b0 + b1 * b1 + b2 * b2 + 2.0 * off2) / 6.0;
    if (r2 <= 0.0) return {mean, mean, mean};
    const double r = std::sqrt(r2);
    // det of the shifted matrix
    const double detb = b0 * b1 * b2 + 2.0 * (o01 * o12 * std::conj(o02)).real() - b0 * std::norm(o12) -
                        b1 * std::norm(o02) - b2 * std::norm(o01);
    const double half_det = std::clamp(detb / (2.0 * r2 * r), -1.0, 1.0);
    const double phi = std::acos(half_det) / 3.0;
    const double lmax = mean + 2.0 * r * std::cos(phi);
    const double lmin = mean + 2.0 * r * std::cos(phi + 2.0 * M_PI / 3.0);
    const double lmid = 3.0 * mean - lmax - lmin;
    // near a double root the trigonometric form only keeps half the digits; deflate instead
    if (std::min(lmax - lmid, lmid - lmin) < 1e-3 * r) return hermitian_eig3(h).values;
    return {lmin, lmid, lmax};
}

Mat3C spd_sqrt3(const Mat3C& s) {
    const auto eig = hermitian_eig3(s);
    Mat3C r;
    for (int k = 0; k < 3; ++k) {
        if (!(eig.values[k] > 0.0)) {
            std::ostringstream os;
            os << "spd_sqrt3: non-positive eigenvalue " << eig.values[k];
            throw NumericalError(os.str());
        }
        const double sq = std::sqrt(eig.values[k]);
        const auto& v = eig.vectors[k];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) += sq * v[i] * std::conj(v[j]);
    }
    return r;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double frobenius(const DenseMatrix& a) {
    double s = 0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double trace(const DenseMatrix& a) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a(i, i);
    return s;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("matmul: size mismatch");
    DenseMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    const std::size_t n = a.size();
    DenseMatrix t(n);
    constexpr std::size_t blk = 64;
    for (std::size_t i0 = 0; i0 < n; i0 += blk)
        for (std::size_t j0 = 0; j0 < n; j0 += blk)
            for (std::size_t i = i0; i < std::min(n, i0 + blk); ++i)
                for (std::size_t j = j0; j < std::min(n, j0 + blk); ++j) t(j, i) = a(i, j);
    return t;
}

namespace {

double offdiag_norm(const DenseMatrix& a) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.size(); ++j)
            if (j != i) s += r[j] * r[j];
    }
    return std::sqrt(s);
}

struct Rotation {
    std::size_t p, q;
    double c, s;
};

// rows p,q <- (c*row_p - s*row_q, s*row_p + c*row_q)
void rotate_rows(DenseMatrix& a, const std::vector<Rotation>& rots) {
    const std::size_t n = a.size();
    for (const auto& r : rots) {
        double* __restrict rp = a.row(r.p).data();
        double* __restrict rq = a.row(r.q).data();
        const double c = r.c, s = r.s;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = rp[j], y = rq[j];
            rp[j] = c * x - s * y;
            rq[j] = s * x + c * y;
        }
    }
}

}  // namespace

CholeskyReport cholesky_check(DenseMatrix a, double pivot_floor) {
    const std::size_t n = a.size();
    double dmax = 0;
    for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(a(i, i)));
    const double floor = pivot_floor * dmax;
    CholeskyReport rep;
    rep.min_pivot = std::numeric_limits<double>::infinity();
    // row-oriented: L(j, k) stored in the lower triangle, dot products over contiguous rows
    for (std::size_t j = 0; j < n; ++j) {
        const auto rj = a.row(j);
        double d = rj[j];
        for (std::size_t k = 0; k < j; ++k) d -= rj[k] * rj[k];
        rep.min_pivot = std::min(rep.min_pivot, d);
        if (!(d > floor) || !(d > 0.0)) {
            rep.positive = false;
            rep.failed_at = j;
            return rep;
        }
        const double l = std::sqrt(d);
        rj[j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            const auto ri = a.row(i);
            double s = ri[j];
            for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
            ri[j] = s / l;
        }
    }
    rep.positive = true;
    rep.failed_at = n;
    return rep;
}

std::vector<double> jacobi_sym_eig(DenseMatrix a, double sym_tol) {
    const std::size_t n = a.size();
    const double an = frobenius(a);
    double asym = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
    if (asym > sym_tol * std::max(an, std::numeric_limits<double>::min())) {
        std::ostringstream os;
        os << "jacobi_sym_eig: matrix not symmetric, max asymmetry " << asym;
        throw std::invalid_argument(os.str());
    }

    // round-robin ordering: each round is a set of disjoint rotations applied as
    // A <- J^T (J^T A)^T, which only ever touches contiguous rows
    const std::size_t m = n + (n % 2);
    std::vector<std::size_t> players(m);
    std::iota(players.begin(), players.end(), 0);
    std::vector<Rotation> rots;
    rots.reserve(m / 2);

    const double target = 1e-11 * an;
    constexpr int max_sweeps = 60;
    double off = offdiag_norm(a);
    int sweep = 0;
    for (; sweep < max_sweeps && off > target; ++sweep) {
        for (std::size_t round = 0; round + 1 < m; ++round) {
            rots.clear();
            for (std::size_t k = 0; k < m / 2; ++k) {
                std::size_t p = players[k], q = players[m - 1 - k];
                if (p >= n || q >= n) continue;
                if (p > q) std::swap(p, q);
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p), aqq = a(q, q);
                if (std::abs(apq) <= 1e-18 * std::sqrt(std::abs(app * aqq))) continue;
                const double theta = (aqq - app) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                rots.push_back({p, q, c, t * c});
            }
            // advance the tournament: player 0 stays fixed
            std::rotate(players.begin() + 1, players.end() - 1, players.end());
            if (rots.empty()) continue;
            rotate_rows(a, rots);
            a = transpose(a);
            rotate_rows(a, rots);
            for (const auto& r : rots) a(r.p, r.q) = a(r.q, r.p) = 0.0;
        }
        off = offdiag_norm(a);
    }
    if (off > target) {
        std::ostringstream os;
        os << "jacobi_sym_eig: no convergence after " << sweep << " sweeps, off-diagonal norm " << off;
        throw NumericalError(os.str());
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

void hessenberg_reduce(DenseMatrix& a) {
    const std::size_t n = a.size();
    if (n < 3) return;
    std::vector<double> v(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t len = n - k - 1;
        double xn = 0;
        for (std::size_t i = 0; i < len; ++i) {
            v[i] = a(k + 1 + i, k);
            xn += v[i] * v[i];
        }
        xn = std::sqrt(xn);
        double tail = xn * xn - v[0] * v[0];
        if (tail <= 0.0) continue;
        const double alpha = v[0] > 0 ? -xn : xn;
        v[0] -= alpha;
        const double vv = tail + v[0] * v[0];
        const double beta = 2.0 / vv;

        // left: rows k+1.., columns k..
        std::fill(w.begin() + k, w.end(), 0.0);
        for (std::size_t i = 0; i < len; ++i) {
            const double vi = v[i];
            const double* __restrict r = a.row(k + 1 + i).data();
            double* __restrict ww = w.data();
            for (std::size_t j = k; j < n; ++j) ww[j] += vi * r[j];
        }
        for (std::size_t i = 0; i < len; ++i) {
            const double f = beta * v[i];
            double* __restrict r = a.row(k + 1 + i).data();
            const double* __restrict ww = w.data();
            for (std::size_t j = k; j < n; ++j) r[j] -= f * ww[j];
        }
        // right: all rows, columns k+1..
        for (std::size_t i = 0; i < n; ++i) {
            double* __restrict r = a.row(i).data() + k + 1;
            const double* __restrict vp = v.data();
            double s = 0;
            for (std::size_t j = 0; j < len; ++j) s += r[j] * vp[j];
            s *= beta;
            for (std::size_t j = 0; j < len; ++j) r[j] -= s * vp[j];
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

std::vector<cplx> real_schur_spectrum(DenseMatrix a) {
    const int n = static_cast<int>(a.size());
    std::vector<cplx> eig;
    eig.reserve(n);
    hessenberg_reduce(a);

    double anorm = 0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    constexpr double eps = std::numeric_limits<double>::epsilon();

    const long max_iter = 40L * n;
    long total = 0;
    int hi = n - 1;
    int its = 0;
    double shift = 0.0;
    auto sign = [](double mag, double s) { return s >= 0 ? std::abs(mag) : -std::abs(mag); };

    while (hi >= 0) {
        int l = hi;
        for (; l > 0; --l) {
            double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
            if (s == 0.0) s = anorm;
            if (std::abs(a(l, l - 1)) <= eps * s) {
                a(l, l - 1) = 0.0;
                break;
            }
        }
        double x = a(hi, hi);
        if (l == hi) {
            eig.emplace_back(x + shift, 0.0);
            --hi;
            its = 0;
            continue;
        }
        double y = a(hi - 1, hi - 1);
        double w = a(hi, hi - 1) * a(hi - 1, hi);
        if (l == hi - 1) {
            const double p = 0.5 * (y - x);
            const double q = p * p + w;
            double z = std::sqrt(std::abs(q));
            x += shift;
            if (q >= 0.0) {
                z = p + sign(z, p);
                eig.emplace_back(x + z, 0.0);
                eig.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
            } else {
                eig.emplace_back(x + p, z);
                eig.emplace_back(x + p, -z);
            }
            hi -= 2;
            its = 0;
            continue;
        }
        if (total >= max_iter) {
            std::ostringstream os;
            os << "real_schur_spectrum: QR stagnated after " << total << " iterations with "
               << hi + 1 << " eigenvalues unresolved";
            throw NumericalError(os.str());
        }
        if (its > 0 && its % 10 == 0) {
            // exceptional shift
            shift += x;
            for (int i = 0; i <= hi; ++i) a(i, i) -= x;
            const double s = std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
        }
        ++its;
        ++total;

        int m = hi - 2;
        double p = 0, q = 0, r = 0, z = 0;
        for (; m >= l; --m) {
            z = a(m, m);
            const double rr = x - z, ss = y - z;
            p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - rr - ss;
            r = a(m + 2, m + 1);
            const double s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
        }
        for (int i = m + 2; i <= hi; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
        }
        for (int k = m; k <= hi - 1; ++k) {
            if (k != m) {
                p = a(k, k - 1);
                q = a(k + 1, k - 1);
                r = (k != hi - 1) ? a(k + 2, k - 1) : 0.0;
                x = std::abs(p) + std::abs(q) + std::abs(r);
                if (x != 0.0) {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            const double s = sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
                a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            const bool three = (k != hi - 1);
            double* __restrict r0 = a.row(k).data();
            double* __restrict r1 = a.row(k + 1).data();
            if (three) {
                double* __restrict r2 = a.row(k + 2).data();
                for (int j = k; j <= hi; ++j) {
                    const double t = r0[j] + q * r1[j] + r * r2[j];
                    r2[j] -= t * z;
                    r1[j] -= t * y;
                    r0[j] -= t * x;
                }
            } else {
                for (int j = k; j <= hi; ++j) {
                    const double t = r0[j] + q * r1[j];
                    r1[j] -= t * y;
                    r0[j] -= t * x;
                }
            }
            const int mmin = std::min(hi, k + 3);
            for (int i = l; i <= mmin; ++i) {
                double* ri = a.row(i).data();
                double t = x * ri[k] + y * ri[k + 1];
                if (three) {
                    t += z * ri[k + 2];
                    ri[k + 2] -= t * r;
                }
                ri[k + 1] -= t * q;
                ri[k] -= t;
            }
        }
    }
    return eig;
}

}  // namespace elastnp
