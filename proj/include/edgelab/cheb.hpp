#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "quadrature.hpp"

namespace edgelab {

namespace detail {

// Double-double value hi + lo, enough for the long recurrences.
struct dd {
    double hi = 0.0, lo = 0.0;
};

inline dd two_sum(double a, double b)
{
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd dd_add(dd a, dd b)
{
    dd s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return two_sum(s.hi, s.lo);
}

inline dd dd_mul_d(dd a, double b)
{
    double p = a.hi * b;
    double e = std::fma(a.hi, b, -p);
    e += a.lo * b;
    return two_sum(p, e);
}

} // namespace detail

inline constexpr int cheb_max_degree = 10000;

// U_n(y) by the three-term recurrence; double-double past degree 1000.
inline double cheb_u(int n, double y)
{
    require(n >= 0, "cheb_u: negative degree");
    require(n <= cheb_max_degree, "cheb_u: degree above 10^4");
    if (n == 0) return 1.0;
    if (n <= 1000) {
        double a = 1.0, b = 2.0 * y;
        for (int k = 2; k <= n; ++k) {
            double c = 2.0 * y * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    detail::dd a{1.0, 0.0}, b{2.0 * y, 0.0};
    for (int k = 2; k <= n; ++k) {
        detail::dd c = detail::dd_add(detail::dd_mul_d(b, 2.0 * y), detail::dd{-a.hi, -a.lo});
        a = b;
        b = c;
    }
    return b.hi + b.lo;
}

// U_n with U_{-1} = U_{-2} = 0.
inline double cheb_u_ext(int n, double y)
{
    return n < 0 ? 0.0 : cheb_u(n, y);
}

inline double poly_p(int n, int N, double x)
{
    require(n >= 0, "poly_p: negative degree");
    require(N >= 3, "poly_p: N must be at least 3");
    if (n == 0) return 1.0;
    if (n == 1) return x;
    double a = x, b = x * x - (N - 1.0);
    for (int k = 3; k <= n; ++k) {
        double c = x * b - (N - 2.0) * a;
        a = b;
        b = c;
    }
    return b;
}

inline double poly_q(int n, int M, int N, double x)
{
    require(n >= 0, "poly_q: negative degree");
    require(M >= 1 && M <= N, "poly_q: need 1 <= M <= N");
    if (n == 0) return 1.0;
    const double shift = M + N - 2.0, c2 = (M - 1.0) * (N - 1.0);
    double a = 1.0, b = x - N;
    for (int k = 2; k <= n; ++k) {
        double c = (x - shift) * b - c2 * a;
        a = b;
        b = c;
    }
    return b;
}

inline double cheb_v(int n, double s, double y)
{
    require(n >= 0, "cheb_v: negative degree");
    require(s >= 0.0 && s <= 1.0, "cheb_v: s outside [0,1]");
    return cheb_u(n, y) + std::sqrt(s) * cheb_u_ext(n - 1, y);
}

enum class PolyFamily { U, P, Q, V };

// Degree and the dimensions the family needs. For U and V the matrix argument is
// (A - shift)/scale.
struct PolyFamilyParams {
    PolyFamily family = PolyFamily::U;
    int n = 0;
    int N = 0;
    int M = 0;
    double s = 0.0;
    double scale = 1.0;
    double shift = 0.0;

    void validate() const
    {
        require(n >= 0, "negative degree");
        switch (family) {
        case PolyFamily::P: require(N >= 3, "family P needs N >= 3"); break;
        case PolyFamily::Q: require(M >= 1 && M <= N, "family Q needs 1 <= M <= N"); break;
        case PolyFamily::V: require(s >= 0.0 && s <= 1.0, "family V needs 0 <= s <= 1"); break;
        case PolyFamily::U: break;
        }
        if (family == PolyFamily::U || family == PolyFamily::V) require(scale != 0.0, "zero scale");
    }
};

// Traces of F_0(A), ..., F_n(A) from the matrix recurrence, no eigendecomposition.
template <class Derived>
std::vector<double> matrix_poly_traces(const PolyFamilyParams& p, const Eigen::MatrixBase<Derived>& Ain)
{
    using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Scalar = typename Derived::Scalar;
    p.validate();
    require(Ain.rows() == Ain.cols(), "matrix_poly_trace: matrix not square");
    const Eigen::Index d = Ain.rows();
    if (p.family == PolyFamily::P) require(d == p.N, "matrix_poly_trace: P needs an N x N matrix");
    if (p.family == PolyFamily::Q) require(d == p.M, "matrix_poly_trace: Q needs an M x M matrix");

    Mat A = Ain;
    Mat I = Mat::Identity(d, d);
    double a1 = 1.0, c2 = 1.0; // F_k = (a1 * A + b1) F_{k-1} - c2 F_{k-2}
    Scalar b1 = Scalar(0);
    Mat F1; // F_1
    switch (p.family) {
    case PolyFamily::U:
    case PolyFamily::V:
        a1 = 2.0 / p.scale;
        b1 = Scalar(-2.0 * p.shift / p.scale);
        c2 = 1.0;
        F1 = a1 * A + b1 * I;
        break;
    case PolyFamily::P:
        c2 = p.N - 2.0;
        F1 = A;
        break;
    case PolyFamily::Q:
        b1 = Scalar(-(p.M + p.N - 2.0));
        c2 = (p.M - 1.0) * (p.N - 1.0);
        F1 = A - double(p.N) * I;
        break;
    }

    std::vector<Scalar> tr;
    tr.reserve(p.n + 1);
    tr.push_back(Scalar(double(d)));
    Mat Fm2 = I, Fm1 = F1;
    if (p.n >= 1) tr.push_back(F1.trace());
    double mag = double(d);
    for (int k = 2; k <= p.n; ++k) {
        Mat F = a1 * (A * Fm1) + b1 * Fm1;
        if (p.family == PolyFamily::P && k == 2)
            F -= (p.N - 1.0) * Fm2;
        else
            F -= c2 * Fm2;
        tr.push_back(F.trace());
        if (k == p.n) mag = F.diagonal().cwiseAbs().sum();
        Fm2.swap(Fm1);
        Fm1.swap(F);
    }
    if (p.n == 1) mag = F1.diagonal().cwiseAbs().sum();

    std::vector<double> out(tr.size());
    for (size_t k = 0; k < tr.size(); ++k) {
        double re = std::real(tr[k]), im = std::imag(tr[k]);
        if (std::abs(im) > 1e-9 * std::max({1.0, std::abs(re), mag}))
            throw std::logic_error("matrix_poly_trace: trace has a non-negligible imaginary part");
        out[k] = re;
    }
    if (p.family == PolyFamily::V) {
        const double rs = std::sqrt(p.s);
        std::vector<double> v(out.size());
        for (size_t k = 0; k < out.size(); ++k) v[k] = out[k] + (k > 0 ? rs * out[k - 1] : 0.0);
        return v;
    }
    return out;
}

template <class Derived>
double matrix_poly_trace(const PolyFamilyParams& p, const Eigen::MatrixBase<Derived>& A)
{
    return matrix_poly_traces(p, A).back();
}

enum class OrthMeasure { semicircle, mp };

// Integral of F_n F_m against the semicircle (F = U) or Marchenko-Pastur (F = V_{., s})
// density, Gauss-Legendre in theta with x = cos(theta), doubling until stable.
inline double quad_inner(OrthMeasure measure, int n, int m, double s = 0.0)
{
    require(n >= 0 && m >= 0 && n <= 64 && m <= 64, "quad_inner: degrees must be in [0, 64]");
    if (measure == OrthMeasure::mp) require(s >= 0.0 && s < 1.0, "quad_inner: mp needs 0 <= s < 1");
    const double rs = std::sqrt(s);
    auto f = [&](double th) {
        const double y = std::cos(th), st = std::sin(th);
        double dens = (2.0 / pi) * st * st;
        double a, b;
        if (measure == OrthMeasure::semicircle) {
            a = cheb_u(n, y);
            b = cheb_u(m, y);
        } else {
            dens /= (1.0 + s) + 2.0 * rs * y;
            a = cheb_u(n, y) + rs * cheb_u_ext(n - 1, y);
            b = cheb_u(m, y) + rs * cheb_u_ext(m - 1, y);
        }
        return dens * a * b;
    };
    double prev = gl_integrate(f, 0.0, pi, 32);
    for (int nodes = 64; nodes <= 8192; nodes *= 2) {
        double cur = gl_integrate(f, 0.0, pi, nodes);
        if (std::abs(cur - prev) < 1e-10) return cur;
        prev = cur;
    }
    throw no_convergence("quad_inner: quadrature did not settle");
}

} // namespace edgelab
