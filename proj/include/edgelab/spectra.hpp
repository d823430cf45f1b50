#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "ensembles.hpp"

namespace edgelab {

struct SpectrumSample {
    std::vector<double> eigenvalues; // ascending
    int M = 0, N = 0;                // covariance: B is M x M; Wigner: M = N
    bool covariance = false;
};

namespace detail {

inline double conj_if(double x) { return x; }
inline std::complex<double> conj_if(const std::complex<double>& x) { return std::conj(x); }
inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& x) { return x.real(); }

// Householder vector for x: returns beta (real) and tau, v(0) = 1, with
// (I - tau v v^*)^* x = beta e_1.
template <class Scalar, class Vec>
double householder(Vec x, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, Scalar& tau)
{
    const Eigen::Index m = x.size();
    v.resize(m);
    const Scalar alpha = x(0);
    const double sig = m > 1 ? x.tail(m - 1).squaredNorm() : 0.0;
    v(0) = Scalar(1);
    if (sig == 0.0 && std::imag(std::complex<double>(alpha)) == 0.0) {
        tau = Scalar(0);
        if (m > 1) v.tail(m - 1).setZero();
        return real_part(alpha);
    }
    const double nrm = std::sqrt(std::norm(std::complex<double>(alpha)) + sig);
    const double beta = real_part(alpha) <= 0 ? nrm : -nrm;
    tau = (Scalar(beta) - alpha) / Scalar(beta);
    const Scalar scal = Scalar(1) / (alpha - Scalar(beta));
    if (m > 1) v.tail(m - 1) = x.tail(m - 1) * scal;
    return beta;
}

// Reduces Hermitian A (lower triangle used) to a real symmetric tridiagonal (d, e);
// off-diagonal phases are dropped, which is a diagonal unitary similarity.
template <class Scalar>
void tridiagonalize(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A, std::vector<double>& d, std::vector<double>& e)
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const int n = int(A.rows());
    d.assign(n, 0.0);
    e.assign(std::max(n - 1, 0), 0.0);
    Vec v, w(n);
    for (int k = 0; k + 1 < n; ++k) {
        const int m = n - k - 1;
        d[k] = real_part(A(k, k));
        Scalar tau;
        const double beta = householder<Scalar>(A.col(k).segment(k + 1, m), v, tau);
        e[k] = std::abs(beta);
        if (tau == Scalar(0)) continue;
        // w = tau * A22 * v using the lower triangle only
        auto ww = w.head(m);
        ww.setZero();
        for (int j = 0; j < m; ++j) {
            const int c = k + 1 + j;
            auto col = A.col(c).segment(c + 1, n - c - 1);
            const Scalar vj = v(j);
            ww(j) += A(c, c) * vj + (m - j - 1 > 0 ? Scalar(col.dot(v.tail(m - j - 1))) : Scalar(0));
            if (m - j - 1 > 0) ww.tail(m - j - 1) += col * vj;
        }
        ww *= tau;
        // w -= (tau/2)(w^* v) v
        const Scalar alpha = Scalar(-0.5) * tau * Scalar(ww.dot(v));
        ww += alpha * v;
        for (int j = 0; j < m; ++j) {
            const int c = k + 1 + j;
            A.col(c).segment(c, n - c) -= v.tail(m - j) * conj_if(ww(j)) + ww.tail(m - j) * conj_if(v(j));
        }
    }
    if (n > 0) d[n - 1] = real_part(A(n - 1, n - 1));
}

// Eigenvalues of the symmetric tridiagonal (d, e) by implicit QL with Wilkinson-type
// shifts; ascending on return.
inline std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e)
{
    const int n = int(d.size());
    e.resize(n, 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw no_convergence("tridiagonal QL: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    e[i + 1] = (r = std::hypot(f, g));
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Upper bidiagonal (absolute values) of a tall matrix Y (rows >= cols).
template <class Scalar>
void bidiagonalize(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Y, std::vector<double>& diag, std::vector<double>& sup)
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
    const int rows = int(Y.rows()), cols = int(Y.cols());
    diag.assign(cols, 0.0);
    sup.assign(std::max(cols - 1, 0), 0.0);
    Vec v;
    RowVec w;
    for (int k = 0; k < cols; ++k) {
        // left reflector on column k
        Scalar tau;
        const double beta = householder<Scalar>(Y.col(k).segment(k, rows - k), v, tau);
        diag[k] = std::abs(beta);
        if (tau != Scalar(0) && k + 1 < cols) {
            auto blk = Y.block(k, k + 1, rows - k, cols - k - 1);
            w = v.adjoint() * blk;
            blk -= (conj_if(tau) * v) * w;
        }
        if (k + 1 < cols) {
            // right reflector on row k, columns k+1..
            const int m = cols - k - 1;
            Vec x = Y.row(k).segment(k + 1, m).adjoint();
            Scalar t2;
            const double b2 = householder<Scalar>(x, v, t2);
            sup[k] = std::abs(b2);
            if (t2 != Scalar(0) && k + 1 < rows) {
                // row k times (I - t2 v v^*) is b2 e_1; apply the same on the right below it
                auto blk = Y.block(k + 1, k + 1, rows - k - 1, m);
                Vec z = blk * v;
                blk -= (z * t2) * v.adjoint();
            }
        }
    }
}

} // namespace detail

inline std::vector<double> eigvals_symmetric(const Eigen::MatrixXd& A)
{
    require(A.rows() == A.cols(), "eigvals: square matrix required");
    std::vector<double> d, e;
    detail::tridiagonalize<double>(A, d, e);
    return detail::tridiagonal_eigenvalues(d, e);
}

inline std::vector<double> eigvals_hermitian(const Eigen::MatrixXcd& A)
{
    require(A.rows() == A.cols(), "eigvals: square matrix required");
    std::vector<double> d, e;
    detail::tridiagonalize<std::complex<double>>(A, d, e);
    return detail::tridiagonal_eigenvalues(d, e);
}

inline SpectrumSample eigvals_hermitian(const HermitianSample& A)
{
    SpectrumSample s;
    s.M = s.N = A.N;
    s.eigenvalues = A.beta == 1 ? eigvals_symmetric(A.real) : eigvals_hermitian(A.complex);
    return s;
}

// Singular values of an M x N matrix via bidiagonalization and the Golub-Kahan
// tridiagonal [0 d1 0 f1 0 d2 ...], whose eigenvalues are +-sigma.
template <class Derived>
std::vector<double> singular_values(const Eigen::MatrixBase<Derived>& X)
{
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat Y = X.rows() >= X.cols() ? Mat(X) : Mat(X.adjoint());
    std::vector<double> dg, sp;
    detail::bidiagonalize<Scalar>(Y, dg, sp);
    const int k = int(dg.size());
    std::vector<double> td(2 * k, 0.0), te(2 * k - 1, 0.0);
    for (int i = 0; i < k; ++i) {
        te[2 * i] = dg[i];
        if (i + 1 < k) te[2 * i + 1] = sp[i];
    }
    auto ev = detail::tridiagonal_eigenvalues(td, te);
    // the upper half holds the k singular values
    std::vector<double> sv(ev.begin() + k, ev.end());
    for (double& x : sv) x = std::max(x, 0.0);
    return sv;
}

// Eigenvalues of B = X X^* (M x M) as squared singular values of X, ascending.
inline SpectrumSample singvals_rect(const RectSample& X)
{
    require(X.M <= X.N, "singvals_rect: need M <= N");
    SpectrumSample s;
    s.M = X.M;
    s.N = X.N;
    s.covariance = true;
    auto sv = X.beta == 1 ? singular_values(X.real) : singular_values(X.complex);
    for (double v : sv) s.eigenvalues.push_back(v * v);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    return s;
}

enum class RescaleRole { cov_smallest, cov_largest, wigner_min, wigner_max, cov_point_process, wigner_point_process };

inline std::string to_string(RescaleRole r)
{
    switch (r) {
    case RescaleRole::cov_smallest: return "cov_smallest";
    case RescaleRole::cov_largest: return "cov_largest";
    case RescaleRole::wigner_min: return "wigner_min";
    case RescaleRole::wigner_max: return "wigner_max";
    case RescaleRole::cov_point_process: return "cov_point_process";
    case RescaleRole::wigner_point_process: return "wigner_point_process";
    }
    return "?";
}

inline RescaleRole rescale_role_from_string(const std::string& s)
{
    for (auto r : {RescaleRole::cov_smallest, RescaleRole::cov_largest, RescaleRole::wigner_min, RescaleRole::wigner_max,
                   RescaleRole::cov_point_process, RescaleRole::wigner_point_process})
        if (to_string(r) == s) return r;
    throw invalid_input("unknown rescale role: " + s);
}

struct RescaledPoint {
    double y = 0.0;
    RescaleRole role = RescaleRole::wigner_max;
    int index = 1;
};

namespace detail {

inline double cov_small_center(double M, double N) { return std::pow(std::sqrt(M) - std::sqrt(N), 2); }
inline double cov_small_scale(double M, double N)
{
    return (std::sqrt(M) - std::sqrt(N)) * std::cbrt(1 / std::sqrt(M) - 1 / std::sqrt(N));
}
inline double cov_large_center(double M, double N) { return std::pow(std::sqrt(M) + std::sqrt(N), 2); }
inline double cov_large_scale(double M, double N)
{
    return (std::sqrt(M) + std::sqrt(N)) * std::cbrt(1 / std::sqrt(M) + 1 / std::sqrt(N));
}

} // namespace detail

// Point-process roles return y_i for i = 1..len: from the top of the spectrum for
// covariance (lambda_{M-i+1}) and Wigner.
inline std::vector<RescaledPoint> rescale(const SpectrumSample& s, RescaleRole role)
{
    const auto& l = s.eigenvalues;
    require(!l.empty(), "rescale: empty spectrum");
    for (size_t i = 1; i < l.size(); ++i) require(l[i - 1] <= l[i], "rescale: eigenvalues must be ascending");
    const double M = s.M, N = s.N;
    std::vector<RescaledPoint> out;
    auto wig = [&](double lam) { return std::pow(N, 1.0 / 6) * lam - 2 * std::pow(N, 2.0 / 3); };
    switch (role) {
    case RescaleRole::cov_smallest:
        require(s.covariance, "rescale: covariance role on a Wigner spectrum");
        require(s.M < s.N, "rescale: cov_smallest needs M < N");
        out.push_back({(l.front() - detail::cov_small_center(M, N)) / detail::cov_small_scale(M, N), role, 1});
        break;
    case RescaleRole::cov_largest:
        require(s.covariance, "rescale: covariance role on a Wigner spectrum");
        out.push_back({(l.back() - detail::cov_large_center(M, N)) / detail::cov_large_scale(M, N), role, 1});
        break;
    case RescaleRole::cov_point_process:
        require(s.covariance, "rescale: covariance role on a Wigner spectrum");
        for (size_t i = 0; i < l.size(); ++i)
            out.push_back({(l[l.size() - 1 - i] - detail::cov_large_center(M, N)) / detail::cov_large_scale(M, N), role,
                           int(i + 1)});
        break;
    case RescaleRole::wigner_min:
        require(!s.covariance, "rescale: Wigner role on a covariance spectrum");
        out.push_back({-(std::pow(N, 1.0 / 6) * l.front() + 2 * std::pow(N, 2.0 / 3)), role, 1});
        break;
    case RescaleRole::wigner_max:
        require(!s.covariance, "rescale: Wigner role on a covariance spectrum");
        out.push_back({wig(l.back()), role, 1});
        break;
    case RescaleRole::wigner_point_process:
        require(!s.covariance, "rescale: Wigner role on a covariance spectrum");
        for (size_t i = 0; i < l.size(); ++i) out.push_back({wig(l[l.size() - 1 - i]), role, int(i + 1)});
        break;
    }
    for (const auto& p : out) require(std::isfinite(p.y), "rescale: non-finite value");
    return out;
}

} // namespace edgelab
