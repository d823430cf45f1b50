#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cheb.hpp"
#include "diagrams.hpp"
#include "paths.hpp"
#include "rng.hpp"
#include "snyder.hpp"
#include "spectra.hpp"

namespace edgelab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double error = 0.0; // measured error, or count mismatch
    std::string detail;
    double seconds = 0.0; // wall time; kept out of the JSON
};

struct VerifyReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool all_pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }

    const CheckResult* find(const std::string& name) const
    {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

inline nlohmann::ordered_json to_json(const VerifyReport& r)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : r.checks)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"error", c.error}, {"detail", c.detail}});
    return {{"suite", r.suite}, {"pass", r.all_pass()}, {"checks", arr}};
}

namespace detail {

// Runs one check; an exception counts as a failure with its message.
inline void run_check(VerifyReport& rep, const std::string& name, const std::function<CheckResult()>& f)
{
    CheckResult c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c = f();
    } catch (const std::exception& e) {
        c.pass = false;
        c.error = INFINITY;
        c.detail = std::string("exception: ") + e.what();
    }
    c.name = name;
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.checks.push_back(std::move(c));
}

inline CheckResult tol_result(double err, double tol, const std::string& detail = {})
{
    std::ostringstream os;
    os << "max error " << err << " (tol " << tol << ")";
    if (!detail.empty()) os << "; " << detail;
    return {"", err <= tol, err, os.str()};
}

inline CheckResult equal_result(bool ok, const std::string& detail)
{
    return {"", ok, ok ? 0.0 : 1.0, detail};
}

// Integer coefficients of U_0..U_n in the monomial basis.
inline std::vector<std::vector<bigint>> u_coefficients(int n)
{
    std::vector<std::vector<bigint>> U(n + 1);
    U[0] = {1};
    if (n >= 1) U[1] = {0, 2};
    for (int k = 2; k <= n; ++k) {
        U[k].assign(k + 1, 0);
        for (size_t i = 0; i < U[k - 1].size(); ++i) U[k][i + 1] += 2 * U[k - 1][i];
        for (size_t i = 0; i < U[k - 2].size(); ++i) U[k][i] -= U[k - 2][i];
    }
    return U;
}

// Symmetric test matrix with entries drawn from {-2,-1,1,2}; diagonal included.
inline Eigen::MatrixXd small_int_symmetric(int N, std::uint64_t stream)
{
    CounterRng rng{20240611, stream};
    Eigen::MatrixXd A(N, N);
    std::uint64_t idx = 0;
    for (int u = 0; u < N; ++u)
        for (int v = u; v < N; ++v) {
            const auto b = rng.at(idx++);
            const double mag = (b[0] & 1u) ? 2.0 : 1.0;
            const double x = (b[1] & 1u) ? mag : -mag;
            A(u, v) = x;
            A(v, u) = x;
        }
    return A;
}

inline Eigen::MatrixXcd small_hermitian(int N, std::uint64_t stream)
{
    CounterRng rng{20240612, stream};
    Eigen::MatrixXcd A(N, N);
    std::uint64_t idx = 0;
    for (int u = 0; u < N; ++u)
        for (int v = u; v < N; ++v) {
            const auto p = uniform_pair(rng.at(idx++));
            if (u == v) {
                A(u, u) = 4.0 * p[0] - 2.0;
            } else {
                A(u, v) = std::complex<double>(4.0 * p[0] - 2.0, 3.0 * p[1] - 1.0);
                A(v, u) = std::conj(A(u, v));
            }
        }
    return A;
}

inline Eigen::MatrixXcd unit_circle_matrix(int M, int N, std::uint64_t stream)
{
    CounterRng rng{20240613, stream};
    Eigen::MatrixXcd X(M, N);
    std::uint64_t idx = 0;
    for (int u = 0; u < M; ++u)
        for (int v = 0; v < N; ++v) X(u, v) = std::polar(1.0, 2.0 * pi * uniform_pair(rng.at(idx++))[0]);
    return X;
}

// (N-2)^{n/2} U_n(A / (2 sqrt(N-2))) for n = 0..nmax via R_n = A R_{n-1} - (N-2) R_{n-2}.
template <class Mat>
std::vector<Mat> scaled_u_powers(const Mat& A, int nmax)
{
    const int N = int(A.rows());
    std::vector<Mat> R{Mat::Identity(N, N), A};
    for (int k = 2; k <= nmax; ++k) R.push_back(A * R[k - 1] - double(N - 2) * R[k - 2]);
    return R;
}

// Sum of gamma over every word of length n, entrywise.
template <class Mat>
Eigen::MatrixXcd gamma_sum(const Mat& A, int n, bool loop_free_empty_forest_only = false)
{
    const int N = int(A.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    std::vector<int> w(n + 1, 0);
    std::uint64_t total = 1;
    for (int i = 0; i <= n; ++i) total *= std::uint64_t(N);
    for (std::uint64_t c = 0; c < total; ++c) {
        std::uint64_t x = c;
        for (int i = 0; i <= n; ++i) {
            w[i] = int(x % N);
            x /= N;
        }
        const GammaResult g = gamma_eval(PathWord{w, N}, A);
        if (loop_free_empty_forest_only) {
            bool loop = false;
            for (int i = 1; i <= n; ++i) loop = loop || w[i] == w[i - 1];
            if (loop || !g.forest.empty()) continue;
        }
        out(w.front(), w.back()) += g.value;
    }
    return out;
}

inline double rel_err(double a, double b, double floor)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace detail

// ---------------------------------------------------------------------------

inline VerifyReport verify_identities()
{
    using detail::run_check;
    VerifyReport rep{"verify_identities", {}};

    run_check(rep, "u_three_term", [] {
        double err = 0;
        for (int n = 2; n <= 60; ++n)
            for (double y = -1.5; y <= 1.5001; y += 0.05) {
                const double a = cheb_u(n, y), b = 2 * y * cheb_u(n - 1, y) - cheb_u(n - 2, y);
                err = std::max(err, detail::rel_err(a, b, std::abs(2 * y * cheb_u(n - 1, y)) + std::abs(cheb_u(n - 2, y))));
            }
        return detail::tol_result(err, 1e-12);
    });

    run_check(rep, "p_n_via_u", [] {
        double err = 0;
        for (int N : {3, 10, 100}) {
            const double r = std::sqrt(N - 2.0);
            for (int n = 0; n <= 20; ++n)
                for (int i = 0; i <= 40; ++i) {
                    const double x = -2 * r + 4 * r * i / 40.0;
                    const double y = x / (2 * r);
                    const double rhs =
                        std::pow(N - 2.0, n / 2.0) * (cheb_u_ext(n, y) - cheb_u_ext(n - 2, y) / (N - 2.0));
                    err = std::max(err, detail::rel_err(poly_p(n, N, x), rhs, std::pow(N - 2.0, n / 2.0)));
                }
        }
        return detail::tol_result(err, 1e-10, "N in {3,10,100}, n <= 20");
    });

    run_check(rep, "q_n_via_u", [] {
        double err = 0;
        for (auto [M, N] : std::vector<std::pair<int, int>>{{2, 3}, {5, 9}, {30, 100}}) {
            const double c = std::sqrt((M - 1.0) * (N - 1.0)), shift = M + N - 2.0;
            for (int n = 0; n <= 20; ++n)
                for (int i = 0; i <= 40; ++i) {
                    const double x = shift - 2 * c + 4 * c * i / 40.0;
                    const double z = (x - shift) / (2 * c);
                    const double rhs = std::pow(c, n) * (cheb_u(n, z) + (M - 2.0) / c * cheb_u_ext(n - 1, z));
                    err = std::max(err, detail::rel_err(poly_q(n, M, N, x), rhs, std::pow(c, n)));
                }
        }
        return detail::tol_result(err, 1e-10, "(M,N) in {(2,3),(5,9),(30,100)}, n <= 20");
    });

    run_check(rep, "snyder_exact", [] {
        const auto U = detail::u_coefficients(24);
        int bad = 0;
        for (int m = 1; m <= 12; ++m)
            for (Parity par : {Parity::even, Parity::odd}) {
                const UExpansion e = snyder_expand(m, par);
                const int deg = par == Parity::even ? 2 * m : 2 * m - 1;
                std::vector<rational> poly(deg + 1, rational(0));
                for (int n = 0; n <= m; ++n) {
                    const int ud = e.u_degree(n);
                    if (ud < 0) {
                        if (e.coefficients[n] != 0) ++bad;
                        continue;
                    }
                    for (size_t i = 0; i < U[ud].size(); ++i) poly[i] += e.coefficients[n] * rational(U[ud][i]);
                }
                for (int i = 0; i <= deg; ++i)
                    if (poly[i] != rational(i == deg ? 1 : 0)) ++bad;
            }
        return detail::equal_result(bad == 0, "monomial coefficient mismatches: " + std::to_string(bad));
    });

    run_check(rep, "semicircle_orthonormal", [] {
        double err = 0;
        for (int n = 0; n <= 10; ++n)
            for (int m = n; m <= 10; ++m)
                err = std::max(err, std::abs(quad_inner(OrthMeasure::semicircle, n, m) - (n == m ? 1.0 : 0.0)));
        return detail::tol_result(err, 1e-8);
    });

    run_check(rep, "mp_orthogonal", [] {
        double off = 0, norm = 0;
        for (int n = 0; n <= 10; ++n)
            for (int m = n; m <= 10; ++m) {
                const double v = quad_inner(OrthMeasure::mp, n, m, 0.25);
                if (n == m)
                    norm = std::max(norm, std::abs(v - 1.0));
                else
                    off = std::max(off, std::abs(v));
            }
        return detail::tol_result(std::max(off, norm), 1e-6, "s = 0.25; diagonal norm 1");
    });

    run_check(rep, "trace_vs_eigen", [] {
        double err = 0;
        for (std::uint64_t rep_i = 0; rep_i < 5; ++rep_i) {
            const Eigen::MatrixXd A = detail::small_int_symmetric(8, 100 + rep_i);
            const auto ev = eigvals_symmetric(A);
            PolyFamilyParams p{PolyFamily::U, 12, 8, 0, 0.0, 5.0, 0.0};
            const auto tr = matrix_poly_traces(p, A);
            for (int n = 0; n <= 12; ++n) {
                double s = 0, mag = 0;
                for (double l : ev) {
                    s += cheb_u(n, l / 5.0);
                    mag += std::abs(cheb_u(n, l / 5.0));
                }
                err = std::max(err, detail::rel_err(tr[n], s, mag));
            }
        }
        return detail::tol_result(err, 1e-8, "random 8x8, n <= 12");
    });

    return rep;
}

// ---------------------------------------------------------------------------

inline VerifyReport verify_paths()
{
    using detail::run_check;
    VerifyReport rep{"verify_paths", {}};

    run_check(rep, "p_n_path_sum_sign4", [] {
        int bad = 0;
        for (const Eigen::MatrixXd& A : exhaustive_sign_wigner(4)) {
            Eigen::MatrixXd f0 = Eigen::MatrixXd::Identity(4, 4), f1 = A;
            for (int n = 1; n <= 6; ++n) {
                if (n >= 2) {
                    Eigen::MatrixXd f2 = A * f1 - (n == 2 ? 3.0 : 2.0) * f0;
                    f0 = f1;
                    f1 = f2;
                }
                if ((nbt_path_sum(A, n) - f1).cwiseAbs().maxCoeff() != 0.0) ++bad;
            }
        }
        return detail::equal_result(bad == 0, "64 matrices x n <= 6, mismatches: " + std::to_string(bad));
    });

    run_check(rep, "gamma_sum_real", [] {
        double err = 0;
        for (std::uint64_t k = 0; k < 3; ++k) {
            const Eigen::MatrixXd A = detail::small_int_symmetric(4, k);
            const auto R = detail::scaled_u_powers(A, 5);
            for (int n = 1; n <= 5; ++n) {
                const Eigen::MatrixXcd g = detail::gamma_sum(A, n);
                const double scale = std::max(1.0, R[n].cwiseAbs().maxCoeff());
                err = std::max(err, (g - R[n].cast<std::complex<double>>()).cwiseAbs().maxCoeff() / scale);
            }
        }
        return detail::tol_result(err, 1e-8, "entries in {-2,-1,1,2}, N = 4, n <= 5");
    });

    run_check(rep, "gamma_sum_hermitian", [] {
        double err = 0;
        for (std::uint64_t k = 0; k < 3; ++k) {
            const Eigen::MatrixXcd A = detail::small_hermitian(4, k);
            const auto R = detail::scaled_u_powers(A, 5);
            for (int n = 1; n <= 5; ++n) {
                const Eigen::MatrixXcd g = detail::gamma_sum(A, n);
                const double scale = std::max(1.0, R[n].cwiseAbs().maxCoeff());
                err = std::max(err, (g - R[n]).cwiseAbs().maxCoeff() / scale);
            }
        }
        return detail::tol_result(err, 1e-8, "complex Hermitian, N = 4, n <= 5");
    });

    run_check(rep, "gamma_empty_forest", [] {
        double err = 0;
        for (std::uint64_t mask : {0ull, 13ull, 42ull, 63ull}) {
            const Eigen::MatrixXd A = exhaustive_sign_wigner(4).build(mask);
            for (int n = 1; n <= 5; ++n) {
                const Eigen::MatrixXcd g = detail::gamma_sum(A, n, true);
                const Eigen::MatrixXd P = nbt_path_sum(A, n);
                for (int u = 0; u < 4; ++u) err = std::max(err, std::abs(g(u, u) - P(u, u)));
            }
        }
        return detail::tol_result(err, 1e-9, "loop-free words with empty forest, N = 4, n <= 5");
    });

    run_check(rep, "c_part_non_backtracking", [] {
        const Eigen::MatrixXd A = detail::small_int_symmetric(4, 7);
        int bad = 0;
        for (int n = 1; n <= 6; ++n) {
            std::vector<int> w(n + 1);
            std::uint64_t total = 1;
            for (int i = 0; i <= n; ++i) total *= 4;
            for (std::uint64_t c = 0; c < total; ++c) {
                std::uint64_t x = c;
                for (int i = 0; i <= n; ++i) {
                    w[i] = int(x % 4);
                    x /= 4;
                }
                const auto C = gamma_eval(PathWord{w, 4}, A).c_part;
                for (size_t i = 1; i < C.size(); ++i)
                    if (C[i] == C[i - 1] || (i >= 2 && C[i] == C[i - 2])) ++bad;
            }
        }
        return detail::equal_result(bad == 0, "violations: " + std::to_string(bad));
    });

    run_check(rep, "q_n_bipartite_path_sum", [] {
        double err = 0;
        for (std::uint64_t k = 0; k < 3; ++k) {
            const Eigen::MatrixXcd X = detail::unit_circle_matrix(2, 3, k);
            const auto S = bipartite_path_polys(X * X.adjoint(), 2, 3, 4);
            for (int n = 1; n <= 4; ++n) {
                const double scale = std::max(1.0, S[n].cwiseAbs().maxCoeff());
                err = std::max(err, (bipartite_path_sum(X, n) - S[n]).cwiseAbs().maxCoeff() / scale);
            }
        }
        return detail::tol_result(err, 1e-8, "M = 2, N = 3, n <= 4, n = 2 constant (M-1)N");
    });

    run_check(rep, "q_n_literal_offset", [] {
        // Q_n - S_n = (M-1) W_{n-2}, W_0 = I, W_1 = B - (M+N-2), then the Q recurrence.
        double err = 0;
        for (auto [M, N] : std::vector<std::pair<int, int>>{{2, 3}, {3, 4}})
            for (std::uint64_t k = 0; k < 2; ++k) {
                const Eigen::MatrixXcd X = detail::unit_circle_matrix(M, N, 10 + k);
                const Eigen::MatrixXcd B = X * X.adjoint();
                const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);
                const auto S = bipartite_path_polys(B, M, N, 6);
                std::vector<Eigen::MatrixXcd> W{I, B - double(M + N - 2) * I};
                for (int n = 2; n <= 4; ++n)
                    W.push_back((B - double(M + N - 2) * I) * W[n - 1] - double(M - 1) * (N - 1) * W[n - 2]);
                Eigen::MatrixXcd q0 = I, q1 = B - double(N) * I;
                for (int n = 2; n <= 6; ++n) {
                    Eigen::MatrixXcd q2 = (B - double(M + N - 2) * I) * q1 - double(M - 1) * (N - 1) * q0;
                    q0 = q1;
                    q1 = q2;
                    const Eigen::MatrixXcd diff = q1 - S[n] - double(M - 1) * W[n - 2];
                    err = std::max(err, diff.cwiseAbs().maxCoeff() / std::max(1.0, q1.cwiseAbs().maxCoeff()));
                }
            }
        return detail::tol_result(err, 1e-10, "(M,N) in {(2,3),(3,4)}, n <= 6");
    });

    run_check(rep, "expected_trace_p", [] {
        std::ostringstream os;
        bool ok = true;
        for (int n = 0; n <= 6; ++n) {
            const rational e = expected_trace_exhaustive(1, 4, TraceFamily::P, n);
            const std::uint64_t c = n == 0 ? 4 : count_sigma(1, 4, {n}, Strength::weak);
            const rational want = n == 6 ? rational(24) : rational(n == 0 ? 4 : 0);
            ok = ok && e == rational(c) && e == want;
            os << "n=" << n << ":" << e << " ";
        }
        return detail::equal_result(ok, os.str());
    });

    run_check(rep, "expected_trace_p_n3", [] {
        bool ok = true;
        for (int n = 1; n <= 6; ++n)
            ok = ok && expected_trace_exhaustive(1, 3, TraceFamily::P, n) == rational(count_sigma(1, 3, {n}, Strength::weak));
        return detail::equal_result(ok, "N = 3, n <= 6");
    });

    run_check(rep, "sigma_sandwich", [] {
        int bad = 0, cases = 0;
        std::vector<std::vector<int>> shapes;
        for (int n = 1; n <= 8; ++n) shapes.push_back({n});
        shapes.push_back({3, 3});
        shapes.push_back({3, 4});
        shapes.push_back({4, 4});
        for (int beta : {1, 2})
            for (int N : {3, 4, 5})
                for (const auto& L : shapes) {
                    const auto s = count_sigma(beta, N, L, Strength::strong);
                    const auto w = count_sigma(beta, N, L, Strength::weak);
                    const auto m = count_sigma(beta, N, L, Strength::matched);
                    ++cases;
                    if (!(s <= w && w <= m)) ++bad;
                    int tot = 0;
                    for (int x : L) tot += x;
                    if (tot % 2 == 1 && w != 0) ++bad;
                }
        return detail::equal_result(bad == 0, std::to_string(cases) + " cases, violations " + std::to_string(bad));
    });

    run_check(rep, "triangle_count", [] {
        const auto c = count_sigma(1, 4, {6}, Strength::strong);
        const auto z = count_sigma(2, 4, {6}, Strength::weak);
        return detail::equal_result(c == 24 && z == 0,
                                    "strong(1,4,6) = " + std::to_string(c) + ", weak(2,4,6) = " + std::to_string(z));
    });

    run_check(rep, "bipartite_exhaustive", [] {
        bool ok = true;
        std::ostringstream os;
        for (auto [M, N] : std::vector<std::pair<int, int>>{{2, 3}, {3, 4}})
            for (int n = 1; n <= 4; ++n) {
                bigint sum = 0;
                const auto range = exhaustive_sign_rect(M, N);
                for (const Eigen::MatrixXd& X : range) {
                    const Eigen::MatrixXd B = X * X.transpose();
                    sum += bigint(std::llround(bipartite_path_polys(B, M, N, n)[n].trace().real()));
                }
                const rational avg(sum, bigint(range.size()));
                const auto c = count_sigma_bipartite(1, M, N, n, Strength::weak);
                if (avg != rational(c)) ok = false;
                os << "(" << M << "," << N << "," << n << "):" << c << " ";
            }
        return detail::equal_result(ok, os.str());
    });

    return rep;
}

// ---------------------------------------------------------------------------

inline VerifyReport verify_diagrams()
{
    using detail::run_check;
    VerifyReport rep{"verify_diagrams", {}};

    run_check(rep, "small_counts", [] {
        const auto a = d_count(1, 1), b = d_count(2, 1), c = d_count(2, 2);
        const auto ea = enumerate_diagrams(1, 1)[0].size();
        const auto eb = enumerate_diagrams(2, 2);
        const bool ok = a == 1 && b == 0 && c == 1 && ea == 1 && eb[0].empty() && eb[1].size() == 1;
        return detail::equal_result(ok, "D1(1)=" + std::to_string(a) + " D2(1)=" + std::to_string(b) +
                                            " D2(2)=" + std::to_string(c));
    });

    run_check(rep, "automaton_vs_definition", [] {
        std::ostringstream os;
        bool ok = true;
        for (int k : {1, 2})
            for (int beta : {1, 2})
                for (int s = k; s <= 3; ++s) {
                    std::set<std::vector<int>> keys;
                    for_each_automaton_run(beta, s, k, [&](const AutomatonRun& r) { keys.insert(r.diagram.key()); });
                    const auto def = diagrams_by_definition(beta, s, k);
                    if (keys != def) ok = false;
                    os << "k" << k << "b" << beta << "s" << s << ":" << keys.size() << " ";
                }
        return detail::equal_result(ok, os.str());
    });

    run_check(rep, "automaton_vs_path_reduction", [] {
        std::ostringstream os;
        bool ok = true;
        for (int beta : {1, 2}) {
            const auto ds = enumerate_diagrams(beta, 3);
            std::set<std::vector<int>> want;
            int nmax = 1;
            for (const auto& group : ds)
                for (const Diagram& d : group) {
                    want.insert(d.key());
                    nmax = std::max(nmax, min_realizing_length(d));
                }
            std::set<std::vector<int>> got;
            for (int n = 1; n <= nmax; ++n)
                for_each_canonical_path(
                    beta, {2 * n}, Strength::strong, 16,
                    [&](const std::vector<int>& w, int, std::uint64_t) {
                        const auto r = reduce_path(w, beta);
                        if (r && r->diagram.s <= 3) got.insert(r->diagram.key());
                    },
                    3, 3);
            if (got != want) ok = false;
            os << "beta" << beta << ": automaton " << want.size() << ", paths " << got.size() << " (n <= " << nmax
               << ") ";
        }
        return detail::equal_result(ok, os.str());
    });

    run_check(rep, "runs_injective", [] {
        bool ok = true;
        std::ostringstream os;
        for (int beta : {1, 2})
            for (int s = 1; s <= 4; ++s) {
                std::uint64_t runs = 0;
                std::set<std::vector<int>> keys;
                for_each_automaton_run(beta, s, 1, [&](const AutomatonRun& r) {
                    ++runs;
                    keys.insert(r.diagram.key());
                });
                if (runs != keys.size() || runs != d_count(beta, s)) ok = false;
                os << "D" << beta << "(" << s << ")=" << keys.size() << " ";
            }
        return detail::equal_result(ok, os.str());
    });

    run_check(rep, "lower_bound_product", [] {
        bool ok = true;
        std::ostringstream os;
        for (int g = 1; g <= 2; ++g) {
            std::uint64_t prod = 1;
            for (int i = 1; i <= g; ++i) prod *= std::uint64_t((4 * i - 3) * (2 * i - 1));
            const auto d = d_count(2, 2 * g);
            ok = ok && prod <= d;
            os << "g=" << g << ": " << prod << " <= " << d << " ";
        }
        return detail::equal_result(ok, os.str());
    });

    run_check(rep, "catalan_order_bound", [] {
        bool ok = true;
        std::ostringstream os;
        for (int g = 1; g <= 2; ++g) {
            std::set<std::vector<int>> orders;
            for_each_automaton_run(2, 2 * g, 1, [&](const AutomatonRun& r) {
                std::vector<int> t;
                for (Transition x : r.transitions) t.push_back(int(x));
                orders.insert(t);
            });
            const std::uint64_t cat = binom_u64(2 * g, g) / std::uint64_t(g + 1);
            ok = ok && orders.size() <= cat;
            os << "g=" << g << ": " << orders.size() << " <= " << cat << " ";
        }
        return detail::equal_result(ok, os.str());
    });

    run_check(rep, "delta_brute_force", [] {
        int bad = 0;
        for (int m = 0; m <= 12; ++m)
            for (int a = 0; a <= 5; ++a)
                for (int b = 0; b <= 5; ++b) {
                    if (a + b == 0) continue;
                    std::uint64_t brute = 0;
                    std::function<void(int, int)> rec = [&](int part, int left) {
                        if (part == a + b) {
                            if (left == 0) ++brute;
                            return;
                        }
                        const bool odd = part < a;
                        for (int x = odd ? 1 : 0; x <= left; x += 2) rec(part + 1, left - x);
                    };
                    rec(0, m);
                    if (brute != delta_count(m, a, b)) ++bad;
                }
        return detail::equal_result(bad == 0, "m <= 12, a, b <= 5; mismatches " + std::to_string(bad));
    });

    run_check(rep, "vertex_type_split", [] {
        int bad = 0, checked = 0;
        const int M = 3, N = 4;
        for (int n = 1; n <= 6; ++n)
            for_each_bipartite_path(1, M, N, n, Strength::strong, [&](const BipartitePathWord& w) {
                std::vector<int> word;
                for (int j = 0; j < n; ++j) {
                    word.push_back(w.u[j]);
                    word.push_back(M + w.v[j]);
                }
                word.push_back(w.u[n]);
                const auto r = reduce_path(word, 1);
                if (!r) return;
                int vbar = 0;
                for (int o : r->origin) vbar += (o < M) ? 1 : 0; // added root (-1) is row type
                std::set<int> us(w.u.begin(), w.u.end()), vs(w.v.begin(), w.v.end());
                const auto split = vertex_type_split(n, r->diagram.s, vbar);
                ++checked;
                if (!split || split->first != int(us.size()) || split->second != int(vs.size())) ++bad;
            });
        return detail::equal_result(bad == 0 && checked > 0,
                                    std::to_string(checked) + " paths, mismatches " + std::to_string(bad));
    });

    run_check(rep, "weight_placement", [] {
        const Diagram d = enumerate_diagrams(1, 1)[0][0];
        bool ok = true;
        for (int n : {5, 8}) ok = ok && weight_placement_count(d, n, true) == binom_u64(n - 3, 1);
        ok = ok && weight_placement_count(d, 3, true) == 0;
        const auto ds = enumerate_diagrams(1, 2)[1];
        for (const Diagram& d2 : ds)
            for (int n : {12, 15}) ok = ok && weight_placement_count(d2, n, true) == binom_u64(n - 6, 4);
        return detail::equal_result(ok, "s = 1, n in {5, 8}; s = 2, n in {12, 15}");
    });

    run_check(rep, "vertex_labelings", [] {
        const int N = 8;
        std::map<std::pair<std::vector<int>, std::vector<int>>, std::uint64_t> by_path;
        std::map<std::pair<std::vector<int>, std::vector<int>>, WeightedDiagram> seen;
        for (int n = 1; n <= 6; ++n)
            for_each_canonical_path(
                1, {2 * n}, Strength::strong, N,
                [&](const std::vector<int>& w, int nv, std::uint64_t) {
                    const auto r = reduce_path(w, 1);
                    if (!r) return;
                    const bool strict =
                        std::all_of(r->weights.begin(), r->weights.end(), [](int x) { return x >= 1; });
                    if (!strict) return;
                    const auto key = std::make_pair(r->diagram.key(), r->weights);
                    by_path[key] += detail::falling(N, nv);
                    seen.emplace(key, *r);
                },
                -1, 3);
        int bad = 0;
        for (const auto& [key, cnt] : by_path)
            if (cnt != vertex_labelings(N, seen.at(key))) ++bad;
        return detail::equal_result(bad == 0 && !by_path.empty(), std::to_string(by_path.size()) +
                                                                        " strict weightings, mismatches " +
                                                                        std::to_string(bad));
    });

    run_check(rep, "phi_item3_form", [] {
        double err = 0;
        for (int beta : {1, 2})
            for (double n : {2.0, 4.0, 10.0, 50.0})
                for (double N : {100.0, 1000.0, 1e5}) {
                    double s3 = 0;
                    for (int s = 1; s <= 5; ++s)
                        s3 += std::pow(n * n * n / N, s - 1) * double(d_count(beta, s)) / std::tgamma(3.0 * s - 1.0);
                    s3 *= n;
                    err = std::max(err, detail::rel_err(s3, 2 * phi(beta, 2 * n, N), 1e-300));
                }
        return detail::tol_result(err, 1e-12);
    });

    return rep;
}

inline VerifyReport run_verify_suite(const std::string& kind)
{
    if (kind == "verify_identities") return verify_identities();
    if (kind == "verify_paths") return verify_paths();
    if (kind == "verify_diagrams") return verify_diagrams();
    throw invalid_input("unknown verify suite: " + kind);
}

} // namespace edgelab
