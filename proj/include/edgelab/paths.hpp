#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "ensembles.hpp"
#include "snyder.hpp"

namespace edgelab {

// u_0 ... u_n on K_N, vertices 0-based.
struct PathWord {
    std::vector<int> v;
    int N = 0;

    int length() const { return int(v.size()) - 1; }
};

struct KPathWord {
    std::vector<PathWord> words;
};

// u_0 v_0 u_1 ... v_{n-1} u_n on K_{M,N}.
struct BipartitePathWord {
    std::vector<int> u; // n+1 entries
    std::vector<int> v; // n entries
    int M = 0, N = 0;
};

struct Conditions {
    bool a = true;        // no loops
    bool b = true;        // no immediate reversal
    bool c = true;        // closed
    bool d1_weak = true;  // parity (beta=1) / balance (beta=2)
    bool d_strong = true; // multiplicity in {0,2} / balanced in {0,1}
};

enum class Strength { weak, strong, matched };

inline Conditions check_conditions(const KPathWord& kw, int beta)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    Conditions c;
    std::map<std::pair<int, int>, std::array<int, 2>> cnt; // (min,max) -> {min->max, max->min}
    for (const PathWord& w : kw.words) {
        const auto& p = w.v;
        require(!p.empty(), "empty word");
        for (int x : p) require(x >= 0 && x < w.N, "vertex out of range");
        for (size_t j = 1; j < p.size(); ++j) {
            if (p[j] == p[j - 1]) c.a = false;
            if (j >= 2 && p[j] == p[j - 2]) c.b = false;
            if (p[j] != p[j - 1]) {
                const int lo = std::min(p[j - 1], p[j]), hi = std::max(p[j - 1], p[j]);
                ++cnt[{lo, hi}][p[j - 1] == lo ? 0 : 1];
            }
        }
        if (p.back() != p.front()) c.c = false;
    }
    for (const auto& [e, k] : cnt) {
        if (beta == 1) {
            if ((k[0] + k[1]) % 2 != 0) c.d1_weak = false;
            if (k[0] + k[1] != 2) c.d_strong = false;
        } else {
            if (k[0] != k[1]) c.d1_weak = false;
            if (!(k[0] == 1 && k[1] == 1)) c.d_strong = false;
        }
    }
    return c;
}

inline Conditions check_conditions(const PathWord& w, int beta)
{
    return check_conditions(KPathWord{{w}}, beta);
}

namespace detail {

inline std::uint64_t falling(int N, int V)
{
    std::uint64_t r = 1;
    for (int i = 0; i < V; ++i) r *= std::uint64_t(N - i);
    return r;
}

inline std::uint64_t double_factorial_odd(int c) // (c-1)!! for even c
{
    std::uint64_t r = 1;
    for (int k = c - 1; k > 1; k -= 2) r *= std::uint64_t(k);
    return r;
}

inline std::uint64_t factorial(int c)
{
    std::uint64_t r = 1;
    for (int k = 2; k <= c; ++k) r *= std::uint64_t(k);
    return r;
}

// Depth-first enumeration of canonical (first-occurrence labelled) k-paths satisfying
// (a), (b), (c); each completed word is reported with its distinct-vertex count.
class KPathEnumerator {
public:
    static constexpr int max_v = 16;

    KPathEnumerator(std::vector<int> lengths, int beta, Strength strength, int vmax, int max_rank = -1,
                    int max_degree = -1)
        : len_(std::move(lengths)), beta_(beta), strength_(strength), vmax_(std::min(vmax, max_v)),
          max_rank_(max_rank), max_degree_(max_degree)
    {
        for (auto& row : cnt_) row.fill(0);
    }

    // f(word, labels used, matching multiplicity)
    template <class F>
    void run(F&& f)
    {
        word_.clear();
        starts_.clear();
        nv_ = 0;
        odd_ = 0;
        dfs_word(0, f);
    }

private:
    template <class F>
    void dfs_word(size_t wi, F& f)
    {
        if (wi == len_.size()) {
            finish(f);
            return;
        }
        // start vertex: any existing label or the next new one
        const int lim = std::min(nv_ + 1, vmax_);
        for (int x = 0; x < lim; ++x) {
            const bool fresh = x == nv_;
            if (fresh) ++nv_;
            starts_.push_back(int(word_.size()));
            word_.push_back(x);
            if (len_[wi] == 0)
                dfs_word(wi + 1, f);
            else
                dfs_step(wi, 1, f);
            word_.pop_back();
            starts_.pop_back();
            if (fresh) --nv_;
        }
    }

    int remaining(size_t wi, int j) const
    {
        int r = len_[wi] - j + 1;
        for (size_t k = wi + 1; k < len_.size(); ++k) r += len_[k];
        return r;
    }

    template <class F>
    void dfs_step(size_t wi, int j, F& f)
    {
        const int start = starts_.back();
        const int prev = word_.back();
        const int prev2 = j >= 2 ? word_[word_.size() - 2] : -1;
        const bool last = j == len_[wi];
        const int lim = std::min(nv_ + 1, vmax_);
        for (int x = 0; x < lim; ++x) {
            if (x == prev || x == prev2) continue;
            if (last && x != word_[start]) continue;
            const bool fresh = x == nv_;
            if (!add_edge(prev, x)) {
                remove_edge(prev, x);
                continue;
            }
            if (odd_ <= remaining(wi, j + 1) && shape_ok(fresh)) {
                if (fresh) ++nv_;
                word_.push_back(x);
                if (last)
                    dfs_word(wi + 1, f);
                else
                    dfs_step(wi, j + 1, f);
                word_.pop_back();
                if (fresh) --nv_;
            }
            remove_edge(prev, x);
        }
    }

    // Cycle rank and degree limits on the underlying simple graph.
    bool shape_ok(bool fresh) const
    {
        if (max_rank_ < 0 && max_degree_ < 0) return true;
        int edges = 0;
        std::array<int, max_v> deg{};
        const int nv = nv_ + (fresh ? 1 : 0);
        for (int a = 0; a < nv; ++a)
            for (int b = a + 1; b < nv; ++b)
                if (cnt_[a][b] + cnt_[b][a] > 0) {
                    ++edges;
                    ++deg[a];
                    ++deg[b];
                }
        if (max_rank_ >= 0 && edges - nv + 1 > max_rank_) return false;
        if (max_degree_ >= 0)
            for (int a = 0; a < nv; ++a)
                if (deg[a] > max_degree_) return false;
        return true;
    }

    // Updates counts; false when the strong condition can no longer hold.
    bool add_edge(int a, int b)
    {
        const int before = imbalance(a, b);
        ++cnt_[a][b];
        odd_ += imbalance(a, b) - before;
        if (strength_ == Strength::strong) {
            if (beta_ == 1 && cnt_[a][b] + cnt_[b][a] > 2) return false;
            if (beta_ == 2 && cnt_[a][b] > 1) return false;
        }
        return true;
    }

    void remove_edge(int a, int b)
    {
        const int before = imbalance(a, b);
        --cnt_[a][b];
        odd_ += imbalance(a, b) - before;
    }

    // Steps still needed to repair this edge.
    int imbalance(int a, int b) const
    {
        if (beta_ == 1) return (cnt_[a][b] + cnt_[b][a]) & 1;
        return std::abs(cnt_[a][b] - cnt_[b][a]);
    }

    template <class F>
    void finish(F& f)
    {
        if (odd_ != 0) return;
        std::uint64_t mult = 1;
        for (int a = 0; a < nv_; ++a)
            for (int b = a + 1; b < nv_; ++b) {
                const int fw = cnt_[a][b], bw = cnt_[b][a];
                if (fw + bw == 0) continue;
                if (strength_ == Strength::strong) {
                    if (beta_ == 1 && fw + bw != 2) return;
                    if (beta_ == 2 && !(fw == 1 && bw == 1)) return;
                }
                if (strength_ == Strength::matched)
                    mult *= beta_ == 1 ? double_factorial_odd(fw + bw) : factorial(fw);
            }
        f(word_, nv_, mult);
    }

    std::vector<int> len_;
    int beta_;
    Strength strength_;
    int vmax_;
    int max_rank_;
    int max_degree_;
    std::vector<int> word_;
    std::vector<int> starts_;
    int nv_ = 0;
    int odd_ = 0;
    std::array<std::array<int, max_v>, max_v> cnt_{};
};

} // namespace detail

// Number of k-paths on K_N with (a), (b), (c) and the chosen d-condition; the matched
// strength counts (path, matching) pairs.
inline std::uint64_t count_sigma(int beta, int N, const std::vector<int>& lengths, Strength strength)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(N >= 1 && N <= 8, "count_sigma: N must be in [1, 8]");
    require(!lengths.empty(), "count_sigma: no lengths");
    int total = 0;
    for (int n : lengths) {
        require(n >= 0, "count_sigma: negative length");
        total += n;
    }
    require(total <= 12, "count_sigma: total length above 12");
    std::uint64_t acc = 0;
    detail::KPathEnumerator en(lengths, beta, strength, N);
    en.run([&](const std::vector<int>&, int nv, std::uint64_t mult) { acc += mult * detail::falling(N, nv); });
    return acc;
}

// Canonical (first-appearance labelled) k-paths with at most vmax labels:
// f(word, labels used, matching multiplicity). Words are concatenated. Optional limits
// on the cycle rank and the vertex degrees of the underlying simple graph (-1: none).
template <class F>
void for_each_canonical_path(int beta, const std::vector<int>& lengths, Strength strength, int vmax, F&& f,
                             int max_rank = -1, int max_degree = -1)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(vmax >= 1 && vmax <= detail::KPathEnumerator::max_v, "for_each_canonical_path: vmax must be in [1, 16]");
    detail::KPathEnumerator en(lengths, beta, strength, vmax, max_rank, max_degree);
    en.run(f);
}

enum class TraceFamily { P, U };

// Exact average of tr F_n(A) over all sign Wigner matrices of size N.
// Family U is the normalized U_n(A / (2 sqrt(N-2))).
inline rational expected_trace_exhaustive(int beta, int N, TraceFamily family, int n)
{
    require(beta == 1, "expected_trace_exhaustive: sign matrices are beta=1");
    require(N >= 3 && N <= 4, "expected_trace_exhaustive: N must be 3 or 4");
    require(n >= 0 && n <= 6, "expected_trace_exhaustive: n must be in [0, 6]");
    using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
    bigint sum = 0;
    std::uint64_t count = 0;
    for (const Eigen::MatrixXd& Ad : exhaustive_sign_wigner(N)) {
        const IMat A = Ad.cast<long long>();
        const IMat I = IMat::Identity(N, N);
        // P: P_2 = A^2 - (N-1); R_n = (N-2)^{n/2} U_n(A/(2 sqrt(N-2))): R_2 = A^2 - (N-2)
        IMat f0 = I, f1 = A;
        for (int k = 2; k <= n; ++k) {
            const long long c = (family == TraceFamily::P && k == 2) ? N - 1 : N - 2;
            IMat f2 = A * f1 - c * f0;
            f0 = f1;
            f1 = f2;
        }
        const IMat& F = n == 0 ? f0 : f1;
        sum += bigint(F.trace());
        ++count;
    }
    rational avg(sum, bigint(count));
    if (family == TraceFamily::U) {
        if (n % 2 == 1) {
            if (avg != 0) throw std::logic_error("expected_trace_exhaustive: odd U average is not rational");
            return 0;
        }
        avg /= rational(boost::multiprecision::pow(bigint(N - 2), n / 2));
    }
    return avg;
}

// Sum over paths with (a), (b) from u to v of A_{u0u1}...A_{u(n-1)un}; the right side of
// the P_n path-sum identity.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> nbt_path_sum(
    const Eigen::MatrixBase<Derived>& A, int n)
{
    using S = typename Derived::Scalar;
    const int N = int(A.rows());
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>::Zero(N, N);
    std::vector<int> w;
    auto rec = [&](auto&& self, S val) -> void {
        if (int(w.size()) == n + 1) {
            out(w.front(), w.back()) += val;
            return;
        }
        const int prev = w.back(), prev2 = w.size() >= 2 ? w[w.size() - 2] : -1;
        for (int x = 0; x < N; ++x) {
            if (x == prev || x == prev2) continue;
            w.push_back(x);
            self(self, val * A(prev, x));
            w.pop_back();
        }
    };
    for (int u = 0; u < N; ++u) {
        w.assign(1, u);
        rec(rec, S(1));
    }
    return out;
}

struct GammaResult {
    std::complex<double> value;
    std::vector<int> c_part;                  // non-backtracking part, a vertex word
    std::vector<std::pair<int, int>> forest;  // remaining non-loop edges, (min, max)
    std::vector<int> cases;                   // per step: 11, 12, 211, 212, 22
};

// gamma(p, A) scanned left to right. The 1:1 and 2:1:1 branches look at the step
// immediately before the current one.
template <class Derived>
GammaResult gamma_eval(const PathWord& word, const Eigen::MatrixBase<Derived>& A)
{
    const auto& u = word.v;
    require(!u.empty(), "gamma_eval: empty word");
    require(A.rows() == A.cols(), "gamma_eval: matrix not square");
    for (int x : u) require(x >= 0 && x < A.rows(), "gamma_eval: vertex out of range");
    const int n = int(u.size()) - 1;
    std::vector<std::complex<double>> g(n + 1);
    std::vector<char> trivial(n + 1, 0);
    g[0] = 1.0;
    trivial[0] = 1;
    std::vector<int> C{u[0]};
    GammaResult r;
    int last = 0; // case code of the previous step
    std::vector<std::pair<int, int>> steps;
    for (int k = 1; k <= n; ++k) {
        const std::complex<double> a = A(u[k - 1], u[k]);
        int code;
        if (u[k] == u[k - 1]) {
            if (k >= 2 && trivial[k - 2] && u[k - 2] == u[k - 1]) {
                g[k] = g[k - 1] * a + g[k - 2];
                code = 11;
            } else {
                g[k] = g[k - 1] * a;
                code = 12;
            }
        } else {
            steps.emplace_back(std::min(u[k - 1], u[k]), std::max(u[k - 1], u[k]));
            if (C.size() >= 2 && C[C.size() - 2] == u[k]) {
                if (last == 22) {
                    g[k] = g[k - 1] * a - g[k - 2];
                    code = 211;
                } else {
                    g[k] = g[k - 1] * a;
                    code = 212;
                }
                C.pop_back();
            } else {
                g[k] = g[k - 1] * a;
                C.push_back(u[k]);
                code = 22;
            }
        }
        trivial[k] = C.size() == 1;
        r.cases.push_back(code);
        last = code;
    }
    r.value = g[n];
    r.c_part = C;
    std::multiset<std::pair<int, int>> rest(steps.begin(), steps.end());
    for (size_t i = 1; i < C.size(); ++i) {
        auto it = rest.find({std::min(C[i - 1], C[i]), std::max(C[i - 1], C[i])});
        if (it != rest.end()) rest.erase(it);
    }
    r.forest.assign(rest.begin(), rest.end());
    return r;
}

// Entry product of a bipartite word; column steps use the conjugate, matching B = X X^*.
template <class Derived>
std::complex<double> bipartite_product(const BipartitePathWord& w, const Eigen::MatrixBase<Derived>& X)
{
    std::complex<double> p = 1.0;
    for (size_t j = 0; j < w.v.size(); ++j)
        p *= std::complex<double>(X(w.u[j], w.v[j])) * std::conj(std::complex<double>(X(w.u[j + 1], w.v[j])));
    return p;
}

// Sum over bipartite words u0 v0 ... u_n with u_{j-1} != u_j, v_{j-1} != v_j of the entry
// product. For unit-modulus X this is bipartite_path_polys(X X^*)[n], not Q_n.
template <class Derived>
Eigen::MatrixXcd bipartite_path_sum(const Eigen::MatrixBase<Derived>& X, int n)
{
    const int M = int(X.rows()), N = int(X.cols());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(M, M);
    BipartitePathWord w;
    w.M = M;
    w.N = N;
    auto rec = [&](auto&& self, std::complex<double> val) -> void {
        const int j = int(w.v.size());
        if (j == n) {
            out(w.u.front(), w.u.back()) += val;
            return;
        }
        for (int v = 0; v < N; ++v) {
            if (j >= 1 && v == w.v[j - 1]) continue;
            for (int u = 0; u < M; ++u) {
                if (u == w.u[j]) continue;
                const std::complex<double> f =
                    std::complex<double>(X(w.u[j], v)) * std::conj(std::complex<double>(X(u, v)));
                w.v.push_back(v);
                w.u.push_back(u);
                self(self, val * f);
                w.u.pop_back();
                w.v.pop_back();
            }
        }
    };
    for (int u = 0; u < M; ++u) {
        w.u.assign(1, u);
        w.v.clear();
        rec(rec, 1.0);
    }
    return out;
}

// Matrices S_0..S_nmax obeying the Q_n recurrence except at n = 2, where the constant is
// (M-1) N instead of (M-1)(N-1). For unit-modulus X these equal bipartite_path_sum(X, n);
// the plain Q_n exceeds them by (M-1) S'_{n-2}, S' being the recurrence restarted at n = 0.
template <class Derived>
std::vector<Eigen::MatrixXcd> bipartite_path_polys(const Eigen::MatrixBase<Derived>& B, int M, int N, int nmax)
{
    require(B.rows() == M && B.cols() == M, "bipartite_path_polys: B must be M x M");
    require(M >= 1 && M <= N, "bipartite_path_polys: need 1 <= M <= N");
    const Eigen::MatrixXcd Bc = B.template cast<std::complex<double>>();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);
    std::vector<Eigen::MatrixXcd> S{I};
    if (nmax >= 1) S.push_back(Bc - double(N) * I);
    for (int k = 2; k <= nmax; ++k) {
        const double c = k == 2 ? double(M - 1) * N : double(M - 1) * (N - 1);
        S.push_back((Bc - double(M + N - 2) * I) * S[k - 1] - c * S[k - 2]);
    }
    return S;
}

// Bipartite d-conditions. fwd(u,v) counts X_{uv} factors, bwd(u,v) counts conj(X_{uv}).
inline bool bipartite_d_condition(const BipartitePathWord& w, int beta, Strength strength)
{
    std::map<std::pair<int, int>, std::array<int, 2>> cnt;
    for (size_t j = 0; j < w.v.size(); ++j) {
        ++cnt[{w.u[j], w.v[j]}][0];
        ++cnt[{w.u[j + 1], w.v[j]}][1];
    }
    for (const auto& [e, k] : cnt) {
        if (beta == 1) {
            if ((k[0] + k[1]) % 2) return false;
            if (strength == Strength::strong && k[0] + k[1] != 2) return false;
        } else {
            if (k[0] != k[1]) return false;
            if (strength == Strength::strong && k[0] != 1) return false;
        }
    }
    return true;
}

// Invokes f on every closed bipartite word of length n (u_n = u_0) obeying the
// alternation rule and the chosen d-condition.
template <class F>
void for_each_bipartite_path(int beta, int M, int N, int n, Strength strength, F&& f)
{
    BipartitePathWord w;
    w.M = M;
    w.N = N;
    auto rec = [&](auto&& self) -> void {
        const int j = int(w.v.size());
        if (j == n) {
            if (w.u.back() == w.u.front() && bipartite_d_condition(w, beta, strength)) f(w);
            return;
        }
        for (int v = 0; v < N; ++v) {
            if (j >= 1 && v == w.v[j - 1]) continue;
            for (int u = 0; u < M; ++u) {
                if (u == w.u[j]) continue;
                if (j == n - 1 && u != w.u.front()) continue;
                w.v.push_back(v);
                w.u.push_back(u);
                self(self);
                w.u.pop_back();
                w.v.pop_back();
            }
        }
    };
    for (int u = 0; u < M; ++u) {
        w.u.assign(1, u);
        w.v.clear();
        rec(rec);
    }
}

inline std::uint64_t count_sigma_bipartite(int beta, int M, int N, int n, Strength strength)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(strength != Strength::matched, "count_sigma_bipartite: weak or strong only");
    require(M >= 1 && M <= 3 && N >= 1 && N <= 4 && M <= N, "count_sigma_bipartite: need M <= 3, N <= 4, M <= N");
    require(n >= 0 && n <= 6, "count_sigma_bipartite: n must be in [0, 6]");
    if (n == 0) return std::uint64_t(M);
    std::uint64_t c = 0;
    for_each_bipartite_path(beta, M, N, n, strength, [&](const BipartitePathWord&) { ++c; });
    return c;
}

} // namespace edgelab
