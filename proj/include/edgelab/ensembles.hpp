#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "common.hpp"
#include "rng.hpp"

namespace edgelab {

enum class EntryLaw { sign, unit_circle, gaussian, rademacher_scale_mix };

inline std::string to_string(EntryLaw l)
{
    switch (l) {
    case EntryLaw::sign: return "sign";
    case EntryLaw::unit_circle: return "unit_circle";
    case EntryLaw::gaussian: return "gaussian";
    case EntryLaw::rademacher_scale_mix: return "rademacher_scale_mix";
    }
    return "?";
}

inline EntryLaw entry_law_from_string(const std::string& s)
{
    if (s == "sign") return EntryLaw::sign;
    if (s == "unit_circle") return EntryLaw::unit_circle;
    if (s == "gaussian") return EntryLaw::gaussian;
    if (s == "rademacher_scale_mix") return EntryLaw::rademacher_scale_mix;
    throw invalid_input("unknown entry law: " + s);
}

struct Shape {
    enum Kind { wigner, rect } kind = wigner;
    int M = 0; // rect only
    int N = 0;

    static Shape make_wigner(int N) { return {wigner, 0, N}; }
    static Shape make_rect(int M, int N) { return {rect, M, N}; }
};

struct EnsembleSpec {
    int beta = 1;
    Shape shape;
    EntryLaw entry_law = EntryLaw::sign;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    void validate() const
    {
        require(beta == 1 || beta == 2, "beta must be 1 or 2");
        require(shape.N >= 1, "dimension must be positive");
        if (shape.kind == Shape::rect) {
            require(shape.M >= 1, "rect needs M >= 1");
            require(shape.M <= shape.N, "rect needs M <= N");
        }
        if (entry_law == EntryLaw::sign) require(beta == 1, "sign entries are a beta=1 law");
        if (entry_law == EntryLaw::unit_circle) require(beta == 2, "unit_circle entries are a beta=2 law");
    }
};

inline void to_json(nlohmann::ordered_json& j, const EnsembleSpec& s)
{
    nlohmann::ordered_json shape;
    if (s.shape.kind == Shape::wigner) {
        shape["type"] = "wigner";
        shape["N"] = s.shape.N;
    } else {
        shape["type"] = "rect";
        shape["M"] = s.shape.M;
        shape["N"] = s.shape.N;
    }
    j = nlohmann::ordered_json{{"beta", s.beta},
                               {"shape", shape},
                               {"entry_law", to_string(s.entry_law)},
                               {"seed", s.seed},
                               {"stream_id", s.stream_id}};
}

template <class Json>
EnsembleSpec ensemble_from_json(const Json& j)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        require(k == "beta" || k == "shape" || k == "entry_law" || k == "seed" || k == "stream_id",
                "unknown ensemble field: " + k);
    }
    EnsembleSpec s;
    s.beta = j.at("beta").template get<int>();
    const auto& sh = j.at("shape");
    const std::string type = sh.at("type").template get<std::string>();
    if (type == "wigner")
        s.shape = Shape::make_wigner(sh.at("N").template get<int>());
    else if (type == "rect")
        s.shape = Shape::make_rect(sh.at("M").template get<int>(), sh.at("N").template get<int>());
    else
        throw invalid_input("unknown shape type: " + type);
    s.entry_law = entry_law_from_string(j.at("entry_law").template get<std::string>());
    s.seed = j.value("seed", std::uint64_t{0});
    s.stream_id = j.value("stream_id", std::uint64_t{0});
    s.validate();
    return s;
}

struct HermitianSample {
    int N = 0;
    int beta = 1;
    Eigen::MatrixXd real;     // beta = 1
    Eigen::MatrixXcd complex; // beta = 2
};

struct RectSample {
    int M = 0, N = 0;
    int beta = 1;
    Eigen::MatrixXd real;
    Eigen::MatrixXcd complex;
};

namespace detail {

// rademacher_scale_mix magnitudes: sqrt(5/8) w.p. 4/5, sqrt(5/2) w.p. 1/5.
inline double scale_mix_magnitude(double u)
{
    return u < 0.8 ? std::sqrt(5.0 / 8.0) : std::sqrt(5.0 / 2.0);
}

// One entry from its Philox block. `diag` selects the Wigner diagonal law.
inline std::complex<double> draw_entry(EntryLaw law, int beta, const Philox4x32::block& b, bool diag)
{
    switch (law) {
    case EntryLaw::sign:
        if (diag) return 0.0;
        return (b[0] & 1u) ? 1.0 : -1.0;
    case EntryLaw::unit_circle: {
        if (diag) return 0.0;
        const double th = 2.0 * pi * u01(b[0], b[1]);
        return {std::cos(th), std::sin(th)};
    }
    case EntryLaw::gaussian: {
        const auto z = normal_pair(b);
        if (beta == 1) return diag ? std::sqrt(2.0) * z[0] : z[0];
        if (diag) return z[0];
        return {z[0] * std::sqrt(0.5), z[1] * std::sqrt(0.5)};
    }
    case EntryLaw::rademacher_scale_mix: {
        const auto u = uniform_pair(b);
        const double mag = scale_mix_magnitude(u[0]);
        if (beta == 1 || diag) return u[1] < 0.5 ? -mag : mag;
        const double th = 2.0 * pi * u[1];
        return {mag * std::cos(th), mag * std::sin(th)};
    }
    }
    return 0.0;
}

} // namespace detail

// Wigner entry (u, v), u <= v, draws from counter index u*N + v.
inline HermitianSample sample_wigner(const EnsembleSpec& spec)
{
    spec.validate();
    require(spec.shape.kind == Shape::wigner, "sample_wigner: shape is not wigner");
    const int N = spec.shape.N;
    const CounterRng rng{spec.seed, spec.stream_id};
    HermitianSample s;
    s.N = N;
    s.beta = spec.beta;
    if (spec.beta == 1) {
        s.real.resize(N, N);
        for (int v = 0; v < N; ++v)
            for (int u = 0; u <= v; ++u) {
                const double x = detail::draw_entry(spec.entry_law, 1, rng.at(std::uint64_t(u) * N + v), u == v).real();
                s.real(u, v) = x;
                s.real(v, u) = x;
            }
    } else {
        s.complex.resize(N, N);
        for (int v = 0; v < N; ++v)
            for (int u = 0; u <= v; ++u) {
                const auto z = detail::draw_entry(spec.entry_law, 2, rng.at(std::uint64_t(u) * N + v), u == v);
                s.complex(u, v) = z;
                s.complex(v, u) = std::conj(z);
            }
    }
    return s;
}

inline RectSample sample_rect(const EnsembleSpec& spec)
{
    spec.validate();
    require(spec.shape.kind == Shape::rect, "sample_rect: shape is not rect");
    const int M = spec.shape.M, N = spec.shape.N;
    const CounterRng rng{spec.seed, spec.stream_id};
    RectSample s;
    s.M = M;
    s.N = N;
    s.beta = spec.beta;
    if (spec.beta == 1)
        s.real.resize(M, N);
    else
        s.complex.resize(M, N);
    for (int v = 0; v < N; ++v)
        for (int u = 0; u < M; ++u) {
            const auto z = detail::draw_entry(spec.entry_law, spec.beta, rng.at(std::uint64_t(u) * N + v), false);
            if (spec.beta == 1)
                s.real(u, v) = z.real();
            else
                s.complex(u, v) = z;
        }
    return s;
}

// All 2^(#free entries) sign matrices, mask bit i <-> i-th free entry.
class SignMatrixRange {
public:
    class iterator {
    public:
        iterator(const SignMatrixRange* r, std::uint64_t mask) : r_(r), mask_(mask) {}
        Eigen::MatrixXd operator*() const { return r_->build(mask_); }
        iterator& operator++()
        {
            ++mask_;
            return *this;
        }
        bool operator!=(const iterator& o) const { return mask_ != o.mask_; }
        bool operator==(const iterator& o) const { return mask_ == o.mask_; }

    private:
        const SignMatrixRange* r_;
        std::uint64_t mask_;
    };

    SignMatrixRange(int rows, int cols, bool symmetric) : rows_(rows), cols_(cols), symmetric_(symmetric)
    {
        free_ = symmetric ? rows * (rows - 1) / 2 : rows * cols;
    }

    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, std::uint64_t(1) << free_}; }
    std::uint64_t size() const { return std::uint64_t(1) << free_; }

    Eigen::MatrixXd build(std::uint64_t mask) const
    {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows_, cols_);
        int bit = 0;
        if (symmetric_) {
            for (int u = 0; u < rows_; ++u)
                for (int v = u + 1; v < rows_; ++v, ++bit) {
                    const double x = (mask >> bit) & 1u ? 1.0 : -1.0;
                    A(u, v) = x;
                    A(v, u) = x;
                }
        } else {
            for (int u = 0; u < rows_; ++u)
                for (int v = 0; v < cols_; ++v, ++bit) A(u, v) = (mask >> bit) & 1u ? 1.0 : -1.0;
        }
        return A;
    }

private:
    int rows_, cols_;
    bool symmetric_;
    int free_;
};

inline SignMatrixRange exhaustive_sign_wigner(int N)
{
    require(N >= 1 && N <= 5, "exhaustive_sign_wigner: N must be in [1, 5]");
    return SignMatrixRange(N, N, true);
}

inline SignMatrixRange exhaustive_sign_rect(int M, int N)
{
    require(M >= 1 && N >= 1 && M <= N, "exhaustive_sign_rect: need 1 <= M <= N");
    require(M * N <= 12, "exhaustive_sign_rect: M*N must be at most 12");
    return SignMatrixRange(M, N, false);
}

} // namespace edgelab
