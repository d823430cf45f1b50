#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include <edgelab/ensembles.hpp>

using namespace edgelab;

namespace {

EnsembleSpec wigner(int beta, int N, EntryLaw law, std::uint64_t seed = 11, std::uint64_t stream = 0)
{
    return {beta, Shape::make_wigner(N), law, seed, stream};
}

EnsembleSpec rect(int beta, int M, int N, EntryLaw law, std::uint64_t seed = 11, std::uint64_t stream = 0)
{
    return {beta, Shape::make_rect(M, N), law, seed, stream};
}

struct Moments {
    std::complex<double> m1, m2; // E r, E r^2
    double abs2 = 0, abs4 = 0;   // E |r|^2, E |r|^4
    double se_re2 = 0, se_abs2 = 0;
};

Moments moments(const std::vector<std::complex<double>>& xs)
{
    Moments m;
    double s_re2 = 0, s_abs2sq = 0;
    for (auto x : xs) {
        m.m1 += x;
        m.m2 += x * x;
        const double a = std::norm(x);
        m.abs2 += a;
        m.abs4 += a * a;
        s_re2 += std::norm(x * x);
        s_abs2sq += a * a;
    }
    const double n = double(xs.size());
    m.m1 /= n;
    m.m2 /= n;
    m.abs2 /= n;
    m.abs4 /= n;
    m.se_re2 = std::sqrt(s_re2 / n / n);
    m.se_abs2 = std::sqrt(std::max(s_abs2sq / n - m.abs2 * m.abs2, 0.0) / n);
    return m;
}

std::vector<std::complex<double>> rect_entries(int beta, EntryLaw law)
{
    const RectSample x = sample_rect(rect(beta, 1000, 1000, law, 5));
    std::vector<std::complex<double>> out;
    out.reserve(1000000);
    for (int v = 0; v < 1000; ++v)
        for (int u = 0; u < 1000; ++u) out.push_back(beta == 1 ? std::complex<double>(x.real(u, v)) : x.complex(u, v));
    return out;
}

} // namespace

TEST(Philox, KnownAnswerVectors)
{
    // Random123 philox4x32_10 test vectors
    using B = Philox4x32::block;
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UniformsOpenInterval)
{
    EXPECT_GT(u01(0, 0), 0.0);
    EXPECT_LT(u01(0xffffffff, 0xffffffff), 1.0);
}

TEST(SampleWigner, SignDeterministicZeroDiagonal)
{
    const auto a = sample_wigner(wigner(1, 3, EntryLaw::sign));
    const auto b = sample_wigner(wigner(1, 3, EntryLaw::sign));
    EXPECT_EQ(a.real, b.real);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(a.real(i, i), 0.0);
        for (int j = 0; j < 3; ++j) {
            EXPECT_EQ(a.real(i, j), a.real(j, i));
            if (i != j) {
                EXPECT_EQ(std::abs(a.real(i, j)), 1.0);
            }
        }
    }
    EXPECT_NE(sample_wigner(wigner(1, 30, EntryLaw::sign, 11, 1)).real, sample_wigner(wigner(1, 30, EntryLaw::sign, 11, 2)).real);
}

TEST(SampleWigner, HermitianSymmetryExact)
{
    for (auto law : {EntryLaw::unit_circle, EntryLaw::gaussian, EntryLaw::rademacher_scale_mix}) {
        const auto h = sample_wigner(wigner(2, 40, law));
        for (int i = 0; i < 40; ++i) {
            EXPECT_EQ(h.complex(i, i).imag(), 0.0);
            for (int j = 0; j < 40; ++j) EXPECT_EQ(h.complex(i, j), std::conj(h.complex(j, i)));
        }
    }
    const auto g = sample_wigner(wigner(1, 40, EntryLaw::gaussian));
    EXPECT_EQ(g.real, g.real.transpose());
    const auto c = sample_wigner(wigner(2, 10, EntryLaw::unit_circle));
    for (int i = 0; i < 10; ++i) EXPECT_EQ(c.complex(i, i), 0.0);
}

TEST(SampleWigner, IncompatibleLawsRejected)
{
    EXPECT_THROW(sample_wigner(wigner(1, 4, EntryLaw::unit_circle)), invalid_input);
    EXPECT_THROW(sample_wigner(wigner(2, 4, EntryLaw::sign)), invalid_input);
    EXPECT_THROW(sample_wigner(rect(1, 2, 3, EntryLaw::sign)), invalid_input);
}

TEST(SampleWigner, GaussianDiagonalVariance)
{
    const CounterRng rng{17, 0};
    double s = 0, s2 = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double x = detail::draw_entry(EntryLaw::gaussian, 1, rng.at(i), true).real();
        s += x * x;
        s2 += x * x * x * x;
    }
    const double var = s / n, se = std::sqrt((s2 / n - var * var) / n);
    EXPECT_NEAR(var, 2.0, 3 * se);
}

TEST(SampleRect, Determinism)
{
    const auto a = sample_rect(rect(1, 2, 3, EntryLaw::sign));
    EXPECT_EQ(a.real, sample_rect(rect(1, 2, 3, EntryLaw::sign)).real);
    EXPECT_EQ(a.real.cwiseAbs(), Eigen::MatrixXd::Ones(2, 3));
    EXPECT_THROW(sample_rect(rect(1, 4, 3, EntryLaw::sign)), invalid_input);
}

TEST(SampleRect, UnitCircleModulus)
{
    const auto x = sample_rect(rect(2, 20, 30, EntryLaw::unit_circle));
    for (int u = 0; u < 20; ++u)
        for (int v = 0; v < 30; ++v) EXPECT_NEAR(std::abs(x.complex(u, v)), 1.0, 1e-15);
}

TEST(SampleRect, SecondMomentsPerLaw)
{
    struct Case {
        int beta;
        EntryLaw law;
    };
    for (const Case c : {Case{1, EntryLaw::sign}, Case{1, EntryLaw::gaussian}, Case{1, EntryLaw::rademacher_scale_mix},
                         Case{2, EntryLaw::unit_circle}, Case{2, EntryLaw::gaussian}, Case{2, EntryLaw::rademacher_scale_mix}}) {
        const Moments m = moments(rect_entries(c.beta, c.law));
        const double want_m2 = c.beta == 1 ? 1.0 : 0.0;
        SCOPED_TRACE(to_string(c.law) + " beta " + std::to_string(c.beta));
        EXPECT_NEAR(std::abs(m.m1), 0.0, 4 * std::sqrt(1.0 / 1e6));
        EXPECT_NEAR(std::abs(m.m2 - want_m2), 0.0, 4 * m.se_re2 + 1e-12);
        EXPECT_NEAR(m.abs2, 1.0, 4 * m.se_abs2 + 1e-12);
        EXPECT_TRUE(std::isfinite(m.abs4));
        EXPECT_LT(m.abs4, 10.0);
    }
}

TEST(SampleRect, ScaleMixMagnitudes)
{
    const auto x = sample_rect(rect(1, 50, 60, EntryLaw::rademacher_scale_mix));
    for (int u = 0; u < 50; ++u)
        for (int v = 0; v < 60; ++v) {
            const double a = std::abs(x.real(u, v));
            EXPECT_TRUE(std::abs(a - std::sqrt(5.0 / 8)) < 1e-15 || std::abs(a - std::sqrt(5.0 / 2)) < 1e-15);
        }
}

TEST(Exhaustive, WignerCardinalityAndDistinct)
{
    for (auto [N, want] : std::vector<std::pair<int, std::uint64_t>>{{3, 8}, {4, 64}, {5, 1024}}) {
        std::set<std::vector<double>> seen;
        for (const Eigen::MatrixXd& A : exhaustive_sign_wigner(N)) {
            EXPECT_EQ(A.diagonal(), Eigen::VectorXd::Zero(N));
            EXPECT_EQ(A, A.transpose());
            seen.insert(std::vector<double>(A.data(), A.data() + A.size()));
        }
        EXPECT_EQ(seen.size(), want);
    }
    EXPECT_THROW(exhaustive_sign_wigner(6), invalid_input);
}

TEST(Exhaustive, WignerP6Average)
{
    double sum = 0;
    int count = 0;
    for (const Eigen::MatrixXd& A : exhaustive_sign_wigner(4)) {
        // P_6 by the recurrence P_1 = x, P_2 = x^2 - (N-1), P_k = x P_{k-1} - (N-2) P_{k-2}
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
        Eigen::MatrixXd a = A, b = A * A - 3 * I;
        for (int k = 3; k <= 6; ++k) {
            Eigen::MatrixXd c = A * b - 2 * a;
            a = b;
            b = c;
        }
        sum += b.trace();
        ++count;
    }
    EXPECT_DOUBLE_EQ(sum / count, 24.0);
}

TEST(Exhaustive, RectCardinalityAndQ1)
{
    EXPECT_EQ(exhaustive_sign_rect(2, 2).size(), 16u);
    EXPECT_EQ(exhaustive_sign_rect(2, 3).size(), 64u);
    std::set<std::vector<double>> seen;
    double q1 = 0;
    for (const Eigen::MatrixXd& X : exhaustive_sign_rect(2, 3)) {
        seen.insert(std::vector<double>(X.data(), X.data() + X.size()));
        q1 += (X * X.transpose()).trace() - 3 * 2;
    }
    EXPECT_EQ(seen.size(), 64u);
    EXPECT_EQ(q1, 0.0);
    EXPECT_THROW(exhaustive_sign_rect(3, 5), invalid_input);
    EXPECT_THROW(exhaustive_sign_rect(3, 2), invalid_input);
}

TEST(EnsembleJson, RoundTrip)
{
    const EnsembleSpec s = rect(2, 3, 7, EntryLaw::rademacher_scale_mix, 42, 9);
    nlohmann::ordered_json j;
    to_json(j, s);
    const EnsembleSpec t = ensemble_from_json(j);
    EXPECT_EQ(t.beta, 2);
    EXPECT_EQ(t.shape.kind, Shape::rect);
    EXPECT_EQ(t.shape.M, 3);
    EXPECT_EQ(t.shape.N, 7);
    EXPECT_EQ(t.entry_law, EntryLaw::rademacher_scale_mix);
    EXPECT_EQ(t.seed, 42u);
    EXPECT_EQ(t.stream_id, 9u);
    j["colour"] = "red";
    EXPECT_THROW(ensemble_from_json(j), invalid_input);
}
