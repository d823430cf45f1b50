#include <cmath>

#include <boost/math/special_functions/airy.hpp>
#include <gtest/gtest.h>

#include <edgelab/edge_laws.hpp>

using namespace edgelab;

namespace {

double q_at(const PainleveSolution& p, double s)
{
    for (size_t i = 0; i < p.grid.size(); ++i)
        if (std::abs(p.grid[i] - s) < 1e-9) return p.q[i];
    return NAN;
}

// mean and variance of a table CDF by Riemann-Stieltjes sums on a fine grid
std::pair<double, double> cdf_moments(int beta)
{
    double m1 = 0, m2 = 0, prev = tw_cdf(beta, -10);
    const double h = 0.001;
    for (int i = 1; i <= 18000; ++i) {
        const double x = -10 + h * i, f = tw_cdf(beta, x), xm = x - h / 2;
        m1 += xm * (f - prev);
        m2 += xm * xm * (f - prev);
        prev = f;
    }
    return {m1, m2 - m1 * m1};
}

} // namespace

TEST(Airy, MatchesBoost)
{
    for (int i = -500; i <= 500; ++i) {
        const double x = 0.1 * i;
        const AiryValues a = airy(x);
        EXPECT_NEAR(a.ai, boost::math::airy_ai(x), 1e-11) << x;
        EXPECT_NEAR(a.ai_prime, boost::math::airy_ai_prime(x), 1e-11 * std::max(1.0, std::sqrt(std::abs(x)))) << x;
    }
    EXPECT_NEAR(airy(0).ai, 0.3550280538878172, 1e-15);
    EXPECT_NEAR(airy(0).ai, std::pow(3.0, -2.0 / 3) / std::tgamma(2.0 / 3), 1e-15);
    EXPECT_THROW(airy(50.5), invalid_input);
}

TEST(Airy, AsymptoticNormalizationAndOde)
{
    const double x = 10;
    const double asym = std::exp(-2.0 / 3 * std::pow(x, 1.5)) / (2 * std::sqrt(pi) * std::pow(x, 0.25));
    EXPECT_NEAR(airy(x).ai / asym, 1.0, 1e-2); // leading term only; relative correction ~ 5/(72 zeta)
    const double zeta = 2.0 / 3 * std::pow(x, 1.5);
    const double series = 1 - 5.0 / (72 * zeta) + 385.0 / (10368 * zeta * zeta) - 85085.0 / (2239488 * std::pow(zeta, 3));
    EXPECT_NEAR(airy(x).ai / (asym * series), 1.0, 1e-6);
    const double h = 1e-4;
    for (double y : {-2.0, 0.0, 3.0}) {
        const double d2 = (airy(y + h).ai - 2 * airy(y).ai + airy(y - h).ai) / (h * h);
        EXPECT_NEAR(d2, y * airy(y).ai, 1e-6);
    }
}

TEST(AiryKernel, SymmetryAndDiagonal)
{
    for (double a : {-3.0, -0.5, 1.2})
        for (double b : {-2.0, 0.3, 2.5}) EXPECT_NEAR(airy_kernel(a, b), airy_kernel(b, a), 1e-14);
    const AiryValues v = airy(-1);
    EXPECT_NEAR(airy_kernel(-1, -1), v.ai_prime * v.ai_prime + v.ai * v.ai, 1e-14);
    double prev = INFINITY;
    for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const double d = std::abs(airy_kernel(-1, -1 + h) - airy_kernel(-1, -1));
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 1e-5);
}

TEST(K1Blocks, DerivativeAndJump)
{
    const double h = 1e-5;
    const double fd = -(airy_kernel(-1, h) - airy_kernel(-1, -h)) / (2 * h);
    EXPECT_NEAR(k1_blocks(-1, 0).DK, fd, 1e-6);
    EXPECT_NEAR(k1_blocks(0.7, 0.3).K, airy_kernel(0.7, 0.3), 1e-14);
    const double y = 0.4, e = 1e-7;
    const double jump = k1_blocks(y + e, y).JK - k1_blocks(y - e, y).JK;
    EXPECT_NEAR(jump, -1.0, 1e-5);
}

TEST(Painleve, HastingsMcLeod)
{
    const PainleveSolution p = painleve_hm(-12, 12, 1e-10);
    EXPECT_NEAR(p.q.front() / airy(p.grid.front()).ai, 1.0, 1e-10);
    for (size_t i = 0; i < p.grid.size(); ++i) {
        if (p.grid[i] < -10) break;
        EXPECT_GT(p.q[i], 0.0);
        EXPECT_TRUE(std::isfinite(p.q[i]));
    }
    // golden q(0), stable under tol / 10
    EXPECT_NEAR(q_at(p, 0.0), 0.367061551548078, 1e-12);
    EXPECT_NEAR(q_at(painleve_hm(-12, 12, 1e-11), 0.0), q_at(p, 0.0), 1e-10);
    EXPECT_THROW(painleve_hm(-12, 5, 1e-10), invalid_input);
}

TEST(Painleve, OdeResidual)
{
    const PainleveSolution p = painleve_hm(-12, 12, 1e-10);
    const double h = p.grid[0] - p.grid[1];
    double worst = 0;
    double splice = 0;
    for (size_t i = 1; i + 1 < p.grid.size(); ++i) {
        const double s = p.grid[i];
        const double d2 = (p.q[i - 1] - 2 * p.q[i] + p.q[i + 1]) / (h * h);
        const double r = std::abs(d2 - s * p.q[i] - 2 * std::pow(p.q[i], 3));
        // stencils touching the switch to the asymptotic expansion see its jump, times 1/h^2
        if (std::abs(s - p.asymptotic_below) <= 1.5 * h)
            splice = std::max(splice, r * h * h);
        else
            worst = std::max(worst, r);
    }
    EXPECT_LT(worst, 1e-6);
    EXPECT_LT(splice, 1e-7);
}

TEST(TwCdf, TailsMonotoneRange)
{
    for (int beta : {1, 2, 4}) {
        EXPECT_LT(1 - tw_cdf(beta, 8), 1e-8);
        EXPECT_LT(tw_cdf(beta, -10), 1e-6);
        double prev = 0;
        for (int i = 0; i <= 1800; ++i) {
            const double f = tw_cdf(beta, -10 + 0.01 * i);
            EXPECT_GE(f, prev);
            EXPECT_LE(f, 1.0);
            prev = f;
        }
        EXPECT_THROW(tw_cdf(beta, 8.5), invalid_input);
    }
    EXPECT_THROW(tw_cdf(3, 0), invalid_input);
}

TEST(TwCdf, F2AgreesWithFredholm)
{
    for (double x : {-4.0, -2.0, 0.0, 2.0}) EXPECT_NEAR(tw_cdf(2, x), fredholm_oracle(x), 1e-6);
    double sup = 0;
    for (int i = 0; i <= 60; ++i) sup = std::max(sup, std::abs(tw_cdf(2, -8 + 0.2 * i) - fredholm_oracle(-8 + 0.2 * i)));
    EXPECT_LE(sup, 1e-6);
}

TEST(TwCdf, F4Composition)
{
    for (int i = 0; i <= 36; ++i) {
        const double x = -6 + 0.3 * i, f1 = tw_cdf(1, x);
        EXPECT_NEAR(tw_cdf(4, x), 0.5 * (f1 + tw_cdf(2, x) / f1), 1e-12);
    }
}

TEST(TwCdf, MomentsMatchReferenceValues)
{
    // published high-precision moments of TW_1 and TW_2
    const auto [m1, v1] = cdf_moments(1);
    EXPECT_NEAR(m1, -1.2065335745820, 1e-5);
    EXPECT_NEAR(v1, 1.6077810345810, 1e-5);
    const auto [m2, v2] = cdf_moments(2);
    EXPECT_NEAR(m2, -1.7710868074116, 1e-5);
    EXPECT_NEAR(v2, 0.8131947928329, 1e-5);
    EXPECT_NEAR(tw_cdf(1, 0), 0.831908066202952, 1e-9);
}

TEST(Fredholm, TailMonotoneGolden)
{
    EXPECT_LT(1 - fredholm_oracle(8), 1e-8);
    double prev = 0;
    for (int i = 0; i <= 24; ++i) {
        const double f = fredholm_oracle(-6 + 0.5 * i);
        EXPECT_GE(f, prev - 1e-9);
        prev = f;
    }
    EXPECT_NEAR(fredholm_oracle(0), 0.969372828355262, 1e-8);
    EXPECT_THROW(fredholm_oracle(-11), invalid_input);
}

TEST(TwQuantiles, RoundTripMedianMonotone)
{
    for (int beta : {1, 2, 4})
        for (double x : {-3.0, -1.0, 1.0}) EXPECT_NEAR(tw_quantiles(beta, {tw_cdf(beta, x)})[0], x, 1e-6);
    EXPECT_NEAR(tw_cdf(2, tw_quantiles(2, {0.5})[0]), 0.5, 1e-6);
    const auto q = tw_quantiles(1, {0.01, 0.1, 0.3, 0.5, 0.9, 0.99});
    for (size_t i = 1; i < q.size(); ++i) EXPECT_LT(q[i - 1], q[i]);
    EXPECT_THROW(tw_quantiles(2, {1.0}), invalid_input);
    EXPECT_THROW(tw_quantiles(2, {0.0}), invalid_input);
}

TEST(EdgeLawTable, GridAndExport)
{
    const auto t = edge_law_table(2, 0.5);
    EXPECT_EQ(t.x.size(), 37u);
    EXPECT_EQ(t.x.front(), -10.0);
    EXPECT_NEAR(t.x.back(), 8.0, 1e-12);
    const auto j = tw_table_json(0.5);
    EXPECT_TRUE(j.contains("rows"));
}
