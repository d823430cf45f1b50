#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <edgelab/edge_laws.hpp>
#include <edgelab/ensembles.hpp>
#include <edgelab/quadrature.hpp>
#include <edgelab/spectra.hpp>

using namespace edgelab;

namespace {

EnsembleSpec wig(int beta, int N, EntryLaw law, std::uint64_t stream = 0) { return {beta, Shape::make_wigner(N), law, 21, stream}; }
EnsembleSpec rec(int beta, int M, int N, EntryLaw law, std::uint64_t stream = 0) { return {beta, Shape::make_rect(M, N), law, 22, stream}; }

double max_abs_diff(const std::vector<double>& a, const Eigen::VectorXd& b)
{
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b(Eigen::Index(i))));
    return d;
}

} // namespace

TEST(Eigvals, TwoByTwo)
{
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    const auto l = eigvals_symmetric(a);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_NEAR(l[0], -1, 1e-15);
    EXPECT_NEAR(l[1], 1, 1e-15);
}

TEST(Eigvals, RealAgreesWithEigen)
{
    for (auto law : {EntryLaw::sign, EntryLaw::gaussian, EntryLaw::rademacher_scale_mix})
        for (int N : {1, 2, 7, 60, 150}) {
            const auto h = sample_wigner(wig(1, N, law));
            const auto l = eigvals_symmetric(h.real);
            const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.real).eigenvalues();
            const double norm = std::max(1.0, h.real.norm());
            EXPECT_LT(max_abs_diff(l, ref), 1e-10 * norm);
            EXPECT_TRUE(std::is_sorted(l.begin(), l.end()));
            double tr = 0;
            for (double x : l) tr += x;
            EXPECT_NEAR(tr, h.real.trace(), 1e-9 * norm);
        }
}

TEST(Eigvals, ComplexDirectVsRealEmbedding)
{
    for (auto law : {EntryLaw::unit_circle, EntryLaw::gaussian})
        for (int N : {6, 40}) {
            const auto h = sample_wigner(wig(2, N, law, 3));
            const auto direct = eigvals_hermitian(h.complex);
            Eigen::MatrixXd emb(2 * N, 2 * N);
            emb << h.complex.real(), -h.complex.imag(), h.complex.imag(), h.complex.real();
            const auto doubled = eigvals_symmetric(emb);
            for (int i = 0; i < N; ++i) {
                EXPECT_NEAR(doubled[2 * i], doubled[2 * i + 1], 1e-9 * N);
                EXPECT_NEAR(direct[i], doubled[2 * i], 1e-9 * N);
            }
            const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h.complex).eigenvalues();
            EXPECT_LT(max_abs_diff(direct, ref), 1e-10 * std::max(1.0, h.complex.norm()));
        }
}

TEST(Eigvals, SpectrumSampleShape)
{
    const auto s = eigvals_hermitian(sample_wigner(wig(2, 30, EntryLaw::unit_circle)));
    EXPECT_EQ(s.eigenvalues.size(), 30u);
    EXPECT_EQ(s.N, 30);
    EXPECT_FALSE(s.covariance);
}

TEST(Singvals, IdentityPadded)
{
    RectSample x;
    x.M = 2;
    x.N = 3;
    x.beta = 1;
    x.real = Eigen::MatrixXd::Zero(2, 3);
    x.real(0, 0) = x.real(1, 1) = 1;
    const auto s = singvals_rect(x);
    ASSERT_EQ(s.eigenvalues.size(), 2u);
    EXPECT_NEAR(s.eigenvalues[0], 1, 1e-15);
    EXPECT_NEAR(s.eigenvalues[1], 1, 1e-15);
    EXPECT_TRUE(s.covariance);
}

TEST(Singvals, DualRouteAndFrobenius)
{
    for (int beta : {1, 2})
        for (std::uint64_t k = 0; k < 5; ++k) {
            const auto x = sample_rect(rec(beta, 5, 8, EntryLaw::gaussian, k));
            const auto s = singvals_rect(x);
            std::vector<double> e;
            double fro;
            if (beta == 1) {
                e = eigvals_symmetric(x.real * x.real.transpose());
                fro = x.real.squaredNorm();
            } else {
                e = eigvals_hermitian(Eigen::MatrixXcd(x.complex * x.complex.adjoint()));
                fro = x.complex.squaredNorm();
            }
            double tr = 0;
            for (size_t i = 0; i < e.size(); ++i) {
                EXPECT_NEAR(s.eigenvalues[i], e[i], 1e-7 * std::max(1.0, e.back()));
                tr += s.eigenvalues[i];
            }
            EXPECT_NEAR(tr, fro, 1e-10 * fro);
        }
}

TEST(Singvals, SmallestValueAccuracy)
{
    // nearly rank-deficient X: the singular-value route keeps the small eigenvalue
    Eigen::MatrixXd X(3, 5);
    X << 1, 2, 3, 4, 5, 2, 4, 6, 8, 10 + 1e-6, 0, 1, 0, 1, 0;
    RectSample r;
    r.M = 3;
    r.N = 5;
    r.beta = 1;
    r.real = X;
    const double sv = Eigen::JacobiSVD<Eigen::MatrixXd>(X).singularValues().minCoeff();
    const double via_svd = singvals_rect(r).eigenvalues.front();
    const double via_eig = eigvals_symmetric(X * X.transpose()).front();
    EXPECT_NEAR(via_svd, sv * sv, 1e-6 * sv * sv);
    EXPECT_LE(std::abs(via_svd - sv * sv), std::abs(via_eig - sv * sv) + 1e-30);
}

TEST(Rescale, CenteringPointsMapToZero)
{
    SpectrumSample w;
    w.N = w.M = 400;
    w.eigenvalues = {-2 * std::sqrt(400.0), 0.0, 2 * std::sqrt(400.0)};
    EXPECT_NEAR(rescale(w, RescaleRole::wigner_max)[0].y, 0.0, 1e-12);
    EXPECT_NEAR(rescale(w, RescaleRole::wigner_min)[0].y, 0.0, 1e-12);
    SpectrumSample c;
    c.M = 100;
    c.N = 400;
    c.covariance = true;
    c.eigenvalues = {100.0, 200.0, 900.0};
    EXPECT_NEAR(rescale(c, RescaleRole::cov_smallest)[0].y, 0.0, 1e-12);
    EXPECT_NEAR(rescale(c, RescaleRole::cov_largest)[0].y, 0.0, 1e-12);
}

TEST(Rescale, NegativeDenominatorForSmallest)
{
    SpectrumSample c;
    c.M = 100;
    c.N = 400;
    c.covariance = true;
    c.eigenvalues = {100.5, 300.0};
    EXPECT_LT(rescale(c, RescaleRole::cov_smallest)[0].y, 0.0);
    const double den = (10.0 - 20.0) * std::cbrt(0.1 - 0.05);
    EXPECT_NEAR(rescale(c, RescaleRole::cov_smallest)[0].y, 0.5 / den, 1e-12);
    c.N = 100;
    EXPECT_THROW(rescale(c, RescaleRole::cov_smallest), invalid_input);
}

TEST(Rescale, PointProcessOrderingAndMonotonicity)
{
    SpectrumSample c;
    c.M = 4;
    c.N = 9;
    c.covariance = true;
    c.eigenvalues = {1.0, 4.0, 9.0, 20.0};
    const auto pts = rescale(c, RescaleRole::cov_point_process);
    ASSERT_EQ(pts.size(), 4u);
    for (size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(pts[i].index, int(i + 1));
        EXPECT_NEAR(pts[i].y, rescale(SpectrumSample{{c.eigenvalues[3 - i]}, 4, 9, true}, RescaleRole::cov_largest)[0].y, 1e-12);
    }
    for (size_t i = 1; i < 4; ++i) EXPECT_GT(pts[i - 1].y, pts[i].y);

    SpectrumSample w;
    w.N = w.M = 50;
    w.eigenvalues = {-3, -1, 0.5, 2};
    const auto wp = rescale(w, RescaleRole::wigner_point_process);
    EXPECT_EQ(wp.size(), 4u);
    EXPECT_NEAR(wp[0].y, rescale(w, RescaleRole::wigner_max)[0].y, 1e-12);
    // order reversal for the minimum roles
    SpectrumSample w2 = w;
    w2.eigenvalues = {-2, -1, 0.5, 2};
    EXPECT_LT(rescale(w2, RescaleRole::wigner_min)[0].y, rescale(w, RescaleRole::wigner_min)[0].y);
    SpectrumSample c2 = c;
    c2.eigenvalues[0] = 1.5;
    EXPECT_LT(rescale(c2, RescaleRole::cov_smallest)[0].y, rescale(c, RescaleRole::cov_smallest)[0].y);
}

TEST(Rescale, RoleShapeMismatchRejected)
{
    SpectrumSample w;
    w.N = w.M = 10;
    w.eigenvalues = {0, 1};
    EXPECT_THROW(rescale(w, RescaleRole::cov_largest), invalid_input);
    SpectrumSample u = w;
    u.eigenvalues = {1, 0};
    EXPECT_THROW(rescale(u, RescaleRole::wigner_max), invalid_input);
}

TEST(EdgeIntensity, GueCountAboveEdge)
{
    // E #{i : y_i > 0} against the integral of K(x, x) over [0, inf)
    const GaussRule& g = gauss_legendre(64);
    double rho = 0;
    for (size_t i = 0; i < g.x.size(); ++i) {
        const double x = 6 + 6 * g.x[i];
        rho += 6 * g.w[i] * airy_kernel(x, x);
    }
    const int R = 1500, N = 120;
    long hits = 0;
    for (int r = 0; r < R; ++r) {
        const auto s = eigvals_hermitian(sample_wigner(wig(2, N, EntryLaw::gaussian, 1000 + r)));
        for (const auto& p : rescale(s, RescaleRole::wigner_point_process)) {
            if (p.y <= 0) break;
            ++hits;
        }
    }
    const double mean = double(hits) / R;
    EXPECT_NEAR(mean, rho, 4 * std::sqrt(std::max(rho, 1e-3) / R)) << "rho " << rho;
}
