#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include <edgelab/diagrams.hpp>
#include <edgelab/verify.hpp>

using namespace edgelab;

TEST(Diagrams, SmallCounts)
{
    EXPECT_EQ(enumerate_diagrams(1, 1)[0].size(), 1u);
    const auto b2 = enumerate_diagrams(2, 2);
    EXPECT_TRUE(b2[0].empty());
    EXPECT_EQ(b2[1].size(), 1u);
    EXPECT_EQ(d_count(1, 1), 1u);
    EXPECT_EQ(d_count(2, 1), 0u);
    EXPECT_EQ(d_count(2, 2), 1u);
    EXPECT_THROW(enumerate_diagrams(1, 6), invalid_input);
    EXPECT_THROW(d_count(1, 6), invalid_input);
}

TEST(Diagrams, CountTableGolden)
{
    // frozen from the enumeration, equal to both independent oracles for s <= 3
    const std::uint64_t d1[] = {1, 7, 128, 3885};
    const std::uint64_t d2[] = {0, 1, 0, 105};
    for (int s = 1; s <= 4; ++s) {
        EXPECT_EQ(d_count(1, s), d1[s - 1]);
        EXPECT_EQ(d_count(2, s), d2[s - 1]);
    }
    const auto ds = enumerate_diagrams(1, 3);
    for (int s = 1; s <= 3; ++s) EXPECT_EQ(ds[s - 1].size(), d1[s - 1]);
}

TEST(Diagrams, StructuralInvariants)
{
    for (int beta : {1, 2})
        for (int k : {1, 2}) {
            const auto ds = enumerate_diagrams(beta, 3, k);
            for (int s = 1; s <= 3; ++s)
                for (const Diagram& d : ds[s - 1]) {
                    std::string why;
                    EXPECT_TRUE(is_valid_diagram(d, &why)) << why;
                    EXPECT_EQ(int(d.edges.size()), 3 * s - k);
                    EXPECT_EQ(d.num_vertices, 2 * s);
                    EXPECT_EQ(int(d.circuits.size()), k);
                    std::vector<int> deg(d.num_vertices, 0);
                    for (const auto& e : d.edges) {
                        ++deg[e[0]];
                        ++deg[e[1]];
                    }
                    for (int v = 0; v < d.num_vertices; ++v) {
                        const bool root = std::find(d.roots.begin(), d.roots.end(), v) != d.roots.end();
                        EXPECT_EQ(deg[v], root ? 1 : 3);
                    }
                    std::vector<std::array<int, 2>> trav(d.edges.size(), {0, 0});
                    for (const auto& c : d.circuits)
                        for (const Trav& t : c) ++trav[t.e][t.fwd ? 0 : 1];
                    for (const auto& t : trav) {
                        if (beta == 1)
                            EXPECT_EQ(t[0] + t[1], 2);
                        else
                            EXPECT_TRUE(t[0] == 1 && t[1] == 1);
                    }
                }
        }
}

TEST(Diagrams, LowerBoundProduct)
{
    EXPECT_GE(d_count(2, 2), 1u);
    EXPECT_GE(d_count(2, 4), 15u);
}

TEST(Diagrams, KCircuitCounts)
{
    // compositions give a lower bound; the automaton count may exceed it
    EXPECT_EQ(d_count_k(1, 1, 3), d_count(1, 3));
    EXPECT_EQ(d_count_k(2, 3, 2), 0u);
    for (int beta : {1, 2})
        for (int s = 1; s <= 3; ++s) EXPECT_EQ(d_count_k(beta, 2, s), diagrams_by_definition(beta, s, 2).size());
    EXPECT_EQ(d_count_k(1, 2, 2), enumerate_diagrams(1, 2, 2)[1].size());
    for (int beta : {1, 2})
        for (int s = 2; s <= 4; ++s) {
            std::uint64_t comp = 0;
            for (int a = 1; a < s; ++a) comp += d_count(beta, a) * d_count(beta, s - a);
            EXPECT_GE(d_count_k(beta, 2, s), comp);
        }
}

TEST(Phi, Limits)
{
    for (double n : {4.0, 8.0, 30.0}) {
        EXPECT_NEAR(phi(1, n, 1e15), n / 4, 1e-9 * n);
        const double lead = n / 4 * std::pow(n / 2, 3) / 1e9 / 24.0;
        EXPECT_NEAR(phi(2, n, 1e9), lead, 1e-6 * lead);
    }
    const auto s = phi_series(2, 8, 1000);
    EXPECT_EQ(s.coefficients[0], 0.0);
    for (double c : s.coefficients) EXPECT_GE(c, 0.0);
    EXPECT_TRUE(phi_series(1, 200, 10).warning);
}

TEST(Phi, ItemThreeForm)
{
    for (int beta : {1, 2})
        for (double n : {2.0, 5.0, 11.0})
            for (double N : {100.0, 1000.0, 1e5}) {
                double sum = 0;
                for (int s = 1; s <= 5; ++s)
                    sum += std::pow(n * n * n / N, s - 1) * double(d_count(beta, s)) / std::tgamma(3.0 * s - 1.0);
                EXPECT_NEAR(n * sum, 2 * phi(beta, 2 * n, N), 1e-12 * std::max(1.0, n * sum));
            }
}

TEST(CovPrediction, Structure)
{
    const auto eq = predict_cov_trace(1, 4, 50, 50);
    EXPECT_TRUE(eq.degenerate);
    EXPECT_NEAR(eq.normalized, 2 * phi(1, 4, 12.5), 1e-12);
    const int M = 20, N = 2000;
    const double r = std::sqrt(double(M) / N), a = 1 / std::sqrt(double(M)), b = 1 / std::sqrt(double(N));
    const auto odd = predict_cov_trace(1, 5, M, N);
    EXPECT_NEAR(odd.normalized, (1 + r) * phi(1, 5, 1 / ((a + b) * (a + b))) - (1 - r) * phi(1, 5, 1 / ((a - b) * (a - b))),
                1e-12);
    EXPECT_NEAR(odd.value, odd.normalized * std::pow(double(M) * N, 2.5), 1e-9 * std::abs(odd.value));
    EXPECT_THROW(predict_cov_trace(1, 4, 5, 3), invalid_input);
}

TEST(DeltaCount, SpecExamplesAndBruteForce)
{
    EXPECT_EQ(delta_count(3, 2, 1), 0u);
    EXPECT_EQ(delta_count(4, 2, 1), 3u);
    for (int b = 1; b <= 4; ++b) EXPECT_EQ(delta_count(0, 0, b), 1u);
    for (int m = 0; m <= 12; ++m)
        for (int a = 0; a <= 5; ++a)
            for (int b = 0; b <= 5; ++b) {
                if (a + b == 0) continue;
                std::uint64_t brute = 0;
                std::function<void(int, int)> rec = [&](int part, int left) {
                    if (part == a + b) {
                        brute += left == 0;
                        return;
                    }
                    for (int x = part < a ? 1 : 0; x <= left; x += 2) rec(part + 1, left - x);
                };
                rec(0, m);
                EXPECT_EQ(delta_count(m, a, b), brute) << m << " " << a << " " << b;
            }
}

TEST(VertexTypeSplit, SpecExamples)
{
    const auto s = vertex_type_split(3, 1, 1);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->first, 2);
    EXPECT_EQ(s->second, 1);
    EXPECT_EQ(s->first + s->second, 3 + 1 - 1);
    EXPECT_FALSE(vertex_type_split(3, 1, 2));
}

TEST(WeightPlacement, StarsAndBars)
{
    const Diagram d1 = enumerate_diagrams(1, 1)[0][0];
    EXPECT_EQ(d1.edges.size(), 2u);
    EXPECT_EQ(weight_placement_count(d1, 3, true), 0u);
    EXPECT_EQ(weight_placement_count(d1, 5, true), 2u);
    EXPECT_EQ(weight_placement_count(d1, 8, true), 5u);
    const auto all = enumerate_diagrams(1, 2);
    for (int s = 1; s <= 2; ++s)
        for (const Diagram& d : all[s - 1])
            for (int n = 3 * s; n <= 14; ++n) EXPECT_EQ(weight_placement_count(d, n, true), binom_u64(n - 3 * s, 3 * s - 2));
    EXPECT_EQ(weight_placement_count(d1, 1, true), 0u);
}

TEST(DiagramTable, Json)
{
    const auto j = d_table_json(3);
    ASSERT_EQ(j.size(), 6u);
    EXPECT_EQ(j[0]["beta"], 1);
    EXPECT_EQ(j[0]["count"], 1);
    EXPECT_EQ(j[4]["beta"], 2);
    EXPECT_EQ(j[4]["s"], 2);
    EXPECT_EQ(j[4]["count"], 1);
}

TEST(DiagramOracles, VerifySuitePasses)
{
    const VerifyReport rep = verify_diagrams();
    for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}
