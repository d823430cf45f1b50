#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include <edgelab/harness.hpp>
#include <edgelab/paths.hpp>

using namespace edgelab;
using nlohmann::json;

namespace {

json edge_json()
{
    return json::parse(R"({"kind": "edge_mc",
        "ensemble": {"beta": 2, "shape": {"type": "wigner", "N": 30}, "entry_law": "unit_circle", "seed": 9},
        "replicas": 20, "role": "wigner_max", "thresholds": {"ks": 0.5}})");
}

} // namespace

TEST(Ks, OwnStepFunctionIsZero)
{
    const EmpiricalCdf e({0.3, -1.0, 2.5, 0.3, 7.0});
    EXPECT_EQ(ks_distance(e, [&](double x) { return e(x); }), 0.0);
}

TEST(Ks, PointMassExample)
{
    const EmpiricalCdf e({0.0, 1.0});
    EXPECT_DOUBLE_EQ(ks_distance(e, [](double x) { return x >= 0 ? 1.0 : 0.0; }), 0.5);
}

TEST(Ks, InvariantUnderMonotoneMap)
{
    std::vector<double> v, w;
    for (int i = 0; i < 200; ++i) {
        const double x = std::sin(1.7 * i) * 3;
        v.push_back(x);
        w.push_back(std::exp(x));
    }
    auto logistic = [](double x) { return 1 / (1 + std::exp(-x)); };
    const double a = ks_distance(EmpiricalCdf(v), logistic);
    const double b = ks_distance(EmpiricalCdf(w), [&](double y) { return y <= 0 ? 0.0 : logistic(std::log(y)); });
    EXPECT_NEAR(a, b, 1e-12);
}

TEST(Ks, QuantileGridAgainstTw2)
{
    const int R = 5000;
    std::vector<double> p;
    for (int i = 0; i < R; ++i) p.push_back((i + 0.5) / R);
    const auto q = tw_quantiles(2, p);
    const double d = ks_distance(EmpiricalCdf(q), [](double x) { return tw_cdf(2, x); });
    EXPECT_LE(d, 1.36 / std::sqrt(double(R)) * 1.5);
}

TEST(Ecdf, RightContinuousWithLeftLimit)
{
    const EmpiricalCdf e({1.0, 2.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(e(2.0), 0.75);
    EXPECT_DOUBLE_EQ(e.left(2.0), 0.25);
    EXPECT_DOUBLE_EQ(e(0.5), 0.0);
    EXPECT_DOUBLE_EQ(e(3.0), 1.0);
    EXPECT_EQ(e.nodes().size(), 3u);
    EXPECT_THROW(EmpiricalCdf(std::vector<double>{}), invalid_input);
    EXPECT_THROW(EmpiricalCdf({1.0, NAN}), invalid_input);
}

TEST(Wilson, CoversAndNarrows)
{
    const auto a = wilson(0, 100);
    EXPECT_EQ(a.lo, 0.0);
    EXPECT_GT(a.hi, 0.0);
    const auto b = wilson(50, 100);
    EXPECT_LT(b.lo, 0.5);
    EXPECT_GT(b.hi, 0.5);
    EXPECT_NEAR(b.hi - 0.5, 0.5 - b.lo, 1e-12);
    const auto c = wilson(5000, 10000);
    EXPECT_LT(c.hi - c.lo, b.hi - b.lo);
    EXPECT_THROW(wilson(3, 2), invalid_input);
}

TEST(Config, ParsesAndValidates)
{
    const ExperimentConfig c = config_from_json(edge_json());
    EXPECT_EQ(c.kind, ExperimentKind::edge_mc);
    EXPECT_EQ(c.ensemble.shape.N, 30);
    EXPECT_EQ(c.replicas, 20);
    EXPECT_DOUBLE_EQ(c.thresholds.ks, 0.5);

    auto bad = edge_json();
    bad["colour"] = 1;
    EXPECT_THROW(config_from_json(bad), invalid_input);
    bad = edge_json();
    bad["role"] = "cov_largest";
    EXPECT_THROW(config_from_json(bad), invalid_input);
    bad = edge_json();
    bad["role"] = "wigner_point_process";
    EXPECT_THROW(config_from_json(bad), invalid_input);
    bad = edge_json();
    bad["replicas"] = 0;
    EXPECT_THROW(config_from_json(bad), invalid_input);
    bad = edge_json();
    bad["thresholds"]["p"] = 0.1;
    EXPECT_THROW(config_from_json(bad), invalid_input);
    bad = edge_json();
    bad["target_beta"] = 3;
    EXPECT_THROW(config_from_json(bad), invalid_input);
    bad = edge_json();
    bad["kind"] = "trace_mc";
    EXPECT_THROW(config_from_json(bad), invalid_input);
    bad["degrees"] = {0};
    EXPECT_THROW(config_from_json(bad), invalid_input);
}

TEST(Config, RepoConfigsLoad)
{
    for (const auto& f : std::filesystem::directory_iterator(EDGELAB_CONFIG_DIR)) {
        std::ifstream in(f.path());
        EXPECT_NO_THROW(config_from_json(json::parse(in))) << f.path();
    }
}

TEST(Results, SchemaKeys)
{
    const auto r = run_experiment(config_from_json(edge_json()));
    std::vector<std::string> keys;
    for (auto it = r.json.begin(); it != r.json.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"config", "kind", "samples_summary", "ecdf", "ks", "errors", "fingerprint"}));
    EXPECT_TRUE(r.json["errors"].empty());
    EXPECT_FALSE(r.json["config"].contains("workers"));
    EXPECT_EQ(r.ecdf_rows.size(), r.json["ecdf"].size());

    const auto dir = std::filesystem::temp_directory_path() / "edgelab_harness_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "r.json").string();
    write_result(path, r);
    EXPECT_EQ(ecdf_csv_path(path), (dir / "r.ecdf.csv").string());
    write_ecdf_csv(ecdf_csv_path(path), r);
    std::ifstream csv(ecdf_csv_path(path));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "x,ecdf,target_cdf");
    std::ifstream js(path);
    EXPECT_EQ(json::parse(js)["kind"], "edge_mc");
    std::filesystem::remove_all(dir);
}

TEST(Results, WorkerCountDoesNotChangeBytes)
{
    std::vector<json> cfgs{edge_json()};
    cfgs.push_back(json::parse(R"({"kind": "trace_mc",
        "ensemble": {"beta": 1, "shape": {"type": "wigner", "N": 20}, "entry_law": "sign", "seed": 3},
        "replicas": 12, "degrees": [4, 6], "products": [[2, 2]]})"));
    cfgs.push_back(json::parse(R"({"kind": "trace_mc",
        "ensemble": {"beta": 2, "shape": {"type": "rect", "M": 6, "N": 12}, "entry_law": "unit_circle", "seed": 3},
        "replicas": 12, "degrees": [3]})"));
    cfgs.push_back(json::parse(R"({"kind": "deviation_sweep",
        "ensemble": {"beta": 1, "entry_law": "gaussian", "seed": 4},
        "replicas": 16, "sizes": [10, 20], "epsilons": [0, 0.1]})"));
    cfgs.push_back(json::parse(R"({"kind": "edge_mc",
        "ensemble": {"beta": 1, "shape": {"type": "rect", "M": 10, "N": 30}, "entry_law": "rademacher_scale_mix", "seed": 4},
        "replicas": 16, "role": "cov_smallest"})"));
    for (auto j : cfgs) {
        j["workers"] = 1;
        const std::string a = dump_result(run_experiment(config_from_json(j)));
        j["workers"] = 8;
        const std::string b = dump_result(run_experiment(config_from_json(j)));
        EXPECT_EQ(a, b) << j["kind"];
    }
}

TEST(Results, SeedChangesSamples)
{
    auto j = edge_json();
    const std::string a = dump_result(run_experiment(config_from_json(j)));
    j["ensemble"]["seed"] = 10;
    EXPECT_NE(a, dump_result(run_experiment(config_from_json(j))));
}

TEST(Verify, SuitesPass)
{
    for (auto k : {ExperimentKind::verify_identities}) {
        ExperimentConfig c;
        c.kind = k;
        const auto r = run_experiment(c);
        EXPECT_TRUE(r.pass) << r.json.dump(2);
    }
}

TEST(Results, TraceMcMatchesExactSignExpectation)
{
    // sign ensemble: E tr P_6 = (N)_3 and E tr P_8 = 2 (N)_4 (two-fold cycles, plus a tail
    // into a doubled triangle); E tr P_2 = E tr P_4 = 0
    auto falling = [](double N, int k) {
        double f = 1;
        for (int i = 0; i < k; ++i) f *= N - i;
        return f;
    };
    for (int N = 3; N <= 8; ++N) {
        EXPECT_EQ(double(count_sigma(1, N, {6}, Strength::weak)), falling(N, 3));
        EXPECT_EQ(double(count_sigma(1, N, {8}, Strength::weak)), 2 * falling(N, 4));
    }
    const int N = 60;
    const double q = N - 2.0;
    // q^{k} U_{2k}(A / (2 sqrt q)) = P_{2k} + P_{2k-2} + ... + P_0
    const double exact[3] = {N / (q * q), (falling(N, 3) + N) / std::pow(q, 3),
                             (2 * falling(N, 4) + falling(N, 3) + N) / std::pow(q, 4)};
    auto j = json::parse(R"({"kind": "trace_mc",
        "ensemble": {"beta": 1, "shape": {"type": "wigner", "N": 60}, "entry_law": "sign", "seed": 12},
        "replicas": 3000, "degrees": [4, 6, 8]})");
    const auto r = run_experiment(config_from_json(j));
    for (int i = 0; i < 3; ++i) {
        const auto& d = r.json["samples_summary"]["degrees"][i];
        EXPECT_NEAR(d["mean"].get<double>(), exact[i], 4 * d["std_error"].get<double>()) << d["degree"];
    }
}

TEST(Traces, PowerRouteMatchesEigenvalues)
{
    for (int beta : {1, 2}) {
        const EnsembleSpec spec{beta, Shape::make_wigner(40), beta == 1 ? EntryLaw::sign : EntryLaw::unit_circle, 2, 0};
        const HermitianSample h = sample_wigner(spec);
        const double scale = 2 * std::sqrt(38.0);
        const SpectrumSample s = eigvals_hermitian(h);
        for (const std::vector<int>& degs : std::vector<std::vector<int>>{{1, 2, 3, 4, 5, 6, 7, 8}, {8, 3}, {7}, {6}, {2}}) {
            std::vector<bool> want(*std::max_element(degs.begin(), degs.end()) + 1, false);
            for (int n : degs) want[n] = true;
            const auto t = beta == 1 ? detail::wigner_u_traces(h.real, scale, want)
                                     : detail::wigner_u_traces(h.complex, scale, want);
            for (int n : degs) {
                double e = 0;
                for (double l : s.eigenvalues) e += cheb_u(n, l / scale);
                EXPECT_NEAR(t[n], e, 1e-9 * 40) << beta << " n=" << n;
            }
        }
    }
}
