// Acceptance run: one PASS/FAIL line per criterion 1..10.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <edgelab/harness.hpp>

#ifndef EDGELAB_CONFIG_DIR
#define EDGELAB_CONFIG_DIR "configs"
#endif

using namespace edgelab;

namespace {

struct Line {
    bool pass = false;
    std::string detail;
};

std::string out_dir;

double since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

ExperimentConfig load(const std::string& name)
{
    const std::string path = std::string(EDGELAB_CONFIG_DIR) + "/" + name;
    std::ifstream f(path);
    require(bool(f), "cannot open " + path);
    return config_from_json(nlohmann::json::parse(f));
}

void save(const std::string& stem, const ExperimentResult& r)
{
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    write_result(out_dir + "/" + stem + ".json", r);
    if (!r.ecdf_rows.empty()) write_ecdf_csv(out_dir + "/" + stem + ".ecdf.csv", r);
}

// All named checks pass and their total time stays under the bound.
Line from_checks(const VerifyReport& rep, const std::vector<std::string>& names, double max_seconds)
{
    Line l{true, ""};
    double t = 0;
    for (const auto& n : names) {
        const CheckResult* c = rep.find(n);
        if (!c) {
            l.pass = false;
            l.detail += n + ": missing; ";
            continue;
        }
        t += c->seconds;
        l.pass = l.pass && c->pass;
        l.detail += n + (c->pass ? " ok" : " FAIL (" + c->detail + ")") + "; ";
    }
    l.detail += "time " + fmt(t, 3) + " s (limit " + fmt(max_seconds) + " s)";
    l.pass = l.pass && t < max_seconds;
    return l;
}

// Part IV claim as stated: Q_n(XX*) from the literal recurrence equals the bipartite path sum.
Line part_iv_literal()
{
    const int M = 2, N = 3;
    double lit = 0, corr = 0;
    for (std::uint64_t k = 0; k < 3; ++k) {
        const Eigen::MatrixXcd X = detail::unit_circle_matrix(M, N, k);
        const Eigen::MatrixXcd B = X * X.adjoint();
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);
        const auto S = bipartite_path_polys(B, M, N, 4);
        Eigen::MatrixXcd q0 = I, q1 = B - double(N) * I;
        for (int n = 1; n <= 4; ++n) {
            if (n >= 2) {
                Eigen::MatrixXcd q2 = (B - double(M + N - 2) * I) * q1 - double(M - 1) * (N - 1) * q0;
                q0 = q1;
                q1 = q2;
            }
            const Eigen::MatrixXcd ps = bipartite_path_sum(X, n);
            const double scale = std::max(1.0, ps.cwiseAbs().maxCoeff());
            lit = std::max(lit, (q1 - ps).cwiseAbs().maxCoeff() / scale);
            corr = std::max(corr, (S[n] - ps).cwiseAbs().maxCoeff() / scale);
        }
    }
    return {lit <= 1e-8, "literal Q_n vs path sum max rel error " + fmt(lit) + " (tol 1e-8); with (M-1)N at n = 2: " +
                             fmt(corr)};
}

Line criterion1()
{
    return from_checks(verify_identities(), {"p_n_via_u", "q_n_via_u", "snyder_exact"}, 1.0);
}

Line criterion2()
{
    const auto t0 = std::chrono::steady_clock::now();
    const VerifyReport rep = verify_paths();
    Line a = from_checks(rep, {"p_n_path_sum_sign4", "gamma_sum_real"}, 30.0);
    const Line b = part_iv_literal();
    const double t = since(t0);
    return {a.pass && b.pass && t < 30, a.detail + "; part IV: " + (b.pass ? "ok " : "FAIL ") + b.detail};
}

Line criterion3() { return from_checks(verify_paths(), {"expected_trace_p"}, 10.0); }

Line criterion4()
{
    return from_checks(verify_diagrams(), {"small_counts", "automaton_vs_path_reduction", "lower_bound_product"}, 120.0);
}

Line criterion5() { return from_checks(verify_diagrams(), {"delta_brute_force"}, 1.0); }

Line criterion6()
{
    const auto t0 = std::chrono::steady_clock::now();
    double sup = 0;
    for (int i = 0; i <= 120; ++i) {
        const double x = -8 + 0.1 * i;
        sup = std::max(sup, std::abs(tw_cdf(2, x) - fredholm_oracle(x)));
    }
    bool mono = true;
    double tail = 0;
    for (int beta : {1, 2, 4}) {
        double prev = -1;
        for (int i = 0; i <= 1800; ++i) {
            const double f = tw_cdf(beta, -10 + 0.01 * i);
            if (f < prev) mono = false;
            prev = f;
        }
        tail = std::max({tail, tw_cdf(beta, -10), 1 - tw_cdf(beta, 8)});
    }
    double res = 0;
    const double h = 1e-4;
    for (int i = 0; i <= 180; ++i) {
        const double x = -10 + 0.1 * i;
        const double d2 = (airy(x + h).ai_prime - airy(x - h).ai_prime) / (2 * h);
        res = std::max(res, std::abs(d2 - x * airy(x).ai));
    }
    const double t = since(t0);
    const bool ok = sup <= 1e-6 && mono && tail < 1e-6 && res <= 1e-6 && t < 60;
    return {ok, "sup|F2 - Fredholm| on [-8,4] " + fmt(sup) + "; monotone " + (mono ? "yes" : "no") + "; max tail " +
                    fmt(tail) + "; Airy residual " + fmt(res) + "; time " + fmt(t, 3) + " s"};
}

std::string cores_note(double t, double limit_8core)
{
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return "time " + fmt(t, 4) + " s on " + std::to_string(hw) + " core(s) (limit " + fmt(limit_8core) + " s stated for 8)";
}

Line criterion7()
{
    Line l{true, ""};
    double t = 0;
    for (auto [tag, file] : std::vector<std::pair<std::string, std::string>>{
             {"a", "edge_wigner_sign.json"}, {"b", "edge_cov_smallest.json"}, {"c", "edge_cov_largest.json"}}) {
        const ExperimentResult r = run_edge_mc(load(file));
        save("criterion7" + tag, r);
        t += r.wall_seconds;
        l.pass = l.pass && r.pass;
        l.detail += "(" + tag + ") ks " + fmt(r.json["ks"].get<double>()) + " vs " +
                    fmt(r.json["samples_summary"]["ks_threshold"].get<double>()) + (r.pass ? " ok" : " FAIL") +
                    ", mean " + fmt(r.json["samples_summary"]["mean"].get<double>()) + "; ";
    }
    l.detail += cores_note(t, 1200);
    return l;
}

Line criterion8()
{
    Line l{true, ""};
    double t = 0;
    for (auto [tag, file] : std::vector<std::pair<std::string, std::string>>{{"wigner", "trace_wigner.json"},
                                                                             {"cov", "trace_cov.json"}}) {
        const ExperimentResult r = run_trace_mc(load(file));
        save("criterion8_" + tag, r);
        t += r.wall_seconds;
        l.pass = l.pass && r.pass;
        for (const auto& d : r.json["samples_summary"]["degrees"])
            l.detail += tag + " n=" + std::to_string(d["degree"].get<int>()) + ": " + fmt(d["mean"].get<double>()) +
                        " +- " + fmt(d["std_error"].get<double>(), 2) + " vs " + fmt(d["prediction"].get<double>()) +
                        (d["pass"].get<bool>() ? " ok" : " FAIL") + "; ";
    }
    l.detail += "time " + fmt(t, 4) + " s (limit 900 s)";
    l.pass = l.pass && t <= 900;
    return l;
}

Line criterion9()
{
    const ExperimentResult r = run_deviation_sweep(load("deviation.json"));
    save("criterion9", r);
    const auto& s = r.json["samples_summary"];
    std::string cells;
    for (const auto& c : s["cells"])
        if (c["epsilon"].get<double>() > 0)
            cells += "N" + std::to_string(c["N"].get<int>()) + "/e" + fmt(c["epsilon"].get<double>(), 2) + "=" +
                     fmt(c["p_hat"].get<double>(), 3) + " ";
    return {r.pass && r.wall_seconds <= 600,
            std::string("monotone in eps ") + (s["monotone_in_epsilon"].get<bool>() ? "yes" : "no") + ", in N " +
                (s["monotone_in_N"].get<bool>() ? "yes" : "no") + "; " + cells + "; time " + fmt(r.wall_seconds, 4) +
                " s"};
}

Line criterion10()
{
    std::vector<ExperimentConfig> cfgs;
    cfgs.push_back(load("smoke_edge.json"));
    {
        ExperimentConfig c = load("trace_wigner.json");
        c.ensemble.shape = Shape::make_wigner(80);
        c.replicas = 24;
        cfgs.push_back(c);
    }
    {
        ExperimentConfig c = load("deviation.json");
        c.sizes = {20, 40};
        c.replicas = 30;
        cfgs.push_back(c);
    }
    {
        ExperimentConfig c = load("edge_cov_smallest.json");
        c.ensemble.shape = Shape::make_rect(20, 60);
        c.replicas = 30;
        cfgs.push_back(c);
    }
    int same = 0;
    std::string detail;
    for (auto& c : cfgs) {
        c.workers = 1;
        const std::string a = dump_result(run_experiment(c));
        c.workers = 8;
        const std::string b = dump_result(run_experiment(c));
        const bool eq = a == b;
        same += eq;
        detail += to_string(c.kind) + (eq ? " identical" : " DIFFERS") + "; ";
    }
    return {same == int(cfgs.size()), detail + "workers 1 vs 8"};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria 1..10"};
    std::vector<int> only;
    out_dir = "acceptance_out";
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    app.add_option("--out-dir", out_dir, "directory for experiment results (empty: none)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Line (*)()> fns{criterion1, criterion2, criterion3, criterion4, criterion5,
                                      criterion6, criterion7, criterion8, criterion9, criterion10};
    const std::set<int> sel(only.begin(), only.end());
    int failed = 0;
    for (int i = 1; i <= 10; ++i) {
        if (!sel.empty() && !sel.count(i)) continue;
        Line l;
        try {
            l = fns[i - 1]();
        } catch (const std::exception& e) {
            l = {false, std::string("exception: ") + e.what()};
        }
        failed += !l.pass;
        std::printf("criterion %d: %s  %s\n", i, l.pass ? "PASS" : "FAIL", l.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
