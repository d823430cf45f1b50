// edgelab command line: experiment runs, verification suites, tables and enumerations.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <edgelab/harness.hpp>

using namespace edgelab;

namespace {

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicas;
    std::optional<int> workers;
    std::string out;
};

void add_run_flags(CLI::App* app, RunFlags& f)
{
    app->add_option("--config", f.config, "JSON config file");
    app->add_option("--seed", f.seed, "override ensemble.seed");
    app->add_option("--replicas", f.replicas, "override replicas");
    app->add_option("--workers", f.workers, "worker threads (0: hardware)");
    app->add_option("--out", f.out, "result JSON path (stdout when empty)");
}

nlohmann::json read_json(const std::string& path)
{
    std::ifstream f(path);
    require(bool(f), "cannot open " + path);
    return nlohmann::json::parse(f);
}

ExperimentConfig load_config(const RunFlags& f, ExperimentKind kind)
{
    nlohmann::json j = f.config.empty() ? nlohmann::json::object() : read_json(f.config);
    if (!j.contains("kind")) j["kind"] = to_string(kind);
    require(j["kind"].get<std::string>() == to_string(kind),
            "config kind " + j["kind"].get<std::string>() + " does not match the subcommand");
    if (f.seed) {
        require(j.contains("ensemble"), "--seed needs an ensemble in the config");
        j["ensemble"]["seed"] = *f.seed;
    }
    if (f.replicas) j["replicas"] = *f.replicas;
    if (f.workers) j["workers"] = *f.workers;
    if (!f.out.empty()) j["output"] = f.out;
    return config_from_json(j);
}

void emit(const std::string& out, const std::string& text)
{
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    require(bool(f), "cannot open " + out);
    f << text;
}

int run_and_emit(const ExperimentConfig& cfg)
{
    const ExperimentResult r = run_experiment(cfg);
    emit(cfg.output, dump_result(r));
    if (!cfg.output.empty() && cfg.kind == ExperimentKind::edge_mc) write_ecdf_csv(ecdf_csv_path(cfg.output), r);
    std::fprintf(stderr, "%s: %s in %.2f s\n", to_string(cfg.kind).c_str(), r.pass ? "pass" : "FAIL", r.wall_seconds);
    return r.pass ? 0 : 1;
}

Strength strength_from_string(const std::string& s)
{
    if (s == "weak") return Strength::weak;
    if (s == "strong") return Strength::strong;
    if (s == "matched") return Strength::matched;
    throw invalid_input("strength must be weak, strong or matched");
}

nlohmann::ordered_json diagram_json(const Diagram& d)
{
    nlohmann::ordered_json j;
    j["beta"] = d.beta;
    j["s"] = d.s;
    j["k"] = d.k;
    j["vertices"] = d.num_vertices;
    j["edges"] = d.edges;
    j["roots"] = d.roots;
    auto circ = nlohmann::ordered_json::array();
    for (const auto& c : d.circuits) {
        auto cj = nlohmann::ordered_json::array();
        for (const Trav& t : c) cj.push_back({t.e, t.fwd ? 1 : -1});
        circ.push_back(cj);
    }
    j["circuits"] = circ;
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"edgelab: extreme eigenvalue experiments and exact path/diagram checks"};
    app.require_subcommand(1);

    RunFlags edge, trace, dev, ver, tw;
    auto* edge_cmd = app.add_subcommand("edge-mc", "Monte Carlo extreme eigenvalues vs Tracy-Widom");
    add_run_flags(edge_cmd, edge);
    auto* trace_cmd = app.add_subcommand("trace-mc", "Monte Carlo traces of Chebyshev polynomials vs the phi predictor");
    add_run_flags(trace_cmd, trace);
    auto* dev_cmd = app.add_subcommand("deviation", "tail probabilities of the norm beyond the edge");
    add_run_flags(dev_cmd, dev);

    auto* ver_cmd = app.add_subcommand("verify", "exact verification suites");
    std::string suite = "all";
    ver_cmd->add_option("--suite", suite, "identities, paths, diagrams or all")
        ->check(CLI::IsMember({"identities", "paths", "diagrams", "all"}));
    ver_cmd->add_option("--out", ver.out, "result JSON path (stdout when empty)");

    auto* tw_cmd = app.add_subcommand("tw-table", "tabulate F_1, F_2, F_4");
    double step = 0.01;
    std::string csv;
    tw_cmd->add_option("--step", step, "grid step");
    tw_cmd->add_option("--csv", csv, "also write a CSV table");
    tw_cmd->add_option("--out", tw.out, "result JSON path (stdout when empty)");

    auto* ep_cmd = app.add_subcommand("enumerate-paths", "canonical non-backtracking k-paths and Sigma counts");
    int ep_beta = 1, ep_N = 4, ep_limit = 100;
    std::vector<int> ep_lengths{6};
    std::string ep_strength = "weak", ep_out;
    ep_cmd->add_option("--beta", ep_beta)->check(CLI::IsMember({1, 2}));
    ep_cmd->add_option("--N", ep_N, "matrix size, at most 8");
    ep_cmd->add_option("--lengths", ep_lengths, "path lengths n_1 .. n_k")->delimiter(',');
    ep_cmd->add_option("--strength", ep_strength)->check(CLI::IsMember({"weak", "strong", "matched"}));
    ep_cmd->add_option("--limit", ep_limit, "words listed (counting is unaffected)");
    ep_cmd->add_option("--out", ep_out);

    auto* ed_cmd = app.add_subcommand("enumerate-diagrams", "diagrams produced by the loop automaton");
    int ed_beta = 1, ed_s = 2, ed_k = 1;
    bool ed_counts_only = false;
    std::string ed_out;
    ed_cmd->add_option("--beta", ed_beta)->check(CLI::IsMember({1, 2}));
    ed_cmd->add_option("--s-max", ed_s);
    ed_cmd->add_option("--k", ed_k, "number of circuits");
    ed_cmd->add_flag("--counts-only", ed_counts_only);
    ed_cmd->add_option("--out", ed_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*edge_cmd) return run_and_emit(load_config(edge, ExperimentKind::edge_mc));
        if (*trace_cmd) return run_and_emit(load_config(trace, ExperimentKind::trace_mc));
        if (*dev_cmd) return run_and_emit(load_config(dev, ExperimentKind::deviation_sweep));

        if (*ver_cmd) {
            std::vector<ExperimentKind> kinds;
            if (suite == "identities" || suite == "all") kinds.push_back(ExperimentKind::verify_identities);
            if (suite == "paths" || suite == "all") kinds.push_back(ExperimentKind::verify_paths);
            if (suite == "diagrams" || suite == "all") kinds.push_back(ExperimentKind::verify_diagrams);
            nlohmann::ordered_json all = nlohmann::ordered_json::array();
            bool pass = true;
            for (auto k : kinds) {
                ExperimentConfig c;
                c.kind = k;
                const auto r = run_verify(c);
                for (const auto& chk : r.json["samples_summary"]["checks"])
                    std::fprintf(stderr, "%-4s %s/%s\n", chk["pass"].get<bool>() ? "ok" : "FAIL",
                                 to_string(k).c_str(), chk["name"].get<std::string>().c_str());
                pass = pass && r.pass;
                all.push_back(r.json);
            }
            emit(ver.out, (kinds.size() == 1 ? all[0] : all).dump(2) + "\n");
            return pass ? 0 : 1;
        }

        if (*tw_cmd) {
            ExperimentConfig c;
            c.kind = ExperimentKind::tw_table;
            c.table_step = step;
            c.validate();
            const auto r = run_tw_table(c);
            emit(tw.out, dump_result(r));
            if (!csv.empty()) write_tw_csv(csv, step);
            return 0;
        }

        if (*ep_cmd) {
            const Strength st = strength_from_string(ep_strength);
            nlohmann::ordered_json j;
            j["beta"] = ep_beta;
            j["N"] = ep_N;
            j["lengths"] = ep_lengths;
            j["strength"] = ep_strength;
            j["count"] = count_sigma(ep_beta, ep_N, ep_lengths, st);
            auto words = nlohmann::ordered_json::array();
            std::uint64_t canonical = 0;
            for_each_canonical_path(ep_beta, ep_lengths, st, ep_N, [&](const std::vector<int>& w, int nv, std::uint64_t mult) {
                ++canonical;
                if (int(words.size()) < ep_limit) words.push_back({{"word", w}, {"labels", nv}, {"multiplicity", mult}});
            });
            j["canonical_words"] = canonical;
            j["words"] = words;
            emit(ep_out, j.dump(2) + "\n");
            return 0;
        }

        if (*ed_cmd) {
            nlohmann::ordered_json j;
            j["beta"] = ed_beta;
            j["k"] = ed_k;
            auto counts = nlohmann::ordered_json::array();
            for (int s = 1; s <= ed_s; ++s) counts.push_back({{"s", s}, {"count", d_count_k(ed_beta, ed_k, s)}});
            j["counts"] = counts;
            if (!ed_counts_only) {
                auto groups = nlohmann::ordered_json::array();
                const auto ds = enumerate_diagrams(ed_beta, ed_s, ed_k);
                for (size_t s = 0; s < ds.size(); ++s) {
                    auto g = nlohmann::ordered_json::array();
                    for (const auto& d : ds[s]) g.push_back(diagram_json(d));
                    groups.push_back(g);
                }
                j["diagrams"] = groups;
            }
            emit(ed_out, j.dump(2) + "\n");
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
