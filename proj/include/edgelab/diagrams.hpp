#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "paths.hpp"

namespace edgelab {

// One pass over an edge; fwd means tail -> head of the stored endpoints.
struct Trav {
    int e = 0;
    bool fwd = true;
    bool operator==(const Trav& o) const { return e == o.e && fwd == o.fwd; }
};

// Multigraph with k circuits. Labels are canonical: vertices and edges numbered by
// first appearance, each edge stored in the orientation of its first traversal.
struct Diagram {
    int beta = 1;
    int s = 0;
    int k = 1;
    int num_vertices = 0;
    std::vector<std::array<int, 2>> edges;
    std::vector<int> roots;
    std::vector<std::vector<Trav>> circuits;

    int from(const Trav& t) const { return t.fwd ? edges[t.e][0] : edges[t.e][1]; }
    int to(const Trav& t) const { return t.fwd ? edges[t.e][1] : edges[t.e][0]; }

    std::vector<int> key() const
    {
        std::vector<int> out;
        for (const auto& c : circuits) {
            out.push_back(-1);
            for (const Trav& t : c) {
                out.push_back(2 * t.e + (t.fwd ? 0 : 1));
                out.push_back(to(t));
            }
        }
        return out;
    }

    std::vector<int> degrees() const
    {
        std::vector<int> d(num_vertices, 0);
        for (const auto& e : edges) {
            ++d[e[0]];
            ++d[e[1]];
        }
        return d;
    }
};

struct WeightedDiagram {
    Diagram diagram;
    std::vector<int> weights; // per edge, >= -1
    std::vector<int> origin;  // path vertex behind each diagram vertex; -1 for an added root
};

namespace detail {

// Relabels a walk given on raw endpoints into canonical form.
inline Diagram canonical_diagram(int beta, const std::vector<std::array<int, 2>>& raw_edges,
                                 const std::vector<int>& raw_roots, const std::vector<std::vector<Trav>>& raw_circuits)
{
    Diagram d;
    d.beta = beta;
    d.k = int(raw_circuits.size());
    std::map<int, int> vmap;
    std::vector<int> emap(raw_edges.size(), -1);
    std::vector<char> first_fwd(raw_edges.size(), 1);
    auto vid = [&](int v) {
        auto it = vmap.find(v);
        if (it != vmap.end()) return it->second;
        const int id = int(vmap.size());
        vmap.emplace(v, id);
        return id;
    };
    for (size_t c = 0; c < raw_circuits.size(); ++c) {
        d.roots.push_back(vid(raw_roots[c]));
        std::vector<Trav> circ;
        for (const Trav& t : raw_circuits[c]) {
            const int a = t.fwd ? raw_edges[t.e][0] : raw_edges[t.e][1];
            const int b = t.fwd ? raw_edges[t.e][1] : raw_edges[t.e][0];
            const int va = vid(a), vb = vid(b);
            if (emap[t.e] < 0) {
                emap[t.e] = int(d.edges.size());
                first_fwd[t.e] = t.fwd;
                d.edges.push_back({va, vb});
                circ.push_back({emap[t.e], true});
            } else {
                circ.push_back({emap[t.e], t.fwd == bool(first_fwd[t.e])});
            }
        }
        d.circuits.push_back(std::move(circ));
    }
    d.num_vertices = int(vmap.size());
    d.s = d.num_vertices / 2;
    return d;
}

} // namespace detail

// Checks the defining properties: root degree 1, other degrees 3, each edge passed twice
// (beta=1) or once each way (beta=2), no immediate reversal, #E = 3s-k, #V = 2s.
inline bool is_valid_diagram(const Diagram& d, std::string* why = nullptr)
{
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (d.num_vertices != 2 * d.s) return fail("vertex count is not 2s");
    if (int(d.edges.size()) != 3 * d.s - d.k) return fail("edge count is not 3s-k");
    const auto deg = d.degrees();
    std::vector<char> is_root(d.num_vertices, 0);
    for (int r : d.roots) is_root[r] = 1;
    for (int v = 0; v < d.num_vertices; ++v)
        if (deg[v] != (is_root[v] ? 1 : 3)) return fail("bad degree at vertex " + std::to_string(v));
    std::vector<std::array<int, 2>> cnt(d.edges.size(), {0, 0});
    for (size_t c = 0; c < d.circuits.size(); ++c) {
        const auto& circ = d.circuits[c];
        if (circ.empty()) return fail("empty circuit");
        if (d.from(circ.front()) != d.roots[c] || d.to(circ.back()) != d.roots[c]) return fail("circuit not rooted");
        for (size_t j = 0; j < circ.size(); ++j) {
            if (j > 0 && d.to(circ[j - 1]) != d.from(circ[j])) return fail("circuit not connected");
            if (j > 0 && circ[j].e == circ[j - 1].e && circ[j].fwd != circ[j - 1].fwd) return fail("backtrack");
            ++cnt[circ[j].e][circ[j].fwd ? 0 : 1];
        }
    }
    for (size_t e = 0; e < d.edges.size(); ++e) {
        if (d.beta == 1 && cnt[e][0] + cnt[e][1] != 2) return fail("edge not passed twice");
        if (d.beta == 2 && !(cnt[e][0] == 1 && cnt[e][1] == 1)) return fail("edge not passed once each way");
        if (d.beta == 2 && d.edges[e][0] == d.edges[e][1]) return fail("loop edge for beta=2");
    }
    return true;
}

// ---------------------------------------------------------------------------
// Automaton. State: a thread of t pieces (once-passed path from the root to the
// current point) and loops (once-passed cycles). A step retraces the thread to a
// departure point inside piece i, leaves on a new edge and lands on a thread piece,
// on the new edge itself, or on a loop piece.

enum class Transition { create = 1, annihilate = 2, create_annihilate = 3 };

struct AutomatonRun {
    Diagram diagram;
    std::vector<Transition> transitions;
    std::vector<int> m; // 2 - (increase of t + sum of loop sizes), per step
};

namespace detail {

struct AutoState {
    std::vector<std::array<int, 2>> edges;
    int nv = 0;
    std::vector<int> roots;
    std::vector<std::vector<Trav>> hist;
    std::vector<Trav> thread;
    std::vector<std::vector<Trav>> loops;
    std::vector<Transition> types;
    std::vector<int> m;

    int from(const Trav& t) const { return t.fwd ? edges[t.e][0] : edges[t.e][1]; }
    int to(const Trav& t) const { return t.fwd ? edges[t.e][1] : edges[t.e][0]; }

    int loop_total() const
    {
        int s = 0;
        for (const auto& l : loops) s += int(l.size());
        return s;
    }

    static void split_in(std::vector<Trav>& seq, int e, int e2)
    {
        for (size_t i = 0; i < seq.size(); ++i) {
            if (seq[i].e != e) continue;
            if (seq[i].fwd) {
                seq.insert(seq.begin() + i + 1, Trav{e2, true});
            } else {
                seq[i] = Trav{e2, false};
                seq.insert(seq.begin() + i + 1, Trav{e, false});
            }
            ++i;
        }
    }

    // Inserts a fresh vertex inside edge e; returns it.
    int split(int e)
    {
        const int x = nv++;
        const int e2 = int(edges.size());
        const std::array<int, 2> old = edges[e];
        edges[e] = {old[0], x};
        edges.push_back({x, old[1]});
        for (auto& h : hist) split_in(h, e, e2);
        split_in(thread, e, e2);
        for (auto& l : loops) split_in(l, e, e2);
        return x;
    }

    void retrace_last()
    {
        const Trav t = thread.back();
        thread.pop_back();
        hist.back().push_back(Trav{t.e, !t.fwd});
    }

    int new_edge(int a, int b)
    {
        edges.push_back({a, b});
        return int(edges.size()) - 1;
    }
};

inline std::vector<Trav> reversed(const std::vector<Trav>& v)
{
    std::vector<Trav> r;
    for (auto it = v.rbegin(); it != v.rend(); ++it) r.push_back(Trav{it->e, !it->fwd});
    return r;
}

class AutomatonEnumerator {
public:
    AutomatonEnumerator(int beta, int s, int k) : beta_(beta), s_(s), k_(k) {}

    template <class F>
    void run(F&& f)
    {
        AutoState st;
        rec(st, 0, 0, f);
    }

private:
    template <class F>
    void rec(const AutoState& st, int steps, int circuits, F& f)
    {
        const int loops_left = int(st.loops.size());
        if (!st.thread.empty()) {
            // close the current circuit
            const bool last = circuits + 1 == k_;
            const bool ok = last ? (loops_left == 0 && steps == s_) : (s_ - steps >= k_ - circuits - 1);
            if (ok) {
                AutoState nx = st;
                while (!nx.thread.empty()) nx.retrace_last();
                if (last)
                    emit(nx, f);
                else
                    rec(nx, steps, circuits + 1, f);
            }
            if (steps == s_) return;
            const int t = int(st.thread.size());
            for (int i = 1; i <= t; ++i) step_from(st, i, steps, circuits, f);
        } else {
            if (steps == s_ || circuits == k_) return;
            step_from(st, 0, steps, circuits, f);
        }
    }

    // Departure in piece i (1-based); i = 0 means leaving a fresh root.
    template <class F>
    void step_from(const AutoState& st, int i, int steps, int circuits, F& f)
    {
        if (int(st.loops.size()) > s_ - steps) return;
        AutoState base = st;
        const int t_before = int(st.thread.size());
        const int loops_before = st.loop_total();
        int x;
        if (i == 0) {
            x = base.nv++;
            base.roots.push_back(x);
            base.hist.emplace_back();
        } else {
            while (int(base.thread.size()) > i) base.retrace_last();
            x = base.split(base.thread.back().e);
            base.retrace_last();
        }
        auto finish = [&](AutoState& nx, Transition type) {
            nx.types.push_back(type);
            nx.m.push_back(2 - (int(nx.thread.size()) + nx.loop_total() - t_before - loops_before));
            rec(nx, steps + 1, circuits, f);
        };
        // landing on the thread, piece j (1-based), j <= i
        for (int j = 1; j <= i; ++j) {
            AutoState nx = base;
            const int y = nx.split(nx.thread[j - 1].e);
            const int e = nx.new_edge(x, y);
            nx.hist.back().push_back(Trav{e, true});
            std::vector<Trav> cyc(nx.thread.begin() + j, nx.thread.end());
            cyc.push_back(Trav{e, true});
            nx.thread.resize(j);
            land_on_cycle(nx, cyc, finish);
        }
        // landing on the new edge itself
        {
            AutoState nx = base;
            const int y = nx.nv++;
            const int e = nx.new_edge(x, y);
            const int lp = nx.new_edge(y, y);
            nx.hist.back().push_back(Trav{e, true});
            nx.hist.back().push_back(Trav{lp, true});
            nx.thread.push_back(Trav{e, true});
            land_on_cycle(nx, {Trav{lp, true}}, finish);
        }
        // landing on a loop
        for (size_t L = 0; L < base.loops.size(); ++L) {
            const int len = int(base.loops[L].size());
            for (int p = 0; p < len; ++p) {
                for (int dir = 0; dir < (beta_ == 1 ? 2 : 1); ++dir) {
                    AutoState nx = base;
                    const int y = nx.split(nx.loops[L][p].e);
                    const int e = nx.new_edge(x, y);
                    nx.hist.back().push_back(Trav{e, true});
                    std::vector<Trav> loop = nx.loops[L];
                    nx.loops.erase(nx.loops.begin() + L);
                    std::vector<Trav> cyc(loop.begin() + p + 1, loop.end());
                    cyc.insert(cyc.end(), loop.begin(), loop.begin() + p + 1);
                    nx.thread.push_back(Trav{e, true});
                    const std::vector<Trav> add = dir == 0 ? cyc : reversed(cyc);
                    nx.thread.insert(nx.thread.end(), add.begin(), add.end());
                    finish(nx, Transition::annihilate);
                }
            }
        }
    }

    // After landing: keep the new cycle as a loop, or (beta=1) run through it again.
    template <class Fin>
    void land_on_cycle(AutoState& nx, const std::vector<Trav>& cyc, Fin& finish)
    {
        if (beta_ == 1) {
            AutoState fw = nx;
            const auto r = reversed(cyc);
            fw.thread.insert(fw.thread.end(), r.begin(), r.end());
            finish(fw, Transition::create_annihilate);
        }
        nx.loops.push_back(cyc);
        finish(nx, Transition::create);
    }

    template <class F>
    void emit(const AutoState& st, F& f)
    {
        AutomatonRun run;
        run.diagram = detail::canonical_diagram(beta_, st.edges, st.roots, st.hist);
        run.transitions = st.types;
        run.m = st.m;
        f(run);
    }

    int beta_, s_, k_;
};

} // namespace detail

inline constexpr int diagram_s_limit = 5;

// Every automaton run for (beta, s, k); runs that give the same canonical diagram are
// reported separately.
template <class F>
void for_each_automaton_run(int beta, int s, int k, F&& f)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(s >= 1 && s <= diagram_s_limit, "automaton: s must be in [1, 5]");
    require(k >= 1 && k <= s, "automaton: need 1 <= k <= s");
    detail::AutomatonEnumerator(beta, s, k).run(f);
}

// Distinct diagrams grouped by s = 1..s_max (index s-1).
inline std::vector<std::vector<Diagram>> enumerate_diagrams(int beta, int s_max, int k = 1)
{
    require(s_max >= 1 && s_max <= diagram_s_limit, "enumerate_diagrams: s_max must be in [1, 5]");
    std::vector<std::vector<Diagram>> out(s_max);
    for (int s = k; s <= s_max; ++s) {
        std::map<std::vector<int>, Diagram> seen;
        for_each_automaton_run(beta, s, k, [&](const AutomatonRun& r) {
            std::string why;
            if (!is_valid_diagram(r.diagram, &why)) throw std::logic_error("automaton produced an invalid diagram: " + why);
            seen.emplace(r.diagram.key(), r.diagram);
        });
        for (auto& [key, d] : seen) out[s - 1].push_back(d);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run counts by dynamic programming over (t, loop sizes). Equal to the number of
// distinct diagrams when runs and diagrams are in bijection (checked in the tests
// against the deduplicated enumeration).

inline double automaton_run_count(int beta, int s, int k = 1)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(s >= 1 && k >= 1 && k <= s, "automaton_run_count: need 1 <= k <= s");
    using Key = std::pair<int, std::vector<int>>; // (t, sorted loop sizes)
    // layer[c][key] after a given number of steps; c = circuits closed so far
    std::vector<std::map<Key, double>> cur(k + 1);
    cur[0][Key{0, {}}] = 1.0;
    double total = 0.0;
    auto add = [](std::map<Key, double>& m, int t, std::vector<int> loops, double w) {
        std::sort(loops.begin(), loops.end());
        m[Key{t, std::move(loops)}] += w;
    };
    for (int step = 0; step <= s; ++step) {
        // closing circuits happens between steps; settle it first
        for (int c = 0; c < k; ++c) {
            for (const auto& [key, w] : cur[c]) {
                if (key.first == 0) continue;
                const bool last = c + 1 == k;
                if (last) {
                    if (key.second.empty() && step == s) total += w;
                } else if (s - step >= k - c - 1) {
                    add(cur[c + 1], 0, key.second, w);
                }
            }
        }
        if (step == s) break;
        std::vector<std::map<Key, double>> nxt(k + 1);
        for (int c = 0; c < k; ++c) {
            for (const auto& [key, w] : cur[c]) {
                const int t = key.first;
                const auto& loops = key.second;
                if (int(loops.size()) > s - step) continue;
                const int i_lo = t == 0 ? 0 : 1, i_hi = t;
                for (int i = i_lo; i <= i_hi; ++i) {
                    // thread landings j = 1..i: t' = j, loop i-j+2; forward: t' = i+2
                    for (int j = 1; j <= i; ++j) {
                        auto l2 = loops;
                        l2.push_back(i - j + 2);
                        add(nxt[c], j, l2, w);
                        if (beta == 1) add(nxt[c], i + 2, loops, w);
                    }
                    // lasso
                    {
                        auto l2 = loops;
                        l2.push_back(1);
                        add(nxt[c], i + 1, l2, w);
                        if (beta == 1) add(nxt[c], i + 2, loops, w);
                    }
                    // loops
                    for (size_t L = 0; L < loops.size(); ++L) {
                        auto l2 = loops;
                        const int len = l2[L];
                        l2.erase(l2.begin() + L);
                        add(nxt[c], i + 1 + len + 1, l2, w * len * (beta == 1 ? 2 : 1));
                    }
                }
            }
        }
        cur = std::move(nxt);
    }
    return total;
}

inline std::uint64_t d_count(int beta, int s)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(s >= 1 && s <= diagram_s_limit, "d_count: s must be in [1, 5]");
    return std::uint64_t(std::llround(automaton_run_count(beta, s, 1)));
}

inline std::uint64_t d_count_k(int beta, int k, int s)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(s >= 1 && s <= diagram_s_limit, "d_count_k: s must be in [1, 5]");
    require(k >= 1, "d_count_k: k must be positive");
    if (k > s) return 0;
    return std::uint64_t(std::llround(automaton_run_count(beta, s, k)));
}

// ---------------------------------------------------------------------------
// Oracle 1: diagrams straight from the definition. Depth-first over edge-labelled
// circuits with canonical (first-appearance) labels; no automaton involved.

namespace detail {

class DefinitionEnumerator {
public:
    DefinitionEnumerator(int beta, int s, int k) : beta_(beta), s_(s), k_(k)
    {
        vmax_ = 2 * s;
        emax_ = 3 * s - k;
        len_ = 2 * emax_;
    }

    template <class F>
    void run(F&& f)
    {
        deg_.assign(vmax_, 0);
        root_.assign(vmax_, 0);
        edges_.reserve(emax_ + 1);
        start_circuit(f);
    }

private:
    struct Edge {
        int a, b, passes;
    };

    template <class F>
    void start_circuit(F& f)
    {
        if (int(circuits_.size()) == k_) {
            if (steps_ == len_ && int(edges_.size()) == emax_ && nv_ == vmax_ && complete()) emit(f);
            return;
        }
        if (nv_ >= vmax_) return;
        const int r = nv_++;
        root_[r] = 1;
        roots_.push_back(r);
        circuits_.emplace_back();
        // the root edge is always new
        new_edge_moves(r, f);
        circuits_.pop_back();
        roots_.pop_back();
        root_[r] = 0;
        --nv_;
    }

    bool complete() const
    {
        for (int v = 0; v < nv_; ++v)
            if (deg_[v] != (root_[v] ? 1 : 3)) return false;
        for (const auto& e : edges_)
            if (e.passes != 2) return false;
        return true;
    }

    int open_edges() const
    {
        int c = 0;
        for (const auto& e : edges_) c += e.passes == 1;
        return c;
    }

    template <class F>
    void walk(int cur, F& f)
    {
        if (cur == roots_.back() && !circuits_.back().empty()) {
            start_circuit(f);
            return;
        }
        if (steps_ >= len_) return;
        // every open edge and every missing edge needs at least one more pass
        if (open_edges() + 2 * (emax_ - int(edges_.size())) > len_ - steps_) return;
        // pass an open edge again
        for (size_t e = 0; e < edges_.size(); ++e) {
            Edge& ed = edges_[e];
            if (ed.passes != 1) continue;
            for (int dir = 0; dir < 2; ++dir) {
                const bool fwd = dir == 0;
                if ((fwd ? ed.a : ed.b) != cur) continue;
                if (beta_ == 2 && fwd) continue; // second pass must go against the first
                const Trav t{int(e), fwd};
                if (!circuits_.back().empty()) {
                    const Trav& last = circuits_.back().back();
                    if (last.e == t.e && last.fwd != t.fwd) continue;
                }
                ++ed.passes;
                circuits_.back().push_back(t);
                ++steps_;
                walk(fwd ? ed.b : ed.a, f);
                --steps_;
                circuits_.back().pop_back();
                --ed.passes;
            }
        }
        new_edge_moves(cur, f);
    }

    template <class F>
    void new_edge_moves(int cur, F& f)
    {
        if (int(edges_.size()) >= emax_) return;
        const int cap = root_[cur] ? 1 : 3;
        if (deg_[cur] >= cap) return;
        // to an existing vertex (possibly cur itself, a loop), or to a fresh one
        for (int w = 0; w <= nv_ && w < vmax_; ++w) {
            const bool fresh = w == nv_;
            if (!fresh && root_[w]) continue;
            if (w == cur) {
                if (beta_ == 2) continue;
                if (deg_[cur] + 2 > cap) continue;
            } else if (!fresh && deg_[w] >= 3) {
                continue;
            }
            if (fresh) ++nv_;
            ++deg_[cur];
            ++deg_[w];
            edges_.push_back(Edge{cur, w, 1});
            circuits_.back().push_back(Trav{int(edges_.size()) - 1, true});
            ++steps_;
            walk(w, f);
            --steps_;
            circuits_.back().pop_back();
            edges_.pop_back();
            --deg_[w];
            --deg_[cur];
            if (fresh) --nv_;
        }
    }

    template <class F>
    void emit(F& f)
    {
        std::vector<std::array<int, 2>> raw;
        for (const auto& e : edges_) raw.push_back({e.a, e.b});
        Diagram d = canonical_diagram(beta_, raw, roots_, circuits_);
        f(d);
    }

    int beta_, s_, k_;
    int vmax_, emax_, len_;
    int nv_ = 0, steps_ = 0;
    std::vector<int> deg_, root_, roots_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Trav>> circuits_;
};

} // namespace detail

// Canonical keys of all diagrams with the given (beta, s, k), by direct search.
inline std::set<std::vector<int>> diagrams_by_definition(int beta, int s, int k = 1)
{
    require(s >= 1 && s <= 4, "diagrams_by_definition: s must be in [1, 4]");
    std::set<std::vector<int>> out;
    detail::DefinitionEnumerator(beta, s, k).run([&](const Diagram& d) {
        std::string why;
        if (!is_valid_diagram(d, &why)) throw std::logic_error("definition search produced an invalid diagram: " + why);
        out.insert(d.key());
    });
    return out;
}

// ---------------------------------------------------------------------------
// Oracle 2: reduce a closed path on K_N to its weighted diagram (root handling, then
// erasure of degree-2 vertices). Paths that would need the vertex-splitting step
// (a non-root vertex of degree > 3) are not reduced.

inline std::optional<WeightedDiagram> reduce_path(const std::vector<int>& word, int beta)
{
    require(word.size() >= 2 && word.front() == word.back(), "reduce_path: word must be closed");
    std::map<int, std::set<int>> adj;
    for (size_t j = 1; j < word.size(); ++j) {
        adj[word[j - 1]].insert(word[j]);
        adj[word[j]].insert(word[j - 1]);
    }
    std::vector<int> w = word;
    const int u0 = word.front();
    int root = u0;
    bool added_root = false;
    const int d0 = int(adj[u0].size());
    if (d0 == 2) {
        root = -1; // extra vertex
        adj[root].insert(u0);
        adj[u0].insert(root);
        w.insert(w.begin(), root);
        w.push_back(root);
        added_root = true;
    } else if (d0 != 1) {
        return std::nullopt;
    }
    for (const auto& [v, nb] : adj)
        if (v != root && nb.size() > 3) return std::nullopt;
    auto is_node = [&](int v) { return v == root || adj[v].size() == 3; };

    // split the walk at diagram vertices into chain traversals
    std::map<std::vector<int>, int> chain_id;
    std::vector<std::vector<int>> chains;
    std::vector<Trav> circ;
    std::vector<int> cur{w[0]};
    for (size_t j = 1; j < w.size(); ++j) {
        cur.push_back(w[j]);
        if (!is_node(w[j])) continue;
        std::vector<int> rev(cur.rbegin(), cur.rend());
        const bool fwd = cur <= rev;
        const std::vector<int>& key = fwd ? cur : rev;
        auto it = chain_id.find(key);
        int id;
        if (it == chain_id.end()) {
            id = int(chains.size());
            chain_id.emplace(key, id);
            chains.push_back(key);
        } else {
            id = it->second;
        }
        circ.push_back(Trav{id, fwd});
        cur.assign(1, w[j]);
    }
    std::vector<std::array<int, 2>> raw;
    for (const auto& c : chains) raw.push_back({c.front(), c.back()});
    WeightedDiagram out;
    out.diagram = detail::canonical_diagram(beta, raw, {root}, {circ});
    // weights follow the canonical edge order, which is first-pass order
    std::vector<int> order;
    std::set<int> seen;
    for (const Trav& t : circ)
        if (seen.insert(t.e).second) order.push_back(t.e);
    for (int id : order) {
        int wgt = int(chains[id].size()) - 2;
        if (added_root && (chains[id].front() == root || chains[id].back() == root)) wgt = -1;
        out.weights.push_back(wgt);
    }
    out.origin.assign(out.diagram.num_vertices, -1);
    {
        std::map<int, int> seen_v;
        auto note = [&](int v) {
            if (seen_v.count(v)) return;
            const int id = int(seen_v.size());
            seen_v.emplace(v, id);
            out.origin[id] = v;
        };
        note(root);
        for (const Trav& t : circ) note(t.fwd ? raw[t.e][1] : raw[t.e][0]);
    }
    return out;
}

// Inverse of reduce_path for single-circuit diagrams: replaces each edge by a chain with
// w interior vertices (w = -1 allowed on the root edge only, which then disappears).
// Returns the first-appearance labelled closed word.
inline std::vector<int> expand_weighted(const WeightedDiagram& wd)
{
    const Diagram& d = wd.diagram;
    require(d.k == 1, "expand_weighted: single-circuit diagrams only");
    require(wd.weights.size() == d.edges.size(), "expand_weighted: one weight per edge");
    const int root = d.roots[0];
    std::vector<std::vector<int>> interior(d.edges.size());
    int next = d.num_vertices;
    bool drop_root = false;
    for (size_t e = 0; e < d.edges.size(); ++e) {
        const int w = wd.weights[e];
        const bool root_edge = d.edges[e][0] == root || d.edges[e][1] == root;
        require(w >= 0 || (w == -1 && root_edge), "expand_weighted: weight -1 only on the root edge");
        if (w == -1) drop_root = true;
        for (int i = 0; i < w; ++i) interior[e].push_back(next++);
    }
    std::vector<int> raw;
    const auto& circ = d.circuits[0];
    raw.push_back(d.from(circ.front()));
    for (const Trav& t : circ) {
        const auto& in = interior[t.e];
        if (t.fwd)
            raw.insert(raw.end(), in.begin(), in.end());
        else
            raw.insert(raw.end(), in.rbegin(), in.rend());
        raw.push_back(d.to(t));
    }
    if (drop_root) raw = std::vector<int>(raw.begin() + 1, raw.end() - 1);
    std::map<int, int> lab;
    std::vector<int> word;
    for (int v : raw) word.push_back(lab.emplace(v, int(lab.size())).first->second);
    return word;
}

// Smallest half-length n of a closed path on a complete graph that satisfies the strong
// condition and reduces to d; weights searched in {-1 (root edge), 0, 1, 2}.
inline int min_realizing_length(const Diagram& d)
{
    require(d.k == 1, "min_realizing_length: single-circuit diagrams only");
    const int E = int(d.edges.size());
    const int root = d.roots[0];
    int best = -1;
    std::vector<int> w(E, 0);
    const std::vector<int> key = d.key();
    std::function<void(int, int)> rec = [&](int e, int sum) {
        if (best >= 0 && sum + E >= best) return;
        if (e == E) {
            WeightedDiagram wd{d, w, {}};
            const auto word = expand_weighted(wd);
            if (!check_conditions(PathWord{word, int(word.size())}, d.beta).d_strong) return;
            const auto c = check_conditions(PathWord{word, int(word.size())}, d.beta);
            if (!(c.a && c.b && c.c)) return;
            const auto r = reduce_path(word, d.beta);
            if (!r || r->diagram.key() != key || r->weights != w) return;
            best = sum + E;
            return;
        }
        const bool root_edge = d.edges[e][0] == root || d.edges[e][1] == root;
        for (int x = root_edge ? -1 : 0; x <= 2; ++x) {
            w[e] = x;
            rec(e + 1, sum + x);
        }
        w[e] = 0;
    };
    rec(0, 0);
    return best;
}

// ---------------------------------------------------------------------------
// Series and counting formulas.

struct PhiSeries {
    int beta = 1;
    std::vector<double> coefficients; // D(s)/(3s-2)!, s = 1..s_max
    double value = 0.0;
    double remainder_estimate = 0.0;
    bool warning = false;
};

inline PhiSeries phi_series(int beta, double n, double N, int s_max = 5)
{
    require(beta == 1 || beta == 2, "beta must be 1 or 2");
    require(n > 0 && N > 0, "phi: n and N must be positive");
    require(s_max >= 1 && s_max <= diagram_s_limit, "phi: s_max must be in [1, 5]");
    PhiSeries p;
    p.beta = beta;
    const double r = std::pow(n / 2.0, 3) / N;
    std::vector<double> terms;
    double sum = 0.0;
    for (int s = 1; s <= s_max; ++s) {
        const double c = double(d_count(beta, s)) / std::exp(std::lgamma(3.0 * s - 1.0));
        p.coefficients.push_back(c);
        const double term = std::pow(r, s - 1) * c;
        terms.push_back(term);
        sum += term;
    }
    p.value = n / 4.0 * sum;
    // geometric tail from the last two nonzero terms
    double last = 0.0, prev = 0.0;
    for (double t : terms)
        if (t > 0) {
            prev = last;
            last = t;
        }
    if (prev > 0 && last > 0) {
        const double q = last / prev;
        p.remainder_estimate = q < 1 ? n / 4.0 * last * q / (1 - q) : INFINITY;
    }
    p.warning = r > 1.0 || p.remainder_estimate > 0.01 * std::abs(p.value);
    return p;
}

inline double phi(int beta, double n, double N, int s_max = 5)
{
    return phi_series(beta, n, N, s_max).value;
}

struct CovPrediction {
    double value = 0.0;      // predicted sum over paths
    double normalized = 0.0; // value / (MN)^{n/2}
    bool degenerate = false; // M = N: second branch dropped
};

inline CovPrediction predict_cov_trace(int beta, int n, int M, int N, int s_max = 5)
{
    require(M >= 1 && M <= N, "predict_cov_trace: need 1 <= M <= N");
    require(n >= 1, "predict_cov_trace: n must be positive");
    CovPrediction p;
    const double a = 1.0 / std::sqrt(double(M)), b = 1.0 / std::sqrt(double(N));
    const double ratio = std::sqrt(double(M) / N);
    double v = (1.0 + ratio) * phi(beta, n, 1.0 / ((a + b) * (a + b)), s_max);
    if (M == N) {
        p.degenerate = true;
    } else {
        v += (n % 2 ? -1.0 : 1.0) * (1.0 - ratio) * phi(beta, n, 1.0 / ((a - b) * (a - b)), s_max);
    }
    p.normalized = v;
    p.value = v * std::pow(double(M) * N, n / 2.0);
    return p;
}

// Ordered ways to write m as a odd parts (>= 1) plus b even parts (>= 0).
inline std::uint64_t delta_count(int m, int a, int b)
{
    require(m >= 0 && a >= 0 && b >= 0, "delta_count: arguments must be nonnegative");
    require(a + b >= 1 || m == 0, "delta_count: need a + b >= 1");
    if (a + b == 0) return m == 0 ? 1 : 0;
    if ((m - a) % 2 != 0 || m < a) return 0;
    return binom_u64((m - a) / 2 + a + b - 1, a + b - 1);
}

// (V+, V-) for a bipartite path of length n over a diagram with s steps and Vbar_plus
// row-type diagram vertices; nullopt when the family is empty.
inline std::optional<std::pair<int, int>> vertex_type_split(int n, int s, int Vbar_plus)
{
    if (((Vbar_plus - n) % 2 + 2) % 2 != 0) return std::nullopt;
    return std::make_pair((n + 2 - Vbar_plus) / 2, (n - 2 * s + Vbar_plus) / 2);
}

// Weight assignments with total n - #E: all weights >= 1 (strict) or >= -1.
inline std::uint64_t weight_placement_count(const Diagram& d, int n, bool strict)
{
    require(d.k == 1, "weight_placement_count: single-circuit diagrams only");
    const int E = int(d.edges.size());
    const int total = n - E;
    if (strict) {
        // w' = w - 1 >= 0, sum w' = n - 2E
        if (n - 2 * E < 0) return 0;
        return binom_u64(n - 2 * E + E - 1, E - 1);
    }
    if (total + E < 0) return 0;
    return binom_u64(n + E - 1, E - 1);
}

// Claim: with all weights >= 1 the labelled paths number N (N-1) ... (N - V + 1),
// V = #vertices + sum of weights.
inline std::uint64_t vertex_labelings(int N, const WeightedDiagram& wd)
{
    int V = wd.diagram.num_vertices;
    for (int w : wd.weights) V += w;
    if (V > N) return 0;
    return detail::falling(N, V);
}

inline nlohmann::ordered_json d_table_json(int s_max = diagram_s_limit)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int beta = 1; beta <= 2; ++beta)
        for (int s = 1; s <= s_max; ++s) arr.push_back({{"beta", beta}, {"s", s}, {"count", d_count(beta, s)}});
    return arr;
}

} // namespace edgelab
