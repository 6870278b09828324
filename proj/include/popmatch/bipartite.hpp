#pragma once

// Plain bipartite graphs with string-labeled vertices, maximum matchings via
// Hopcroft-Karp, and the Even/Odd/Unreachable decomposition induced by
// alternating paths from exposed vertices.

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "popmatch/instance.hpp"

namespace popmatch {

class BipartiteGraph {
  public:
    static BipartiteGraph make(std::vector<std::string> left, std::vector<std::string> right,
                               const std::vector<std::pair<std::string, std::string>>& edges) {
        BipartiteGraph g;
        g.left_ = std::move(left);
        g.right_ = std::move(right);
        std::sort(g.left_.begin(), g.left_.end());
        std::sort(g.right_.begin(), g.right_.end());
        for (const auto& v : g.left_) detail::check_label(v, "left vertex");
        for (const auto& v : g.right_) detail::check_label(v, "right vertex");
        for (std::size_t i = 0; i + 1 < g.left_.size(); ++i)
            if (g.left_[i] == g.left_[i + 1])
                throw ValidationError("duplicate left vertex '" + g.left_[i] + "'");
        for (std::size_t i = 0; i + 1 < g.right_.size(); ++i)
            if (g.right_[i] == g.right_[i + 1])
                throw ValidationError("duplicate right vertex '" + g.right_[i] + "'");
        for (std::size_t i = 0; i < g.left_.size(); ++i) g.left_idx_[g.left_[i]] = (int)i;
        for (std::size_t i = 0; i < g.right_.size(); ++i) g.right_idx_[g.right_[i]] = (int)i;
        g.adj_.assign(g.left_.size(), {});
        for (const auto& [u, v] : edges) {
            auto ui = g.left_idx_.find(u);
            auto vi = g.right_idx_.find(v);
            if (ui == g.left_idx_.end())
                throw ValidationError("edge endpoint '" + u + "' is not a left vertex");
            if (vi == g.right_idx_.end())
                throw ValidationError("edge endpoint '" + v + "' is not a right vertex");
            g.adj_[ui->second].push_back(vi->second);
        }
        g.num_edges_ = 0;
        for (auto& nbrs : g.adj_) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
            g.num_edges_ += nbrs.size();
        }
        g.radj_.assign(g.right_.size(), {});
        for (std::size_t u = 0; u < g.adj_.size(); ++u)
            for (int v : g.adj_[u]) g.radj_[v].push_back((int)u);
        return g;
    }

    const std::vector<std::string>& left() const { return left_; }
    const std::vector<std::string>& right() const { return right_; }
    std::size_t num_left() const { return left_.size(); }
    std::size_t num_right() const { return right_.size(); }
    std::size_t num_edges() const { return num_edges_; }

    const std::vector<int>& neighbors(int u) const { return adj_[u]; }
    const std::vector<int>& rneighbors(int v) const { return radj_[v]; }

    std::optional<int> left_index(const std::string& l) const {
        auto it = left_idx_.find(l);
        if (it == left_idx_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<int> right_index(const std::string& l) const {
        auto it = right_idx_.find(l);
        if (it == right_idx_.end()) return std::nullopt;
        return it->second;
    }
    bool has_edge(int u, int v) const {
        return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
    }

    // Label pairs in deterministic (left, right) order.
    std::vector<std::pair<std::string, std::string>> edge_labels() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (std::size_t u = 0; u < adj_.size(); ++u)
            for (int v : adj_[u]) out.emplace_back(left_[u], right_[v]);
        return out;
    }

  private:
    std::vector<std::string> left_, right_;
    std::unordered_map<std::string, int> left_idx_, right_idx_;
    std::vector<std::vector<int>> adj_, radj_;
    std::size_t num_edges_ = 0;
};

struct BipartiteMatching {
    std::vector<int> left_to_right;  // -1 when unmatched
    std::vector<int> right_to_left;

    std::size_t size() const {
        std::size_t n = 0;
        for (int v : left_to_right)
            if (v != -1) ++n;
        return n;
    }
};

namespace detail {

inline void check_matching_in_graph(const BipartiteGraph& g, const BipartiteMatching& m) {
    if (m.left_to_right.size() != g.num_left() || m.right_to_left.size() != g.num_right())
        throw ValidationError("matching arrays do not fit the graph");
    for (std::size_t u = 0; u < m.left_to_right.size(); ++u) {
        int v = m.left_to_right[u];
        if (v == -1) continue;
        if (v < 0 || v >= (int)g.num_right() || !g.has_edge((int)u, v))
            throw ValidationError("matching uses a non-edge");
        if (m.right_to_left[v] != (int)u)
            throw ValidationError("matching arrays are inconsistent");
    }
    for (std::size_t v = 0; v < m.right_to_left.size(); ++v) {
        int u = m.right_to_left[v];
        if (u != -1 && m.left_to_right[u] != (int)v)
            throw ValidationError("matching arrays are inconsistent");
    }
}

}  // namespace detail

// Hopcroft-Karp, optionally growing a caller-supplied matching.  Augmenting
// never exposes a matched vertex, so seeded coverage is preserved.
inline BipartiteMatching max_matching(const BipartiteGraph& g,
                                      std::optional<BipartiteMatching> seed = std::nullopt) {
    BipartiteMatching m;
    if (seed) {
        detail::check_matching_in_graph(g, *seed);
        m = std::move(*seed);
    } else {
        m.left_to_right.assign(g.num_left(), -1);
        m.right_to_left.assign(g.num_right(), -1);
    }
    const int INF = std::numeric_limits<int>::max();
    std::vector<int> dist(g.num_left());
    std::deque<int> queue;

    auto bfs = [&]() {
        bool reachable_free = false;
        queue.clear();
        for (std::size_t u = 0; u < g.num_left(); ++u) {
            if (m.left_to_right[u] == -1) {
                dist[u] = 0;
                queue.push_back((int)u);
            } else {
                dist[u] = INF;
            }
        }
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : g.neighbors(u)) {
                int w = m.right_to_left[v];
                if (w == -1) {
                    reachable_free = true;
                } else if (dist[w] == INF) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        return reachable_free;
    };

    std::vector<std::size_t> iter(g.num_left());
    auto dfs = [&](auto&& self, int u) -> bool {
        for (std::size_t& i = iter[u]; i < g.neighbors(u).size(); ++i) {
            int v = g.neighbors(u)[i];
            int w = m.right_to_left[v];
            if (w == -1 || (dist[w] == dist[u] + 1 && self(self, w))) {
                m.left_to_right[u] = v;
                m.right_to_left[v] = (int)u;
                return true;
            }
        }
        dist[u] = INF;
        return false;
    };

    while (bfs()) {
        std::fill(iter.begin(), iter.end(), 0);
        for (std::size_t u = 0; u < g.num_left(); ++u)
            if (m.left_to_right[u] == -1) dfs(dfs, (int)u);
    }
    return m;
}

enum class GELabel { Even, Odd, Unreachable };

inline const char* ge_label_name(GELabel l) {
    switch (l) {
        case GELabel::Even: return "Even";
        case GELabel::Odd: return "Odd";
        case GELabel::Unreachable: return "Unreachable";
    }
    return "?";
}

// Vertex classification by alternating-path parity from exposed vertices.
// Independent of the particular maximum matching used to compute it.
struct GEDecomposition {
    std::vector<GELabel> left, right;
    std::size_t matching_size = 0;  // size of every maximum matching

    std::size_t count(GELabel l) const {
        std::size_t n = 0;
        for (auto x : left) n += (x == l);
        for (auto x : right) n += (x == l);
        return n;
    }
};

// Requires m maximum; detected by attempting to augment it.
inline GEDecomposition gallai_edmonds(const BipartiteGraph& g, const BipartiteMatching& m) {
    detail::check_matching_in_graph(g, m);
    BipartiteMatching extended = max_matching(g, m);
    if (extended.size() != m.size())
        throw ValidationError("matching is not maximum (an augmenting path exists)");

    GEDecomposition d;
    constexpr int kUnset = -1;
    std::vector<int> llabel(g.num_left(), kUnset), rlabel(g.num_right(), kUnset);
    std::deque<std::pair<bool, int>> queue;  // (is_left, index), Even vertices only
    for (std::size_t u = 0; u < g.num_left(); ++u)
        if (m.left_to_right[u] == -1) {
            llabel[u] = 0;
            queue.emplace_back(true, (int)u);
        }
    for (std::size_t v = 0; v < g.num_right(); ++v)
        if (m.right_to_left[v] == -1) {
            rlabel[v] = 0;
            queue.emplace_back(false, (int)v);
        }
    while (!queue.empty()) {
        auto [is_left, x] = queue.front();
        queue.pop_front();
        if (is_left) {
            for (int v : g.neighbors(x)) {
                if (v == m.left_to_right[x]) continue;  // only non-matching edges out of Even
                if (rlabel[v] != kUnset) continue;
                rlabel[v] = 1;
                int w = m.right_to_left[v];  // matched, else v would have been a seed
                if (w != -1 && llabel[w] == kUnset) {
                    llabel[w] = 0;
                    queue.emplace_back(true, w);
                }
            }
        } else {
            for (int u : g.rneighbors(x)) {
                if (u == m.right_to_left[x]) continue;
                if (llabel[u] != kUnset) continue;
                llabel[u] = 1;
                int w = m.left_to_right[u];
                if (w != -1 && rlabel[w] == kUnset) {
                    rlabel[w] = 0;
                    queue.emplace_back(false, w);
                }
            }
        }
    }
    auto to_label = [](int x) {
        if (x == 0) return GELabel::Even;
        if (x == 1) return GELabel::Odd;
        return GELabel::Unreachable;
    };
    d.left.resize(g.num_left());
    d.right.resize(g.num_right());
    for (std::size_t u = 0; u < g.num_left(); ++u) d.left[u] = to_label(llabel[u]);
    for (std::size_t v = 0; v < g.num_right(); ++v) d.right[v] = to_label(rlabel[v]);
    d.matching_size = m.size();
    if (d.matching_size != d.count(GELabel::Odd) + d.count(GELabel::Unreachable) / 2)
        throw Error("internal: decomposition size identity violated");
    return d;
}

// Rank-1 graph: agents on the left, all houses on the right, an edge for
// every house in an agent's most preferred group.
inline BipartiteGraph first_choice_graph(const Instance& inst) {
    std::vector<std::string> right;
    for (const auto& h : inst.houses()) right.push_back(h.id);
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& a : inst.agents())
        for (const auto& h : inst.preferences(a).front()) edges.emplace_back(a, h);
    return BipartiteGraph::make(inst.agents(), std::move(right), edges);
}

// Edge-list format: header "n1 n2 m" followed by m lines "u v" with
// 1-indexed endpoints.  Vertices are labeled u1..un1 and v1..vn2.
inline BipartiteGraph parse_bipartite_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> std::optional<std::string> {
        while (std::getline(in, line)) {
            ++lineno;
            std::size_t start = line.find_first_not_of(" \t\r");
            if (start == std::string::npos) continue;
            if (line[start] == '#') continue;
            return line;
        }
        return std::nullopt;
    };
    auto header = next_line();
    if (!header) throw ParseError("graph file: missing 'n1 n2 m' header");
    long n1, n2, mm;
    {
        std::istringstream hs(*header);
        std::string extra;
        if (!(hs >> n1 >> n2 >> mm) || (hs >> extra))
            throw ParseError("graph file line " + std::to_string(lineno) +
                             ": expected header 'n1 n2 m'");
    }
    if (n1 < 0 || n2 < 0 || mm < 0)
        throw ParseError("graph file: negative sizes in header");
    std::vector<std::string> left, right;
    for (long i = 1; i <= n1; ++i) left.push_back("u" + std::to_string(i));
    for (long j = 1; j <= n2; ++j) right.push_back("v" + std::to_string(j));
    std::set<std::pair<long, long>> seen;
    std::vector<std::pair<std::string, std::string>> edges;
    for (long e = 0; e < mm; ++e) {
        auto el = next_line();
        if (!el)
            throw ParseError("graph file: expected " + std::to_string(mm) + " edges, got " +
                             std::to_string(e));
        std::istringstream es(*el);
        long u, v;
        std::string extra;
        if (!(es >> u >> v) || (es >> extra))
            throw ParseError("graph file line " + std::to_string(lineno) +
                             ": expected 'u v'");
        if (u < 1 || u > n1 || v < 1 || v > n2)
            throw ParseError("graph file line " + std::to_string(lineno) +
                             ": endpoint out of range");
        if (!seen.insert({u, v}).second)
            throw ParseError("graph file line " + std::to_string(lineno) + ": duplicate edge");
        edges.emplace_back("u" + std::to_string(u), "v" + std::to_string(v));
    }
    if (next_line())
        throw ParseError("graph file line " + std::to_string(lineno) +
                         ": trailing content after " + std::to_string(mm) + " edges");
    return BipartiteGraph::make(std::move(left), std::move(right), edges);
}

}  // namespace popmatch
