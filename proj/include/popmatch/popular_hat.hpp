#pragma once

// Popularity for unit-capacity instances (HA and HAT), via the first-choice
// graph decomposition.  A matching M is popular iff
//   (1) M restricted to rank-1 edges is a maximum matching of the
//       first-choice graph, and
//   (2) every agent is matched, to a house in f(a) or s(a),
// where f(a) is a's top tie group and s(a) is a's most preferred set of Even
// houses.  Instances are expected to carry last-resort houses so that (2) is
// satisfiable for every agent.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "popmatch/bipartite.hpp"
#include "popmatch/instance.hpp"

namespace popmatch {

enum class EvenHouseClass {
    FirstChoiceOnly,   // an f-house that is nobody's s-house
    FirstAndSecond,    // both an f-house and an s-house
    SecondChoiceOnly,  // an s-house that is nobody's f-house
    Neither,           // irrelevant for popular matchings
};

struct FSLabelsHAT {
    BipartiteGraph g1;
    BipartiteMatching m1;  // some maximum matching of g1
    GEDecomposition ge;
    std::map<std::string, std::vector<std::string>> f;  // agent -> top tie group
    std::map<std::string, std::vector<std::string>> s;  // agent -> best Even houses
    std::map<std::string, std::vector<std::string>> f_agents;  // house -> agents with h in f(a)
    std::set<std::string> f_houses, s_houses;
    std::map<std::string, EvenHouseClass> even_partition;  // Even houses only

    GELabel agent_label(const std::string& a) const { return ge.left[*g1.left_index(a)]; }
    GELabel house_label(const std::string& h) const { return ge.right[*g1.right_index(h)]; }
};

// Requires that every agent has at least one Even house on their list, which
// last-resort augmentation guarantees.
inline FSLabelsHAT compute_fs_hat(const Instance& inst) {
    if (inst.kind() == Kind::CHA)
        throw ValidationError("compute_fs_hat expects an HA or HAT instance");
    FSLabelsHAT out;
    out.g1 = first_choice_graph(inst);
    out.m1 = max_matching(out.g1);
    out.ge = gallai_edmonds(out.g1, out.m1);

    for (const auto& a : inst.agents()) {
        const auto& top = inst.preferences(a).front();
        out.f[a] = top;
        for (const auto& h : top) {
            out.f_agents[h].push_back(a);
            out.f_houses.insert(h);
        }
    }
    for (const auto& a : inst.agents()) {
        std::vector<std::string> best_even;
        for (const auto& group : inst.preferences(a)) {
            for (const auto& h : group)
                if (out.house_label(h) == GELabel::Even) best_even.push_back(h);
            if (!best_even.empty()) break;
        }
        if (best_even.empty())
            throw ValidationError("agent '" + a +
                                  "' has no Even house on their list; add last-resort houses");
        for (const auto& h : best_even) out.s_houses.insert(h);
        out.s[a] = std::move(best_even);
    }
    for (const auto& h : inst.houses()) {
        if (out.house_label(h.id) != GELabel::Even) continue;
        bool fh = out.f_houses.count(h.id) != 0;
        bool sh = out.s_houses.count(h.id) != 0;
        out.even_partition[h.id] =
            fh ? (sh ? EvenHouseClass::FirstAndSecond : EvenHouseClass::FirstChoiceOnly)
               : (sh ? EvenHouseClass::SecondChoiceOnly : EvenHouseClass::Neither);
    }
    return out;
}

struct HatPopularity {
    bool popular = false;
    // 0 when popular; 1 = rank-1 restriction not maximum; 2 = an agent is
    // unmatched or matched outside f(a) and s(a)
    int failed_condition = 0;
    std::string witness;  // agent or house label pinning the failure
    std::string detail;
};

inline HatPopularity is_popular_hat(const Instance& inst, const Matching& m) {
    if (!inst.has_last_resorts())
        throw ValidationError("is_popular_hat expects an instance with last-resort houses");
    validate_matching(inst, m);
    FSLabelsHAT labels = compute_fs_hat(inst);

    // condition (1): rank-1 restriction must be a maximum matching of g1
    std::size_t rank1 = 0;
    std::vector<int> l2r(labels.g1.num_left(), -1), r2l(labels.g1.num_right(), -1);
    for (const auto& [a, h] : m) {
        if (*inst.rank_of(a, h) == 0) {
            ++rank1;
            int ai = *labels.g1.left_index(a), hi = *labels.g1.right_index(h);
            l2r[ai] = hi;
            r2l[hi] = ai;
        }
    }
    if (rank1 < labels.ge.matching_size) {
        // witness: an exposed house reachable by an alternating path from an
        // exposed agent, i.e. the far end of an augmenting path
        std::deque<int> queue;
        std::vector<bool> seen_l(labels.g1.num_left(), false),
            seen_r(labels.g1.num_right(), false);
        for (std::size_t u = 0; u < labels.g1.num_left(); ++u)
            if (l2r[u] == -1) {
                seen_l[u] = true;
                queue.push_back((int)u);
            }
        std::string witness_house;
        while (!queue.empty() && witness_house.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : labels.g1.neighbors(u)) {
                if (seen_r[v]) continue;
                seen_r[v] = true;
                if (r2l[v] == -1) {
                    witness_house = labels.g1.right()[v];
                    break;
                }
                if (!seen_l[r2l[v]]) {
                    seen_l[r2l[v]] = true;
                    queue.push_back(r2l[v]);
                }
            }
        }
        return {false, 1, witness_house,
                "rank-1 restriction has size " + std::to_string(rank1) +
                    " but maximum is " + std::to_string(labels.ge.matching_size) +
                    (witness_house.empty() ? ""
                                           : "; house '" + witness_house + "' stays exposed")};
    }

    // condition (2): agent-complete within f(a) and s(a)
    for (const auto& a : inst.agents()) {
        auto h = m.house_of(a);
        if (!h)
            return {false, 2, a, "agent '" + a + "' is unmatched"};
        const auto& f = labels.f.at(a);
        const auto& s = labels.s.at(a);
        bool in_f = std::find(f.begin(), f.end(), *h) != f.end();
        bool in_s = std::find(s.begin(), s.end(), *h) != s.end();
        if (!in_f && !in_s)
            return {false, 2, a,
                    "agent '" + a + "' is matched to '" + *h +
                        "', outside their first and second choice sets"};
    }
    return {true, 0, "", ""};
}

// Builds a popular matching or reports that none exists.  Seeds with a
// maximum matching of the first-choice graph and augments inside the graph
// of edges popular matchings may use; augmentation keeps matched vertices
// matched, so condition (1) survives and only exposed agents gain partners.
inline std::optional<Matching> find_popular_hat(const Instance& inst) {
    if (!inst.has_last_resorts())
        throw ValidationError("find_popular_hat expects an instance with last-resort houses");
    FSLabelsHAT labels = compute_fs_hat(inst);
    const BipartiteGraph& g1 = labels.g1;

    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& a : inst.agents()) {
        GELabel la = labels.agent_label(a);
        for (const auto& h : labels.f.at(a)) {
            GELabel lh = labels.house_label(h);
            // keep exactly the rank-1 edges some maximum matching of g1 uses
            bool usable = (la == GELabel::Unreachable && lh == GELabel::Unreachable) ||
                          (la == GELabel::Odd && lh == GELabel::Even) ||
                          (la == GELabel::Even && lh == GELabel::Odd);
            if (usable) edges.emplace_back(a, h);
        }
        if (la == GELabel::Even)
            for (const auto& h : labels.s.at(a)) edges.emplace_back(a, h);
    }
    std::vector<std::string> houses;
    for (const auto& h : inst.houses()) houses.push_back(h.id);
    BipartiteGraph usable = BipartiteGraph::make(inst.agents(), houses, edges);

    // m1 uses only usable edges, so it transfers verbatim
    BipartiteMatching seed;
    seed.left_to_right.assign(usable.num_left(), -1);
    seed.right_to_left.assign(usable.num_right(), -1);
    for (std::size_t u = 0; u < g1.num_left(); ++u) {
        int v = labels.m1.left_to_right[u];
        if (v == -1) continue;
        int uu = *usable.left_index(g1.left()[u]);
        int vv = *usable.right_index(g1.right()[v]);
        if (!usable.has_edge(uu, vv))
            throw Error("internal: maximum matching uses an unusable rank-1 edge");
        seed.left_to_right[uu] = vv;
        seed.right_to_left[vv] = uu;
    }
    BipartiteMatching full = max_matching(usable, seed);
    if (full.size() < inst.num_agents()) return std::nullopt;

    Matching m;
    for (std::size_t u = 0; u < usable.num_left(); ++u)
        m.assign(usable.left()[u], usable.right()[full.left_to_right[u]]);
    HatPopularity check = is_popular_hat(inst, m);
    if (!check.popular)
        throw Error("internal: constructed matching failed the popularity check: " +
                    check.detail);
    return m;
}

}  // namespace popmatch
