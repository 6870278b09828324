#pragma once

// Popularity for strict-preference instances with house capacities.  For a
// house h, f(h) is the set of agents whose first choice is h.  A matching M
// is popular iff
//   (1) every f-house h holds exactly min(c(h), |f(h)|) agents of f(h); when
//       f(h) fits, all of f(h) lives at h, otherwise h is filled by f(h)
//       agents only, and
//   (2) every agent is matched, to f(a) or to s(a),
// where s(a) is a's best house that is either nobody's first choice or an
// under-subscribed first-choice house other than f(a).  Instances are
// expected to carry last-resort houses (otherwise s(a) may not exist);
// compute_fs_cha reports the offending agent when it does not.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "popmatch/bipartite.hpp"
#include "popmatch/instance.hpp"

namespace popmatch {

struct FSLabelsCHA {
    std::map<std::string, std::string> f, s;                    // per agent
    std::map<std::string, std::vector<std::string>> f_agents;   // house -> f(h)
    std::set<std::string> f_houses;
};

inline FSLabelsCHA compute_fs_cha(const Instance& inst) {
    for (const auto& a : inst.agents())
        for (const auto& group : inst.preferences(a))
            if (group.size() > 1)
                throw ValidationError("capacitated popularity analysis needs strict "
                                      "preferences; agent '" + a + "' has a tie");
    FSLabelsCHA out;
    for (const auto& a : inst.agents()) {
        const std::string& top = inst.preferences(a).front().front();
        out.f[a] = top;
        out.f_agents[top].push_back(a);
        out.f_houses.insert(top);
    }
    for (const auto& a : inst.agents()) {
        const std::string& fa = out.f.at(a);
        const std::string* pick = nullptr;
        for (const auto& group : inst.preferences(a)) {
            const std::string& h = group.front();
            bool fh = out.f_houses.count(h) != 0;
            if (!fh || (h != fa &&
                        out.f_agents.at(h).size() < (std::size_t)inst.house(h).capacity)) {
                pick = &h;
                break;
            }
        }
        if (!pick)
            throw ValidationError("agent '" + a +
                                  "' has no fallback house; add last-resort houses");
        out.s[a] = *pick;
    }
    return out;
}

struct ChaPopularity {
    bool popular = false;
    int failed_condition = 0;  // 1 = first-choice quota broken; 2 = agent misplaced
    std::string witness;       // house (condition 1) or agent (condition 2)
    std::string detail;
};

inline ChaPopularity is_popular_cha(const Instance& inst, const Matching& m) {
    validate_matching(inst, m);
    FSLabelsCHA labels = compute_fs_cha(inst);

    std::map<std::string, std::vector<std::string>> occupants;
    for (const auto& [a, h] : m) occupants[h].push_back(a);

    for (const auto& [h, fans] : labels.f_agents) {
        std::size_t quota = std::min(fans.size(), (std::size_t)inst.house(h).capacity);
        std::size_t got = 0;
        auto it = occupants.find(h);
        if (it != occupants.end())
            for (const auto& a : it->second)
                if (labels.f.at(a) == h) ++got;
        if (got != quota)
            return {false, 1, h,
                    "house '" + h + "' holds " + std::to_string(got) +
                        " of its first-choice agents but needs " + std::to_string(quota)};
    }

    for (const auto& a : inst.agents()) {
        auto h = m.house_of(a);
        if (!h) return {false, 2, a, "agent '" + a + "' is unmatched"};
        if (*h != labels.f.at(a) && *h != labels.s.at(a))
            return {false, 2, a,
                    "agent '" + a + "' is matched to '" + *h +
                        "', which is neither their first choice nor their fallback"};
    }
    return {true, 0, "", ""};
}

// Builds a popular matching or reports that none exists.  First-choice
// houses with room take all their fans outright; the remaining agents are
// matched to their (full) first choice or their fallback by augmenting
// paths, and finally any over-demanded house left with spare room pulls its
// fans back from their fallbacks until it is exactly full.
inline std::optional<Matching> find_popular_cha(const Instance& inst) {
    FSLabelsCHA labels = compute_fs_cha(inst);

    Matching m;
    std::map<std::string, int> used;  // occupancy so far
    std::vector<std::string> contested;
    for (const auto& a : inst.agents()) {
        const std::string& fa = labels.f.at(a);
        if (labels.f_agents.at(fa).size() <= (std::size_t)inst.house(fa).capacity) {
            m.assign(a, fa);
            ++used[fa];
        } else {
            contested.push_back(a);
        }
    }

    if (!contested.empty()) {
        // expand each reachable house into one vertex per free slot
        std::vector<std::string> slot_house;
        std::map<std::string, int> first_slot, slot_count;
        auto add_slots = [&](const std::string& h, int count) {
            if (first_slot.count(h)) return;
            count = std::min<int>(count, (int)contested.size());
            first_slot[h] = (int)slot_house.size();
            slot_count[h] = count;
            for (int k = 0; k < count; ++k) slot_house.push_back(h);
        };
        for (const auto& a : contested) {
            add_slots(labels.f.at(a), inst.house(labels.f.at(a)).capacity);
            const std::string& sa = labels.s.at(a);
            add_slots(sa, inst.house(sa).capacity - (used.count(sa) ? used[sa] : 0));
        }
        std::vector<std::string> slots;
        for (std::size_t i = 0; i < slot_house.size(); ++i)
            slots.push_back("slot" + std::to_string(i));
        std::vector<std::pair<std::string, std::string>> edges;
        for (const auto& a : contested)
            for (const auto& h : {labels.f.at(a), labels.s.at(a)})
                for (int k = 0; k < slot_count.at(h); ++k)
                    edges.emplace_back(a, slots[(std::size_t)(first_slot.at(h) + k)]);
        BipartiteGraph g = BipartiteGraph::make(contested, slots, edges);
        BipartiteMatching bm = max_matching(g);
        if (bm.size() < contested.size()) return std::nullopt;
        for (std::size_t u = 0; u < g.num_left(); ++u) {
            int slot_index = std::stoi(g.right()[bm.left_to_right[u]].substr(4));
            const std::string& h = slot_house[(std::size_t)slot_index];
            m.assign(g.left()[u], h);
            ++used[h];
        }
    }

    // pull fans of over-demanded houses back from fallbacks until exactly full
    for (const auto& [h, fans] : labels.f_agents) {
        if (fans.size() <= (std::size_t)inst.house(h).capacity) continue;
        for (const auto& a : fans) {
            if (used[h] >= inst.house(h).capacity) break;
            if (*m.house_of(a) == h) continue;
            --used[*m.house_of(a)];
            m.unassign(a);
            m.assign(a, h);
            ++used[h];
        }
    }

    ChaPopularity check = is_popular_cha(inst, m);
    if (!check.popular)
        throw Error("internal: constructed matching failed the popularity check: " +
                    check.detail);
    return m;
}

}  // namespace popmatch
