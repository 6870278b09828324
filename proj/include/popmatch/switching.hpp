#pragma once

// The switching graph of a popular matching M: one vertex per house, one
// directed edge per agent running from M(a) to the other of {f(a), s(a)},
// weighted -1 when the agent holds their first choice.  Reversing an
// edge-disjoint union of switching cycles (even alternating directed cycles)
// and switching paths (alternating, +1 first, -1 last, ending where a slot
// is free) turns one popular matching into another; every popular matching
// arises this way, which is what the counting routine exploits.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "popmatch/cha.hpp"
#include "popmatch/instance.hpp"

namespace popmatch {

struct SwitchingEdge {
    std::string agent;
    std::string from, to;
    int weight = 0;  // -1: holds first choice; +1: holds fallback

    bool operator==(const SwitchingEdge& o) const {
        return agent == o.agent && from == o.from && to == o.to && weight == o.weight;
    }
};

struct SwitchingGraph {
    Instance instance;
    Matching matching;
    FSLabelsCHA labels;
    std::vector<std::string> vertices;  // every house, sorted
    std::vector<SwitchingEdge> edges;   // one per agent, sorted by agent
    std::map<std::string, int> unsat;   // free slots per house

    const SwitchingEdge& edge_of(const std::string& agent) const {
        auto it = std::lower_bound(edges.begin(), edges.end(), agent,
                                   [](const SwitchingEdge& e, const std::string& a) {
                                       return e.agent < a;
                                   });
        if (it == edges.end() || it->agent != agent)
            throw ValidationError("no switching edge for agent '" + agent + "'");
        return *it;
    }
};

// paths and cycles are edge sequences in traversal order
struct SwitchingSet {
    std::vector<std::vector<SwitchingEdge>> paths;
    std::vector<std::vector<SwitchingEdge>> cycles;

    bool empty() const { return paths.empty() && cycles.empty(); }
    std::vector<std::string> agents() const {
        std::vector<std::string> out;
        for (const auto& p : paths)
            for (const auto& e : p) out.push_back(e.agent);
        for (const auto& c : cycles)
            for (const auto& e : c) out.push_back(e.agent);
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline SwitchingGraph build_switching_graph(const Instance& inst, const Matching& m) {
    ChaPopularity check = is_popular_cha(inst, m);
    if (!check.popular)
        throw ValidationError("switching graphs are defined for popular matchings only: " +
                              check.detail);
    SwitchingGraph sg;
    sg.instance = inst;
    sg.matching = m;
    sg.labels = compute_fs_cha(inst);
    std::map<std::string, int> load;
    for (const auto& h : inst.houses()) sg.vertices.push_back(h.id);
    for (const auto& a : inst.agents()) {
        const std::string& at = *m.house_of(a);
        const std::string& f = sg.labels.f.at(a);
        const std::string& s = sg.labels.s.at(a);
        sg.edges.push_back({a, at, at == f ? s : f, at == f ? -1 : +1});
        ++load[at];
    }
    for (const auto& h : inst.houses())
        sg.unsat[h.id] = h.capacity - (load.count(h.id) ? load[h.id] : 0);
    return sg;
}

struct SwitchingPropertyReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Structural facts about switching graphs of popular matchings: out-degree
// bounded by capacity; +1 edges end at full houses; a full house whose
// occupants all hold it as first choice admits no incoming -1 edge; a house
// receiving a +1 edge is occupied by first-choice holders only and receives
// no -1 edge.
inline SwitchingPropertyReport validate_switching_properties(const SwitchingGraph& sg) {
    SwitchingPropertyReport rep;
    auto flag = [&rep](const std::string& text) {
        rep.ok = false;
        rep.violations.push_back(text);
    };

    std::map<std::string, std::vector<const SwitchingEdge*>> out, in;
    for (const auto& e : sg.edges) {
        out[e.from].push_back(&e);
        in[e.to].push_back(&e);
    }

    for (const auto& h : sg.instance.houses()) {
        const auto& outs = out[h.id];
        const auto& ins = in[h.id];
        bool saturated = sg.unsat.at(h.id) == 0;
        bool all_out_minus = true;
        for (const auto* e : outs)
            if (e->weight != -1) all_out_minus = false;
        bool has_plus_in = false, has_minus_in = false;
        for (const auto* e : ins) (e->weight == 1 ? has_plus_in : has_minus_in) = true;

        if ((int)outs.size() > h.capacity)
            flag("P1: house '" + h.id + "' has " + std::to_string(outs.size()) +
                 " outgoing edges but capacity " + std::to_string(h.capacity));
        if (!saturated && has_plus_in)
            flag("P3: house '" + h.id + "' has a free slot yet receives a +1 edge");
        if (saturated && !outs.empty() && all_out_minus && has_minus_in)
            flag("P4: house '" + h.id +
                 "' is full of first-choice holders yet receives a -1 edge");
        if (has_plus_in && (!all_out_minus || has_minus_in))
            flag("P5: house '" + h.id +
                 "' receives a +1 edge but is not exclusively first-choice occupied");
    }
    return rep;
}

// The cross-matching invariant: for the same instance, every popular
// matching induces the same per-house count of -1 out-edges and +1 in-edges.
inline std::map<std::string, std::pair<int, int>> switching_signature(
    const SwitchingGraph& sg) {
    std::map<std::string, std::pair<int, int>> sig;
    for (const auto& h : sg.vertices) sig[h] = {0, 0};
    for (const auto& e : sg.edges) {
        if (e.weight == -1) ++sig[e.from].first;
        if (e.weight == +1) ++sig[e.to].second;
    }
    return sig;
}

namespace switching_detail {

struct Catalog {
    std::vector<std::vector<SwitchingEdge>> paths;   // alternating, +1 first, -1 last
    std::vector<std::vector<SwitchingEdge>> cycles;  // even alternating, canonical rotation
};

inline std::vector<std::string> agent_sequence(const std::vector<SwitchingEdge>& edges) {
    std::vector<std::string> seq;
    for (const auto& e : edges) seq.push_back(e.agent);
    return seq;
}

inline Catalog catalog_structures(const SwitchingGraph& sg) {
    Catalog cat;
    std::map<std::string, std::vector<const SwitchingEdge*>> out;
    for (const auto& e : sg.edges) out[e.from].push_back(&e);
    for (auto& [h, v] : out)
        std::sort(v.begin(), v.end(), [](const SwitchingEdge* a, const SwitchingEdge* b) {
            return a->agent < b->agent;
        });

    std::set<std::vector<std::string>> seen_cycles;  // by canonical agent rotation
    std::vector<SwitchingEdge> walk;
    std::set<std::string> on_walk;

    auto canonical_cycle = [](std::vector<SwitchingEdge> c) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i].agent < c[best].agent) best = i;
        std::rotate(c.begin(), c.begin() + (std::ptrdiff_t)best, c.end());
        return c;
    };

    // depth-first over alternating walks; record switching paths at every
    // -1 edge reaching a house with a free slot, and cycles on closure
    auto extend = [&](auto&& self, const std::string& start, const std::string& at) -> void {
        auto it = out.find(at);
        if (it == out.end()) return;
        for (const SwitchingEdge* e : it->second) {
            if (!walk.empty() && e->weight == walk.back().weight) continue;
            if (e->to == start && !walk.empty()) {
                if (walk.size() % 2 == 1 && e->weight != walk.front().weight) {
                    std::vector<SwitchingEdge> cyc = walk;
                    cyc.push_back(*e);
                    cyc = canonical_cycle(cyc);
                    if (seen_cycles.insert(agent_sequence(cyc)).second)
                        cat.cycles.push_back(cyc);
                }
                continue;
            }
            if (on_walk.count(e->to)) continue;
            walk.push_back(*e);
            on_walk.insert(e->to);
            if (walk.front().weight == +1 && e->weight == -1 && sg.unsat.at(e->to) > 0)
                cat.paths.push_back(walk);
            self(self, start, e->to);
            on_walk.erase(e->to);
            walk.pop_back();
        }
    };

    for (const auto& h : sg.vertices) {
        walk.clear();
        on_walk.clear();
        on_walk.insert(h);
        extend(extend, h, h);
    }
    return cat;
}

}  // namespace switching_detail

// Every switching set exactly once (two structure selections covering the
// same agents describe the same move, so sets are identified by their edge
// sets), in lexicographic order of their sorted agent lists; the empty set
// comes first.
inline std::vector<SwitchingSet> enumerate_switching_sets(const SwitchingGraph& sg) {
    switching_detail::Catalog cat = switching_detail::catalog_structures(sg);

    std::map<std::vector<std::string>, SwitchingSet> found;
    SwitchingSet current;
    std::set<std::string> used;
    std::map<std::string, int> ends;

    found.emplace(std::vector<std::string>{}, SwitchingSet{});

    auto disjoint = [&used](const std::vector<SwitchingEdge>& edges) {
        for (const auto& e : edges)
            if (used.count(e.agent)) return false;
        return true;
    };
    auto take = [&used](const std::vector<SwitchingEdge>& edges) {
        for (const auto& e : edges) used.insert(e.agent);
    };
    auto drop = [&used](const std::vector<SwitchingEdge>& edges) {
        for (const auto& e : edges) used.erase(e.agent);
    };

    auto record = [&] { found.emplace(current.agents(), current); };

    auto pick_paths = [&](auto&& self, std::size_t from) -> void {
        for (std::size_t i = from; i < cat.paths.size(); ++i) {
            const auto& p = cat.paths[i];
            const std::string& end = p.back().to;
            if (ends[end] + 1 > sg.unsat.at(end)) continue;
            if (!disjoint(p)) continue;
            take(p);
            ++ends[end];
            current.paths.push_back(p);
            record();
            self(self, i + 1);
            current.paths.pop_back();
            --ends[end];
            drop(p);
        }
    };
    auto pick_cycles = [&](auto&& self, std::size_t from) -> void {
        pick_paths(pick_paths, 0);
        for (std::size_t i = from; i < cat.cycles.size(); ++i) {
            const auto& c = cat.cycles[i];
            if (!disjoint(c)) continue;
            take(c);
            current.cycles.push_back(c);
            record();
            self(self, i + 1);
            current.cycles.pop_back();
            drop(c);
        }
    };
    pick_cycles(pick_cycles, 0);

    std::vector<SwitchingSet> out;
    for (auto& [key, s] : found) out.push_back(std::move(s));
    return out;
}

namespace switching_detail {

inline void check_alternating(const std::vector<SwitchingEdge>& edges, bool closed) {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (edges[i].to != edges[i + 1].from)
            throw ValidationError("switching structure is not a directed walk");
        if (edges[i].weight == edges[i + 1].weight)
            throw ValidationError("switching structure does not alternate weights");
    }
    if (closed) {
        if (edges.size() < 2 || edges.back().to != edges.front().from)
            throw ValidationError("switching cycle does not close");
        if (edges.size() % 2 != 0)
            throw ValidationError("switching cycle has odd length");
    } else {
        if (edges.empty()) throw ValidationError("switching path is empty");
        if (edges.front().weight != +1)
            throw ValidationError("switching path must start with a +1 edge");
        if (edges.back().weight != -1)
            throw ValidationError("switching path must end with a -1 edge");
    }
}

inline void check_set_against_graph(const SwitchingGraph& sg, const SwitchingSet& s) {
    std::set<std::string> used;
    auto check_edges = [&](const std::vector<SwitchingEdge>& edges) {
        for (const auto& e : edges) {
            if (!(sg.edge_of(e.agent) == e))
                throw ValidationError("edge for agent '" + e.agent +
                                      "' does not belong to this switching graph");
            if (!used.insert(e.agent).second)
                throw ValidationError("switching set reuses the edge of agent '" + e.agent +
                                      "'");
        }
    };
    std::map<std::string, int> ends;
    for (const auto& p : s.paths) {
        check_edges(p);
        check_alternating(p, false);
        ++ends[p.back().to];
    }
    for (const auto& c : s.cycles) {
        check_edges(c);
        check_alternating(c, true);
    }
    for (const auto& [h, k] : ends)
        if (k > sg.unsat.at(h))
            throw ValidationError("house '" + h + "' lacks the free slots for " +
                                  std::to_string(k) + " switching paths to end there");
}

}  // namespace switching_detail

// Matching after reversing the edges of S: exactly the agents on S swap to
// the other of {f(a), s(a)}.
inline Matching switched_matching(const SwitchingGraph& sg, const SwitchingSet& s) {
    switching_detail::check_set_against_graph(sg, s);
    Matching m = sg.matching;
    auto flip = [&](const std::vector<SwitchingEdge>& edges) {
        for (const auto& e : edges) {
            m.unassign(e.agent);
            m.assign(e.agent, e.to);
        }
    };
    for (const auto& p : s.paths) flip(p);
    for (const auto& c : s.cycles) flip(c);
    return m;
}

inline std::pair<SwitchingGraph, Matching> apply_switching_move(const SwitchingGraph& sg,
                                                                const SwitchingSet& s) {
    Matching m = switched_matching(sg, s);
    SwitchingGraph next = build_switching_graph(sg.instance, m);
    return {std::move(next), std::move(m)};
}

// The difference of two popular matchings of one instance, decomposed into a
// switching set of the first graph: directed cycles are peeled first, then
// longest alternating paths, lexicographically least agent sequence breaking
// ties.
inline SwitchingSet decompose_difference(const SwitchingGraph& sgM,
                                         const SwitchingGraph& sgM2) {
    if (!(sgM.instance == sgM2.instance))
        throw ValidationError(
            "switching graphs describe different instances, so their difference is "
            "undefined");

    std::vector<SwitchingEdge> remaining;
    for (const auto& e : sgM.edges)
        if (!(sgM2.edge_of(e.agent) == e)) remaining.push_back(e);

    SwitchingSet out;

    auto remove_edges = [&remaining](const std::vector<SwitchingEdge>& edges) {
        for (const auto& e : edges)
            remaining.erase(std::find(remaining.begin(), remaining.end(), e));
    };

    // all simple alternating walks over `remaining`; closed even ones when
    // `cycles`, otherwise every switching-path candidate, via `offer`
    auto explore = [&remaining, &sgM](bool cycles, auto&& offer) {
        std::vector<SwitchingEdge> walk;
        std::set<std::string> on_walk;
        auto extend = [&](auto&& self, const std::string& start,
                          const std::string& at) -> void {
            for (const auto& e : remaining) {
                if (e.from != at) continue;
                if (!walk.empty() && e.weight == walk.back().weight) continue;
                if (e.to == start && !walk.empty()) {
                    if (cycles && walk.size() % 2 == 1 &&
                        e.weight != walk.front().weight) {
                        walk.push_back(e);
                        offer(walk);
                        walk.pop_back();
                    }
                    continue;
                }
                if (on_walk.count(e.to)) continue;
                walk.push_back(e);
                on_walk.insert(e.to);
                if (!cycles && walk.front().weight == +1 && e.weight == -1 &&
                    sgM.unsat.at(e.to) > 0)
                    offer(walk);
                self(self, start, e.to);
                on_walk.erase(e.to);
                walk.pop_back();
            }
        };
        std::set<std::string> starts;
        for (const auto& e : remaining) starts.insert(e.from);
        for (const auto& h : starts) {
            walk.clear();
            on_walk.clear();
            on_walk.insert(h);
            extend(extend, h, h);
        }
    };

    // peel directed cycles until none are left
    for (;;) {
        std::optional<std::vector<SwitchingEdge>> best;
        explore(true, [&](const std::vector<SwitchingEdge>& cyc) {
            std::size_t least = 0;
            for (std::size_t i = 1; i < cyc.size(); ++i)
                if (cyc[i].agent < cyc[least].agent) least = i;
            std::vector<SwitchingEdge> canon(cyc.begin() + (std::ptrdiff_t)least, cyc.end());
            canon.insert(canon.end(), cyc.begin(), cyc.begin() + (std::ptrdiff_t)least);
            if (!best || switching_detail::agent_sequence(canon) <
                             switching_detail::agent_sequence(*best))
                best = canon;
        });
        if (!best) break;
        switching_detail::check_alternating(*best, true);
        out.cycles.push_back(*best);
        remove_edges(*best);
    }

    // the rest is acyclic; extract longest paths
    while (!remaining.empty()) {
        std::vector<SwitchingEdge> best;
        explore(false, [&](const std::vector<SwitchingEdge>& path) {
            if (path.size() > best.size() ||
                (path.size() == best.size() &&
                 switching_detail::agent_sequence(path) <
                     switching_detail::agent_sequence(best)))
                best = path;
        });
        if (best.empty())
            throw Error("internal: leftover difference edges admit no path");
        switching_detail::check_alternating(best, false);
        if (sgM.unsat.at(best.back().to) <= 0)
            throw Error("internal: difference path ends at a full house");
        out.paths.push_back(best);
        remove_edges(best);
    }

    switching_detail::check_set_against_graph(sgM, out);
    if (!(switched_matching(sgM, out) == sgM2.matching))
        throw Error("internal: difference decomposition does not reproduce the target");
    return out;
}

// Popular matchings counted as distinct matchings reachable by switching
// moves from one of them.
inline mpz_class count_popular_cha(const Instance& inst) {
    std::optional<Matching> m0 = find_popular_cha(inst);
    if (!m0) return 0;
    SwitchingGraph sg = build_switching_graph(inst, *m0);
    std::set<Matching> seen;
    for (const SwitchingSet& s : enumerate_switching_sets(sg))
        seen.insert(switched_matching(sg, s));
    return mpz_class((unsigned long)seen.size());
}

}  // namespace popmatch
