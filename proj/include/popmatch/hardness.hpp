#pragma once

// Counting matchings in a bipartite graph reduces to counting popular
// matchings: orient the graph's edges left to right with weight -1, give
// every left vertex u a private copy u' with a +1 edge u' -> u, and read the
// result as the switching graph of a capacitated instance.  Matchings of the
// graph then correspond exactly to switching sets (each matched edge lifts
// to the length-2 path u' -> u -> v), so both counts agree.

#include <gmpxx.h>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "popmatch/bipartite.hpp"
#include "popmatch/instance.hpp"
#include "popmatch/instance_io.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/switching.hpp"

namespace popmatch {

struct ReductionOutput {
    Instance instance;
    Matching base_matching;
    SwitchingGraph switching_graph;
    // original graph elements -> instance labels
    std::map<std::string, std::string> left_house;   // u  -> saturated house
    std::map<std::string, std::string> copy_house;   // u  -> its copy house
    std::map<std::string, std::string> right_house;  // v  -> one-free-slot house
    std::map<std::string, std::string> copy_agent;   // u  -> agent on the +1 edge
    std::map<std::pair<std::string, std::string>, std::string> edge_agent;
    std::vector<std::string> warnings;
};

// Instance layout: left vertex i becomes house u<i> with capacity deg(i)
// plus copy house u<i>_c with capacity 1; right vertex j becomes house v<j>
// with capacity 1.  Copy agent c<i> ranks [u<i>, u<i>_c], edge agent
// e<i>_<j> ranks [u<i>, v<j>].  The base matching parks every copy agent on
// its copy house and every edge agent on its left house, which saturates all
// u<i>/u<i>_c houses and leaves one slot free at each v<j>.
inline ReductionOutput reduce_matching_to_cha(const BipartiteGraph& g) {
    ReductionOutput out;

    std::vector<int> left_ids, right_ids;
    std::vector<int> rdeg((int)g.num_right(), 0);
    for (int u = 0; u < (int)g.num_left(); ++u) {
        if (g.neighbors(u).empty())
            out.warnings.push_back("isolated left vertex '" + g.left()[u] +
                                   "' dropped; it cannot affect the matching count");
        else
            left_ids.push_back(u);
        for (int v : g.neighbors(u)) ++rdeg[v];
    }
    for (int v = 0; v < (int)g.num_right(); ++v) {
        if (rdeg[v] == 0)
            out.warnings.push_back("isolated right vertex '" + g.right()[v] +
                                   "' dropped; it cannot affect the matching count");
        else
            right_ids.push_back(v);
    }
    if (left_ids.empty())
        throw ValidationError("the reduction needs a graph with at least one edge");

    std::map<int, int> lpos, rpos;  // graph index -> 1-based instance index
    for (std::size_t i = 0; i < left_ids.size(); ++i) lpos[left_ids[i]] = (int)i + 1;
    for (std::size_t j = 0; j < right_ids.size(); ++j) rpos[right_ids[j]] = (int)j + 1;

    std::vector<House> houses;
    std::vector<std::string> agents;
    std::map<std::string, PreferenceList> prefs;
    Matching base;

    for (int u : left_ids) {
        const std::string tag = std::to_string(lpos[u]);
        const std::string hu = "u" + tag;
        const std::string hc = "u" + tag + "_c";
        const std::string ca = "c" + tag;
        houses.push_back(House{hu, (int)g.neighbors(u).size()});
        houses.push_back(House{hc, 1});
        agents.push_back(ca);
        prefs[ca] = {{hu}, {hc}};
        base.assign(ca, hc);
        out.left_house[g.left()[u]] = hu;
        out.copy_house[g.left()[u]] = hc;
        out.copy_agent[g.left()[u]] = ca;

        for (int v : g.neighbors(u)) {
            const std::string hv = "v" + std::to_string(rpos[v]);
            const std::string ea = "e" + tag + "_" + std::to_string(rpos[v]);
            agents.push_back(ea);
            prefs[ea] = {{hu}, {hv}};
            base.assign(ea, hu);
            out.edge_agent[{g.left()[u], g.right()[v]}] = ea;
        }
    }
    for (int v : right_ids) {
        houses.push_back(House{"v" + std::to_string(rpos[v]), 1});
        out.right_house[g.right()[v]] = "v" + std::to_string(rpos[v]);
    }

    out.instance = Instance::make(Kind::CHA, std::move(agents), std::move(houses),
                                  std::move(prefs));
    out.base_matching = base;
    out.switching_graph = build_switching_graph(out.instance, out.base_matching);

    for (const auto& [edge, ea] : out.edge_agent) {
        SwitchingEdge want{ea, out.left_house.at(edge.first),
                           out.right_house.at(edge.second), -1};
        if (!(out.switching_graph.edge_of(ea) == want))
            throw Error("internal: reduction switching graph disagrees on agent '" + ea +
                        "'");
    }
    for (const auto& [u, ca] : out.copy_agent) {
        SwitchingEdge want{ca, out.copy_house.at(u), out.left_house.at(u), +1};
        if (!(out.switching_graph.edge_of(ca) == want))
            throw Error("internal: reduction switching graph disagrees on agent '" + ca +
                        "'");
    }
    return out;
}

struct CrossCheckReport {
    bool equal = false;
    bool degenerate = false;  // nothing left after dropping isolated vertices
    mpz_class matchings;      // matchings of the input graph, by enumeration
    mpz_class via_switching;  // popular matchings of the image, by switching sets
    mpz_class via_oracle;     // popular matchings of the image, by brute force
    std::vector<std::string> notes;
};

// Counts the graph's matchings directly and the image's popular matchings by
// two independent routes; any disagreement is reported with the instance
// attached so the case can be replayed.  Images of m-edge graphs put m plus
// n1 agents in front of the brute-force scan, so the state limit may need
// raising for graphs near the practical ceiling of ~12 edges.
inline CrossCheckReport cross_check(const BipartiteGraph& g,
                                    std::uint64_t oracle_limit = kDefaultOracleStateLimit) {
    CrossCheckReport rep;
    rep.matchings = count_all_matchings(g);

    if (g.num_edges() == 0) {
        rep.degenerate = true;
        rep.equal = true;
        rep.via_switching = rep.via_oracle = rep.matchings;
        rep.notes.push_back(
            "graph has no edges; only the empty matching exists and there is nothing to "
            "reduce");
        return rep;
    }

    ReductionOutput red = reduce_matching_to_cha(g);
    rep.notes = red.warnings;
    rep.via_switching = count_popular_cha(red.instance);
    rep.via_oracle = oracle_count_popular(add_last_resorts(red.instance), oracle_limit);
    rep.equal = rep.matchings == rep.via_switching && rep.matchings == rep.via_oracle;
    if (!rep.equal) {
        rep.notes.push_back("counts disagree: matchings=" + rep.matchings.get_str() +
                            " switching=" + rep.via_switching.get_str() +
                            " oracle=" + rep.via_oracle.get_str());
        rep.notes.push_back("offending instance: " + serialize_instance(red.instance));
    }
    return rep;
}

}  // namespace popmatch
