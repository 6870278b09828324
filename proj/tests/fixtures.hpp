#pragma once

// Small canonical instances used across the suite.

#include "popmatch/bipartite.hpp"
#include "popmatch/instance.hpp"

namespace fixtures {

using popmatch::BipartiteGraph;
using popmatch::House;
using popmatch::Instance;
using popmatch::Kind;

// Two agents, two unit houses, both prefer h1 over h2.
inline Instance fix_a() {
    return Instance::make(Kind::HA, {"a1", "a2"}, {House{"h1", 1}, House{"h2", 1}},
                          {{"a1", {{"h1"}, {"h2"}}}, {"a2", {{"h1"}, {"h2"}}}});
}

// Two agents, both indifferent between h1 and h2.
inline Instance fix_b() {
    return Instance::make(Kind::HAT, {"a1", "a2"}, {House{"h1", 1}, House{"h2", 1}},
                          {{"a1", {{"h1", "h2"}}}, {"a2", {{"h1", "h2"}}}});
}

// Capacities: h1 holds two agents, h2 one; both agents rank h1 first.
inline Instance fix_c() {
    return Instance::make(Kind::CHA, {"a1", "a2"}, {House{"h1", 2}, House{"h2", 1}},
                          {{"a1", {{"h1"}, {"h2"}}}, {"a2", {{"h1"}, {"h2"}}}});
}

// One edge u1-v1.
inline BipartiteGraph fix_d() {
    return BipartiteGraph::make({"u1"}, {"v1"}, {{"u1", "v1"}});
}

// One agent, one house.
inline Instance fix_e() {
    return Instance::make(Kind::HA, {"a1"}, {House{"h1", 1}}, {{"a1", {{"h1"}}}});
}

inline BipartiteGraph complete_bipartite(int n1, int n2) {
    std::vector<std::string> left, right;
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 1; i <= n1; ++i) left.push_back("u" + std::to_string(i));
    for (int j = 1; j <= n2; ++j) right.push_back("v" + std::to_string(j));
    for (const auto& u : left)
        for (const auto& v : right) edges.emplace_back(u, v);
    return BipartiteGraph::make(left, right, edges);
}

}  // namespace fixtures
