#include <catch2/catch_amalgamated.hpp>

#include "popmatch/bipartite.hpp"

#include "fixtures.hpp"
#include "generators.hpp"

using namespace popmatch;
using fixtures::complete_bipartite;
using fixtures::fix_a;
using fixtures::fix_b;
using fixtures::fix_d;

namespace {

// Exhaustive maximum-matching size, for cross-checking the fast matcher.
std::size_t brute_max_matching_size(const BipartiteGraph& g) {
    std::size_t best = 0;
    std::vector<bool> used(g.num_right(), false);
    auto rec = [&](auto&& self, int u, std::size_t size) -> void {
        if (u == (int)g.num_left()) {
            best = std::max(best, size);
            return;
        }
        self(self, u + 1, size);
        for (int v : g.neighbors(u)) {
            if (used[v]) continue;
            used[v] = true;
            self(self, u + 1, size + 1);
            used[v] = false;
        }
    };
    rec(rec, 0, 0);
    return best;
}

GELabel left_label(const BipartiteGraph& g, const GEDecomposition& d, const std::string& v) {
    return d.left[*g.left_index(v)];
}
GELabel right_label(const BipartiteGraph& g, const GEDecomposition& d, const std::string& v) {
    return d.right[*g.right_index(v)];
}

}  // namespace

TEST_CASE("maximum matching sizes on the canonical graphs") {
    CHECK(max_matching(fix_d()).size() == 1);
    CHECK(max_matching(first_choice_graph(fix_a())).size() == 1);
    CHECK(max_matching(complete_bipartite(3, 3)).size() == 3);
}

TEST_CASE("decomposition of the first-choice graph of fix_a") {
    BipartiteGraph g1 = first_choice_graph(fix_a());
    auto m = max_matching(g1);
    auto d = gallai_edmonds(g1, m);
    CHECK(left_label(g1, d, "a1") == GELabel::Even);
    CHECK(left_label(g1, d, "a2") == GELabel::Even);
    CHECK(right_label(g1, d, "h1") == GELabel::Odd);
    CHECK(right_label(g1, d, "h2") == GELabel::Even);  // isolated houses are Even
}

TEST_CASE("decomposition of a perfectly matched edge") {
    BipartiteGraph g = fix_d();
    auto m = max_matching(g);
    REQUIRE(m.size() == 1);
    auto d = gallai_edmonds(g, m);
    CHECK(left_label(g, d, "u1") == GELabel::Unreachable);
    CHECK(right_label(g, d, "v1") == GELabel::Unreachable);
}

TEST_CASE("decomposition is independent of the maximum matching chosen") {
    BipartiteGraph g1 = first_choice_graph(fix_b());  // complete 2x2
    auto m = max_matching(g1);
    REQUIRE(m.size() == 2);
    auto d = gallai_edmonds(g1, m);
    for (auto l : d.left) CHECK(l == GELabel::Unreachable);
    for (auto l : d.right) CHECK(l == GELabel::Unreachable);

    // the other perfect matching gives the same labels
    BipartiteMatching swapped;
    swapped.left_to_right = {1, 0};
    swapped.right_to_left = {1, 0};
    auto d2 = gallai_edmonds(g1, swapped);
    CHECK(d2.left == d.left);
    CHECK(d2.right == d.right);
}

TEST_CASE("gallai_edmonds rejects non-maximum matchings") {
    BipartiteGraph g1 = first_choice_graph(fix_a());
    BipartiteMatching empty;
    empty.left_to_right = {-1, -1};
    empty.right_to_left = {-1, -1};
    CHECK_THROWS_AS(gallai_edmonds(g1, empty), ValidationError);
}

TEST_CASE("first_choice_graph keeps every house as a vertex") {
    BipartiteGraph g1 = first_choice_graph(fix_a());
    CHECK(g1.num_left() == 2);
    CHECK(g1.num_right() == 2);
    CHECK(g1.edge_labels() ==
          std::vector<std::pair<std::string, std::string>>{{"a1", "h1"}, {"a2", "h1"}});
}

TEST_CASE("edge list parsing") {
    BipartiteGraph g = parse_bipartite_edge_list("1 1 1\n1 1\n");
    CHECK(g.num_left() == 1);
    CHECK(g.num_right() == 1);
    CHECK(g.edge_labels() ==
          std::vector<std::pair<std::string, std::string>>{{"u1", "v1"}});

    BipartiteGraph p = parse_bipartite_edge_list("2 1 2\n# comment\n1 1\n2 1\n");
    CHECK(p.num_edges() == 2);

    CHECK_THROWS_AS(parse_bipartite_edge_list(""), ParseError);
    CHECK_THROWS_AS(parse_bipartite_edge_list("1 1\n"), ParseError);
    CHECK_THROWS_AS(parse_bipartite_edge_list("1 1 1\n1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_bipartite_edge_list("1 1 2\n1 1\n1 1\n"), ParseError);
    CHECK_THROWS_AS(parse_bipartite_edge_list("1 1 1\n1 1\n1 1\n"), ParseError);
}

TEST_CASE("property: matcher agrees with brute force and decomposition invariants hold") {
    gen::Rng rng(777001);
    for (int iter = 0; iter < 120; ++iter) {
        int n1 = gen::uniform_int(rng, 1, 5), n2 = gen::uniform_int(rng, 1, 5);
        int m = gen::uniform_int(rng, 0, n1 * n2);
        BipartiteGraph g = gen::random_bipartite(rng, n1, n2, m);
        auto mm = max_matching(g);
        CHECK(mm.size() == brute_max_matching_size(g));

        auto d = gallai_edmonds(g, mm);
        CHECK(mm.size() == d.count(GELabel::Odd) + d.count(GELabel::Unreachable) / 2);

        // no edge joins an Even vertex with an Unreachable one
        for (std::size_t u = 0; u < g.num_left(); ++u)
            for (int v : g.neighbors((int)u)) {
                bool eu = d.left[u] == GELabel::Even && d.right[v] == GELabel::Unreachable;
                bool ue = d.left[u] == GELabel::Unreachable && d.right[v] == GELabel::Even;
                CHECK_FALSE(eu);
                CHECK_FALSE(ue);
            }

        // Odd vertices are matched to Even ones, Unreachable within Unreachable
        for (std::size_t u = 0; u < g.num_left(); ++u) {
            int v = mm.left_to_right[u];
            if (d.left[u] == GELabel::Odd) {
                REQUIRE(v != -1);
                CHECK(d.right[v] == GELabel::Even);
            }
            if (d.left[u] == GELabel::Unreachable) {
                REQUIRE(v != -1);
                CHECK(d.right[v] == GELabel::Unreachable);
            }
        }
        for (std::size_t v = 0; v < g.num_right(); ++v) {
            int u = mm.right_to_left[v];
            if (d.right[v] == GELabel::Odd) {
                REQUIRE(u != -1);
                CHECK(d.left[u] == GELabel::Even);
            }
            if (d.right[v] == GELabel::Unreachable) {
                REQUIRE(u != -1);
                CHECK(d.left[u] == GELabel::Unreachable);
            }
        }
    }
}

TEST_CASE("property: labels are invariant under relabeling round trips") {
    // Computing on a relabeled copy and mapping back must reproduce the
    // labels, which also exercises independence from adjacency order.
    gen::Rng rng(424242);
    for (int iter = 0; iter < 40; ++iter) {
        int n1 = gen::uniform_int(rng, 1, 5), n2 = gen::uniform_int(rng, 1, 5);
        int m = gen::uniform_int(rng, 0, n1 * n2);
        BipartiteGraph g = gen::random_bipartite(rng, n1, n2, m);
        auto d = gallai_edmonds(g, max_matching(g));

        // permute labels by renaming u<i> -> u<perm[i]>
        std::vector<int> lperm(n1), rperm(n2);
        for (int i = 0; i < n1; ++i) lperm[i] = i + 1;
        for (int j = 0; j < n2; ++j) rperm[j] = j + 1;
        std::shuffle(lperm.begin(), lperm.end(), rng);
        std::shuffle(rperm.begin(), rperm.end(), rng);
        std::vector<std::pair<std::string, std::string>> edges;
        for (auto [u, v] : g.edge_labels()) {
            int ui = *g.left_index(u), vi = *g.right_index(v);
            edges.emplace_back("u" + std::to_string(lperm[ui]),
                               "v" + std::to_string(rperm[vi]));
        }
        BipartiteGraph h = BipartiteGraph::make(g.left(), g.right(), edges);
        auto dh = gallai_edmonds(h, max_matching(h));
        for (int i = 0; i < n1; ++i) {
            auto mapped = dh.left[*h.left_index("u" + std::to_string(lperm[i]))];
            CHECK(mapped == d.left[i]);
        }
        for (int j = 0; j < n2; ++j) {
            auto mapped = dh.right[*h.right_index("v" + std::to_string(rperm[j]))];
            CHECK(mapped == d.right[j]);
        }
    }
}
