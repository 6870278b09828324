#pragma once

// Brute-force reference implementations.  Everything here decides by
// exhaustive enumeration and pairwise comparison; nothing relies on the
// structural characterizations the rest of the library implements.  Scan
// order is tuned (constructed witnesses first, then promising matchings
// first), but a matching is only ever rejected on a checked witness, so the
// tuning cannot change any answer.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "popmatch/bipartite.hpp"
#include "popmatch/instance.hpp"

namespace popmatch {

inline constexpr std::uint64_t kDefaultOracleStateLimit = 10'000'000;

namespace oracle_detail {

constexpr std::int16_t kNoHouse = -1;
constexpr std::int16_t kUnmatchedRank = INT16_MAX;

struct Index {
    const Instance* inst;
    int n_agents, n_houses;
    std::vector<int> cap;
    std::vector<std::vector<int>> list;  // per agent, houses by (rank, index)
    std::vector<std::vector<std::int16_t>> rank;  // [agent][house], kUnmatchedRank when unlisted

    explicit Index(const Instance& instance) : inst(&instance) {
        n_agents = (int)instance.num_agents();
        n_houses = (int)instance.num_houses();
        cap.resize(n_houses);
        for (int h = 0; h < n_houses; ++h) cap[h] = instance.houses()[h].capacity;
        rank.assign(n_agents, std::vector<std::int16_t>(n_houses, kUnmatchedRank));
        list.resize(n_agents);
        for (int a = 0; a < n_agents; ++a) {
            for (int h = 0; h < n_houses; ++h) {
                int r = instance.rank_by_index(a, h);
                if (r >= 0) {
                    rank[a][h] = (std::int16_t)r;
                    list[a].push_back(h);
                }
            }
            std::sort(list[a].begin(), list[a].end(), [&](int x, int y) {
                if (rank[a][x] != rank[a][y]) return rank[a][x] < rank[a][y];
                return x < y;
            });
        }
    }

    std::vector<std::int16_t> to_assignment(const Matching& m) const {
        validate_matching(*inst, m);
        std::vector<std::int16_t> assign(n_agents, kNoHouse);
        for (const auto& [agent, house] : m)
            assign[inst->agent_index_or_throw(agent)] =
                (std::int16_t)inst->house_index_or_throw(house);
        return assign;
    }

    Matching to_matching(const std::vector<std::int16_t>& assign) const {
        Matching m;
        for (int a = 0; a < n_agents; ++a)
            if (assign[a] != kNoHouse)
                m.assign(inst->agents()[a], inst->houses()[assign[a]].id);
        return m;
    }

    std::vector<std::int16_t> ranks_of(const std::vector<std::int16_t>& assign) const {
        std::vector<std::int16_t> r(n_agents);
        for (int a = 0; a < n_agents; ++a)
            r[a] = assign[a] == kNoHouse ? kUnmatchedRank : rank[a][assign[a]];
        return r;
    }

    // Upper bound on the enumeration tree: one choice per listed house plus
    // "unmatched", per agent.
    std::uint64_t choice_bound() const {
        unsigned __int128 prod = 1;
        for (const auto& l : list) {
            prod *= (unsigned __int128)(l.size() + 1);
            if (prod > (unsigned __int128)UINT64_MAX) return UINT64_MAX;
        }
        return (std::uint64_t)prod;
    }
};

// All valid (partial) matchings as dense assignment vectors, in a fixed
// depth-first order: per agent, "unmatched" first, then listed houses by
// rank.
struct Enumerated {
    Index idx;
    std::vector<std::vector<std::int16_t>> assign;
    std::vector<std::vector<std::int16_t>> ranks;
    std::vector<std::uint32_t> by_quality;  // indices sorted by rank sum, best first

    explicit Enumerated(const Instance& inst, std::uint64_t limit) : idx(inst) {
        std::uint64_t bound = idx.choice_bound();
        if (bound > limit)
            throw LimitError("oracle enumeration needs up to " +
                             (bound == UINT64_MAX ? std::string("2^64")
                                                  : std::to_string(bound)) +
                             " states, limit is " + std::to_string(limit));
        std::vector<std::int16_t> cur(idx.n_agents, kNoHouse);
        std::vector<int> load(idx.n_houses, 0);
        recurse(0, cur, load);
        ranks.reserve(assign.size());
        for (const auto& a : assign) ranks.push_back(idx.ranks_of(a));
        by_quality.resize(assign.size());
        std::iota(by_quality.begin(), by_quality.end(), 0u);
        std::vector<std::int64_t> quality(assign.size());
        for (std::size_t i = 0; i < assign.size(); ++i) {
            std::int64_t q = 0;
            for (auto r : ranks[i]) q += r;
            quality[i] = q;
        }
        std::stable_sort(by_quality.begin(), by_quality.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return quality[a] < quality[b]; });
    }

    void recurse(int a, std::vector<std::int16_t>& cur, std::vector<int>& load) {
        if (a == idx.n_agents) {
            assign.push_back(cur);
            return;
        }
        cur[a] = kNoHouse;
        recurse(a + 1, cur, load);
        for (int h : idx.list[a]) {
            if (load[h] >= idx.cap[h]) continue;
            cur[a] = (std::int16_t)h;
            ++load[h];
            recurse(a + 1, cur, load);
            --load[h];
        }
        cur[a] = kNoHouse;
    }

    // 1 when r1's matching wins the head-to-head vote, -1 when r2's does.
    static int compare(const std::vector<std::int16_t>& r1, const std::vector<std::int16_t>& r2) {
        int p1 = 0, p2 = 0;
        for (std::size_t i = 0; i < r1.size(); ++i) {
            p1 += r1[i] < r2[i];
            p2 += r2[i] < r1[i];
        }
        return p1 > p2 ? 1 : (p2 > p1 ? -1 : 0);
    }

    // A single-agent move to a better, non-full house beats the current
    // matching 1:0.  Returns the improved assignment when one exists.
    std::optional<std::vector<std::int16_t>> promotion_witness(
        const std::vector<std::int16_t>& a) const {
        std::vector<int> load(idx.n_houses, 0);
        for (int i = 0; i < idx.n_agents; ++i)
            if (a[i] != kNoHouse) ++load[a[i]];
        for (int i = 0; i < idx.n_agents; ++i) {
            std::int16_t cur_rank = a[i] == kNoHouse ? kUnmatchedRank : idx.rank[i][a[i]];
            for (int h : idx.list[i]) {
                if (idx.rank[i][h] >= cur_rank) break;  // list is rank-sorted
                if (load[h] < idx.cap[h]) {
                    auto improved = a;
                    improved[i] = (std::int16_t)h;
                    return improved;
                }
            }
        }
        return std::nullopt;
    }

    // Exhaustive popularity decision; any more-popular matching disproves.
    std::optional<std::size_t> find_witness(const std::vector<std::int16_t>& r) const {
        for (std::uint32_t j : by_quality)
            if (compare(ranks[j], r) > 0) return j;
        return std::nullopt;
    }
};

}  // namespace oracle_detail

// Every valid matching (partial ones and the empty one included) in a fixed
// deterministic order.
inline std::vector<Matching> enumerate_matchings(
    const Instance& inst, std::uint64_t state_limit = kDefaultOracleStateLimit) {
    oracle_detail::Enumerated en(inst, state_limit);
    std::vector<Matching> out;
    out.reserve(en.assign.size());
    for (const auto& a : en.assign) out.push_back(en.idx.to_matching(a));
    return out;
}

struct OracleVerdict {
    bool popular = false;
    std::optional<Matching> witness;  // a strictly more popular matching
};

inline OracleVerdict oracle_is_popular(const Instance& inst, const Matching& m,
                                       std::uint64_t state_limit = kDefaultOracleStateLimit) {
    oracle_detail::Enumerated en(inst, state_limit);
    auto assign = en.idx.to_assignment(m);
    if (auto promo = en.promotion_witness(assign))
        return {false, en.idx.to_matching(*promo)};
    auto r = en.idx.ranks_of(assign);
    if (auto j = en.find_witness(r)) return {false, en.idx.to_matching(en.assign[*j])};
    return {true, std::nullopt};
}

inline mpz_class oracle_count_popular(const Instance& inst,
                                      std::uint64_t state_limit = kDefaultOracleStateLimit) {
    oracle_detail::Enumerated en(inst, state_limit);
    mpz_class count = 0;
    for (std::size_t i = 0; i < en.assign.size(); ++i) {
        if (en.promotion_witness(en.assign[i])) continue;
        if (!en.find_witness(en.ranks[i])) ++count;
    }
    return count;
}

// The popular matchings themselves, in enumeration order.
inline std::vector<Matching> oracle_popular_matchings(
    const Instance& inst, std::uint64_t state_limit = kDefaultOracleStateLimit) {
    oracle_detail::Enumerated en(inst, state_limit);
    std::vector<Matching> out;
    for (std::size_t i = 0; i < en.assign.size(); ++i) {
        if (en.promotion_witness(en.assign[i])) continue;
        if (!en.find_witness(en.ranks[i])) out.push_back(en.idx.to_matching(en.assign[i]));
    }
    return out;
}

// Exhaustive perfect-matching count by backtracking over left vertices.
inline mpz_class oracle_count_perfect(const BipartiteGraph& g, std::size_t side_limit = 12) {
    if (g.num_left() > side_limit || g.num_right() > side_limit)
        throw LimitError("oracle perfect-matching count limited to " +
                         std::to_string(side_limit) + " vertices per side");
    if (g.num_left() != g.num_right()) return 0;
    const int n = (int)g.num_left();
    std::uint32_t used = 0;
    std::uint64_t count = 0;
    auto rec = [&](auto&& self, int u) -> void {
        if (u == n) {
            ++count;
            return;
        }
        for (int v : g.neighbors(u)) {
            if (used & (1u << v)) continue;
            used |= (1u << v);
            self(self, u + 1);
            used &= ~(1u << v);
        }
    };
    rec(rec, 0);
    return mpz_class((unsigned long)count);
}

// Number of matchings of any size (the empty one included) by backtracking.
inline mpz_class count_all_matchings(const BipartiteGraph& g, std::size_t edge_limit = 24) {
    if (g.num_edges() > edge_limit)
        throw LimitError("matching enumeration limited to " + std::to_string(edge_limit) +
                         " edges");
    std::vector<bool> used(g.num_right(), false);
    mpz_class count = 0;
    auto rec = [&](auto&& self, int u) -> void {
        if (u == (int)g.num_left()) {
            ++count;
            return;
        }
        self(self, u + 1);  // u stays unmatched
        for (int v : g.neighbors(u)) {
            if (used[v]) continue;
            used[v] = true;
            self(self, u + 1);
            used[v] = false;
        }
    };
    rec(rec, 0);
    return count;
}

}  // namespace popmatch
