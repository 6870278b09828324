#pragma once

// Counting popular matchings in unit-capacity instances.  The instance is
// rewritten as a perfect-matching problem: agents keep only the edges some
// popular matching could use (first-choice edges compatible with a maximum
// matching of the first-choice graph, plus each Even agent's s-edges),
// irrelevant Even houses are dropped, and dummy agents adjacent to every
// surviving Even house absorb the leftover capacity.  Every popular matching
// then extends to exactly dummy_count! perfect matchings, so
//
//     popular(inst) = perfect(G') / dummy_count!
//
// The perfect-matching count comes from the exact permanent engine or the
// sampling estimator, whichever the caller picks.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "popmatch/bipartite.hpp"
#include "popmatch/instance.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/permanent.hpp"
#include "popmatch/popular_hat.hpp"

namespace popmatch {

enum class LeftBlock { Ul, Ol, El, D };
enum class RightBlock { Ur, Or, Ef, Efs, Es };

inline const char* left_block_name(LeftBlock b) {
    switch (b) {
        case LeftBlock::Ul: return "Ul";
        case LeftBlock::Ol: return "Ol";
        case LeftBlock::El: return "El";
        case LeftBlock::D: return "D";
    }
    return "?";
}

inline const char* right_block_name(RightBlock b) {
    switch (b) {
        case RightBlock::Ur: return "Ur";
        case RightBlock::Or: return "Or";
        case RightBlock::Ef: return "Ef";
        case RightBlock::Efs: return "Efs";
        case RightBlock::Es: return "Es";
    }
    return "?";
}

struct ReducedInstance {
    BipartiteGraph graph;  // left: agents and dummies; right: surviving houses
    std::size_t dummy_count = 0;
    std::map<std::string, LeftBlock> block_of_left;
    std::map<std::string, RightBlock> block_of_right;
    std::vector<std::string> removed_houses;  // Even houses no popular matching uses
    std::vector<std::string> dummies;
};

inline ReducedInstance build_reduction(const Instance& inst) {
    if (inst.kind() == Kind::CHA)
        throw ValidationError("the perfect-matching reduction expects a unit-capacity instance");
    if (!inst.has_last_resorts())
        throw ValidationError("the perfect-matching reduction expects last-resort houses");
    if (!inst.has_complete_lists())
        throw ValidationError(
            "the perfect-matching reduction requires complete preference lists");

    FSLabelsHAT labels = compute_fs_hat(inst);
    ReducedInstance out;

    std::vector<std::string> right;
    for (const auto& h : inst.houses()) {
        switch (labels.house_label(h.id)) {
            case GELabel::Unreachable:
                out.block_of_right[h.id] = RightBlock::Ur;
                right.push_back(h.id);
                break;
            case GELabel::Odd:
                out.block_of_right[h.id] = RightBlock::Or;
                right.push_back(h.id);
                break;
            case GELabel::Even:
                switch (labels.even_partition.at(h.id)) {
                    case EvenHouseClass::FirstChoiceOnly:
                        out.block_of_right[h.id] = RightBlock::Ef;
                        right.push_back(h.id);
                        break;
                    case EvenHouseClass::FirstAndSecond:
                        out.block_of_right[h.id] = RightBlock::Efs;
                        right.push_back(h.id);
                        break;
                    case EvenHouseClass::SecondChoiceOnly:
                        out.block_of_right[h.id] = RightBlock::Es;
                        right.push_back(h.id);
                        break;
                    case EvenHouseClass::Neither:
                        out.removed_houses.push_back(h.id);
                        break;
                }
                break;
        }
    }

    if (right.size() < inst.num_agents())
        throw ValidationError(
            "only " + std::to_string(right.size()) + " houses remain for " +
            std::to_string(inst.num_agents()) +
            " agents; no matching can place every agent in their first or second "
            "choices, so no popular matching exists and the reduction is undefined");
    out.dummy_count = right.size() - inst.num_agents();

    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& a : inst.agents()) {
        switch (labels.agent_label(a)) {
            case GELabel::Unreachable:
                out.block_of_left[a] = LeftBlock::Ul;
                for (const auto& h : labels.f.at(a))
                    if (labels.house_label(h) == GELabel::Unreachable) edges.emplace_back(a, h);
                break;
            case GELabel::Odd:
                out.block_of_left[a] = LeftBlock::Ol;
                for (const auto& h : labels.f.at(a))
                    if (labels.house_label(h) == GELabel::Even) edges.emplace_back(a, h);
                break;
            case GELabel::Even:
                out.block_of_left[a] = LeftBlock::El;
                for (const auto& h : labels.f.at(a))
                    if (labels.house_label(h) == GELabel::Odd) edges.emplace_back(a, h);
                for (const auto& h : labels.s.at(a)) edges.emplace_back(a, h);
                break;
        }
    }

    std::string dummy_base = "__dummy_";
    for (bool clash = true; clash;) {
        clash = false;
        for (const auto& a : inst.agents())
            if (a.rfind(dummy_base, 0) == 0) {
                dummy_base += "_";
                clash = true;
            }
    }
    std::vector<std::string> left = inst.agents();
    for (std::size_t i = 1; i <= out.dummy_count; ++i) {
        std::string d = dummy_base + std::to_string(i);
        out.dummies.push_back(d);
        out.block_of_left[d] = LeftBlock::D;
        left.push_back(d);
        for (const auto& [h, block] : out.block_of_right)
            if (block == RightBlock::Ef || block == RightBlock::Efs ||
                block == RightBlock::Es)
                edges.emplace_back(d, h);
    }

    out.graph = BipartiteGraph::make(left, right, edges);
    return out;
}

inline CountResult count_popular_hat(const Instance& inst, CountMethod method,
                                     double epsilon = 0.1, double delta = 0.1,
                                     std::uint64_t seed = 0,
                                     std::size_t oracle_limit = kDefaultOracleStateLimit,
                                     std::size_t exact_limit = kDefaultExactPermanentLimit) {
    if (inst.kind() == Kind::CHA)
        throw ValidationError("count_popular_hat expects a unit-capacity instance");

    CountResult out;
    if (method == CountMethod::oracle) {
        out.method = CountMethod::oracle;
        out.value = oracle_count_popular(inst, oracle_limit);
        return out;
    }

    if (!inst.has_last_resorts())
        throw ValidationError("counting by reduction expects last-resort houses");
    if (!inst.has_complete_lists())
        throw ValidationError("counting by reduction requires complete preference lists");
    if (!find_popular_hat(inst)) {
        out.method = CountMethod::exact;
        out.value = 0;
        return out;
    }

    ReducedInstance red = build_reduction(inst);
    mpz_class dummy_fact;
    mpz_fac_ui(dummy_fact.get_mpz_t(), (unsigned long)red.dummy_count);

    if (method == CountMethod::exact) {
        mpz_class perfect = count_perfect_exact(red.graph, exact_limit);
        if (perfect % dummy_fact != 0)
            throw Error("internal: perfect-matching count " + perfect.get_str() +
                        " is not divisible by dummy_count! = " + dummy_fact.get_str());
        out.method = CountMethod::exact;
        out.value = perfect / dummy_fact;
        return out;
    }

    out = estimate_perfect(red.graph, epsilon, delta, seed);
    if (out.method == CountMethod::estimate)
        out.estimate /= dummy_fact.get_d();
    return out;
}

}  // namespace popmatch
