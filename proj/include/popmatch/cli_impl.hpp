#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "popmatch/cha.hpp"
#include "popmatch/cli.hpp"
#include "popmatch/hardness.hpp"
#include "popmatch/hat_count.hpp"
#include "popmatch/instance_io.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/popular_hat.hpp"
#include "popmatch/switching.hpp"

namespace popmatch::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool has_ties(const Instance& inst) {
    for (const auto& a : inst.agents())
        for (const auto& g : inst.preferences(a))
            if (g.size() > 1) return true;
    return false;
}

// Load an instance; append last-resort houses when absent so popularity is
// judged over matchings that leave nobody out, and say so.
inline Instance load_instance(const std::string& path, std::ostream& err) {
    Instance inst = parse_instance(read_file(path));
    if (inst.has_last_resorts()) return inst;
    err << "note: added last-resort houses so every agent stays matchable\n";
    return add_last_resorts(inst);
}

// Matching files may omit agents; omitted agents sit on their last resort.
inline Matching load_matching(const Instance& inst, const std::string& path) {
    Matching m = parse_matching(read_file(path));
    if (inst.has_last_resorts())
        for (const auto& a : inst.agents())
            if (!m.matched(a)) m.assign(a, last_resort_name(a));
    validate_matching(inst, m);
    return m;
}

inline bool is_last_resort_house(const std::string& h) {
    return h.rfind(kLastResortPrefix, 0) == 0;
}

// printed matchings use the same omission convention as matching files
inline std::string matching_text(const Matching& m) {
    std::ostringstream out;
    for (const auto& [agent, house] : m)
        if (!is_last_resort_house(house)) out << agent << ' ' << house << '\n';
    return out.str();
}

inline nlohmann::json matching_json(const Matching& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [agent, house] : m)
        if (!is_last_resort_house(house)) j[agent] = house;
    return j;
}

inline std::string format_estimate(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(6) << v;
    return ss.str();
}

inline std::uint64_t oracle_limit_from_env() {
    const char* s = std::getenv("POPMATCH_ORACLE_LIMIT");
    if (!s) return kDefaultOracleStateLimit;
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(s, &pos);
        if (pos != std::string(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("POPMATCH_ORACLE_LIMIT must be a non-negative integer, got '" +
                         std::string(s) + "'");
    }
}

inline std::optional<Matching> find_any_popular(const Instance& inst) {
    return has_ties(inst) ? find_popular_hat(inst) : find_popular_cha(inst);
}

inline void emit(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"popular matchings in house allocation: existence, construction, counting"};
    app.name("popmatch");
    app.require_subcommand(1);

    std::string output_mode = "text";
    app.add_option("--output", output_mode, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));

    std::string path, matching_path;
    std::string method = "switching";
    double epsilon = 0.1, delta = 0.1;
    std::uint64_t seed = 0;

    CLI::App* sc_check = app.add_subcommand("check", "test whether a popular matching exists");
    sc_check->add_option("file", path, "instance file")->required();

    CLI::App* sc_find = app.add_subcommand("find", "print one popular matching");
    sc_find->add_option("file", path, "instance file")->required();

    CLI::App* sc_count = app.add_subcommand("count", "count popular matchings");
    sc_count->add_option("file", path, "instance file")->required();
    sc_count->add_option("--method", method, "switching, fpras, exact-pm or oracle")
        ->check(CLI::IsMember({"switching", "fpras", "exact-pm", "oracle"}));
    sc_count->add_option("--epsilon", epsilon, "relative accuracy target (fpras)");
    sc_count->add_option("--delta", delta, "failure probability (fpras)");
    CLI::Option* seed_opt = sc_count->add_option("--seed", seed, "estimator seed (fpras)");

    CLI::App* sc_rhat = app.add_subcommand(
        "reduce-hat", "emit the perfect-matching reduction of a unit-capacity instance");
    sc_rhat->add_option("file", path, "instance file")->required();

    CLI::App* sc_rcha = app.add_subcommand(
        "reduce-cha", "turn a bipartite graph into an instance whose popular matchings "
                      "correspond to the graph's matchings");
    sc_rcha->add_option("file", path, "edge list file: 'n1 n2 m' header, then 'u v' pairs")
        ->required();

    CLI::App* sc_export = app.add_subcommand("export-switching",
                                             "print the switching graph of a popular matching");
    sc_export->add_option("file", path, "instance file")->required();
    sc_export->add_option("--matching", matching_path,
                          "matching file; defaults to a constructed popular matching");

    CLI::App* sc_cross = app.add_subcommand(
        "cross-check", "count a graph's matchings directly and via its instance image");
    sc_cross->add_option("file", path, "edge list file")->required();

    CLI::App* sc_validate = app.add_subcommand("validate", "test a matching for popularity");
    sc_validate->add_option("file", path, "instance file")->required();
    sc_validate->add_option("--matching", matching_path, "matching file")->required();

    for (CLI::App* sub : {sc_check, sc_find, sc_count, sc_rhat, sc_rcha, sc_export,
                          sc_cross, sc_validate})
        sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const bool json = output_mode == "json";

    try {
        if (*sc_check) {
            Instance inst = detail::load_instance(path, err);
            bool exists = detail::find_any_popular(inst).has_value();
            if (json)
                detail::emit(out, {{"exists", exists}});
            else
                out << (exists ? "popular matching exists\n" : "no popular matching exists\n");
            return exists ? kExitOk : kExitNegative;
        }

        if (*sc_find) {
            Instance inst = detail::load_instance(path, err);
            std::optional<Matching> m = detail::find_any_popular(inst);
            if (json) {
                nlohmann::json j;
                j["matching"] = m ? detail::matching_json(*m) : nlohmann::json();
                detail::emit(out, j);
            } else if (m) {
                out << detail::matching_text(*m);
            } else {
                out << "no popular matching exists\n";
            }
            return m ? kExitOk : kExitNegative;
        }

        if (*sc_count) {
            if (method == "fpras" && seed_opt->count() == 0) {
                err << "error: count --method fpras requires --seed; estimates must be "
                       "reproducible\n";
                return kExitUsage;
            }
            Instance inst = detail::load_instance(path, err);
            nlohmann::json j{{"method", method},
                             {"epsilon", nullptr},
                             {"delta", nullptr},
                             {"seed", nullptr}};
            std::string printed;
            if (method == "switching") {
                printed = count_popular_cha(inst).get_str();
            } else if (method == "oracle") {
                printed = oracle_count_popular(inst, detail::oracle_limit_from_env()).get_str();
            } else if (method == "exact-pm") {
                printed = count_popular_hat(inst, CountMethod::exact).value.get_str();
            } else {
                CountResult r =
                    count_popular_hat(inst, CountMethod::estimate, epsilon, delta, seed);
                printed = r.method == CountMethod::exact
                              ? r.value.get_str()  // no popular matching: exactly zero
                              : detail::format_estimate(r.estimate);
                j["epsilon"] = epsilon;
                j["delta"] = delta;
                j["seed"] = seed;
            }
            j["count"] = printed;
            if (json)
                detail::emit(out, j);
            else
                out << printed << "\n";
            return kExitOk;
        }

        if (*sc_rhat) {
            Instance inst = detail::load_instance(path, err);
            ReducedInstance red = build_reduction(inst);
            if (json) {
                nlohmann::json j;
                j["dummies"] = red.dummy_count;
                j["removed"] = red.removed_houses;
                nlohmann::json left = nlohmann::json::object();
                for (const auto& u : red.graph.left())
                    left[u] = left_block_name(red.block_of_left.at(u));
                nlohmann::json right = nlohmann::json::object();
                for (const auto& v : red.graph.right())
                    right[v] = right_block_name(red.block_of_right.at(v));
                j["left"] = left;
                j["right"] = right;
                j["edges"] = red.graph.edge_labels();
                detail::emit(out, j);
            } else {
                out << "dummies " << red.dummy_count << "\n";
                for (const auto& h : red.removed_houses) out << "removed " << h << "\n";
                for (const auto& u : red.graph.left())
                    out << "left " << u << ' ' << left_block_name(red.block_of_left.at(u))
                        << "\n";
                for (const auto& v : red.graph.right())
                    out << "right " << v << ' ' << right_block_name(red.block_of_right.at(v))
                        << "\n";
                for (const auto& [u, v] : red.graph.edge_labels())
                    out << "edge " << u << ' ' << v << "\n";
            }
            return kExitOk;
        }

        if (*sc_rcha) {
            BipartiteGraph g = parse_bipartite_edge_list(detail::read_file(path));
            ReductionOutput red = reduce_matching_to_cha(g);
            for (const auto& w : red.warnings) err << "note: " << w << "\n";
            out << serialize_instance(red.instance);
            return kExitOk;
        }

        if (*sc_export) {
            Instance inst = detail::load_instance(path, err);
            std::optional<Matching> m;
            if (matching_path.empty()) {
                m = find_popular_cha(inst);
                if (!m) {
                    out << "no popular matching exists\n";
                    return kExitNegative;
                }
            } else {
                m = detail::load_matching(inst, matching_path);
            }
            SwitchingGraph sg = build_switching_graph(inst, *m);
            if (json) {
                nlohmann::json j;
                j["edges"] = nlohmann::json::array();
                for (const auto& e : sg.edges)
                    j["edges"].push_back({{"agent", e.agent},
                                          {"from", e.from},
                                          {"to", e.to},
                                          {"weight", e.weight}});
                j["unsat"] = sg.unsat;
                detail::emit(out, j);
            } else {
                for (const auto& e : sg.edges)
                    out << "edge " << e.from << ' ' << e.to << ' ' << e.weight << ' '
                        << e.agent << "\n";
                for (const auto& h : sg.vertices)
                    out << "unsat " << h << ' ' << sg.unsat.at(h) << "\n";
            }
            return kExitOk;
        }

        if (*sc_cross) {
            BipartiteGraph g = parse_bipartite_edge_list(detail::read_file(path));
            CrossCheckReport rep = cross_check(g, detail::oracle_limit_from_env());
            for (const auto& n : rep.notes) err << "note: " << n << "\n";
            if (json) {
                detail::emit(out, {{"matchings", rep.matchings.get_str()},
                                   {"via_switching", rep.via_switching.get_str()},
                                   {"via_oracle", rep.via_oracle.get_str()},
                                   {"equal", rep.equal},
                                   {"degenerate", rep.degenerate}});
            } else {
                out << "matchings " << rep.matchings.get_str() << "\n";
                out << "switching " << rep.via_switching.get_str() << "\n";
                out << "oracle " << rep.via_oracle.get_str() << "\n";
                out << "equal " << (rep.equal ? "yes" : "no") << "\n";
            }
            return rep.equal ? kExitOk : kExitNegative;
        }

        if (*sc_validate) {
            Instance inst = detail::load_instance(path, err);
            Matching m = detail::load_matching(inst, matching_path);
            bool popular;
            int failed = 0;
            std::string witness, why;
            if (detail::has_ties(inst)) {
                HatPopularity p = is_popular_hat(inst, m);
                popular = p.popular;
                failed = p.failed_condition;
                witness = p.witness;
                why = p.detail;
            } else {
                ChaPopularity p = is_popular_cha(inst, m);
                popular = p.popular;
                failed = p.failed_condition;
                witness = p.witness;
                why = p.detail;
            }
            if (json) {
                nlohmann::json j;
                j["popular"] = popular;
                j["failed_condition"] = popular ? nlohmann::json() : nlohmann::json(failed);
                j["witness"] = popular ? nlohmann::json() : nlohmann::json(witness);
                j["detail"] = popular ? nlohmann::json() : nlohmann::json(why);
                detail::emit(out, j);
            } else {
                out << (popular ? "popular\n" : "not popular: " + why + "\n");
            }
            return popular ? kExitOk : kExitNegative;
        }
    } catch (const LimitError& e) {
        err << "error: " << e.what() << "\n";
        return kExitLimit;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    err << "error: no subcommand selected\n";
    return kExitUsage;
}

}  // namespace popmatch::cli
