#pragma once

// House allocation instances: agents with ranked (possibly tied) preference
// lists over houses, houses with capacities.  Three variants:
//   HA  - strict lists, unit capacities
//   HAT - ties allowed, unit capacities
//   CHA - strict lists, capacities >= 1
//
// Instances are immutable after construction; all derived operations
// (last-resort augmentation, CHA->HAT splitting) return new instances.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace popmatch {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (instance files, matching files, graph files).
struct ParseError : Error {
    using Error::Error;
};

// Structurally broken arguments: invalid instances, invalid matchings,
// operations applied outside their domain.
struct ValidationError : Error {
    using Error::Error;
};

// Request exceeds a configured size limit (oracle state space, permanent
// threshold).  The CLI maps this to its own exit code.
struct LimitError : Error {
    using Error::Error;
};

enum class Kind { HA, HAT, CHA };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::HA: return "HA";
        case Kind::HAT: return "HAT";
        case Kind::CHA: return "CHA";
    }
    return "?";
}

inline std::optional<Kind> kind_from_name(const std::string& s) {
    if (s == "HA") return Kind::HA;
    if (s == "HAT") return Kind::HAT;
    if (s == "CHA") return Kind::CHA;
    return std::nullopt;
}

struct House {
    std::string id;
    int capacity = 1;
    bool last_resort = false;
};

// Ranked groups, most preferred first.  Houses inside one group are tied.
using PreferenceList = std::vector<std::vector<std::string>>;

// House ids with this prefix are reserved for generated last-resort houses.
inline constexpr const char* kLastResortPrefix = "__lr_";

inline std::string last_resort_name(const std::string& agent) {
    return std::string(kLastResortPrefix) + agent;
}

inline bool has_last_resort_prefix(const std::string& id) {
    return id.rfind(kLastResortPrefix, 0) == 0;
}

namespace detail {

// Labels appear in line-oriented text formats, so keep them printable and
// space-free.
inline void check_label(const std::string& label, const char* what) {
    if (label.empty())
        throw ValidationError(std::string(what) + " label is empty");
    for (unsigned char c : label) {
        if (c <= ' ' || c == 0x7f)
            throw ValidationError(std::string(what) + " label '" + label +
                                  "' contains whitespace or control characters");
    }
}

}  // namespace detail

class Instance {
  public:
    // Validates and canonicalizes: agents and houses sorted by label, tie
    // groups sorted internally.  Throws ValidationError on any structural
    // problem.
    static Instance make(Kind kind, std::vector<std::string> agents,
                         std::vector<House> houses,
                         std::map<std::string, PreferenceList> prefs,
                         bool last_resorts_added = false) {
        Instance inst;
        inst.kind_ = kind;
        inst.last_resorts_added_ = last_resorts_added;
        inst.agents_ = std::move(agents);
        inst.houses_ = std::move(houses);

        std::sort(inst.agents_.begin(), inst.agents_.end());
        std::sort(inst.houses_.begin(), inst.houses_.end(),
                  [](const House& a, const House& b) { return a.id < b.id; });

        for (const auto& a : inst.agents_) detail::check_label(a, "agent");
        for (const auto& h : inst.houses_) detail::check_label(h.id, "house");

        for (std::size_t i = 0; i + 1 < inst.agents_.size(); ++i)
            if (inst.agents_[i] == inst.agents_[i + 1])
                throw ValidationError("duplicate agent label '" + inst.agents_[i] + "'");
        for (std::size_t i = 0; i + 1 < inst.houses_.size(); ++i)
            if (inst.houses_[i].id == inst.houses_[i + 1].id)
                throw ValidationError("duplicate house label '" + inst.houses_[i].id + "'");

        for (std::size_t i = 0; i < inst.agents_.size(); ++i)
            inst.agent_idx_[inst.agents_[i]] = static_cast<int>(i);
        for (std::size_t i = 0; i < inst.houses_.size(); ++i)
            inst.house_idx_[inst.houses_[i].id] = static_cast<int>(i);

        for (auto& h : inst.houses_) {
            if (h.capacity < 1)
                throw ValidationError("house '" + h.id + "' has capacity " +
                                      std::to_string(h.capacity) + " (must be >= 1)");
            if (kind != Kind::CHA && h.capacity != 1)
                throw ValidationError("house '" + h.id + "' has capacity " +
                                      std::to_string(h.capacity) + " but kind " +
                                      kind_name(kind) + " requires unit capacities");
            h.last_resort = false;  // recomputed below from the flag + naming
        }

        // Reserved names: only permitted when the instance is flagged as
        // augmented, and then they must be exactly the derived set.
        if (!last_resorts_added) {
            for (const auto& h : inst.houses_)
                if (has_last_resort_prefix(h.id))
                    throw ValidationError("house id '" + h.id + "' uses the reserved prefix '" +
                                          kLastResortPrefix + "'");
        } else {
            std::set<std::string> expected;
            for (const auto& a : inst.agents_) expected.insert(last_resort_name(a));
            std::set<std::string> found;
            for (auto& h : inst.houses_) {
                if (!has_last_resort_prefix(h.id)) continue;
                if (!expected.count(h.id))
                    throw ValidationError("house id '" + h.id +
                                          "' uses the reserved prefix but matches no agent");
                if (h.capacity != 1)
                    throw ValidationError("last-resort house '" + h.id + "' must have capacity 1");
                h.last_resort = true;
                found.insert(h.id);
            }
            if (found != expected)
                throw ValidationError("instance flagged last_resorts_added but the last-resort "
                                      "house set does not match the agent set");
        }

        // Preference lists.
        inst.prefs_.resize(inst.agents_.size());
        for (const auto& [agent, list] : prefs) {
            auto it = inst.agent_idx_.find(agent);
            if (it == inst.agent_idx_.end())
                throw ValidationError("preference list for unknown agent '" + agent + "'");
            inst.prefs_[it->second] = list;
        }
        if (prefs.size() != inst.agents_.size()) {
            for (const auto& a : inst.agents_)
                if (!prefs.count(a))
                    throw ValidationError("agent '" + a + "' has no preference list");
        }

        inst.rank_.assign(inst.agents_.size(),
                          std::vector<int>(inst.houses_.size(), -1));
        for (std::size_t ai = 0; ai < inst.agents_.size(); ++ai) {
            auto& list = inst.prefs_[ai];
            const std::string& agent = inst.agents_[ai];
            if (list.empty())
                throw ValidationError("agent '" + agent + "' has an empty preference list");
            for (std::size_t g = 0; g < list.size(); ++g) {
                auto& group = list[g];
                if (group.empty())
                    throw ValidationError("agent '" + agent + "' has an empty tie group");
                if (group.size() > 1 && kind != Kind::HAT)
                    throw ValidationError("agent '" + agent + "' has a tie group but kind " +
                                          std::string(kind_name(kind)) +
                                          " requires strict preferences");
                std::sort(group.begin(), group.end());
                for (const auto& hid : group) {
                    auto hit = inst.house_idx_.find(hid);
                    if (hit == inst.house_idx_.end())
                        throw ValidationError("agent '" + agent +
                                              "' lists unknown house '" + hid + "'");
                    int& r = inst.rank_[ai][hit->second];
                    if (r != -1)
                        throw ValidationError("agent '" + agent + "' lists house '" + hid +
                                              "' more than once");
                    r = static_cast<int>(g);
                }
            }
            if (last_resorts_added) {
                const std::string lr = last_resort_name(agent);
                if (list.back().size() != 1 || list.back()[0] != lr)
                    throw ValidationError("agent '" + agent +
                                          "' must end their list with their last-resort house");
            }
        }
        if (last_resorts_added) {
            // A last-resort house may appear only on its own agent's list.
            for (std::size_t ai = 0; ai < inst.agents_.size(); ++ai)
                for (std::size_t hi = 0; hi < inst.houses_.size(); ++hi)
                    if (inst.rank_[ai][hi] != -1 && inst.houses_[hi].last_resort &&
                        inst.houses_[hi].id != last_resort_name(inst.agents_[ai]))
                        throw ValidationError("agent '" + inst.agents_[ai] +
                                              "' lists a foreign last-resort house '" +
                                              inst.houses_[hi].id + "'");
        }
        return inst;
    }

    Kind kind() const { return kind_; }
    bool has_last_resorts() const { return last_resorts_added_; }
    const std::vector<std::string>& agents() const { return agents_; }
    const std::vector<House>& houses() const { return houses_; }
    std::size_t num_agents() const { return agents_.size(); }
    std::size_t num_houses() const { return houses_.size(); }

    const PreferenceList& preferences(const std::string& agent) const {
        return prefs_[agent_index_or_throw(agent)];
    }
    const PreferenceList& preferences_by_index(int ai) const { return prefs_[ai]; }

    std::optional<int> agent_index(const std::string& a) const {
        auto it = agent_idx_.find(a);
        if (it == agent_idx_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<int> house_index(const std::string& h) const {
        auto it = house_idx_.find(h);
        if (it == house_idx_.end()) return std::nullopt;
        return it->second;
    }
    int agent_index_or_throw(const std::string& a) const {
        auto i = agent_index(a);
        if (!i) throw ValidationError("unknown agent '" + a + "'");
        return *i;
    }
    int house_index_or_throw(const std::string& h) const {
        auto i = house_index(h);
        if (!i) throw ValidationError("unknown house '" + h + "'");
        return *i;
    }
    const House& house(const std::string& id) const { return houses_[house_index_or_throw(id)]; }

    // Group index of h on a's list (0 = most preferred), or nullopt when h
    // is not listed by a.
    std::optional<int> rank_of(const std::string& agent, const std::string& house) const {
        int r = rank_[agent_index_or_throw(agent)][house_index_or_throw(house)];
        if (r < 0) return std::nullopt;
        return r;
    }
    int rank_by_index(int ai, int hi) const { return rank_[ai][hi]; }

    std::string last_resort_of(const std::string& agent) const {
        if (!last_resorts_added_)
            throw ValidationError("instance has no last-resort houses");
        (void)agent_index_or_throw(agent);
        return last_resort_name(agent);
    }

    // Complete lists: every non-last-resort house appears on every agent's
    // list (last-resort houses excluded on both sides).
    bool has_complete_lists() const {
        std::size_t real_houses = 0;
        for (const auto& h : houses_)
            if (!h.last_resort) ++real_houses;
        for (std::size_t ai = 0; ai < agents_.size(); ++ai) {
            std::size_t listed = 0;
            for (std::size_t hi = 0; hi < houses_.size(); ++hi)
                if (rank_[ai][hi] != -1 && !houses_[hi].last_resort) ++listed;
            if (listed != real_houses) return false;
        }
        return true;
    }

    bool operator==(const Instance& o) const {
        return kind_ == o.kind_ && last_resorts_added_ == o.last_resorts_added_ &&
               agents_ == o.agents_ && prefs_ == o.prefs_ &&
               houses_size_equal(o);
    }
    bool operator!=(const Instance& o) const { return !(*this == o); }

  private:
    bool houses_size_equal(const Instance& o) const {
        if (houses_.size() != o.houses_.size()) return false;
        for (std::size_t i = 0; i < houses_.size(); ++i)
            if (houses_[i].id != o.houses_[i].id ||
                houses_[i].capacity != o.houses_[i].capacity ||
                houses_[i].last_resort != o.houses_[i].last_resort)
                return false;
        return true;
    }

    Kind kind_ = Kind::HA;
    bool last_resorts_added_ = false;
    std::vector<std::string> agents_;
    std::vector<House> houses_;
    std::vector<PreferenceList> prefs_;  // aligned with agents_
    std::unordered_map<std::string, int> agent_idx_;
    std::unordered_map<std::string, int> house_idx_;
    std::vector<std::vector<int>> rank_;  // [agent][house] -> group or -1
};

// A (partial) assignment of agents to houses.  Ordered by agent label, which
// fixes iteration and serialization order.
class Matching {
  public:
    Matching() = default;
    Matching(std::initializer_list<std::pair<const std::string, std::string>> init)
        : pairs_(init) {}

    void assign(const std::string& agent, const std::string& house) { pairs_[agent] = house; }
    void unassign(const std::string& agent) { pairs_.erase(agent); }

    std::optional<std::string> house_of(const std::string& agent) const {
        auto it = pairs_.find(agent);
        if (it == pairs_.end()) return std::nullopt;
        return it->second;
    }
    bool matched(const std::string& agent) const { return pairs_.count(agent) != 0; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    auto begin() const { return pairs_.begin(); }
    auto end() const { return pairs_.end(); }

    bool operator==(const Matching& o) const { return pairs_ == o.pairs_; }
    bool operator!=(const Matching& o) const { return pairs_ != o.pairs_; }
    bool operator<(const Matching& o) const { return pairs_ < o.pairs_; }

  private:
    std::map<std::string, std::string> pairs_;
};

// Throws ValidationError unless every pair lies on the owner's preference
// list and house capacities are respected.
inline void validate_matching(const Instance& inst, const Matching& m) {
    std::map<std::string, int> load;
    for (const auto& [agent, house] : m) {
        if (!inst.agent_index(agent))
            throw ValidationError("matching assigns unknown agent '" + agent + "'");
        if (!inst.house_index(house))
            throw ValidationError("matching assigns unknown house '" + house + "'");
        if (!inst.rank_of(agent, house))
            throw ValidationError("matching assigns agent '" + agent + "' to house '" + house +
                                  "' which is not on their list");
        ++load[house];
    }
    for (const auto& [house, n] : load)
        if (n > inst.house(house).capacity)
            throw ValidationError("house '" + house + "' holds " + std::to_string(n) +
                                  " agents but has capacity " +
                                  std::to_string(inst.house(house).capacity));
}

inline bool is_agent_complete(const Instance& inst, const Matching& m) {
    for (const auto& a : inst.agents())
        if (!m.matched(a)) return false;
    return true;
}

// phi(m1, m2) = number of agents strictly preferring their m1 assignment,
// and symmetrically for m2.  Being matched anywhere beats being unmatched;
// houses in the same tie group compare equal.
inline std::pair<long, long> phi(const Instance& inst, const Matching& m1, const Matching& m2) {
    validate_matching(inst, m1);
    validate_matching(inst, m2);
    long prefer1 = 0, prefer2 = 0;
    constexpr int kUnmatched = INT32_MAX;
    for (const auto& a : inst.agents()) {
        auto h1 = m1.house_of(a), h2 = m2.house_of(a);
        int r1 = h1 ? *inst.rank_of(a, *h1) : kUnmatched;
        int r2 = h2 ? *inst.rank_of(a, *h2) : kUnmatched;
        if (r1 < r2) ++prefer1;
        if (r2 < r1) ++prefer2;
    }
    return {prefer1, prefer2};
}

inline bool more_popular(const Instance& inst, const Matching& m1, const Matching& m2) {
    auto [p1, p2] = phi(inst, m1, m2);
    return p1 > p2;
}

// Appends a unique capacity-1 last-resort house to every agent's list.  The
// house id is derived from the agent label with a reserved prefix.
inline Instance add_last_resorts(const Instance& inst) {
    if (inst.has_last_resorts())
        throw ValidationError("instance already has last-resort houses");
    std::vector<House> houses = inst.houses();
    std::map<std::string, PreferenceList> prefs;
    for (const auto& a : inst.agents()) {
        PreferenceList list = inst.preferences(a);
        list.push_back({last_resort_name(a)});
        prefs[a] = std::move(list);
        houses.push_back(House{last_resort_name(a), 1, true});
    }
    return Instance::make(inst.kind(), inst.agents(), std::move(houses), std::move(prefs), true);
}

struct SplitResult {
    Instance image;  // HAT instance over unit-capacity house copies
    // original house id -> its copy ids, in slot order
    std::map<std::string, std::vector<std::string>> copies;
};

// CHA -> HAT: a capacity-c house becomes c unit copies, always tied together.
inline SplitResult split_cha_to_hat(const Instance& inst) {
    if (inst.kind() != Kind::CHA)
        throw ValidationError("split_cha_to_hat requires a CHA instance");
    std::map<std::string, std::vector<std::string>> copies;
    std::vector<House> houses;
    std::set<std::string> taken;
    for (const auto& h : inst.houses()) taken.insert(h.id);
    for (const auto& h : inst.houses()) {
        std::vector<std::string> ids;
        if (h.capacity == 1) {
            ids.push_back(h.id);
        } else {
            for (int k = 1; k <= h.capacity; ++k) {
                std::string id = h.id + "^" + std::to_string(k);
                if (taken.count(id))
                    throw ValidationError("house copy label '" + id + "' collides with an "
                                          "existing house id");
                taken.insert(id);
                ids.push_back(id);
            }
        }
        for (const auto& id : ids) houses.push_back(House{id, 1, h.last_resort});
        copies[h.id] = std::move(ids);
    }
    std::map<std::string, PreferenceList> prefs;
    for (const auto& a : inst.agents()) {
        PreferenceList list;
        for (const auto& group : inst.preferences(a)) {
            std::vector<std::string> image_group;
            for (const auto& hid : group)
                for (const auto& cid : copies[hid]) image_group.push_back(cid);
            list.push_back(std::move(image_group));
        }
        prefs[a] = std::move(list);
    }
    Instance image = Instance::make(Kind::HAT, inst.agents(), std::move(houses),
                                    std::move(prefs), inst.has_last_resorts());
    return SplitResult{std::move(image), std::move(copies)};
}

// Carries a matching of the original CHA instance over to the split image:
// the occupants of each house (in agent-label order) take its copies in slot
// order.
inline Matching translate_matching(const Instance& original, const SplitResult& split,
                                   const Matching& m) {
    validate_matching(original, m);
    std::map<std::string, int> next_slot;
    Matching out;
    for (const auto& [agent, house] : m) {  // agent-label order
        const auto& ids = split.copies.at(house);
        int slot = next_slot[house]++;
        out.assign(agent, ids[static_cast<std::size_t>(slot)]);
    }
    return out;
}

// --- text formats ---------------------------------------------------------

// Matching files: one "agent house" pair per line, sorted by agent label.
inline std::string serialize_matching(const Matching& m) {
    std::ostringstream out;
    for (const auto& [agent, house] : m) out << agent << ' ' << house << '\n';
    return out.str();
}

inline Matching parse_matching(const std::string& text) {
    Matching m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string agent, house, extra;
        if (!(ls >> agent >> house) || (ls >> extra))
            throw ParseError("matching line " + std::to_string(lineno) +
                             ": expected 'agent house'");
        if (m.matched(agent))
            throw ParseError("matching line " + std::to_string(lineno) + ": agent '" + agent +
                             "' assigned twice");
        m.assign(agent, house);
    }
    return m;
}

}  // namespace popmatch
