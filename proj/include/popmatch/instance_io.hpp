#pragma once

// Instance file format: a JSON object with fields
//   kind         - "HA" | "HAT" | "CHA"
//   agents       - array of labels
//   houses       - array of {"id": ..., "capacity": ...} (capacity defaults to 1)
//   preferences  - map agent -> array of rank groups; a singleton group may be
//                  written as a bare house id instead of a one-element array
//   last_resorts_added - optional bool, present only for augmented instances
//
// Serialization is canonical (sorted labels, sorted keys), so
// parse(serialize(inst)) == inst.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "popmatch/instance.hpp"

namespace popmatch {

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["kind"] = kind_name(inst.kind());
    j["agents"] = inst.agents();
    nlohmann::json houses = nlohmann::json::array();
    for (const auto& h : inst.houses())
        houses.push_back({{"id", h.id}, {"capacity", h.capacity}});
    j["houses"] = std::move(houses);
    nlohmann::json prefs = nlohmann::json::object();
    for (const auto& a : inst.agents()) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& group : inst.preferences(a)) {
            if (group.size() == 1)
                list.push_back(group[0]);
            else
                list.push_back(group);
        }
        prefs[a] = std::move(list);
    }
    j["preferences"] = std::move(prefs);
    if (inst.has_last_resorts()) j["last_resorts_added"] = true;
    return j;
}

inline std::string serialize_instance(const Instance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

inline Instance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("instance file: top level must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "kind" && key != "agents" && key != "houses" && key != "preferences" &&
            key != "last_resorts_added")
            throw ParseError("instance file: unknown field '" + key + "'");
    }
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError("instance file: missing or non-string 'kind'");
    auto kind = kind_from_name(j["kind"].get<std::string>());
    if (!kind)
        throw ParseError("instance file: kind must be one of HA, HAT, CHA");

    if (!j.contains("agents") || !j["agents"].is_array())
        throw ParseError("instance file: missing or non-array 'agents'");
    std::vector<std::string> agents;
    for (const auto& a : j["agents"]) {
        if (!a.is_string()) throw ParseError("instance file: agent labels must be strings");
        agents.push_back(a.get<std::string>());
    }

    if (!j.contains("houses") || !j["houses"].is_array())
        throw ParseError("instance file: missing or non-array 'houses'");
    std::vector<House> houses;
    for (const auto& h : j["houses"]) {
        if (!h.is_object() || !h.contains("id") || !h["id"].is_string())
            throw ParseError("instance file: each house must be an object with a string 'id'");
        House house;
        house.id = h["id"].get<std::string>();
        for (const auto& [key, _] : h.items())
            if (key != "id" && key != "capacity")
                throw ParseError("instance file: house '" + house.id + "' has unknown field '" +
                                 key + "'");
        if (h.contains("capacity")) {
            if (!h["capacity"].is_number_integer())
                throw ParseError("instance file: house '" + house.id +
                                 "' capacity must be an integer");
            house.capacity = h["capacity"].get<int>();
        }
        houses.push_back(std::move(house));
    }

    if (!j.contains("preferences") || !j["preferences"].is_object())
        throw ParseError("instance file: missing or non-object 'preferences'");
    std::map<std::string, PreferenceList> prefs;
    for (const auto& [agent, list] : j["preferences"].items()) {
        if (!list.is_array())
            throw ParseError("instance file: preference list of '" + agent +
                             "' must be an array");
        PreferenceList pl;
        for (const auto& group : list) {
            if (group.is_string()) {
                pl.push_back({group.get<std::string>()});
            } else if (group.is_array()) {
                std::vector<std::string> g;
                for (const auto& hid : group) {
                    if (!hid.is_string())
                        throw ParseError("instance file: preference entries of '" + agent +
                                         "' must be house ids");
                    g.push_back(hid.get<std::string>());
                }
                pl.push_back(std::move(g));
            } else {
                throw ParseError("instance file: preference groups of '" + agent +
                                 "' must be house ids or arrays of house ids");
            }
        }
        prefs[agent] = std::move(pl);
    }

    bool lr = false;
    if (j.contains("last_resorts_added")) {
        if (!j["last_resorts_added"].is_boolean())
            throw ParseError("instance file: 'last_resorts_added' must be a boolean");
        lr = j["last_resorts_added"].get<bool>();
    }

    try {
        return Instance::make(*kind, std::move(agents), std::move(houses), std::move(prefs), lr);
    } catch (const ValidationError& e) {
        throw ParseError(std::string("instance file: ") + e.what());
    }
}

inline Instance parse_instance(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance file: ") + e.what());
    }
    return instance_from_json(j);
}

}  // namespace popmatch
