#include "msid/access_model.hpp"

#include <algorithm>
#include <unordered_set>

#include "msid/error.hpp"

namespace msid {

namespace {

std::size_t slot(ModeFilter mode) { return static_cast<std::size_t>(mode); }

} // namespace

AccessModel::AccessModel(std::vector<Functionality> functionalities)
    : functionalities_(std::move(functionalities)) {
    if (functionalities_.empty()) {
        throw SchemaError("no functionalities");
    }
    std::set<std::string> names;
    std::set<std::string> entities;
    for (const auto& f : functionalities_) {
        if (!names.insert(f.name).second) {
            throw SchemaError("duplicate functionality '" + f.name + "'");
        }
        if (f.trace.empty()) {
            throw SchemaError("functionality '" + f.name + "' has an empty trace");
        }
        for (const auto& a : f.trace) {
            if (a.entity.empty()) {
                throw SchemaError("functionality '" + f.name + "' accesses an unnamed entity");
            }
            entities.insert(a.entity);
        }
    }
    entities_.assign(entities.begin(), entities.end());

    by_entity_.resize(entities_.size());
    traces_.reserve(functionalities_.size());
    for (std::size_t fi = 0; fi < functionalities_.size(); ++fi) {
        auto& trace = traces_.emplace_back();
        for (const auto& a : functionalities_[fi].trace) {
            const auto e = entity_index(a.entity);
            trace.push_back({e, a.mode});
            auto& lists = by_entity_[e];
            const auto mode_slot = a.mode == AccessMode::Read ? slot(ModeFilter::Read) : slot(ModeFilter::Write);
            for (const auto s : {slot(ModeFilter::Any), mode_slot}) {
                if (lists[s].empty() || lists[s].back() != fi) {
                    lists[s].push_back(fi);
                }
            }
        }
    }
}

AccessModel AccessModel::parse(std::string_view json_text) {
    // nlohmann::json keeps the last of repeated keys, so duplicates are
    // caught while parsing.
    std::unordered_set<std::string> seen;
    std::string duplicate;
    const nlohmann::json::parser_callback_t cb = [&](int depth, nlohmann::json::parse_event_t event,
                                                     nlohmann::json& parsed) {
        if (event == nlohmann::json::parse_event_t::key && depth == 1) {
            const auto key = parsed.get<std::string>();
            if (!seen.insert(key).second && duplicate.empty()) {
                duplicate = key;
            }
        }
        return true;
    };

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text, cb);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("accesses: invalid JSON: ") + e.what());
    }
    if (!duplicate.empty()) {
        throw SchemaError("duplicate functionality '" + duplicate + "'");
    }
    if (!j.is_object()) {
        throw SchemaError("accesses: top level must be an object of functionalities");
    }

    std::vector<Functionality> functionalities;
    for (const auto& [name, trace] : j.items()) {
        if (!trace.is_array()) {
            throw SchemaError("functionality '" + name + "': trace must be an array");
        }
        Functionality f{name, {}};
        for (const auto& access : trace) {
            if (!access.is_array() || access.size() != 2 || !access[0].is_string() || !access[1].is_string()) {
                throw SchemaError("functionality '" + name + "': each access must be [entity, mode]");
            }
            const auto mode = access[1].get<std::string>();
            if (mode != "R" && mode != "W") {
                throw SchemaError("functionality '" + name + "': mode '" + mode + "' is not R or W");
            }
            f.trace.push_back({access[0].get<std::string>(), mode == "R" ? AccessMode::Read : AccessMode::Write});
        }
        functionalities.push_back(std::move(f));
    }
    return AccessModel(std::move(functionalities));
}

nlohmann::json AccessModel::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : functionalities_) {
        auto& trace = j[f.name] = nlohmann::json::array();
        for (const auto& a : f.trace) {
            trace.push_back({a.entity, a.mode == AccessMode::Read ? "R" : "W"});
        }
    }
    return j;
}

std::size_t AccessModel::entity_index(const std::string& entity) const {
    const auto it = std::lower_bound(entities_.begin(), entities_.end(), entity);
    if (it == entities_.end() || *it != entity) {
        throw Error("unknown entity '" + entity + "'");
    }
    return static_cast<std::size_t>(it - entities_.begin());
}

bool AccessModel::has_entity(const std::string& entity) const {
    return std::binary_search(entities_.begin(), entities_.end(), entity);
}

const std::vector<std::size_t>& AccessModel::functionality_ids(std::size_t entity, ModeFilter mode) const {
    return by_entity_.at(entity)[slot(mode)];
}

std::set<std::string> AccessModel::entity_functionalities(const std::string& entity, ModeFilter mode) const {
    std::set<std::string> out;
    for (const auto fi : functionality_ids(entity_index(entity), mode)) {
        out.insert(functionalities_[fi].name);
    }
    return out;
}

} // namespace msid
