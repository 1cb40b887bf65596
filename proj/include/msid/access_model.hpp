#pragma once

// Sequences-of-accesses representation: each functionality carries the
// ordered list of (entity, mode) accesses it performs.

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace msid {

enum class AccessMode { Read, Write };

// Mode filter for queries; Any matches both reads and writes.
enum class ModeFilter { Any, Read, Write };

struct Access {
    std::string entity;
    AccessMode mode = AccessMode::Read;

    bool operator==(const Access&) const = default;
};

struct Functionality {
    std::string name;
    std::vector<Access> trace;

    bool operator==(const Functionality&) const = default;
};

class AccessModel {
public:
    // Throws SchemaError on empty input, empty traces, empty entity names or
    // duplicate functionality names.
    explicit AccessModel(std::vector<Functionality> functionalities);

    static AccessModel parse(std::string_view json_text);
    nlohmann::json to_json() const;

    const std::vector<Functionality>& functionalities() const { return functionalities_; }
    // Sorted entity names; the position is the entity's index.
    const std::vector<std::string>& entities() const { return entities_; }

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t functionality_count() const { return functionalities_.size(); }

    // Throws msid::Error for unknown names.
    std::size_t entity_index(const std::string& entity) const;
    bool has_entity(const std::string& entity) const;

    // Functionality names with at least one access to `entity` matching `mode`.
    std::set<std::string> entity_functionalities(const std::string& entity, ModeFilter mode) const;

    // Same, as sorted functionality indices.
    const std::vector<std::size_t>& functionality_ids(std::size_t entity, ModeFilter mode) const;

    // Each trace with entities replaced by their indices.
    struct IndexedAccess {
        std::size_t entity;
        AccessMode mode;
    };
    const std::vector<std::vector<IndexedAccess>>& indexed_traces() const { return traces_; }

private:
    std::vector<Functionality> functionalities_;
    std::vector<std::string> entities_;
    std::vector<std::vector<IndexedAccess>> traces_;
    // [entity][Any/Read/Write] -> functionality ids
    std::vector<std::array<std::vector<std::size_t>, 3>> by_entity_;
};

} // namespace msid
