#pragma once

// Decomposition quality metrics: uniform complexity, cohesion, coupling,
// team size reduction (tsr) and their combination.

#include <compare>
#include <cstddef>
#include <vector>

#include "msid/access_model.hpp"
#include "msid/clustering.hpp"
#include "msid/history.hpp"
#include "msid/similarity.hpp"

namespace msid {

struct MetricsRecord {
    double uniform_complexity = 0.0;
    double cohesion = 0.0;
    double coupling = 0.0;
    double tsr = 0.0;
    double combined = 0.0;
};

// Cluster index per entity (indexed like model.entities()). Throws
// msid::Error if an accessed entity is missing or appears twice.
std::vector<std::size_t> cluster_assignment(const Decomposition& d, const AccessModel& model);

// Mean over functionalities of the intermediate states each distributed
// functionality is exposed to: for every distinct (entity, mode) it
// accesses, the number of other distributed functionalities accessing that
// entity in the opposite mode.
double complexity(const Decomposition& d, const AccessModel& model);

// Complexity of the all-singletons decomposition with modes ignored.
double max_complexity(const AccessModel& model);

// complexity / max_complexity, 0 when the maximum is 0.
double uniform_complexity(const Decomposition& d, const AccessModel& model);

double cohesion(const Decomposition& d, const AccessModel& model);

// Mean over ordered cluster pairs (c1, c2) of the fraction of c2's entities
// reached from c1 by a trace step.
double coupling(const Decomposition& d, const AccessModel& model);

// Average per-cluster author count over the total author count.
double tsr(const Decomposition& d, const HistoryRepresentation& rep, const EntityFileMap& files);

// (uniform_complexity + coupling + tsr - cohesion + 1) / 4; throws
// msid::Error if an input lies outside [0, 1].
double combined(double uniform_complexity, double coupling, double tsr, double cohesion);

MetricsRecord evaluate(const Decomposition& d, const AccessModel& model, const HistoryRepresentation& rep,
                       const EntityFileMap& files);

// Same as above on a precomputed assignment; used by the sweep.
class MetricsEvaluator {
public:
    MetricsEvaluator(const AccessModel& model, const HistoryRepresentation& rep, const EntityFileMap& files);

    MetricsRecord evaluate(const std::vector<std::size_t>& assignment, std::size_t n_clusters) const;


    struct EntityMode {
        std::size_t entity;
        AccessMode mode;
        auto operator<=>(const EntityMode&) const = default;
    };

private:
    const AccessModel& model_;
    double max_complexity_sum_ = 0.0;
    // distinct (entity, mode) pairs and distinct entities per functionality
    std::vector<std::vector<EntityMode>> accesses_;
    std::vector<std::vector<std::size_t>> entities_;
    // per entity: author ids of its mapped file
    std::vector<std::vector<std::size_t>> entity_authors_;
    std::size_t total_authors_ = 0;
};

} // namespace msid
