#include "msid/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "msid/error.hpp"

namespace msid {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

using EntityMode = MetricsEvaluator::EntityMode;

// Distinct (entity, mode) pairs of every functionality, sorted.
std::vector<std::vector<EntityMode>> distinct_accesses(const AccessModel& model) {
    std::vector<std::vector<EntityMode>> out;
    out.reserve(model.functionality_count());
    for (const auto& trace : model.indexed_traces()) {
        auto& list = out.emplace_back();
        for (const auto& a : trace) {
            list.push_back({a.entity, a.mode});
        }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return out;
}

std::vector<std::vector<std::size_t>> distinct_entities(const AccessModel& model) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(model.functionality_count());
    for (const auto& trace : model.indexed_traces()) {
        auto& list = out.emplace_back();
        for (const auto& a : trace) {
            list.push_back(a.entity);
        }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return out;
}

long count_peers(const std::vector<std::size_t>& accessors, std::size_t self, const std::vector<bool>& distributed) {
    long n = 0;
    for (const auto g : accessors) {
        if (g != self && distributed[g]) {
            ++n;
        }
    }
    return n;
}

ModeFilter opposite(AccessMode m) { return m == AccessMode::Read ? ModeFilter::Write : ModeFilter::Read; }

// Total complexity over all functionalities (not yet averaged).
long complexity_sum(const AccessModel& model, const std::vector<std::vector<EntityMode>>& accesses,
                    const std::vector<std::size_t>& assignment) {
    const auto f_count = model.functionality_count();

    std::vector<bool> distributed(f_count, false);
    for (std::size_t f = 0; f < f_count; ++f) {
        const auto& list = accesses[f];
        distributed[f] = std::any_of(list.begin(), list.end(), [&](const EntityMode& a) {
            return assignment[a.entity] != assignment[list.front().entity];
        });
    }

    long total = 0;
    for (std::size_t f = 0; f < f_count; ++f) {
        if (!distributed[f]) {
            continue;
        }
        for (const auto& a : accesses[f]) {
            total += count_peers(model.functionality_ids(a.entity, opposite(a.mode)), f, distributed);
        }
    }
    return total;
}

long max_complexity_sum(const AccessModel& model) {
    const auto accesses = distinct_accesses(model);
    const auto entities = distinct_entities(model);
    const auto f_count = model.functionality_count();

    std::vector<bool> distributed(f_count, false);
    for (std::size_t f = 0; f < f_count; ++f) {
        distributed[f] = entities[f].size() >= 2;
    }
    long total = 0;
    for (std::size_t f = 0; f < f_count; ++f) {
        if (!distributed[f]) {
            continue;
        }
        for (const auto& a : accesses[f]) {
            total += count_peers(model.functionality_ids(a.entity, ModeFilter::Any), f, distributed);
        }
    }
    return total;
}

std::vector<std::size_t> cluster_sizes(const std::vector<std::size_t>& assignment, std::size_t n_clusters) {
    std::vector<std::size_t> sizes(n_clusters, 0);
    for (const auto c : assignment) {
        ++sizes.at(c);
    }
    return sizes;
}

double cohesion_of(const std::vector<std::vector<std::size_t>>& accessed, const std::vector<std::size_t>& assignment,
                   std::size_t n_clusters) {
    const auto sizes = cluster_sizes(assignment, n_clusters);
    std::vector<double> ratio_sum(n_clusters, 0.0);
    std::vector<std::size_t> touching(n_clusters, 0);

    std::vector<std::size_t> hits(n_clusters, 0);
    for (const auto& entities : accessed) {
        std::fill(hits.begin(), hits.end(), 0);
        for (const auto e : entities) {
            ++hits[assignment[e]];
        }
        for (std::size_t c = 0; c < n_clusters; ++c) {
            if (hits[c] > 0) {
                ratio_sum[c] += static_cast<double>(hits[c]) / static_cast<double>(sizes[c]);
                ++touching[c];
            }
        }
    }

    double total = 0.0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        total += touching[c] == 0 ? 1.0 : ratio_sum[c] / static_cast<double>(touching[c]);
    }
    return total / static_cast<double>(n_clusters);
}

double coupling_of(const AccessModel& model, const std::vector<std::size_t>& assignment, std::size_t n_clusters) {
    if (n_clusters < 2) {
        return 0.0;
    }
    const auto sizes = cluster_sizes(assignment, n_clusters);
    // exposed[c1 * n + c2] = entities of c2 reached from c1
    std::vector<std::set<std::size_t>> exposed(n_clusters * n_clusters);
    for (const auto& trace : model.indexed_traces()) {
        for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
            const auto from = assignment[trace[k].entity];
            const auto to = assignment[trace[k + 1].entity];
            if (from != to) {
                exposed[from * n_clusters + to].insert(trace[k + 1].entity);
            }
        }
    }
    double total = 0.0;
    for (std::size_t c1 = 0; c1 < n_clusters; ++c1) {
        for (std::size_t c2 = 0; c2 < n_clusters; ++c2) {
            if (c1 != c2) {
                total += static_cast<double>(exposed[c1 * n_clusters + c2].size()) / static_cast<double>(sizes[c2]);
            }
        }
    }
    return total / static_cast<double>(n_clusters * (n_clusters - 1));
}

} // namespace

std::vector<std::size_t> cluster_assignment(const Decomposition& d, const AccessModel& model) {
    std::vector<std::size_t> out(model.entity_count(), kUnassigned);
    for (std::size_t c = 0; c < d.clusters.size(); ++c) {
        if (d.clusters[c].empty()) {
            throw Error("decomposition has an empty cluster");
        }
        for (const auto& name : d.clusters[c]) {
            if (!model.has_entity(name)) {
                throw Error("decomposition entity '" + name + "' is not accessed by any functionality");
            }
            auto& slot = out[model.entity_index(name)];
            if (slot != kUnassigned) {
                throw Error("entity '" + name + "' appears in two clusters");
            }
            slot = c;
        }
    }
    for (std::size_t e = 0; e < out.size(); ++e) {
        if (out[e] == kUnassigned) {
            throw Error("entity '" + model.entities()[e] + "' is missing from the decomposition");
        }
    }
    return out;
}

double complexity(const Decomposition& d, const AccessModel& model) {
    const auto assignment = cluster_assignment(d, model);
    return static_cast<double>(complexity_sum(model, distinct_accesses(model), assignment)) /
           static_cast<double>(model.functionality_count());
}

double max_complexity(const AccessModel& model) {
    return static_cast<double>(max_complexity_sum(model)) / static_cast<double>(model.functionality_count());
}

double uniform_complexity(const Decomposition& d, const AccessModel& model) {
    const auto assignment = cluster_assignment(d, model);
    const long max = max_complexity_sum(model);
    return max == 0 ? 0.0
                    : static_cast<double>(complexity_sum(model, distinct_accesses(model), assignment)) /
                          static_cast<double>(max);
}

double cohesion(const Decomposition& d, const AccessModel& model) {
    return cohesion_of(distinct_entities(model), cluster_assignment(d, model), d.clusters.size());
}

double coupling(const Decomposition& d, const AccessModel& model) {
    return coupling_of(model, cluster_assignment(d, model), d.clusters.size());
}

double tsr(const Decomposition& d, const HistoryRepresentation& rep, const EntityFileMap& files) {
    const auto total = rep.all_authors().size();
    if (total == 0) {
        throw Error("history has no authors");
    }
    if (d.clusters.empty()) {
        throw Error("decomposition has no clusters");
    }
    double sum = 0.0;
    for (const auto& cluster : d.clusters) {
        std::set<std::string> authors;
        for (const auto& entity : cluster) {
            const auto it = files.find(entity);
            if (it != files.end() && it->second) {
                const auto& names = rep.file_authors(*it->second);
                authors.insert(names.begin(), names.end());
            }
        }
        sum += static_cast<double>(authors.size());
    }
    return sum / static_cast<double>(d.clusters.size()) / static_cast<double>(total);
}

double combined(double uniform_complexity, double coupling, double tsr, double cohesion) {
    for (const double v : {uniform_complexity, coupling, tsr, cohesion}) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error("metric value " + std::to_string(v) + " outside [0, 1]");
        }
    }
    return (uniform_complexity + coupling + tsr - cohesion + 1.0) / 4.0;
}

MetricsEvaluator::MetricsEvaluator(const AccessModel& model, const HistoryRepresentation& rep,
                                   const EntityFileMap& files)
    : model_(model),
      max_complexity_sum_(static_cast<double>(max_complexity_sum(model))),
      accesses_(distinct_accesses(model)),
      entities_(distinct_entities(model)) {
    std::map<std::string, std::size_t> author_id;
    for (const auto& name : rep.all_authors()) {
        author_id.emplace(name, author_id.size());
    }
    total_authors_ = author_id.size();
    if (total_authors_ == 0) {
        throw Error("history has no authors");
    }
    entity_authors_.resize(model.entity_count());
    for (std::size_t e = 0; e < model.entity_count(); ++e) {
        const auto it = files.find(model.entities()[e]);
        if (it == files.end() || !it->second) {
            continue;
        }
        for (const auto& name : rep.file_authors(*it->second)) {
            entity_authors_[e].push_back(author_id.at(name));
        }
    }
}

MetricsRecord MetricsEvaluator::evaluate(const std::vector<std::size_t>& assignment, std::size_t n_clusters) const {
    if (assignment.size() != model_.entity_count() || n_clusters == 0) {
        throw Error("assignment does not match the access model");
    }
    MetricsRecord r;
    const long c = complexity_sum(model_, accesses_, assignment);
    r.uniform_complexity = max_complexity_sum_ == 0.0 ? 0.0 : static_cast<double>(c) / max_complexity_sum_;
    r.cohesion = cohesion_of(entities_, assignment, n_clusters);
    r.coupling = coupling_of(model_, assignment, n_clusters);

    std::vector<std::vector<bool>> seen(n_clusters, std::vector<bool>(total_authors_, false));
    double sum = 0.0;
    for (std::size_t e = 0; e < assignment.size(); ++e) {
        auto& row = seen[assignment[e]];
        for (const auto a : entity_authors_[e]) {
            if (!row[a]) {
                row[a] = true;
                sum += 1.0;
            }
        }
    }
    r.tsr = sum / static_cast<double>(n_clusters) / static_cast<double>(total_authors_);
    r.combined = combined(r.uniform_complexity, r.coupling, r.tsr, r.cohesion);
    return r;
}

MetricsRecord evaluate(const Decomposition& d, const AccessModel& model, const HistoryRepresentation& rep,
                       const EntityFileMap& files) {
    return MetricsEvaluator(model, rep, files).evaluate(cluster_assignment(d, model), d.clusters.size());
}

} // namespace msid
