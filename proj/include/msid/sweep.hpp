#pragma once

// Full experiment sweep for one codebase: every weight vector of the grid,
// every cluster count of the codebase's size band, scored and classified.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msid/access_model.hpp"
#include "msid/history.hpp"
#include "msid/metrics.hpp"
#include "msid/similarity.hpp"

namespace msid {

enum class RepresentationGroup { FilesOnly, AuthorshipOnly, SequencesOnly, History, Combined };

inline constexpr RepresentationGroup kAllGroups[] = {
    RepresentationGroup::FilesOnly, RepresentationGroup::AuthorshipOnly, RepresentationGroup::SequencesOnly,
    RepresentationGroup::History, RepresentationGroup::Combined};

std::string_view group_name(RepresentationGroup g);
std::optional<RepresentationGroup> parse_group(std::string_view name);

// All weight vectors whose entries are multiples of step and sum to 100, in
// lexicographic order. step must divide 100.
std::vector<WeightVector> enumerate_weights(int step = 10);

// 3..9 entities -> {3}; 10..19 -> {3,4,5}; 20+ -> {3..10}.
std::vector<std::size_t> cluster_counts(std::size_t n_entities);

RepresentationGroup classify_group(const WeightVector& w);

struct ResultRow {
    std::string codebase;
    std::size_t n_clusters = 0;
    WeightVector weights;
    RepresentationGroup group = RepresentationGroup::Combined;
    MetricsRecord metrics;
};

struct SweepFailure {
    WeightVector weights;
    std::size_t n_clusters = 0;
    std::string message;
};

struct SweepResult {
    std::vector<ResultRow> rows;  // sorted by (weights, n_clusters)
    std::vector<SweepFailure> failures;
};

struct SweepOptions {
    int step = 10;
    std::size_t parallelism = 1;
};

SweepResult run_sweep(const AccessModel& model, const HistoryRepresentation& rep, const EntityFileMap& files,
                      const std::string& codebase, const SweepOptions& options = {});

inline constexpr const char* kResultsHeader =
    "codebase,nClusters,wAccess,wRead,wWrite,wSequence,wCommit,wAuthor,group,"
    "uniformComplexity,cohesion,coupling,tsr,combined";

std::string results_to_csv(const std::vector<ResultRow>& rows);
// Throws msid::ParseError on a malformed header or row.
std::vector<ResultRow> results_from_csv(std::string_view text);

} // namespace msid
