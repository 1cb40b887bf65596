#pragma once

// Pairwise entity similarity measures and their weighted blend.
//
// Four measures come from the access traces (access, read, write, sequence)
// and two from the development history (commit, author). All ratio measures
// divide by a property of the first argument, so the resulting matrix is in
// general asymmetric.

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msid/access_model.hpp"
#include "msid/history.hpp"

namespace msid {

using history::HistoryRepresentation;

enum class Measure { Access, Read, Write, Sequence, Commit, Author };
inline constexpr std::size_t kMeasureCount = 6;

// Six integer weights in [0, 100] summing to 100.
struct WeightVector {
    std::array<int, kMeasureCount> w{};

    int operator[](Measure m) const { return w[static_cast<std::size_t>(m)]; }
    int history_weight() const { return (*this)[Measure::Commit] + (*this)[Measure::Author]; }
    int sequence_weight() const {
        return (*this)[Measure::Access] + (*this)[Measure::Read] + (*this)[Measure::Write] + (*this)[Measure::Sequence];
    }

    // Throws msid::Error unless every weight is in [0, 100] and the sum is 100.
    void validate() const;

    // "a,r,w,s,c,au"
    static WeightVector parse(std::string_view text);
    std::string to_string() const;

    auto operator<=>(const WeightVector&) const = default;
};

// entity -> history file; std::nullopt marks an entity with no matching
// file, whose history measures are 0.
using EntityFileMap = std::map<std::string, std::optional<std::string>>;

struct EntityFileResolution {
    EntityFileMap files;
    std::vector<std::string> warnings;
};

// Entity X maps to the history file whose basename is X + extension. With
// several candidates the shortest path wins (then lexicographic order).
EntityFileResolution map_entities_to_files(const AccessModel& model, const HistoryRepresentation& rep,
                                           std::string_view extension = ".java");

// |e_i.funct(mode) ∩ e_j.funct(mode)| / |e_i.funct(mode)|, 0 on an empty denominator.
double sm_mode(const AccessModel& model, const std::string& e_i, const std::string& e_j, ModeFilter mode);

// Adjacent-pair count of {e_i, e_j} over all traces, normalised by the
// largest such count over all entity pairs.
double sm_sequence(const AccessModel& model, const std::string& e_i, const std::string& e_j);

double sm_commit(const HistoryRepresentation& rep, const std::string& f_i, const std::string& f_j);
double sm_author(const HistoryRepresentation& rep, const std::string& f_i, const std::string& f_j);

class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::vector<std::string> entities);

    std::size_t size() const { return entities_.size(); }
    const std::vector<std::string>& entities() const { return entities_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * entities_.size() + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * entities_.size() + j]; }

    // Header row of entity names, then one row per entity; 6 decimals.
    std::string to_csv() const;

private:
    std::vector<std::string> entities_;
    std::vector<double> values_;
};

// The six per-measure matrices of a codebase. Computing them once makes
// blending for many weight vectors cheap.
class MeasureSet {
public:
    // Entities missing from `files` are recorded and only rejected when a
    // blend uses history weights. Mapped files must exist in `rep`.
    MeasureSet(const AccessModel& model, const HistoryRepresentation& rep, const EntityFileMap& files);

    const SimilarityMatrix& measure(Measure m) const { return matrices_[static_cast<std::size_t>(m)]; }
    const std::vector<std::string>& unmapped() const { return unmapped_; }

    // Weighted sum of the measures divided by 100; diagonal fixed to 1.
    SimilarityMatrix blend(const WeightVector& weights) const;

private:
    std::array<SimilarityMatrix, kMeasureCount> matrices_;
    std::vector<std::string> unmapped_;
};

SimilarityMatrix build_matrix(const AccessModel& model, const HistoryRepresentation& rep,
                              const EntityFileMap& files, const WeightVector& weights);

} // namespace msid
