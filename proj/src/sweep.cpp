#include "msid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <sstream>
#include <thread>

#include "msid/clustering.hpp"
#include "msid/csv.hpp"
#include "msid/error.hpp"

namespace msid {

namespace {

void enumerate(int step, std::size_t k, int remaining, WeightVector& current, std::vector<WeightVector>& out) {
    if (k + 1 == kMeasureCount) {
        current.w[k] = remaining;
        out.push_back(current);
        return;
    }
    for (int v = 0; v <= remaining; v += step) {
        current.w[k] = v;
        enumerate(step, k + 1, remaining - v, current, out);
    }
}

template <typename T>
T parse_number(const std::string& s, std::size_t line, const char* column) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(line, std::string("invalid ") + column + " '" + s + "'");
    }
    return value;
}

double parse_double(const std::string& s, std::size_t line, const char* column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::logic_error&) {
    }
    throw ParseError(line, std::string("invalid ") + column + " '" + s + "'");
}

} // namespace

std::string_view group_name(RepresentationGroup g) {
    switch (g) {
    case RepresentationGroup::FilesOnly: return "FILES_ONLY";
    case RepresentationGroup::AuthorshipOnly: return "AUTHORSHIP_ONLY";
    case RepresentationGroup::SequencesOnly: return "SEQUENCES_ONLY";
    case RepresentationGroup::History: return "HISTORY";
    case RepresentationGroup::Combined: return "COMBINED";
    }
    return "?";
}

std::optional<RepresentationGroup> parse_group(std::string_view name) {
    for (const auto g : kAllGroups) {
        if (group_name(g) == name) {
            return g;
        }
    }
    return std::nullopt;
}

std::vector<WeightVector> enumerate_weights(int step) {
    if (step <= 0 || step > 100 || 100 % step != 0) {
        throw Error("weight step " + std::to_string(step) + " must divide 100");
    }
    std::vector<WeightVector> out;
    WeightVector current;
    enumerate(step, 0, 100, current, out);
    return out;
}

std::vector<std::size_t> cluster_counts(std::size_t n_entities) {
    if (n_entities < 3) {
        throw Error("too few entities");
    }
    const std::size_t last = n_entities < 10 ? 3 : n_entities < 20 ? 5 : 10;
    std::vector<std::size_t> out;
    for (std::size_t n = 3; n <= last; ++n) {
        out.push_back(n);
    }
    return out;
}

RepresentationGroup classify_group(const WeightVector& w) {
    if (w.sequence_weight() == 0) {
        if (w[Measure::Author] == 0) {
            return RepresentationGroup::FilesOnly;
        }
        if (w[Measure::Commit] == 0) {
            return RepresentationGroup::AuthorshipOnly;
        }
        return RepresentationGroup::History;
    }
    return w.history_weight() == 0 ? RepresentationGroup::SequencesOnly : RepresentationGroup::Combined;
}

SweepResult run_sweep(const AccessModel& model, const HistoryRepresentation& rep, const EntityFileMap& files,
                      const std::string& codebase, const SweepOptions& options) {
    const auto weights = enumerate_weights(options.step);
    const auto counts = cluster_counts(model.entity_count());
    const MeasureSet measures(model, rep, files);
    const MetricsEvaluator evaluator(model, rep, files);

    struct Slot {
        std::vector<ResultRow> rows;
        std::vector<SweepFailure> failures;
    };
    std::vector<Slot> slots(weights.size());

    // One task per weight vector: a single dendrogram serves every cut.
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (auto i = next.fetch_add(1); i < weights.size(); i = next.fetch_add(1)) {
            const auto& w = weights[i];
            auto& slot = slots[i];
            std::optional<Dendrogram> dendrogram;
            std::string error;
            try {
                dendrogram = agglomerate(to_dissimilarity(measures.blend(w)));
            } catch (const std::exception& e) {
                error = e.what();
            }
            for (const auto n : counts) {
                if (!dendrogram) {
                    slot.failures.push_back({w, n, error});
                    continue;
                }
                try {
                    const auto clusters = cut_indices(*dendrogram, n);
                    std::vector<std::size_t> assignment(model.entity_count());
                    for (std::size_t c = 0; c < clusters.size(); ++c) {
                        for (const auto e : clusters[c]) {
                            assignment[e] = c;
                        }
                    }
                    slot.rows.push_back({codebase, n, w, classify_group(w), evaluator.evaluate(assignment, n)});
                } catch (const std::exception& e) {
                    slot.failures.push_back({w, n, e.what()});
                }
            }
        }
    };

    const auto threads = std::max<std::size_t>(1, std::min(options.parallelism, weights.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    // Slots follow the lexicographic weight order, rows within a slot the
    // ascending cluster counts.
    SweepResult result;
    for (auto& slot : slots) {
        std::move(slot.rows.begin(), slot.rows.end(), std::back_inserter(result.rows));
        std::move(slot.failures.begin(), slot.failures.end(), std::back_inserter(result.failures));
    }
    return result;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        out << csv::escape(r.codebase) << ',' << r.n_clusters;
        for (const int w : r.weights.w) {
            out << ',' << w;
        }
        out << ',' << group_name(r.group);
        for (const double v : {r.metrics.uniform_complexity, r.metrics.cohesion, r.metrics.coupling, r.metrics.tsr,
                               r.metrics.combined}) {
            out << ',' << csv::format_fixed6(v);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<ResultRow> results_from_csv(std::string_view text) {
    const auto records = csv::parse(text);
    if (records.empty()) {
        throw ParseError(1, "empty results file");
    }
    std::string header;
    for (std::size_t k = 0; k < records[0].size(); ++k) {
        header += (k ? "," : "") + records[0][k];
    }
    if (header != kResultsHeader) {
        throw ParseError(1, "unexpected results header");
    }

    std::vector<ResultRow> rows;
    rows.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i];
        const auto line = i + 1;
        if (f.size() != 14) {
            throw ParseError(line, "expected 14 columns, got " + std::to_string(f.size()));
        }
        ResultRow r;
        r.codebase = f[0];
        r.n_clusters = parse_number<std::size_t>(f[1], line, "nClusters");
        for (std::size_t k = 0; k < kMeasureCount; ++k) {
            r.weights.w[k] = parse_number<int>(f[2 + k], line, "weight");
        }
        const auto group = parse_group(f[8]);
        if (!group) {
            throw ParseError(line, "unknown group '" + f[8] + "'");
        }
        r.group = *group;
        r.metrics.uniform_complexity = parse_double(f[9], line, "uniformComplexity");
        r.metrics.cohesion = parse_double(f[10], line, "cohesion");
        r.metrics.coupling = parse_double(f[11], line, "coupling");
        r.metrics.tsr = parse_double(f[12], line, "tsr");
        r.metrics.combined = parse_double(f[13], line, "combined");
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace msid
