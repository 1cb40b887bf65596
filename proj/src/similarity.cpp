#include "msid/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "msid/error.hpp"

namespace msid {

namespace {

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

template <typename Set>
std::size_t intersection_size(const Set& a, const Set& b) {
    std::size_t n = 0;
    for (const auto& x : a) {
        n += b.count(x);
    }
    return n;
}

double mode_ratio(const AccessModel& model, std::size_t i, std::size_t j, ModeFilter mode) {
    const auto& fi = model.functionality_ids(i, mode);
    if (fi.empty()) {
        return 0.0;
    }
    return static_cast<double>(intersection_size(fi, model.functionality_ids(j, mode))) /
           static_cast<double>(fi.size());
}

// Symmetric table of adjacent-pair counts between distinct entities.
struct PairCounts {
    std::size_t n = 0;
    std::vector<long> counts;
    long max = 0;

    explicit PairCounts(const AccessModel& model) : n(model.entity_count()), counts(n * n, 0) {
        for (const auto& trace : model.indexed_traces()) {
            for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
                const auto a = trace[k].entity;
                const auto b = trace[k + 1].entity;
                if (a == b) {
                    continue;
                }
                ++counts[a * n + b];
                ++counts[b * n + a];
            }
        }
        max = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    }

    double ratio(std::size_t i, std::size_t j) const {
        if (i == j || max == 0) {
            return 0.0;
        }
        return static_cast<double>(counts[i * n + j]) / static_cast<double>(max);
    }
};

std::string format6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

void WeightVector::validate() const {
    int sum = 0;
    for (const int x : w) {
        if (x < 0 || x > 100) {
            throw Error("weight " + std::to_string(x) + " outside [0, 100]");
        }
        sum += x;
    }
    if (sum != 100) {
        throw Error("weights sum to " + std::to_string(sum) + ", expected 100");
    }
}

WeightVector WeightVector::parse(std::string_view text) {
    WeightVector out;
    std::size_t k = 0;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const auto part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (k == kMeasureCount) {
            throw Error("expected 6 comma-separated weights");
        }
        try {
            std::size_t used = 0;
            const std::string s(part);
            out.w[k] = std::stoi(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
        } catch (const std::logic_error&) {
            throw Error("invalid weight '" + std::string(part) + "'");
        }
        ++k;
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (k != kMeasureCount) {
        throw Error("expected 6 comma-separated weights");
    }
    out.validate();
    return out;
}

std::string WeightVector::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < kMeasureCount; ++k) {
        if (k) {
            out += ',';
        }
        out += std::to_string(w[k]);
    }
    return out;
}

EntityFileResolution map_entities_to_files(const AccessModel& model, const HistoryRepresentation& rep,
                                           std::string_view extension) {
    std::map<std::string, std::vector<std::string>> by_basename;
    for (const auto& [file, count] : rep.commit_counts()) {
        const auto slash = file.find_last_of('/');
        by_basename[slash == std::string::npos ? file : file.substr(slash + 1)].push_back(file);
    }

    EntityFileResolution out;
    for (const auto& entity : model.entities()) {
        const auto it = by_basename.find(entity + std::string(extension));
        if (it == by_basename.end()) {
            out.files[entity] = std::nullopt;
            out.warnings.push_back("entity '" + entity + "' has no history file; history measures are 0");
            continue;
        }
        auto candidates = it->second;
        std::sort(candidates.begin(), candidates.end(), [](const std::string& a, const std::string& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        if (candidates.size() > 1) {
            out.warnings.push_back("entity '" + entity + "' matches " + std::to_string(candidates.size()) +
                                   " files; using " + candidates.front());
        }
        out.files[entity] = candidates.front();
    }
    return out;
}

double sm_mode(const AccessModel& model, const std::string& e_i, const std::string& e_j, ModeFilter mode) {
    return mode_ratio(model, model.entity_index(e_i), model.entity_index(e_j), mode);
}

double sm_sequence(const AccessModel& model, const std::string& e_i, const std::string& e_j) {
    const auto i = model.entity_index(e_i);
    const auto j = model.entity_index(e_j);
    return PairCounts(model).ratio(i, j);
}

double sm_commit(const HistoryRepresentation& rep, const std::string& f_i, const std::string& f_j) {
    const int own = rep.file_commit_count(f_i);
    return static_cast<double>(rep.co_change_count(f_i, f_j)) / static_cast<double>(own);
}

double sm_author(const HistoryRepresentation& rep, const std::string& f_i, const std::string& f_j) {
    const auto& a = rep.file_authors(f_i);
    const auto& b = rep.file_authors(f_j);
    if (a.empty()) {
        return 0.0;
    }
    return static_cast<double>(intersection_size(a, b)) / static_cast<double>(a.size());
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> entities)
    : entities_(std::move(entities)), values_(entities_.size() * entities_.size(), 0.0) {}

std::string SimilarityMatrix::to_csv() const {
    std::ostringstream out;
    out << "entity";
    for (const auto& e : entities_) {
        out << ',' << e;
    }
    out << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
        out << entities_[i];
        for (std::size_t j = 0; j < size(); ++j) {
            out << ',' << format6((*this)(i, j));
        }
        out << '\n';
    }
    return out.str();
}

MeasureSet::MeasureSet(const AccessModel& model, const HistoryRepresentation& rep, const EntityFileMap& files) {
    const auto& entities = model.entities();
    const auto n = entities.size();
    for (auto& m : matrices_) {
        m = SimilarityMatrix(entities);
    }

    std::vector<const std::string*> file_of(n, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = files.find(entities[i]);
        if (it == files.end()) {
            unmapped_.push_back(entities[i]);
        } else if (it->second) {
            if (!rep.contains(*it->second)) {
                throw Error("entity '" + entities[i] + "' maps to '" + *it->second + "', which is not in the history");
            }
            file_of[i] = &*it->second;
        }
    }

    const PairCounts pairs(model);
    auto& access = matrices_[static_cast<std::size_t>(Measure::Access)];
    auto& read = matrices_[static_cast<std::size_t>(Measure::Read)];
    auto& write = matrices_[static_cast<std::size_t>(Measure::Write)];
    auto& sequence = matrices_[static_cast<std::size_t>(Measure::Sequence)];
    auto& commit = matrices_[static_cast<std::size_t>(Measure::Commit)];
    auto& author = matrices_[static_cast<std::size_t>(Measure::Author)];

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                for (auto& m : matrices_) {
                    m(i, i) = 1.0;
                }
                continue;
            }
            access(i, j) = mode_ratio(model, i, j, ModeFilter::Any);
            read(i, j) = mode_ratio(model, i, j, ModeFilter::Read);
            write(i, j) = mode_ratio(model, i, j, ModeFilter::Write);
            sequence(i, j) = pairs.ratio(i, j);
            if (file_of[i] && file_of[j]) {
                commit(i, j) = sm_commit(rep, *file_of[i], *file_of[j]);
                author(i, j) = sm_author(rep, *file_of[i], *file_of[j]);
            }
        }
    }
}

SimilarityMatrix MeasureSet::blend(const WeightVector& weights) const {
    weights.validate();
    if (weights.history_weight() > 0 && !unmapped_.empty()) {
        std::string list;
        for (const auto& e : unmapped_) {
            list += (list.empty() ? "" : ", ") + e;
        }
        throw Error("entities without a file mapping: " + list);
    }

    SimilarityMatrix out(matrices_[0].entities());
    const auto n = out.size();
    for (std::size_t k = 0; k < kMeasureCount; ++k) {
        if (weights.w[k] == 0) {
            continue;
        }
        const double coefficient = weights.w[k] / 100.0;
        const auto& m = matrices_[k];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += coefficient * m(i, j);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // weights/100 need not sum to exactly 1.0 in binary
            out(i, j) = i == j ? 1.0 : std::min(out(i, j), 1.0);
        }
    }
    return out;
}

SimilarityMatrix build_matrix(const AccessModel& model, const HistoryRepresentation& rep,
                              const EntityFileMap& files, const WeightVector& weights) {
    weights.validate();
    return MeasureSet(model, rep, files).blend(weights);
}

} // namespace msid
