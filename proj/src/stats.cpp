#include "msid/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "msid/csv.hpp"
#include "msid/error.hpp"

namespace msid::stats {

namespace {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};

Moments sample_moments(std::span<const double> xs) {
    Moments m;
    const auto n = static_cast<double>(xs.size());
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - m.mean) * (x - m.mean);
    }
    m.variance = ss / (n - 1.0);
    return m;
}

} // namespace

std::string_view metric_name(Metric m) {
    switch (m) {
    case Metric::UniformComplexity: return "uniformComplexity";
    case Metric::Cohesion: return "cohesion";
    case Metric::Coupling: return "coupling";
    case Metric::Tsr: return "tsr";
    case Metric::Combined: return "combined";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    for (const auto m : kAllMetrics) {
        if (metric_name(m) == name) {
            return m;
        }
    }
    throw Error("unknown metric '" + std::string(name) +
                "' (expected uniformComplexity, cohesion, coupling, tsr or combined)");
}

double metric_value(const MetricsRecord& r, Metric m) {
    switch (m) {
    case Metric::UniformComplexity: return r.uniform_complexity;
    case Metric::Cohesion: return r.cohesion;
    case Metric::Coupling: return r.coupling;
    case Metric::Tsr: return r.tsr;
    case Metric::Combined: return r.combined;
    }
    return 0.0;
}

bool lower_is_better(Metric m) { return m != Metric::Cohesion; }

double student_t_upper_tail(double t, double df) {
    const boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

WelchResult welch_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw Error("Welch test needs at least two values per sample");
    }
    const auto ma = sample_moments(a);
    const auto mb = sample_moments(b);
    const double va = ma.variance / static_cast<double>(a.size());
    const double vb = mb.variance / static_cast<double>(b.size());
    if (va + vb <= 0.0) {
        throw Error("Welch test undefined: both samples have zero variance");
    }

    WelchResult r;
    r.t_statistic = (ma.mean - mb.mean) / std::sqrt(va + vb);
    r.degrees_of_freedom =
        (va + vb) * (va + vb) /
        (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    r.p_value_one_sided = student_t_upper_tail(r.t_statistic, r.degrees_of_freedom);
    return r;
}

std::vector<ResultRow> best_decompositions(const std::vector<ResultRow>& rows, Metric metric) {
    std::map<std::pair<std::string, std::size_t>, const ResultRow*> best;
    for (const auto& row : rows) {
        auto& slot = best[{row.codebase, row.n_clusters}];
        if (!slot) {
            slot = &row;
            continue;
        }
        const double candidate = metric_value(row.metrics, metric);
        const double current = metric_value(slot->metrics, metric);
        const bool better = lower_is_better(metric) ? candidate < current : candidate > current;
        if (better || (candidate == current && row.weights < slot->weights)) {
            slot = &row;
        }
    }
    std::vector<ResultRow> out;
    out.reserve(best.size());
    for (const auto& [key, row] : best) {
        out.push_back(*row);
    }
    return out;
}

double quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw Error("quantile of an empty sample");
    }
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::map<RepresentationGroup, Summary> group_summary(const std::vector<ResultRow>& rows, Metric metric) {
    std::map<RepresentationGroup, std::vector<double>> values;
    for (const auto g : kAllGroups) {
        values[g];
    }
    for (const auto& row : rows) {
        values[row.group].push_back(metric_value(row.metrics, metric));
    }
    std::map<RepresentationGroup, Summary> out;
    for (auto& [group, xs] : values) {
        Summary s;
        s.count = xs.size();
        if (!xs.empty()) {
            std::sort(xs.begin(), xs.end());
            s.median = quantile(xs, 0.5);
            s.q1 = quantile(xs, 0.25);
            s.q3 = quantile(xs, 0.75);
        }
        out[group] = s;
    }
    return out;
}

std::map<RepresentationGroup, double> best_share_by_group(const std::vector<ResultRow>& best_rows) {
    std::map<RepresentationGroup, double> out;
    for (const auto g : kAllGroups) {
        out[g] = 0.0;
    }
    if (best_rows.empty()) {
        return out;
    }
    std::map<RepresentationGroup, std::size_t> counts;
    for (const auto& row : best_rows) {
        ++counts[row.group];
    }
    for (const auto& [group, n] : counts) {
        out[group] = 100.0 * static_cast<double>(n) / static_cast<double>(best_rows.size());
    }
    return out;
}

std::string_view size_label_name(SizeLabel l) { return l == SizeLabel::Large ? "LARGE" : "SMALL"; }

double size_threshold(double mean, double std_dev) { return mean + std_dev; }

double size_threshold(std::span<const double> values, Spread spread) {
    if (values.size() < 2) {
        throw Error("size split needs at least two codebases");
    }
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : values) {
        ss += (x - mean) * (x - mean);
    }
    const double divisor = spread == Spread::Population ? n : n - 1.0;
    return size_threshold(mean, std::sqrt(ss / divisor));
}

std::vector<CodebaseStats> size_split(const std::vector<CodebaseCounts>& counts, Spread spread) {
    if (counts.size() < 2) {
        throw Error("size split needs at least two codebases");
    }
    // Sorted copies make the thresholds independent of input order.
    std::vector<double> commits;
    std::vector<double> authors;
    for (const auto& c : counts) {
        commits.push_back(static_cast<double>(c.commits));
        authors.push_back(static_cast<double>(c.authors));
    }
    std::sort(commits.begin(), commits.end());
    std::sort(authors.begin(), authors.end());
    const double commit_threshold = size_threshold(commits, spread);
    const double author_threshold = size_threshold(authors, spread);

    std::vector<CodebaseStats> out;
    for (const auto& c : counts) {
        out.push_back({c.codebase, c.commits, c.authors,
                       static_cast<double>(c.commits) > commit_threshold ? SizeLabel::Large : SizeLabel::Small,
                       static_cast<double>(c.authors) > author_threshold ? SizeLabel::Large : SizeLabel::Small});
    }
    return out;
}

std::vector<CodebaseCounts> codebase_counts_from_csv(std::string_view text) {
    const auto records = csv::parse(text);
    if (records.empty() || records[0] != std::vector<std::string>{"codebase", "commits", "authors"}) {
        throw ParseError(1, "expected header codebase,commits,authors");
    }
    std::vector<CodebaseCounts> out;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i];
        if (f.size() != 3) {
            throw ParseError(i + 1, "expected 3 columns");
        }
        try {
            std::size_t used_c = 0;
            std::size_t used_a = 0;
            const long commits = std::stol(f[1], &used_c);
            const long authors = std::stol(f[2], &used_a);
            if (used_c != f[1].size() || used_a != f[2].size() || commits < 0 || authors < 0) {
                throw std::invalid_argument(f[1]);
            }
            out.push_back({f[0], commits, authors});
        } catch (const std::logic_error&) {
            throw ParseError(i + 1, "commits and authors must be non-negative integers");
        }
    }
    return out;
}

} // namespace msid::stats
