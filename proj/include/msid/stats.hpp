#pragma once

// Analysis of sweep results: best decompositions, per-group summaries,
// codebase size labels and one-sided Welch t-tests.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msid/sweep.hpp"

namespace msid::stats {

enum class Metric { UniformComplexity, Cohesion, Coupling, Tsr, Combined };

inline constexpr Metric kAllMetrics[] = {Metric::UniformComplexity, Metric::Cohesion, Metric::Coupling,
                                         Metric::Tsr, Metric::Combined};

// Names match the results CSV columns.
std::string_view metric_name(Metric m);
// Throws msid::Error for unknown names.
Metric parse_metric(std::string_view name);
double metric_value(const MetricsRecord& r, Metric m);
// Cohesion is the only metric where higher is better.
bool lower_is_better(Metric m);

struct WelchResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value_one_sided = 0.0;  // H1: mean(a) > mean(b)
};

// P(T > t) for Student's t with df degrees of freedom.
double student_t_upper_tail(double t, double df);

// Throws msid::Error if a sample has fewer than two values or both
// variances are zero.
WelchResult welch_test(std::span<const double> a, std::span<const double> b);

// One row per (codebase, nClusters), optimal in `metric`; ties go to the
// lexicographically smallest weight vector. Ordered by (codebase, nClusters).
std::vector<ResultRow> best_decompositions(const std::vector<ResultRow>& rows, Metric metric);

struct Summary {
    std::size_t count = 0;
    std::optional<double> median;
    std::optional<double> q1;
    std::optional<double> q3;
};

// Type-7 (linear interpolation) quantile of an ascending sample.
double quantile(std::span<const double> sorted, double p);

std::map<RepresentationGroup, Summary> group_summary(const std::vector<ResultRow>& rows, Metric metric);

// Percentage of rows per group; every group is present, summing to 100.
std::map<RepresentationGroup, double> best_share_by_group(const std::vector<ResultRow>& best_rows);

enum class SizeLabel { Large, Small };
enum class Spread { Population, Sample };

std::string_view size_label_name(SizeLabel l);

struct CodebaseCounts {
    std::string codebase;
    long commits = 0;
    long authors = 0;
};

struct CodebaseStats {
    std::string codebase;
    long commit_count = 0;
    long author_count = 0;
    SizeLabel size_label_commits = SizeLabel::Small;
    SizeLabel size_label_authors = SizeLabel::Small;
};

// mean + one standard deviation
double size_threshold(double mean, double std_dev);
double size_threshold(std::span<const double> values, Spread spread = Spread::Population);

// LARGE iff the count is strictly above the threshold. Needs >= 2 codebases.
std::vector<CodebaseStats> size_split(const std::vector<CodebaseCounts>& counts, Spread spread = Spread::Population);

// "codebase,commits,authors" with a header row.
std::vector<CodebaseCounts> codebase_counts_from_csv(std::string_view text);

} // namespace msid::stats
