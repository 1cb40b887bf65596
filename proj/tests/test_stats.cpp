#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "msid/error.hpp"
#include "msid/stats.hpp"

using namespace msid;
using namespace msid::stats;

namespace {

double t_pdf(double x, double df) {
    const double log_c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * M_PI);
    return std::exp(log_c - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

// P(T > t) by composite Simpson on [0, |t|] and symmetry.
double t_upper_simpson(double t, double df) {
    const int n = 20000;
    const double b = std::abs(t);
    const double h = b / n;
    double s = t_pdf(0.0, df) + t_pdf(b, df);
    for (int i = 1; i < n; ++i) {
        s += (i % 2 ? 4.0 : 2.0) * t_pdf(i * h, df);
    }
    const double mass = s * h / 3.0;
    return t >= 0 ? 0.5 - mass : 0.5 + mass;
}

ResultRow row(const std::string& codebase, std::size_t n, const std::string& w, double value) {
    ResultRow r;
    r.codebase = codebase;
    r.n_clusters = n;
    r.weights = WeightVector::parse(w);
    r.group = classify_group(r.weights);
    r.metrics = {value, value, value, value, value};
    return r;
}

} // namespace

TEST_SUITE("stats") {

TEST_CASE("Welch reference values") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 3, 4, 5, 6};
    const auto r = welch_test(a, b);
    CHECK(r.t_statistic == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.degrees_of_freedom == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(std::abs(r.p_value_one_sided - 0.8267) <= 5e-4);
    CHECK(std::abs(r.p_value_one_sided - t_upper_simpson(-1.0, 8.0)) <= 1e-9);
}

TEST_CASE("identical samples give t = 0 and p = 0.5") {
    const std::vector<double> a{0.3, 0.1, 0.7, 0.2};
    const auto r = welch_test(a, a);
    CHECK(r.t_statistic == 0.0);
    CHECK(r.p_value_one_sided == doctest::Approx(0.5));
}

TEST_CASE("far separated samples give a tiny p") {
    const std::vector<double> a{100.0, 100.001, 99.999, 100.0005};
    const std::vector<double> b{1.0, 1.001, 0.999, 1.0005};
    CHECK(welch_test(a, b).p_value_one_sided < 1e-6);
}

TEST_CASE("Welch input errors") {
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    const std::vector<double> flat{3.0, 3.0};
    CHECK_THROWS_AS(welch_test(one, two), Error);
    CHECK_THROWS_AS(welch_test(two, one), Error);
    CHECK_THROWS_AS(welch_test(flat, flat), Error);
    CHECK_NOTHROW(welch_test(flat, two));
}

TEST_CASE("Welch with unequal variances and sizes matches hand values") {
    const std::vector<double> a{10, 12, 14};
    const std::vector<double> b{1, 2, 3, 4, 5, 6, 7};
    // var(a) = 4, var(b) = 14/3
    const double va = 4.0 / 3.0;
    const double vb = (14.0 / 3.0) / 7.0;
    const double t = (12.0 - 4.0) / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb) / (va * va / 2.0 + vb * vb / 6.0);
    const auto r = welch_test(a, b);
    CHECK(r.t_statistic == doctest::Approx(t).epsilon(1e-12));
    CHECK(r.degrees_of_freedom == doctest::Approx(df).epsilon(1e-12));
    CHECK(std::abs(r.p_value_one_sided - t_upper_simpson(t, df)) <= 1e-9);
}

TEST_CASE("property: Student-t tail matches quadrature") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ts(-6.0, 6.0);
    std::uniform_real_distribution<double> dfs(1.5, 60.0);
    for (int i = 0; i < 100; ++i) {
        const double t = ts(rng);
        const double df = dfs(rng);
        CHECK(std::abs(student_t_upper_tail(t, df) - t_upper_simpson(t, df)) <= 1e-8);
    }
}

TEST_CASE("property: swapping samples negates t and mirrors p") {
    std::mt19937 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> a(3 + rng() % 10);
        std::vector<double> b(3 + rng() % 10);
        const double shift = g(rng);
        for (auto& x : a) {
            x = g(rng) + shift;
        }
        for (auto& x : b) {
            x = 2.0 * g(rng);
        }
        const auto ab = welch_test(a, b);
        const auto ba = welch_test(b, a);
        CHECK(std::abs(ab.t_statistic + ba.t_statistic) <= 1e-12);
        CHECK(std::abs(ab.degrees_of_freedom - ba.degrees_of_freedom) <= 1e-9);
        CHECK(std::abs(ab.p_value_one_sided + ba.p_value_one_sided - 1.0) <= 1e-12);
        CHECK(ab.degrees_of_freedom >= std::min(a.size(), b.size()) - 1.0 - 1e-9);
        CHECK(ab.degrees_of_freedom <= a.size() + b.size() - 2.0 + 1e-9);
    }
}

TEST_CASE("best decomposition per codebase and cluster count") {
    const std::vector<ResultRow> rows{
        row("a", 3, "0,0,0,0,0,100", 0.3),
        row("a", 3, "0,0,0,0,100,0", 0.2),
        row("a", 3, "100,0,0,0,0,0", 0.4),
    };
    const auto best = best_decompositions(rows, Metric::Combined);
    REQUIRE(best.size() == 1);
    CHECK(best[0].metrics.combined == 0.2);

    const auto top = best_decompositions(rows, Metric::Cohesion);
    REQUIRE(top.size() == 1);
    CHECK(top[0].metrics.cohesion == 0.4);
}

TEST_CASE("ties go to the smaller weight vector") {
    const std::vector<ResultRow> rows{
        row("a", 3, "100,0,0,0,0,0", 0.2),
        row("a", 3, "0,0,0,0,100,0", 0.2),
        row("a", 3, "0,50,0,0,50,0", 0.2),
    };
    CHECK(best_decompositions(rows, Metric::Coupling)[0].weights.to_string() == "0,0,0,0,100,0");
    CHECK(best_decompositions(rows, Metric::Cohesion)[0].weights.to_string() == "0,0,0,0,100,0");
}

TEST_CASE("one best row per codebase and cluster count") {
    std::vector<ResultRow> rows;
    for (const auto& cb : {"a", "b"}) {
        for (const std::size_t n : {3u, 4u}) {
            rows.push_back(row(cb, n, "100,0,0,0,0,0", 0.5));
            rows.push_back(row(cb, n, "0,100,0,0,0,0", 0.1));
        }
    }
    const auto best = best_decompositions(rows, Metric::Tsr);
    CHECK(best.size() == 4);
    for (const auto& r : best) {
        CHECK(r.metrics.tsr == 0.1);
    }
}

TEST_CASE("quantiles and group summaries") {
    const std::vector<double> three{1, 2, 3};
    CHECK(quantile(three, 0.5) == 2.0);
    const std::vector<double> four{1, 2, 3, 4};
    CHECK(quantile(four, 0.5) == 2.5);
    CHECK(quantile(four, 0.25) == 1.75);
    CHECK(quantile(four, 0.75) == 3.25);
    CHECK(quantile(four, 0.0) == 1.0);
    CHECK(quantile(four, 1.0) == 4.0);
    CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), Error);

    const std::vector<ResultRow> rows{
        row("a", 3, "0,0,0,0,0,100", 4.0),
        row("a", 3, "0,10,0,0,0,90", 1.0),
        row("a", 3, "0,20,0,0,0,80", 3.0),
        row("a", 3, "0,30,0,0,0,70", 2.0),
    };
    const auto s = group_summary(rows, Metric::UniformComplexity);
    CHECK(s.size() == 5);
    const auto& combined = s.at(RepresentationGroup::Combined);
    CHECK(combined.count == 3);
    CHECK(combined.median == 2.0);
    const auto& authorship = s.at(RepresentationGroup::AuthorshipOnly);
    CHECK(authorship.count == 1);
    CHECK(authorship.q1 == 4.0);
    const auto& empty = s.at(RepresentationGroup::FilesOnly);
    CHECK(empty.count == 0);
    CHECK_FALSE(empty.median.has_value());
    CHECK_FALSE(empty.q3.has_value());
}

TEST_CASE("property: quantiles match a sort-and-interpolate oracle") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> xs(1 + rng() % 30);
        for (auto& x : xs) {
            x = u(rng);
        }
        std::sort(xs.begin(), xs.end());
        for (const double p : {0.25, 0.5, 0.75}) {
            const double pos = p * (xs.size() - 1);
            const auto k = static_cast<std::size_t>(pos);
            const double frac = pos - k;
            const double expected = k + 1 < xs.size() ? xs[k] * (1 - frac) + xs[k + 1] * frac : xs[k];
            CHECK(std::abs(quantile(xs, p) - expected) <= 1e-12);
        }
        CHECK(quantile(xs, 0.25) <= quantile(xs, 0.5));
        CHECK(quantile(xs, 0.5) <= quantile(xs, 0.75));
    }
}

TEST_CASE("best share by group") {
    std::vector<ResultRow> best;
    for (int i = 0; i < 13; ++i) {
        best.push_back(row("c" + std::to_string(i), 3, "50,0,0,0,50,0", 0));
    }
    for (int i = 0; i < 3; ++i) {
        best.push_back(row("s" + std::to_string(i), 3, "100,0,0,0,0,0", 0));
    }
    const auto share = best_share_by_group(best);
    CHECK(share.at(RepresentationGroup::Combined) == doctest::Approx(81.25));
    CHECK(share.at(RepresentationGroup::SequencesOnly) == doctest::Approx(18.75));
    CHECK(share.at(RepresentationGroup::History) == 0.0);

    best.resize(13);
    CHECK(best_share_by_group(best).at(RepresentationGroup::Combined) == 100.0);
    CHECK(best_share_by_group({}).at(RepresentationGroup::Combined) == 0.0);
}

TEST_CASE("size thresholds") {
    CHECK(size_threshold(3080.8, 7604.5) == doctest::Approx(10685.3).epsilon(1e-12));
    const std::vector<double> equal{5, 5, 5};
    CHECK(size_threshold(equal) == 5.0);
    const std::vector<double> two{100, 10000};
    CHECK(size_threshold(two) == 10000.0);
    CHECK(size_threshold(two, Spread::Sample) == doctest::Approx(5050.0 + 4950.0 * std::sqrt(2.0)));
    CHECK_THROWS_AS(size_threshold(std::vector<double>{1.0}), Error);
}

TEST_CASE("size split labels") {
    const auto equal = size_split({{"a", 5, 2}, {"b", 5, 2}, {"c", 5, 2}});
    for (const auto& s : equal) {
        CHECK(s.size_label_commits == SizeLabel::Small);
        CHECK(s.size_label_authors == SizeLabel::Small);
    }
    const auto pair = size_split({{"small", 100, 1}, {"big", 10000, 50}});
    CHECK(pair[1].size_label_commits == SizeLabel::Small);
    CHECK(pair[1].size_label_authors == SizeLabel::Small);

    const auto skewed = size_split({{"a", 1, 1}, {"b", 2, 1}, {"c", 3, 1}, {"d", 1000, 40}});
    CHECK(skewed[3].codebase == "d");
    CHECK(skewed[3].size_label_commits == SizeLabel::Large);
    CHECK(skewed[3].size_label_authors == SizeLabel::Large);
    CHECK(skewed[0].size_label_commits == SizeLabel::Small);
    CHECK(size_label_name(SizeLabel::Large) == "LARGE");
    CHECK_THROWS_AS(size_split({{"a", 1, 1}}), Error);
}

TEST_CASE("property: size split does not depend on input order") {
    std::mt19937 rng(8);
    for (int i = 0; i < 50; ++i) {
        std::vector<CodebaseCounts> counts;
        for (int k = 0; k < 2 + i % 20; ++k) {
            counts.push_back({"c" + std::to_string(k), static_cast<long>(rng() % 5000), static_cast<long>(rng() % 60)});
        }
        const auto a = size_split(counts);
        auto shuffled = counts;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto b = size_split(shuffled);
        for (const auto& x : a) {
            const auto it = std::find_if(b.begin(), b.end(), [&](const CodebaseStats& y) { return y.codebase == x.codebase; });
            REQUIRE(it != b.end());
            CHECK(it->size_label_commits == x.size_label_commits);
            CHECK(it->size_label_authors == x.size_label_authors);
        }
    }
}

TEST_CASE("codebase counts CSV") {
    const auto counts = codebase_counts_from_csv("codebase,commits,authors\nx,10,2\n\"y,z\",5,1\n");
    REQUIRE(counts.size() == 2);
    CHECK(counts[1].codebase == "y,z");
    CHECK(counts[1].commits == 5);
    CHECK_THROWS_AS(codebase_counts_from_csv("name,commits,authors\n"), ParseError);
    CHECK_THROWS_AS(codebase_counts_from_csv("codebase,commits,authors\nx,10\n"), ParseError);
    CHECK_THROWS_AS(codebase_counts_from_csv("codebase,commits,authors\nx,-1,2\n"), ParseError);
    CHECK_THROWS_AS(codebase_counts_from_csv("codebase,commits,authors\nx,1.5,2\n"), ParseError);
}

TEST_CASE("metric names") {
    for (const auto m : kAllMetrics) {
        CHECK(parse_metric(metric_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_metric("performance"), Error);
    CHECK(lower_is_better(Metric::Combined));
    CHECK_FALSE(lower_is_better(Metric::Cohesion));
}

} // TEST_SUITE
