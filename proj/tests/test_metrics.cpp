#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "msid/error.hpp"
#include "msid/metrics.hpp"
#include "oracle.hpp"

using namespace msid;
using history::HistoryRepresentation;

namespace {

Decomposition decomposition(std::vector<std::vector<std::string>> clusters) {
    Decomposition d;
    d.clusters = std::move(clusters);
    return d;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("complexity of two cross-mode functionalities") {
    const auto model = AccessModel::parse(R"({"f1": [["A", "R"], ["B", "W"]], "f2": [["B", "R"], ["A", "W"]]})");
    const auto split = decomposition({{"A"}, {"B"}});
    CHECK(complexity(split, model) == 2.0);
    CHECK(max_complexity(model) == 2.0);
    CHECK(uniform_complexity(split, model) == 1.0);
    const auto together = decomposition({{"A", "B"}});
    CHECK(complexity(together, model) == 0.0);
    CHECK(uniform_complexity(together, model) == 0.0);
}

TEST_CASE("a single-entity functionality is never distributed") {
    const auto model = AccessModel::parse(R"({"f1": [["A", "R"], ["B", "W"]], "f2": [["B", "R"]]})");
    CHECK(complexity(decomposition({{"A"}, {"B"}}), model) == 0.0);
}

TEST_CASE("uniform complexity is zero when nothing can be distributed") {
    const auto model = AccessModel::parse(R"({"f1": [["A", "R"]], "f2": [["B", "W"], ["B", "R"]]})");
    CHECK(max_complexity(model) == 0.0);
    CHECK(uniform_complexity(decomposition({{"A"}, {"B"}}), model) == 0.0);
}

TEST_CASE("cohesion") {
    const auto model = AccessModel::parse(R"({"f1": [["A", "R"], ["B", "R"]], "f2": [["A", "W"]]})");
    CHECK(cohesion(decomposition({{"A", "B"}}), model) == doctest::Approx(0.75));
    CHECK(cohesion(decomposition({{"A"}, {"B"}}), model) == 1.0);
}

TEST_CASE("coupling") {
    const auto model = AccessModel::parse(R"({"f": [["A", "R"], ["B", "R"]], "g": [["C", "W"]]})");
    CHECK(coupling(decomposition({{"A"}, {"B", "C"}}), model) == doctest::Approx(0.25));
    CHECK(coupling(decomposition({{"A", "B", "C"}}), model) == 0.0);
    CHECK(coupling(decomposition({{"A", "B"}, {"C"}}), model) == 0.0);
}

TEST_CASE("team size reduction") {
    const auto model = AccessModel::parse(R"({"f": [["A", "R"], ["B", "R"], ["C", "R"], ["D", "R"]]})");
    HistoryRepresentation rep;
    rep.add_commit({"A.java"}, "x");
    rep.add_commit({"B.java"}, "y");
    rep.add_commit({"C.java"}, "y");
    rep.add_commit({"D.java"}, "z");
    rep.add_commit({"E.java"}, "w");
    const EntityFileMap files{{"A", "A.java"}, {"B", "B.java"}, {"C", "C.java"}, {"D", "D.java"}};
    CHECK(tsr(decomposition({{"A", "B"}, {"C", "D"}}), rep, files) == doctest::Approx(0.5));

    HistoryRepresentation three;
    three.add_commit({"A.java"}, "x");
    three.add_commit({"B.java"}, "y");
    three.add_commit({"C.java"}, "z");
    const EntityFileMap abc{{"A", "A.java"}, {"B", "B.java"}, {"C", "C.java"}};
    CHECK(tsr(decomposition({{"A", "B", "C"}}), three, abc) == 1.0);
    CHECK(tsr(decomposition({{"A"}, {"B"}, {"C"}}), three, abc) == doctest::Approx(1.0 / 3.0));

    // unmapped entities contribute no authors
    const EntityFileMap partial{{"A", "A.java"}, {"B", std::nullopt}};
    CHECK(tsr(decomposition({{"A"}, {"B"}}), three, partial) == doctest::Approx(1.0 / 6.0));

    CHECK_THROWS_AS(tsr(decomposition({{"A"}}), HistoryRepresentation{}, abc), Error);
}

TEST_CASE("combined score") {
    CHECK(combined(0, 0, 0, 1) == 0.0);
    CHECK(combined(1, 1, 1, 0) == 1.0);
    CHECK(combined(0.5, 0.25, 0.5, 0.75) == doctest::Approx(0.375));
    CHECK_THROWS_AS(combined(1.5, 0, 0, 0), Error);
    CHECK_THROWS_AS(combined(0, -0.1, 0, 0), Error);
    CHECK_THROWS_AS(combined(0, 0, 0, std::nan("")), Error);
}

TEST_CASE("decompositions must cover the model exactly") {
    const auto model = AccessModel::parse(R"({"f": [["A", "R"], ["B", "R"]]})");
    CHECK_THROWS_AS(cluster_assignment(decomposition({{"A"}}), model), Error);
    CHECK_THROWS_AS(cluster_assignment(decomposition({{"A"}, {"B"}, {}}), model), Error);
    CHECK_THROWS_AS(cluster_assignment(decomposition({{"A", "B"}, {"B"}}), model), Error);
    CHECK_THROWS_AS(cluster_assignment(decomposition({{"A", "B"}, {"C"}}), model), Error);
    CHECK(cluster_assignment(decomposition({{"B"}, {"A"}}), model) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("evaluator agrees with the free functions") {
    const auto model = AccessModel::parse(R"({
        "f1": [["A", "R"], ["B", "W"], ["C", "R"]],
        "f2": [["B", "R"], ["A", "W"]],
        "f3": [["C", "W"], ["D", "R"]]
    })");
    HistoryRepresentation rep;
    rep.add_commit({"A.java", "B.java"}, "x");
    rep.add_commit({"C.java", "D.java"}, "y");
    const EntityFileMap files{{"A", "A.java"}, {"B", "B.java"}, {"C", "C.java"}, {"D", "D.java"}};
    const auto d = decomposition({{"A", "C"}, {"B", "D"}});
    const auto r = evaluate(d, model, rep, files);
    CHECK(r.uniform_complexity == uniform_complexity(d, model));
    CHECK(r.cohesion == cohesion(d, model));
    CHECK(r.coupling == coupling(d, model));
    CHECK(r.tsr == tsr(d, rep, files));
    CHECK(r.combined == combined(r.uniform_complexity, r.coupling, r.tsr, r.cohesion));

    const MetricsEvaluator evaluator(model, rep, files);
    CHECK_THROWS_AS(evaluator.evaluate({0, 1}, 2), Error);
    CHECK_THROWS_AS(evaluator.evaluate({0, 1, 0, 1}, 0), Error);
}

TEST_CASE("property: metrics match the brute-force oracle on random decompositions") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 300; ++trial) {
        const auto funcs = oracle::random_funcs(rng, 2 + trial % 7, 1 + trial % 6, 6);
        const auto model = oracle::to_model(funcs);
        const auto& es = model.entities();
        std::vector<std::string> files;
        for (const auto& e : es) {
            files.push_back(e + ".java");
        }
        const auto commits = oracle::random_commits(rng, files, 1 + trial % 6, 4);
        const auto rep = oracle::to_history(commits);
        EntityFileMap map;
        std::map<std::string, std::string> oracle_files;
        for (const auto& e : es) {
            const bool mapped = rep.contains(e + ".java");
            map[e] = mapped ? std::optional<std::string>(e + ".java") : std::nullopt;
            oracle_files[e] = mapped ? e + ".java" : "";
        }
        const std::size_t k = 1 + static_cast<std::size_t>(rng() % es.size());
        const auto clusters = oracle::random_partition(rng, es, k);
        const auto d = oracle::to_decomposition(clusters);
        const auto r = evaluate(d, model, rep, map);
        CAPTURE(trial);
        CHECK(std::abs(r.uniform_complexity - oracle::uniform_complexity(funcs, clusters)) <= 1e-12);
        CHECK(std::abs(r.cohesion - oracle::cohesion(funcs, clusters)) <= 1e-12);
        CHECK(std::abs(r.coupling - oracle::coupling(funcs, clusters)) <= 1e-12);
        CHECK(std::abs(r.tsr - oracle::tsr(commits, oracle_files, clusters)) <= 1e-12);
        CHECK(std::abs(complexity(d, model) - oracle::complexity(funcs, clusters)) <= 1e-12);
        CHECK(std::abs(max_complexity(model) - oracle::max_complexity(funcs)) <= 1e-12);
        for (const double v : {r.uniform_complexity, r.cohesion, r.coupling, r.tsr, r.combined}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("property: metrics do not depend on cluster or member order") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto funcs = oracle::random_funcs(rng, 3 + trial % 5, 2 + trial % 4, 5);
        const auto model = oracle::to_model(funcs);
        const auto& es = model.entities();
        HistoryRepresentation rep;
        EntityFileMap map;
        for (const auto& e : es) {
            rep.add_commit({e + ".java"}, "dev" + std::to_string(rng() % 3));
            map[e] = e + ".java";
        }
        auto clusters = oracle::random_partition(rng, es, 1 + rng() % es.size());
        const auto a = evaluate(oracle::to_decomposition(clusters), model, rep, map);
        std::shuffle(clusters.begin(), clusters.end(), rng);
        for (auto& c : clusters) {
            std::shuffle(c.begin(), c.end(), rng);
        }
        const auto b = evaluate(oracle::to_decomposition(clusters), model, rep, map);
        CHECK(std::abs(a.uniform_complexity - b.uniform_complexity) <= 1e-12);
        CHECK(std::abs(a.cohesion - b.cohesion) <= 1e-12);
        CHECK(std::abs(a.coupling - b.coupling) <= 1e-12);
        CHECK(std::abs(a.tsr - b.tsr) <= 1e-12);
    }
}

} // TEST_SUITE
