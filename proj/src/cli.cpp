#include "msid/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "msid/access_model.hpp"
#include "msid/clustering.hpp"
#include "msid/error.hpp"
#include "msid/history.hpp"
#include "msid/metrics.hpp"
#include "msid/similarity.hpp"
#include "msid/stats.hpp"
#include "msid/sweep.hpp"

namespace msid::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::size_t parallelism = std::max(1u, std::thread::hardware_concurrency());
    bool quiet = false;

    std::string input;
    std::string out;
    std::string history;
    std::string accesses;
    std::string codebase = "codebase";
    std::string extension = ".java";
    std::int64_t window_seconds = 3600;
    std::size_t max_files = 100;
    int step = 10;

    std::string weights;
    std::size_t clusters = 0;
    std::string matrix_csv;

    std::string best_metric;
    bool groups = false;
    std::vector<std::string> welch;
    std::string size_split;
    bool sample_std = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) {
        throw Error("cannot write '" + path + "'");
    }
}

double round6(double v) {
    const double r = std::round(v * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;
}

// Output files must land in an existing directory.
const auto kWritablePath = CLI::Validator(
    [](std::string& path) -> std::string {
        const auto parent = fs::path(path).parent_path();
        if (!parent.empty() && !fs::is_directory(parent)) {
            return "directory of '" + path + "' does not exist";
        }
        if (fs::is_directory(path)) {
            return "'" + path + "' is a directory";
        }
        return {};
    },
    "WRITABLE");

struct Loaded {
    history::HistoryRepresentation rep;
    AccessModel model;
    EntityFileResolution mapping;
};

Loaded load_inputs(const RunConfig& cfg, std::ostream& err) {
    auto rep = history::HistoryRepresentation::parse(read_file(cfg.history));
    auto model = AccessModel::parse(read_file(cfg.accesses));
    auto mapping = map_entities_to_files(model, rep, cfg.extension);
    if (!cfg.quiet) {
        for (const auto& w : mapping.warnings) {
            err << "warning: " << w << '\n';
        }
    }
    return {std::move(rep), std::move(model), std::move(mapping)};
}

int run_mine(const RunConfig& cfg, std::ostream& err) {
    const auto log = fs::is_directory(cfg.input) ? history::read_git_log(cfg.input) : read_file(cfg.input);
    history::MiningOptions options;
    options.extension = cfg.extension;
    options.window_seconds = cfg.window_seconds;
    options.max_files = cfg.max_files;
    const auto result = history::mine(log, options);
    write_file(cfg.out, result.representation.serialize());
    if (!cfg.quiet) {
        err << "mined " << result.raw_commits << " commits into " << result.logical_commits
            << " logical commits; " << result.representation.commit_counts().size() << " files, "
            << result.representation.all_authors().size() << " authors\n";
    }
    return kExitOk;
}

int run_decompose(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto weights = WeightVector::parse(cfg.weights);
    const auto in = load_inputs(cfg, err);
    const auto matrix = build_matrix(in.model, in.rep, in.mapping.files, weights);
    if (!cfg.matrix_csv.empty()) {
        write_file(cfg.matrix_csv, matrix.to_csv());
    }
    auto d = decompose(matrix, cfg.clusters);
    d.codebase = cfg.codebase;
    d.weights = weights;
    write_file(cfg.out, d.to_json().dump(2) + "\n");

    if (!cfg.quiet) {
        const auto m = evaluate(d, in.model, in.rep, in.mapping.files);
        out << json{{"uniformComplexity", round6(m.uniform_complexity)},
                    {"cohesion", round6(m.cohesion)},
                    {"coupling", round6(m.coupling)},
                    {"tsr", round6(m.tsr)},
                    {"combined", round6(m.combined)}}
                   .dump()
            << '\n';
    }
    return kExitOk;
}

int run_sweep_command(const RunConfig& cfg, std::ostream& err) {
    const auto in = load_inputs(cfg, err);
    SweepOptions options;
    options.step = cfg.step;
    options.parallelism = cfg.parallelism;
    const auto result = run_sweep(in.model, in.rep, in.mapping.files, cfg.codebase, options);
    write_file(cfg.out, results_to_csv(result.rows));
    for (const auto& f : result.failures) {
        err << "failed: weights " << f.weights.to_string() << " clusters " << f.n_clusters << ": " << f.message
            << '\n';
    }
    if (!cfg.quiet) {
        err << "wrote " << result.rows.size() << " decompositions";
        if (!result.failures.empty()) {
            err << " (" << result.failures.size() << " failed)";
        }
        err << '\n';
    }
    return kExitOk;
}

json row_json(const ResultRow& r) {
    return {{"codebase", r.codebase},
            {"nClusters", r.n_clusters},
            {"weights", r.weights.w},
            {"group", group_name(r.group)},
            {"uniformComplexity", round6(r.metrics.uniform_complexity)},
            {"cohesion", round6(r.metrics.cohesion)},
            {"coupling", round6(r.metrics.coupling)},
            {"tsr", round6(r.metrics.tsr)},
            {"combined", round6(r.metrics.combined)}};
}

std::vector<double> group_values(const std::vector<ResultRow>& rows, RepresentationGroup g, stats::Metric m) {
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.group == g) {
            out.push_back(stats::metric_value(r.metrics, m));
        }
    }
    return out;
}

int run_analyze(const RunConfig& cfg) {
    const auto rows = results_from_csv(read_file(cfg.input));
    if (rows.empty()) {
        throw Error("results file has no rows");
    }

    json report = {{"summaries", nullptr}, {"best", nullptr}, {"welch", nullptr}, {"sizeLabels", nullptr}};

    if (cfg.groups) {
        json summaries = json::object();
        for (const auto m : stats::kAllMetrics) {
            json per_group = json::object();
            for (const auto& [group, s] : stats::group_summary(rows, m)) {
                json entry = {{"count", s.count}};
                if (s.median) {
                    entry["median"] = round6(*s.median);
                    entry["q1"] = round6(*s.q1);
                    entry["q3"] = round6(*s.q3);
                }
                per_group[std::string(group_name(group))] = std::move(entry);
            }
            summaries[std::string(stats::metric_name(m))] = std::move(per_group);
        }
        report["summaries"] = std::move(summaries);
    }

    if (!cfg.best_metric.empty()) {
        const auto metric = stats::parse_metric(cfg.best_metric);
        const auto best = stats::best_decompositions(rows, metric);
        json list = json::array();
        for (const auto& r : best) {
            list.push_back(row_json(r));
        }
        json share = json::object();
        for (const auto& [group, pct] : stats::best_share_by_group(best)) {
            share[std::string(group_name(group))] = round6(pct);
        }
        report["best"] = {{"metric", stats::metric_name(metric)}, {"rows", std::move(list)}, {"shareByGroup", share}};
    }

    if (!cfg.welch.empty()) {
        const auto a = parse_group(cfg.welch[0]);
        const auto b = parse_group(cfg.welch[1]);
        if (!a || !b) {
            throw Error("unknown representation group in --welch");
        }
        const auto metric = stats::parse_metric(cfg.welch[2]);
        const auto xs = group_values(rows, *a, metric);
        const auto ys = group_values(rows, *b, metric);
        const auto w = stats::welch_test(xs, ys);
        report["welch"] = {{"groupA", group_name(*a)},
                           {"groupB", group_name(*b)},
                           {"metric", stats::metric_name(metric)},
                           {"nA", xs.size()},
                           {"nB", ys.size()},
                           {"t", round6(w.t_statistic)},
                           {"df", round6(w.degrees_of_freedom)},
                           {"p", round6(w.p_value_one_sided)}};
    }

    if (!cfg.size_split.empty()) {
        const auto counts = stats::codebase_counts_from_csv(read_file(cfg.size_split));
        const auto labels =
            stats::size_split(counts, cfg.sample_std ? stats::Spread::Sample : stats::Spread::Population);
        json out = json::object();
        for (const auto& s : labels) {
            out[s.codebase] = {{"commits", s.commit_count},
                               {"authors", s.author_count},
                               {"commitsLabel", stats::size_label_name(s.size_label_commits)},
                               {"authorsLabel", stats::size_label_name(s.size_label_authors)}};
        }
        report["sizeLabels"] = std::move(out);
    }

    write_file(cfg.out, report.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Candidate microservice identification from development history and access sequences", "msid"};
    app.set_version_flag("--version", std::string("msid ") + kVersion);
    app.require_subcommand(1);
    app.add_option("--parallelism", cfg.parallelism, "Worker threads for sweep")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--quiet", cfg.quiet, "Suppress progress and warning output");
    // Global flags may follow the subcommand too.
    app.fallthrough();

    auto* mine = app.add_subcommand("mine", "Mine a git repository or saved log into history.json");
    mine->add_option("input", cfg.input, "Repository directory or file with the git log output")
        ->required()
        ->check(CLI::ExistingPath);
    mine->add_option("--ext", cfg.extension, "File suffix to keep")->capture_default_str();
    mine->add_option("--window-secs", cfg.window_seconds, "Same-author commit bundling gap")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    mine->add_option("--max-files", cfg.max_files, "Ignore commits touching more files than this")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mine->add_option("--out", cfg.out, "Output history.json")->required()->check(kWritablePath);

    const auto add_model_inputs = [&](CLI::App* sub) {
        sub->add_option("--history", cfg.history, "history.json from mine")->required()->check(CLI::ExistingFile);
        sub->add_option("--accesses", cfg.accesses, "accesses.json")->required()->check(CLI::ExistingFile);
        sub->add_option("--ext", cfg.extension, "Suffix mapping entity names to history files")
            ->capture_default_str();
    };

    auto* decomp = app.add_subcommand("decompose", "Build one decomposition");
    add_model_inputs(decomp);
    decomp->add_option("--weights", cfg.weights, "access,read,write,sequence,commit,author (sum 100)")->required();
    decomp->add_option("--clusters", cfg.clusters, "Number of clusters")->required()->check(CLI::PositiveNumber);
    decomp->add_option("--codebase", cfg.codebase, "Codebase name")->capture_default_str();
    decomp->add_option("--matrix-csv", cfg.matrix_csv, "Also write the similarity matrix")->check(kWritablePath);
    decomp->add_option("--out", cfg.out, "Output decomposition.json")->required()->check(kWritablePath);

    auto* sweep = app.add_subcommand("sweep", "Score every weight vector and cluster count");
    add_model_inputs(sweep);
    sweep->add_option("--codebase", cfg.codebase, "Codebase name")->required();
    sweep->add_option("--step", cfg.step, "Weight grid step (divides 100)")
        ->check(CLI::Range(1, 100))
        ->capture_default_str();
    sweep->add_option("--out", cfg.out, "Output results.csv")->required()->check(kWritablePath);

    auto* analyze = app.add_subcommand("analyze", "Summarise and compare sweep results");
    analyze->add_option("results", cfg.input, "results.csv from sweep")->required()->check(CLI::ExistingFile);
    analyze->add_option("--best", cfg.best_metric, "Best decomposition per codebase and cluster count");
    analyze->add_flag("--groups", cfg.groups, "Median and quartiles per representation group");
    analyze->add_option("--welch", cfg.welch, "One-sided Welch test: GROUP_A GROUP_B METRIC")->expected(3);
    analyze->add_option("--size-split", cfg.size_split, "CSV codebase,commits,authors")->check(CLI::ExistingFile);
    analyze->add_flag("--sample-std", cfg.sample_std, "Use the sample standard deviation for --size-split");
    analyze->add_option("--out", cfg.out, "Output report.json")->required()->check(kWritablePath);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back();  // program name
    }
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (mine->parsed()) {
            return run_mine(cfg, err);
        }
        if (decomp->parsed()) {
            return run_decompose(cfg, out, err);
        }
        if (sweep->parsed()) {
            return run_sweep_command(cfg, err);
        }
        return run_analyze(cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace msid::cli
