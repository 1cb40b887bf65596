#pragma once

// Mining of a git log into the two development-history representations:
// per-file change counts with pairwise co-change counts, and per-file
// author sets.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace msid::history {

enum class ChangeStatus { Add, Delete, Modify, Rename };

char status_letter(ChangeStatus s);

struct ChangeEvent {
    std::string commit_hash;
    std::int64_t timestamp = 0;
    std::string author;
    ChangeStatus status = ChangeStatus::Modify;
    std::optional<std::string> previous_filename;  // present iff Rename
    std::string filename;
    std::optional<int> rename_similarity;  // present iff Rename, 50..100

    bool operator==(const ChangeEvent&) const = default;
};

struct LogicalCommit {
    std::int64_t first_timestamp = 0;
    std::string author;
    std::set<std::string> files;
    int raw_commit_count = 0;
};

class HistoryRepresentation {
public:
    using CoChangeRow = std::map<std::string, int>;

    HistoryRepresentation() = default;

    // Records one logical commit. Files must be non-empty.
    void add_commit(const std::set<std::string>& files, const std::string& author);

    bool contains(const std::string& file) const { return commit_count_.count(file) != 0; }
    bool empty() const { return commit_count_.empty(); }

    int file_commit_count(const std::string& file) const;
    // 0 when the two files never changed together; for file == other the
    // file's own commit count.
    int co_change_count(const std::string& file, const std::string& other) const;
    const std::set<std::string>& file_authors(const std::string& file) const;

    const std::map<std::string, int>& commit_counts() const { return commit_count_; }
    const std::map<std::string, CoChangeRow>& co_changes() const { return co_change_; }
    const std::map<std::string, std::set<std::string>>& authorship() const { return authors_; }

    std::set<std::string> all_authors() const;
    std::vector<std::string> files() const;

    nlohmann::json to_json() const;
    static HistoryRepresentation from_json(const nlohmann::json& j);

    // Canonical serialization: sorted keys, two-space indent, trailing newline.
    std::string serialize() const;
    static HistoryRepresentation parse(std::string_view text);

    bool operator==(const HistoryRepresentation&) const = default;

private:
    std::map<std::string, int> commit_count_;
    std::map<std::string, CoChangeRow> co_change_;
    std::map<std::string, std::set<std::string>> authors_;
};

// `git log --reverse --name-status --find-renames
//  --pretty=format:"commit%x09%H%x09%ct%x09%ae"`
inline constexpr const char* kGitLogFormat = "commit%x09%H%x09%ct%x09%ae";

// Parses the output of the log command above. Events come back sorted by
// (timestamp, hash) with per-commit line order preserved. Paths not ending
// in `extension` are dropped; a rename that moves a file out of the filter
// becomes a Delete of its previous name.
std::vector<ChangeEvent> parse_git_log(std::string_view log_text, std::string_view extension = ".java");

// Rewrites every file name to the last name its file carried, following
// rename edges in chronological order.
std::vector<ChangeEvent> resolve_renames(const std::vector<ChangeEvent>& events);

// Drops every file whose last Delete is not followed by a later change, and
// removes Delete events from the result.
std::vector<ChangeEvent> prune_deleted(const std::vector<ChangeEvent>& events);

// Hashes of raw commits touching more than max_files distinct files.
std::set<std::string> large_commit_hashes(const std::vector<ChangeEvent>& events, std::size_t max_files = 100);

std::vector<ChangeEvent> drop_commits(const std::vector<ChangeEvent>& events, const std::set<std::string>& hashes);

// Groups raw commits into runs by one author where each consecutive gap is
// at most window_seconds.
std::vector<LogicalCommit> bundle_commits(const std::vector<ChangeEvent>& events, std::int64_t window_seconds = 3600);

// Throws msid::Error("no usable history") if no commit survives the
// max_files filter.
HistoryRepresentation build_history_representation(const std::vector<LogicalCommit>& commits,
                                                   std::size_t max_files = 100);

struct MiningOptions {
    std::string extension = ".java";
    std::int64_t window_seconds = 3600;
    std::size_t max_files = 100;
};

struct MiningResult {
    HistoryRepresentation representation;
    std::size_t raw_commits = 0;
    std::size_t logical_commits = 0;
};

// parse -> resolve renames -> prune deletes -> drop large commits -> bundle -> count.
// Large commits are identified before pruning so their deletes still count.
MiningResult mine(std::string_view log_text, const MiningOptions& options = {});

// Runs the log command inside repo_path and returns its stdout.
std::string read_git_log(const std::string& repo_path);

} // namespace msid::history
