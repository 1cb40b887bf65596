#include "msid/history.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <memory>
#include <unordered_map>

#include "msid/error.hpp"

namespace msid::history {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// git quotes paths containing unusual bytes C-style: "dir/na\"me.java".
std::string unquote_path(std::string_view raw, std::size_t line_no) {
    if (raw.empty() || raw.front() != '"') {
        return std::string(raw);
    }
    if (raw.size() < 2 || raw.back() != '"') {
        throw ParseError(line_no, "unterminated quoted path");
    }
    std::string out;
    const auto body = raw.substr(1, raw.size() - 2);
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '\\') {
            out.push_back(body[i]);
            continue;
        }
        if (++i >= body.size()) {
            throw ParseError(line_no, "dangling escape in quoted path");
        }
        switch (body[i]) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'a': out.push_back('\a'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'r': out.push_back('\r'); break;
        case 'v': out.push_back('\v'); break;
        default: {
            // \ooo octal byte
            int value = 0;
            for (std::size_t k = 0; k < 3; ++k) {
                const auto pos = i + k;
                if (pos >= body.size() || body[pos] < '0' || body[pos] > '7') {
                    throw ParseError(line_no, "bad escape in quoted path");
                }
                value = value * 8 + (body[pos] - '0');
            }
            i += 2;
            out.push_back(static_cast<char>(value));
        }
        }
    }
    return out;
}

bool matches(std::string_view path, std::string_view extension) {
    return path.size() >= extension.size() && path.substr(path.size() - extension.size()) == extension;
}

struct Header {
    std::string hash;
    std::int64_t timestamp = 0;
    std::string author;
};

Header parse_header(std::string_view line, std::size_t line_no) {
    const auto fields = split(line, '\t');
    if (fields.size() != 4 || fields[0] != "commit") {
        throw ParseError(line_no, "malformed commit header (expected commit<TAB>hash<TAB>time<TAB>email)");
    }
    Header h;
    if (fields[1].empty()) {
        throw ParseError(line_no, "missing commit hash");
    }
    h.hash = std::string(fields[1]);
    const auto ts = fields[2];
    const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), h.timestamp);
    if (ts.empty() || ec != std::errc{} || ptr != ts.data() + ts.size()) {
        throw ParseError(line_no, "missing or invalid commit timestamp");
    }
    if (fields[3].empty()) {
        throw ParseError(line_no, "missing author email");
    }
    h.author = lowercase(fields[3]);
    return h;
}

bool event_before(const ChangeEvent& a, const ChangeEvent& b) {
    if (a.timestamp != b.timestamp) {
        return a.timestamp < b.timestamp;
    }
    return a.commit_hash < b.commit_hash;
}

} // namespace

char status_letter(ChangeStatus s) {
    switch (s) {
    case ChangeStatus::Add: return 'A';
    case ChangeStatus::Delete: return 'D';
    case ChangeStatus::Modify: return 'M';
    case ChangeStatus::Rename: return 'R';
    }
    return '?';
}

std::vector<ChangeEvent> parse_git_log(std::string_view log_text, std::string_view extension) {
    std::vector<ChangeEvent> events;
    std::optional<Header> current;

    std::size_t line_no = 0;
    for (auto line : split(log_text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (line.starts_with("commit")) {
            current = parse_header(line, line_no);
            continue;
        }
        if (!current) {
            throw ParseError(line_no, "file change before any commit header");
        }

        const auto fields = split(line, '\t');
        const auto token = fields[0];
        if (token.empty()) {
            throw ParseError(line_no, "missing status letter");
        }

        ChangeEvent ev;
        ev.commit_hash = current->hash;
        ev.timestamp = current->timestamp;
        ev.author = current->author;

        const char letter = token[0];
        const auto score = token.substr(1);
        switch (letter) {
        case 'A': ev.status = ChangeStatus::Add; break;
        case 'D': ev.status = ChangeStatus::Delete; break;
        case 'M': ev.status = ChangeStatus::Modify; break;
        case 'R': ev.status = ChangeStatus::Rename; break;
        default:
            throw ParseError(line_no, std::string("unknown status letter '") + letter + "'");
        }

        if (ev.status != ChangeStatus::Rename) {
            if (!score.empty()) {
                throw ParseError(line_no, std::string("unexpected score after status '") + letter + "'");
            }
            if (fields.size() != 2 || fields[1].empty()) {
                throw ParseError(line_no, "expected <STATUS><TAB><path>");
            }
            ev.filename = unquote_path(fields[1], line_no);
            if (matches(ev.filename, extension)) {
                events.push_back(std::move(ev));
            }
            continue;
        }

        if (fields.size() != 3 || fields[1].empty() || fields[2].empty()) {
            throw ParseError(line_no, "expected R<similarity><TAB><old-path><TAB><new-path>");
        }
        int similarity = 0;
        const auto [ptr, ec] = std::from_chars(score.data(), score.data() + score.size(), similarity);
        if (score.empty() || ec != std::errc{} || ptr != score.data() + score.size()) {
            throw ParseError(line_no, "missing or invalid rename similarity");
        }
        if (similarity < 50 || similarity > 100) {
            throw ParseError(line_no, "rename similarity " + std::to_string(similarity) + " outside [50, 100]");
        }
        auto previous = unquote_path(fields[1], line_no);
        auto next = unquote_path(fields[2], line_no);
        const bool keep_previous = matches(previous, extension);
        if (matches(next, extension)) {
            ev.previous_filename = std::move(previous);
            ev.filename = std::move(next);
            ev.rename_similarity = similarity;
            events.push_back(std::move(ev));
        } else if (keep_previous) {
            // Moved out of the tracked file set.
            ev.status = ChangeStatus::Delete;
            ev.filename = std::move(previous);
            events.push_back(std::move(ev));
        }
    }

    std::stable_sort(events.begin(), events.end(), event_before);
    return events;
}

std::vector<ChangeEvent> resolve_renames(const std::vector<ChangeEvent>& events) {
    // Each distinct file gets an id; a rename moves the id to the new name.
    std::unordered_map<std::string, std::size_t> live;
    std::vector<std::string> final_name;
    std::vector<std::size_t> event_file(events.size());

    const auto lookup = [&](const std::string& name) {
        const auto it = live.find(name);
        if (it != live.end()) {
            return it->second;
        }
        const auto id = final_name.size();
        final_name.push_back(name);
        live.emplace(name, id);
        return id;
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        if (ev.status == ChangeStatus::Rename && ev.previous_filename) {
            const auto id = lookup(*ev.previous_filename);
            live.erase(*ev.previous_filename);
            live[ev.filename] = id;
            final_name[id] = ev.filename;
            event_file[i] = id;
        } else {
            event_file[i] = lookup(ev.filename);
        }
    }

    std::vector<ChangeEvent> out = events;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& name = final_name[event_file[i]];
        out[i].filename = name;
        if (out[i].previous_filename) {
            out[i].previous_filename = name;
        }
    }
    return out;
}

std::vector<ChangeEvent> prune_deleted(const std::vector<ChangeEvent>& events) {
    struct Span {
        std::optional<std::int64_t> last_delete;
        std::optional<std::int64_t> last_change;
    };
    std::unordered_map<std::string, Span> spans;
    for (const auto& ev : events) {
        auto& span = spans[ev.filename];
        auto& slot = ev.status == ChangeStatus::Delete ? span.last_delete : span.last_change;
        slot = slot ? std::max(*slot, ev.timestamp) : ev.timestamp;
    }

    std::vector<ChangeEvent> out;
    out.reserve(events.size());
    for (const auto& ev : events) {
        if (ev.status == ChangeStatus::Delete) {
            continue;
        }
        const auto& span = spans[ev.filename];
        if (span.last_delete && !(span.last_change && *span.last_change > *span.last_delete)) {
            continue;
        }
        out.push_back(ev);
    }
    return out;
}

std::set<std::string> large_commit_hashes(const std::vector<ChangeEvent>& events, std::size_t max_files) {
    std::map<std::string, std::set<std::string>> files;
    for (const auto& ev : events) {
        files[ev.commit_hash].insert(ev.filename);
    }
    std::set<std::string> out;
    for (const auto& [hash, names] : files) {
        if (names.size() > max_files) {
            out.insert(hash);
        }
    }
    return out;
}

std::vector<ChangeEvent> drop_commits(const std::vector<ChangeEvent>& events, const std::set<std::string>& hashes) {
    std::vector<ChangeEvent> out;
    out.reserve(events.size());
    std::copy_if(events.begin(), events.end(), std::back_inserter(out),
                 [&](const ChangeEvent& ev) { return hashes.count(ev.commit_hash) == 0; });
    return out;
}

std::vector<LogicalCommit> bundle_commits(const std::vector<ChangeEvent>& events, std::int64_t window_seconds) {
    std::vector<LogicalCommit> out;
    std::int64_t last_time = 0;
    const std::string* last_hash = nullptr;

    for (const auto& ev : events) {
        if (last_hash && *last_hash == ev.commit_hash) {
            out.back().files.insert(ev.filename);
            continue;
        }
        // First event of a new raw commit.
        const bool extend = !out.empty() && out.back().author == ev.author &&
                            ev.timestamp - last_time <= window_seconds;
        if (extend) {
            out.back().files.insert(ev.filename);
            ++out.back().raw_commit_count;
        } else {
            LogicalCommit c;
            c.first_timestamp = ev.timestamp;
            c.author = ev.author;
            c.files.insert(ev.filename);
            c.raw_commit_count = 1;
            out.push_back(std::move(c));
        }
        last_time = ev.timestamp;
        last_hash = &ev.commit_hash;
    }
    return out;
}

void HistoryRepresentation::add_commit(const std::set<std::string>& files, const std::string& author) {
    if (files.empty()) {
        throw Error("logical commit without files");
    }
    for (auto it = files.begin(); it != files.end(); ++it) {
        ++commit_count_[*it];
        authors_[*it].insert(author);
        for (auto jt = std::next(it); jt != files.end(); ++jt) {
            ++co_change_[*it][*jt];
            ++co_change_[*jt][*it];
        }
    }
}

int HistoryRepresentation::file_commit_count(const std::string& file) const {
    const auto it = commit_count_.find(file);
    if (it == commit_count_.end()) {
        throw Error("file not in history: " + file);
    }
    return it->second;
}

int HistoryRepresentation::co_change_count(const std::string& file, const std::string& other) const {
    const int own = file_commit_count(file);
    if (file == other) {
        return own;
    }
    if (!contains(other)) {
        throw Error("file not in history: " + other);
    }
    const auto row = co_change_.find(file);
    if (row == co_change_.end()) {
        return 0;
    }
    const auto cell = row->second.find(other);
    return cell == row->second.end() ? 0 : cell->second;
}

const std::set<std::string>& HistoryRepresentation::file_authors(const std::string& file) const {
    const auto it = authors_.find(file);
    if (it == authors_.end()) {
        throw Error("file not in history: " + file);
    }
    return it->second;
}

std::set<std::string> HistoryRepresentation::all_authors() const {
    std::set<std::string> out;
    for (const auto& [file, names] : authors_) {
        out.insert(names.begin(), names.end());
    }
    return out;
}

std::vector<std::string> HistoryRepresentation::files() const {
    std::vector<std::string> out;
    out.reserve(commit_count_.size());
    for (const auto& [file, count] : commit_count_) {
        out.push_back(file);
    }
    return out;
}

nlohmann::json HistoryRepresentation::to_json() const {
    nlohmann::json changes = nlohmann::json::object();
    for (const auto& [file, count] : commit_count_) {
        nlohmann::json with = nlohmann::json::object();
        if (const auto row = co_change_.find(file); row != co_change_.end()) {
            for (const auto& [other, k] : row->second) {
                with[other] = k;
            }
        }
        changes[file] = {{"count", count}, {"with", std::move(with)}};
    }
    nlohmann::json authorship = nlohmann::json::object();
    for (const auto& [file, names] : authors_) {
        authorship[file] = names;
    }
    return {{"fileChanges", std::move(changes)}, {"authorship", std::move(authorship)}};
}

HistoryRepresentation HistoryRepresentation::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("fileChanges") || !j.contains("authorship") ||
        !j["fileChanges"].is_object() || !j["authorship"].is_object()) {
        throw SchemaError("history: expected objects 'fileChanges' and 'authorship'");
    }
    HistoryRepresentation rep;
    for (const auto& [file, entry] : j["fileChanges"].items()) {
        if (!entry.is_object() || !entry.contains("count") || !entry["count"].is_number_integer() ||
            entry["count"].get<int>() < 1) {
            throw SchemaError("history: file '" + file + "' needs a positive integer 'count'");
        }
        rep.commit_count_[file] = entry["count"].get<int>();
        if (entry.contains("with")) {
            if (!entry["with"].is_object()) {
                throw SchemaError("history: 'with' of '" + file + "' must be an object");
            }
            auto& row = rep.co_change_[file];
            for (const auto& [other, k] : entry["with"].items()) {
                if (!k.is_number_integer() || k.get<int>() < 1 || other == file) {
                    throw SchemaError("history: bad co-change entry " + file + " -> " + other);
                }
                row[other] = k.get<int>();
            }
        }
    }
    for (const auto& [file, names] : j["authorship"].items()) {
        if (!names.is_array() || names.empty()) {
            throw SchemaError("history: authorship of '" + file + "' must be a non-empty array");
        }
        auto& set = rep.authors_[file];
        for (const auto& n : names) {
            if (!n.is_string()) {
                throw SchemaError("history: author of '" + file + "' must be a string");
            }
            set.insert(n.get<std::string>());
        }
    }

    for (const auto& [file, count] : rep.commit_count_) {
        if (rep.authors_.count(file) == 0) {
            throw SchemaError("history: file '" + file + "' has no authorship entry");
        }
    }
    for (const auto& [file, names] : rep.authors_) {
        if (rep.commit_count_.count(file) == 0) {
            throw SchemaError("history: file '" + file + "' has authors but no change count");
        }
    }
    for (const auto& [file, row] : rep.co_change_) {
        for (const auto& [other, k] : row) {
            if (rep.commit_count_.count(other) == 0) {
                throw SchemaError("history: co-change with unknown file '" + other + "'");
            }
            const auto back = rep.co_change_.find(other);
            const int mirrored = back == rep.co_change_.end() || back->second.count(file) == 0
                                     ? 0
                                     : back->second.at(file);
            if (mirrored != k) {
                throw SchemaError("history: co-change counts of '" + file + "' and '" + other +
                                  "' are not symmetric");
            }
        }
    }
    // Keep "with": {} rows out of the map so equality is structural.
    std::erase_if(rep.co_change_, [](const auto& kv) { return kv.second.empty(); });
    return rep;
}

std::string HistoryRepresentation::serialize() const { return to_json().dump(2) + "\n"; }

HistoryRepresentation HistoryRepresentation::parse(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("history: invalid JSON: ") + e.what());
    }
    return from_json(j);
}

HistoryRepresentation build_history_representation(const std::vector<LogicalCommit>& commits,
                                                   std::size_t max_files) {
    HistoryRepresentation rep;
    for (const auto& c : commits) {
        if (c.files.empty() || c.files.size() > max_files) {
            continue;
        }
        rep.add_commit(c.files, c.author);
    }
    if (rep.empty()) {
        throw Error("no usable history");
    }
    return rep;
}

MiningResult mine(std::string_view log_text, const MiningOptions& options) {
    const auto parsed = parse_git_log(log_text, options.extension);
    const auto canonical = resolve_renames(parsed);
    const auto large = large_commit_hashes(canonical, options.max_files);
    const auto kept = drop_commits(prune_deleted(canonical), large);
    const auto logical = bundle_commits(kept, options.window_seconds);

    MiningResult result;
    result.representation = build_history_representation(logical, options.max_files);
    std::set<std::string> hashes;
    for (const auto& ev : parsed) {
        hashes.insert(ev.commit_hash);
    }
    result.raw_commits = hashes.size();
    result.logical_commits = logical.size();
    return result;
}

std::string read_git_log(const std::string& repo_path) {
    std::string quoted = "'";
    for (const char c : repo_path) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    const std::string command = "git -C " + quoted +
                                " log --reverse --name-status --find-renames --pretty=format:\"" +
                                kGitLogFormat + "\" 2>/dev/null";

    struct PipeCloser {
        int* status;
        void operator()(FILE* f) const { *status = pclose(f); }
    };
    int status = -1;
    std::string output;
    {
        std::unique_ptr<FILE, PipeCloser> pipe(popen(command.c_str(), "r"), PipeCloser{&status});
        if (!pipe) {
            throw Error("cannot run git");
        }
        std::array<char, 65536> buffer{};
        std::size_t n = 0;
        while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe.get())) > 0) {
            output.append(buffer.data(), n);
        }
    }
    if (status != 0) {
        throw Error("git log failed in '" + repo_path + "'");
    }
    return output;
}

} // namespace msid::history
