#include "patchprov/diff_model.hpp"

#include <optional>

namespace patchprov {
namespace {

bool starts_with(std::string_view s, std::string_view prefix)
{
    return s.substr(0, prefix.size()) == prefix;
}

// Strip the conventional a/ or b/ prefix and anything after a tab
// (timestamps in traditional diffs).
std::string clean_path(std::string_view raw, std::string_view prefix)
{
    auto tab = raw.find('\t');
    if (tab != std::string_view::npos)
        raw = raw.substr(0, tab);
    while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\r'))
        raw.remove_suffix(1);
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        std::string out;
        for (size_t i = 1; i + 1 < raw.size(); ++i) {
            char c = raw[i];
            if (c == '\\' && i + 2 < raw.size()) {
                char n = raw[++i];
                switch (n) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '\\': out += '\\'; break;
                case '"': out += '"'; break;
                default: out += n; break;
                }
            } else {
                out += c;
            }
        }
        raw = std::string_view {};
        if (starts_with(out, prefix))
            return out.substr(prefix.size());
        return out;
    }
    if (raw == "/dev/null")
        return std::string(raw);
    if (starts_with(raw, prefix))
        raw.remove_prefix(prefix.size());
    return std::string(raw);
}

struct LineReader {
    std::string_view text;
    size_t pos = 0;

    bool done() const { return pos >= text.size(); }

    std::string_view next()
    {
        auto end = text.find('\n', pos);
        std::string_view line;
        if (end == std::string_view::npos) {
            line = text.substr(pos);
            pos = text.size();
        } else {
            line = text.substr(pos, end - pos);
            pos = end + 1;
        }
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        return line;
    }
};

bool parse_int(std::string_view s, size_t& i, int& out)
{
    if (i >= s.size() || s[i] < '0' || s[i] > '9')
        return false;
    long v = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        v = v * 10 + (s[i] - '0');
        if (v > 1000000000)
            return false;
        ++i;
    }
    out = static_cast<int>(v);
    return true;
}

} // namespace

bool parse_hunk_header(std::string_view line, HunkHeader& out)
{
    // @@ -old_start[,old_len] +new_start[,new_len] @@ [section]
    if (!starts_with(line, "@@ -"))
        return false;
    size_t i = 4;
    HunkHeader h;
    if (!parse_int(line, i, h.old_start))
        return false;
    h.old_len = 1; // omitted length means 1
    if (i < line.size() && line[i] == ',') {
        ++i;
        if (!parse_int(line, i, h.old_len))
            return false;
    }
    if (i + 1 >= line.size() || line[i] != ' ' || line[i + 1] != '+')
        return false;
    i += 2;
    if (!parse_int(line, i, h.new_start))
        return false;
    h.new_len = 1;
    if (i < line.size() && line[i] == ',') {
        ++i;
        if (!parse_int(line, i, h.new_len))
            return false;
    }
    if (line.substr(i, 3) != " @@")
        return false;
    out = h;
    return true;
}

PullRequestDiff parse_unified_diff(std::string_view text)
{
    PullRequestDiff result;
    LineReader reader { text };

    std::optional<FileDiff> current;
    Hunk* hunk = nullptr;
    int old_remaining = 0;
    int new_remaining = 0;
    bool seen_new_marker = false; // "+++" seen for the current file
    // After a malformed hunk header or a GIT binary patch body we skip
    // everything up to the next file boundary.
    bool skipping = false;

    auto finish_file = [&] {
        if (current) {
            if (old_remaining > 0 || new_remaining > 0) {
                current->malformed = true;
                if (current->error_note.empty())
                    current->error_note = "hunk body ended early";
            }
            result.files.push_back(std::move(*current));
        }
        current.reset();
        hunk = nullptr;
        old_remaining = new_remaining = 0;
        seen_new_marker = false;
        skipping = false;
    };

    auto ensure_file = [&]() -> FileDiff& {
        if (!current)
            current.emplace();
        return *current;
    };

    while (!reader.done()) {
        std::string_view line = reader.next();

        if (starts_with(line, "diff --git ")) {
            finish_file();
            auto& f = ensure_file();
            std::string_view rest = line.substr(11);
            // "a/P1 b/P2"; paths containing " b/" are not disambiguated.
            auto sep = rest.find(" b/");
            if (sep != std::string_view::npos) {
                f.old_path = clean_path(rest.substr(0, sep), "a/");
                f.new_path = clean_path(rest.substr(sep + 1), "b/");
            }
            continue;
        }

        if (skipping)
            continue;

        // Inside a hunk body, consume lines by the header's line accounting.
        if (hunk && (old_remaining > 0 || new_remaining > 0)) {
            if (!line.empty() && line[0] == '\\') {
                // "\ No newline at end of file" is metadata, not content.
                continue;
            }
            char marker = line.empty() ? ' ' : line[0];
            std::string content(line.empty() ? line : line.substr(1));
            if (marker == '+' && new_remaining > 0) {
                hunk->added_lines.push_back(std::move(content));
                --new_remaining;
                continue;
            }
            if (marker == '-' && old_remaining > 0) {
                hunk->removed_lines.push_back(std::move(content));
                --old_remaining;
                continue;
            }
            if (marker == ' ' && old_remaining > 0 && new_remaining > 0) {
                hunk->context_lines.push_back(std::move(content));
                --old_remaining;
                --new_remaining;
                continue;
            }
            // Truncated or inconsistent hunk body: flag the file and bail
            // out to the next file boundary.
            ensure_file().malformed = true;
            ensure_file().error_note = "hunk body ended early";
            hunk = nullptr;
            old_remaining = new_remaining = 0;
            skipping = true;
            continue;
        }
        hunk = nullptr;

        if (starts_with(line, "@@")) {
            HunkHeader header;
            if (!parse_hunk_header(line, header)) {
                auto& f = ensure_file();
                f.malformed = true;
                f.error_note = "malformed hunk header: " + std::string(line);
                skipping = true;
                continue;
            }
            auto& f = ensure_file();
            f.hunks.emplace_back();
            hunk = &f.hunks.back();
            hunk->header = header;
            old_remaining = header.old_len;
            new_remaining = header.new_len;
            continue;
        }

        if (starts_with(line, "--- ")) {
            // A new file section when the current one already has content.
            if (current
                && (!current->hunks.empty() || current->malformed || current->is_binary
                    || seen_new_marker))
                finish_file();
            auto& f = ensure_file();
            f.old_path = clean_path(line.substr(4), "a/");
            continue;
        }
        if (starts_with(line, "+++ ")) {
            ensure_file().new_path = clean_path(line.substr(4), "b/");
            seen_new_marker = true;
            continue;
        }
        if (starts_with(line, "Binary files ") && line.size() > 7
            && line.substr(line.size() - 7) == " differ") {
            auto& f = ensure_file();
            f.is_binary = true;
            if (f.old_path.empty() && f.new_path.empty()) {
                std::string_view middle = line.substr(13, line.size() - 13 - 7);
                auto and_pos = middle.find(" and ");
                if (and_pos != std::string_view::npos) {
                    f.old_path = clean_path(middle.substr(0, and_pos), "a/");
                    f.new_path = clean_path(middle.substr(and_pos + 5), "b/");
                }
            }
            continue;
        }
        if (line == "GIT binary patch") {
            ensure_file().is_binary = true;
            skipping = true; // base85 body can start with any character
            continue;
        }
        if (starts_with(line, "rename from ")) {
            auto& f = ensure_file();
            f.is_rename = true;
            f.old_path = std::string(line.substr(12));
            continue;
        }
        if (starts_with(line, "rename to ")) {
            auto& f = ensure_file();
            f.is_rename = true;
            f.new_path = std::string(line.substr(10));
            continue;
        }
        // index/mode/similarity lines and any surrounding prose are skipped.
    }
    finish_file();

    // Drop empty artifacts from stray prose before the first real file.
    std::vector<FileDiff> kept;
    kept.reserve(result.files.size());
    for (auto& f : result.files) {
        if (f.old_path.empty() && f.new_path.empty() && f.hunks.empty() && !f.is_binary
            && !f.malformed)
            continue;
        kept.push_back(std::move(f));
    }
    result.files = std::move(kept);
    return result;
}

namespace {

void append_path(std::string& out, const std::string& path, std::string_view prefix)
{
    if (path == "/dev/null") {
        out += path;
        return;
    }
    out += prefix;
    out += path;
}

void append_header(std::string& out, const HunkHeader& h)
{
    out += "@@ -";
    out += std::to_string(h.old_start);
    out += ',';
    out += std::to_string(h.old_len);
    out += " +";
    out += std::to_string(h.new_start);
    out += ',';
    out += std::to_string(h.new_len);
    out += " @@\n";
}

} // namespace

std::string serialize_diff(const PullRequestDiff& diff)
{
    std::string out;
    for (const auto& file : diff.files) {
        // Every file opens with a git boundary line; without it a pure rename
        // followed by a plain file would be ambiguous to reparse. /dev/null
        // markers live on the ---/+++ lines only, as git writes them.
        const std::string& a_name
            = (file.old_path == "/dev/null" || file.old_path.empty()) ? file.new_path : file.old_path;
        const std::string& b_name
            = (file.new_path == "/dev/null" || file.new_path.empty()) ? file.old_path : file.new_path;
        out += "diff --git a/" + a_name + " b/" + b_name + "\n";
        if (file.is_binary) {
            out += "Binary files ";
            append_path(out, file.old_path, "a/");
            out += " and ";
            append_path(out, file.new_path, "b/");
            out += " differ\n";
            continue;
        }
        if (file.is_rename) {
            out += "rename from " + file.old_path + "\n";
            out += "rename to " + file.new_path + "\n";
            if (file.hunks.empty())
                continue;
        }
        out += "--- ";
        append_path(out, file.old_path, "a/");
        out += "\n+++ ";
        append_path(out, file.new_path, "b/");
        out += '\n';
        for (const auto& hunk : file.hunks) {
            append_header(out, hunk.header);
            for (const auto& line : hunk.removed_lines) {
                out += '-';
                out += line;
                out += '\n';
            }
            for (const auto& line : hunk.added_lines) {
                out += '+';
                out += line;
                out += '\n';
            }
            for (const auto& line : hunk.context_lines) {
                out += ' ';
                out += line;
                out += '\n';
            }
        }
    }
    return out;
}

} // namespace patchprov
