#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace patchprov {

// Coordinates from an "@@ -s,n +s,n @@" line. A zero start is legal when the
// corresponding side is empty (pure additions or pure deletions).
struct HunkHeader {
    int old_start = 0;
    int old_len = 0;
    int new_start = 0;
    int new_len = 0;

    bool operator==(const HunkHeader&) const = default;
};

// One contiguous change block. Lines are stored without their +/-/space
// marker; interleaving order inside the hunk is not retained.
struct Hunk {
    HunkHeader header;
    std::vector<std::string> added_lines;
    std::vector<std::string> removed_lines;
    std::vector<std::string> context_lines;

    bool operator==(const Hunk&) const = default;
};

struct FileDiff {
    std::string old_path;
    std::string new_path;
    std::vector<Hunk> hunks;
    bool is_rename = false;
    bool is_binary = false;
    // Set when a hunk header inside this file failed to parse; the hunks
    // parsed before the bad header are kept, the rest of the file is skipped.
    bool malformed = false;
    std::string error_note;

    bool operator==(const FileDiff&) const = default;

    // Path used for file-type detection and reporting: the new side unless
    // the file was deleted.
    const std::string& display_path() const
    {
        return new_path == "/dev/null" || new_path.empty() ? old_path : new_path;
    }
};

struct PullRequestDiff {
    std::vector<FileDiff> files;
    std::string source;
    bool truncated = false;

    bool operator==(const PullRequestDiff& other) const
    {
        return files == other.files && truncated == other.truncated;
    }
};

// Parse unified-diff text as produced by `git diff` or the code-hosting
// API's .diff media type. Malformed hunk headers flag the enclosing file and
// parsing resumes at the next file; the function itself never throws.
PullRequestDiff parse_unified_diff(std::string_view text);

// Canonical re-serialization. parse(serialize(d)) is structurally equal to d
// for any diff respecting the type invariants. Within a hunk, removed lines
// are emitted first, then added, then context (the model does not keep the
// original interleaving).
std::string serialize_diff(const PullRequestDiff& diff);

// Helpers shared with tests.
bool parse_hunk_header(std::string_view line, HunkHeader& out);

} // namespace patchprov
