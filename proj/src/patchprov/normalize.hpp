#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace patchprov {

// Comment syntax and matching rules for one file type. Extensions are
// lower-case suffixes including the dot; basenames match the whole file name
// (for extensionless types like Makefile).
struct FileTypeProfile {
    std::string name;
    std::vector<std::string> extensions;
    std::vector<std::string> basenames;
    std::optional<std::string> line_comment;
    std::optional<std::pair<std::string, std::string>> block_comment;
    bool supported = true;

    bool operator==(const FileTypeProfile&) const = default;
};

struct NormalizedLines {
    std::vector<std::string> lines;
    int dropped_count = 0;
    FileTypeProfile profile;

    bool operator==(const NormalizedLines&) const = default;
};

class FileTypeRegistry {
public:
    // Registry preloaded with the built-in profiles.
    static FileTypeRegistry builtin();

    // Load profile records from a JSON config file. When `replace` is false
    // (the default, also overridable inside the file) the loaded profiles are
    // prepended so they win ties against the built-ins.
    static FileTypeRegistry load(const std::string& config_path);

    const std::vector<FileTypeProfile>& profiles() const { return m_profiles; }
    const std::string& version() const { return m_version; }

    void add_front(FileTypeProfile profile) { m_profiles.insert(m_profiles.begin(), std::move(profile)); }

private:
    std::vector<FileTypeProfile> m_profiles;
    std::string m_version;
};

// Profile returned when nothing in the registry matches.
const FileTypeProfile& unsupported_profile();

// Longest matching suffix wins; ties go to registry order. Basename rules
// match the entire file name and beat suffix rules. Comparison is
// case-insensitive.
const FileTypeProfile& detect_file_type(const std::string& path, const FileTypeRegistry& registry);

// Normalization pipeline: strip comments, drop non-ASCII bytes, lowercase,
// remove all whitespace, drop lines left empty. Block comments may span
// lines; markers inside string literals are not protected.
// Throws Error(UnsupportedProfile) when profile.supported is false and
// Error(InvalidArgument) when a present marker is empty.
NormalizedLines normalize_lines(const std::vector<std::string>& lines, const FileTypeProfile& profile);

} // namespace patchprov
