#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace patchprov {

enum class LinkSource {
    PrDescription,
    CommitMessage,
    ReviewComment,
};

const char* link_source_name(LinkSource source);

struct ShareLink {
    std::string url;
    std::string conversation_id; // exactly 36 chars of [a-zA-Z0-9-]
    LinkSource found_in = LinkSource::PrDescription;
    std::size_t offset = 0; // character index of the match in the source text

    bool operator==(const ShareLink&) const = default;
};

// A conversation share-link pattern. The regex must end with the
// 36-character identifier; a match followed by another identifier character
// is rejected, so over-long ids never match partially.
struct LinkPattern {
    std::string name;
    std::string regex;
};

// The share-link pattern the conversation corpus was collected with.
LinkPattern default_link_pattern();
// The vendor's newer share domain; opt-in.
LinkPattern newer_domain_link_pattern();

// Scan free text for share links. Results are deduplicated by
// conversation id, keeping the first occurrence, ordered by offset.
std::vector<ShareLink> extract_share_links(const std::string& text,
    const std::vector<LinkPattern>& patterns,
    LinkSource found_in = LinkSource::PrDescription);

enum class ExportFormat {
    Markdown,
    Html,
};

// Pick the export format from a file name. Throws Error(UnsupportedFormat)
// for anything that is not .md/.markdown/.html/.htm.
ExportFormat export_format_for_path(const std::string& path);

// One standalone code block from a saved conversation export. Inline code
// spans are never snippets.
struct CodeSnippet {
    std::string conversation_id;
    int block_index = 0; // document order, contiguous from 0
    std::optional<std::string> language_hint;
    std::string raw_text; // verbatim block content, trailing newline trimmed
    int line_count = 0;

    bool operator==(const CodeSnippet&) const = default;
};

// Extract the standalone code blocks from a locally saved export. Markdown
// uses fenced blocks; HTML uses <pre>-wrapped code regions. Whitespace-only
// blocks are discarded. Throws Error(MalformedDocument) on unparseable
// markup so the caller can record a processing failure.
std::vector<CodeSnippet> parse_conversation_export(const std::string& document,
    ExportFormat format, const std::string& conversation_id = {});

} // namespace patchprov
