#include "conversation.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <regex>
#include <unordered_set>

namespace patchprov {

namespace {

bool is_id_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
}

std::string to_lower_copy(const std::string& s)
{
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
        [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim_copy(const std::string& s)
{
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Lines with trailing \r stripped so CRLF exports parse like LF ones.
std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            if (pos < text.size())
                lines.push_back(text.substr(pos));
            break;
        }
        std::string line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    return lines;
}

} // namespace

const char* link_source_name(LinkSource source)
{
    switch (source) {
    case LinkSource::PrDescription:
        return "pr_description";
    case LinkSource::CommitMessage:
        return "commit_message";
    case LinkSource::ReviewComment:
        return "review_comment";
    }
    return "unknown";
}

LinkPattern default_link_pattern()
{
    return { "share-link", "https://chat.openai.com/share/[a-zA-Z0-9-]{36}" };
}

LinkPattern newer_domain_link_pattern()
{
    return { "share-link-newer-domain", "https://chatgpt.com/share/[a-zA-Z0-9-]{36}" };
}

std::vector<ShareLink> extract_share_links(const std::string& text,
    const std::vector<LinkPattern>& patterns, LinkSource found_in)
{
    std::vector<ShareLink> hits;
    for (const auto& pattern : patterns) {
        if (pattern.regex.empty())
            throw Error(ErrorCode::InvalidArgument, "empty link pattern '" + pattern.name + "'");
        std::regex re;
        try {
            // The id must end at the match: one more id character means the
            // candidate is over-long, not a valid 36-char id plus noise.
            re = std::regex(pattern.regex + "(?![a-zA-Z0-9-])");
        } catch (const std::regex_error& e) {
            throw Error(ErrorCode::InvalidArgument,
                "bad link pattern '" + pattern.name + "': " + e.what());
        }
        for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
             it != std::sregex_iterator(); ++it) {
            ShareLink link;
            link.url = it->str();
            if (link.url.size() < 36)
                continue; // pattern did not end with the id; not a usable link
            link.conversation_id = link.url.substr(link.url.size() - 36);
            link.found_in = found_in;
            link.offset = static_cast<size_t>(it->position());
            hits.push_back(std::move(link));
        }
    }
    std::stable_sort(hits.begin(), hits.end(),
        [](const ShareLink& a, const ShareLink& b) { return a.offset < b.offset; });
    std::vector<ShareLink> out;
    std::unordered_set<std::string> seen;
    for (auto& link : hits) {
        if (seen.insert(link.conversation_id).second)
            out.push_back(std::move(link));
    }
    return out;
}

ExportFormat export_format_for_path(const std::string& path)
{
    std::string lower = to_lower_copy(path);
    auto has_suffix = [&](const char* suffix) {
        size_t n = std::strlen(suffix);
        return lower.size() >= n && lower.compare(lower.size() - n, n, suffix) == 0;
    };
    if (has_suffix(".md") || has_suffix(".markdown"))
        return ExportFormat::Markdown;
    if (has_suffix(".html") || has_suffix(".htm"))
        return ExportFormat::Html;
    throw Error(ErrorCode::UnsupportedFormat, "unsupported conversation export: " + path);
}

namespace {

struct FenceOpen {
    char marker = '`';
    size_t length = 0;
    size_t indent = 0;
    std::string info;
};

std::optional<FenceOpen> parse_fence_open(const std::string& line)
{
    size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ')
        ++indent;
    if (indent > 3 || indent >= line.size())
        return std::nullopt;
    char marker = line[indent];
    if (marker != '`' && marker != '~')
        return std::nullopt;
    size_t end = indent;
    while (end < line.size() && line[end] == marker)
        ++end;
    if (end - indent < 3)
        return std::nullopt;
    std::string info = trim_copy(line.substr(end));
    // An info string with a backtick is not a fence opener (it is a code span).
    if (marker == '`' && info.find('`') != std::string::npos)
        return std::nullopt;
    return FenceOpen { marker, end - indent, indent, std::move(info) };
}

bool is_fence_close(const std::string& line, const FenceOpen& open)
{
    size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ')
        ++indent;
    if (indent > 3)
        return false;
    size_t end = indent;
    while (end < line.size() && line[end] == open.marker)
        ++end;
    if (end - indent < open.length)
        return false;
    return trim_copy(line.substr(end)).empty();
}

void push_snippet(std::vector<CodeSnippet>& out, const std::string& conversation_id,
    std::string raw_text, std::optional<std::string> language_hint)
{
    while (!raw_text.empty() && raw_text.back() == '\n')
        raw_text.pop_back();
    if (trim_copy(raw_text).empty())
        return; // whitespace-only block: cannot produce tokens, never a snippet
    CodeSnippet snippet;
    snippet.conversation_id = conversation_id;
    snippet.block_index = static_cast<int>(out.size());
    snippet.language_hint = std::move(language_hint);
    snippet.line_count = 1 + static_cast<int>(std::count(raw_text.begin(), raw_text.end(), '\n'));
    snippet.raw_text = std::move(raw_text);
    out.push_back(std::move(snippet));
}

std::vector<CodeSnippet> parse_markdown_export(const std::string& document,
    const std::string& conversation_id)
{
    std::vector<CodeSnippet> out;
    std::vector<std::string> lines = split_lines(document);
    size_t i = 0;
    while (i < lines.size()) {
        auto open = parse_fence_open(lines[i]);
        if (!open) {
            ++i;
            continue;
        }
        ++i;
        std::string body;
        bool closed = false;
        for (; i < lines.size(); ++i) {
            if (is_fence_close(lines[i], *open)) {
                closed = true;
                ++i;
                break;
            }
            // the opening fence's indentation is presentation, not content
            std::string content = lines[i];
            size_t strip = 0;
            while (strip < open->indent && strip < content.size() && content[strip] == ' ')
                ++strip;
            body += content.substr(strip);
            body += '\n';
        }
        (void)closed; // an unterminated fence runs to end of document
        std::optional<std::string> hint;
        if (!open->info.empty()) {
            size_t sp = open->info.find_first_of(" \t");
            hint = open->info.substr(0, sp);
        }
        push_snippet(out, conversation_id, std::move(body), std::move(hint));
    }
    return out;
}

// Decode the handful of entities conversation exports actually use; numeric
// references are decoded to UTF-8. Unknown entities pass through literally.
void append_entity(std::string& out, const std::string& entity)
{
    if (entity == "&lt;") {
        out += '<';
    } else if (entity == "&gt;") {
        out += '>';
    } else if (entity == "&amp;") {
        out += '&';
    } else if (entity == "&quot;") {
        out += '"';
    } else if (entity == "&apos;" || entity == "&#39;") {
        out += '\'';
    } else if (entity == "&nbsp;") {
        out += ' ';
    } else if (entity.size() > 3 && entity[1] == '#') {
        unsigned long cp = 0;
        bool ok = true;
        try {
            if (entity[2] == 'x' || entity[2] == 'X')
                cp = std::stoul(entity.substr(3, entity.size() - 4), nullptr, 16);
            else
                cp = std::stoul(entity.substr(2, entity.size() - 3), nullptr, 10);
        } catch (...) {
            ok = false;
        }
        if (!ok || cp > 0x10FFFF) {
            out += entity;
        } else if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    } else {
        out += entity;
    }
}

std::optional<std::string> language_from_tag(const std::string& tag_text)
{
    std::string lower = to_lower_copy(tag_text);
    size_t pos = lower.find("language-");
    if (pos == std::string::npos)
        return std::nullopt;
    pos += 9;
    size_t end = pos;
    auto is_lang_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '#'
            || c == '.' || c == '_' || c == '-';
    };
    while (end < lower.size() && is_lang_char(lower[end]))
        ++end;
    if (end == pos)
        return std::nullopt;
    return lower.substr(pos, end - pos);
}

std::vector<CodeSnippet> parse_html_export(const std::string& document,
    const std::string& conversation_id)
{
    std::vector<CodeSnippet> out;
    std::string lower = to_lower_copy(document);
    size_t pos = 0;
    while (true) {
        size_t open = lower.find("<pre", pos);
        if (open == std::string::npos)
            break;
        char after = open + 4 < lower.size() ? lower[open + 4] : '\0';
        if (after != '>' && after != ' ' && after != '\t' && after != '\n' && after != '\r'
            && after != '/') {
            pos = open + 4; // <pre... was a longer tag name
            continue;
        }
        size_t open_end = document.find('>', open);
        if (open_end == std::string::npos)
            throw Error(ErrorCode::MalformedDocument, "unterminated preformatted tag");
        std::string open_tag = document.substr(open, open_end - open + 1);
        std::optional<std::string> hint = language_from_tag(open_tag);
        if (open_end > open && document[open_end - 1] == '/') {
            pos = open_end + 1; // self-closing, no content
            continue;
        }
        size_t close = lower.find("</pre", open_end + 1);
        if (close == std::string::npos)
            throw Error(ErrorCode::MalformedDocument, "unclosed preformatted block");
        size_t close_end = document.find('>', close);
        if (close_end == std::string::npos)
            throw Error(ErrorCode::MalformedDocument, "unterminated closing tag");

        std::string raw = document.substr(open_end + 1, close - open_end - 1);
        std::string text;
        for (size_t i = 0; i < raw.size();) {
            char c = raw[i];
            if (c == '<') {
                size_t gt = raw.find('>', i);
                if (gt == std::string::npos)
                    throw Error(ErrorCode::MalformedDocument, "unterminated tag in code block");
                std::string tag = raw.substr(i + 1, gt - i - 1);
                std::string tag_lower = to_lower_copy(trim_copy(tag));
                if (tag_lower == "br" || tag_lower == "br/" || tag_lower.rfind("br ", 0) == 0)
                    text += '\n';
                if (!hint)
                    hint = language_from_tag(tag);
                i = gt + 1;
            } else if (c == '&') {
                size_t semi = raw.find(';', i);
                if (semi != std::string::npos && semi - i <= 10) {
                    append_entity(text, raw.substr(i, semi - i + 1));
                    i = semi + 1;
                } else {
                    text += c;
                    ++i;
                }
            } else if (c == '\r') {
                if (i + 1 >= raw.size() || raw[i + 1] != '\n')
                    text += '\n';
                ++i;
            } else {
                text += c;
                ++i;
            }
        }
        // a newline directly after <pre> is markup convention, not content
        if (!text.empty() && text.front() == '\n')
            text.erase(text.begin());
        push_snippet(out, conversation_id, std::move(text), std::move(hint));
        pos = close_end + 1;
    }
    return out;
}

} // namespace

std::vector<CodeSnippet> parse_conversation_export(const std::string& document,
    ExportFormat format, const std::string& conversation_id)
{
    switch (format) {
    case ExportFormat::Markdown:
        return parse_markdown_export(document, conversation_id);
    case ExportFormat::Html:
        return parse_html_export(document, conversation_id);
    }
    throw Error(ErrorCode::UnsupportedFormat, "unknown export format");
}

} // namespace patchprov
