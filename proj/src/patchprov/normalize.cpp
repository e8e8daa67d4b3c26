#include "patchprov/normalize.hpp"

#include "patchprov/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "json.hpp"

namespace patchprov {
namespace {

FileTypeProfile make_profile(std::string name, std::vector<std::string> extensions,
    std::optional<std::string> line_comment,
    std::optional<std::pair<std::string, std::string>> block_comment,
    std::vector<std::string> basenames = {})
{
    FileTypeProfile p;
    p.name = std::move(name);
    p.extensions = std::move(extensions);
    p.basenames = std::move(basenames);
    p.line_comment = std::move(line_comment);
    p.block_comment = std::move(block_comment);
    p.supported = true;
    return p;
}

const std::pair<std::string, std::string> c_block { "/*", "*/" };
const std::pair<std::string, std::string> xml_block { "<!--", "-->" };

std::vector<FileTypeProfile> builtin_profiles()
{
    std::vector<FileTypeProfile> v;
    v.push_back(make_profile("c", { ".c", ".h" }, "//", c_block));
    v.push_back(make_profile("cpp", { ".cpp", ".cc", ".cxx", ".hpp", ".hh", ".hxx", ".inl", ".ipp" }, "//", c_block));
    v.push_back(make_profile("python", { ".py", ".pyi", ".pyw" }, "#", std::nullopt));
    v.push_back(make_profile("shell", { ".sh", ".bash", ".zsh", ".ksh" }, "#", std::nullopt));
    v.push_back(make_profile("javascript", { ".js", ".mjs", ".cjs", ".jsx" }, "//", c_block));
    v.push_back(make_profile("typescript", { ".ts", ".tsx", ".mts", ".cts" }, "//", c_block));
    v.push_back(make_profile("html", { ".html", ".htm", ".xhtml" }, std::nullopt, xml_block));
    v.push_back(make_profile("css", { ".css" }, std::nullopt, c_block));
    v.push_back(make_profile("scss", { ".scss", ".sass", ".less" }, "//", c_block));
    v.push_back(make_profile("java", { ".java" }, "//", c_block));
    v.push_back(make_profile("kotlin", { ".kt", ".kts" }, "//", c_block));
    v.push_back(make_profile("scala", { ".scala" }, "//", c_block));
    v.push_back(make_profile("go", { ".go" }, "//", c_block));
    v.push_back(make_profile("rust", { ".rs" }, "//", c_block));
    v.push_back(make_profile("ruby", { ".rb", ".rake", ".gemspec" }, "#", std::make_pair("=begin", "=end")));
    v.push_back(make_profile("php", { ".php", ".phtml" }, "//", c_block));
    v.push_back(make_profile("perl", { ".pl", ".pm" }, "#", std::nullopt));
    v.push_back(make_profile("swift", { ".swift" }, "//", c_block));
    v.push_back(make_profile("objective-c", { ".m", ".mm" }, "//", c_block));
    v.push_back(make_profile("csharp", { ".cs" }, "//", c_block));
    v.push_back(make_profile("fsharp", { ".fs", ".fsx" }, "//", std::make_pair("(*", "*)")));
    v.push_back(make_profile("r", { ".r" }, "#", std::nullopt));
    v.push_back(make_profile("lua", { ".lua" }, "--", std::make_pair("--[[", "]]")));
    v.push_back(make_profile("sql", { ".sql" }, "--", c_block));
    v.push_back(make_profile("yaml", { ".yaml", ".yml" }, "#", std::nullopt));
    v.push_back(make_profile("toml", { ".toml" }, "#", std::nullopt));
    v.push_back(make_profile("json", { ".json", ".jsonl", ".geojson" }, std::nullopt, std::nullopt));
    v.push_back(make_profile("xml", { ".xml", ".xsl", ".svg", ".xaml", ".plist" }, std::nullopt, xml_block));
    v.push_back(make_profile("ini", { ".ini", ".cfg", ".conf", ".properties" }, ";", std::nullopt));
    v.push_back(make_profile("dockerfile", { ".dockerfile" }, "#", std::nullopt, { "dockerfile", "containerfile" }));
    v.push_back(make_profile("makefile", { ".mk", ".mak" }, "#", std::nullopt, { "makefile", "gnumakefile" }));
    v.push_back(make_profile("cmake", { ".cmake" }, "#", std::nullopt, { "cmakelists.txt" }));
    v.push_back(make_profile("gradle", { ".gradle" }, "//", c_block));
    v.push_back(make_profile("haskell", { ".hs", ".lhs" }, "--", std::make_pair("{-", "-}")));
    v.push_back(make_profile("ocaml", { ".ml", ".mli" }, std::nullopt, std::make_pair("(*", "*)")));
    v.push_back(make_profile("elixir", { ".ex", ".exs" }, "#", std::nullopt));
    v.push_back(make_profile("erlang", { ".erl", ".hrl" }, "%", std::nullopt));
    v.push_back(make_profile("clojure", { ".clj", ".cljs", ".cljc", ".edn" }, ";", std::nullopt));
    v.push_back(make_profile("dart", { ".dart" }, "//", c_block));
    v.push_back(make_profile("groovy", { ".groovy" }, "//", c_block));
    v.push_back(make_profile("julia", { ".jl" }, "#", std::make_pair("#=", "=#")));
    // .m stays with objective-c (listed first); matlab keeps the suffix for
    // custom registries that reorder.
    v.push_back(make_profile("matlab", { ".m" }, "%", std::make_pair("%{", "%}")));
    v.push_back(make_profile("fortran", { ".f90", ".f95", ".f03", ".f" }, "!", std::nullopt));
    v.push_back(make_profile("pascal", { ".pas", ".pp" }, "//", std::make_pair("{", "}")));
    v.push_back(make_profile("vb", { ".vb", ".vbs", ".bas" }, "'", std::nullopt));
    v.push_back(make_profile("powershell", { ".ps1", ".psm1", ".psd1" }, "#", std::make_pair("<#", "#>")));
    v.push_back(make_profile("batch", { ".bat", ".cmd" }, "::", std::nullopt));
    v.push_back(make_profile("vim", { ".vim" }, "\"", std::nullopt, { ".vimrc", "vimrc" }));
    v.push_back(make_profile("tex", { ".tex", ".sty", ".cls" }, "%", std::nullopt));
    v.push_back(make_profile("assembly", { ".s", ".asm" }, ";", c_block));
    v.push_back(make_profile("zig", { ".zig" }, "//", std::nullopt));
    v.push_back(make_profile("nim", { ".nim" }, "#", std::make_pair("#[", "]#")));
    v.push_back(make_profile("terraform", { ".tf", ".tfvars" }, "#", c_block));
    v.push_back(make_profile("proto", { ".proto" }, "//", c_block));
    v.push_back(make_profile("graphql", { ".graphql", ".gql" }, "#", std::nullopt));
    return v;
}

std::string to_lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
        [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_ascii_space(unsigned char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

} // namespace

const FileTypeProfile& unsupported_profile()
{
    static const FileTypeProfile p = [] {
        FileTypeProfile u;
        u.name = "unsupported";
        u.supported = false;
        return u;
    }();
    return p;
}

FileTypeRegistry FileTypeRegistry::builtin()
{
    FileTypeRegistry r;
    r.m_profiles = builtin_profiles();
    r.m_version = "builtin-1";
    return r;
}

FileTypeRegistry FileTypeRegistry::load(const std::string& config_path)
{
    std::ifstream in(config_path);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open file-type registry: " + config_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedDocument,
            "bad file-type registry " + config_path + ": " + e.what());
    }

    bool replace = doc.value("replace", false);
    FileTypeRegistry r;
    if (!replace)
        r = builtin();
    std::vector<FileTypeProfile> loaded;
    for (const auto& entry : doc.at("profiles")) {
        FileTypeProfile p;
        p.name = entry.at("name").get<std::string>();
        for (const auto& e : entry.value("extensions", nlohmann::json::array()))
            p.extensions.push_back(to_lower(e.get<std::string>()));
        for (const auto& b : entry.value("basenames", nlohmann::json::array()))
            p.basenames.push_back(to_lower(b.get<std::string>()));
        if (entry.contains("line_comment"))
            p.line_comment = entry["line_comment"].get<std::string>();
        if (entry.contains("block_comment")) {
            const auto& bc = entry["block_comment"];
            p.block_comment = std::make_pair(bc.at(0).get<std::string>(), bc.at(1).get<std::string>());
        }
        p.supported = entry.value("supported", true);
        if (p.supported && p.extensions.empty() && p.basenames.empty())
            throw Error(ErrorCode::InvalidArgument,
                "profile '" + p.name + "' is supported but matches nothing");
        loaded.push_back(std::move(p));
    }
    // User profiles take precedence over built-ins.
    loaded.insert(loaded.end(), r.m_profiles.begin(), r.m_profiles.end());
    r.m_profiles = std::move(loaded);
    r.m_version = doc.value("version", std::string("custom")) + (replace ? "" : "+builtin-1");
    return r;
}

const FileTypeProfile& detect_file_type(const std::string& path, const FileTypeRegistry& registry)
{
    std::string lower = to_lower(path);
    auto slash = lower.find_last_of('/');
    std::string base = slash == std::string::npos ? lower : lower.substr(slash + 1);

    const FileTypeProfile* best = nullptr;
    size_t best_len = 0;
    for (const auto& profile : registry.profiles()) {
        for (const auto& name : profile.basenames) {
            // Whole-name match beats any suffix match.
            if (base == name)
                return profile;
        }
        for (const auto& ext : profile.extensions) {
            if (ext.size() > best_len && lower.size() >= ext.size()
                && lower.compare(lower.size() - ext.size(), ext.size(), ext) == 0) {
                best = &profile;
                best_len = ext.size();
            }
        }
    }
    return best ? *best : unsupported_profile();
}

namespace {

// Removes comments from a block of lines in one pass. Stateful so block
// comments spanning lines are handled; string literals are not recognized.
struct CommentStripper {
    const FileTypeProfile& profile;
    bool in_block = false;

    std::string strip(const std::string& line)
    {
        const std::string* lc = profile.line_comment ? &*profile.line_comment : nullptr;
        const std::string* bo = profile.block_comment ? &profile.block_comment->first : nullptr;
        const std::string* bc = profile.block_comment ? &profile.block_comment->second : nullptr;

        std::string out;
        size_t i = 0;
        while (i < line.size()) {
            if (in_block) {
                auto close = line.find(*bc, i);
                if (close == std::string::npos)
                    return out; // comment continues on the next line
                i = close + bc->size();
                in_block = false;
                continue;
            }
            bool lc_hit = lc && line.compare(i, lc->size(), *lc) == 0;
            bool bo_hit = bo && line.compare(i, bo->size(), *bo) == 0;
            if (lc_hit && bo_hit) {
                // One marker prefixes the other (e.g. "--" vs "--[["); the
                // longer, more specific one wins.
                if (bo->size() > lc->size())
                    lc_hit = false;
                else
                    bo_hit = false;
            }
            if (lc_hit)
                return out; // rest of line is comment
            if (bo_hit) {
                i += bo->size();
                in_block = true;
                continue;
            }
            out += line[i++];
        }
        return out;
    }
};

} // namespace

NormalizedLines normalize_lines(const std::vector<std::string>& lines, const FileTypeProfile& profile)
{
    if (!profile.supported)
        throw Error(ErrorCode::UnsupportedProfile,
            "file type '" + profile.name + "' is not supported");
    if (profile.line_comment && profile.line_comment->empty())
        throw Error(ErrorCode::InvalidArgument, "profile '" + profile.name + "' has an empty line-comment marker");
    if (profile.block_comment
        && (profile.block_comment->first.empty() || profile.block_comment->second.empty()))
        throw Error(ErrorCode::InvalidArgument, "profile '" + profile.name + "' has an empty block-comment marker");

    NormalizedLines result;
    result.profile = profile;
    CommentStripper stripper { profile };
    for (const auto& raw : lines) {
        std::string stripped = stripper.strip(raw);
        std::string out;
        out.reserve(stripped.size());
        for (char ch : stripped) {
            auto c = static_cast<unsigned char>(ch);
            if (c >= 0x80)
                continue; // non-ASCII bytes are dropped, not rejected
            if (is_ascii_space(c))
                continue;
            out += static_cast<char>(std::tolower(c));
        }
        if (out.empty()) {
            ++result.dropped_count;
            continue;
        }
        result.lines.push_back(std::move(out));
    }
    return result;
}

} // namespace patchprov
