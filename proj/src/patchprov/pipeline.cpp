#include "pipeline.hpp"
#include "diff_model.hpp"
#include "errors.hpp"
#include "match.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <thread>

namespace patchprov {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_snippet_lines(const std::string& raw)
{
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos <= raw.size()) {
        size_t nl = raw.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(raw.substr(pos));
            break;
        }
        lines.push_back(raw.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

HunkVerdict failure_verdict(const std::string& file, const std::string& note)
{
    HunkVerdict v;
    v.label = HunkLabel::EE;
    v.file = file;
    v.failure_note = note;
    return v;
}

std::string hunk_header_str(const HunkHeader& h)
{
    return "@@ -" + std::to_string(h.old_start) + "," + std::to_string(h.old_len) + " +"
        + std::to_string(h.new_start) + "," + std::to_string(h.new_len) + " @@";
}

bool header_is_zero(const HunkHeader& h)
{
    return h.old_start == 0 && h.old_len == 0 && h.new_start == 0 && h.new_len == 0;
}

double pct_number(const Percentage& p)
{
    return static_cast<double>(p.tenths()) / 10.0;
}

// Per-PR cache of snippet grams keyed by profile name: each snippet is
// normalized once per file type that actually appears in the diff.
class SnippetGramCache {
public:
    SnippetGramCache(const std::vector<CodeSnippet>& snippets, int n)
        : snippets_(snippets)
        , n_(n)
    {
    }

    const std::vector<SnippetGrams>& for_profile(const FileTypeProfile& profile)
    {
        auto it = cache_.find(profile.name);
        if (it != cache_.end())
            return it->second;
        std::vector<SnippetGrams> built;
        built.reserve(snippets_.size());
        for (const auto& snippet : snippets_) {
            SnippetGrams sg;
            sg.ref = SnippetRef { snippet.conversation_id, snippet.block_index };
            sg.grams.n = n_;
            try {
                NormalizedLines normalized
                    = normalize_lines(split_snippet_lines(snippet.raw_text), profile);
                sg.grams = grams_of_lines(normalized, n_);
            } catch (const std::exception&) {
                // a snippet that cannot be normalized contributes no grams;
                // the hunk side surfaces the same profile problem as EE
            }
            built.push_back(std::move(sg));
        }
        return cache_.emplace(profile.name, std::move(built)).first->second;
    }

    // every (snippet, used-profile) gram set, for the PR-level ratio
    std::vector<NGramSet> all_sets() const
    {
        std::vector<NGramSet> sets;
        for (const auto& [name, grams] : cache_)
            for (const auto& sg : grams)
                sets.push_back(sg.grams);
        return sets;
    }

private:
    const std::vector<CodeSnippet>& snippets_;
    int n_;
    std::map<std::string, std::vector<SnippetGrams>> cache_;
};

const std::vector<std::string>& export_suffixes()
{
    static const std::vector<std::string> suffixes = { ".html", ".htm", ".md", ".markdown" };
    return suffixes;
}

} // namespace

std::vector<std::string> list_pr_directories(const std::string& dataset_root)
{
    if (dataset_root.empty() || !fs::is_directory(dataset_root))
        throw Error(ErrorCode::MissingDataset, "dataset root not found: " + dataset_root);
    std::vector<std::string> dirs;
    for (const auto& entry : fs::directory_iterator(dataset_root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "record.json"))
            dirs.push_back(entry.path().string());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

PrClassification classify_pr_directory(const std::string& pr_dir, const RunConfig& config,
    const FileTypeRegistry& registry)
{
    PullRequestRecord record = load_record(pr_dir);
    PrClassification out;
    out.owner = record.owner;
    out.repo = record.repo;
    out.number = record.number;
    out.truncated = record.truncated;

    // Conversation exports are local files; a listed conversation whose
    // export is missing or unparseable is a processing failure, not a crash.
    std::vector<CodeSnippet> snippets;
    std::vector<HunkVerdict> conversation_failures;
    for (const auto& link : record.share_links) {
        fs::path stem = fs::path(pr_dir) / "conversations" / link.conversation_id;
        std::string found;
        for (const auto& suffix : export_suffixes()) {
            std::string candidate = stem.string() + suffix;
            if (fs::exists(candidate)) {
                found = candidate;
                break;
            }
        }
        std::string display = "conversations/" + link.conversation_id;
        if (found.empty()) {
            conversation_failures.push_back(
                failure_verdict(display, "conversation export missing"));
            continue;
        }
        try {
            ExportFormat format = export_format_for_path(found);
            std::vector<CodeSnippet> parsed = parse_conversation_export(
                read_text_file(found), format, link.conversation_id);
            snippets.insert(snippets.end(), parsed.begin(), parsed.end());
        } catch (const std::exception& e) {
            conversation_failures.push_back(failure_verdict(display, e.what()));
        }
    }
    out.snippet_count = static_cast<long>(snippets.size());
    bool snippets_exist = !snippets.empty();

    SnippetGramCache cache(snippets, config.ngram);
    std::vector<HunkVerdict> verdicts;
    std::optional<PullRequestDiff> diff;
    fs::path diff_file = fs::path(pr_dir) / (record.diff_path.empty() ? "pr.diff" : record.diff_path);
    try {
        diff = parse_unified_diff(read_text_file(diff_file.string()));
    } catch (const std::exception& e) {
        verdicts.push_back(failure_verdict(record.diff_path, e.what()));
    }

    if (diff) {
        for (const auto& file : diff->files) {
            std::string path = file.display_path();
            if (file.is_binary && !file.malformed) {
                HunkVerdict v;
                v.label = HunkLabel::CC;
                v.file = path;
                verdicts.push_back(std::move(v));
                continue;
            }
            FileTypeProfile profile = detect_file_type(path, registry);
            static const std::vector<SnippetGrams> kNoGrams;
            for (const auto& hunk : file.hunks) {
                const auto& grams
                    = (profile.supported && snippets_exist) ? cache.for_profile(profile) : kNoGrams;
                verdicts.push_back(classify_hunk(grams, hunk, profile, path, config.ngram,
                    config.match_threshold));
            }
            if (file.malformed)
                verdicts.push_back(failure_verdict(path,
                    file.error_note.empty() ? "malformed file diff" : file.error_note));
        }
    }
    verdicts.insert(verdicts.end(), conversation_failures.begin(), conversation_failures.end());

    out.verdict = classify_pull_request(verdicts, record.state == PrState::Merged, snippets_exist);
    if (out.verdict.label == PrLabel::PA && diff) {
        NGramSet pr_added;
        pr_added.n = config.ngram;
        for (const auto& file : diff->files) {
            if (file.is_binary && !file.malformed)
                continue;
            FileTypeProfile profile = detect_file_type(file.display_path(), registry);
            if (!profile.supported)
                continue;
            for (const auto& hunk : file.hunks) {
                try {
                    NormalizedLines normalized = normalize_lines(hunk.added_lines, profile);
                    NGramSet grams = grams_of_lines(normalized, config.ngram);
                    pr_added.grams.insert(grams.grams.begin(), grams.grams.end());
                } catch (const std::exception&) {
                    // the hunk already carries an EE verdict
                }
            }
        }
        out.verdict.integration_pct = aggregate_integration(cache.all_sets(), pr_added);
    }
    out.hunks = std::move(verdicts);
    return out;
}

ClassificationRun classify_dataset(const RunConfig& config)
{
    if (config.ngram < 1)
        throw Error(ErrorCode::InvalidArgument, "gram size must be >= 1");
    if (config.match_threshold < 1)
        throw Error(ErrorCode::InvalidArgument, "match threshold must be >= 1");
    if (config.parallelism < 1)
        throw Error(ErrorCode::InvalidArgument, "parallelism must be >= 1");

    FileTypeRegistry registry = config.filetype_registry.empty()
        ? FileTypeRegistry::builtin()
        : FileTypeRegistry::load(config.filetype_registry);

    std::vector<std::string> dirs = list_pr_directories(config.dataset_root);
    std::vector<std::optional<PrClassification>> results(dirs.size());
    std::vector<std::string> record_failures(dirs.size());

    std::atomic<size_t> next { 0 };
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < dirs.size(); i = next.fetch_add(1)) {
            try {
                results[i] = classify_pr_directory(dirs[i], config, registry);
            } catch (const std::exception& e) {
                record_failures[i]
                    = fs::path(dirs[i]).filename().string() + ": " + e.what();
            }
        }
    };
    size_t workers = std::min(static_cast<size_t>(config.parallelism), dirs.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (size_t i = 0; i < workers; ++i)
            threads.emplace_back(worker);
        for (auto& t : threads)
            t.join();
    }

    ClassificationRun run;
    run.n = config.ngram;
    run.match_threshold = config.match_threshold;
    run.registry_version = registry.version();
    for (size_t i = 0; i < dirs.size(); ++i) {
        if (results[i])
            run.prs.push_back(std::move(*results[i]));
        else if (!record_failures[i].empty())
            run.failures.push_back(record_failures[i]);
    }
    std::sort(run.prs.begin(), run.prs.end(), [](const PrClassification& a, const PrClassification& b) {
        return std::tie(a.owner, a.repo, a.number) < std::tie(b.owner, b.repo, b.number);
    });

    std::vector<PullRequestVerdict> verdicts;
    long snippet_total = 0;
    for (const auto& pr : run.prs) {
        verdicts.push_back(pr.verdict);
        snippet_total += pr.snippet_count;
        for (const auto& hv : pr.hunks) {
            if (hv.label == HunkLabel::EE)
                run.failures.push_back(pr.owner + "/" + pr.repo + "#" + std::to_string(pr.number)
                    + " " + hv.file + ": " + hv.failure_note.value_or("processing failure"));
        }
    }
    run.summary = summarize(verdicts, config.ngram, snippet_total);
    return run;
}

std::string run_to_json(const ClassificationRun& run)
{
    json j;
    j["schema_version"] = 1;
    j["generator"] = std::string("patchprov ") + kToolVersion;
    j["ngram"] = run.n;
    j["match_threshold"] = run.match_threshold;
    j["registry_version"] = run.registry_version;

    const CorpusSummary& s = run.summary;
    json summary;
    summary["pr_counts"]
        = { { "pa", s.pr_pa }, { "pn", s.pr_pn }, { "ne", s.pr_ne }, { "cl", s.pr_cl } };
    summary["pr_pct_merged"] = { { "pa", s.pct_pa }, { "pn", s.pct_pn }, { "ne", s.pct_ne } };
    summary["hunk_counts"] = { { "pa", s.hunk_pa }, { "pn", s.hunk_pn }, { "ne", s.hunk_ne },
        { "cc", s.hunk_cc }, { "ee", s.hunk_ee } };
    if (s.integration)
        summary["integration_quartiles"] = { { "q1", s.integration->q1 },
            { "median", s.integration->median }, { "q3", s.integration->q3 } };
    summary["snippet_total"] = s.snippet_total;
    summary["patch_total"] = s.patch_total;
    j["summary"] = summary;

    j["pull_requests"] = json::array();
    for (const auto& pr : run.prs) {
        json p;
        p["owner"] = pr.owner;
        p["repo"] = pr.repo;
        p["number"] = pr.number;
        p["label"] = pr_label_name(pr.verdict.label);
        p["merged"] = pr.verdict.merged;
        p["truncated"] = pr.truncated;
        p["snippet_count"] = pr.snippet_count;
        if (pr.verdict.integration_pct)
            p["integration_pct"] = pct_number(*pr.verdict.integration_pct);
        else
            p["integration_pct"] = nullptr;
        p["hunk_counts"] = { { "pa", pr.verdict.pa_count }, { "pn", pr.verdict.pn_count },
            { "ne", pr.verdict.ne_count }, { "cc", pr.verdict.cc_count },
            { "ee", pr.verdict.ee_count } };
        p["hunks"] = json::array();
        for (const auto& hv : pr.hunks) {
            json h;
            h["file"] = hv.file;
            h["label"] = hunk_label_name(hv.label);
            if (header_is_zero(hv.header))
                h["header"] = nullptr;
            else
                h["header"] = hunk_header_str(hv.header);
            if (hv.best_match) {
                h["matched_gram_count"] = hv.best_match->matched_gram_count;
                h["snippet_gram_count"] = hv.best_match->snippet_gram_count;
                h["containment_pct"] = pct_number(hv.best_match->containment_pct);
            }
            if (hv.matched_snippet)
                h["matched_snippet"] = { { "conversation_id", hv.matched_snippet->conversation_id },
                    { "block_index", hv.matched_snippet->block_index } };
            if (hv.failure_note)
                h["failure_note"] = *hv.failure_note;
            p["hunks"].push_back(std::move(h));
        }
        j["pull_requests"].push_back(std::move(p));
    }
    j["failures"] = run.failures;
    return j.dump(2) + "\n";
}

std::string run_to_csv(const ClassificationRun& run)
{
    std::vector<PrReportRow> rows;
    rows.reserve(run.prs.size());
    for (const auto& pr : run.prs)
        rows.push_back(PrReportRow { pr.owner, pr.repo, pr.number, pr.verdict });
    return render_csv(rows, run.n);
}

} // namespace patchprov
