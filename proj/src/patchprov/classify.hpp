#pragma once

#include "diff_model.hpp"
#include "match.hpp"
#include "normalize.hpp"
#include "percent.hpp"

#include <optional>
#include <string>
#include <vector>

namespace patchprov {

// Hunk labels: applied, not-applied, no-example, cannot-classify (unsupported
// file type), extraction/processing error.
enum class HunkLabel { PA, PN, NE, CC, EE };

// Pull-request labels: the three integration labels plus closed-unmerged.
enum class PrLabel { PA, PN, NE, CL };

const char* hunk_label_name(HunkLabel label);
const char* pr_label_name(PrLabel label);
HunkLabel hunk_label_from_name(const std::string& name); // throws UnknownLabel
PrLabel pr_label_from_name(const std::string& name);     // throws UnknownLabel

struct SnippetRef {
    std::string conversation_id;
    int block_index = 0;

    bool operator==(const SnippetRef&) const = default;
};

// A snippet's grams prepared for one file-type profile.
struct SnippetGrams {
    SnippetRef ref;
    NGramSet grams;
};

struct HunkVerdict {
    HunkLabel label = HunkLabel::NE;
    std::string file;
    HunkHeader header; // zeroed for file-level verdicts (binary files, failures)
    // Present whenever matching ran (supported type, snippets exist, no
    // failure): the closest snippet by matched gram count. matched=true
    // exactly for PA.
    std::optional<MatchResult> best_match;
    std::optional<SnippetRef> matched_snippet; // PA only
    std::optional<std::string> failure_note;   // EE only

    bool operator==(const HunkVerdict&) const = default;
};

struct PullRequestVerdict {
    PrLabel label = PrLabel::NE;
    int pa_count = 0;
    int pn_count = 0;
    int ne_count = 0;
    int cc_count = 0;
    int ee_count = 0;
    std::optional<Percentage> integration_pct; // filled for PA pull requests
    bool merged = false;

    bool operator==(const PullRequestVerdict&) const = default;
};

// Label one hunk against the prepared snippet grams. Unsupported file type
// wins over everything else (CC); absence of snippets is NE; otherwise the
// hunk's added lines are normalized, gram-built, and matched against every
// snippet: any match is PA, none is PN. Failures while processing the hunk
// are captured as EE verdicts, never thrown.
HunkVerdict classify_hunk(const std::vector<SnippetGrams>& snippets, const Hunk& hunk,
    const FileTypeProfile& profile, const std::string& file, int n, uint32_t threshold = 1);

// Aggregate hunk verdicts into the pull-request label. An unmerged PR is CL
// no matter what its hunks say. CC/EE tallies are carried but do not steer
// the PA/PN/NE decision. A merged PR with no hunks at all is PN when the
// conversation offered snippets and NE otherwise. integration_pct is left
// unset; the caller computes it for PA results.
PullRequestVerdict classify_pull_request(const std::vector<HunkVerdict>& hunk_verdicts,
    bool merged, bool snippets_exist = false);

// The per-PR integration ratio: the share of the union of all snippet grams
// that appears in the union of the PR's added-line grams. Throws
// EmptyReference when every snippet is token-free.
Percentage aggregate_integration(const std::vector<NGramSet>& snippet_grams,
    const NGramSet& pr_added_grams);

} // namespace patchprov
