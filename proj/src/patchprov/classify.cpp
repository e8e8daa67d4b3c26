#include "classify.hpp"
#include "errors.hpp"

namespace patchprov {

const char* hunk_label_name(HunkLabel label)
{
    switch (label) {
    case HunkLabel::PA:
        return "PA";
    case HunkLabel::PN:
        return "PN";
    case HunkLabel::NE:
        return "NE";
    case HunkLabel::CC:
        return "CC";
    case HunkLabel::EE:
        return "EE";
    }
    return "??";
}

const char* pr_label_name(PrLabel label)
{
    switch (label) {
    case PrLabel::PA:
        return "PA";
    case PrLabel::PN:
        return "PN";
    case PrLabel::NE:
        return "NE";
    case PrLabel::CL:
        return "CL";
    }
    return "??";
}

HunkLabel hunk_label_from_name(const std::string& name)
{
    if (name == "PA")
        return HunkLabel::PA;
    if (name == "PN")
        return HunkLabel::PN;
    if (name == "NE")
        return HunkLabel::NE;
    if (name == "CC")
        return HunkLabel::CC;
    if (name == "EE")
        return HunkLabel::EE;
    throw Error(ErrorCode::UnknownLabel, "unknown hunk label '" + name + "'");
}

PrLabel pr_label_from_name(const std::string& name)
{
    if (name == "PA")
        return PrLabel::PA;
    if (name == "PN")
        return PrLabel::PN;
    if (name == "NE")
        return PrLabel::NE;
    if (name == "CL")
        return PrLabel::CL;
    throw Error(ErrorCode::UnknownLabel, "unknown pull request label '" + name + "'");
}

HunkVerdict classify_hunk(const std::vector<SnippetGrams>& snippets, const Hunk& hunk,
    const FileTypeProfile& profile, const std::string& file, int n, uint32_t threshold)
{
    HunkVerdict verdict;
    verdict.file = file;
    verdict.header = hunk.header;

    if (!profile.supported) {
        verdict.label = HunkLabel::CC;
        return verdict;
    }
    if (snippets.empty()) {
        verdict.label = HunkLabel::NE;
        return verdict;
    }
    try {
        NormalizedLines normalized = normalize_lines(hunk.added_lines, profile);
        NGramSet hunk_grams = grams_of_lines(normalized, n);

        const SnippetGrams* best = nullptr;
        MatchResult best_result;
        for (const auto& snippet : snippets) {
            MatchResult result = match_snippet_against_hunk(snippet.grams, hunk_grams, threshold);
            bool better = !best || result.matched_gram_count > best_result.matched_gram_count
                || (result.matched_gram_count == best_result.matched_gram_count
                    && snippet.ref.block_index < best->ref.block_index);
            if (better) {
                best = &snippet;
                best_result = result;
            }
        }
        verdict.best_match = best_result;
        if (best_result.matched) {
            verdict.label = HunkLabel::PA;
            verdict.matched_snippet = best->ref;
        } else {
            verdict.label = HunkLabel::PN;
        }
    } catch (const std::exception& e) {
        verdict.label = HunkLabel::EE;
        verdict.best_match.reset();
        verdict.matched_snippet.reset();
        verdict.failure_note = e.what();
    }
    return verdict;
}

PullRequestVerdict classify_pull_request(const std::vector<HunkVerdict>& hunk_verdicts,
    bool merged, bool snippets_exist)
{
    PullRequestVerdict verdict;
    verdict.merged = merged;
    for (const auto& hv : hunk_verdicts) {
        switch (hv.label) {
        case HunkLabel::PA:
            ++verdict.pa_count;
            break;
        case HunkLabel::PN:
            ++verdict.pn_count;
            break;
        case HunkLabel::NE:
            ++verdict.ne_count;
            break;
        case HunkLabel::CC:
            ++verdict.cc_count;
            break;
        case HunkLabel::EE:
            ++verdict.ee_count;
            break;
        }
    }
    if (!merged) {
        verdict.label = PrLabel::CL;
    } else if (verdict.pa_count > 0) {
        verdict.label = PrLabel::PA;
    } else if (verdict.pn_count > 0) {
        verdict.label = PrLabel::PN;
    } else if (hunk_verdicts.empty() && snippets_exist) {
        // empty diff but the conversation did offer code: suggested, not taken
        verdict.label = PrLabel::PN;
    } else {
        verdict.label = PrLabel::NE;
    }
    return verdict;
}

Percentage aggregate_integration(const std::vector<NGramSet>& snippet_grams,
    const NGramSet& pr_added_grams)
{
    NGramSet combined;
    combined.n = pr_added_grams.n;
    for (const auto& set : snippet_grams) {
        if (set.n != combined.n)
            throw Error(ErrorCode::MismatchedGramSize,
                "snippet grams built with a different gram size than the pull request grams");
        combined.grams.insert(set.grams.begin(), set.grams.end());
    }
    if (combined.grams.empty())
        throw Error(ErrorCode::EmptyReference,
            "cannot compute integration for token-free snippets");
    return containment(combined, pr_added_grams);
}

} // namespace patchprov
