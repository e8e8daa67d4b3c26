#include "patchprov/match.hpp"

#include "patchprov/errors.hpp"

namespace patchprov {
namespace {

bool is_word_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

} // namespace

std::vector<std::string> tokenize(const NormalizedLines& normalized)
{
    std::vector<std::string> tokens;
    for (const auto& line : normalized.lines) {
        size_t i = 0;
        while (i < line.size()) {
            if (is_word_char(line[i])) {
                size_t start = i;
                while (i < line.size() && is_word_char(line[i]))
                    ++i;
                tokens.emplace_back(line, start, i - start);
            } else {
                tokens.emplace_back(1, line[i]);
                ++i;
            }
        }
    }
    return tokens;
}

NGramSet build_ngrams(const std::vector<std::string>& tokens, int n)
{
    if (n < 1)
        throw Error(ErrorCode::InvalidArgument, "gram size must be >= 1");
    NGramSet set;
    set.n = n;
    if (tokens.size() < static_cast<size_t>(n))
        return set;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (size_t j = 1; j < static_cast<size_t>(n); ++j) {
            gram += ' ';
            gram += tokens[i + j];
        }
        set.grams.insert(std::move(gram));
    }
    return set;
}

MatchResult match_snippet_against_hunk(const NGramSet& snippet_grams, const NGramSet& hunk_grams,
    std::uint64_t threshold)
{
    if (snippet_grams.n != hunk_grams.n)
        throw Error(ErrorCode::MismatchedGramSize,
            "gram sizes differ: " + std::to_string(snippet_grams.n) + " vs "
                + std::to_string(hunk_grams.n));
    if (threshold == 0)
        throw Error(ErrorCode::InvalidArgument, "match threshold must be >= 1");

    MatchResult result;
    result.snippet_gram_count = snippet_grams.total_grams();

    // Probe the larger table with the smaller set; the count is symmetric.
    const auto& probe = snippet_grams.grams.size() <= hunk_grams.grams.size()
        ? snippet_grams.grams
        : hunk_grams.grams;
    const auto& table = snippet_grams.grams.size() <= hunk_grams.grams.size()
        ? hunk_grams.grams
        : snippet_grams.grams;
    for (const auto& gram : probe) {
        if (table.contains(gram))
            ++result.matched_gram_count;
    }
    result.matched = result.matched_gram_count >= threshold;
    // Token-free snippets cannot carry a containment ratio; report zero.
    result.containment_pct = Percentage { result.matched_gram_count, result.snippet_gram_count };
    return result;
}

Percentage containment(const NGramSet& t_x, const NGramSet& t_y)
{
    if (t_x.total_grams() == 0)
        throw Error(ErrorCode::EmptyReference, "containment reference set is empty");
    std::uint64_t shared = 0;
    for (const auto& gram : t_x.grams) {
        if (t_y.grams.contains(gram))
            ++shared;
    }
    return Percentage { shared, t_x.total_grams() };
}

NGramSet grams_of_lines(const NormalizedLines& normalized, int n)
{
    return build_ngrams(tokenize(normalized), n);
}

} // namespace patchprov
