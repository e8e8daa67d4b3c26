#pragma once

#include "patchprov/normalize.hpp"
#include "patchprov/percent.hpp"

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

namespace patchprov {

// Deduplicated set of token n-grams. Tokens never contain whitespace after
// normalization, so grams are stored as space-joined strings.
struct NGramSet {
    int n = 1;
    std::unordered_set<std::string> grams;

    std::uint64_t total_grams() const { return grams.size(); }
};

struct MatchResult {
    bool matched = false;
    std::uint64_t matched_gram_count = 0;
    std::uint64_t snippet_gram_count = 0;
    Percentage containment_pct; // snippet side as reference

    bool operator==(const MatchResult&) const = default;
};

// Split normalized lines into tokens: maximal [a-z0-9_]+ runs, any other
// character as a single token. Concatenating the tokens of one line
// reproduces that line exactly. Tokens do not cross line boundaries.
std::vector<std::string> tokenize(const NormalizedLines& normalized);

// All consecutive windows of length n over the token sequence, deduplicated.
// Fewer than n tokens yields an empty set.
NGramSet build_ngrams(const std::vector<std::string>& tokens, int n);

// Hash-set intersection of snippet grams against hunk grams. matched is
// true when at least `threshold` distinct grams are shared. An empty
// snippet set yields an unmatched result with a zero percentage.
// Throws Error(MismatchedGramSize) when the two sets differ in n.
MatchResult match_snippet_against_hunk(const NGramSet& snippet_grams, const NGramSet& hunk_grams,
    std::uint64_t threshold = 1);

// Containment ratio: |t_x ∩ t_y| / |t_x| × 100 with the snippet as t_x.
// Throws Error(EmptyReference) when t_x is empty.
Percentage containment(const NGramSet& t_x, const NGramSet& t_y);

// Convenience: normalized lines -> n-gram set in one step.
NGramSet grams_of_lines(const NormalizedLines& normalized, int n);

} // namespace patchprov
