#pragma once

// Seeded random generators for property tests. All randomness flows through
// a caller-owned mt19937 so every run is reproducible.

#include <random>
#include <string>
#include <vector>

namespace testsupport {

struct Rng {
    std::mt19937 engine;

    explicit Rng(uint32_t seed) : engine(seed) {}

    int between(int lo, int hi) // inclusive
    {
        std::uniform_int_distribution<int> dist(lo, hi);
        return dist(engine);
    }

    bool chance(double p)
    {
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        return dist(engine) < p;
    }

    template <typename T>
    const T& pick(const std::vector<T>& pool)
    {
        return pool[static_cast<size_t>(between(0, static_cast<int>(pool.size()) - 1))];
    }
};

// Identifier pool chosen so no word embeds a comment opener of the profiles
// exercised by the insensitivity property (no "begin", "end", "rem", ...).
inline const std::vector<std::string>& word_pool()
{
    static const std::vector<std::string> pool = {
        "alpha", "delta", "count", "items", "value", "total", "node", "left",
        "right", "temp", "data", "size", "len", "result", "acc", "sum",
        "idx", "key", "map_", "vec", "row", "col", "flag", "cur",
    };
    return pool;
}

// Punctuation that no builtin profile treats as (part of) a comment marker,
// even when characters from this set end up adjacent.
inline const std::vector<std::string>& safe_punct_pool()
{
    static const std::vector<std::string> pool = {
        "=", "+", ".", ",", "[", "]", ":", "?", "&", ")",
    };
    return pool;
}

inline std::string random_token(Rng& rng)
{
    if (rng.chance(0.65)) {
        std::string word = rng.pick(word_pool());
        if (rng.chance(0.4))
            word += std::to_string(rng.between(0, 99));
        return word;
    }
    return rng.pick(safe_punct_pool());
}

// a line as it would look after normalization: lowercase, no whitespace
inline std::string random_normalized_line(Rng& rng)
{
    int tokens = rng.between(1, 10);
    std::string line;
    for (int i = 0; i < tokens; ++i)
        line += random_token(rng);
    return line;
}

inline std::vector<std::string> random_normalized_lines(Rng& rng, int min_lines, int max_lines)
{
    int count = rng.between(min_lines, max_lines);
    std::vector<std::string> lines;
    lines.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        lines.push_back(random_normalized_line(rng));
    return lines;
}

// a raw source-ish line: tokens separated by spaces, mixed case allowed
inline std::string random_source_line(Rng& rng)
{
    int tokens = rng.between(1, 8);
    std::string line;
    for (int i = 0; i < tokens; ++i) {
        if (i > 0)
            line += " ";
        line += random_token(rng);
    }
    return line;
}

inline std::string flip_case(Rng& rng, const std::string& text)
{
    std::string out = text;
    for (auto& c : out)
        if (c >= 'a' && c <= 'z' && rng.chance(0.3))
            c = static_cast<char>(c - 'a' + 'A');
    return out;
}

inline std::string sprinkle_whitespace(Rng& rng, const std::string& text)
{
    std::string out;
    if (rng.chance(0.5))
        out.append(static_cast<size_t>(rng.between(1, 6)), rng.chance(0.5) ? '\t' : ' ');
    for (char c : text) {
        out += c;
        if (c == ' ' && rng.chance(0.4))
            out.append(static_cast<size_t>(rng.between(1, 3)), ' ');
    }
    if (rng.chance(0.5))
        out.append(static_cast<size_t>(rng.between(1, 4)), ' ');
    return out;
}

} // namespace testsupport
