#pragma once

#include <cstdint>
#include <string>

namespace patchprov {

// A percentage kept as an exact hit/total count pair. Floating point only
// enters at render time, so report ordering and golden files stay stable.
struct Percentage {
    std::uint64_t hits = 0;
    std::uint64_t total = 0;

    // Rounded to tenths of a percent, half away from zero.
    std::uint64_t tenths() const
    {
        if (total == 0)
            return 0;
        return (hits * 1000 + total / 2) / total;
    }

    double value() const { return static_cast<double>(tenths()) / 10.0; }

    // Exact value before rounding; used where interpolation needs full precision.
    double raw() const
    {
        if (total == 0)
            return 0.0;
        return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
    }

    std::string str() const
    {
        std::uint64_t t = tenths();
        return std::to_string(t / 10) + "." + std::to_string(t % 10);
    }

    bool operator==(const Percentage&) const = default;
};

// Render an arbitrary percentage value with one decimal place.
inline std::string format_pct(double value)
{
    bool neg = value < 0;
    double mag = neg ? -value : value;
    auto t = static_cast<std::uint64_t>(mag * 10.0 + 0.5);
    std::string s = std::to_string(t / 10) + "." + std::to_string(t % 10);
    return neg ? "-" + s : s;
}

// Round to one decimal place, half away from zero. Applied to every
// percentage before it is emitted so reports are byte-stable.
inline double round_tenths(double value)
{
    bool neg = value < 0;
    double mag = neg ? -value : value;
    auto t = static_cast<std::uint64_t>(mag * 10.0 + 0.5);
    double r = static_cast<double>(t) / 10.0;
    return neg ? -r : r;
}

} // namespace patchprov
