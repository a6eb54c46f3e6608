#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace radml {

/// Error in user-supplied data or files (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Error in how the program was invoked (CLI exit code 1).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A sampled workflow turned out to be unusable (e.g. every feature was
/// deselected). The search discards such workflows instead of aborting.
class DegenerateWorkflow : public std::runtime_error {
public:
    explicit DegenerateWorkflow(const std::string& msg) : std::runtime_error(msg) {}
};

/// Sentinel for missing scalar values, in memory and in CSV (literal "NaN").
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

inline bool is_missing(double v) { return std::isnan(v); }

/// FNV-1a over a byte sequence; used for deterministic content hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), seed);
}

} // namespace radml
