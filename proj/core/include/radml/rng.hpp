#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace radml {

/// Deterministic random stream. Wraps std::mt19937_64 (fully specified by the
/// standard) with hand-rolled value conversions, so two builds draw identical
/// sequences regardless of standard-library distribution internals.
///
/// Independent streams are derived from a master seed plus a label and
/// indices; every parallel unit of work (patient, workflow, tree, split) owns
/// its own stream, which makes results independent of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Stream derivation: mixes (master, label, indices...) into a fresh seed.
    static Rng derive(std::uint64_t master, const std::string& label,
                      std::initializer_list<std::uint64_t> indices = {});

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Log-uniform over [lo, hi], lo > 0.
    double log_uniform(double lo, double hi);

    /// Uniform integer in [0, n), n > 0. Unbiased (rejection sampling).
    std::uint64_t uniform_int(std::uint64_t n);

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Marsaglia polar; caches the spare deviate.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(static_cast<std::uint64_t>(i)));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace radml
