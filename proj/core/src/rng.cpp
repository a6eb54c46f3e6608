#include "radml/rng.hpp"

#include "radml/common.hpp"

#include <cmath>

namespace radml {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

Rng Rng::derive(std::uint64_t master, const std::string& label,
                std::initializer_list<std::uint64_t> indices) {
    std::uint64_t h = fnv1a64(label);
    h = splitmix64(h ^ splitmix64(master));
    for (std::uint64_t idx : indices) {
        h = splitmix64(h ^ splitmix64(idx + 0x632be59bd9b4e019ULL));
    }
    return Rng(h);
}

double Rng::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    // Rejection sampling over the top multiple of n.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

} // namespace radml
