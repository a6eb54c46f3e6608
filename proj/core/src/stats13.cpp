#include "radml/stats13.hpp"

#include "radml/common.hpp"

#include <algorithm>
#include <cmath>

namespace radml {

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw DataError("percentile of empty set");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

StatVector13 stats13(const std::vector<double>& values) {
    if (values.empty()) throw DataError("stats13 of empty set");
    const std::size_t n = values.size();

    StatVector13 s;
    s.min = values[0];
    s.max = values[0];
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        sum += v;
        sum_sq += v * v;
    }
    s.mean = sum / static_cast<double>(n);
    s.range = s.max - s.min;
    s.energy = sum_sq;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    s.std_dev = std::sqrt(m2);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2) - 3.0; // excess kurtosis
    }

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    if (n % 2 == 1) {
        s.median = sorted[n / 2];
    } else {
        s.median = 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    s.quartile_range = percentile(sorted, 75.0) - percentile(sorted, 25.0);

    // Fixed 50-bin histogram over the value range.
    constexpr int kBins = 50;
    std::array<std::size_t, kBins> hist{};
    if (s.range > 0.0) {
        const double width = s.range / kBins;
        for (double v : sorted) {
            int b = static_cast<int>((v - s.min) / width);
            b = std::clamp(b, 0, kBins - 1);
            ++hist[static_cast<std::size_t>(b)];
        }
        std::size_t best = 0;
        for (std::size_t b = 1; b < kBins; ++b) {
            if (hist[b] > hist[best]) best = b;
        }
        s.peak = static_cast<double>(hist[best]);
        s.peak_position = s.min + (static_cast<double>(best) + 0.5) * width;
        double entropy = 0.0;
        for (std::size_t b = 0; b < kBins; ++b) {
            if (hist[b] == 0) continue;
            const double p = static_cast<double>(hist[b]) / static_cast<double>(n);
            entropy -= p * std::log2(p);
        }
        s.entropy = entropy;
    } else {
        s.peak = static_cast<double>(n);
        s.peak_position = s.min;
        s.entropy = 0.0;
    }
    return s;
}

std::vector<int> quantize(const std::vector<double>& values, int n_levels) {
    if (values.empty()) throw DataError("quantize of empty set");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<int> levels(values.size(), 0);
    if (hi <= lo) return levels;
    const double width = (hi - lo) / n_levels;
    for (std::size_t i = 0; i < values.size(); ++i) {
        int b = static_cast<int>(std::floor((values[i] - lo) / width));
        levels[i] = std::clamp(b, 0, n_levels - 1);
    }
    return levels;
}

} // namespace radml
