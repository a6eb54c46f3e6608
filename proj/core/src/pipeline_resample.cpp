#include "radml/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace radml::pipeline {

namespace {

struct Split {
    std::vector<std::size_t> minority, majority;
    int minority_label = 1;
};

Split split_classes(const std::vector<int>& y) {
    Split s;
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) throw DataError("resampling requires both classes");
    if (pos.size() <= neg.size()) {
        s.minority = pos;
        s.majority = neg;
        s.minority_label = 1;
    } else {
        s.minority = neg;
        s.majority = pos;
        s.minority_label = 0;
    }
    return s;
}

double sq_distance(const Matrix& x, std::size_t a, std::size_t b) {
    return (x.row(static_cast<Eigen::Index>(a)) - x.row(static_cast<Eigen::Index>(b))).squaredNorm();
}

/// Indices of the k nearest rows to `target` among `candidates` (excluding
/// target itself); ties broken by index for determinism.
std::vector<std::size_t> k_nearest(const Matrix& x, std::size_t target,
                                   const std::vector<std::size_t>& candidates, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(candidates.size());
    for (std::size_t c : candidates) {
        if (c == target) continue;
        order.push_back({sq_distance(x, target, c), c});
    }
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.push_back(order[i].second);
    return out;
}

ResampleResult keep_rows(const Matrix& x, const std::vector<int>& y,
                         std::vector<std::size_t> rows) {
    std::sort(rows.begin(), rows.end());
    ResampleResult r;
    r.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
    r.y.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        r.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
        r.y.push_back(y[rows[i]]);
    }
    return r;
}

ResampleResult random_over(const Matrix& x, const std::vector<int>& y, Rng& rng) {
    const Split s = split_classes(y);
    const std::size_t need = s.majority.size() - s.minority.size();
    ResampleResult r;
    r.x.resize(static_cast<Eigen::Index>(y.size() + need), x.cols());
    r.x.topRows(x.rows()) = x;
    r.y = y;
    for (std::size_t i = 0; i < need; ++i) {
        const std::size_t pick =
            s.minority[rng.uniform_int(static_cast<std::uint64_t>(s.minority.size()))];
        r.x.row(static_cast<Eigen::Index>(y.size() + i)) = x.row(static_cast<Eigen::Index>(pick));
        r.y.push_back(s.minority_label);
    }
    return r;
}

ResampleResult random_under(const Matrix& x, const std::vector<int>& y, Rng& rng) {
    const Split s = split_classes(y);
    std::vector<std::size_t> majority = s.majority;
    rng.shuffle(majority);
    majority.resize(s.minority.size());
    std::vector<std::size_t> keep = s.minority;
    keep.insert(keep.end(), majority.begin(), majority.end());
    return keep_rows(x, y, std::move(keep));
}

ResampleResult near_miss(const Matrix& x, const std::vector<int>& y, int version) {
    const Split s = split_classes(y);
    const std::size_t k = std::min<std::size_t>(3, s.minority.size());
    std::vector<std::pair<double, std::size_t>> scored;

    std::vector<std::size_t> majority_pool = s.majority;
    if (version == 3) {
        // restrict to majority samples that are near-neighbors of the minority
        std::set<std::size_t> pool;
        for (std::size_t m : s.minority) {
            for (std::size_t j : k_nearest(x, m, s.majority, k)) pool.insert(j);
        }
        if (pool.size() >= s.minority.size()) {
            majority_pool.assign(pool.begin(), pool.end());
        }
    }

    for (std::size_t j : majority_pool) {
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t m : s.minority) order.push_back({sq_distance(x, j, m), m});
        std::sort(order.begin(), order.end());
        double mean = 0;
        if (version == 2) { // k farthest minority samples
            for (std::size_t i = 0; i < k; ++i) mean += std::sqrt(order[order.size() - 1 - i].first);
        } else { // versions 1 and 3: k nearest
            for (std::size_t i = 0; i < k; ++i) mean += std::sqrt(order[i].first);
        }
        scored.push_back({mean / static_cast<double>(k), j});
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::size_t> keep = s.minority;
    for (std::size_t i = 0; i < std::min(s.minority.size(), scored.size()); ++i) {
        keep.push_back(scored[i].second);
    }
    return keep_rows(x, y, std::move(keep));
}

/// 3-NN relabel check used by the cleaning rules.
bool misclassified_by_3nn(const Matrix& x, const std::vector<int>& y, std::size_t i) {
    std::vector<std::size_t> all(y.size());
    std::iota(all.begin(), all.end(), 0);
    const auto nn = k_nearest(x, i, all, 3);
    int votes = 0;
    for (std::size_t j : nn) votes += y[j] == 1 ? 1 : -1;
    const int predicted = votes > 0 ? 1 : 0;
    return predicted != y[i];
}

ResampleResult neighborhood_cleaning(const Matrix& x, const std::vector<int>& y) {
    const Split s = split_classes(y);
    std::set<std::size_t> remove;
    // majority samples misclassified by their neighborhood
    for (std::size_t j : s.majority) {
        if (misclassified_by_3nn(x, y, j)) remove.insert(j);
    }
    // majority neighbors of misclassified minority samples
    std::vector<std::size_t> all(y.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t m : s.minority) {
        if (!misclassified_by_3nn(x, y, m)) continue;
        for (std::size_t j : k_nearest(x, m, all, 3)) {
            if (y[j] != s.minority_label) remove.insert(j);
        }
    }
    // never empty the majority class entirely
    if (remove.size() >= s.majority.size()) remove.erase(std::prev(remove.end()));
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!remove.count(i)) keep.push_back(i);
    }
    return keep_rows(x, y, std::move(keep));
}

void append_synthetic(Matrix& x, std::vector<int>& y, const Matrix& source, std::size_t base,
                      std::size_t neighbor, double t, int label) {
    x.conservativeResize(x.rows() + 1, Eigen::NoChange);
    x.row(x.rows() - 1) = source.row(static_cast<Eigen::Index>(base)) +
                          t * (source.row(static_cast<Eigen::Index>(neighbor)) -
                               source.row(static_cast<Eigen::Index>(base)));
    y.push_back(label);
}

ResampleResult smote_family(const Matrix& x, const std::vector<int>& y, ResamplerKind kind,
                            Rng& rng) {
    const Split s = split_classes(y);
    const std::size_t k = 5;
    std::size_t need = s.majority.size() - s.minority.size();

    // seed set: all minority, or the borderline "danger" subset
    std::vector<std::size_t> seeds = s.minority;
    if (kind == ResamplerKind::SmoteBorderline) {
        std::vector<std::size_t> all(y.size());
        std::iota(all.begin(), all.end(), 0);
        std::vector<std::size_t> danger;
        for (std::size_t m : s.minority) {
            const auto nn = k_nearest(x, m, all, k);
            std::size_t majority_neighbors = 0;
            for (std::size_t j : nn) majority_neighbors += (y[j] != s.minority_label);
            if (2 * majority_neighbors >= nn.size() && majority_neighbors < nn.size()) {
                danger.push_back(m);
            }
        }
        if (!danger.empty()) seeds = danger;
    }

    ResampleResult r;
    r.x = x;
    r.y = y;
    for (std::size_t i = 0; i < need; ++i) {
        const std::size_t base = seeds[rng.uniform_int(static_cast<std::uint64_t>(seeds.size()))];
        const auto nn = k_nearest(x, base, s.minority, k);
        const std::size_t neighbor = nn[rng.uniform_int(static_cast<std::uint64_t>(nn.size()))];
        append_synthetic(r.x, r.y, x, base, neighbor, rng.uniform01(), s.minority_label);
    }

    if (kind == ResamplerKind::SmoteTomek) {
        // drop majority members of Tomek links
        std::vector<std::size_t> all(r.y.size());
        std::iota(all.begin(), all.end(), 0);
        std::set<std::size_t> remove;
        for (std::size_t i = 0; i < r.y.size(); ++i) {
            if (r.y[i] == s.minority_label) continue;
            const auto nn_i = k_nearest(r.x, i, all, 1);
            if (nn_i.empty() || r.y[nn_i[0]] == r.y[i]) continue;
            const auto nn_back = k_nearest(r.x, nn_i[0], all, 1);
            if (!nn_back.empty() && nn_back[0] == i) remove.insert(i);
        }
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < r.y.size(); ++i) {
            if (!remove.count(i)) keep.push_back(i);
        }
        return keep_rows(r.x, r.y, std::move(keep));
    }
    if (kind == ResamplerKind::SmoteEnn) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < r.y.size(); ++i) {
            if (!misclassified_by_3nn(r.x, r.y, i)) keep.push_back(i);
        }
        bool has_pos = false, has_neg = false;
        for (std::size_t i : keep) (r.y[i] == 1 ? has_pos : has_neg) = true;
        if (keep.empty() || !has_pos || !has_neg) return r; // cleaning collapsed; keep SMOTE output
        return keep_rows(r.x, r.y, std::move(keep));
    }
    return r;
}

ResampleResult adasyn(const Matrix& x, const std::vector<int>& y, Rng& rng) {
    const Split s = split_classes(y);
    const std::size_t k = 5;
    const std::size_t need = s.majority.size() - s.minority.size();
    std::vector<std::size_t> all(y.size());
    std::iota(all.begin(), all.end(), 0);

    std::vector<double> density(s.minority.size(), 0.0);
    double total = 0;
    for (std::size_t i = 0; i < s.minority.size(); ++i) {
        const auto nn = k_nearest(x, s.minority[i], all, k);
        std::size_t majority_neighbors = 0;
        for (std::size_t j : nn) majority_neighbors += (y[j] != s.minority_label);
        density[i] = nn.empty() ? 0.0
                               : static_cast<double>(majority_neighbors) /
                                     static_cast<double>(nn.size());
        total += density[i];
    }
    if (total == 0) { // interior-only minority: fall back to uniform allocation
        std::fill(density.begin(), density.end(), 1.0);
        total = static_cast<double>(density.size());
    }

    // largest-remainder allocation of `need` synthetics
    std::vector<std::size_t> alloc(s.minority.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        const double share = density[i] / total * static_cast<double>(need);
        alloc[i] = static_cast<std::size_t>(std::floor(share));
        assigned += alloc[i];
        remainders.push_back({-(share - std::floor(share)), i});
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t i = 0; assigned < need && i < remainders.size(); ++i, ++assigned) {
        ++alloc[remainders[i].second];
    }

    ResampleResult r;
    r.x = x;
    r.y = y;
    for (std::size_t i = 0; i < s.minority.size(); ++i) {
        const auto nn = k_nearest(x, s.minority[i], s.minority, k);
        for (std::size_t c = 0; c < alloc[i]; ++c) {
            if (nn.empty()) {
                append_synthetic(r.x, r.y, x, s.minority[i], s.minority[i], 0.0, s.minority_label);
            } else {
                const std::size_t neighbor = nn[rng.uniform_int(static_cast<std::uint64_t>(nn.size()))];
                append_synthetic(r.x, r.y, x, s.minority[i], neighbor, rng.uniform01(),
                                 s.minority_label);
            }
        }
    }
    return r;
}

} // namespace

ResampleResult resample(const Matrix& x, const std::vector<int>& y, ResamplerKind kind,
                        int near_miss_version, Rng& rng) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw DataError("resample x/y mismatch");
    const Split s = split_classes(y);

    if (kind == ResamplerKind::None) {
        ResampleResult r;
        r.x = x;
        r.y = y;
        return r;
    }

    // k-neighbor methods need enough minority samples
    const bool needs_neighbors =
        kind == ResamplerKind::Smote || kind == ResamplerKind::SmoteBorderline ||
        kind == ResamplerKind::SmoteTomek || kind == ResamplerKind::SmoteEnn ||
        kind == ResamplerKind::Adasyn || kind == ResamplerKind::NearMiss ||
        kind == ResamplerKind::NeighborhoodCleaning;
    constexpr std::size_t kNeighbors = 5;
    if (needs_neighbors && s.minority.size() <= kNeighbors) {
        auto r = random_over(x, y, rng);
        r.notes.push_back(std::string("resampler ") + to_string(kind) +
                          " fell back to random_over (minority too small)");
        return r;
    }

    switch (kind) {
        case ResamplerKind::RandomOver: return random_over(x, y, rng);
        case ResamplerKind::RandomUnder: return random_under(x, y, rng);
        case ResamplerKind::NearMiss: return near_miss(x, y, near_miss_version);
        case ResamplerKind::NeighborhoodCleaning: return neighborhood_cleaning(x, y);
        case ResamplerKind::Adasyn: return adasyn(x, y, rng);
        case ResamplerKind::Smote:
        case ResamplerKind::SmoteBorderline:
        case ResamplerKind::SmoteTomek:
        case ResamplerKind::SmoteEnn: return smote_family(x, y, kind, rng);
        case ResamplerKind::None: break;
    }
    throw DataError("unknown resampler");
}

} // namespace radml::pipeline
