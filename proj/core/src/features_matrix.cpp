#include "radml/features.hpp"

#include "texture_common.hpp"

#include <cmath>
#include <map>

namespace radml::features {

namespace {

using detail::kAngleSteps;
using detail::LevelSlices;

// Sparse accumulation matrix keyed by (gray level, size). Gray levels enter
// the feature formulas 1-based.
using SizeMatrix = std::map<std::pair<int, int>, double>;

struct MarginalStats {
    double n = 0;                     // total entries
    std::map<int, double> by_level;   // marginal over levels
    std::map<int, double> by_size;    // marginal over sizes
};

MarginalStats marginals(const SizeMatrix& m) {
    MarginalStats s;
    for (const auto& [key, c] : m) {
        s.n += c;
        s.by_level[key.first] += c;
        s.by_size[key.second] += c;
    }
    return s;
}

double level_value(int level) { return static_cast<double>(level + 1); }

/// The 16 emphasis/nonuniformity/variance/entropy features shared by the
/// size-zone and run-length matrices, in the dictionary's alphabetical order.
/// `size_normalizer` is the denominator of the percentage feature.
std::vector<double> zone_style_features(const SizeMatrix& m, double size_normalizer,
                                        bool run_style) {
    const MarginalStats ms = marginals(m);
    const double n = ms.n;

    double gln = 0, glnn = 0, szn = 0, sznn = 0;
    for (const auto& [lvl, c] : ms.by_level) {
        (void)lvl;
        gln += c * c;
    }
    for (const auto& [sz, c] : ms.by_size) {
        (void)sz;
        szn += c * c;
    }
    gln /= n;
    glnn = gln / n;
    szn /= n;
    sznn = szn / n;

    double mu_level = 0, mu_size = 0;
    for (const auto& [key, c] : m) {
        mu_level += (c / n) * level_value(key.first);
        mu_size += (c / n) * key.second;
    }
    double var_level = 0, var_size = 0, entropy = 0;
    double sae = 0, lae = 0, lgl = 0, hgl = 0, salgl = 0, sahgl = 0, lalgl = 0, lahgl = 0;
    for (const auto& [key, c] : m) {
        const double p = c / n;
        const double v = level_value(key.first);
        const double s = key.second;
        var_level += p * (v - mu_level) * (v - mu_level);
        var_size += p * (s - mu_size) * (s - mu_size);
        entropy -= p * std::log2(p);
        sae += p / (s * s);
        lae += p * s * s;
        lgl += p / (v * v);
        hgl += p * v * v;
        salgl += p / (v * v * s * s);
        sahgl += p * v * v / (s * s);
        lalgl += p * s * s / (v * v);
        lahgl += p * v * v * s * s;
    }
    const double percentage = n / size_normalizer;

    if (run_style) {
        // GrayLevelNonUniformity, GrayLevelNonUniformityNormalized, GrayLevelVariance,
        // HighGrayLevelRunEmphasis, LongRunEmphasis, LongRunHighGrayLevelEmphasis,
        // LongRunLowGrayLevelEmphasis, LowGrayLevelRunEmphasis, RunEntropy,
        // RunLengthNonUniformity, RunLengthNonUniformityNormalized, RunPercentage,
        // RunVariance, ShortRunEmphasis, ShortRunHighGrayLevelEmphasis,
        // ShortRunLowGrayLevelEmphasis
        return {gln, glnn, var_level, hgl, lae, lahgl, lalgl, lgl,
                entropy, szn, sznn, percentage, var_size, sae, sahgl, salgl};
    }
    // GrayLevelNonUniformity, GrayLevelNonUniformityNormalized, GrayLevelVariance,
    // HighGrayLevelZoneEmphasis, LargeAreaEmphasis, LargeAreaHighGrayLevelEmphasis,
    // LargeAreaLowGrayLevelEmphasis, LowGrayLevelZoneEmphasis, SizeZoneNonUniformity,
    // SizeZoneNonUniformityNormalized, SmallAreaEmphasis, SmallAreaHighGrayLevelEmphasis,
    // SmallAreaLowGrayLevelEmphasis, ZoneEntropy, ZonePercentage, ZoneVariance
    return {gln,  glnn, var_level, hgl,  lae,   lahgl,      lalgl, lgl,
            szn,  sznn, sae,       sahgl, salgl, entropy,   percentage, var_size};
}

void accumulate_zones(const LevelSlices& ls, std::size_t z, SizeMatrix& zones) {
    const int nx = static_cast<int>(ls.nx), ny = static_cast<int>(ls.ny);
    const auto& grid = ls.grids[z];
    std::vector<char> visited(grid.size(), 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * ls.nx + x;
            if (grid[idx] < 0 || visited[idx]) continue;
            const int level = grid[idx];
            int size = 0;
            stack.push_back({x, y});
            visited[idx] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++size;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx2 = cx + dx, ny2 = cy + dy;
                        if (nx2 < 0 || nx2 >= nx || ny2 < 0 || ny2 >= ny) continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny2) * ls.nx + nx2;
                        if (visited[nidx] || grid[nidx] != level) continue;
                        visited[nidx] = 1;
                        stack.push_back({nx2, ny2});
                    }
                }
            }
            zones[{level, size}] += 1.0;
        }
    }
}

void accumulate_runs(const LevelSlices& ls, std::size_t z, SizeMatrix& runs) {
    const int nx = static_cast<int>(ls.nx), ny = static_cast<int>(ls.ny);
    const auto& grid = ls.grids[z];
    auto at = [&](int x, int y) -> int {
        if (x < 0 || x >= nx || y < 0 || y >= ny) return -1;
        return grid[static_cast<std::size_t>(y) * ls.nx + x];
    };
    for (const auto& step : kAngleSteps) {
        const int dx = step[0], dy = step[1];
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const int level = at(x, y);
                if (level < 0) continue;
                // start of a run only if the previous cell along the direction differs
                if (at(x - dx, y - dy) == level) continue;
                int length = 1;
                int cx = x + dx, cy = y + dy;
                while (at(cx, cy) == level) {
                    ++length;
                    cx += dx;
                    cy += dy;
                }
                runs[{level, length}] += 1.0;
            }
        }
    }
}

void accumulate_dependence(const LevelSlices& ls, std::size_t z, SizeMatrix& dep) {
    const int nx = static_cast<int>(ls.nx), ny = static_cast<int>(ls.ny);
    const auto& grid = ls.grids[z];
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const int level = grid[static_cast<std::size_t>(y) * ls.nx + x];
            if (level < 0) continue;
            int dependents = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int x2 = x + dx, y2 = y + dy;
                    if (x2 < 0 || x2 >= nx || y2 < 0 || y2 >= ny) continue;
                    if (grid[static_cast<std::size_t>(y2) * ls.nx + x2] == level) ++dependents;
                }
            }
            // dependence size counts the center pixel itself
            dep[{level, dependents + 1}] += 1.0;
        }
    }
}

std::vector<double> gldm_features(const SizeMatrix& m) {
    const MarginalStats ms = marginals(m);
    const double n = ms.n;

    double gln = 0, dnu = 0;
    for (const auto& [lvl, c] : ms.by_level) {
        (void)lvl;
        gln += c * c;
    }
    for (const auto& [sz, c] : ms.by_size) {
        (void)sz;
        dnu += c * c;
    }
    gln /= n;
    dnu /= n;
    const double dnun = dnu / n;

    double mu_level = 0, mu_size = 0;
    for (const auto& [key, c] : m) {
        mu_level += (c / n) * level_value(key.first);
        mu_size += (c / n) * key.second;
    }
    double var_level = 0, var_size = 0, entropy = 0;
    double sde = 0, lde = 0, lgl = 0, hgl = 0, sdlgl = 0, sdhgl = 0, ldlgl = 0, ldhgl = 0;
    for (const auto& [key, c] : m) {
        const double p = c / n;
        const double v = level_value(key.first);
        const double s = key.second;
        var_level += p * (v - mu_level) * (v - mu_level);
        var_size += p * (s - mu_size) * (s - mu_size);
        entropy -= p * std::log2(p);
        sde += p / (s * s);
        lde += p * s * s;
        lgl += p / (v * v);
        hgl += p * v * v;
        sdlgl += p / (v * v * s * s);
        sdhgl += p * v * v / (s * s);
        ldlgl += p * s * s / (v * v);
        ldhgl += p * v * v * s * s;
    }
    // DependenceEntropy, DependenceNonUniformity, DependenceNonUniformityNormalized,
    // DependenceVariance, GrayLevelNonUniformity, GrayLevelVariance,
    // HighGrayLevelEmphasis, LargeDependenceEmphasis, LargeDependenceHighGrayLevelEmphasis,
    // LargeDependenceLowGrayLevelEmphasis, LowGrayLevelEmphasis, SmallDependenceEmphasis,
    // SmallDependenceHighGrayLevelEmphasis, SmallDependenceLowGrayLevelEmphasis
    return {entropy, dnu, dnun, var_size, gln, var_level, hgl,
            lde, ldhgl, ldlgl, lgl, sde, sdhgl, sdlgl};
}

std::vector<double> ngtdm_features(const LevelSlices& ls) {
    constexpr int kLevels = 16;
    std::array<double, kLevels> s{};
    std::array<double, kLevels> count{};
    const int nx = static_cast<int>(ls.nx), ny = static_cast<int>(ls.ny);
    for (std::size_t z = 0; z < ls.nz; ++z) {
        const auto& grid = ls.grids[z];
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const int level = grid[static_cast<std::size_t>(y) * ls.nx + x];
                if (level < 0) continue;
                double sum = 0.0;
                int neighbors = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int x2 = x + dx, y2 = y + dy;
                        if (x2 < 0 || x2 >= nx || y2 < 0 || y2 >= ny) continue;
                        const int l2 = grid[static_cast<std::size_t>(y2) * ls.nx + x2];
                        if (l2 < 0) continue;
                        sum += level_value(l2);
                        ++neighbors;
                    }
                }
                if (neighbors == 0) continue;
                s[static_cast<std::size_t>(level)] +=
                    std::abs(level_value(level) - sum / neighbors);
                count[static_cast<std::size_t>(level)] += 1.0;
            }
        }
    }
    double n = 0.0;
    for (double c : count) n += c;
    if (n == 0.0) {
        return std::vector<double>(5, missing_value());
    }
    std::array<double, kLevels> p{};
    int n_gp = 0;
    double sum_ps = 0.0, sum_s = 0.0;
    for (int i = 0; i < kLevels; ++i) {
        p[static_cast<std::size_t>(i)] = count[static_cast<std::size_t>(i)] / n;
        if (p[static_cast<std::size_t>(i)] > 0) ++n_gp;
        sum_ps += p[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(i)];
        sum_s += s[static_cast<std::size_t>(i)];
    }

    double busyness_denominator = 0.0, contrast_pair = 0.0, complexity = 0.0, strength_num = 0.0;
    for (int i = 0; i < kLevels; ++i) {
        if (p[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; j < kLevels; ++j) {
            if (p[static_cast<std::size_t>(j)] == 0) continue;
            const double vi = level_value(i), vj = level_value(j);
            const double pi = p[static_cast<std::size_t>(i)], pj = p[static_cast<std::size_t>(j)];
            busyness_denominator += std::abs(vi * pi - vj * pj);
            contrast_pair += pi * pj * (vi - vj) * (vi - vj);
            complexity += std::abs(vi - vj) *
                          (pi * s[static_cast<std::size_t>(i)] + pj * s[static_cast<std::size_t>(j)]) /
                          (pi + pj);
            strength_num += (pi + pj) * (vi - vj) * (vi - vj);
        }
    }

    const double busyness = busyness_denominator > 0 ? sum_ps / busyness_denominator : 0.0;
    const double coarseness = sum_ps > 0 ? 1.0 / sum_ps : 1e6;
    const double complexity_value = complexity / n;
    const double contrast =
        n_gp > 1 ? (contrast_pair / (static_cast<double>(n_gp) * (n_gp - 1))) * (sum_s / n) : 0.0;
    const double strength = sum_s > 0 ? strength_num / sum_s : 0.0;

    // busyness, coarseness, complexity, contrast, strength
    return {busyness, coarseness, complexity_value, contrast, strength};
}

} // namespace

std::vector<double> matrix_family_features(const ImageVolume& image, const RoiMask& mask) {
    const LevelSlices ls = detail::quantize_roi(image, mask, 16);

    SizeMatrix zones, runs, dependence;
    for (std::size_t z = 0; z < ls.nz; ++z) {
        accumulate_zones(ls, z, zones);
        accumulate_runs(ls, z, runs);
        accumulate_dependence(ls, z, dependence);
    }
    const double n_pixels = static_cast<double>(ls.n_pixels);

    std::vector<double> out;
    out.reserve(51);
    auto glszm = zone_style_features(zones, n_pixels, /*run_style=*/false);
    out.insert(out.end(), glszm.begin(), glszm.end());
    auto glrlm = zone_style_features(runs, n_pixels * 4.0, /*run_style=*/true);
    out.insert(out.end(), glrlm.begin(), glrlm.end());
    auto gldm = gldm_features(dependence);
    out.insert(out.end(), gldm.begin(), gldm.end());
    auto ngtdm = ngtdm_features(ls);
    out.insert(out.end(), ngtdm.begin(), ngtdm.end());
    return out;
}

} // namespace radml::features
