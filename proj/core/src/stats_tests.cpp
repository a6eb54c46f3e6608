#include "radml/stats_tests.hpp"

#include "radml/common.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace radml::stats {

namespace {

double u_statistic(const std::vector<double>& x, const std::vector<double>& y) {
    double u = 0;
    for (double xi : x) {
        for (double yj : y) {
            if (yj < xi) u += 1.0;
            else if (yj == xi) u += 0.5;
        }
    }
    return u;
}

} // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw DataError("mann_whitney_u requires non-empty samples");
    const std::size_t n = x.size(), m = y.size();
    const double nm = static_cast<double>(n) * static_cast<double>(m);

    MannWhitneyResult r;
    r.u = u_statistic(x, y);

    if (n + m <= 12) {
        // exact: enumerate every split of the pooled values into an x-part
        r.exact = true;
        std::vector<double> pooled(x);
        pooled.insert(pooled.end(), y.begin(), y.end());
        const std::size_t total = pooled.size();
        std::vector<std::size_t> pick(n);
        std::iota(pick.begin(), pick.end(), 0);
        const double observed_dev = std::abs(r.u - nm / 2.0);
        std::size_t count = 0, as_extreme = 0;
        for (;;) {
            std::vector<double> px, py;
            px.reserve(n);
            py.reserve(m);
            std::size_t k = 0;
            for (std::size_t i = 0; i < total; ++i) {
                if (k < n && pick[k] == i) {
                    px.push_back(pooled[i]);
                    ++k;
                } else {
                    py.push_back(pooled[i]);
                }
            }
            ++count;
            if (std::abs(u_statistic(px, py) - nm / 2.0) >= observed_dev - 1e-12) ++as_extreme;

            // next combination
            std::size_t i = n;
            while (i-- > 0) {
                if (pick[i] != i + total - n) {
                    ++pick[i];
                    for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
                    break;
                }
                if (i == 0) {
                    i = total; // done marker
                    break;
                }
            }
            if (i == total) break;
        }
        r.p = static_cast<double>(as_extreme) / static_cast<double>(count);
        return r;
    }

    // normal approximation with tie correction
    std::vector<double> pooled(x);
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::map<double, std::size_t> tie_counts;
    for (double v : pooled) ++tie_counts[v];
    const double big_n = static_cast<double>(pooled.size());
    double tie_term = 0;
    for (const auto& [v, t] : tie_counts) {
        (void)v;
        tie_term += static_cast<double>(t) * t * t - static_cast<double>(t);
    }
    const double var = nm / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if (var <= 0) {
        r.p = 1.0;
        return r;
    }
    const double dev = std::max(0.0, std::abs(r.u - nm / 2.0) - 0.5); // continuity correction
    const double z = dev / std::sqrt(var);
    r.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
    return r;
}

double chi_square(const std::vector<std::vector<double>>& contingency) {
    if (contingency.empty() || contingency[0].empty()) throw DataError("empty contingency table");
    const std::size_t cols = contingency[0].size();
    for (const auto& row : contingency) {
        if (row.size() != cols) throw DataError("ragged contingency table");
        for (double v : row) {
            if (v < 0 || !std::isfinite(v)) throw DataError("contingency counts must be >= 0");
        }
    }
    // drop empty rows/columns
    std::vector<std::vector<double>> t;
    for (const auto& row : contingency) {
        double s = 0;
        for (double v : row) s += v;
        if (s > 0) t.push_back(row);
    }
    if (t.empty()) return 1.0;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < cols; ++c) {
        double s = 0;
        for (const auto& row : t) s += row[c];
        if (s > 0) keep.push_back(c);
    }
    const std::size_t r = t.size(), c = keep.size();
    if (r < 2 || c < 2) return 1.0;

    std::vector<double> row_sum(r, 0.0), col_sum(c, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            row_sum[i] += t[i][keep[j]];
            col_sum[j] += t[i][keep[j]];
            total += t[i][keep[j]];
        }
    }
    const bool yates = r == 2 && c == 2;
    double x2 = 0;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double expected = row_sum[i] * col_sum[j] / total;
            double dev = std::abs(t[i][keep[j]] - expected);
            if (yates) dev = std::max(0.0, dev - 0.5);
            x2 += dev * dev / expected;
        }
    }
    const double df = static_cast<double>((r - 1) * (c - 1));
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x2));
}

std::vector<double> bonferroni(const std::vector<double>& p_values) {
    const double m = static_cast<double>(p_values.size());
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) out.push_back(std::min(1.0, m * p));
    return out;
}

double cohens_kappa(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty()) throw DataError("kappa requires paired ratings");
    const double n = static_cast<double>(a.size());
    std::map<int, double> pa, pb;
    double agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0;
        pb[b[i]] += 1.0;
        if (a[i] == b[i]) agree += 1.0;
    }
    const double po = agree / n;
    double pe = 0;
    for (const auto& [cat, ca] : pa) {
        auto it = pb.find(cat);
        if (it != pb.end()) pe += (ca / n) * (it->second / n);
    }
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DataError("auc: scores/labels length mismatch");
    double pairs = 0, concordant = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) concordant += 1.0;
            else if (scores[i] == scores[j]) concordant += 0.5;
        }
    }
    if (pairs == 0) throw DataError("auc requires both classes");
    return concordant / pairs;
}

DelongResult delong_test(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                         const std::vector<int>& labels) {
    if (scores_a.size() != labels.size() || scores_b.size() != labels.size()) {
        throw DataError("delong_test requires paired scores on identical patients");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) throw DataError("delong_test requires both classes");
    const double m = static_cast<double>(pos.size());
    const double n = static_cast<double>(neg.size());

    auto psi = [](double sp, double sn) { return sp > sn ? 1.0 : (sp == sn ? 0.5 : 0.0); };

    // structural components
    auto components = [&](const std::vector<double>& s, std::vector<double>& v10,
                          std::vector<double>& v01) {
        v10.assign(pos.size(), 0.0);
        v01.assign(neg.size(), 0.0);
        for (std::size_t i = 0; i < pos.size(); ++i) {
            for (std::size_t j = 0; j < neg.size(); ++j) {
                const double k = psi(s[pos[i]], s[neg[j]]);
                v10[i] += k;
                v01[j] += k;
            }
        }
        for (auto& v : v10) v /= n;
        for (auto& v : v01) v /= m;
    };
    std::vector<double> a10, a01, b10, b01;
    components(scores_a, a10, a01);
    components(scores_b, b10, b01);

    DelongResult r;
    r.auc_a = std::accumulate(a10.begin(), a10.end(), 0.0) / m;
    r.auc_b = std::accumulate(b10.begin(), b10.end(), 0.0) / m;

    const double delta = r.auc_a - r.auc_b;
    if (delta == 0.0) {
        r.p = 1.0;
        return r;
    }

    auto cov = [](const std::vector<double>& u, const std::vector<double>& v, double mu, double mv) {
        double s = 0;
        for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - mu) * (v[i] - mv);
        return s / (static_cast<double>(u.size()) - 1.0);
    };
    const double s10 = cov(a10, a10, r.auc_a, r.auc_a) + cov(b10, b10, r.auc_b, r.auc_b) -
                       2.0 * cov(a10, b10, r.auc_a, r.auc_b);
    const double s01 = cov(a01, a01, r.auc_a, r.auc_a) + cov(b01, b01, r.auc_b, r.auc_b) -
                       2.0 * cov(a01, b01, r.auc_a, r.auc_b);
    const double var = s10 / m + s01 / n;
    if (var <= 0.0) {
        r.p = 0.0;
        r.degenerate = true;
        return r;
    }
    const double z = delta / std::sqrt(var);
    r.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
    return r;
}

Interval corrected_resampled_ci(const std::vector<double>& values, double n_train, double n_test,
                                double level) {
    if (values.size() < 2) throw DataError("corrected_resampled_ci requires at least 2 values");
    if (!(n_train > 0.0)) throw DataError("corrected_resampled_ci requires n_train > 0");
    const double k = static_cast<double>(values.size());
    double mean = 0;
    for (double v : values) mean += v;
    mean /= k;
    double s2 = 0;
    for (double v : values) s2 += (v - mean) * (v - mean);
    s2 /= (k - 1.0);

    Interval out;
    out.mean = mean;
    if (s2 == 0.0) {
        out.lower = out.upper = mean;
        return out;
    }
    boost::math::students_t dist(k - 1.0);
    const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
    const double half = t * std::sqrt((1.0 / k + n_test / n_train) * s2);
    out.lower = mean - half;
    out.upper = mean + half;
    return out;
}

} // namespace radml::stats
