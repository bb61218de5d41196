#include "emdtest/l1_testers.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace emdtest {

IndexedDist IndexedDist::from_pairs(std::vector<std::pair<std::int64_t, double>> pairs) {
    std::map<std::int64_t, double> acc;
    for (const auto& [k, w] : pairs) {
        if (!(w >= 0.0)) throw NormalizationError("negative weight");
        if (w > 0.0) acc[k] += w;
    }
    IndexedDist out;
    out.mass.assign(acc.begin(), acc.end());
    return out;
}

double IndexedDist::mass_of(std::int64_t key) const {
    auto it = std::lower_bound(mass.begin(), mass.end(), key,
                               [](const auto& e, std::int64_t k) { return e.first < k; });
    return (it != mass.end() && it->first == key) ? it->second : 0.0;
}

double IndexedDist::total() const {
    double sum = 0.0;
    for (const auto& [k, w] : mass) sum += w;
    return sum;
}

double IndexedDist::l2_norm_sq() const {
    double sum = 0.0;
    for (const auto& [k, w] : mass) sum += w * w;
    return sum;
}

double l1_distance(const IndexedDist& a, const IndexedDist& b) {
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.mass.size() && j < b.mass.size()) {
        if (a.mass[i].first < b.mass[j].first) {
            sum += a.mass[i++].second;
        } else if (b.mass[j].first < a.mass[i].first) {
            sum += b.mass[j++].second;
        } else {
            sum += std::abs(a.mass[i++].second - b.mass[j++].second);
        }
    }
    for (; i < a.mass.size(); ++i) sum += a.mass[i].second;
    for (; j < b.mass.size(); ++j) sum += b.mass[j].second;
    return sum;
}

SyntheticIndexSource::SyntheticIndexSource(IndexedDist dist, std::uint64_t seed)
    : dist_(std::move(dist)), rng_(seed) {
    if (dist_.mass.empty()) throw EmptyInput("indexed source needs support");
    cumulative_.resize(dist_.mass.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist_.mass.size(); ++i) {
        acc += dist_.mass[i].second;
        cumulative_[i] = acc;
    }
    cumulative_.back() = std::max(cumulative_.back(), 1.0);
}

std::int64_t SyntheticIndexSource::draw() {
    const double u = rng_.next_unit();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t idx = (it == cumulative_.end())
                          ? cumulative_.size() - 1
                          : static_cast<std::size_t>(it - cumulative_.begin());
    ++draws_;
    return dist_.mass[idx].first;
}

double log2_clamped(double x) { return std::max(std::log2(x), 1.0); }

namespace {

constexpr double kMaxDrawable = 1e15;

std::uint64_t to_budget(double value, const char* what) {
    if (!(value >= 0.0)) throw ConfigError("negative budget");
    if (value > kMaxDrawable) {
        throw ConfigError(std::string(what) + ": budget too large to draw");
    }
    return static_cast<std::uint64_t>(value);
}

void check_cfg(const L1TesterConfig& cfg) {
    if (!(cfg.n >= 1.0)) throw ConfigError("domain size must be >= 1");
    if (!(cfg.eps > 0.0) || !(cfg.eps <= 2.0)) throw ConfigError("eps must be in (0, 2]");
    if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0)) throw ConfigError("delta must be in (0, 1)");
    if (!(cfg.c > 0.0)) throw ConfigError("budget multiplier must be positive");
}

std::map<std::int64_t, std::uint64_t> draw_counts(IndexSource& src, std::uint64_t m) {
    std::map<std::int64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < m; ++s) ++counts[src.draw()];
    return counts;
}

IndexedDist counts_to_dist(const std::map<std::int64_t, std::uint64_t>& counts,
                           std::uint64_t m) {
    IndexedDist out;
    out.mass.reserve(counts.size());
    for (const auto& [k, c] : counts) {
        out.mass.emplace_back(k, static_cast<double>(c) / static_cast<double>(m));
    }
    return out;
}

}  // namespace

double budget_collision_real(double n, double eps, double delta, double c) {
    return std::ceil(c * std::pow(n, 2.0 / 3.0) / std::pow(eps, 4.0) * log2_clamped(n) *
                     log2_clamped(1.0 / delta));
}

double budget_estimate_real(double n, double eps, double delta, double t, double c) {
    return std::ceil(c / t / (eps * eps) * log2_clamped(n) * log2_clamped(1.0 / delta));
}

double budget_plugin_real(double n, double eps, double delta, double c) {
    return budget_estimate_real(n, eps / 8.0, delta / 2.0, eps / (4.0 * n), c);
}

double budget_known_real(double n, double eps, double delta, double c) {
    return std::ceil(c * std::sqrt(n) / (eps * eps) * log2_clamped(n) *
                     log2_clamped(1.0 / delta));
}

std::uint64_t budget_collision(double n, double eps, double delta, double c) {
    return to_budget(budget_collision_real(n, eps, delta, c), "collision tester");
}

std::uint64_t budget_estimate(double n, double eps, double delta, double t, double c) {
    if (!(t > 0.0)) throw ConfigError("estimate floor t must be positive");
    return to_budget(budget_estimate_real(n, eps, delta, t, c), "l1 estimate");
}

std::uint64_t budget_plugin(double n, double eps, double delta, double c) {
    return to_budget(budget_plugin_real(n, eps, delta, c), "plugin tester");
}

std::uint64_t budget_known(double n, double eps, double delta, double c) {
    return to_budget(budget_known_real(n, eps, delta, c), "known tester");
}

IndexedDist l1_estimate(IndexSource& src, double n, double eps, double delta, double t,
                        double c) {
    const std::uint64_t m = budget_estimate(n, eps, delta, t, c);
    return counts_to_dist(draw_counts(src, m), m);
}

Decision plugin_decision(double estimated_l1, double eps) {
    return estimated_l1 <= eps / 2.0 ? Decision::Accept : Decision::Reject;
}

TestVerdict l1_test_plugin(IndexSource& src_p, IndexSource& src_q,
                           const L1TesterConfig& cfg) {
    check_cfg(cfg);
    const IndexedDist p_est =
        l1_estimate(src_p, cfg.n, cfg.eps / 8.0, cfg.delta / 2.0, cfg.eps / (4.0 * cfg.n), cfg.c);
    const IndexedDist q_est =
        l1_estimate(src_q, cfg.n, cfg.eps / 8.0, cfg.delta / 2.0, cfg.eps / (4.0 * cfg.n), cfg.c);

    TestVerdict v;
    v.decision = plugin_decision(l1_distance(p_est, q_est), cfg.eps);
    v.eps = cfg.eps;
    v.delta = cfg.delta;
    v.samples_p = budget_plugin(cfg.n, cfg.eps, cfg.delta, cfg.c);
    v.samples_q = v.samples_p;
    return v;
}

TestVerdict l1_test_collision(IndexSource& src_p, IndexSource& src_q,
                              const L1TesterConfig& cfg) {
    check_cfg(cfg);
    const std::uint64_t budget = budget_collision(cfg.n, cfg.eps, cfg.delta, cfg.c);
    const std::uint64_t m_heavy = (budget + 1) / 2;
    const std::uint64_t m_light = budget - m_heavy;

    // Phase 1: empirical estimates pick out the heavy keys and compare
    // their masses directly.
    const auto p_counts = draw_counts(src_p, m_heavy);
    const auto q_counts = draw_counts(src_q, m_heavy);
    const IndexedDist p_est = counts_to_dist(p_counts, m_heavy);
    const IndexedDist q_est = counts_to_dist(q_counts, m_heavy);

    const double t_heavy = cfg.eps / (4.0 * std::pow(cfg.n, 2.0 / 3.0));
    std::vector<std::int64_t> heavy;
    double heavy_gap = 0.0;
    {
        std::size_t i = 0, j = 0;
        const auto& pm = p_est.mass;
        const auto& qm = q_est.mass;
        auto consider = [&](std::int64_t key, double pw, double qw) {
            if (std::max(pw, qw) >= t_heavy) {
                heavy.push_back(key);
                heavy_gap += std::abs(pw - qw);
            }
        };
        while (i < pm.size() && j < qm.size()) {
            if (pm[i].first < qm[j].first) {
                consider(pm[i].first, pm[i].second, 0.0);
                ++i;
            } else if (qm[j].first < pm[i].first) {
                consider(qm[j].first, 0.0, qm[j].second);
                ++j;
            } else {
                consider(pm[i].first, pm[i].second, qm[j].second);
                ++i;
                ++j;
            }
        }
        for (; i < pm.size(); ++i) consider(pm[i].first, pm[i].second, 0.0);
        for (; j < qm.size(); ++j) consider(qm[j].first, 0.0, qm[j].second);
    }

    bool reject = heavy_gap > cfg.eps / 4.0;

    // Phase 2: unbiased l2 statistic on the light remainder; fresh draws,
    // samples landing on heavy keys are ignored. The draws always happen
    // so the consumed budget stays a pure function of the config; the
    // statistic needs at least two draws to be defined.
    const auto x_counts = draw_counts(src_p, m_light);
    const auto y_counts = draw_counts(src_q, m_light);
    if (m_light >= 2) {
        const double m2 = static_cast<double>(m_light);
        double stat = 0.0;
        auto is_heavy = [&](std::int64_t key) {
            return std::binary_search(heavy.begin(), heavy.end(), key);
        };
        for (const auto& [k, x] : x_counts) {
            if (is_heavy(k)) continue;
            const double xd = static_cast<double>(x);
            stat += xd * (xd - 1.0) / (m2 * (m2 - 1.0));
            auto it = y_counts.find(k);
            if (it != y_counts.end()) {
                stat -= 2.0 * xd * static_cast<double>(it->second) / (m2 * m2);
            }
        }
        for (const auto& [k, y] : y_counts) {
            if (is_heavy(k)) continue;
            const double yd = static_cast<double>(y);
            stat += yd * (yd - 1.0) / (m2 * (m2 - 1.0));
        }
        reject = reject || stat > cfg.eps * cfg.eps / (8.0 * cfg.n);
    }

    TestVerdict v;
    v.decision = reject ? Decision::Reject : Decision::Accept;
    v.eps = cfg.eps;
    v.delta = cfg.delta;
    v.samples_p = budget;
    v.samples_q = budget;
    return v;
}

TestVerdict l1_test_known(const IndexedDist& q_known, IndexSource& src_p,
                          const L1TesterConfig& cfg) {
    check_cfg(cfg);
    const std::uint64_t m = budget_known(cfg.n, cfg.eps, cfg.delta, cfg.c);
    const auto counts = draw_counts(src_p, m);

    // Unbiased estimator of ||p - q||_2^2:
    //   sum_k X_k (X_k - 1) / (m (m-1))  - 2 sum_k X_k q(k) / m + ||q||_2^2.
    const double md = static_cast<double>(m);
    double stat = q_known.l2_norm_sq();
    for (const auto& [k, x] : counts) {
        const double xd = static_cast<double>(x);
        if (m >= 2) stat += xd * (xd - 1.0) / (md * (md - 1.0));
        stat -= 2.0 * xd * q_known.mass_of(k) / md;
    }

    // ||p-q||_1 > eps forces ||p-q||_2^2 > eps^2/n (Cauchy-Schwarz over
    // the n-element domain); threshold halfway.
    TestVerdict v;
    v.decision =
        stat <= cfg.eps * cfg.eps / (2.0 * cfg.n) ? Decision::Accept : Decision::Reject;
    v.eps = cfg.eps;
    v.delta = cfg.delta;
    v.samples_p = m;
    v.samples_q = 0;
    return v;
}

}  // namespace emdtest
