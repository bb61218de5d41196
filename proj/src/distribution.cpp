#include "emdtest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace emdtest {

double l1_norm_distance(const Point& a, const Point& b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.coords.size(); ++j) {
        sum += std::abs(a.coords[j] - b.coords[j]);
    }
    return sum;
}

DiscreteDistribution::DiscreteDistribution(
    std::vector<std::pair<Point, double>> points_with_weights, Domain domain)
    : domain_(domain) {
    if (domain_.dim < 1) throw DomainError("dimension must be >= 1");
    if (!(domain_.span > 0.0)) throw DomainError("span must be positive");
    if (points_with_weights.empty()) throw EmptyInput("distribution needs at least one point");

    for (const auto& [pt, w] : points_with_weights) {
        if (static_cast<int>(pt.dim()) != domain_.dim) {
            throw DomainError("point dimension does not match domain");
        }
        for (double c : pt.coords) {
            if (!(c >= 0.0) || !(c <= domain_.span) || !std::isfinite(c)) {
                std::ostringstream msg;
                msg << "coordinate " << c << " outside [0, " << domain_.span << "]";
                throw DomainError(msg.str());
            }
        }
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw NormalizationError("weights must be positive and finite");
        }
    }

    std::sort(points_with_weights.begin(), points_with_weights.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (auto& [pt, w] : points_with_weights) {
        if (!points_.empty() && points_.back() == pt) {
            weights_.back() += w;  // merge duplicates
        } else {
            points_.push_back(std::move(pt));
            weights_.push_back(w);
        }
    }

    double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(total - 1.0) > kMassTolerance) {
        std::ostringstream msg;
        msg << "weights sum to " << total << ", not 1 within " << kMassTolerance;
        throw NormalizationError(msg.str());
    }
}

double DiscreteDistribution::mass_at(const Point& p) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it != points_.end() && *it == p) {
        return weights_[static_cast<std::size_t>(it - points_.begin())];
    }
    return 0.0;
}

DiscreteDistribution new_distribution(
    std::vector<std::pair<Point, double>> points_with_weights, int dim, double span) {
    return DiscreteDistribution(std::move(points_with_weights), Domain{dim, span});
}

DiscreteDistribution empirical(const std::vector<Point>& samples, int dim, double span) {
    if (samples.empty()) throw EmptyInput("empirical() needs at least one sample");
    const double w = 1.0 / static_cast<double>(samples.size());
    std::vector<std::pair<Point, double>> pw;
    pw.reserve(samples.size());
    for (const auto& s : samples) pw.emplace_back(s, w);
    return DiscreteDistribution(std::move(pw), Domain{dim, span});
}

double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.domain() != q.domain()) throw DomainMismatch("l1_distance: domains differ");
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < p.support_size() && j < q.support_size()) {
        if (p.point(i) < q.point(j)) {
            sum += p.weight(i);
            ++i;
        } else if (q.point(j) < p.point(i)) {
            sum += q.weight(j);
            ++j;
        } else {
            sum += std::abs(p.weight(i) - q.weight(j));
            ++i;
            ++j;
        }
    }
    for (; i < p.support_size(); ++i) sum += p.weight(i);
    for (; j < q.support_size(); ++j) sum += q.weight(j);
    return sum;
}

SampleSource::SampleSource(DiscreteDistribution dist, std::uint64_t seed)
    : domain_(dist.domain()), dist_(std::move(dist)), rng_(seed), seed_(seed) {
    cumulative_.resize(dist_->support_size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist_->support_size(); ++i) {
        acc += dist_->weight(i);
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;  // guard against accumulated rounding
}

SampleSource::SampleSource(std::vector<Point> stream, Domain domain)
    : domain_(domain), stream_(std::move(stream)), rng_(0) {}

SampleSource SampleSource::from_points(std::vector<Point> stream, Domain domain) {
    return SampleSource(std::move(stream), domain);
}

Point SampleSource::draw() {
    if (budget_ && draws_taken_ >= *budget_) {
        throw BudgetExceeded("sample budget exhausted");
    }
    if (dist_) {
        const double u = rng_.next_unit();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        std::size_t idx = (it == cumulative_.end())
                              ? cumulative_.size() - 1
                              : static_cast<std::size_t>(it - cumulative_.begin());
        ++draws_taken_;
        return dist_->point(idx);
    }
    if (draws_taken_ >= stream_.size()) {
        throw BudgetExceeded("external sample stream exhausted");
    }
    return stream_[draws_taken_++];
}

}  // namespace emdtest
