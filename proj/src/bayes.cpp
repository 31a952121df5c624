#include "catgen/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace catgen::bayes {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

bool covers(const Interval& h, std::span<const double> examples) {
    return std::all_of(examples.begin(), examples.end(), [&](double x) { return h.contains(x); });
}

}  // namespace

HypothesisSpace::HypothesisSpace(double grid_lo, double grid_hi, double step)
    : lo_(grid_lo), hi_(grid_hi), step_(step) {
    if (!std::isfinite(grid_lo) || !std::isfinite(grid_hi) || !(grid_lo < grid_hi))
        throw std::invalid_argument("HypothesisSpace: need finite grid_lo < grid_hi");
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("HypothesisSpace: step must be positive");
    const double cells = (grid_hi - grid_lo) / step;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded))
        throw std::invalid_argument("HypothesisSpace: (grid_hi - grid_lo) / step must be an integer");
    points_ = static_cast<std::size_t>(rounded) + 1;

    intervals_.reserve(size());
    lengths_.reserve(size());
    for (std::size_t a = 0; a < points_; ++a) {
        for (std::size_t b = a + 1; b < points_; ++b) {
            intervals_.push_back({grid_value(a), grid_value(b)});
            lengths_.push_back(static_cast<double>(b - a) * step_);
        }
    }
}

double likelihood(const Interval& h, std::span<const double> examples) {
    if (examples.empty()) throw std::invalid_argument("likelihood: no examples");
    if (!(h.size() > 0.0)) throw std::invalid_argument("likelihood: hypothesis must have positive size");
    if (!covers(h, examples)) return 0.0;
    return std::pow(h.size(), -static_cast<double>(examples.size()));
}

Posterior posterior(const HypothesisSpace& space, std::span<const double> examples, std::span<const double> prior) {
    if (examples.empty()) throw std::invalid_argument("posterior: no examples");
    for (double x : examples)
        if (!std::isfinite(x)) throw std::invalid_argument("posterior: non-finite example");
    if (!prior.empty() && prior.size() != space.size())
        throw std::invalid_argument("posterior: prior must have one weight per hypothesis");

    const std::size_t count = space.size();
    const auto n = static_cast<double>(examples.size());
    auto prior_at = [&](std::size_t k) { return prior.empty() ? 1.0 : prior[k]; };

    // Likelihoods relative to the shortest covering hypothesis, (len_min/len)^n,
    // so large n cannot underflow the whole posterior.
    double shortest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
        if (prior_at(k) < 0.0 || !std::isfinite(prior_at(k)))
            throw std::invalid_argument("posterior: prior weights must be finite and non-negative");
        if (prior_at(k) > 0.0 && covers(space.interval(k), examples)) shortest = std::min(shortest, space.length(k));
    }
    if (!std::isfinite(shortest))
        throw std::invalid_argument("posterior: no hypothesis with positive prior contains every example");

    const double log_shortest = std::log(shortest);
    Posterior post{space, std::vector<double>(examples.begin(), examples.end()), std::vector<double>(count, 0.0)};
    CompensatedSum evidence;
    for (std::size_t k = 0; k < count; ++k) {
        if (prior_at(k) == 0.0 || !covers(space.interval(k), examples)) continue;
        const double w = prior_at(k) * std::exp(n * (log_shortest - std::log(space.length(k))));
        post.masses[k] = w;
        evidence.add(w);
    }
    const double z = evidence.value();
    for (double& m : post.masses) m /= z;
    return post;
}

double generalization_probability(const Posterior& post, double y) {
    CompensatedSum total;
    for (std::size_t k = 0; k < post.masses.size(); ++k) {
        if (post.masses[k] != 0.0 && post.space.interval(k).contains(y)) total.add(post.masses[k]);
    }
    return std::clamp(total.value(), 0.0, 1.0);
}

BayesCurve bayes_curve(const HypothesisSpace& space, std::span<const double> examples, std::span<const double> probes) {
    const Posterior post = posterior(space, examples);
    BayesCurve curve;
    curve.probes.assign(probes.begin(), probes.end());
    curve.values.reserve(probes.size());
    for (double y : probes) curve.values.push_back(generalization_probability(post, y));
    return curve;
}

}  // namespace catgen::bayes
