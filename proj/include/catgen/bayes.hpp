/**
 * @file bayes.hpp
 * @brief Exact Bayesian generalization over one-dimensional interval hypotheses.
 *
 * Hypotheses are the intervals [a, b], a < b, with both endpoints on an
 * evenly spaced grid. Observed examples are assumed strongly sampled from
 * the true interval, so the likelihood of n examples is 1/|h|^n for every
 * interval containing all of them and 0 otherwise. Everything is computed by
 * brute-force enumeration.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace catgen::bayes {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double size() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

class HypothesisSpace {
public:
    /// Throws std::invalid_argument unless lo < hi, step > 0 and (hi-lo)/step is integral.
    HypothesisSpace(double grid_lo = 0.0, double grid_hi = 100.0, double step = 1.0);

    double grid_lo() const { return lo_; }
    double grid_hi() const { return hi_; }
    double step() const { return step_; }

    std::size_t grid_points() const { return points_; }
    std::size_t size() const { return points_ * (points_ - 1) / 2; }
    double grid_value(std::size_t i) const { return lo_ + static_cast<double>(i) * step_; }

    /// Hypothesis k in enumeration order (a ascending, then b ascending).
    Interval interval(std::size_t k) const { return intervals_[k]; }
    /// Length of hypothesis k, computed from grid indices.
    double length(std::size_t k) const { return lengths_[k]; }

private:
    double lo_;
    double hi_;
    double step_;
    std::size_t points_;
    std::vector<Interval> intervals_;
    std::vector<double> lengths_;
};

/// 1/|h|^n if every example lies in h (inclusive), else 0.
double likelihood(const Interval& h, std::span<const double> examples);

struct Posterior {
    HypothesisSpace space;
    std::vector<double> examples;
    std::vector<double> masses;  // one per hypothesis, enumeration order
};

/**
 * Posterior over the space given the examples. `prior` holds one
 * non-negative weight per hypothesis; empty means uniform. Throws if no
 * hypothesis covers every example.
 */
Posterior posterior(const HypothesisSpace& space, std::span<const double> examples,
                    std::span<const double> prior = {});

/// Total posterior mass of the hypotheses containing y.
double generalization_probability(const Posterior& post, double y);

struct BayesCurve {
    std::vector<double> probes;
    std::vector<double> values;
};

BayesCurve bayes_curve(const HypothesisSpace& space, std::span<const double> examples,
                       std::span<const double> probes);

}  // namespace catgen::bayes
