/**
 * @file generalization.hpp
 * @brief Category representation on a trained map and the relative-distance measure.
 *
 * A category is represented by the set of best-matching units of its
 * examples. The tolerance of the representation is the largest quantization
 * error over the examples. A probe's relative distance is its distance to the
 * closest representation unit divided by that tolerance.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "catgen/som.hpp"

namespace catgen {

/// Below this, numerator or tolerance count as zero.
inline constexpr double kZeroDistance = 1e-12;

template <typename Scalar = double>
struct CategoryRepresentation {
    std::vector<std::size_t> unit_indices;  // sorted, unique
    typename SomMap<Scalar>::Matrix unit_weights;  // one row per entry of unit_indices
    Scalar tolerance = 0;
};

template <typename Scalar = double>
struct GeneralizationCurve {
    StimulusSet<Scalar> probes;
    std::vector<Scalar> values;
};

template <typename Scalar>
CategoryRepresentation<Scalar> category_representation(const SomMap<Scalar>& map,
                                                       std::span<const Stimulus<Scalar>> examples) {
    if (examples.empty()) throw std::invalid_argument("category_representation: no examples");
    std::set<std::size_t> units;
    Scalar tolerance = 0;
    for (const auto& x : examples) {
        const std::size_t bmu = best_matching_unit(map, x);
        units.insert(bmu);
        tolerance = std::max(tolerance, (x.transpose() - map.weights.row(static_cast<Eigen::Index>(bmu))).norm());
    }
    CategoryRepresentation<Scalar> rep;
    rep.unit_indices.assign(units.begin(), units.end());
    rep.unit_weights.resize(static_cast<Eigen::Index>(units.size()), map.dim());
    for (std::size_t i = 0; i < rep.unit_indices.size(); ++i)
        rep.unit_weights.row(static_cast<Eigen::Index>(i)) = map.weights.row(static_cast<Eigen::Index>(rep.unit_indices[i]));
    rep.tolerance = tolerance;
    return rep;
}

template <typename Scalar>
CategoryRepresentation<Scalar> category_representation(const SomMap<Scalar>& map, const StimulusSet<Scalar>& examples) {
    return category_representation<Scalar>(map, std::span<const Stimulus<Scalar>>(examples));
}

/// Distance from y to the closest representation unit (not normalized).
template <typename Scalar>
Scalar representation_distance(const CategoryRepresentation<Scalar>& rep, const Stimulus<Scalar>& y) {
    if (y.size() != rep.unit_weights.cols())
        throw std::invalid_argument("probe dimensionality does not match the category representation");
    return std::sqrt((rep.unit_weights.rowwise() - y.transpose()).rowwise().squaredNorm().minCoeff());
}

/**
 * Relative distance of y to the representation. Returns +infinity when the
 * tolerance is zero but y is not on a representation unit, and 0 when both
 * are zero.
 */
template <typename Scalar>
Scalar relative_distance(const CategoryRepresentation<Scalar>& rep, const Stimulus<Scalar>& y) {
    const Scalar numerator = representation_distance(rep, y);
    if (rep.tolerance < kZeroDistance) {
        return numerator < kZeroDistance ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
    }
    return numerator / rep.tolerance;
}

template <typename Scalar>
Scalar generalization_degree(const CategoryRepresentation<Scalar>& rep, const Stimulus<Scalar>& y) {
    const Scalar rd = relative_distance(rep, y);
    if (rd == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    if (std::isinf(rd)) return Scalar(0);
    return Scalar(1) / rd;
}

template <typename Scalar>
GeneralizationCurve<Scalar> generalization_curve(const CategoryRepresentation<Scalar>& rep,
                                                 std::span<const Stimulus<Scalar>> probes) {
    if (probes.empty()) throw std::invalid_argument("generalization_curve: no probes");
    GeneralizationCurve<Scalar> curve;
    curve.probes.assign(probes.begin(), probes.end());
    curve.values.reserve(probes.size());
    for (const auto& y : probes) curve.values.push_back(relative_distance(rep, y));
    return curve;
}

template <typename Scalar>
GeneralizationCurve<Scalar> generalization_curve(const CategoryRepresentation<Scalar>& rep,
                                                 const StimulusSet<Scalar>& probes) {
    return generalization_curve<Scalar>(rep, std::span<const Stimulus<Scalar>>(probes));
}

/**
 * Probes lo, lo+step, ..., hi along dimension 0, other coordinates zero.
 * The count is round((hi-lo)/step)+1 so that 0..100 step 1 gives 101 probes.
 */
template <typename Scalar = double>
StimulusSet<Scalar> probe_line(double lo, double hi, double step, Eigen::Index dim = 2) {
    if (!(step > 0.0) || !(hi >= lo) || dim < 1) throw std::invalid_argument("probe_line: invalid grid");
    const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    StimulusSet<Scalar> probes;
    probes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Stimulus<Scalar> y = Stimulus<Scalar>::Zero(dim);
        y(0) = static_cast<Scalar>(lo + static_cast<double>(i) * step);
        probes.push_back(std::move(y));
    }
    return probes;
}

}  // namespace catgen
