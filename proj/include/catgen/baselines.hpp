// Minimal prototype and exemplar similarity models, used as comparison
// points for the map's generalization behaviour.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include <Eigen/Core>

#include "catgen/som.hpp"

namespace catgen {

template <typename Scalar = double>
struct PrototypeModel {
    Stimulus<Scalar> prototype;

    /// Component-wise mean of the examples.
    static PrototypeModel fit(std::span<const Stimulus<Scalar>> examples) {
        const Eigen::Index d = detail::check_training_set(examples);
        Stimulus<Scalar> sum = Stimulus<Scalar>::Zero(d);
        for (const auto& x : examples) sum += x;
        return {sum / static_cast<Scalar>(examples.size())};
    }
    static PrototypeModel fit(const StimulusSet<Scalar>& examples) {
        return fit(std::span<const Stimulus<Scalar>>(examples));
    }
};

template <typename Scalar = double>
struct ExemplarModel {
    StimulusSet<Scalar> exemplars;
    Scalar specificity = Scalar(0.1);

    ExemplarModel(StimulusSet<Scalar> xs, Scalar c = Scalar(0.1)) : exemplars(std::move(xs)), specificity(c) {
        detail::check_training_set(std::span<const Stimulus<Scalar>>(exemplars));
        if (!(specificity > 0)) throw std::invalid_argument("ExemplarModel: specificity must be positive");
    }
};

namespace detail {
template <typename Scalar>
void check_same_dim(const Stimulus<Scalar>& a, const Stimulus<Scalar>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimensionality mismatch");
}
}  // namespace detail

template <typename Scalar>
Scalar prototype_distance(const PrototypeModel<Scalar>& model, const Stimulus<Scalar>& y) {
    detail::check_same_dim(model.prototype, y);
    return (y - model.prototype).norm();
}

template <typename Scalar>
Scalar exemplar_min_distance(const ExemplarModel<Scalar>& model, const Stimulus<Scalar>& y) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const auto& x : model.exemplars) {
        detail::check_same_dim(x, y);
        best = std::min(best, (y - x).norm());
    }
    return best;
}

/// Sum over exemplars of exp(-c * |y - x|).
template <typename Scalar>
Scalar exemplar_summed_similarity(const ExemplarModel<Scalar>& model, const Stimulus<Scalar>& y) {
    Scalar sum = 0;
    for (const auto& x : model.exemplars) {
        detail::check_same_dim(x, y);
        sum += std::exp(-model.specificity * (y - x).norm());
    }
    return sum;
}

}  // namespace catgen
