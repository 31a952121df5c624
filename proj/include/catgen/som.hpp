/**
 * @file som.hpp
 * @brief Small self-organizing map on a hexagonal grid.
 *
 * Units live on a rows x cols grid with odd rows shifted right by half a
 * cell. Each unit owns one weight vector with the dimensionality of the
 * stimuli. Training is online: for every stimulus the best-matching unit is
 * found and every unit moves toward the stimulus by eta * h(d) where h is a
 * Gaussian of the grid distance d to the best-matching unit.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace catgen {

template <typename Scalar = double>
using Stimulus = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using StimulusSet = std::vector<Stimulus<Scalar>>;

struct GridCoord {
    std::size_t row = 0;
    std::size_t col = 0;

    friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

struct SomConfig {
    std::size_t rows = 3;
    std::size_t cols = 3;
    double eta = 0.5;          // learning rate
    double sigma = 0.5;        // Gaussian neighborhood width, in grid units
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    double init_margin = 1.0;  // width of the initialization band above the data
    bool shuffle = false;      // seeded reshuffle of the presentation order per epoch
    double eta_decay = 1.0;    // per-epoch multiplicative factors
    double sigma_decay = 1.0;

    std::size_t units() const { return rows * cols; }

    void validate() const {
        if (rows == 0 || cols == 0) throw std::invalid_argument("SomConfig: grid must be non-empty");
        if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("SomConfig: eta must be in (0,1]");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("SomConfig: sigma must be positive");
        if (epochs == 0) throw std::invalid_argument("SomConfig: epochs must be positive");
        if (!(init_margin > 0.0) || !std::isfinite(init_margin))
            throw std::invalid_argument("SomConfig: init_margin must be positive");
        if (!(eta_decay > 0.0) || !(sigma_decay > 0.0))
            throw std::invalid_argument("SomConfig: decay factors must be positive");
    }
};

/// SOM state. Row u of `weights` is the weight vector of unit u (row-major grid order).
template <typename Scalar = double>
struct SomMap {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    SomConfig config;
    Matrix weights;

    std::size_t units() const { return static_cast<std::size_t>(weights.rows()); }
    Eigen::Index dim() const { return weights.cols(); }

    GridCoord coord(std::size_t unit) const { return {unit / config.cols, unit % config.cols}; }
    std::size_t index(GridCoord c) const { return c.row * config.cols + c.col; }

    friend bool operator==(const SomMap& a, const SomMap& b) {
        return a.weights.rows() == b.weights.rows() && a.weights.cols() == b.weights.cols() &&
               (a.weights.array() == b.weights.array()).all();
    }
};

namespace detail {

// Odd-r offset to axial coordinates.
inline std::pair<long long, long long> to_axial(GridCoord c) {
    const auto row = static_cast<long long>(c.row);
    const auto col = static_cast<long long>(c.col);
    return {col - (row - (row & 1)) / 2, row};
}

// 53-bit uniform in [0, 1); the standard distributions are not portable bit-for-bit.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename Scalar>
void check_dim(const SomMap<Scalar>& map, const Stimulus<Scalar>& x) {
    if (x.size() != map.dim())
        throw std::invalid_argument("stimulus dimensionality " + std::to_string(x.size()) +
                                    " does not match map dimensionality " + std::to_string(map.dim()));
}

template <typename Scalar>
Eigen::Index check_training_set(std::span<const Stimulus<Scalar>> set) {
    if (set.empty()) throw std::invalid_argument("training set is empty");
    const Eigen::Index d = set.front().size();
    if (d < 1) throw std::invalid_argument("stimuli must have at least one dimension");
    for (const auto& x : set) {
        if (x.size() != d) throw std::invalid_argument("inconsistent stimulus dimensionality in training set");
        if (!x.allFinite()) throw std::invalid_argument("stimulus contains non-finite values");
    }
    return d;
}

}  // namespace detail

/// Hex distance between two cells of an odd-row-shifted grid.
inline double grid_distance(GridCoord a, GridCoord b) {
    const auto [qa, ra] = detail::to_axial(a);
    const auto [qb, rb] = detail::to_axial(b);
    const long long dq = qa - qb;
    const long long dr = ra - rb;
    return static_cast<double>(std::max({std::llabs(dq), std::llabs(dr), std::llabs(dq + dr)}));
}

inline double neighborhood(double grid_dist, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("neighborhood: sigma must be positive");
    if (grid_dist < 0.0) throw std::invalid_argument("neighborhood: negative grid distance");
    return std::exp(-(grid_dist * grid_dist) / (2.0 * sigma * sigma));
}

/**
 * Fresh map with every weight component k drawn uniformly from
 * (hi_k, hi_k + init_margin], hi_k being the largest value of dimension k in
 * the training set. Deterministic in config.seed.
 */
template <typename Scalar>
SomMap<Scalar> init_map(const SomConfig& config, std::span<const Stimulus<Scalar>> training_set) {
    config.validate();
    const Eigen::Index d = detail::check_training_set(training_set);

    Stimulus<Scalar> hi = training_set.front();
    for (const auto& x : training_set) hi = hi.cwiseMax(x);

    SomMap<Scalar> map{config, typename SomMap<Scalar>::Matrix(config.units(), d)};
    std::mt19937_64 rng(config.seed);
    for (Eigen::Index u = 0; u < map.weights.rows(); ++u) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double offset = (1.0 - detail::unit_uniform(rng)) * config.init_margin;
            auto w = static_cast<Scalar>(static_cast<double>(hi(k)) + offset);
            if (!(w > hi(k))) w = std::nextafter(hi(k), std::numeric_limits<Scalar>::infinity());
            map.weights(u, k) = w;
        }
    }
    return map;
}

template <typename Scalar>
SomMap<Scalar> init_map(const SomConfig& config, const StimulusSet<Scalar>& training_set) {
    return init_map<Scalar>(config, std::span<const Stimulus<Scalar>>(training_set));
}

/// Index of the unit closest to x; ties go to the lowest row-major index.
template <typename Scalar>
std::size_t best_matching_unit(const SomMap<Scalar>& map, const Stimulus<Scalar>& x) {
    detail::check_dim(map, x);
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dist2 =
        (map.weights.rowwise() - x.transpose()).rowwise().squaredNorm();
    std::size_t best = 0;
    for (Eigen::Index u = 1; u < dist2.size(); ++u) {
        if (dist2(u) < dist2(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(u);
    }
    return best;
}

/// One online update. The best-matching unit is taken from the weights before the update.
template <typename Scalar>
SomMap<Scalar> train_step(SomMap<Scalar> map, const Stimulus<Scalar>& x, double eta, double sigma) {
    if (!x.allFinite()) throw std::invalid_argument("train_step: stimulus contains non-finite values");
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("train_step: eta must be in [0,1]");
    const std::size_t bmu = best_matching_unit(map, x);
    const GridCoord centre = map.coord(bmu);
    for (std::size_t u = 0; u < map.units(); ++u) {
        const auto rate = static_cast<Scalar>(eta * neighborhood(grid_distance(centre, map.coord(u)), sigma));
        auto w = map.weights.row(static_cast<Eigen::Index>(u));
        w += rate * (x.transpose() - w);
    }
    return map;
}

using StepObserver = std::function<void(std::size_t step, std::size_t epoch, std::size_t stimulus_index)>;

/**
 * Presents the training set config.epochs times, in the given order unless
 * config.shuffle is set. eta and sigma are multiplied by their decay factors
 * after every epoch (both 1.0 by default, i.e. constant).
 */
template <typename Scalar>
SomMap<Scalar> train(SomMap<Scalar> map, std::span<const Stimulus<Scalar>> training_set,
                     const StepObserver& observer = nullptr) {
    map.config.validate();
    detail::check_training_set(training_set);
    for (const auto& x : training_set) detail::check_dim(map, x);

    std::vector<std::size_t> order(training_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(map.config.seed ^ 0x9e3779b97f4a7c15ULL);

    double eta = map.config.eta;
    double sigma = map.config.sigma;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < map.config.epochs; ++epoch) {
        if (map.config.shuffle) {
            // Fisher-Yates with the portable uniform draw.
            for (std::size_t i = order.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(detail::unit_uniform(shuffle_rng) * static_cast<double>(i));
                std::swap(order[i - 1], order[j]);
            }
        }
        for (const std::size_t i : order) {
            map = train_step(std::move(map), training_set[i], eta, sigma);
            if (observer) observer(step, epoch, i);
            ++step;
        }
        eta = std::min(1.0, eta * map.config.eta_decay);
        sigma *= map.config.sigma_decay;
    }
    return map;
}

template <typename Scalar>
SomMap<Scalar> train(SomMap<Scalar> map, const StimulusSet<Scalar>& training_set,
                     const StepObserver& observer = nullptr) {
    return train<Scalar>(std::move(map), std::span<const Stimulus<Scalar>>(training_set), observer);
}

template <typename Scalar>
Scalar quantization_error(const SomMap<Scalar>& map, const Stimulus<Scalar>& x) {
    const std::size_t bmu = best_matching_unit(map, x);
    return (x.transpose() - map.weights.row(static_cast<Eigen::Index>(bmu))).norm();
}

}  // namespace catgen
