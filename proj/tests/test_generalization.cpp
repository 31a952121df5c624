#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "catgen/generalization.hpp"

using namespace catgen;

namespace {

using Vec = Stimulus<double>;

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

double dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += (a(k) - b(k)) * (a(k) - b(k));
    return std::sqrt(s);
}

// Brute-force relative distance straight from the definitions.
double oracle_rd(const SomMap<double>& m, const StimulusSet<double>& examples, const Vec& y) {
    std::vector<std::size_t> bmus;
    double tolerance = 0.0;
    for (const auto& x : examples) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < m.units(); ++u) {
            const double d = dist(x, m.weights.row(static_cast<Eigen::Index>(u)).transpose());
            if (d < best_d) {
                best_d = d;
                best = u;
            }
        }
        bmus.push_back(best);
        tolerance = std::max(tolerance, best_d);
    }
    double numerator = std::numeric_limits<double>::infinity();
    for (std::size_t u : bmus) numerator = std::min(numerator, dist(y, m.weights.row(static_cast<Eigen::Index>(u)).transpose()));
    return numerator / tolerance;
}

const StimulusSet<double> kBase = {vec({50, 0}), vec({60, 0})};
const StimulusSet<double> kNumerosity = {vec({50, 0}), vec({53, 0}), vec({55, 0}),
                                         vec({57, 0}), vec({59, 0}), vec({60, 0})};

}  // namespace

TEST_CASE("category_representation") {
    SomConfig cfg;
    auto m = train(init_map(cfg, kBase), kBase);

    SUBCASE("examples on distinct units give zero tolerance") {
        const StimulusSet<double> on_units = {m.weights.row(1).transpose(), m.weights.row(5).transpose()};
        const auto rep = category_representation(m, on_units);
        CHECK(rep.unit_indices == std::vector<std::size_t>{1, 5});
        CHECK(rep.tolerance == 0.0);
    }
    SUBCASE("examples sharing one unit collapse to a singleton") {
        m.weights.setConstant(1000.0);
        m.weights.row(4) << 55.0, 0.0;
        const auto rep = category_representation(m, kNumerosity);
        CHECK(rep.unit_indices == std::vector<std::size_t>{4});
        CHECK(rep.tolerance == doctest::Approx(5.0));
    }
    SUBCASE("empty example set") { CHECK_THROWS_AS(category_representation(m, StimulusSet<double>{}), std::invalid_argument); }
}

TEST_CASE("relative_distance agrees with the brute-force oracle (property)") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> probe(0.0, 100.0);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        SomConfig cfg;
        cfg.seed = seed;
        const auto& set = (seed % 2) ? kBase : kNumerosity;
        const auto m = train(init_map(cfg, set), set);
        const auto rep = category_representation(m, set);

        // tolerance = max over examples of min over units
        double tol = 0.0;
        for (const auto& x : set) {
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index u = 0; u < 9; ++u) best = std::min(best, dist(x, m.weights.row(u).transpose()));
            tol = std::max(tol, best);
        }
        CHECK(std::abs(rep.tolerance - tol) <= 1e-9);

        for (int i = 0; i < 20; ++i) {
            const Vec y = vec({probe(rng), probe(rng) * 0.1});
            CHECK(std::abs(relative_distance(rep, y) - oracle_rd(m, set, y)) <= 1e-9);
        }
        for (const auto& x : set) CHECK(relative_distance(rep, x) <= 1.0 + 1e-12);
    }
}

TEST_CASE("relative_distance edge cases") {
    SomConfig cfg;
    auto m = train(init_map(cfg, kBase), kBase);
    const auto rep = category_representation(m, kBase);
    const Vec on_unit = rep.unit_weights.row(0).transpose();
    CHECK(relative_distance(rep, on_unit) == 0.0);
    CHECK_THROWS_AS(relative_distance(rep, vec({1, 2, 3})), std::invalid_argument);

    SUBCASE("zero tolerance") {
        const StimulusSet<double> exact = {m.weights.row(2).transpose()};
        const auto zero = category_representation(m, exact);
        CHECK(relative_distance(zero, exact[0]) == 0.0);
        CHECK(std::isinf(relative_distance(zero, vec({0, 0}))));
        CHECK(std::isinf(generalization_degree(zero, exact[0])));
        CHECK(generalization_degree(zero, vec({0, 0})) == 0.0);
    }
}

TEST_CASE("generalization_degree is the reciprocal") {
    CategoryRepresentation<double> rep;
    rep.unit_indices = {0};
    rep.unit_weights.resize(1, 2);
    rep.unit_weights << 0.0, 0.0;
    rep.tolerance = 2.0;
    CHECK(generalization_degree(rep, vec({2, 0})) == 1.0);
    CHECK(generalization_degree(rep, vec({4, 0})) == 0.5);
    double prev = std::numeric_limits<double>::infinity();
    for (double y = 0.5; y < 20.0; y += 0.5) {
        const double g = generalization_degree(rep, vec({y, 0}));
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("generalization_curve") {
    SomConfig cfg;
    const auto m = train(init_map(cfg, kBase), kBase);
    const auto rep = category_representation(m, kBase);

    const auto grid = probe_line<double>(0.0, 100.0, 1.0);
    const auto curve = generalization_curve(rep, grid);
    REQUIRE(curve.values.size() == 101);
    CHECK(curve.probes.front()(0) == 0.0);
    CHECK(curve.probes.back()(0) == 100.0);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(curve.values[i] == relative_distance(rep, grid[i]));

    const auto own = generalization_curve(rep, kBase);
    for (double v : own.values) CHECK(v <= 1.0);

    const StimulusSet<double> single = {vec({70, 0})};
    const auto one = generalization_curve(rep, single);
    REQUIRE(one.values.size() == 1);
    CHECK(one.values[0] == relative_distance(rep, single[0]));

    CHECK_THROWS_AS(generalization_curve(rep, StimulusSet<double>{}), std::invalid_argument);
}
