#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numeric>
#include <vector>

#include "catgen/bayes.hpp"

using namespace catgen::bayes;

namespace {

const std::vector<double> kBase = {50, 60};
const std::vector<double> kNumerosity = {50, 53, 55, 57, 59, 60};
const std::vector<double> kVariability = {30, 60};
const std::vector<double> kSet1 = {30, 40, 60};
const std::vector<double> kSet2 = {30, 50, 60};

double total(const Posterior& p) { return std::accumulate(p.masses.begin(), p.masses.end(), 0.0); }

std::vector<double> grid_probes(const HypothesisSpace& s) {
    std::vector<double> out;
    for (std::size_t i = 0; i < s.grid_points(); ++i) out.push_back(s.grid_value(i));
    return out;
}

}  // namespace

TEST_CASE("HypothesisSpace enumeration") {
    const HypothesisSpace space;
    CHECK(space.grid_points() == 101);
    CHECK(space.size() == 5050);
    CHECK(space.interval(0).lo == 0.0);
    CHECK(space.interval(0).hi == 1.0);
    CHECK(space.interval(space.size() - 1).lo == 99.0);
    CHECK(space.interval(space.size() - 1).hi == 100.0);
    for (std::size_t k = 0; k < space.size(); ++k) REQUIRE(space.length(k) == space.interval(k).size());

    const HypothesisSpace coarse(0.0, 1.0, 0.25);
    CHECK(coarse.grid_points() == 5);
    CHECK(coarse.size() == 10);

    CHECK_THROWS_AS(HypothesisSpace(1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(HypothesisSpace(0.0, 10.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(HypothesisSpace(0.0, 10.0, 0.0), std::invalid_argument);
}

TEST_CASE("likelihood follows the size principle") {
    CHECK(likelihood({50, 60}, kBase) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(likelihood({50, 59}, kBase) == 0.0);

    const double ratio_num = likelihood({40, 60}, kNumerosity) / likelihood({50, 60}, kNumerosity);
    const double ratio_base = likelihood({40, 60}, kBase) / likelihood({50, 60}, kBase);
    CHECK(ratio_num == doctest::Approx(1.0 / 64.0).epsilon(1e-14));
    CHECK(ratio_base == doctest::Approx(1.0 / 4.0).epsilon(1e-14));

    CHECK_THROWS_AS(likelihood({50, 60}, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(likelihood({50, 50}, kBase), std::invalid_argument);
}

TEST_CASE("posterior") {
    const HypothesisSpace space;

    SUBCASE("single example") {
        const std::vector<double> one = {50};
        const auto p = posterior(space, one);
        CHECK(std::abs(total(p) - 1.0) <= 1e-9);
        // Masses proportional to 1/|h| on covering hypotheses.
        std::size_t ref = space.size();
        for (std::size_t k = 0; k < space.size(); ++k) {
            if (!space.interval(k).contains(50.0)) {
                CHECK(p.masses[k] == 0.0);
                continue;
            }
            if (ref == space.size()) ref = k;
            CHECK(p.masses[k] * space.length(k) ==
                  doctest::Approx(p.masses[ref] * space.length(ref)).epsilon(1e-12));
        }
    }
    SUBCASE("smallest covering interval has the largest mass") {
        const auto p = posterior(space, kBase);
        const auto best = static_cast<std::size_t>(std::max_element(p.masses.begin(), p.masses.end()) - p.masses.begin());
        CHECK(space.interval(best).lo == 50.0);
        CHECK(space.interval(best).hi == 60.0);
        CHECK(std::abs(total(p) - 1.0) <= 1e-9);
    }
    SUBCASE("prior scaling leaves the posterior unchanged") {
        const std::vector<double> twos(space.size(), 2.0);
        const auto a = posterior(space, kBase);
        const auto b = posterior(space, kBase, twos);
        CHECK(a.masses == b.masses);
    }
    SUBCASE("errors") {
        const std::vector<double> outside = {50, 120};
        CHECK_THROWS_AS(posterior(space, outside), std::invalid_argument);
        CHECK_THROWS_AS(posterior(space, std::vector<double>{}), std::invalid_argument);
        const std::vector<double> short_prior(3, 1.0);
        CHECK_THROWS_AS(posterior(space, kBase, short_prior), std::invalid_argument);
    }
    SUBCASE("off-grid examples are allowed") {
        const std::vector<double> off = {50.5, 59.25};
        const auto p = posterior(space, off);
        CHECK(std::abs(total(p) - 1.0) <= 1e-9);
    }
}

TEST_CASE("generalization_probability against exact rational enumeration") {
    // Frozen from an independent exact (rational arithmetic) enumeration over grid 0..100 step 1.
    const HypothesisSpace space;
    struct Case {
        const std::vector<double>* xs;
        double y;
        double expected;
    };
    const std::vector<double> one = {50};
    const Case cases[] = {
        {&kBase, 70, 0.5035601276848231},        {&kBase, 80, 0.26115714471006296},
        {&kBase, 45, 0.7100464536494502},        {&kNumerosity, 70, 0.049930779515286294},
        {&kNumerosity, 80, 0.008290555446725346}, {&kNumerosity, 45, 0.17189652060969093},
        {&kVariability, 70, 0.6057319743431826}, {&kVariability, 80, 0.3429055783049114},
        {&kSet1, 70, 0.5190509647004713},        {&kSet2, 80, 0.26238405096026896},
        {&one, 70, 0.392858614251395},           {&one, 45, 0.7519738970958348},
    };
    for (const auto& c : cases) {
        const auto p = posterior(space, *c.xs);
        CHECK(generalization_probability(p, c.y) == doctest::Approx(c.expected).epsilon(1e-12));
    }
}

TEST_CASE("generalization_probability: numerosity and variability orderings") {
    const HypothesisSpace space;
    const auto base = posterior(space, kBase);
    const auto num = posterior(space, kNumerosity);
    const auto var = posterior(space, kVariability);
    CHECK(generalization_probability(base, 70) > generalization_probability(num, 70));
    CHECK(generalization_probability(var, 70) > generalization_probability(base, 70));
    CHECK(std::abs(generalization_probability(base, 50) - 1.0) <= 1e-12);
}

TEST_CASE("generalization_probability shape (property)") {
    const HypothesisSpace space;
    for (const auto* xs : {&kBase, &kNumerosity, &kVariability, &kSet1}) {
        const auto p = posterior(space, *xs);
        const double lo = *std::min_element(xs->begin(), xs->end());
        const double hi = *std::max_element(xs->begin(), xs->end());
        double prev_up = 1.0, prev_down = 1.0;
        for (double y = 0; y <= 100; y += 0.5) {
            const double g = generalization_probability(p, y);
            CHECK(g >= 0.0);
            CHECK(g <= 1.0);
            if (y >= lo && y <= hi) CHECK(std::abs(g - 1.0) <= 1e-12);
        }
        for (double y = hi; y <= 100; y += 1) {
            const double g = generalization_probability(p, y);
            CHECK(g <= prev_up + 1e-15);
            prev_up = g;
        }
        for (double y = lo; y >= 0; y -= 1) {
            const double g = generalization_probability(p, y);
            CHECK(g <= prev_down + 1e-15);
            prev_down = g;
        }
    }
}

TEST_CASE("bayes_curve") {
    const HypothesisSpace space;
    const auto probes = grid_probes(space);

    SUBCASE("set 1 and set 2 give identical curves") {
        const auto a = bayes_curve(space, kSet1, probes);
        const auto b = bayes_curve(space, kSet2, probes);
        CHECK(a.values == b.values);
    }
    SUBCASE("translation covariance") {
        const HypothesisSpace shifted(10.0, 110.0, 1.0);
        std::vector<double> xs = kSet1, shifted_probes = probes;
        for (double& x : xs) x += 10.0;
        for (double& y : shifted_probes) y += 10.0;
        const auto a = bayes_curve(space, kSet1, probes);
        const auto b = bayes_curve(shifted, xs, shifted_probes);
        for (std::size_t i = 0; i < probes.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-12);
    }
    SUBCASE("probes inside the example range are 1") {
        const std::vector<double> inside = {50, 52.5, 55, 60};
        for (double v : bayes_curve(space, kBase, inside).values) CHECK(std::abs(v - 1.0) <= 1e-12);
    }
}
