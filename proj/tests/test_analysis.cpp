#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tubeflow/analysis.hpp"
#include "tubeflow/errors.hpp"

using namespace tubeflow;

TEST_CASE("stability bound examples")
{
    CHECK(stability_bound(0.5, 10.0) == doctest::Approx(18.5).epsilon(1e-15));
    CHECK(stability_bound(0.5, 0.0) == doctest::Approx(3.5).epsilon(1e-15));
    const double k = 0.999;
    CHECK(stability_bound(k, 1.0) == doctest::Approx((1 + k) / (2 * k) * (1 + (3 + k) / (1 + k))).epsilon(1e-15));
    CHECK(stability_bound(k, 1.0) == doctest::Approx(3.0020).epsilon(1e-4));
    CHECK_THROWS_AS(stability_bound(0.5, -1.0), ArgumentError);
}

TEST_CASE("stability bound grows with alpha_max and shrinks with kappa")
{
    for (double kappa = 0.1; kappa < 0.95; kappa += 0.1) {
        for (double alpha_max = 0.0; alpha_max < 20.0; alpha_max += 1.0) {
            CHECK(stability_bound(kappa, alpha_max + 1.0) > stability_bound(kappa, alpha_max));
            CHECK(stability_bound(kappa + 0.05, alpha_max) < stability_bound(kappa, alpha_max));
        }
    }
}

TEST_CASE("curve distance")
{
    const DisplacementCurve a({0.0, 1.0, 2.0}, {0.0, 0.0, 1.0}, 1.0, 0.5);
    const DisplacementCurve b({0.0, 0.5, 3.0}, {0.0, 0.5, 2.0}, 1.0, 0.5);
    // Largest gap on [0, 2] sits at a node of either curve: x = 1 gives 0 vs 0.8.
    CHECK(curve_distance(a, b) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(curve_distance(a, a) == 0.0);
}

TEST_CASE("identical curves give identical solutions")
{
    const auto curve = build_curve(random_atoms(3, 10), 0.5, 10.0, 2001);
    const auto report = stability_experiment(curve, curve);
    CHECK(report.delta == 0.0);
    CHECK(report.v_diff <= 2e-10 * curve.v_max());
    CHECK(report.within_bound);
}

TEST_CASE("perturbed curve stays valid and inside the bound")
{
    const auto curve = build_curve(Measure::uniform(3.0, 9.0, 1.0), 0.5, 10.0, 2001);
    const double delta0 = 1e-3 * curve.v_max();
    const auto other = perturb_curve(curve, delta0);
    CHECK(other.water().back() == curve.water().back());
    CHECK(curve_distance(curve, other) <= delta0 * (1.0 + 1e-12));
    CHECK(curve_distance(curve, other) > 0.0);
    RecoveryConfig config;
    config.n_grid = 1001;
    const auto report = stability_experiment(curve, other, config);
    CHECK(report.bound_constant == doctest::Approx(18.5));
    CHECK(report.within_bound);
    CHECK(report.v_diff > 0.0);
    CHECK(report.ratio == doctest::Approx(report.v_diff / report.delta));
}

TEST_CASE("perturbation respects the slope headroom")
{
    // Water curve with slope exactly 1 on a stretch leaves no upward headroom there.
    const DisplacementCurve curve({0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 1.0, 1.5}, 2.0, 0.5);
    const auto other = perturb_curve(curve, 0.5);
    for (std::size_t i = 1; i < other.size(); ++i) {
        const double slope = (other.water()[i] - other.water()[i - 1]) / (other.total()[i] - other.total()[i - 1]);
        CHECK(slope >= -1e-12);
        CHECK(slope <= 1.0 + 1e-12);
    }
}

TEST_CASE("scaled measure declared with the same alpha_max yields the same solution")
{
    const auto mu = random_atoms(8, 12);
    const auto first = build_curve(mu, 0.5, 10.0, 4001);
    // The scaled measure on [0, 5] traces the same graph; declare alpha_max = 10 for it.
    const auto scaled = build_curve(scale(mu, 2.0), 0.5, 5.0, 4001);
    const DisplacementCurve second(scaled.total(), scaled.water(), 10.0, 0.5);
    RecoveryConfig config;
    config.n_grid = 1001;
    const auto report = stability_experiment(first, second, config);
    CHECK(report.delta <= 1e-3 * first.v_max());
    CHECK(report.v_diff <= 1e-2 * first.v_max());
    CHECK(report.within_bound);
    CHECK_THROWS_AS(stability_experiment(first, build_curve(mu, 0.4, 10.0, 101)), ArgumentError);
}

TEST_CASE("sensitivity constant")
{
    const auto mu = random_atoms(11, 10);
    CHECK_THROWS_AS(sensitivity_constant(mu, mu, 0.5, 10.0), DegenerateInputError);

    auto atoms = mu.atoms();
    atoms[0].length += 1e-6;
    const auto nudged = sensitivity_constant(mu, Measure(atoms, {}), 0.5, 10.0);
    CHECK(nudged.accepted);
    CHECK(std::isfinite(nudged.c_value));
    CHECK(nudged.c_value > 0.0);
    CHECK(nudged.n1 == 10);

    // Twice the mass is far outside the volume filter.
    const auto heavy = sensitivity_constant(mu, scale_mass(mu, 2.0), 0.5, 10.0);
    CHECK_FALSE(heavy.accepted);
    CHECK(std::isnan(heavy.c_value));

    CHECK_THROWS_AS(sensitivity_constant(mu, Measure(), 0.5, 10.0), ArgumentError);
    CHECK_THROWS_AS(sensitivity_constant(mu, Measure::single_atom(12.0, 1.0), 0.5, 10.0), ArgumentError);
}

TEST_CASE("sensitivity of two single atoms against hand-computed norms")
{
    // mu1 = atom (2, 1), mu2 = atom (2, 1.05): F differs by a constant ratio on [2, 10).
    const Measure mu1 = Measure::single_atom(2.0, 1.0);
    const Measure mu2 = Measure::single_atom(2.0, 1.05);
    const auto record = sensitivity_constant(mu1, mu2, 0.5, 10.0, 4001);
    REQUIRE(record.accepted);
    CHECK(record.measure_norm == doctest::Approx(8.0 * 0.05 / 2.05).epsilon(1e-12));
    // Water cuts are 0 before and 1 after breakthrough; breakthrough sits at
    // x = 2 for mu1 and x = 2.1 for mu2, so they disagree on a stretch of 0.1.
    CHECK(record.curve_norm == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("trials are reproducible and jobs do not change the result")
{
    MonteCarloConfig config;
    config.accepted_target = 12;
    config.n_grid = 201;
    config.max_atoms = 10;
    const auto a = sensitivity_trial(42, config);
    const auto b = sensitivity_trial(42, config);
    CHECK(a.seed == 42);
    CHECK((a.c_value == b.c_value || (std::isnan(a.c_value) && std::isnan(b.c_value))));

    const auto serial = monte_carlo(config);
    config.jobs = 4;
    const auto parallel = monte_carlo(config);
    REQUIRE(serial.size() == parallel.size());
    int accepted = 0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].seed == config.seed + i);
        CHECK(serial[i].accepted == parallel[i].accepted);
        if (serial[i].accepted) {
            ++accepted;
            CHECK(serial[i].c_value == parallel[i].c_value);
            CHECK(serial[i].c_value > 0.0);
            CHECK(std::isfinite(serial[i].c_value));
        }
    }
    CHECK(accepted == 12);
    CHECK(serial.back().accepted);

    config.min_atoms = 0;
    CHECK_THROWS_AS(monte_carlo(config), ArgumentError);
}

TEST_CASE("ambiguity pair construction")
{
    const auto pair = ambiguity_pair(2.0, 1.2);
    REQUIRE(pair.mu2.pieces().size() == 2);
    const auto& tail = pair.mu2.pieces()[1];
    CHECK(tail.lo == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(tail.hi == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(tail.density == doctest::Approx(1.44).epsilon(1e-15));
    const auto same = ambiguity_pair(2.0, 1.0);
    CHECK(same.mu1 == same.mu2);
    CHECK_THROWS_AS(ambiguity_pair(2.0, 1.6), ArgumentError);
    CHECK_THROWS_AS(ambiguity_pair(2.0, 1.5), ArgumentError);
    CHECK_THROWS_AS(ambiguity_pair(1.0, 1.2), ArgumentError);
    CHECK_THROWS_AS(ambiguity_pair(2.0, 0.0), ArgumentError);
}

TEST_CASE("curve gap")
{
    CHECK(curve_gap(ambiguity_pair(2.0, 1.0), 0.5, 2.0) <= 1e-10);

    const auto pair = ambiguity_pair(2.0, 1.2);
    double previous = 0.0;
    for (double probe : {0.5, 1.0, 1.5, 2.0}) {
        const double gap = curve_gap(pair, 0.5, probe, 501);
        CHECK(gap >= previous);
        previous = gap;
    }
    CHECK(previous > 0.0);
    CHECK_THROWS_AS(curve_gap(pair, 0.5, -1.0), ArgumentError);
}

TEST_CASE("series estimate of the tail mismatch")
{
    const auto pair = ambiguity_pair(2.0, 1.2);
    // Tails: ln(4/3) for mu1, 1.44 ln(4/3) for mu2.
    const double expected = 0.75 * 4.0 / 2.0 * 0.44 * std::log(4.0 / 3.0) / 0.5;
    CHECK(ambiguity_series_estimate(pair, 0.5, 2.0) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(ambiguity_series_estimate(ambiguity_pair(2.0, 1.0), 0.5, 2.0) == 0.0);
}
