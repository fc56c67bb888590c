#include <doctest.h>

#include <cmath>
#include <random>

#include "tubeflow/errors.hpp"
#include "tubeflow/forward.hpp"

using namespace tubeflow;

namespace {

const Measure kUnitAtom = Measure::single_atom(1.0, 1.0);

Measure random_mixed(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> length(0.5, 8.0);
    std::uniform_real_distribution<double> weight(0.1, 2.0);
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;
    for (int i = 0; i < 3; ++i) {
        atoms.push_back({length(rng), weight(rng)});
        const double a = length(rng);
        pieces.push_back({a, std::min(a + weight(rng), 9.0), weight(rng)});
    }
    return Measure(atoms, pieces);
}

// Sup over the first curve's samples of the distance to the second curve.
double one_sided_distance(const DisplacementCurve& a, const DisplacementCurve& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.total()[i] <= b.v_max()) {
            worst = std::max(worst, std::abs(a.water()[i] - b(a.total()[i])));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("water volume examples")
{
    CHECK(v_w(kUnitAtom, 0.5, 2.0) == 4.5);
    CHECK(v_w(kUnitAtom, 0.5, 0.5) == 0.0);
    CHECK(v_w(kUnitAtom, 0.5, 1.0) == 0.0);
}

TEST_CASE("oil volume examples")
{
    CHECK(v_o(kUnitAtom, 0.5, 0.5) == doctest::Approx(2.0 * (1.0 - std::sqrt(0.8125))).epsilon(1e-13));
    CHECK(v_o(kUnitAtom, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v_o(kUnitAtom, 0.5, 0.0) == 0.0);
}

TEST_CASE("derivative examples")
{
    CHECK(v_w_prime(kUnitAtom, 0.5, 2.0) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(v_o_prime(kUnitAtom, 0.5, 0.5) == doctest::Approx(0.75 / std::sqrt(0.8125)).epsilon(1e-14));
    CHECK(v_o_prime(kUnitAtom, 0.5, 1.5) == 0.0);
    // Right limit at an atom: the atom already counts toward V_w'.
    CHECK(v_w_prime(kUnitAtom, 0.5, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("water cut examples")
{
    CHECK(water_cut(kUnitAtom, 0.5, 0.5) == 0.0);
    CHECK(water_cut(kUnitAtom, 0.5, 2.0) == 1.0);
    const Measure two({{1.0, 1.0}, {2.0, 1.0}}, {});
    const double water = 3.0 * 1.5 * 1.0;
    const double oil = 1.5 * 1.5 / std::sqrt(4.0 - 0.75 * 2.25);
    CHECK(water_cut(two, 0.5, 1.5) == doctest::Approx(water / (water + oil)).epsilon(1e-14));
    CHECK(water_cut(two, 0.5, 1.5) == doctest::Approx(0.752560).epsilon(1e-6));
    CHECK_THROWS_AS(water_cut(Measure(), 0.5, 1.0), UndefinedValueError);
}

TEST_CASE("derivatives match central differences away from atoms")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto mu = random_mixed(rng);
        const double kappa = 0.1 + 0.8 * unit(rng);
        for (int k = 0; k < 10; ++k) {
            const double alpha = 0.3 + 9.0 * unit(rng);
            const double h = 1e-5;
            bool near_atom = false;
            for (const auto& atom : mu.atoms()) {
                near_atom = near_atom || std::abs(atom.length - alpha) < 10 * h;
            }
            if (near_atom) {
                continue;
            }
            const double dw = (v_w(mu, kappa, alpha + h) - v_w(mu, kappa, alpha - h)) / (2 * h);
            const double d_o = (v_o(mu, kappa, alpha + h) - v_o(mu, kappa, alpha - h)) / (2 * h);
            CHECK(dw == doctest::Approx(v_w_prime(mu, kappa, alpha)).epsilon(1e-6));
            CHECK(d_o == doctest::Approx(v_o_prime(mu, kappa, alpha)).epsilon(1e-6));
        }
    }
}

TEST_CASE("volumes are monotone and oil conserves pore volume")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random_mixed(rng);
        double water = 0.0;
        double oil = 0.0;
        for (int i = 1; i <= 400; ++i) {
            const double alpha = 10.0 * i / 400.0;
            const double w = v_w(mu, 0.4, alpha);
            const double o = v_o(mu, 0.4, alpha);
            CHECK(w >= water);
            if (alpha <= mu.support_sup()) {
                CHECK(o > oil);
            } else {
                CHECK(o >= oil);
            }
            water = w;
            oil = o;
        }
        const double pore = moment(mu, 1, 0.0, kInfinity);
        CHECK(v_o(mu, 0.4, mu.support_sup()) == doctest::Approx(pore).epsilon(1e-12));
    }
    const auto atoms = random_atoms(5, 20);
    CHECK(v_o(atoms, 0.4, 10.0) == moment(atoms, 1, 0.0, kInfinity));
}

TEST_CASE("alpha for total inverts the total volume")
{
    std::mt19937_64 rng(1);
    const auto mu = random_mixed(rng);
    for (double alpha : {0.0, 0.7, 3.3, 8.9}) {
        const double total = v_total(mu, 0.5, alpha);
        CHECK(alpha_for_total(mu, 0.5, total, 10.0) == doctest::Approx(alpha).epsilon(1e-12));
    }
    CHECK(alpha_for_total(mu, 0.5, 1e9, 10.0) == 10.0);
}

TEST_CASE("build curve on a single atom")
{
    const auto curve = build_curve(kUnitAtom, 0.5, 2.0, 101);
    CHECK(curve.size() == 101);
    CHECK(curve.total().back() == doctest::Approx(5.5).epsilon(1e-15));
    CHECK(curve.water().back() == 4.5);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.total()[i] <= 1.0) {
            CHECK(curve.water()[i] == 0.0);
        }
    }
    CHECK_THROWS_AS(build_curve(Measure(), 0.5, 2.0, 101), ArgumentError);
    CHECK_THROWS_AS(build_curve(kUnitAtom, 0.5, 0.5, 101), ArgumentError);
    CHECK_THROWS_AS(build_curve(kUnitAtom, 0.5, 2.0, 1), ArgumentError);
}

TEST_CASE("sampled curves have slope at most one")
{
    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random_mixed(rng);
        const auto curve = build_curve(mu, 0.3, 10.0, 801);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            const double dx = curve.total()[i] - curve.total()[i - 1];
            const double dg = curve.water()[i] - curve.water()[i - 1];
            CHECK(dg <= dx * (1.0 + 1e-9));
            CHECK(dg >= 0.0);
        }
    }
}

TEST_CASE("scaled measures trace the same curve")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        const auto mu = random_atoms(rng(), 10);
        for (double k : {0.5, 2.0}) {
            const auto original = build_curve(mu, 0.5, 10.0, 2001);
            const auto scaled = build_curve(scale(mu, k), 0.5, 10.0 / k, 2001);
            CHECK(scaled.v_max() == doctest::Approx(original.v_max()).epsilon(1e-12));
            // Compare at the scaled curve's samples using exact values of the original.
            for (std::size_t i = 0; i < scaled.size(); i += 50) {
                const double alpha = alpha_for_total(mu, 0.5, scaled.total()[i], 10.0);
                CHECK(std::abs(v_w(mu, 0.5, alpha) - scaled.water()[i]) <= 1e-9 * original.v_max());
            }
            CHECK(one_sided_distance(scaled, original) <= 1e-2 * original.v_max());
        }
    }
}

TEST_CASE("curve invariants are enforced")
{
    CHECK_THROWS_AS(DisplacementCurve({0.0, 1.0}, {0.0, 0.5}, 0.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(DisplacementCurve({0.0}, {0.0}, 1.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(DisplacementCurve({0.1, 1.0}, {0.0, 0.5}, 1.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(DisplacementCurve({0.0, 1.0, 1.0}, {0.0, 0.5, 0.5}, 1.0, 0.5), ConsistencyError);
    CHECK_THROWS_AS(DisplacementCurve({0.0, 1.0, 2.0}, {0.0, 0.5, 0.4}, 1.0, 0.5), ConsistencyError);
    CHECK_THROWS_AS(DisplacementCurve({0.0, 1.0, 2.0}, {0.0, 0.5, 1.6}, 1.0, 0.5), ConsistencyError);
    const DisplacementCurve curve({0.0, 1.0, 2.0}, {0.0, 0.0, 1.0}, 1.0, 0.5);
    CHECK(curve(1.5) == 0.5);
    CHECK(curve(-1.0) == 0.0);
    CHECK(curve(3.0) == 1.0);
}

TEST_CASE("endpoint data examples")
{
    const auto end = endpoint_data(kUnitAtom, 0.5, 2.0);
    CHECK(end.water == 4.5);
    CHECK(end.oil == 1.0);
    CHECK(end.water_slope == 6.0);
    CHECK(endpoint_data(scale(kUnitAtom, 3.0), 0.5, 2.0 / 3.0).oil == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(endpoint_data(Measure::single_atom(2.5, 0.7), 0.3, 2.5).water == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("endpoint data agrees with the volume functions")
{
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random_mixed(rng);
        const auto end = endpoint_data(mu, 0.6, 10.0);
        CHECK(end.water == doctest::Approx(v_w(mu, 0.6, 10.0)).epsilon(1e-12));
        CHECK(end.oil == doctest::Approx(v_o(mu, 0.6, 10.0)).epsilon(1e-12));
        CHECK(end.water_slope == doctest::Approx(v_w_prime(mu, 0.6, 10.0)).epsilon(1e-12));
    }
}

TEST_CASE("curve readoff examples")
{
    const auto readoff = curve_readoff(build_curve(kUnitAtom, 0.5, 2.0, 101));
    CHECK(readoff.water == 4.5);
    CHECK(readoff.water_slope == doctest::Approx(6.0).epsilon(1e-14));
    // Uncorrected slope is alpha_max times too large.
    CHECK(curve_readoff(build_curve(kUnitAtom, 0.5, 2.0, 101), true).water_slope ==
          doctest::Approx(12.0).epsilon(1e-14));

    const auto at_atom = curve_readoff(build_curve(Measure::single_atom(3.0, 2.0), 0.25, 3.0, 51));
    CHECK(at_atom.water == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at_atom.water_slope == doctest::Approx(5.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("curve readoff matches endpoint data for random measures")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random_mixed(rng);
        const auto end = endpoint_data(mu, 0.35, 10.0);
        const auto readoff = curve_readoff(build_curve(mu, 0.35, 10.0, 11));
        CHECK(readoff.water == doctest::Approx(end.water).epsilon(1e-12));
        CHECK(readoff.water_slope == doctest::Approx(end.water_slope).epsilon(1e-10));
    }
}
