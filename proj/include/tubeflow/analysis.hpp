#pragma once

#include <cstdint>
#include <vector>

#include "tubeflow/forward.hpp"
#include "tubeflow/inverse.hpp"
#include "tubeflow/measure.hpp"

namespace tubeflow {

/// Lipschitz constant of the curve-to-solution map in the sup norm:
/// (1 + k) / (2 k) * (alpha_max + (3 + k) / (1 + k)).
double stability_bound(double kappa, double alpha_max);

struct StabilityReport {
    double delta = 0.0;           // sup |G1 - G2| on the common volume range
    double v_diff = 0.0;          // sup |V1 - V2| on the grid
    double bound_constant = 0.0;  // stability_bound(kappa, alpha_max)
    double bound = 0.0;           // bound_constant * delta
    double ratio = 0.0;           // v_diff / delta (0 when delta == 0)
    double solver_slack = 0.0;    // sum of both a-priori solver error bounds
    bool within_bound = false;    // v_diff <= bound + solver_slack
    int iterations1 = 0;
    int iterations2 = 0;
};

/// Sup-distance between two curves over [0, min(v_max1, v_max2)].
double curve_distance(const DisplacementCurve& first, const DisplacementCurve& second);

/// Solves both fixed-point problems and compares the solutions with the
/// distance between the input curves.
StabilityReport stability_experiment(const DisplacementCurve& first, const DisplacementCurve& second,
                                     const RecoveryConfig& config = {});

/// Adds delta0 * theta * sin(pi x / v_max) to the water samples, with
/// theta = min(1, largest factor that keeps every chord slope in [0, 1]).
DisplacementCurve perturb_curve(const DisplacementCurve& curve, double delta0);

struct SensitivityRecord {
    std::uint64_t seed = 0;
    int n1 = 0;
    int n2 = 0;
    double v1_max = 0.0;
    double v2_max = 0.0;
    bool accepted = false;
    double curve_norm = 0.0;    // L1 norm of (G1' - G2') / (G1' + G2')
    double measure_norm = 0.0;  // L1 norm of (F1 - F2) / (F1 + F2)
    double c_value = 0.0;       // curve_norm / measure_norm; NaN if rejected
};

/// Ratio of the relative water-cut discrepancy to the relative discrepancy of
/// F_j(alpha) = mu_j((0, alpha)), both in L1. Pairs whose total volumes differ
/// by a tenth or more are rejected without computing the ratio.
SensitivityRecord sensitivity_constant(const Measure& mu1, const Measure& mu2, double kappa,
                                       double alpha_max, int n_grid = 2001);

struct MonteCarloConfig {
    std::uint64_t seed = 1;
    int accepted_target = 1000;
    int max_trials = 1000000;
    double kappa = 0.5;
    double alpha_max = 10.0;
    int n_grid = 2001;
    int min_atoms = 5;
    int max_atoms = 50;
    AtomRanges ranges{};
    int jobs = 1;
};

/// One trial: two random atomic measures drawn from `seed`.
SensitivityRecord sensitivity_trial(std::uint64_t seed, const MonteCarloConfig& config);

/// Runs trials for seeds config.seed, config.seed + 1, ... until
/// accepted_target pairs pass the filter. Returns every trial in seed order;
/// the output does not depend on `jobs`.
std::vector<SensitivityRecord> monte_carlo(const MonteCarloConfig& config);

struct AmbiguityPair {
    Measure mu1;
    Measure mu2;
    double alpha0 = 0.0;
    double k_factor = 1.0;
};

/// mu1 = l[1, a0] + l[a0 + 1, a0 + 2], mu2 = l[1, a0] + k^2 l[(a0 + 1) / k, (a0 + 2) / k],
/// l = Lebesgue measure. Requires a0 > 1 and 0 < k < 1 + 1 / a0.
AmbiguityPair ambiguity_pair(double alpha0, double k_factor);

/// Sup of |G1(x) - G2(x)| over total volumes reachable by both curves with
/// alpha <= alpha_probe. G is evaluated exactly (no curve interpolation).
double curve_gap(const AmbiguityPair& pair, double kappa, double alpha_probe, int n_grid = 2001);

/// Leading-order size of the oil-volume mismatch at alpha_probe caused by the
/// tails above alpha0: (1 - k^2) a^2 / 2 |d int dmu / y| / (1 - k).
double ambiguity_series_estimate(const AmbiguityPair& pair, double kappa, double alpha_probe);

} // namespace tubeflow
