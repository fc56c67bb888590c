#pragma once

#include <vector>

#include "tubeflow/measure.hpp"

namespace tubeflow {

/// Sampled displacement characteristic: water produced `g` as a function of
/// total produced volume `x`, for alpha in [0, alpha_max].
///
/// Invariants (checked on construction): starts at (0, 0), x strictly
/// increasing, g nondecreasing, g <= x, and every chord has slope <= 1.
class DisplacementCurve {
public:
    static constexpr double kSlopeTolerance = 1e-9;

    DisplacementCurve(std::vector<double> total, std::vector<double> water, double alpha_max,
                      double kappa);

    const std::vector<double>& total() const { return total_; }
    const std::vector<double>& water() const { return water_; }
    double v_max() const { return total_.back(); }
    double alpha_max() const { return alpha_max_; }
    double kappa() const { return kappa_; }
    std::size_t size() const { return total_.size(); }

    /// Piecewise-linear G(x); arguments are clamped to [0, v_max].
    double operator()(double x) const;

private:
    std::vector<double> total_;
    std::vector<double> water_;
    double alpha_max_;
    double kappa_;
};

/// Cumulative water produced at parameter alpha.
double v_w(const Measure& mu, double kappa, double alpha);
/// Cumulative oil produced at parameter alpha.
double v_o(const Measure& mu, double kappa, double alpha);
inline double v_total(const Measure& mu, double kappa, double alpha)
{
    return v_w(mu, kappa, alpha) + v_o(mu, kappa, alpha);
}

// Derivatives in alpha. At an atom location both return the right limit.
double v_w_prime(const Measure& mu, double kappa, double alpha);
double v_o_prime(const Measure& mu, double kappa, double alpha);

/// Water fraction of the produced stream, V_w' / (V_w' + V_o').
/// Throws UndefinedValueError when both rates vanish.
double water_cut(const Measure& mu, double kappa, double alpha);

/// Parameter alpha in [0, alpha_hi] at which the total produced volume
/// equals `total` (bisection; total is continuous and strictly increasing).
double alpha_for_total(const Measure& mu, double kappa, double total, double alpha_hi);

/// Samples (V_w + V_o, V_w) on a uniform alpha grid with n_samples points.
DisplacementCurve build_curve(const Measure& mu, double kappa, double alpha_max, int n_samples);

struct EndpointData {
    double water;
    double oil;
    double water_slope;
};

/// V_w, V_o and V_w' at alpha_max from the -1 and +1 moments of mu.
EndpointData endpoint_data(const Measure& mu, double kappa, double alpha_max);

struct CurveReadoff {
    double water;
    double water_slope;
};

/// V_w(alpha_max) and V_w'(alpha_max) recovered from the curve alone:
/// V_w = G(v_max), V_w' = (2 V_w + (1 + k) / k (v_max - V_w)) / alpha_max.
/// `uncorrected` drops the division by alpha_max (diagnostic only).
CurveReadoff curve_readoff(const DisplacementCurve& curve, bool uncorrected = false);

} // namespace tubeflow
