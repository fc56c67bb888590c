#include "tubeflow/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tubeflow/errors.hpp"

namespace tubeflow {

namespace {

void check_alpha(double alpha)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ArgumentError("alpha must be finite and nonnegative");
    }
}

double just_above(double x)
{
    return std::nextafter(x, kInfinity);
}

} // namespace

DisplacementCurve::DisplacementCurve(std::vector<double> total, std::vector<double> water,
                                     double alpha_max, double kappa)
    : total_(std::move(total)), water_(std::move(water)), alpha_max_(alpha_max), kappa_(kappa)
{
    check_kappa(kappa_);
    if (!(alpha_max_ > 0.0)) {
        throw ArgumentError("DisplacementCurve: alpha_max must be positive");
    }
    if (total_.size() < 2 || total_.size() != water_.size()) {
        throw ArgumentError("DisplacementCurve: need at least two (total, water) samples");
    }
    if (total_.front() != 0.0 || water_.front() != 0.0) {
        throw ArgumentError("DisplacementCurve: curve must start at (0, 0)");
    }
    // Rounding in the sampled volumes is a few ulps of the largest value.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * total_.back();
    for (std::size_t i = 1; i < total_.size(); ++i) {
        const double dx = total_[i] - total_[i - 1];
        const double dg = water_[i] - water_[i - 1];
        if (!(dx > 0.0)) {
            throw ConsistencyError("DisplacementCurve: total volume not strictly increasing at sample " +
                                   std::to_string(i));
        }
        if (dg < -slack) {
            throw ConsistencyError("DisplacementCurve: water volume decreases at sample " +
                                   std::to_string(i));
        }
        if (dg > dx * (1.0 + kSlopeTolerance) + slack) {
            throw ConsistencyError("DisplacementCurve: slope exceeds 1 at sample " + std::to_string(i));
        }
        if (water_[i] > total_[i] + slack) {
            throw ConsistencyError("DisplacementCurve: water exceeds total at sample " + std::to_string(i));
        }
    }
}

double DisplacementCurve::operator()(double x) const
{
    if (!(x > 0.0)) {
        return water_.front();
    }
    if (x >= total_.back()) {
        return water_.back();
    }
    const auto it = std::upper_bound(total_.begin(), total_.end(), x);
    const auto i = static_cast<std::size_t>(it - total_.begin());
    const double t = (x - total_[i - 1]) / (total_[i] - total_[i - 1]);
    return water_[i - 1] + t * (water_[i] - water_[i - 1]);
}

double v_w(const Measure& mu, double kappa, double alpha)
{
    check_kappa(kappa);
    check_alpha(alpha);
    const double inner = alpha * alpha * moment(mu, -1, 0.0, alpha) - moment(mu, 1, 0.0, alpha);
    return (1.0 + kappa) / (2.0 * kappa) * std::max(inner, 0.0);
}

double v_o(const Measure& mu, double kappa, double alpha)
{
    check_kappa(kappa);
    check_alpha(alpha);
    return moment(mu, 1, 0.0, alpha) + tail_kernel_integral(mu, alpha, kappa, alpha) / (1.0 - kappa);
}

double v_w_prime(const Measure& mu, double kappa, double alpha)
{
    check_kappa(kappa);
    check_alpha(alpha);
    return (1.0 + kappa) * alpha / kappa * moment(mu, -1, 0.0, just_above(alpha));
}

double v_o_prime(const Measure& mu, double kappa, double alpha)
{
    check_kappa(kappa);
    check_alpha(alpha);
    const double c = (1.0 - kappa * kappa) * alpha * alpha;
    double tail = 0.0;
    for (const auto& atom : mu.atoms()) {
        if (atom.length > alpha) {
            tail += atom.area / std::sqrt(atom.length * atom.length - c);
        }
    }
    // Antiderivative of 1 / sqrt(y^2 - c) is ln(y + sqrt(y^2 - c)).
    for (const auto& piece : mu.pieces()) {
        const double lo = std::max(alpha, piece.lo);
        const double hi = piece.hi;
        if (!(lo < hi) || piece.density == 0.0) {
            continue;
        }
        tail += piece.density *
                std::log((hi + std::sqrt(hi * hi - c)) / (lo + std::sqrt(lo * lo - c)));
    }
    return (1.0 + kappa) * alpha * tail;
}

double water_cut(const Measure& mu, double kappa, double alpha)
{
    const double water = v_w_prime(mu, kappa, alpha);
    const double oil = v_o_prime(mu, kappa, alpha);
    if (!(water + oil > 0.0)) {
        throw UndefinedValueError("water_cut: both production rates vanish at alpha = " +
                                  std::to_string(alpha));
    }
    return water / (water + oil);
}

double alpha_for_total(const Measure& mu, double kappa, double total, double alpha_hi)
{
    double lo = 0.0;
    double hi = alpha_hi;
    if (total <= 0.0) {
        return 0.0;
    }
    if (total >= v_total(mu, kappa, hi)) {
        return hi;
    }
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
            break;
        }
        if (v_total(mu, kappa, mid) < total) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

DisplacementCurve build_curve(const Measure& mu, double kappa, double alpha_max, int n_samples)
{
    check_kappa(kappa);
    if (mu.is_zero()) {
        throw ArgumentError("build_curve: zero measure has no displacement curve");
    }
    if (n_samples < 2) {
        throw ArgumentError("build_curve: need at least two samples");
    }
    if (!(alpha_max > 0.0) || mu.support_sup() > alpha_max) {
        throw ArgumentError("build_curve: support of the measure extends beyond alpha_max");
    }
    std::vector<double> total(n_samples);
    std::vector<double> water(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double alpha = i == n_samples - 1 ? alpha_max : alpha_max * i / (n_samples - 1);
        const double w = v_w(mu, kappa, alpha);
        water[i] = w;
        total[i] = w + v_o(mu, kappa, alpha);
    }
    return DisplacementCurve(std::move(total), std::move(water), alpha_max, kappa);
}

EndpointData endpoint_data(const Measure& mu, double kappa, double alpha_max)
{
    check_kappa(kappa);
    if (mu.support_sup() > alpha_max) {
        throw ArgumentError("endpoint_data: support of the measure extends beyond alpha_max");
    }
    const double inv = moment(mu, -1, 0.0, kInfinity);
    const double pore = moment(mu, 1, 0.0, kInfinity);
    const double factor = (1.0 + kappa) / (2.0 * kappa);
    return {
        factor * alpha_max * alpha_max * inv - factor * pore,
        pore,
        (1.0 + kappa) * alpha_max / kappa * inv,
    };
}

CurveReadoff curve_readoff(const DisplacementCurve& curve, bool uncorrected)
{
    const double v_max = curve.v_max();
    if (!(v_max > 0.0)) {
        throw ArgumentError("curve_readoff: curve has zero total volume");
    }
    const double kappa = curve.kappa();
    const double water = curve.water().back();
    const double numerator = 2.0 * water + (1.0 + kappa) / kappa * (v_max - water);
    return {water, uncorrected ? numerator : numerator / curve.alpha_max()};
}

} // namespace tubeflow
