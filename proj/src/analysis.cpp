#include "tubeflow/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "tubeflow/errors.hpp"

namespace tubeflow {

double stability_bound(double kappa, double alpha_max)
{
    check_kappa(kappa);
    if (!(alpha_max >= 0.0)) {
        throw ArgumentError("stability_bound: alpha_max must be nonnegative");
    }
    return (1.0 + kappa) / (2.0 * kappa) * (alpha_max + (3.0 + kappa) / (1.0 + kappa));
}

double curve_distance(const DisplacementCurve& first, const DisplacementCurve& second)
{
    const double common = std::min(first.v_max(), second.v_max());
    // Both interpolants are linear between the union of their nodes.
    double best = std::abs(first(common) - second(common));
    for (const auto* curve : {&first, &second}) {
        for (double x : curve->total()) {
            if (x > common) {
                break;
            }
            best = std::max(best, std::abs(first(x) - second(x)));
        }
    }
    return best;
}

StabilityReport stability_experiment(const DisplacementCurve& first, const DisplacementCurve& second,
                                     const RecoveryConfig& config)
{
    if (first.kappa() != second.kappa() ||
        std::abs(first.alpha_max() - second.alpha_max()) > 1e-12 * first.alpha_max()) {
        throw ArgumentError("stability_experiment: curves must share kappa and alpha_max");
    }
    const auto one = solve_fixed_point(first, config);
    const auto two = solve_fixed_point(second, config);

    StabilityReport report;
    report.delta = curve_distance(first, second);
    for (std::size_t i = 0; i < one.water.size(); ++i) {
        report.v_diff = std::max(report.v_diff, std::abs(one.water[i] - two.water[i]));
    }
    report.bound_constant = stability_bound(first.kappa(), first.alpha_max());
    report.bound = report.bound_constant * report.delta;
    report.ratio = report.delta > 0.0 ? report.v_diff / report.delta : 0.0;
    report.solver_slack = one.error_bound + two.error_bound;
    report.within_bound = report.v_diff <= report.bound + report.solver_slack;
    report.iterations1 = one.iterations;
    report.iterations2 = two.iterations;
    return report;
}

DisplacementCurve perturb_curve(const DisplacementCurve& curve, double delta0)
{
    const auto& x = curve.total();
    const auto& g = curve.water();
    const double v_max = curve.v_max();
    std::vector<double> bump(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        bump[i] = delta0 * std::sin(std::numbers::pi * x[i] / v_max);
    }
    // Largest theta <= 1 with 0 <= base + theta * extra <= 1 on every chord.
    double theta = 1.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double dx = x[i] - x[i - 1];
        const double base = std::clamp((g[i] - g[i - 1]) / dx, 0.0, 1.0);
        const double extra = (bump[i] - bump[i - 1]) / dx;
        if (extra > 0.0) {
            theta = std::min(theta, (1.0 - base) / extra);
        } else if (extra < 0.0) {
            theta = std::min(theta, base / -extra);
        }
    }
    theta = std::max(theta, 0.0);
    std::vector<double> water(g);
    for (std::size_t i = 1; i < x.size(); ++i) {
        water[i] += theta * bump[i];
    }
    water.back() = g.back();
    return DisplacementCurve(x, std::move(water), curve.alpha_max(), curve.kappa());
}

namespace {

double just_above(double x)
{
    return std::nextafter(x, kInfinity);
}

double just_below(double x)
{
    return x > 0.0 ? std::nextafter(x, 0.0) : 0.0;
}

// Atom locations and piece ends: where G' or F may jump or kink.
std::vector<double> breakpoints(const Measure& mu)
{
    std::vector<double> points;
    for (const auto& atom : mu.atoms()) {
        points.push_back(atom.length);
    }
    for (const auto& piece : mu.pieces()) {
        if (piece.density > 0.0) {
            points.push_back(piece.lo);
            points.push_back(piece.hi);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

// G' at alpha, taking the limit 0 at alpha = 0.
double g_prime(const Measure& mu, double kappa, double alpha)
{
    if (alpha <= 0.0) {
        return 0.0;
    }
    const double water = v_w_prime(mu, kappa, alpha);
    const double oil = v_o_prime(mu, kappa, alpha);
    return water + oil > 0.0 ? water / (water + oil) : 0.0;
}

double relative_gap(double a, double b)
{
    const double sum = a + b;
    return sum > 0.0 ? std::abs(a - b) / sum : 0.0;
}

struct VolumeNode {
    double x;
    double alpha1;
    double alpha2;
};

double water_cut_norm(const Measure& mu1, const Measure& mu2, double kappa, double alpha_max,
                      double common, int n_grid)
{
    auto invert1 = [&](double x) { return alpha_for_total(mu1, kappa, x, alpha_max); };
    auto invert2 = [&](double x) { return alpha_for_total(mu2, kappa, x, alpha_max); };

    std::vector<VolumeNode> nodes{{0.0, 0.0, 0.0}};
    for (double a : breakpoints(mu1)) {
        const double x = v_total(mu1, kappa, a);
        if (x < common) {
            nodes.push_back({x, a, invert2(x)});
        }
    }
    for (double a : breakpoints(mu2)) {
        const double x = v_total(mu2, kappa, a);
        if (x < common) {
            nodes.push_back({x, invert1(x), a});
        }
    }
    nodes.push_back({common, invert1(common), invert2(common)});
    std::sort(nodes.begin(), nodes.end(),
              [](const VolumeNode& a, const VolumeNode& b) { return a.x < b.x; });
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](const VolumeNode& a, const VolumeNode& b) { return a.x == b.x; }),
                nodes.end());

    auto ratio = [&](double a1, double a2) {
        return relative_gap(g_prime(mu1, kappa, a1), g_prime(mu2, kappa, a2));
    };

    // Trapezoid on each smooth stretch; stretch ends use one-sided limits.
    double integral = 0.0;
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const auto& start = nodes[s];
        const auto& end = nodes[s + 1];
        const double width = end.x - start.x;
        const int m = std::max(1, static_cast<int>(std::ceil(n_grid * width / common)));
        const double step = width / m;
        double previous = ratio(just_above(start.alpha1), just_above(start.alpha2));
        for (int k = 1; k <= m; ++k) {
            double value = 0.0;
            if (k == m) {
                value = ratio(just_below(end.alpha1), just_below(end.alpha2));
            } else {
                const double x = start.x + k * step;
                value = ratio(invert1(x), invert2(x));
            }
            integral += 0.5 * step * (previous + value);
            previous = value;
        }
    }
    return integral;
}

double mass_norm(const Measure& mu1, const Measure& mu2, double alpha_max, int n_grid)
{
    std::vector<double> points = uniform_grid(alpha_max, n_grid);
    for (const auto* mu : {&mu1, &mu2}) {
        for (double a : breakpoints(*mu)) {
            if (a < alpha_max) {
                points.push_back(a);
            }
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    auto ratio = [&](double alpha) {
        return relative_gap(moment(mu1, 0, 0.0, alpha), moment(mu2, 0, 0.0, alpha));
    };
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double a = points[i];
        const double b = points[i + 1];
        integral += 0.5 * (b - a) * (ratio(just_above(a)) + ratio(just_below(b)));
    }
    return integral;
}

} // namespace

SensitivityRecord sensitivity_constant(const Measure& mu1, const Measure& mu2, double kappa,
                                       double alpha_max, int n_grid)
{
    check_kappa(kappa);
    if (mu1.is_zero() || mu2.is_zero()) {
        throw ArgumentError("sensitivity_constant: measures must be nonzero");
    }
    if (mu1.support_sup() > alpha_max || mu2.support_sup() > alpha_max) {
        throw ArgumentError("sensitivity_constant: support extends beyond alpha_max");
    }
    if (n_grid < 2) {
        throw ArgumentError("sensitivity_constant: need n_grid >= 2");
    }
    if (mu1 == mu2) {
        throw DegenerateInputError("sensitivity_constant: identical measures give 0/0");
    }
    SensitivityRecord record;
    record.n1 = static_cast<int>(mu1.atoms().size());
    record.n2 = static_cast<int>(mu2.atoms().size());
    record.v1_max = v_total(mu1, kappa, alpha_max);
    record.v2_max = v_total(mu2, kappa, alpha_max);
    record.accepted = std::abs(record.v1_max - record.v2_max) < record.v1_max / 10.0;
    if (!record.accepted) {
        record.c_value = std::numeric_limits<double>::quiet_NaN();
        return record;
    }
    const double common = std::min(record.v1_max, record.v2_max);
    record.curve_norm = water_cut_norm(mu1, mu2, kappa, alpha_max, common, n_grid);
    record.measure_norm = mass_norm(mu1, mu2, alpha_max, n_grid);
    if (!(record.measure_norm > 0.0)) {
        throw DegenerateInputError("sensitivity_constant: measures have identical cumulative mass");
    }
    record.c_value = record.curve_norm / record.measure_norm;
    return record;
}

SensitivityRecord sensitivity_trial(std::uint64_t seed, const MonteCarloConfig& config)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count(config.min_atoms, config.max_atoms);
    const int n1 = count(rng);
    const int n2 = count(rng);
    const std::uint64_t seed1 = rng();
    const std::uint64_t seed2 = rng();
    const auto mu1 = random_atoms(seed1, n1, config.ranges);
    const auto mu2 = random_atoms(seed2, n2, config.ranges);
    auto record = sensitivity_constant(mu1, mu2, config.kappa, config.alpha_max, config.n_grid);
    record.seed = seed;
    return record;
}

std::vector<SensitivityRecord> monte_carlo(const MonteCarloConfig& config)
{
    check_kappa(config.kappa);
    if (config.accepted_target < 1 || config.max_trials < 1) {
        throw ArgumentError("monte_carlo: need positive target and trial budget");
    }
    if (config.min_atoms < 1 || config.min_atoms > config.max_atoms) {
        throw ArgumentError("monte_carlo: invalid atom count range");
    }
    const int jobs = std::max(1, config.jobs);
    constexpr int kBatch = 256;

    std::vector<SensitivityRecord> records;
    int accepted = 0;
    int started = 0;
    while (accepted < config.accepted_target && started < config.max_trials) {
        const int batch = std::min(kBatch, config.max_trials - started);
        std::vector<SensitivityRecord> slots(batch);
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (int i = next++; i < batch; i = next++) {
                try {
                    slots[i] = sensitivity_trial(config.seed + static_cast<std::uint64_t>(started + i), config);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        };
        if (jobs == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (int t = 0; t < jobs; ++t) {
                pool.emplace_back(worker);
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
        for (auto& record : slots) {
            if (accepted >= config.accepted_target) {
                break;
            }
            accepted += record.accepted ? 1 : 0;
            records.push_back(record);
        }
        started += batch;
    }
    return records;
}

AmbiguityPair ambiguity_pair(double alpha0, double k_factor)
{
    if (!(alpha0 > 1.0)) {
        throw ArgumentError("ambiguity_pair: alpha0 must exceed 1");
    }
    if (!(k_factor > 0.0) || !(k_factor < 1.0 + 1.0 / alpha0)) {
        throw ArgumentError("ambiguity_pair: k must lie in (0, 1 + 1 / alpha0)");
    }
    const DensityPiece common{1.0, alpha0, 1.0};
    AmbiguityPair pair;
    pair.alpha0 = alpha0;
    pair.k_factor = k_factor;
    pair.mu1 = Measure({}, {common, {alpha0 + 1.0, alpha0 + 2.0, 1.0}});
    pair.mu2 = Measure({}, {common, {(alpha0 + 1.0) / k_factor, (alpha0 + 2.0) / k_factor, k_factor * k_factor}});
    return pair;
}

double curve_gap(const AmbiguityPair& pair, double kappa, double alpha_probe, int n_grid)
{
    check_kappa(kappa);
    if (!(alpha_probe >= 0.0)) {
        throw ArgumentError("curve_gap: probe must be nonnegative");
    }
    if (n_grid < 2) {
        throw ArgumentError("curve_gap: need n_grid >= 2");
    }
    const double alpha_max = std::max({pair.mu1.support_sup(), pair.mu2.support_sup(), alpha_probe});
    const double reach = std::min(v_total(pair.mu1, kappa, alpha_probe), v_total(pair.mu2, kappa, alpha_probe));
    double gap = 0.0;
    for (int i = 1; i < n_grid; ++i) {
        const double x = reach * i / (n_grid - 1);
        const double g1 = v_w(pair.mu1, kappa, alpha_for_total(pair.mu1, kappa, x, alpha_max));
        const double g2 = v_w(pair.mu2, kappa, alpha_for_total(pair.mu2, kappa, x, alpha_max));
        gap = std::max(gap, std::abs(g1 - g2));
    }
    return gap;
}

double ambiguity_series_estimate(const AmbiguityPair& pair, double kappa, double alpha_probe)
{
    check_kappa(kappa);
    const double tail1 = moment(pair.mu1, -1, pair.alpha0, kInfinity);
    const double tail2 = moment(pair.mu2, -1, pair.alpha0, kInfinity);
    return (1.0 - kappa * kappa) * alpha_probe * alpha_probe / 2.0 * std::abs(tail1 - tail2) /
           (1.0 - kappa);
}

} // namespace tubeflow
