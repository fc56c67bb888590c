#include "tubeflow/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tubeflow/errors.hpp"
#include "tubeflow/quadrature.hpp"

namespace tubeflow {

void RecoveryConfig::validate(double alpha_max) const
{
    if (n_grid < 3) {
        throw ArgumentError("RecoveryConfig: n_grid must be at least 3");
    }
    if (tol && !(*tol > 0.0)) {
        throw ArgumentError("RecoveryConfig: tol must be positive");
    }
    if (!(tol_relative > 0.0)) {
        throw ArgumentError("RecoveryConfig: relative tol must be positive");
    }
    if (max_iter < 1) {
        throw ArgumentError("RecoveryConfig: max_iter must be positive");
    }
    if (!(alpha_min >= 0.0) || !(alpha_min < alpha_max)) {
        throw ArgumentError("RecoveryConfig: need 0 <= alpha_min < alpha_max");
    }
    if (quad_order < 1 || quad_order > 64) {
        throw ArgumentError("RecoveryConfig: quadrature order must be in [1, 64]");
    }
}

std::vector<double> uniform_grid(double alpha_max, int n)
{
    if (n < 2 || !(alpha_max > 0.0)) {
        throw ArgumentError("uniform_grid: need n >= 2 and alpha_max > 0");
    }
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = alpha_max * i / (n - 1);
    }
    grid.back() = alpha_max;
    return grid;
}

double kernel_k(double y, double alpha, double kappa)
{
    check_kappa(kappa);
    if (!(alpha >= 0.0) || !(y >= alpha)) {
        throw ArgumentError("kernel_k: need 0 <= alpha <= y");
    }
    if (alpha == 0.0) {
        return 0.0;
    }
    const double c = 1.0 - kappa * kappa;
    const double a2 = alpha * alpha;
    const double gap = y * y - c * a2;
    return kappa * c * a2 * a2 / (y * y * gap * std::sqrt(gap));
}

KernelOperator::KernelOperator(std::vector<double> grid, double kappa, int quad_order)
    : grid_(std::move(grid)), kappa_(kappa)
{
    check_kappa(kappa);
    const std::size_t n = grid_.size();
    if (n < 2) {
        throw ArgumentError("KernelOperator: grid needs at least two points");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(grid_[i] > grid_[i - 1])) {
            throw ArgumentError("KernelOperator: grid must be strictly increasing");
        }
    }
    if (grid_.front() < 0.0) {
        throw ArgumentError("KernelOperator: grid must be nonnegative");
    }
    const GaussLegendre rule(quad_order);
    weights_.assign(row_offset(n), 0.0);

    const double c = 1.0 - kappa * kappa;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double alpha = grid_[i];
        if (alpha == 0.0) {
            continue;
        }
        const double a2 = alpha * alpha;
        const double scale = kappa * c * a2 * a2;
        double* row = weights_.data() + row_offset(i) - i;
        for (std::size_t j = i; j + 1 < n; ++j) {
            const double y0 = grid_[j];
            const double y1 = grid_[j + 1];
            const double width = y1 - y0;
            const int panels = std::clamp(static_cast<int>(std::ceil(width / (0.1 * y0))), 1, 256);
            const double panel = width / panels;
            double w_left = 0.0;
            double w_right = 0.0;
            for (int p = 0; p < panels; ++p) {
                const double lo = y0 + p * panel;
                const double mid = lo + 0.5 * panel;
                for (int q = 0; q < rule.order(); ++q) {
                    const double y = mid + 0.5 * panel * rule.nodes[q];
                    const double gap = y * y - c * a2;
                    const double k = scale / (y * y * gap * std::sqrt(gap)) * 0.5 * panel * rule.weights[q];
                    const double t = (y - y0) / width;
                    w_left += k * (1.0 - t);
                    w_right += k * t;
                }
            }
            row[j] += w_left;
            row[j + 1] += w_right;
        }
    }
}

std::size_t KernelOperator::row_offset(std::size_t i) const
{
    const std::size_t n = grid_.size();
    return i * n - i * (i - 1) / 2;
}

void KernelOperator::apply(std::span<const double> values, std::span<double> out) const
{
    const std::size_t n = grid_.size();
    if (values.size() != n || out.size() != n) {
        throw ArgumentError("KernelOperator::apply: size mismatch with grid");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = weights_.data() + row_offset(i) - i;
        double sum = 0.0;
        for (std::size_t j = i; j < n; ++j) {
            sum += row[j] * values[j];
        }
        out[i] = sum;
    }
}

std::vector<double> KernelOperator::apply(std::span<const double> values) const
{
    std::vector<double> out(grid_.size());
    apply(values, out);
    return out;
}

double KernelOperator::norm() const
{
    const std::size_t n = grid_.size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = weights_.data() + row_offset(i) - i;
        double sum = 0.0;
        for (std::size_t j = i; j < n; ++j) {
            sum += std::abs(row[j]);
        }
        best = std::max(best, sum);
    }
    return best;
}

std::vector<double> apply_t(std::span<const double> values, double kappa, double alpha_max,
                            int quad_order)
{
    const KernelOperator op(uniform_grid(alpha_max, static_cast<int>(values.size())), kappa, quad_order);
    return op.apply(values);
}

double h_of_alpha(double water_max, double oil_max, double kappa, double alpha_max, double alpha,
                  bool uncorrected)
{
    check_kappa(kappa);
    if (!(alpha >= 0.0) || !(alpha <= alpha_max)) {
        throw ArgumentError("h_of_alpha: alpha must lie in [0, alpha_max]");
    }
    const double c = 1.0 - kappa * kappa;
    const double r = std::sqrt(alpha_max * alpha_max - c * alpha * alpha);
    double slope = 2.0 * water_max + (1.0 + kappa) / kappa * oil_max;
    if (!uncorrected) {
        slope /= alpha_max;
    }
    // alpha_max - R written without cancellation.
    const double drop = c * alpha * alpha / (alpha_max + r);
    const double factor = kappa / c;
    return factor * drop * slope + factor * drop * drop / (alpha_max * r) * water_max;
}

RecoveryResult solve_fixed_point(const DisplacementCurve& curve, const RecoveryConfig& config)
{
    const double alpha_max = curve.alpha_max();
    const double kappa = curve.kappa();
    config.validate(alpha_max);

    RecoveryResult result;
    result.alpha = uniform_grid(alpha_max, config.n_grid);
    result.tol = config.tol.value_or(config.tol_relative * curve.v_max());
    result.contraction_bound = (1.0 - kappa) / (1.0 + kappa);

    const std::size_t n = result.alpha.size();
    const auto readoff = curve_readoff(curve);
    const double oil_max = curve.v_max() - readoff.water;
    std::vector<double> known(n);
    for (std::size_t i = 0; i < n; ++i) {
        known[i] = h_of_alpha(readoff.water, oil_max, kappa, alpha_max, result.alpha[i], config.uncorrected);
    }
    const KernelOperator op(result.alpha, kappa, config.quad_order);

    std::vector<double> current(n, config.initial_value);
    std::vector<double> next(n);
    std::vector<double> t_values(n);
    auto step = [&](const std::vector<double>& from, std::vector<double>& to) {
        op.apply(from, t_values);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            to[i] = curve(known[i] + t_values[i]);
            change = std::max(change, std::abs(to[i] - from[i]));
        }
        return change;
    };

    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int it = 1; it <= config.max_iter; ++it) {
        const double change = step(current, next);
        current.swap(next);
        result.iterations = it;
        result.last_step = change;
        if (previous > 100.0 * result.tol && change > 0.0) {
            result.observed_ratio = std::max(result.observed_ratio, change / previous);
        }
        previous = change;
        if (change <= result.tol) {
            result.converged = true;
            break;
        }
    }
    const double q = result.contraction_bound;
    result.error_bound = q / (1.0 - q) * result.last_step;
    result.residual = step(current, next);
    result.water = std::move(current);
    if (!result.converged) {
        const std::string message = "solve_fixed_point: no convergence after " +
                                    std::to_string(config.max_iter) + " iterations (last step " +
                                    std::to_string(result.last_step) + ")";
        throw ConvergenceError(message, std::move(result));
    }
    return result;
}

namespace {

// Second-order first derivative on a uniform grid.
std::vector<double> derivative(std::span<const double> x, std::span<const double> f)
{
    const std::size_t n = x.size();
    std::vector<double> d(n);
    const double h = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

void check_samples(std::span<const double> alpha, std::span<const double> water)
{
    if (alpha.size() < 3 || alpha.size() != water.size()) {
        throw ArgumentError("need at least three grid samples of matching size");
    }
    if (alpha.front() != 0.0) {
        throw ArgumentError("grid must start at alpha = 0");
    }
}

// kappa V' / ((1 + kappa) alpha), zero at alpha = 0.
std::vector<double> raw_phi(std::span<const double> alpha, std::span<const double> water, double kappa)
{
    const auto slope = derivative(alpha, water);
    std::vector<double> phi(alpha.size(), 0.0);
    for (std::size_t i = 1; i < alpha.size(); ++i) {
        phi[i] = kappa * slope[i] / ((1.0 + kappa) * alpha[i]);
    }
    return phi;
}

} // namespace

CdfRecovery recover_cdf(std::span<const double> alpha, std::span<const double> water, double kappa)
{
    check_kappa(kappa);
    check_samples(alpha, water);
    CdfRecovery out;
    out.phi = raw_phi(alpha, water, kappa);
    double running = 0.0;
    for (double& v : out.phi) {
        if (v < running) {
            v = running;
            ++out.clip_count;
        }
        running = v;
    }
    return out;
}

std::vector<double> recover_density(std::span<const double> alpha, std::span<const double> water,
                                    double kappa, double alpha_min, bool uncorrected)
{
    check_kappa(kappa);
    check_samples(alpha, water);
    if (!(alpha_min > 0.0)) {
        throw ArgumentError("recover_density: alpha_min must be positive");
    }
    const std::size_t n = alpha.size();
    const double h = (alpha[n - 1] - alpha[0]) / static_cast<double>(n - 1);
    const double hi = alpha[n - 1] - 2.0 * h;

    // f = alpha Phi' with Phi = kappa V' / ((1 + kappa) alpha).
    const auto phi = raw_phi(alpha, water, kappa);
    const auto phi_slope = derivative(alpha, phi);
    const double literal = uncorrected ? std::pow((1.0 + kappa) / kappa, 2) : 1.0;
    std::vector<double> f(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i < n; ++i) {
        if (alpha[i] >= alpha_min * (1.0 - 1e-12) && alpha[i] <= hi * (1.0 + 1e-12)) {
            f[i] = literal * alpha[i] * phi_slope[i];
        }
    }
    return f;
}

RecoveryResult recover(const DisplacementCurve& curve, const RecoveryConfig& config)
{
    auto result = solve_fixed_point(curve, config);
    auto cdf = recover_cdf(result.alpha, result.water, curve.kappa());
    result.phi = std::move(cdf.phi);
    result.clip_count = cdf.clip_count;
    if (config.alpha_min > 0.0) {
        result.density = recover_density(result.alpha, result.water, curve.kappa(), config.alpha_min,
                                         config.uncorrected);
    }
    return result;
}

} // namespace tubeflow
