#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tubeflow/forward.hpp"

namespace tubeflow {

struct RecoveryConfig {
    int n_grid = 1001;
    // Absolute stopping tolerance on the sup-norm step; defaults to
    // tol_relative * v_max.
    std::optional<double> tol;
    double tol_relative = 1e-10;
    int max_iter = 200;
    // Lower edge of the density reporting window; 0 disables density output.
    double alpha_min = 0.0;
    int quad_order = 4;
    // Constant starting iterate.
    double initial_value = 0.0;
    // Use the uncorrected endpoint slope and density prefactor.
    bool uncorrected = false;

    void validate(double alpha_max) const;
};

struct RecoveryResult {
    std::vector<double> alpha;
    std::vector<double> water;  // recovered V_w on the grid
    int iterations = 0;
    bool converged = false;
    double tol = 0.0;
    double last_step = 0.0;
    double observed_ratio = 0.0;
    double contraction_bound = 0.0;  // (1 - k) / (1 + k)
    double error_bound = 0.0;        // q / (1 - q) * last_step
    double residual = 0.0;           // sup |V - G(h + T V)|
    std::vector<double> phi;         // recovered integral of dmu / y over [0, alpha)
    std::vector<double> density;     // NaN outside the reporting window
    int clip_count = 0;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, RecoveryResult partial)
        : std::runtime_error(what), partial_(std::move(partial))
    {
    }
    const RecoveryResult& partial() const { return partial_; }

private:
    RecoveryResult partial_;
};

/// Uniform grid of n points on [0, alpha_max].
std::vector<double> uniform_grid(double alpha_max, int n);

/// Kernel of the integral operator, defined for 0 <= alpha <= y.
double kernel_k(double y, double alpha, double kappa);

/// The operator (T V)(alpha) = integral over [alpha, alpha_max] of
/// K(y, alpha) V(y) dy, discretised on a uniform grid for piecewise-linear V.
///
/// Each grid cell is split into panels no wider than a tenth of the cell's
/// left end (K varies on the scale of y) and each panel uses a Gauss-Legendre
/// rule. The result is a packed upper-triangular weight matrix, so apply() is
/// an exact linear map on grid values.
class KernelOperator {
public:
    KernelOperator(std::vector<double> grid, double kappa, int quad_order = 4);

    const std::vector<double>& grid() const { return grid_; }
    double kappa() const { return kappa_; }

    std::vector<double> apply(std::span<const double> values) const;
    void apply(std::span<const double> values, std::span<double> out) const;

    // Sup over rows of the absolute row sum: the discrete operator norm.
    double norm() const;

private:
    std::size_t row_offset(std::size_t i) const;

    std::vector<double> grid_;
    double kappa_;
    std::vector<double> weights_;
};

/// One-shot T V on the uniform grid of values.size() points over [0, alpha_max].
std::vector<double> apply_t(std::span<const double> values, double kappa, double alpha_max,
                            int quad_order = 4);

/// Known part h(alpha) of the fixed-point equation, built from the endpoint
/// volumes V_w(alpha_max), V_o(alpha_max).
double h_of_alpha(double water_max, double oil_max, double kappa, double alpha_max, double alpha,
                  bool uncorrected = false);

/// Iterates V <- G(h + T V) to the unique fixed point. Fills the V part of
/// the result; throws ConvergenceError when max_iter is exhausted.
RecoveryResult solve_fixed_point(const DisplacementCurve& curve, const RecoveryConfig& config = {});

struct CdfRecovery {
    std::vector<double> phi;
    int clip_count = 0;
};

/// Phi(alpha) = kappa V'(alpha) / ((1 + kappa) alpha), forced nondecreasing.
CdfRecovery recover_cdf(std::span<const double> alpha, std::span<const double> water, double kappa);

/// Density f(alpha) = kappa / (1 + kappa) alpha (V' / alpha)' on
/// [alpha_min, alpha_max - 2h]; NaN elsewhere.
std::vector<double> recover_density(std::span<const double> alpha, std::span<const double> water,
                                    double kappa, double alpha_min, bool uncorrected = false);

/// solve_fixed_point followed by recover_cdf and, when alpha_min > 0,
/// recover_density.
RecoveryResult recover(const DisplacementCurve& curve, const RecoveryConfig& config = {});

} // namespace tubeflow
