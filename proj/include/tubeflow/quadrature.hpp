#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "tubeflow/errors.hpp"

namespace tubeflow {

// Gauss-Legendre rule on [-1, 1]. Nodes come from Newton iteration on P_n
// started at the Chebyshev-like guess cos(pi (i + 3/4) / (n + 1/2)).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int order)
    {
        if (order < 1 || order > 64) {
            throw ArgumentError("GaussLegendre: order must be in [1, 64]");
        }
        const int n = order;
        nodes.resize(n);
        weights.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) {
                    break;
                }
            }
            if (n == 1) {
                x = 0.0;
                dp = 1.0;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
    }

    int order() const { return static_cast<int>(nodes.size()); }

    // Integral of f over [a, b].
    template <typename F>
    double integrate(F&& f, double a, double b) const
    {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            sum += weights[i] * f(mid + half * nodes[i]);
        }
        return sum * half;
    }
};

} // namespace tubeflow
