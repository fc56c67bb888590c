#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tubeflow/errors.hpp"
#include "tubeflow/quadrature.hpp"

using namespace tubeflow;

TEST_CASE("Gauss-Legendre weights sum to the interval length")
{
    for (int n : {1, 2, 3, 4, 7, 16, 32}) {
        const GaussLegendre rule(n);
        const double sum = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("n-point rule is exact for polynomials of degree 2n - 1")
{
    for (int n : {1, 2, 4, 8}) {
        const GaussLegendre rule(n);
        const int degree = 2 * n - 1;
        const double got = rule.integrate([degree](double x) { return std::pow(x, degree) + std::pow(x, degree - 1); },
                                          0.0, 2.0);
        const double want = std::pow(2.0, degree + 1) / (degree + 1) + std::pow(2.0, degree) / degree;
        CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("16-point rule on a smooth non-polynomial integrand")
{
    const GaussLegendre rule(16);
    CHECK(rule.integrate([](double y) { return 1.0 / y; }, 1.0, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("invalid order is rejected")
{
    CHECK_THROWS_AS(GaussLegendre(0), ArgumentError);
    CHECK_THROWS_AS(GaussLegendre(65), ArgumentError);
}
