#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace tubeflow {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A bundle of tubes sharing one length: `area` is their total cross-section.
struct Atom {
    double length;
    double area;

    bool operator==(const Atom&) const = default;
};

/// Uniformly distributed tube lengths on [lo, hi) with `density` units of
/// cross-section per unit length.
struct DensityPiece {
    double lo;
    double hi;
    double density;

    bool operator==(const DensityPiece&) const = default;
};

/// Tube-length measure: maps a set of lengths to the total cross-section of
/// tubes whose length falls in it. Finite sum of atoms plus piecewise-constant
/// density, supported in (0, support_sup()].
///
/// All integrals use half-open intervals [a, b): an atom at L belongs to
/// [a, b) iff a <= L < b.
class Measure {
public:
    Measure() = default;
    Measure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

    static Measure single_atom(double length, double area);
    static Measure uniform(double lo, double hi, double density);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<DensityPiece>& pieces() const { return pieces_; }

    bool is_zero() const;
    double support_sup() const;

    Measure operator+(const Measure& other) const;
    bool operator==(const Measure&) const = default;

private:
    std::vector<Atom> atoms_;
    std::vector<DensityPiece> pieces_;
};

/// Viscosity ratio kappa = mu_w / mu_o of the displacing and displaced fluid.
class FluidParams {
public:
    static constexpr double kMaxKappa = 0.999;

    explicit FluidParams(double kappa);
    static FluidParams from_viscosities(double mu_water, double mu_oil, double permeability = 1.0);

    double kappa() const { return kappa_; }
    double permeability() const { return permeability_; }
    double oil_viscosity() const { return mu_oil_; }

private:
    double kappa_;
    double permeability_ = 1.0;
    double mu_oil_ = 1.0;
};

// Throws ArgumentError unless 0 < kappa <= FluidParams::kMaxKappa.
void check_kappa(double kappa);

/// Integral of y^p over [a, b) with p in {-1, 0, 1}. `b` may be infinite.
double moment(const Measure& mu, int p, double a, double b);

/// Integral over [a, inf) of (y - sqrt(y^2 - (1 - kappa^2) alpha^2)) dmu(y).
/// Requires a >= alpha >= 0.
double tail_kernel_integral(const Measure& mu, double alpha, double kappa, double a);

/// Same integral as above with each density piece done by 16-point
/// Gauss-Legendre instead of the closed antiderivative.
double tail_kernel_integral_gauss(const Measure& mu, double alpha, double kappa, double a);

/// Rescaled measure mu'(A) = k mu(k A): atom (L, S) -> (L / k, k S),
/// piece (a, b, rho) -> (a / k, b / k, k^2 rho). Leaves the displacement
/// curve and the pore volume unchanged.
Measure scale(const Measure& mu, double k);

/// Multiplies every atom area and piece density by `factor`.
Measure scale_mass(const Measure& mu, double factor);

struct AtomRanges {
    std::pair<double, double> length{2.5, 10.0};
    std::pair<double, double> area{0.5, 2.0};
};

/// `n` atoms with lengths and areas uniform on the half-open ranges.
/// Deterministic in `seed`.
Measure random_atoms(std::uint64_t seed, int n, const AtomRanges& ranges = {});

} // namespace tubeflow
