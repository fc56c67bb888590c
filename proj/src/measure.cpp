#include "tubeflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tubeflow/errors.hpp"
#include "tubeflow/quadrature.hpp"

namespace tubeflow {

Measure::Measure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces))
{
    for (const auto& atom : atoms_) {
        if (!(atom.length > 0.0) || !std::isfinite(atom.length)) {
            throw ArgumentError("Measure: atom length must be positive and finite, got " +
                                std::to_string(atom.length));
        }
        if (!(atom.area > 0.0) || !std::isfinite(atom.area)) {
            throw ArgumentError("Measure: atom area must be positive and finite, got " +
                                std::to_string(atom.area));
        }
    }
    for (const auto& piece : pieces_) {
        if (!(piece.lo > 0.0) || !(piece.lo < piece.hi) || !std::isfinite(piece.hi)) {
            throw ArgumentError("Measure: density piece needs 0 < lo < hi < inf");
        }
        if (!(piece.density >= 0.0) || !std::isfinite(piece.density)) {
            throw ArgumentError("Measure: density must be nonnegative and finite");
        }
    }
}

Measure Measure::single_atom(double length, double area)
{
    return Measure({{length, area}}, {});
}

Measure Measure::uniform(double lo, double hi, double density)
{
    return Measure({}, {{lo, hi, density}});
}

bool Measure::is_zero() const
{
    return atoms_.empty() &&
           std::all_of(pieces_.begin(), pieces_.end(),
                       [](const DensityPiece& p) { return p.density == 0.0; });
}

double Measure::support_sup() const
{
    double sup = 0.0;
    for (const auto& atom : atoms_) {
        sup = std::max(sup, atom.length);
    }
    for (const auto& piece : pieces_) {
        if (piece.density > 0.0) {
            sup = std::max(sup, piece.hi);
        }
    }
    return sup;
}

Measure Measure::operator+(const Measure& other) const
{
    auto atoms = atoms_;
    atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
    auto pieces = pieces_;
    pieces.insert(pieces.end(), other.pieces_.begin(), other.pieces_.end());
    return Measure(std::move(atoms), std::move(pieces));
}

FluidParams::FluidParams(double kappa) : kappa_(kappa)
{
    check_kappa(kappa);
}

FluidParams FluidParams::from_viscosities(double mu_water, double mu_oil, double permeability)
{
    if (!(mu_water > 0.0) || !(mu_oil > 0.0) || !(permeability > 0.0)) {
        throw ArgumentError("FluidParams: viscosities and permeability must be positive");
    }
    FluidParams params(mu_water / mu_oil);
    params.permeability_ = permeability;
    params.mu_oil_ = mu_oil;
    return params;
}

void check_kappa(double kappa)
{
    if (!(kappa > 0.0) || !(kappa <= FluidParams::kMaxKappa)) {
        throw ArgumentError("kappa must lie in (0, " + std::to_string(FluidParams::kMaxKappa) +
                            "], got " + std::to_string(kappa));
    }
}

double moment(const Measure& mu, int p, double a, double b)
{
    if (p < -1 || p > 1) {
        throw ArgumentError("moment: exponent must be -1, 0 or 1, got " + std::to_string(p));
    }
    if (!(a >= 0.0) || !(a <= b)) {
        throw ArgumentError("moment: need 0 <= a <= b");
    }
    double sum = 0.0;
    for (const auto& atom : mu.atoms()) {
        if (atom.length >= a && atom.length < b) {
            switch (p) {
            case -1: sum += atom.area / atom.length; break;
            case 0: sum += atom.area; break;
            default: sum += atom.area * atom.length; break;
            }
        }
    }
    for (const auto& piece : mu.pieces()) {
        const double lo = std::max(a, piece.lo);
        const double hi = std::min(b, piece.hi);
        if (!(lo < hi)) {
            continue;
        }
        switch (p) {
        case -1: sum += piece.density * std::log(hi / lo); break;
        case 0: sum += piece.density * (hi - lo); break;
        default: sum += piece.density * 0.5 * (hi - lo) * (hi + lo); break;
        }
    }
    return sum;
}

namespace {

void check_tail_args(double alpha, double kappa, double a)
{
    check_kappa(kappa);
    if (!(alpha >= 0.0) || !(a >= alpha)) {
        throw ArgumentError("tail_kernel_integral: need a >= alpha >= 0");
    }
}

// y - sqrt(y^2 - c) written without cancellation.
double tail_kernel(double y, double c)
{
    return c / (y + std::sqrt(y * y - c));
}

} // namespace

double tail_kernel_integral(const Measure& mu, double alpha, double kappa, double a)
{
    check_tail_args(alpha, kappa, a);
    const double c = (1.0 - kappa * kappa) * alpha * alpha;
    if (c == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& atom : mu.atoms()) {
        if (atom.length >= a) {
            sum += atom.area * tail_kernel(atom.length, c);
        }
    }
    // Antiderivative of y - sqrt(y^2 - c) is (c / 2) [y / (y + s) + ln(y + s)],
    // s = sqrt(y^2 - c).
    for (const auto& piece : mu.pieces()) {
        const double lo = std::max(a, piece.lo);
        const double hi = piece.hi;
        if (!(lo < hi) || piece.density == 0.0) {
            continue;
        }
        const double s_hi = std::sqrt(hi * hi - c);
        const double s_lo = std::sqrt(lo * lo - c);
        const double value = 0.5 * c *
                             (hi / (hi + s_hi) - lo / (lo + s_lo) + std::log((hi + s_hi) / (lo + s_lo)));
        sum += piece.density * value;
    }
    return sum;
}

double tail_kernel_integral_gauss(const Measure& mu, double alpha, double kappa, double a)
{
    check_tail_args(alpha, kappa, a);
    const double c = (1.0 - kappa * kappa) * alpha * alpha;
    if (c == 0.0) {
        return 0.0;
    }
    static const GaussLegendre rule(16);
    double sum = 0.0;
    for (const auto& atom : mu.atoms()) {
        if (atom.length >= a) {
            sum += atom.area * tail_kernel(atom.length, c);
        }
    }
    for (const auto& piece : mu.pieces()) {
        const double lo = std::max(a, piece.lo);
        if (!(lo < piece.hi)) {
            continue;
        }
        sum += piece.density * rule.integrate([c](double y) { return tail_kernel(y, c); }, lo, piece.hi);
    }
    return sum;
}

Measure scale(const Measure& mu, double k)
{
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw ArgumentError("scale: factor must be positive, got " + std::to_string(k));
    }
    std::vector<Atom> atoms;
    atoms.reserve(mu.atoms().size());
    for (const auto& atom : mu.atoms()) {
        atoms.push_back({atom.length / k, k * atom.area});
    }
    std::vector<DensityPiece> pieces;
    pieces.reserve(mu.pieces().size());
    for (const auto& piece : mu.pieces()) {
        pieces.push_back({piece.lo / k, piece.hi / k, k * k * piece.density});
    }
    return Measure(std::move(atoms), std::move(pieces));
}

Measure scale_mass(const Measure& mu, double factor)
{
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw ArgumentError("scale_mass: factor must be positive");
    }
    auto atoms = mu.atoms();
    for (auto& atom : atoms) {
        atom.area *= factor;
    }
    auto pieces = mu.pieces();
    for (auto& piece : pieces) {
        piece.density *= factor;
    }
    return Measure(std::move(atoms), std::move(pieces));
}

Measure random_atoms(std::uint64_t seed, int n, const AtomRanges& ranges)
{
    if (n < 1) {
        throw ArgumentError("random_atoms: need at least one atom");
    }
    const auto [l_lo, l_hi] = ranges.length;
    const auto [s_lo, s_hi] = ranges.area;
    if (!(l_lo > 0.0 && l_lo < l_hi) || !(s_lo > 0.0 && s_lo < s_hi)) {
        throw ArgumentError("random_atoms: ranges must be nonempty and positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> length_dist(l_lo, l_hi);
    std::uniform_real_distribution<double> area_dist(s_lo, s_hi);
    // uniform_real_distribution may round up to the upper bound.
    auto half_open = [](double v, double lo, double hi) {
        return v < hi ? v : std::nextafter(hi, lo);
    };
    std::vector<Atom> atoms;
    atoms.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double length = half_open(length_dist(rng), l_lo, l_hi);
        const double area = half_open(area_dist(rng), s_lo, s_hi);
        atoms.push_back({length, area});
    }
    return Measure(std::move(atoms), {});
}

} // namespace tubeflow
