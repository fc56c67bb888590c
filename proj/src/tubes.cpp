#include "tubeflow/tubes.hpp"

#include <algorithm>
#include <cmath>

#include "tubeflow/errors.hpp"

namespace tubeflow {

TubeSystem::TubeSystem(std::vector<Atom> tubes)
{
    if (tubes.empty()) {
        throw ArgumentError("TubeSystem: need at least one tube");
    }
    // Measure's constructor validates positivity.
    (void)Measure(tubes, {});
    std::sort(tubes.begin(), tubes.end(),
              [](const Atom& x, const Atom& y) { return x.length < y.length; });
    for (const auto& tube : tubes) {
        if (!tubes_.empty() && tubes_.back().length == tube.length) {
            tubes_.back().area += tube.area;
        } else {
            tubes_.push_back(tube);
        }
    }
}

double TubeSystem::pore_volume() const
{
    double sum = 0.0;
    for (const auto& tube : tubes_) {
        sum += tube.area * tube.length;
    }
    return sum;
}

Measure TubeSystem::to_measure() const
{
    return Measure(tubes_, {});
}

PumpHistory::PumpHistory(std::vector<double> breakpoints, std::vector<double> c_values)
    : breakpoints_(std::move(breakpoints)), c_values_(std::move(c_values))
{
    if (breakpoints_.empty() || breakpoints_.size() != c_values_.size()) {
        throw ArgumentError("PumpHistory: need one c value per breakpoint");
    }
    if (breakpoints_.front() != 0.0) {
        throw ArgumentError("PumpHistory: first breakpoint must be t = 0");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1]) || !std::isfinite(breakpoints_[i])) {
            throw ArgumentError("PumpHistory: breakpoints must be strictly increasing");
        }
    }
    for (double c : c_values_) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw ArgumentError("PumpHistory: drive values must be nonnegative");
        }
    }
    cumulative_.resize(breakpoints_.size());
    cumulative_[0] = 0.0;
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        cumulative_[i] = cumulative_[i - 1] + c_values_[i - 1] * (breakpoints_[i] - breakpoints_[i - 1]);
    }
}

PumpHistory PumpHistory::constant(double c)
{
    return PumpHistory({0.0}, {c});
}

double PumpHistory::pumped(double t) const
{
    if (t <= 0.0) {
        return 0.0;
    }
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return cumulative_[i] + c_values_[i] * (t - breakpoints_[i]);
}

double PumpHistory::time_to_pump(double value) const
{
    if (value <= 0.0) {
        return 0.0;
    }
    // First segment whose end value reaches `value`.
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
        if (cumulative_[i + 1] >= value) {
            return breakpoints_[i] + (value - cumulative_[i]) / c_values_[i];
        }
    }
    const std::size_t last = breakpoints_.size() - 1;
    if (c_values_[last] == 0.0) {
        return kInfinity;
    }
    return breakpoints_[last] + (value - cumulative_[last]) / c_values_[last];
}

double breakthrough_threshold(double length, double kappa)
{
    if (!(length > 0.0)) {
        throw ArgumentError("breakthrough_threshold: length must be positive");
    }
    return 0.5 * (1.0 + kappa) * length * length;
}

double interface_position(double length, double kappa, double pumped)
{
    check_kappa(kappa);
    if (pumped <= 0.0) {
        return 0.0;
    }
    if (pumped >= breakthrough_threshold(length, kappa)) {
        return length;
    }
    // (L - sqrt(L^2 - 2 (1 - k) F)) / (1 - k), rationalised.
    const double root = std::sqrt(length * length - 2.0 * (1.0 - kappa) * pumped);
    return std::clamp(2.0 * pumped / (length + root), 0.0, length);
}

TubeSimResult simulate(const TubeSystem& system, double kappa, const PumpHistory& pump,
                       std::span<const double> t_grid)
{
    check_kappa(kappa);
    if (t_grid.empty() || t_grid.front() != 0.0) {
        throw ArgumentError("simulate: time grid must start at 0");
    }
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
        throw ArgumentError("simulate: time grid must be sorted");
    }
    const auto& tubes = system.tubes();
    TubeSimResult out;
    out.times.assign(t_grid.begin(), t_grid.end());
    out.positions.assign(tubes.size(), std::vector<double>(t_grid.size()));
    out.pumped.resize(t_grid.size());
    out.water.resize(t_grid.size());
    out.oil.resize(t_grid.size());

    std::vector<double> thresholds(tubes.size());
    for (std::size_t j = 0; j < tubes.size(); ++j) {
        thresholds[j] = breakthrough_threshold(tubes[j].length, kappa);
        out.breakthrough_times.push_back(pump.time_to_pump(thresholds[j]));
    }

    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double pumped = pump.pumped(t_grid[i]);
        out.pumped[i] = pumped;
        double oil = 0.0;
        double water = 0.0;
        for (std::size_t j = 0; j < tubes.size(); ++j) {
            const double l = interface_position(tubes[j].length, kappa, pumped);
            out.positions[j][i] = l;
            oil += l * tubes[j].area;
            // Broken-through tubes carry water at rate c S / (kappa L).
            if (pumped > thresholds[j]) {
                water += (pumped - thresholds[j]) / kappa * tubes[j].area / tubes[j].length;
            }
        }
        out.oil[i] = oil;
        out.water[i] = water;
    }
    return out;
}

double reparam_xi(const PumpHistory& pump, double kappa, double t)
{
    check_kappa(kappa);
    return std::sqrt(2.0 * pump.pumped(t) / (1.0 + kappa));
}

} // namespace tubeflow
