#pragma once

#include <span>
#include <vector>

#include "tubeflow/measure.hpp"

namespace tubeflow {

/// Finite set of parallel tubes, kept sorted by strictly increasing length.
/// Tubes of equal length are merged into one with the summed cross-section.
class TubeSystem {
public:
    explicit TubeSystem(std::vector<Atom> tubes);

    const std::vector<Atom>& tubes() const { return tubes_; }
    std::size_t size() const { return tubes_.size(); }
    double pore_volume() const;
    Measure to_measure() const;

private:
    std::vector<Atom> tubes_;
};

/// Piecewise-constant drive c(t) = k dp(t) / mu_o. c_values[i] holds on
/// [breakpoints[i], breakpoints[i + 1]), the last value holds forever.
/// F(t), the integral of c, is piecewise linear.
class PumpHistory {
public:
    PumpHistory(std::vector<double> breakpoints, std::vector<double> c_values);

    static PumpHistory constant(double c);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& c_values() const { return c_values_; }

    double pumped(double t) const;

    // Earliest t with F(t) >= value; +inf when F never reaches it.
    double time_to_pump(double value) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> c_values_;
    std::vector<double> cumulative_;
};

struct TubeSimResult {
    std::vector<double> times;
    std::vector<double> pumped;
    // positions[j][i] is the front of tube j at times[i].
    std::vector<std::vector<double>> positions;
    std::vector<double> water;
    std::vector<double> oil;
    std::vector<double> breakthrough_times;
};

/// Water/oil front distance from the inlet once F units per area were pumped.
double interface_position(double length, double kappa, double pumped);

/// Pumped volume per area at which the front reaches the outlet.
double breakthrough_threshold(double length, double kappa);

TubeSimResult simulate(const TubeSystem& system, double kappa, const PumpHistory& pump,
                       std::span<const double> t_grid);

/// Continuum parameter alpha matching time t: sqrt(2 F(t) / (1 + kappa)).
double reparam_xi(const PumpHistory& pump, double kappa, double t);

} // namespace tubeflow
