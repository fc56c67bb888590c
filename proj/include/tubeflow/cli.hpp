#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "tubeflow/inverse.hpp"
#include "tubeflow/measure.hpp"

namespace tubeflow {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kNoConvergence = 3;
inline constexpr int kInvariantFailure = 4;
} // namespace exit_code

struct RoundtripOptions {
    int n_samples = 5001;
    RecoveryConfig recovery{};
    // Density comparison window; NaN means [alpha_min, alpha_max - 2h].
    double window_lo = std::numeric_limits<double>::quiet_NaN();
    double window_hi = std::numeric_limits<double>::quiet_NaN();
};

struct RoundtripReport {
    double v_max = 0.0;
    double v_error = 0.0;        // sup |V - V_w| on the grid
    double phi_total = 0.0;      // true Phi(alpha_max)
    double phi_error = 0.0;      // sup |Phi - Phi_true| on the grid
    double density_error = std::numeric_limits<double>::quiet_NaN();  // pieces-only measures
    double window_lo = 0.0;
    double window_hi = 0.0;
    // Largest distance, in grid cells, between an atom and the node where the
    // recovered Phi has climbed half of that atom's jump.
    double atom_offset_cells = 0.0;
    RecoveryResult recovery;
};

/// forward -> invert -> compare against the measure's own Phi and density.
RoundtripReport pipeline_roundtrip(const Measure& mu, double kappa, double alpha_max,
                                   const RoundtripOptions& options = {});

/// Command-line entry point. `args` excludes the program name. Artifacts go
/// to files named by --out (or `out`), the one-line JSON summary to `out`
/// when an artifact file was written and to `err` otherwise; failures print
/// a JSON error object on `err`. Returns one of exit_code::*.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tubeflow
