#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tubeflow/forward.hpp"
#include "tubeflow/measure.hpp"
#include "tubeflow/tubes.hpp"

namespace tubeflow::io {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);

/// {"atoms": [{"L": .., "S": ..}], "pieces": [{"a": .., "b": .., "rho": ..}]};
/// both arrays optional.
Measure measure_from_json(const Json& config);
Json measure_to_json(const Measure& mu);

/// {"tubes": [{"L": .., "S": ..}]}
TubeSystem tubes_from_json(const Json& config);
/// {"breakpoints": [..], "c": [..]}
PumpHistory pump_from_json(const Json& config);

/// Shortest decimal string that reads back to the same double; NaN -> "".
std::string format_number(double value);

/// Writes a header line and comma-separated rows.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
    std::size_t columns_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // empty cells read as NaN

    // Index of the first header matching any of `names`; throws if none.
    std::size_t column(std::initializer_list<std::string_view> names) const;
    std::vector<double> values(std::size_t column) const;
};

CsvTable read_csv(std::istream& in);

/// Curve from a CSV with a total-volume column ("total") and a water column
/// ("water" or "Vw"). Re-validates every curve invariant.
DisplacementCurve read_curve_csv(std::istream& in, double alpha_max, double kappa);

} // namespace tubeflow::io
