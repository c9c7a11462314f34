#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "gptref/born.hpp"
#include "gptref/device.hpp"
#include "gptref/quantum.hpp"
#include "gptref/report.hpp"

namespace gptref {

using json = nlohmann::json;

/// Rounds to the given number of significant decimal digits; all numeric
/// output goes through this so emitted JSON is reproducible byte for byte.
double round_sig(double x, int digits = 12);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

json space_to_json(const GptSpace& space);
GptSpace space_from_json(const json& j);

/// {"space": descriptor, "effects": [[...]], "states": [[...]], "alpha": a};
/// states and alpha are optional; matrices are row-major arrays of doubles.
json device_to_json(const ReferenceDevice& device);

/// Strict reader: validates every invariant and throws DeviceValidationError
/// naming each failure.
ReferenceDevice device_from_json(const json& j);

struct DeviceFile {
    ReferenceDevice device;
    std::vector<std::string> violations;  // empty for a valid file
};

/// Lenient reader used by the checker: parse errors and shape mismatches
/// still throw, but invariant violations are collected and returned so the
/// verification battery can report them as failing verdicts.
DeviceFile device_from_json_lenient(const json& j);

json born_to_json(const BornMatrix& born, double born_identity_residual,
                  double protour_residual, double deformation_p2);
json morpho_to_json(const MorphoReport& report);
json design_to_json(const quantum::DesignReport& report);
json report_to_json(const ReportBundle& bundle);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace gptref
