#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gptref/born.hpp"
#include "gptref/device.hpp"
#include "gptref/morpho.hpp"

namespace gptref {

struct Verdict {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double threshold = 0.0;
};

struct BornEntry {
    std::string provenance;
    double born_identity_residual = 0.0;
    double protourgleichung_residual = 0.0;
    std::map<std::string, double> deformation;  // "p2" always, extras on request
};

struct ReportBundle {
    std::string space;
    int n = 0;
    int r = 0;
    bool unbiased = false;
    std::optional<double> device_alpha;
    DepolarizingFit fit;
    std::vector<BornEntry> born;
    MorphoReport morpho;
    bool design_applicable = false;
    double design_residual = 0.0;
    bool vectorized_identity_applicable = false;
    double vectorized_identity_residual = 0.0;
    std::vector<Verdict> verdicts;

    bool all_pass() const;
};

struct CheckOptions {
    std::uint64_t seed = 1;                      // sample states for affinity residuals
    int sample_states = 25;
    std::vector<double> deformation_ps;          // extra Schatten p values
    bool vectorized_identity = false;            // quantum devices only
    std::vector<std::string> device_violations;  // folded into a device-invariants verdict
};

/// Runs the full verification battery on a device; every verdict records
/// the residual and threshold it was decided on.
ReportBundle run_checks(const ReferenceDevice& device, const CheckOptions& options = {});

}  // namespace gptref
