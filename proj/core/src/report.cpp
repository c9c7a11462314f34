#include "gptref/report.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gptref/errors.hpp"
#include "gptref/quantum.hpp"

namespace gptref {

namespace {

// Deviation of the spectrum of phi from the multiset {1, alpha x (r-1), 0}.
double spectrum_law_residual(const Matrix& phi, double alpha, int r) {
    const int n = static_cast<int>(phi.rows());
    Eigen::EigenSolver<Matrix> es(phi);
    std::vector<double> re(n);
    double imag_dev = 0.0;
    for (int i = 0; i < n; ++i) {
        re[i] = es.eigenvalues()(i).real();
        imag_dev = std::max(imag_dev, std::abs(es.eigenvalues()(i).imag()));
    }
    std::vector<double> expected;
    expected.push_back(1.0);
    for (int i = 0; i < r - 1; ++i) expected.push_back(alpha);
    for (int i = 0; i < n - r; ++i) expected.push_back(0.0);
    std::sort(re.begin(), re.end());
    std::sort(expected.begin(), expected.end());
    double dev = imag_dev;
    for (int i = 0; i < n; ++i) dev = std::max(dev, std::abs(re[i] - expected[i]));
    return dev;
}

}  // namespace

bool ReportBundle::all_pass() const {
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return true;
}

ReportBundle run_checks(const ReferenceDevice& device, const CheckOptions& options) {
    ReportBundle bundle;
    bundle.space = device.space().describe();
    bundle.n = device.n();
    bundle.r = device.r();
    bundle.unbiased = device.measurement.unbiased();
    bundle.device_alpha = device.alpha;
    bundle.fit = depolarizing_fit(device);

    auto add = [&](const std::string& name, double residual, double threshold) {
        bundle.verdicts.push_back(Verdict{name, residual <= threshold, residual, threshold});
    };

    bundle.verdicts.push_back(Verdict{"device-invariants", options.device_violations.empty(),
                                      static_cast<double>(options.device_violations.size()),
                                      0.0});

    if (device.alpha) {
        add("depolarizing-fit", bundle.fit.residual, tol::kVerify);
        add("alpha-consistency", std::abs(bundle.fit.alpha - *device.alpha),
            1e-6 * std::max(1.0, std::abs(*device.alpha)));
    }

    Rng rng(options.seed);
    std::vector<Vector> samples;
    samples.reserve(options.sample_states);
    for (int i = 0; i < options.sample_states; ++i)
        samples.push_back(device.space().sample_state(rng));

    const bool depolarizing = device.alpha.has_value() || bundle.fit.depolarizing;

    std::vector<std::pair<std::string, BornMatrix>> phis;
    if (device.is_mic()) {
        try {
            phis.emplace_back("mic_inverse", mic_born_matrix(device));
        } catch (const Error&) {
        }
    }
    if (depolarizing) {
        try {
            phis.emplace_back("natural", natural_born_matrix(device));
            phis.emplace_back("simple", simple_born_matrix(device));
            if (bundle.unbiased)
                phis.emplace_back("minimal_frobenius", minimal_frobenius_born_matrix(device));
        } catch (const Error&) {
        }
    }
    phis.emplace_back("minimal_numeric",
                      minimal_born_matrix_numeric(device.self_conditional, 2.0));

    double minimal_norm = -1.0;
    double natural_norm = -1.0;
    double simple_norm = -1.0;
    for (const auto& [label, born] : phis) {
        BornEntry entry;
        entry.provenance = label;
        entry.born_identity_residual = verify_born_identity(device, born.phi);
        entry.protourgleichung_residual =
            depolarizing ? protourgleichung_residual(device, born.phi, samples)
                         : std::numeric_limits<double>::quiet_NaN();
        entry.deformation["p2"] = ltp_deformation(born.phi, 2.0);
        for (double p : options.deformation_ps) {
            const std::string key =
                std::isinf(p) ? "pinf" : "p" + std::to_string(static_cast<int>(p));
            entry.deformation[key] = ltp_deformation(born.phi, p);
        }

        add("born-identity-" + entry.provenance, entry.born_identity_residual, tol::kVerify);
        if (entry.provenance == "natural" || entry.provenance == "simple")
            add("protourgleichung-" + entry.provenance, entry.protourgleichung_residual,
                tol::kVerify);
        if (entry.provenance == "natural" && device.alpha)
            add("spectrum-natural",
                spectrum_law_residual(born.phi, *device.alpha, device.r()), 1e-7);

        if (entry.provenance == "minimal_numeric") minimal_norm = entry.deformation["p2"];
        if (entry.provenance == "natural") natural_norm = entry.deformation["p2"];
        if (entry.provenance == "simple") simple_norm = entry.deformation["p2"];
        bundle.born.push_back(std::move(entry));
    }
    if (minimal_norm >= 0.0 && natural_norm >= 0.0 && simple_norm >= 0.0) {
        const double excess = std::max(
            {0.0, minimal_norm - natural_norm, minimal_norm - simple_norm});
        add("minimizer-dominance", excess, 1e-9);
    }

    try {
        bundle.morpho = weight_morphophoricity_check(device.measurement);
    } catch (const Error&) {
    }
    if (bundle.morpho.is_weight_morphophoric && samples.size() >= 2) {
        std::vector<std::pair<Vector, Vector>> pairs;
        for (size_t i = 0; i + 1 < samples.size(); i += 2)
            pairs.emplace_back(samples[i], samples[i + 1]);
        add("similarity-isometry", similarity_residual(device.measurement, pairs),
            tol::kVerify);
    }

    const SpaceKind kind = device.space().kind();
    const bool quantum_kind =
        kind == SpaceKind::quantum_complex || kind == SpaceKind::quantum_real;
    if (quantum_kind) {
        try {
            auto design = quantum::device_two_design_check(device);
            bundle.design_applicable = true;
            bundle.design_residual = design.residual;
            if (bundle.morpho.is_weight_morphophoric && depolarizing)
                add("two-design", design.residual, tol::kVerify);
        } catch (const Error&) {
            bundle.design_applicable = false;
        }
    }
    if (kind == SpaceKind::quantum_complex && depolarizing && bundle.fit.cp_bounds_ok) {
        const double d = device.space().param();
        const double beta = 1.0 / bundle.fit.alpha;
        const double outside =
            std::max({0.0, -1.0 / (d * d - 1.0) - beta, beta - 1.0});
        add("cp-bounds", outside, 1e-9);
    }

    if (options.vectorized_identity && quantum_kind && !phis.empty()) {
        bundle.vectorized_identity_applicable = true;
        bundle.vectorized_identity_residual =
            quantum::vectorized_born_identity_residual(device, phis.front().second.phi);
        add("vectorized-born-identity", bundle.vectorized_identity_residual, tol::kVerify);
    }

    return bundle;
}

}  // namespace gptref
