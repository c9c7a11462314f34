#include "gptref/json_io.hpp"

#include <cmath>
#include <fstream>

#include "gptref/errors.hpp"

namespace gptref {

double round_sig(double x, int digits) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(x))));
    const double mag = std::pow(10.0, digits - 1 - exponent);
    return std::round(x * mag) / mag;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(round_sig(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw Error("expected a row-major array of arrays of doubles");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw Error("ragged matrix rows");
        for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(round_sig(v(i)));
    return out;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw Error("expected an array of doubles");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

json space_to_json(const GptSpace& space) {
    json j;
    j["kind"] = to_string(space.kind());
    switch (space.kind()) {
        case SpaceKind::classical: j["m"] = space.param(); break;
        case SpaceKind::quantum_complex:
        case SpaceKind::quantum_real: j["d"] = space.param(); break;
        case SpaceKind::ball: j["k"] = space.param(); break;
        case SpaceKind::square: break;
        case SpaceKind::custom: throw Error("custom spaces cannot be serialized");
    }
    return j;
}

GptSpace space_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    auto param = [&](const char* key) {
        if (j.contains(key)) return j.at(key).get<int>();
        if (j.contains("param")) return j.at("param").get<int>();
        throw Error(std::string("space descriptor missing \"") + key + "\"");
    };
    if (kind == "classical") return GptSpace::classical(param("m"));
    if (kind == "quantum_complex") return GptSpace::quantum_complex(param("d"));
    if (kind == "quantum_real") return GptSpace::quantum_real(param("d"));
    if (kind == "square") return GptSpace::square();
    if (kind == "ball") return GptSpace::ball(param("k"));
    throw Error("unknown space kind \"" + kind + "\"");
}

json device_to_json(const ReferenceDevice& device) {
    json j;
    j["space"] = space_to_json(device.space());
    j["effects"] = matrix_to_json(device.measurement.E);
    j["states"] = matrix_to_json(device.states.S);
    if (device.alpha) j["alpha"] = round_sig(*device.alpha);
    return j;
}

DeviceFile device_from_json_lenient(const json& j) {
    GptSpace space = space_from_json(j.at("space"));
    const int r = space.dim();
    Matrix E = matrix_from_json(j.at("effects"));
    if (E.cols() != r) throw DimensionMismatch("effect rows must have the space dimension");
    const int n = static_cast<int>(E.rows());
    if (n < 1 || r < 2) throw DimensionMismatch("degenerate device file");

    ReferenceMeasurement m{space, E, E.col(0), E.rightCols(r - 1)};
    std::optional<double> alpha;
    if (j.contains("alpha")) alpha = j.at("alpha").get<double>();

    if (!j.contains("states")) {
        // Measurement-only file: build the canonical depolarizing states.
        ReferenceDevice device =
            construct_depolarizing_states(decompose_measurement(space, E));
        return DeviceFile{std::move(device), {}};
    }

    Matrix S = matrix_from_json(j.at("states"));
    if (S.rows() != r || S.cols() != n)
        throw DimensionMismatch("state matrix must be r x n");
    ReferenceStates states{S, S.bottomRows(r - 1)};
    std::vector<std::string> violations = device_violations(m, states, alpha);

    ReferenceDevice device{std::move(m), std::move(states), alpha, {}, {}};
    device.channel = device.states.S * device.measurement.E;
    device.self_conditional = device.measurement.E * device.states.S;
    return DeviceFile{std::move(device), std::move(violations)};
}

ReferenceDevice device_from_json(const json& j) {
    DeviceFile file = device_from_json_lenient(j);
    if (!file.violations.empty()) {
        std::string what = "device file violates invariants:";
        for (const auto& v : file.violations) what += " " + v;
        throw DeviceValidationError(what, file.violations);
    }
    return std::move(file.device);
}

json born_to_json(const BornMatrix& born, double born_identity_residual,
                  double protour_residual, double deformation_p2) {
    json j;
    j["phi"] = matrix_to_json(born.phi);
    j["provenance"] = to_string(born.provenance);
    j["residuals"] = {{"born_identity", round_sig(born_identity_residual)},
                      {"protourgleichung", round_sig(protour_residual)}};
    j["deformation"] = {{"p2", round_sig(deformation_p2)}};
    return j;
}

json morpho_to_json(const MorphoReport& report) {
    return json{{"is_weight_morphophoric", report.is_weight_morphophoric},
                {"alpha_c_product", round_sig(report.alpha_c_product)},
                {"is_morphophoric", report.is_morphophoric},
                {"similarity_ratio", round_sig(report.similarity_ratio)},
                {"residual", round_sig(report.residual)}};
}

json design_to_json(const quantum::DesignReport& report) {
    return json{{"t", report.t},
                {"residual", round_sig(report.residual)},
                {"certified", report.certified}};
}

json report_to_json(const ReportBundle& bundle) {
    json j;
    j["device"] = {{"space", bundle.space},
                   {"n", bundle.n},
                   {"r", bundle.r},
                   {"unbiased", bundle.unbiased}};
    if (bundle.device_alpha)
        j["device"]["alpha"] = round_sig(*bundle.device_alpha);
    j["depolarizing"] = {{"alpha", round_sig(bundle.fit.alpha)},
                         {"residual", round_sig(bundle.fit.residual)},
                         {"classified", bundle.fit.depolarizing}};
    if (bundle.fit.cp_bounds_ok) j["depolarizing"]["cp_bounds_ok"] = *bundle.fit.cp_bounds_ok;
    json born = json::object();
    for (const auto& entry : bundle.born) {
        json e;
        e["born_identity"] = round_sig(entry.born_identity_residual);
        if (std::isfinite(entry.protourgleichung_residual))
            e["protourgleichung"] = round_sig(entry.protourgleichung_residual);
        json def = json::object();
        for (const auto& [key, value] : entry.deformation) def[key] = round_sig(value);
        e["deformation"] = std::move(def);
        born[entry.provenance] = std::move(e);
    }
    j["born_matrices"] = std::move(born);
    j["morpho"] = morpho_to_json(bundle.morpho);
    if (bundle.design_applicable)
        j["design"] = {{"t", 2}, {"residual", round_sig(bundle.design_residual)}};
    if (bundle.vectorized_identity_applicable)
        j["vectorized_identity"] = {{"residual", round_sig(bundle.vectorized_identity_residual)}};
    json verdicts = json::array();
    for (const auto& v : bundle.verdicts) {
        verdicts.push_back(json{{"name", v.name},
                                {"pass", v.pass},
                                {"residual", round_sig(v.residual)},
                                {"threshold", v.threshold}});
    }
    j["verdicts"] = std::move(verdicts);
    j["all_pass"] = bundle.all_pass();
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw Error("cannot parse " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace gptref
