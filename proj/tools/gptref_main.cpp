#include <CLI11.hpp>
#include <Eigen/SVD>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "gptref/born.hpp"
#include "gptref/device.hpp"
#include "gptref/errors.hpp"
#include "gptref/json_io.hpp"
#include "gptref/morpho.hpp"
#include "gptref/quantum.hpp"
#include "gptref/report.hpp"

using namespace gptref;

namespace {

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = {
        "sic-d2",      "sic-d3",      "pauli6-d2",          "real-sic-d2",
        "real-sic-d3", "classical3-identity", "classical4-split6"};
    return names;
}

ReferenceDevice fixture_device(const std::string& name) {
    if (name == "sic-d2") return quantum::sic_d2();
    if (name == "sic-d3") return quantum::wh_sic(3);
    if (name == "pauli6-d2") return quantum::pauli6_d2();
    if (name == "real-sic-d2") return quantum::real_sic_d2();
    if (name == "real-sic-d3") return quantum::real_sic_d3();
    if (name == "classical3-identity") return classical_identity_device(3);
    if (name == "classical4-split6") return classical_split_identity_device(4, 6, 11);
    throw Error("unknown fixture \"" + name + "\"; try `gptref fixtures list`");
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out_path, j);
}

double parse_schatten(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF")
        return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

// Random rows annihilating both Zt and w, scaled relative to the
// pseudoinverse so the correction is a visible fraction of the default
// left inverse.
Matrix make_nullspace_corrector(const ReferenceMeasurement& m, std::uint64_t seed,
                                double scale) {
    const int n = m.n();
    const int r = m.r();
    if (n <= r) throw Error("nullspace correctors need an overcomplete measurement (n > r)");
    Matrix A(n, r);
    A.leftCols(r - 1) = m.Zt;
    A.col(r - 1) = m.w;
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > svd.singularValues()(0) * 1e-10) ++rank;
    Matrix uperp = svd.matrixU().rightCols(n - rank);

    Rng rng(seed);
    Matrix coefficients(r - 1, n - rank);
    for (int i = 0; i < coefficients.rows(); ++i)
        for (int j = 0; j < coefficients.cols(); ++j) coefficients(i, j) = rng.normal();
    Matrix k = coefficients * uperp.transpose();
    Matrix pinv = m.Zt.completeOrthogonalDecomposition().pseudoInverse();
    if (k.norm() > 0) k *= scale * pinv.norm() / k.norm();
    return k;
}

struct BuildArgs {
    std::string fixture;
    std::string space_json;
    std::string measurement_file;
    std::string sign = "+";
    std::string output;
    int random_ic = 0;
    std::uint64_t seed = 0;
    std::uint64_t nullspace_seed = 0;
    double nullspace_scale = 0.5;
    bool identity = false;
    bool unbiased = false;
    bool parallel = false;
};

int run_build(const BuildArgs& args, bool seed_given, bool nullspace_given) {
    ReferenceDevice device = [&] {
        if (!args.fixture.empty()) return fixture_device(args.fixture);
        if (args.space_json.empty())
            throw Error("either --fixture or --space must be given");
        GptSpace space = space_from_json(json::parse(args.space_json));

        if (args.identity) {
            if (space.kind() != SpaceKind::classical)
                throw Error("--identity applies to classical spaces");
            return classical_identity_device(space.param());
        }

        ReferenceMeasurement measurement = [&] {
            if (args.random_ic > 0) {
                if (!seed_given)
                    throw Error("--seed is required with --random-ic; seeds are mandatory "
                                "for randomized builds");
                return args.unbiased
                           ? random_ic_measurement_unbiased(space, args.random_ic, args.seed)
                           : random_ic_measurement(space, args.random_ic, args.seed);
            }
            if (!args.measurement_file.empty()) {
                json j = read_json_file(args.measurement_file);
                Matrix effects =
                    matrix_from_json(j.is_object() ? j.at("effects") : j);
                return decompose_measurement(space, effects);
            }
            throw Error("give one of --identity, --random-ic or --measurement-file");
        }();

        const Sign sign = args.sign == "-" ? Sign::minus : Sign::plus;
        if (args.parallel) return parallel_update_states(measurement, sign).device;
        if (nullspace_given) {
            if (args.nullspace_scale <= 0) throw Error("--nullspace-scale must be positive");
            Matrix k = make_nullspace_corrector(measurement, args.nullspace_seed,
                                                args.nullspace_scale);
            return construct_depolarizing_states(measurement, sign, &k);
        }
        return construct_depolarizing_states(measurement, sign);
    }();
    emit(device_to_json(device), args.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reference devices and Born matrices for generalized probabilistic theories"};
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "construct a reference device and emit JSON");
    build->add_option("--fixture", build_args.fixture, "bundled device by name");
    build->add_option("--space", build_args.space_json,
                      "space descriptor, e.g. '{\"kind\":\"quantum_complex\",\"d\":2}'");
    build->add_flag("--identity", build_args.identity,
                    "classical identity measurement (classical spaces)");
    build->add_option("--random-ic", build_args.random_ic,
                      "seeded random IC measurement with this many outcomes");
    build->add_option("--seed", build_args.seed, "seed for randomized builds");
    build->add_flag("--unbiased", build_args.unbiased, "force biases to u/n");
    build->add_option("--measurement-file", build_args.measurement_file,
                      "JSON file with an effects matrix");
    build->add_flag("--parallel-update", build_args.parallel,
                    "states proportional to effects instead of the left-inverse states");
    build->add_option("--sign", build_args.sign, "depolarization branch")
        ->check(CLI::IsMember({"+", "-"}));
    build->add_option("--nullspace-seed", build_args.nullspace_seed,
                      "add a seeded nullspace corrector to the left inverse");
    build->add_option("--nullspace-scale", build_args.nullspace_scale,
                      "corrector magnitude relative to the pseudoinverse (default 0.5)");
    build->add_option("-o,--output", build_args.output, "write here instead of stdout");

    std::string check_path;
    std::uint64_t check_seed = 1;
    std::vector<std::string> check_ps;
    bool real_vectorized = false;
    auto* check = app.add_subcommand("check", "run the verification battery on a device file");
    check->add_option("device", check_path, "device JSON file")->required();
    check->add_option("--seed", check_seed, "seed for sampled states (default 1)");
    check->add_option("--p", check_ps, "extra Schatten exponents for the deformation")
        ->delimiter(',');
    check->add_flag("--real-vectorized", real_vectorized,
                    "also verify the Born identity on vectorized operators");

    std::string min_path;
    std::string min_p = "2";
    std::string min_output;
    auto* minimize =
        app.add_subcommand("minimize", "Born matrix minimizing the LTP deformation");
    minimize->add_option("device", min_path, "device JSON file")->required();
    minimize->add_option("--p", min_p, "Schatten exponent: 1, 2 or inf (default 2)");
    minimize->add_option("-o,--output", min_output, "write here instead of stdout");

    auto* fixtures = app.add_subcommand("fixtures", "bundled devices");
    auto* fixtures_list = fixtures->add_subcommand("list", "list fixture names");
    fixtures->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            return run_build(build_args, build->count("--seed") > 0,
                             build->count("--nullspace-seed") > 0);
        }
        if (check->parsed()) {
            DeviceFile file = device_from_json_lenient(read_json_file(check_path));
            CheckOptions options;
            options.seed = check_seed;
            options.vectorized_identity = real_vectorized;
            options.device_violations = file.violations;
            for (const auto& p : check_ps) options.deformation_ps.push_back(parse_schatten(p));
            ReportBundle bundle = run_checks(file.device, options);
            std::cout << report_to_json(bundle).dump(2) << "\n";
            if (!bundle.all_pass()) {
                for (const auto& v : bundle.verdicts)
                    if (!v.pass)
                        std::cerr << "failed: " << v.name << " residual " << v.residual
                                  << " exceeds " << v.threshold << "\n";
                return 1;
            }
            return 0;
        }
        if (minimize->parsed()) {
            ReferenceDevice device = device_from_json(read_json_file(min_path));
            const double p = parse_schatten(min_p);
            BornMatrix numeric = minimal_born_matrix_numeric(device.self_conditional, p);

            Rng rng(1);
            std::vector<Vector> samples;
            for (int i = 0; i < 25; ++i) samples.push_back(device.space().sample_state(rng));

            json out = born_to_json(numeric, verify_born_identity(device, numeric.phi),
                                    protourgleichung_residual(device, numeric.phi, samples),
                                    ltp_deformation(numeric.phi, 2.0));
            if (p == 2.0 && device.measurement.unbiased()) {
                try {
                    BornMatrix closed = minimal_frobenius_born_matrix(device);
                    out["closed_form"] =
                        born_to_json(closed, verify_born_identity(device, closed.phi),
                                     protourgleichung_residual(device, closed.phi, samples),
                                     ltp_deformation(closed.phi, 2.0));
                    out["closed_form_max_difference"] =
                        round_sig((closed.phi - numeric.phi).cwiseAbs().maxCoeff());
                } catch (const Error&) {
                    // biased or non-depolarizing: numeric result stands alone
                }
            }
            emit(out, min_output);
            return 0;
        }
        if (fixtures_list->parsed()) {
            for (const auto& name : fixture_names()) std::cout << name << "\n";
            return 0;
        }
    } catch (const DeviceValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& v : e.violations()) std::cerr << "violated: " << v << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
