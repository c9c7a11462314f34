#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gptref/born.hpp"
#include "gptref/device.hpp"
#include "gptref/errors.hpp"
#include "gptref/quantum.hpp"

using namespace gptref;

namespace {

// oracle: (a I + b u u^T)^{-1} = (1/a) I - b/(a (a + b n)) u u^T
Matrix rank_one_shifted_inverse(double a, double b, int n) {
    Matrix uut = Matrix::Ones(n, n);
    return Matrix::Identity(n, n) / a - b / (a * (a + b * n)) * uut;
}

std::vector<Vector> sample_states(const GptSpace& space, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(space.sample_state(rng));
    return out;
}

Matrix nullspace_corrector(const ReferenceMeasurement& m, std::uint64_t seed, double scale) {
    const int n = m.n();
    const int r = m.r();
    Matrix A(n, r);
    A.leftCols(r - 1) = m.Zt;
    A.col(r - 1) = m.w;
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU);
    Matrix uperp = svd.matrixU().rightCols(n - r);
    Rng rng(seed);
    Matrix coef(r - 1, n - r);
    for (int i = 0; i < coef.rows(); ++i)
        for (int j = 0; j < coef.cols(); ++j) coef(i, j) = rng.normal();
    Matrix k = coef * uperp.transpose();
    Matrix pinv = m.Zt.completeOrthogonalDecomposition().pseudoInverse();
    k *= scale * pinv.norm() / k.norm();
    return k;
}

}  // namespace

TEST_SUITE("born") {

TEST_CASE("MIC inversion against the rank-one-update oracle") {
    SUBCASE("tetrahedron") {
        ReferenceDevice device = quantum::sic_d2();
        BornMatrix born = mic_born_matrix(device);
        // P = (1/3) I + (1/6) u u^T
        Matrix expected = rank_one_shifted_inverse(1.0 / 3, 1.0 / 6, 4);
        CHECK((born.phi - expected).cwiseAbs().maxCoeff() <= 1e-12);
        Matrix closed = 3.0 * Matrix::Identity(4, 4) - 0.5 * Matrix::Ones(4, 4);
        CHECK((born.phi - closed).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((device.self_conditional * born.phi - Matrix::Identity(4, 4))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
    SUBCASE("classical identity") {
        BornMatrix born = mic_born_matrix(classical_identity_device(4));
        CHECK((born.phi - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("nine-outcome SIC in d = 3") {
        ReferenceDevice device = quantum::wh_sic(3);
        BornMatrix born = mic_born_matrix(device);
        Matrix closed =
            4.0 * Matrix::Identity(9, 9) - (1.0 / 3.0) * Matrix::Ones(9, 9);
        CHECK((born.phi - closed).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("overcomplete devices are rejected") {
        CHECK_THROWS_AS(mic_born_matrix(quantum::pauli6_d2()), NotAMic);
    }
}

TEST_CASE("natural Born matrix") {
    SUBCASE("coincides with the MIC inverse on the tetrahedron") {
        ReferenceDevice device = quantum::sic_d2();
        BornMatrix natural = natural_born_matrix(device);
        BornMatrix mic = mic_born_matrix(device);
        CHECK((natural.phi - mic.phi).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("six-outcome device has spectrum {1, 3, 3, 3, 0, 0}") {
        BornMatrix natural = natural_born_matrix(quantum::pauli6_d2());
        Eigen::EigenSolver<Matrix> es(natural.phi);
        std::vector<double> re(6);
        for (int i = 0; i < 6; ++i) {
            re[i] = es.eigenvalues()(i).real();
            CHECK(std::abs(es.eigenvalues()(i).imag()) <= 1e-9);
        }
        std::sort(re.begin(), re.end());
        std::vector<double> expected{0.0, 0.0, 1.0, 3.0, 3.0, 3.0};
        for (int i = 0; i < 6; ++i) CHECK(re[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    }
    SUBCASE("alpha = 1 devices give back P") {
        ReferenceDevice device = classical_split_identity_device(3, 5, 4);
        BornMatrix natural = natural_born_matrix(device);
        CHECK((natural.phi - device.self_conditional).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("simple Born matrix") {
    SUBCASE("tetrahedron coincidence") {
        ReferenceDevice device = quantum::sic_d2();
        BornMatrix simple = simple_born_matrix(device);
        // Zt X = (4 I - u u^T)/12, so I + 6 Zt X = 3 I - u u^T / 2
        Matrix ztx = (4.0 * Matrix::Identity(4, 4) - Matrix::Ones(4, 4)) / 12.0;
        CHECK((device.measurement.Zt * device.states.X - ztx).cwiseAbs().maxCoeff() <= 1e-12);
        Matrix closed = 3.0 * Matrix::Identity(4, 4) - 0.5 * Matrix::Ones(4, 4);
        CHECK((simple.phi - closed).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("alpha = 1 devices reduce to the identity") {
        BornMatrix simple = simple_born_matrix(classical_split_identity_device(3, 5, 4));
        CHECK((simple.phi - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("six-outcome device: valid one-inverse distinct from the natural matrix") {
        ReferenceDevice device = quantum::pauli6_d2();
        BornMatrix simple = simple_born_matrix(device);
        const Matrix& P = device.self_conditional;
        CHECK((P * simple.phi * P - P).cwiseAbs().maxCoeff() <= 1e-10);
        BornMatrix natural = natural_born_matrix(device);
        CHECK((simple.phi - natural.phi).cwiseAbs().maxCoeff() > 1e-3);
    }
}

TEST_CASE("closed-form Frobenius minimizer") {
    SUBCASE("tetrahedron reduction") {
        BornMatrix minimal = minimal_frobenius_born_matrix(quantum::sic_d2());
        Matrix closed = 3.0 * Matrix::Identity(4, 4) - 0.5 * Matrix::Ones(4, 4);
        CHECK((minimal.phi - closed).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("pseudoinverse states: the minimizer acts term-wise affinely") {
        GptSpace space = GptSpace::quantum_complex(2);
        ReferenceMeasurement m = random_ic_measurement_unbiased(space, 6, 21);
        ReferenceDevice device = construct_depolarizing_states(m);
        BornMatrix minimal = minimal_frobenius_born_matrix(device);
        auto states = sample_states(space, 30, 77);
        CHECK(protourgleichung_residual(device, minimal.phi, states) <= 1e-8);
    }
    SUBCASE("a nullspace corrector breaks the affine action") {
        GptSpace space = GptSpace::quantum_complex(2);
        ReferenceMeasurement m = random_ic_measurement_unbiased(space, 6, 21);
        Matrix k = nullspace_corrector(m, 5, 0.6);
        ReferenceDevice device = construct_depolarizing_states(m, Sign::plus, &k);
        auto states = sample_states(space, 30, 78);

        BornMatrix minimal = minimal_frobenius_born_matrix(device);
        CHECK(protourgleichung_residual(device, minimal.phi, states) > 1e-4);
        CHECK(verify_born_identity(device, minimal.phi) <= 1e-8);

        BornMatrix natural = natural_born_matrix(device);
        BornMatrix simple = simple_born_matrix(device);
        CHECK(protourgleichung_residual(device, natural.phi, states) <= 1e-8);
        CHECK(protourgleichung_residual(device, simple.phi, states) <= 1e-8);
    }
    SUBCASE("biased devices are rejected") {
        GptSpace space = GptSpace::quantum_complex(2);
        ReferenceDevice device =
            construct_depolarizing_states(random_ic_measurement(space, 6, 22));
        CHECK_THROWS_AS(minimal_frobenius_born_matrix(device), UnsupportedBias);
    }
}

TEST_CASE("numeric minimizer") {
    SUBCASE("agrees with the closed form on unbiased devices") {
        GptSpace space = GptSpace::ball(3);
        ReferenceMeasurement m = random_ic_measurement_unbiased(space, 7, 40);
        ReferenceDevice device = construct_depolarizing_states(m);
        BornMatrix closed = minimal_frobenius_born_matrix(device);
        BornMatrix numeric = minimal_born_matrix_numeric(device.self_conditional);
        CHECK((closed.phi - numeric.phi).cwiseAbs().maxCoeff() <= 1e-6);
    }
    SUBCASE("returns the plain inverse for a MIC") {
        ReferenceDevice device = quantum::sic_d2();
        BornMatrix numeric = minimal_born_matrix_numeric(device.self_conditional);
        BornMatrix mic = mic_born_matrix(device);
        CHECK((numeric.phi - mic.phi).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("dominates the named one-inverses on biased overcomplete devices") {
        GptSpace space = GptSpace::classical(4);
        ReferenceDevice device =
            construct_depolarizing_states(random_ic_measurement(space, 7, 41));
        BornMatrix numeric = minimal_born_matrix_numeric(device.self_conditional);
        CHECK(verify_born_identity(device, numeric.phi) <= 1e-9);
        const double min_norm = ltp_deformation(numeric.phi, 2.0);
        CHECK(min_norm <= ltp_deformation(natural_born_matrix(device).phi, 2.0) + 1e-9);
        CHECK(min_norm <= ltp_deformation(simple_born_matrix(device).phi, 2.0) + 1e-9);
    }
    SUBCASE("best-effort Schatten 1 and inf refinements stay feasible") {
        GptSpace space = GptSpace::quantum_complex(2);
        ReferenceDevice device =
            construct_depolarizing_states(random_ic_measurement_unbiased(space, 6, 42));
        const Matrix& P = device.self_conditional;
        for (double p : {1.0, std::numeric_limits<double>::infinity()}) {
            BornMatrix born = minimal_born_matrix_numeric(P, p);
            CHECK((P * born.phi * P - P).cwiseAbs().maxCoeff() <= 1e-8);
            BornMatrix frob = minimal_born_matrix_numeric(P, 2.0);
            CHECK(ltp_deformation(born.phi, p) <= ltp_deformation(frob.phi, p) + 1e-9);
        }
    }
}

TEST_CASE("generic one-inverse family") {
    ReferenceDevice device = quantum::pauli6_d2();
    const Matrix& P = device.self_conditional;
    SUBCASE("default blocks give the pseudoinverse") {
        BornMatrix born = generic_one_inverse(P);
        CHECK((P * born.phi * P - P).cwiseAbs().maxCoeff() <= 1e-10);
        Matrix pinv = P.completeOrthogonalDecomposition().pseudoInverse();
        CHECK((born.phi - pinv).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("random free blocks stay in the family") {
        Rng rng(3);
        Matrix A(4, 2), B(2, 4), C(2, 2);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 2; ++j) {
                A(i, j) = rng.normal();
                B(j, i) = rng.normal();
            }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) C(i, j) = rng.normal();
        BornMatrix born = generic_one_inverse(P, &A, &B, &C);
        CHECK((P * born.phi * P - P).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(verify_born_identity(device, born.phi) <= 1e-8);
    }
}

TEST_CASE("born identity residuals") {
    ReferenceDevice device = quantum::pauli6_d2();
    BornMatrix natural = natural_born_matrix(device);
    CHECK(verify_born_identity(device, natural.phi) <= 1e-8);

    // Phi = 0 misses by the norm of the identity
    CHECK(verify_born_identity(device, Matrix::Zero(6, 6)) ==
          doctest::Approx(2.0).epsilon(1e-9));  // sqrt(r) = 2

    Rng rng(9);
    Matrix noise(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) noise(i, j) = rng.normal();
    const double residual = verify_born_identity(device, natural.phi + 1e-3 * noise);
    CHECK(residual >= 1e-5);
    CHECK(residual <= 1e-1);
}

TEST_CASE("born rule reconstruction") {
    ReferenceDevice device = quantum::sic_d2();
    GptSpace space = device.space();
    BornMatrix phi = mic_born_matrix(device);

    // measurement {|0><0|, |1><1|}
    quantum::CMatrix p0 = quantum::CMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    quantum::CMatrix p1 = quantum::CMatrix::Zero(2, 2);
    p1(1, 1) = 1.0;
    Matrix A(2, 4);
    A.row(0) = quantum::effect_to_bloch(p0);
    A.row(1) = quantum::effect_to_bloch(p1);
    Matrix conditional = A * device.states.S;  // P(A|E)

    SUBCASE("pure input state reconstructs (1, 0)") {
        Vector rho = quantum::state_to_bloch(p0);  // |0><0| as a state
        Vector probs = device.measurement.E * rho;
        Vector pa = apply_born_rule(conditional, phi.phi, probs);
        CHECK(pa(0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(pa(1) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("maximally mixed input gives trace weights") {
        Vector probs = device.measurement.E * space.maximally_mixed();
        Vector pa = apply_born_rule(conditional, phi.phi, probs);
        CHECK(pa(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(pa(1) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("dropping the Born matrix breaks the reconstruction") {
        Vector rho = quantum::state_to_bloch(p0);
        Vector probs = device.measurement.E * rho;
        Vector pa = apply_born_rule(conditional, Matrix::Identity(4, 4), probs);
        CHECK(std::abs(pa(0) - 1.0) > 1e-3);  // the plain LTP fails in quantum theory
    }
    SUBCASE("shape and normalization preconditions") {
        Vector probs = device.measurement.E * space.maximally_mixed();
        CHECK_THROWS_AS(apply_born_rule(conditional, phi.phi, probs.head(3)),
                        DimensionMismatch);
        Vector bad = probs * 1.5;
        CHECK_THROWS_AS(apply_born_rule(conditional, phi.phi, bad), PreconditionFailure);
    }
}

TEST_CASE("quasi-probabilities") {
    ReferenceDevice device = quantum::sic_d2();
    SUBCASE("maximally mixed state returns the bias vector") {
        QuasiProbability w = quasi_probability(device, device.space().maximally_mixed());
        CHECK((w.W - device.measurement.w).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(w.W.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("computational basis state hits the frozen values") {
        quantum::CMatrix p0 = quantum::CMatrix::Zero(2, 2);
        p0(0, 0) = 1.0;
        QuasiProbability w = quasi_probability(device, quantum::state_to_bloch(p0));
        // 3 (1/4 +- 1/(4 sqrt 3)) - 1/2, signs from the third column of Zt
        const double plus = 0.683012701892219;
        const double minus = -0.183012701892219;
        CHECK(w.W(0) == doctest::Approx(plus).epsilon(1e-12));
        CHECK(w.W(1) == doctest::Approx(minus).epsilon(1e-12));
        CHECK(w.W(2) == doctest::Approx(plus).epsilon(1e-12));
        CHECK(w.W(3) == doctest::Approx(minus).epsilon(1e-12));
        CHECK(w.W.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("coefficients are (d+1, -1/d) for the SIC devices") {
        for (int d : {2, 3}) {
            ReferenceDevice sic = d == 2 ? quantum::sic_d2() : quantum::wh_sic(3);
            REQUIRE(sic.alpha.has_value());
            CHECK(*sic.alpha == doctest::Approx(d + 1.0).epsilon(1e-10));
            Vector constant = (1.0 - *sic.alpha) * sic.measurement.w;
            CHECK((constant.array() + 1.0 / d).abs().maxCoeff() <= 1e-10);
        }
    }
    SUBCASE("non-depolarizing devices are rejected") {
        GptSpace space = GptSpace::quantum_complex(2);
        ReferenceMeasurement m = random_ic_measurement(space, 6, 77);
        ReferenceDevice device = parallel_update_states(m).device;
        CHECK_FALSE(device.alpha.has_value());
        CHECK_THROWS_AS(quasi_probability(device, space.maximally_mixed()),
                        PreconditionFailure);
    }
}

TEST_CASE("quasi-probability affinity through the natural matrix") {
    GptSpace space = GptSpace::square();
    ReferenceMeasurement m = random_ic_measurement(space, 5, 55);
    ReferenceDevice device = construct_depolarizing_states(m);
    BornMatrix natural = natural_born_matrix(device);
    const double alpha = *device.alpha;
    Rng rng(66);
    for (int trial = 0; trial < 50; ++trial) {
        Vector rho = space.sample_state(rng);
        Vector probs = device.measurement.E * rho;
        Vector via_phi = natural.phi * probs;
        Vector affine = alpha * (probs - device.measurement.w) + device.measurement.w;
        CHECK((via_phi - affine).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("deformation values") {
    SUBCASE("tetrahedron deformation is 2 sqrt 3") {
        BornMatrix phi = mic_born_matrix(quantum::sic_d2());
        CHECK(ltp_deformation(phi.phi, 2.0) ==
              doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
    }
    SUBCASE("identity has zero deformation") {
        CHECK(ltp_deformation(Matrix::Identity(5, 5), 2.0) == doctest::Approx(0.0));
    }
    SUBCASE("natural and simple differ despite equal quasi-probability action") {
        ReferenceDevice device = quantum::pauli6_d2();
        const double natural = ltp_deformation(natural_born_matrix(device).phi, 2.0);
        const double simple = ltp_deformation(simple_born_matrix(device).phi, 2.0);
        CHECK(std::abs(natural - simple) > 1e-6);
    }
    SUBCASE("exponent validation") {
        CHECK_THROWS_AS(ltp_deformation(Matrix::Identity(3, 3), 0.5), PreconditionFailure);
    }
}

TEST_CASE("all constructors collapse for MICs") {
    GptSpace space = GptSpace::quantum_complex(2);
    ReferenceMeasurement m = random_ic_measurement_unbiased(space, 4, 91);
    ReferenceDevice device = construct_depolarizing_states(m);
    Matrix reference = mic_born_matrix(device).phi;
    CHECK((natural_born_matrix(device).phi - reference).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((simple_born_matrix(device).phi - reference).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((minimal_frobenius_born_matrix(device).phi - reference).cwiseAbs().maxCoeff() <=
          1e-8);
    CHECK((minimal_born_matrix_numeric(device.self_conditional).phi - reference)
              .cwiseAbs()
              .maxCoeff() <= 1e-8);
}

TEST_CASE("one-inverse closure across a device zoo") {
    std::vector<ReferenceDevice> zoo;
    zoo.push_back(quantum::sic_d2());
    zoo.push_back(quantum::pauli6_d2());
    zoo.push_back(classical_identity_device(3));
    zoo.push_back(construct_depolarizing_states(
        random_ic_measurement(GptSpace::ball(3), 6, 61)));
    zoo.push_back(construct_depolarizing_states(
        random_ic_measurement(GptSpace::quantum_real(2), 5, 62)));

    for (const auto& device : zoo) {
        const Matrix& P = device.self_conditional;
        std::vector<Matrix> phis;
        phis.push_back(minimal_born_matrix_numeric(P).phi);
        if (device.alpha) {
            phis.push_back(natural_born_matrix(device).phi);
            phis.push_back(simple_born_matrix(device).phi);
        }
        if (device.is_mic()) phis.push_back(mic_born_matrix(device).phi);
        for (const auto& phi : phis) {
            CHECK((P * phi * P - P).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK(verify_born_identity(device, phi) <= 1e-8);
        }
    }
}

}  // TEST_SUITE
