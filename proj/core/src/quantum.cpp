#include "gptref/quantum.hpp"

#include <cmath>
#include <complex>

#include "gptref/errors.hpp"

namespace gptref::quantum {

using namespace std::complex_literals;

namespace {

template <typename Mat>
Mat kron(const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

ReferenceDevice device_from_pure_states(const GptSpace& space, const Matrix& E,
                                        const Matrix& S) {
    ReferenceMeasurement meas = decompose_measurement(space, E);
    const int r = meas.r();
    Matrix X = S.bottomRows(r - 1);
    // X Zt = (1/alpha) I for these symmetric line sets; read alpha off the trace
    const double alpha = (r - 1) / (X * meas.Zt).trace();
    return make_device(std::move(meas), ReferenceStates{S, std::move(X)}, alpha);
}

}  // namespace

std::vector<CMatrix> operator_basis_complex(int d) {
    if (d < 2) throw Error("operator basis requires d >= 2");
    std::vector<CMatrix> basis;
    basis.reserve(d * d);
    basis.push_back(CMatrix::Identity(d, d));
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            CMatrix x = CMatrix::Zero(d, d);
            x(j, k) = 1.0;
            x(k, j) = 1.0;
            basis.push_back(x);
            CMatrix y = CMatrix::Zero(d, d);
            y(j, k) = -1.0i;
            y(k, j) = 1.0i;
            basis.push_back(y);
        }
    }
    for (int l = 1; l < d; ++l) {
        CMatrix diag = CMatrix::Zero(d, d);
        for (int m = 0; m < l; ++m) diag(m, m) = 1.0;
        diag(l, l) = -l;
        diag *= std::sqrt(2.0 / (l * (l + 1.0)));
        basis.push_back(diag);
    }
    return basis;
}

std::vector<Matrix> operator_basis_real(int d) {
    if (d < 2) throw Error("operator basis requires d >= 2");
    std::vector<Matrix> basis;
    basis.reserve(d * (d + 1) / 2);
    basis.push_back(Matrix::Identity(d, d));
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            Matrix x = Matrix::Zero(d, d);
            x(j, k) = 1.0;
            x(k, j) = 1.0;
            basis.push_back(x);
        }
    }
    for (int l = 1; l < d; ++l) {
        Matrix diag = Matrix::Zero(d, d);
        for (int m = 0; m < l; ++m) diag(m, m) = 1.0;
        diag(l, l) = -l;
        diag *= std::sqrt(2.0 / (l * (l + 1.0)));
        basis.push_back(diag);
    }
    return basis;
}

Vector state_to_bloch(const CMatrix& rho) {
    const int d = static_cast<int>(rho.rows());
    auto basis = operator_basis_complex(d);
    Vector v(d * d);
    v(0) = rho.trace().real();
    for (int k = 1; k < d * d; ++k) v(k) = (basis[k] * rho).trace().real();
    return v;
}

RowVector effect_to_bloch(const CMatrix& E) {
    const int d = static_cast<int>(E.rows());
    auto basis = operator_basis_complex(d);
    RowVector e(d * d);
    e(0) = E.trace().real() / d;
    for (int k = 1; k < d * d; ++k) e(k) = 0.5 * (basis[k] * E).trace().real();
    return e;
}

CMatrix state_from_bloch(const Vector& bloch) {
    const int d = static_cast<int>(std::lround(std::sqrt(double(bloch.size()))));
    if (d * d != bloch.size()) throw DimensionMismatch("not a quantum Bloch vector");
    auto basis = operator_basis_complex(d);
    CMatrix rho = bloch(0) / d * CMatrix::Identity(d, d);
    for (int k = 1; k < d * d; ++k) rho += 0.5 * bloch(k) * basis[k];
    return rho;
}

CMatrix effect_from_bloch(const RowVector& bloch) {
    const int d = static_cast<int>(std::lround(std::sqrt(double(bloch.size()))));
    if (d * d != bloch.size()) throw DimensionMismatch("not a quantum Bloch covector");
    auto basis = operator_basis_complex(d);
    CMatrix op = bloch(0) * CMatrix::Identity(d, d);
    for (int k = 1; k < d * d; ++k) op += bloch(k) * basis[k];
    return op;
}

Vector state_to_bloch_real(const Matrix& rho) {
    const int d = static_cast<int>(rho.rows());
    auto basis = operator_basis_real(d);
    const int r = d * (d + 1) / 2;
    Vector v(r);
    v(0) = rho.trace();
    for (int k = 1; k < r; ++k) v(k) = (basis[k] * rho).trace();
    return v;
}

RowVector effect_to_bloch_real(const Matrix& E) {
    const int d = static_cast<int>(E.rows());
    auto basis = operator_basis_real(d);
    const int r = d * (d + 1) / 2;
    RowVector e(r);
    e(0) = E.trace() / d;
    for (int k = 1; k < r; ++k) e(k) = 0.5 * (basis[k] * E).trace();
    return e;
}

Matrix state_from_bloch_real(const Vector& bloch) {
    const int r = static_cast<int>(bloch.size());
    const int d = static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 8.0 * r)) / 2.0));
    if (d * (d + 1) / 2 != r) throw DimensionMismatch("not a real quantum Bloch vector");
    auto basis = operator_basis_real(d);
    Matrix rho = bloch(0) / d * Matrix::Identity(d, d);
    for (int k = 1; k < r; ++k) rho += 0.5 * bloch(k) * basis[k];
    return rho;
}

Matrix effect_from_bloch_real(const RowVector& bloch) {
    const int r = static_cast<int>(bloch.size());
    const int d = static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 8.0 * r)) / 2.0));
    if (d * (d + 1) / 2 != r) throw DimensionMismatch("not a real quantum Bloch covector");
    auto basis = operator_basis_real(d);
    Matrix op = bloch(0) * Matrix::Identity(d, d);
    for (int k = 1; k < r; ++k) op += bloch(k) * basis[k];
    return op;
}

CVector vectorize(const CMatrix& A) {
    CVector v(A.size());
    int idx = 0;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) v(idx++) = A(i, j);
    return v;
}

Vector vectorize_real(const Matrix& A) {
    Vector v(A.size());
    int idx = 0;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) v(idx++) = A(i, j);
    return v;
}

CMatrix swap_operator(int d) {
    CMatrix s = CMatrix::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a * d + b, b * d + a) = 1.0;
    return s;
}

CMatrix symmetric_projector(int d) {
    return 0.5 * (CMatrix::Identity(d * d, d * d) + swap_operator(d));
}

Matrix swap_operator_real(int d) {
    Matrix s = Matrix::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a * d + b, b * d + a) = 1.0;
    return s;
}

Matrix symmetric_projector_real(int d) {
    return 0.5 * (Matrix::Identity(d * d, d * d) + swap_operator_real(d));
}

CMatrix partial_transpose(const CMatrix& M, int d) {
    if (M.rows() != d * d || M.cols() != d * d)
        throw DimensionMismatch("partial transpose expects a d^2 x d^2 matrix");
    CMatrix out(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    out(a * d + b, c * d + e) = M(a * d + e, c * d + b);
    return out;
}

ReferenceDevice sic_d2() {
    GptSpace space = GptSpace::quantum_complex(2);
    Matrix signs(4, 3);
    signs << 1, 1, 1,
             1, -1, -1,
            -1, -1, 1,
            -1, 1, -1;
    Matrix E(4, 4);
    E.col(0).setConstant(0.25);
    E.rightCols(3) = signs / (4.0 * std::sqrt(3.0));
    ReferenceMeasurement meas = decompose_measurement(space, E);
    Matrix X = 4.0 * meas.Zt.transpose();  // c = 1 parallel update
    Matrix S(4, 4);
    S.row(0).setOnes();
    S.bottomRows(3) = X;
    return make_device(std::move(meas), ReferenceStates{std::move(S), std::move(X)}, 3.0);
}

ReferenceDevice pauli6_d2() {
    GptSpace space = GptSpace::quantum_complex(2);
    Matrix E = Matrix::Zero(6, 4);
    Matrix X = Matrix::Zero(3, 6);
    for (int k = 0; k < 3; ++k) {
        E(2 * k, 0) = E(2 * k + 1, 0) = 1.0 / 6.0;
        E(2 * k, k + 1) = 1.0 / 6.0;
        E(2 * k + 1, k + 1) = -1.0 / 6.0;
        X(k, 2 * k) = 1.0;
        X(k, 2 * k + 1) = -1.0;
    }
    ReferenceMeasurement meas = decompose_measurement(space, E);
    Matrix S(4, 6);
    S.row(0).setOnes();
    S.bottomRows(3) = X;
    return make_device(std::move(meas), ReferenceStates{std::move(S), std::move(X)}, 3.0);
}

CVector bundled_fiducial(int d) {
    if (d == 2) {
        // Bloch vector (1,1,1)/sqrt(3); orbit is the fixture tetrahedron.
        const double ct = std::sqrt((1.0 + 1.0 / std::sqrt(3.0)) / 2.0);
        const double st = std::sqrt((1.0 - 1.0 / std::sqrt(3.0)) / 2.0);
        CVector psi(2);
        psi << ct, std::exp(0.25i * M_PI) * st;
        return psi;
    }
    if (d == 3) {
        CVector psi(3);
        psi << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
        return psi;
    }
    throw Error("no bundled fiducial for this dimension; supply one");
}

ReferenceDevice wh_sic(int d) { return wh_sic(d, bundled_fiducial(d)); }

ReferenceDevice wh_sic(int d, const CVector& fiducial) {
    if (fiducial.size() != d) throw DimensionMismatch("fiducial must live in dimension d");
    CVector psi = fiducial.normalized();

    CMatrix shift = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) shift((j + 1) % d, j) = 1.0;
    CMatrix clock = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) clock(j, j) = std::exp(2.0i * M_PI * double(j) / double(d));

    std::vector<CVector> orbit;
    orbit.reserve(d * d);
    CMatrix xp = CMatrix::Identity(d, d);
    for (int j = 0; j < d; ++j) {
        CMatrix zp = CMatrix::Identity(d, d);
        for (int k = 0; k < d; ++k) {
            orbit.push_back(xp * (zp * psi));
            zp = clock * zp;
        }
        xp = shift * xp;
    }

    const double target = 1.0 / (d + 1.0);
    for (size_t a = 0; a < orbit.size(); ++a) {
        for (size_t b = a + 1; b < orbit.size(); ++b) {
            const double overlap = std::norm(orbit[a].dot(orbit[b]));
            if (std::abs(overlap - target) > tol::kVerify)
                throw NotASic("orbit overlaps are not equiangular at 1/(d+1)");
        }
    }

    GptSpace space = GptSpace::quantum_complex(d);
    const int n = d * d;
    const int r = d * d;
    Matrix E(n, r);
    Matrix S(r, n);
    for (int i = 0; i < n; ++i) {
        CMatrix proj = orbit[i] * orbit[i].adjoint();
        E.row(i) = effect_to_bloch(proj / double(d));
        S.col(i) = state_to_bloch(proj);
    }
    return device_from_pure_states(space, E, S);
}

ReferenceDevice real_sic_d2() {
    GptSpace space = GptSpace::quantum_real(2);
    const int n = 3;
    Matrix E(n, 3);
    Matrix S(3, n);
    for (int k = 0; k < n; ++k) {
        const double theta = k * M_PI / 3.0;
        Eigen::Vector2d psi(std::cos(theta), std::sin(theta));
        Matrix proj = psi * psi.transpose();
        E.row(k) = effect_to_bloch_real(2.0 / 3.0 * proj);
        S.col(k) = state_to_bloch_real(proj);
    }
    return device_from_pure_states(space, E, S);
}

ReferenceDevice real_sic_d3() {
    GptSpace space = GptSpace::quantum_real(3);
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    Matrix lines(6, 3);
    lines << 0, 1, phi,
             0, 1, -phi,
             1, phi, 0,
             1, -phi, 0,
             phi, 0, 1,
            -phi, 0, 1;
    const int n = 6;
    Matrix E(n, 6);
    Matrix S(6, n);
    for (int k = 0; k < n; ++k) {
        Eigen::Vector3d psi = lines.row(k).transpose().normalized();
        Matrix proj = psi * psi.transpose();
        E.row(k) = effect_to_bloch_real(0.5 * proj);
        S.col(k) = state_to_bloch_real(proj);
    }
    return device_from_pure_states(space, E, S);
}

DesignReport two_design_check(const std::vector<CMatrix>& states, const Vector& weights) {
    if (states.empty()) throw PreconditionFailure("design check needs at least one state");
    if (static_cast<int>(states.size()) != weights.size())
        throw DimensionMismatch("one weight per state required");
    if (weights.minCoeff() < -1e-12 || std::abs(weights.sum() - 1.0) > 1e-9)
        throw PreconditionFailure("weights must be nonnegative and sum to 1");
    const int d = static_cast<int>(states[0].rows());
    DesignReport report;
    report.lhs = CMatrix::Zero(d * d, d * d);
    for (size_t i = 0; i < states.size(); ++i) {
        const CMatrix& s = states[i];
        if (s.rows() != d || s.cols() != d) throw DimensionMismatch("state dimensions differ");
        if (std::abs((s * s).trace().real() - 1.0) > 1e-10 ||
            std::abs(s.trace().real() - 1.0) > 1e-10)
            throw NotPure("design inputs must be pure normalized states");
        report.lhs += weights(i) * kron(s, s);
    }
    report.target = 2.0 / (d * (d + 1.0)) * symmetric_projector(d);
    report.residual = (report.lhs - report.target).norm();
    report.certified = report.residual <= tol::kVerify;
    return report;
}

DesignReport two_design_check_real(const std::vector<Matrix>& states, const Vector& weights) {
    if (states.empty()) throw PreconditionFailure("design check needs at least one state");
    if (static_cast<int>(states.size()) != weights.size())
        throw DimensionMismatch("one weight per state required");
    if (weights.minCoeff() < -1e-12 || std::abs(weights.sum() - 1.0) > 1e-9)
        throw PreconditionFailure("weights must be nonnegative and sum to 1");
    const int d = static_cast<int>(states[0].rows());
    Matrix lhs = Matrix::Zero(d * d, d * d);
    for (size_t i = 0; i < states.size(); ++i) {
        const Matrix& s = states[i];
        if (s.rows() != d || s.cols() != d) throw DimensionMismatch("state dimensions differ");
        if (std::abs((s * s).trace() - 1.0) > 1e-10 || std::abs(s.trace() - 1.0) > 1e-10)
            throw NotPure("design inputs must be pure normalized states");
        lhs += weights(i) * kron(s, s);
    }
    Vector vec_id = vectorize_real(Matrix::Identity(d, d));
    Matrix target = (Matrix::Identity(d * d, d * d) + swap_operator_real(d) +
                     vec_id * vec_id.transpose()) /
                    (d * (d + 2.0));
    DesignReport report;
    report.lhs = lhs.cast<std::complex<double>>();
    report.target = target.cast<std::complex<double>>();
    report.residual = (lhs - target).norm();
    report.certified = report.residual <= tol::kVerify;
    return report;
}

DesignReport device_two_design_check(const ReferenceDevice& device) {
    const GptSpace& space = device.space();
    const int n = device.n();
    if (space.kind() == SpaceKind::quantum_complex) {
        std::vector<CMatrix> states;
        states.reserve(n);
        for (int i = 0; i < n; ++i) states.push_back(state_from_bloch(device.states.S.col(i)));
        return two_design_check(states, device.measurement.w);
    }
    if (space.kind() == SpaceKind::quantum_real) {
        std::vector<Matrix> states;
        states.reserve(n);
        for (int i = 0; i < n; ++i)
            states.push_back(state_from_bloch_real(device.states.S.col(i)));
        return two_design_check_real(states, device.measurement.w);
    }
    throw PreconditionFailure("design checks apply to quantum devices");
}

double pure_parallel_alpha(int d, SpaceKind kind) {
    if (d < 2) throw Error("dimension must be at least 2");
    if (kind == SpaceKind::quantum_complex) return d + 1.0;
    if (kind == SpaceKind::quantum_real) return (d + 2.0) / 2.0;
    throw PreconditionFailure("pure parallel-update alpha is a quantum statement");
}

bool depolarizing_bounds_check(double alpha, int d) {
    if (d < 2) throw Error("dimension must be at least 2");
    const double beta = 1.0 / alpha;
    return beta >= -1.0 / (d * d - 1.0) && beta <= 1.0;
}

double vectorized_born_identity_residual(const ReferenceDevice& device, const Matrix& phi) {
    const GptSpace& space = device.space();
    const int n = device.n();
    const int d = space.param();
    if (phi.rows() != n || phi.cols() != n)
        throw DimensionMismatch("Born matrix must be n x n");
    if (space.kind() == SpaceKind::quantum_complex) {
        CMatrix S(d * d, n);
        CMatrix E(n, d * d);
        for (int i = 0; i < n; ++i) {
            S.col(i) = vectorize(state_from_bloch(device.states.S.col(i)));
            E.row(i) = vectorize(effect_from_bloch(device.measurement.E.row(i))).adjoint();
        }
        return (S * phi.cast<std::complex<double>>() * E - CMatrix::Identity(d * d, d * d))
            .norm();
    }
    if (space.kind() == SpaceKind::quantum_real) {
        Matrix S(d * d, n);
        Matrix E(n, d * d);
        for (int i = 0; i < n; ++i) {
            S.col(i) = vectorize_real(state_from_bloch_real(device.states.S.col(i)));
            E.row(i) =
                vectorize_real(effect_from_bloch_real(device.measurement.E.row(i))).transpose();
        }
        return (S * phi * E - symmetric_projector_real(d)).norm();
    }
    throw PreconditionFailure("vectorized identity applies to quantum devices");
}

}  // namespace gptref::quantum
