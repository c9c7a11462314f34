#include "gptref/born.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gptref/errors.hpp"

namespace gptref {

namespace {

struct SvdParts {
    Matrix U;
    Matrix V;
    Vector sv;
    int rank = 0;
};

SvdParts full_svd(const Matrix& P) {
    Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdParts parts{svd.matrixU(), svd.matrixV(), svd.singularValues(), 0};
    const double thresh = parts.sv.size() ? parts.sv(0) * 1e-10 : 0.0;
    for (int i = 0; i < parts.sv.size(); ++i)
        if (parts.sv(i) > thresh) ++parts.rank;
    return parts;
}

Matrix one_inverse_from_blocks(const SvdParts& p, const Matrix* A, const Matrix* B,
                               const Matrix* C) {
    const int n = static_cast<int>(p.U.rows());
    const int rho = p.rank;
    Matrix mid = Matrix::Zero(n, n);
    for (int i = 0; i < rho; ++i) mid(i, i) = 1.0 / p.sv(i);
    if (A) {
        if (A->rows() != rho || A->cols() != n - rho)
            throw DimensionMismatch("free block A must be rank x (n - rank)");
        mid.topRightCorner(rho, n - rho) = *A;
    }
    if (B) {
        if (B->rows() != n - rho || B->cols() != rho)
            throw DimensionMismatch("free block B must be (n - rank) x rank");
        mid.bottomLeftCorner(n - rho, rho) = *B;
    }
    if (C) {
        if (C->rows() != n - rho || C->cols() != n - rho)
            throw DimensionMismatch("free block C must be (n - rank) square");
        mid.bottomRightCorner(n - rho, n - rho) = *C;
    }
    return p.V * mid * p.U.transpose();
}

}  // namespace

std::string to_string(BornProvenance p) {
    switch (p) {
        case BornProvenance::natural: return "natural";
        case BornProvenance::simple: return "simple";
        case BornProvenance::minimal_frobenius: return "minimal_frobenius";
        case BornProvenance::generic_one_inverse: return "generic_one_inverse";
        case BornProvenance::mic_inverse: return "mic_inverse";
    }
    return "unknown";
}

double resolve_alpha(const ReferenceDevice& device) {
    if (device.alpha) return *device.alpha;
    DepolarizingFit fit = depolarizing_fit(device);
    if (fit.depolarizing) return fit.alpha;
    throw PreconditionFailure("device is not depolarizing");
}

BornMatrix mic_born_matrix(const ReferenceDevice& device) {
    if (!device.is_mic()) throw NotAMic("Phi = P^{-1} requires n = r");
    Eigen::FullPivLU<Matrix> lu(device.self_conditional);
    if (!lu.isInvertible()) throw SingularMatrix("self-conditional matrix is singular");
    return BornMatrix{lu.inverse(), BornProvenance::mic_inverse};
}

BornMatrix natural_born_matrix(const ReferenceDevice& device) {
    const double alpha = resolve_alpha(device);
    const int n = device.n();
    Matrix phi = device.measurement.w * RowVector::Ones(n) +
                 alpha * alpha * device.measurement.Zt * device.states.X;
    return BornMatrix{std::move(phi), BornProvenance::natural};
}

BornMatrix simple_born_matrix(const ReferenceDevice& device) {
    const double alpha = resolve_alpha(device);
    const int n = device.n();
    Matrix phi = Matrix::Identity(n, n) +
                 alpha * (alpha - 1.0) * device.measurement.Zt * device.states.X;
    return BornMatrix{std::move(phi), BornProvenance::simple};
}

BornMatrix minimal_frobenius_born_matrix(const ReferenceDevice& device) {
    const double alpha = resolve_alpha(device);
    if (!device.measurement.unbiased())
        throw UnsupportedBias(
            "closed-form minimizer holds for unbiased devices; use the numeric path");
    const int n = device.n();
    const Matrix& X = device.states.X;           // (r-1) x n
    Matrix Z = device.measurement.Zt.transpose();  // (r-1) x n
    Matrix XXt = X * X.transpose();
    Matrix ZZt = Z * Z.transpose();
    Matrix inner = XXt.ldlt().solve(ZZt.ldlt().solve(Z));
    Matrix phi = Matrix::Identity(n, n) + (alpha - 1.0) / alpha * X.transpose() * inner;
    return BornMatrix{std::move(phi), BornProvenance::minimal_frobenius};
}

BornMatrix minimal_born_matrix_numeric(const Matrix& P, double p) {
    if (P.rows() != P.cols()) throw DimensionMismatch("P must be square");
    const int n = static_cast<int>(P.rows());
    SvdParts parts = full_svd(P);
    const int rho = parts.rank;

    // In SVD coordinates the constraint pins the leading rho x rho block of
    // V^T Phi U to Sigma^{-1}; Frobenius minimality copies the free blocks
    // from V^T U.
    Matrix T = parts.V.transpose() * parts.U;
    Matrix mid = T;
    for (int i = 0; i < rho; ++i)
        for (int j = 0; j < rho; ++j) mid(i, j) = i == j ? 1.0 / parts.sv(i) : 0.0;
    Matrix phi2 = parts.V * mid * parts.U.transpose();
    if (p == 2.0) return BornMatrix{std::move(phi2), BornProvenance::minimal_frobenius};

    if (!(p >= 1.0) && !std::isinf(p))
        throw PreconditionFailure("Schatten exponent must be >= 1 or infinity");

    // Best-effort projected subgradient for p = 1 / p = inf; no optimality
    // certificate.
    auto project = [&](const Matrix& phi) {
        Matrix M = parts.V.transpose() * phi * parts.U;
        for (int i = 0; i < rho; ++i)
            for (int j = 0; j < rho; ++j) M(i, j) = i == j ? 1.0 / parts.sv(i) : 0.0;
        return Matrix(parts.V * M * parts.U.transpose());
    };
    auto objective = [&](const Matrix& phi) { return ltp_deformation(phi, p); };

    Matrix phi = phi2;
    Matrix best = phi;
    double best_val = objective(phi);
    const double scale = std::max(1.0, best_val);
    for (int k = 1; k <= 800; ++k) {
        Matrix A = Matrix::Identity(n, n) - phi;
        Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Matrix grad;
        if (std::isinf(p)) {
            grad = -svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
        } else {  // p == 1
            grad = -svd.matrixU() * svd.matrixV().transpose();
        }
        const double step = 0.25 * scale / std::sqrt(static_cast<double>(k));
        phi = project(phi - step * grad);
        const double val = objective(phi);
        if (val < best_val) {
            best_val = val;
            best = phi;
        }
    }
    return BornMatrix{std::move(best), BornProvenance::generic_one_inverse};
}

BornMatrix generic_one_inverse(const Matrix& P, const Matrix* A, const Matrix* B,
                               const Matrix* C) {
    if (P.rows() != P.cols()) throw DimensionMismatch("P must be square");
    SvdParts parts = full_svd(P);
    return BornMatrix{one_inverse_from_blocks(parts, A, B, C),
                      BornProvenance::generic_one_inverse};
}

double verify_born_identity(const ReferenceDevice& device, const Matrix& phi) {
    const int n = device.n();
    const int r = device.r();
    if (phi.rows() != n || phi.cols() != n)
        throw DimensionMismatch("Born matrix must be n x n");
    const Matrix& S = device.states.S;
    const Matrix& E = device.measurement.E;
    const Matrix& P = device.self_conditional;
    const double born = (S * phi * E - Matrix::Identity(r, r)).norm();
    const double one_inv = (P * phi * P - P).norm();
    return std::max(born, one_inv);
}

Vector apply_born_rule(const Matrix& conditional, const Matrix& phi,
                       const Vector& probabilities) {
    if (conditional.cols() != phi.rows() || phi.cols() != probabilities.size())
        throw DimensionMismatch("conditional, Born matrix and probabilities disagree");
    if (std::abs(probabilities.sum() - 1.0) > 1e-8)
        throw PreconditionFailure("probability vector must sum to 1");
    return conditional * (phi * probabilities);
}

QuasiProbability quasi_probability(const ReferenceDevice& device, const Vector& bloch_state) {
    const double alpha = resolve_alpha(device);
    if (bloch_state.size() != device.r())
        throw DimensionMismatch("state has wrong dimension");
    if (std::abs(bloch_state(0) - 1.0) > 1e-9)
        throw PreconditionFailure("state must be normalized");
    Vector probs = device.measurement.E * bloch_state;
    return QuasiProbability{alpha * probs + (1.0 - alpha) * device.measurement.w};
}

double protourgleichung_residual(const ReferenceDevice& device, const Matrix& phi,
                                 const std::vector<Vector>& sample_states) {
    double alpha;
    if (device.alpha)
        alpha = *device.alpha;
    else
        alpha = depolarizing_fit(device).alpha;

    double worst = 0.0;
    for (const Vector& state : sample_states) {
        Vector probs = device.measurement.E * state;
        Vector lhs = phi * probs;
        Vector rhs = alpha * probs + (1.0 - alpha) * device.measurement.w;
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

double ltp_deformation(const Matrix& phi, double p) {
    if (phi.rows() != phi.cols()) throw DimensionMismatch("Born matrix must be square");
    if (!std::isinf(p) && p < 1.0)
        throw PreconditionFailure("Schatten exponent must be >= 1 or infinity");
    const int n = static_cast<int>(phi.rows());
    Matrix A = Matrix::Identity(n, n) - phi;
    Eigen::JacobiSVD<Matrix> svd(A);
    const Vector& sv = svd.singularValues();
    if (std::isinf(p)) return sv.size() ? sv(0) : 0.0;
    double sum = 0.0;
    for (int i = 0; i < sv.size(); ++i) sum += std::pow(sv(i), p);
    return std::pow(sum, 1.0 / p);
}

}  // namespace gptref
