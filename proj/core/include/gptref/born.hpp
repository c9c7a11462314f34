#pragma once

#include <string>
#include <vector>

#include "gptref/device.hpp"

namespace gptref {

enum class BornProvenance { natural, simple, minimal_frobenius, generic_one_inverse, mic_inverse };

std::string to_string(BornProvenance p);

/// A matrix satisfying P Phi P = P, equivalently S Phi E = I for full-rank
/// devices: it transports reference probabilities to any other measurement.
struct BornMatrix {
    Matrix phi;
    BornProvenance provenance;
};

/// n = r: the constraint pins Phi = P^{-1}.
BornMatrix mic_born_matrix(const ReferenceDevice& device);

/// Phi = w u^T + alpha^2 Zt X: a group inverse of P with spectrum
/// {1, alpha (r-1 times), 0 (n-r times)}.
BornMatrix natural_born_matrix(const ReferenceDevice& device);

/// Phi = I + alpha (alpha - 1) Zt X.
BornMatrix simple_born_matrix(const ReferenceDevice& device);

/// Closed-form Frobenius minimizer for unbiased depolarizing devices:
/// Phi = I + ((alpha-1)/alpha) X^T (X X^T)^{-1} (Z Z^T)^{-1} Z.
/// Throws UnsupportedBias for biased measurements.
BornMatrix minimal_frobenius_born_matrix(const ReferenceDevice& device);

/// Exact minimizer of ||I - Phi||_p subject to P Phi P = P. For p = 2 the
/// constraint is affine and the solution is a direct SVD-block projection;
/// p = 1 and p = inf run a best-effort projected subgradient refinement
/// with no optimality certificate.
BornMatrix minimal_born_matrix_numeric(const Matrix& P, double p = 2.0);

/// SVD parameterization of the full {1}-inverse family of P: free blocks
/// (r x (n-r)), ((n-r) x r), ((n-r) x (n-r)) default to zero, which gives
/// the Moore-Penrose pseudoinverse.
BornMatrix generic_one_inverse(const Matrix& P, const Matrix* A = nullptr,
                               const Matrix* B = nullptr, const Matrix* C = nullptr);

/// max(||S Phi E - I||_F, ||P Phi P - P||_F).
double verify_born_identity(const ReferenceDevice& device, const Matrix& phi);

/// P(A) = P(A|E) Phi P(E).
Vector apply_born_rule(const Matrix& conditional, const Matrix& phi,
                       const Vector& probabilities);

struct QuasiProbability {
    Vector W;  // entries may be negative; they sum to 1
};

/// W(E) = alpha P(E) + (1 - alpha) w for a depolarizing device.
QuasiProbability quasi_probability(const ReferenceDevice& device, const Vector& bloch_state);

/// max over sample states of ||Phi P(E) - [alpha P(E) + (1-alpha) w]||_inf;
/// small residual certifies that Phi acts term-wise affinely.
double protourgleichung_residual(const ReferenceDevice& device, const Matrix& phi,
                                 const std::vector<Vector>& sample_states);

/// Schatten p-norm of I - Phi (p >= 1, or infinity for the spectral norm).
double ltp_deformation(const Matrix& phi, double p);

/// The device's alpha, or the fitted one when the fit certifies the
/// channel as depolarizing; throws PreconditionFailure otherwise.
double resolve_alpha(const ReferenceDevice& device);

}  // namespace gptref
