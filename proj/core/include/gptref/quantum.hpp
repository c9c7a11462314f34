#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "gptref/device.hpp"
#include "gptref/space.hpp"

namespace gptref::quantum {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Hermitian operator basis {I, G_1, ..., G_{d^2-1}} with the G_k traceless
/// and tr(G_j G_k) = 2 delta_jk; for d = 2 these are the Pauli matrices.
std::vector<CMatrix> operator_basis_complex(int d);

/// Symmetric operator basis {I, G_1, ..., G_{d(d+1)/2 - 1}}, same scaling.
std::vector<Matrix> operator_basis_real(int d);

// Operator picture <-> Bloch coordinates. States carry the raw traceless
// expansion (tr rho, tr G_k rho); effects carry (tr E / d, tr G_k E / 2) so
// that the Euclidean pairing reproduces tr(E rho).
Vector state_to_bloch(const CMatrix& rho);
RowVector effect_to_bloch(const CMatrix& E);
CMatrix state_from_bloch(const Vector& bloch);
CMatrix effect_from_bloch(const RowVector& bloch);
Vector state_to_bloch_real(const Matrix& rho);
RowVector effect_to_bloch_real(const Matrix& E);
Matrix state_from_bloch_real(const Vector& bloch);
Matrix effect_from_bloch_real(const RowVector& bloch);

/// Row vectorization: rows of A laid end to end, so (A|B) = tr(A^dag B).
CVector vectorize(const CMatrix& A);
Vector vectorize_real(const Matrix& A);

CMatrix swap_operator(int d);
CMatrix symmetric_projector(int d);  // (I + SWAP)/2
Matrix swap_operator_real(int d);
Matrix symmetric_projector_real(int d);

/// Transpose of the second tensor factor of a d^2 x d^2 matrix.
CMatrix partial_transpose(const CMatrix& M, int d);

/// The exact tetrahedral qubit SIC device: w = u/4,
/// Zt = (1/(4 sqrt 3)) [[1,1,1],[1,-1,-1],[-1,-1,1],[-1,1,-1]],
/// parallel-update states, alpha = 3.
ReferenceDevice sic_d2();

/// Six-outcome qubit measurement (I +- sigma_k)/6 with the pure Pauli
/// eigenstates as parallel-update preparations.
ReferenceDevice pauli6_d2();

CVector bundled_fiducial(int d);  // d in {2, 3}

/// Weyl-Heisenberg orbit of a fiducial vector, validated as equiangular
/// before any device is built; throws NotASic otherwise.
ReferenceDevice wh_sic(int d);
ReferenceDevice wh_sic(int d, const CVector& fiducial);

/// Real-QM fixtures: the trine (d = 2) and the icosahedral line set (d = 3),
/// both pure real SIC devices.
ReferenceDevice real_sic_d2();
ReferenceDevice real_sic_d3();

struct DesignReport {
    int t = 2;
    CMatrix lhs;     // sum_i w_i S_i (x) S_i
    CMatrix target;  // design projector expression
    double residual = 0.0;
    bool certified = false;  // residual <= 1e-8
};

/// Weighted projective 2-design test: the second moment of the state set
/// must match the Haar average. States must be pure (tr S^2 >= 1 - 1e-10).
DesignReport two_design_check(const std::vector<CMatrix>& states, const Vector& weights);
DesignReport two_design_check_real(const std::vector<Matrix>& states, const Vector& weights);

/// Runs the applicable design check on a quantum device, using the biases
/// tr(E_i)/d as weights.
DesignReport device_two_design_check(const ReferenceDevice& device);

/// d+1 for complex quantum theory, (d+2)/2 for real.
double pure_parallel_alpha(int d, SpaceKind kind);

/// Complete positivity window for a depolarizing channel in dimension d.
bool depolarizing_bounds_check(double alpha, int d);

/// Born identity in vectorized-operator coordinates: S Phi E equals the
/// identity for complex devices and the symmetric-subspace projector for
/// real ones; returns the Frobenius residual.
double vectorized_born_identity_residual(const ReferenceDevice& device, const Matrix& phi);

}  // namespace gptref::quantum
