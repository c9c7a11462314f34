#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gptref/device.hpp"

namespace gptref {

struct MorphoReport {
    bool is_weight_morphophoric = false;
    double alpha_c_product = 0.0;   // Z W^{-1} Zt = (1/(alpha c)) I
    bool is_morphophoric = false;   // weight-morphophoric and unbiased
    double similarity_ratio = 0.0;  // 1/(alpha c n) for unbiased measurements, else 0
    double residual = 0.0;          // ||Z W^{-1} Zt - gamma I||_F
};

/// Tight-frame test under the weighted metric: the measurement map
/// preserves squared distances w.r.t. M = alpha c W^{-1} exactly when
/// Z W^{-1} Zt is proportional to the identity.
MorphoReport weight_morphophoricity_check(const ReferenceMeasurement& m);

/// max over pairs of | ||P_rho - P_sigma||^2_M - ||rho0 - sigma0||^2 |;
/// for unbiased measurements the Euclidean similarity factor 1/(alpha c n)
/// is checked as well and folded into the returned residual.
double similarity_residual(const ReferenceMeasurement& m,
                           const std::vector<std::pair<Vector, Vector>>& state_pairs);

/// Existence construction: a weight-morphophoric measurement with the given
/// outcome count and biases, built from a seeded random orthonormal frame
/// and depolarized until effects and parallel-update states are valid.
ReferenceMeasurement construct_weight_morphophoric(const GptSpace& space, int n,
                                                   const Vector& weights, std::uint64_t seed);

struct SignSolution {
    ReferenceStates states;
    double alpha = 0.0;
    double c = 0.0;
};

/// For a weight-morphophoric MIC the depolarizing states are X = +-c Z W^{-1};
/// returns the branches whose states pass the cone oracle (one or two).
std::vector<SignSolution> fixed_up_to_sign_check(const ReferenceMeasurement& m);

struct SimplexEmbeddingReport {
    bool embeddable = false;
    double alpha = 0.0;
    double fit_residual = 0.0;
    double projector_residual = 0.0;  // ||P^2 - P||_F, checked when embeddable
    double pairing_residual = 0.0;    // max |(eta|rho) - P(S) P(E)| over sampled pairs
};

/// alpha = 1 classicality test: the device embeds the state space into the
/// probability simplex preserving all probabilities.
SimplexEmbeddingReport simplex_embedding_check(const ReferenceDevice& device,
                                               std::uint64_t seed = 20240101);

}  // namespace gptref
