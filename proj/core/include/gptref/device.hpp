#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gptref/space.hpp"

namespace gptref {

/// An informationally complete measurement in Bloch coordinates: rows of E
/// are the effects, w is the bias column E|M), Zt the traceless block.
struct ReferenceMeasurement {
    GptSpace space;
    Matrix E;   // n x r
    Vector w;   // n
    Matrix Zt;  // n x (r-1)

    int n() const { return static_cast<int>(E.rows()); }
    int r() const { return static_cast<int>(E.cols()); }
    bool unbiased(double tol = 1e-9) const;
};

/// Splits an effect matrix into bias and traceless blocks and verifies the
/// measurement invariants. Throws NotAMeasurement, ConeViolation,
/// NotInformationallyComplete or ZeroBias.
ReferenceMeasurement decompose_measurement(const GptSpace& space, const Matrix& effects);

struct ReferenceStates {
    Matrix S;  // r x n, columns are states; first row all ones
    Matrix X;  // (r-1) x n traceless block
};

/// Measure-and-prepare device: perform the reference measurement, prepare
/// the matching reference state. alpha is present exactly when the device
/// is depolarizing by construction.
struct ReferenceDevice {
    ReferenceMeasurement measurement;
    ReferenceStates states;
    std::optional<double> alpha;
    Matrix channel;           // r x r: S E
    Matrix self_conditional;  // n x n: E S, i.e. P(E|E)

    const GptSpace& space() const { return measurement.space; }
    int n() const { return measurement.n(); }
    int r() const { return measurement.r(); }
    bool is_mic() const { return n() == r(); }
};

/// Named invariant violations for a prospective device; empty means valid.
std::vector<std::string> device_violations(const ReferenceMeasurement& m,
                                           const ReferenceStates& s,
                                           std::optional<double> alpha);

/// Assembles channel and self-conditional matrices and validates all
/// device invariants; throws DeviceValidationError listing every failure.
ReferenceDevice make_device(ReferenceMeasurement m, ReferenceStates s,
                            std::optional<double> alpha);

enum class Sign { plus, minus };

/// Universal depolarizing-state construction: X = L/alpha with L a left
/// inverse of Zt annihilating w (the Moore-Penrose choice plus an optional
/// nullspace corrector K with K Zt = 0, K w = 0), alpha the smallest
/// |alpha| >= 1 on the chosen branch for which every column of S is a
/// valid state.
ReferenceDevice construct_depolarizing_states(const ReferenceMeasurement& m,
                                              Sign sign = Sign::plus,
                                              const Matrix* nullspace_K = nullptr);

struct ParallelUpdateResult {
    ReferenceDevice device;  // alpha absent when not weight-morphophoric
    double c = 1.0;
    bool weight_morphophoric = false;
};

/// States proportional to effects modulo a depolarization scalar:
/// X = +- c Z W^{-1} with c closest to 1 keeping all columns valid.
ParallelUpdateResult parallel_update_states(const ReferenceMeasurement& m,
                                            Sign sign = Sign::plus);

struct DepolarizingFit {
    double alpha = 0.0;
    double residual = 0.0;
    bool depolarizing = false;          // residual <= 1e-8
    std::optional<bool> cp_bounds_ok;   // quantum_complex: -1/(d^2-1) <= 1/alpha <= 1
};

/// Least-squares fit of the channel against (1/a) I + (1 - 1/a) |M)(I|.
DepolarizingFit depolarizing_fit(const ReferenceDevice& device);

Matrix self_conditional(const ReferenceDevice& device);

struct EquiangularityReport {
    bool is_equiangular = false;
    double diag_value = 0.0;
    double offdiag_value = 0.0;
};

EquiangularityReport equiangularity_check(const Matrix& P, double tolerance);

/// Seeded full-rank measurement generator. Biases come from a seeded draw
/// bounded away from zero unless fixed weights are supplied.
ReferenceMeasurement random_ic_measurement(const GptSpace& space, int n, std::uint64_t seed,
                                           const Vector* weights = nullptr);
ReferenceMeasurement random_ic_measurement_unbiased(const GptSpace& space, int n,
                                                    std::uint64_t seed);

/// Read off the vertex, re-prepare the vertex: the trivial classical device.
ReferenceDevice classical_identity_device(int m);

/// Overcomplete refinement of the classical identity: n >= m outcomes, each
/// a scaled vertex indicator, matched with vertex re-preparations. The
/// channel is the identity, so alpha = 1.
ReferenceDevice classical_split_identity_device(int m, int n, std::uint64_t seed);

}  // namespace gptref
