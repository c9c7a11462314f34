#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gptref/rng.hpp"

namespace gptref {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class SpaceKind { classical, quantum_complex, quantum_real, square, ball, custom };

std::string to_string(SpaceKind kind);

/// Invertible change of basis taking native coordinates to Bloch
/// coordinates, in which the unit effect reads (1, 0, ..., 0). The first
/// row of B is the native unit effect; the remaining rows (traceless_basis)
/// are orthonormal and orthogonal to it.
struct BlochForm {
    Matrix B;                // r x r
    Matrix B_inv;            // r x r
    Matrix traceless_basis;  // (r-1) x r

    Vector state_to_bloch(const Vector& native) const { return B * native; }
    Vector state_to_native(const Vector& bloch) const { return B_inv * bloch; }
    RowVector effect_to_bloch(const RowVector& native) const { return native * B_inv; }
    RowVector effect_to_native(const RowVector& bloch) const { return bloch * B; }
};

/// A finite-dimensional theory: states form the base of a cone cut out by
/// the normalization functional, effects live in the order interval
/// [0, I] of the dual cone, and probabilities are bilinear pairings.
///
/// All public predicates and vectors use Bloch coordinates of the space's
/// canonical frame. Instances are immutable and cheaply copyable; every
/// operation is const and safe to call concurrently.
class GptSpace {
public:
    static GptSpace classical(int m);
    static GptSpace quantum_complex(int d);
    static GptSpace quantum_real(int d);
    static GptSpace square();
    static GptSpace ball(int k);
    static GptSpace custom(int r, double norm_trace,
                           std::function<bool(const Vector&, double)> state_cone,
                           std::function<bool(const RowVector&, double)> effect_interval);

    SpaceKind kind() const;
    int param() const;  // m for classical, d for quantum kinds, k for ball
    int dim() const;    // ambient real dimension r
    double norm_trace() const;  // (I|I)

    const BlochForm& bloch() const;
    RowVector native_unit_effect() const;

    /// (1, 0, ..., 0) as a covector.
    RowVector unit_effect() const;
    /// |M) = |I)/(I|I): (1, 0, ..., 0) in Bloch coordinates.
    Vector maximally_mixed() const;

    /// Cone membership with the standard boundary slack (1e-9).
    bool state_in_cone(const Vector& bloch_state) const;
    /// Membership in [0, I] with the standard boundary slack.
    bool effect_valid(const RowVector& bloch_effect) const;
    /// Cone membership plus normalization (I|v) = 1.
    bool state_valid(const Vector& bloch_state) const;

    /// Tight-slack (1e-12) variants used by boundary searches, so that
    /// constructed states never sit measurably outside the true cone.
    bool state_in_cone_strict(const Vector& bloch_state) const;
    bool effect_valid_strict(const RowVector& bloch_effect) const;

    Vector sample_state(Rng& rng) const;
    RowVector sample_effect(Rng& rng) const;

    std::string describe() const;

private:
    struct Impl;
    explicit GptSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

GptSpace make_space(SpaceKind kind, int param = 0);

/// Builds a Bloch form for the space: the canonical deterministic
/// completion when no seed is given, otherwise a seeded random orthonormal
/// completion of the traceless subspace (any choice is equivalent up to
/// rotation of the traceless block).
BlochForm bloch_transform(const GptSpace& space,
                          std::optional<std::uint64_t> basis_seed = std::nullopt);

/// (E|S): probability of an effect on a state. Throws DimensionMismatch.
double pair(const RowVector& effect, const Vector& state);

namespace tol {
inline constexpr double kConeSlack = 1e-9;    // public membership slack
inline constexpr double kConstruct = 1e-12;   // slack used while searching boundaries
inline constexpr double kBuild = 1e-9;        // construction residuals
inline constexpr double kVerify = 1e-8;       // verification thresholds
inline constexpr double kDisprove = 1e-4;     // residual must exceed this to refute
}  // namespace tol

}  // namespace gptref
