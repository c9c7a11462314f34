#include "gptref/device.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <string>

#include "gptref/errors.hpp"

namespace gptref {

namespace {

int numerical_rank(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double thresh = sv(0) * 1e-10;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return rank;
}

Matrix pseudoinverse(const Matrix& M) {
    return M.completeOrthogonalDecomposition().pseudoInverse();
}

// Smallest a >= 1 with feasible(a) true; feasibility is monotone in a
// because the states shrink toward the maximally mixed point.
double smallest_feasible_alpha_mag(const std::function<bool(double)>& feasible,
                                   const char* what) {
    if (feasible(1.0)) return 1.0;
    double lo = 1.0;
    double hi = 2.0;
    int guard = 0;
    while (!feasible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) throw NoFeasibleAlpha(what);
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi * (1.0 + 1e-6);
}

// Largest c in (0, cap] with feasible(c) true.
double largest_feasible_scale(const std::function<bool(double)>& feasible, double cap,
                              const char* what) {
    if (feasible(cap)) return cap;
    double hi = cap;
    double lo = 0.5 * cap;
    int guard = 0;
    while (!feasible(lo)) {
        hi = lo;
        lo *= 0.5;
        if (++guard > 200) throw NoFeasibleAlpha(what);
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

Matrix states_from_traceless(const Matrix& X) {
    Matrix S(X.rows() + 1, X.cols());
    S.row(0).setOnes();
    S.bottomRows(X.rows()) = X;
    return S;
}

}  // namespace

bool ReferenceMeasurement::unbiased(double tolerance) const {
    return (w.array() - 1.0 / n()).abs().maxCoeff() <= tolerance;
}

ReferenceMeasurement decompose_measurement(const GptSpace& space, const Matrix& effects) {
    const int r = space.dim();
    if (effects.cols() != r)
        throw DimensionMismatch("effect rows must have the space dimension");
    const int n = static_cast<int>(effects.rows());
    if (n < r)
        throw NotInformationallyComplete("informational completeness needs n >= r");

    RowVector sum = effects.colwise().sum();
    if ((sum - space.unit_effect()).cwiseAbs().maxCoeff() > 1e-10)
        throw NotAMeasurement("effects do not sum to the unit effect");
    for (int i = 0; i < n; ++i) {
        if (!space.effect_valid(effects.row(i)))
            throw ConeViolation("effect row " + std::to_string(i) + " fails the effect oracle");
    }
    if (numerical_rank(effects) < r)
        throw NotInformationallyComplete("effect matrix has rank below the space dimension");

    Vector w = effects.col(0);
    if (w.minCoeff() < 1e-12)
        throw ZeroBias("outcome with zero bias; weighted constructions are undefined");

    return ReferenceMeasurement{space, effects, w, effects.rightCols(r - 1)};
}

std::vector<std::string> device_violations(const ReferenceMeasurement& m,
                                           const ReferenceStates& s,
                                           std::optional<double> alpha) {
    std::vector<std::string> out;
    const int n = m.n();
    const int r = m.r();

    RowVector sum = m.E.colwise().sum();
    if ((sum - m.space.unit_effect()).cwiseAbs().maxCoeff() > 1e-10)
        out.push_back("effects-rows-sum-to-unit");
    bool effect_cone_ok = true;
    for (int i = 0; i < n && effect_cone_ok; ++i)
        effect_cone_ok = m.space.effect_valid(m.E.row(i));
    if (!effect_cone_ok) out.push_back("effect-cone");
    if (numerical_rank(m.E) < r) out.push_back("informational-completeness");
    if (m.w.minCoeff() < 1e-12) out.push_back("zero-bias");

    if ((s.S.row(0).array() - 1.0).abs().maxCoeff() > 1e-10)
        out.push_back("states-first-row-ones");
    bool state_cone_ok = true;
    for (int j = 0; j < n && state_cone_ok; ++j)
        state_cone_ok = m.space.state_in_cone(s.S.col(j));
    if (!state_cone_ok) out.push_back("state-cone");
    if (numerical_rank(s.S) < r) out.push_back("states-rank");

    Matrix P = m.E * s.S;
    if (P.minCoeff() < -1e-10) out.push_back("self-conditional-negative-entry");
    if ((P.colwise().sum().array() - 1.0).abs().maxCoeff() > 1e-9)
        out.push_back("self-conditional-column-sums");

    if (alpha) {
        if ((s.X * m.w).cwiseAbs().maxCoeff() > 1e-9)
            out.push_back("alpha-states-average");
        Matrix XZ = *alpha * s.X * m.Zt;
        if ((XZ - Matrix::Identity(r - 1, r - 1)).cwiseAbs().maxCoeff() > 1e-9)
            out.push_back("alpha-born-consistency");
    }
    return out;
}

ReferenceDevice make_device(ReferenceMeasurement m, ReferenceStates s,
                            std::optional<double> alpha) {
    if (s.S.rows() != m.r() || s.S.cols() != m.n())
        throw DimensionMismatch("state matrix must be r x n");
    auto violations = device_violations(m, s, alpha);
    if (!violations.empty()) {
        std::string what = "device invariants violated:";
        for (const auto& v : violations) what += " " + v;
        throw DeviceValidationError(what, violations);
    }
    ReferenceDevice device{std::move(m), std::move(s), alpha, {}, {}};
    device.channel = device.states.S * device.measurement.E;
    device.self_conditional = device.measurement.E * device.states.S;
    return device;
}

ReferenceDevice construct_depolarizing_states(const ReferenceMeasurement& m, Sign sign,
                                              const Matrix* nullspace_K) {
    const int n = m.n();
    const int r = m.r();

    Matrix L = pseudoinverse(m.Zt);  // (r-1) x n
    if (nullspace_K) {
        if (nullspace_K->rows() != r - 1 || nullspace_K->cols() != n)
            throw DimensionMismatch("nullspace corrector must be (r-1) x n");
        const double scale = std::max(1.0, nullspace_K->cwiseAbs().maxCoeff());
        if ((*nullspace_K * m.Zt).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvalidNullspace("corrector does not annihilate Zt");
        if ((*nullspace_K * m.w).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvalidNullspace("corrector does not annihilate w");
        L += *nullspace_K;
    }
    // Orthogonalize against w along u; u annihilates Zt so L Zt = I survives.
    L -= (L * m.w) * RowVector::Ones(n);

    const double branch = sign == Sign::plus ? 1.0 : -1.0;
    auto feasible = [&](double a) {
        Vector state(r);
        state(0) = 1.0;
        for (int i = 0; i < n; ++i) {
            state.tail(r - 1) = branch / a * L.col(i);
            if (!m.space.state_in_cone_strict(state)) return false;
        }
        return true;
    };
    const char* msg = sign == Sign::plus
                          ? "state cone never reached on the positive branch"
                          : "state cone never reached on the negative branch";
    const double mag = smallest_feasible_alpha_mag(feasible, msg);
    const double alpha = branch * mag;

    Matrix X = L / alpha;
    return make_device(m, ReferenceStates{states_from_traceless(X), X}, alpha);
}

ParallelUpdateResult parallel_update_states(const ReferenceMeasurement& m, Sign sign) {
    const int n = m.n();
    const int r = m.r();
    Vector winv = m.w.cwiseInverse();
    Matrix ZWinv = m.Zt.transpose() * winv.asDiagonal();  // (r-1) x n

    const double branch = sign == Sign::plus ? 1.0 : -1.0;
    auto feasible = [&](double c) {
        Vector state(r);
        state(0) = 1.0;
        for (int i = 0; i < n; ++i) {
            state.tail(r - 1) = branch * c * ZWinv.col(i);
            if (!m.space.state_in_cone_strict(state)) return false;
        }
        return true;
    };
    const double c = largest_feasible_scale(feasible, 1.0,
                                            "parallel-update states never reach the cone");
    Matrix X = branch * c * ZWinv;

    Matrix G = m.Zt.transpose() * winv.asDiagonal() * m.Zt;
    const double gamma = G.trace() / (r - 1);
    const bool wm =
        (G - gamma * Matrix::Identity(r - 1, r - 1)).norm() <= 1e-8 && gamma > 0.0;

    std::optional<double> alpha;
    if (wm) {
        const double candidate = 1.0 / (branch * c * gamma);
        Matrix XZ = candidate * X * m.Zt;
        if ((XZ - Matrix::Identity(r - 1, r - 1)).cwiseAbs().maxCoeff() <= 1e-9)
            alpha = candidate;
    }
    ReferenceDevice device = make_device(m, ReferenceStates{states_from_traceless(X), X}, alpha);
    return ParallelUpdateResult{std::move(device), c, wm};
}

DepolarizingFit depolarizing_fit(const ReferenceDevice& device) {
    const int r = device.r();
    const Matrix& C = device.channel;
    Matrix D = Matrix::Zero(r, r);  // |M)(I| in Bloch coordinates
    D(0, 0) = 1.0;

    const double beta = (C.trace() - 1.0) / (r - 1);
    Matrix F = beta * Matrix::Identity(r, r) + (1.0 - beta) * D;

    DepolarizingFit fit;
    fit.residual = (C - F).norm();
    fit.alpha = beta != 0.0 ? 1.0 / beta : std::numeric_limits<double>::infinity();
    fit.depolarizing = fit.residual <= tol::kVerify;
    if (device.space().kind() == SpaceKind::quantum_complex) {
        const double d = device.space().param();
        fit.cp_bounds_ok = beta >= -1.0 / (d * d - 1.0) - 1e-9 && beta <= 1.0 + 1e-9;
    }
    return fit;
}

Matrix self_conditional(const ReferenceDevice& device) { return device.self_conditional; }

EquiangularityReport equiangularity_check(const Matrix& P, double tolerance) {
    if (P.rows() != P.cols()) throw DimensionMismatch("equiangularity needs a square matrix");
    const int n = static_cast<int>(P.rows());
    EquiangularityReport report;
    report.diag_value = P.diagonal().mean();
    double off_sum = 0.0;
    double diag_dev = 0.0;
    double off_dev = 0.0;
    if (n > 1) {
        off_sum = (P.sum() - P.diagonal().sum()) / (n * (n - 1));
    }
    report.offdiag_value = off_sum;
    for (int i = 0; i < n; ++i) {
        diag_dev = std::max(diag_dev, std::abs(P(i, i) - report.diag_value));
        for (int j = 0; j < n; ++j)
            if (i != j) off_dev = std::max(off_dev, std::abs(P(i, j) - report.offdiag_value));
    }
    report.is_equiangular = diag_dev <= tolerance && off_dev <= tolerance;
    return report;
}

ReferenceMeasurement random_ic_measurement(const GptSpace& space, int n, std::uint64_t seed,
                                           const Vector* weights) {
    const int r = space.dim();
    if (n < r) throw NotInformationallyComplete("informational completeness needs n >= r");

    Rng rng(seed);
    Vector w(n);
    if (weights) {
        if (weights->size() != n) throw DimensionMismatch("weights must have length n");
        if (weights->minCoeff() <= 0.0) throw ZeroBias("weights must be strictly positive");
        w = *weights / weights->sum();
    } else {
        for (int i = 0; i < n; ++i) w(i) = -std::log(1.0 - rng.uniform());
        w /= w.sum();
        // keep biases bounded away from zero so W^{-1} stays tame
        w = 0.8 * w + Vector::Constant(n, 0.2 / n);
    }

    Matrix Z(n, r - 1);
    for (int attempt = 0; attempt < 16; ++attempt) {
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < r - 1; ++k) Z(i, k) = rng.normal();
            Z.row(i).normalize();
        }
        Z -= w * Z.colwise().sum();  // columns now sum to zero
        if (numerical_rank(Z) == r - 1) break;
    }

    auto feasible = [&](double t) {
        RowVector e(r);
        for (int i = 0; i < n; ++i) {
            e(0) = w(i);
            e.tail(r - 1) = t * Z.row(i);
            if (!space.effect_valid_strict(e)) return false;
        }
        return true;
    };
    double t = largest_feasible_scale(feasible, 1024.0, "no feasible effect scale");
    t *= 0.8;  // keep effects strictly interior

    Matrix E(n, r);
    E.col(0) = w;
    E.rightCols(r - 1) = t * Z;
    return decompose_measurement(space, E);
}

ReferenceMeasurement random_ic_measurement_unbiased(const GptSpace& space, int n,
                                                    std::uint64_t seed) {
    Vector w = Vector::Constant(n, 1.0 / n);
    return random_ic_measurement(space, n, seed, &w);
}

ReferenceDevice classical_identity_device(int m) {
    GptSpace space = GptSpace::classical(m);
    Matrix E = space.bloch().B_inv;  // row i is the i'th vertex indicator
    ReferenceMeasurement meas = decompose_measurement(space, E);
    Matrix S = space.bloch().B;  // column j is the j'th vertex state
    ReferenceStates states{S, S.bottomRows(m - 1)};
    return make_device(std::move(meas), std::move(states), 1.0);
}

ReferenceDevice classical_split_identity_device(int m, int n, std::uint64_t seed) {
    if (n < m) throw NotInformationallyComplete("refinement needs n >= m");
    GptSpace space = GptSpace::classical(m);
    Rng rng(seed);

    std::vector<int> vertex(n);
    for (int i = 0; i < m; ++i) vertex[i] = i;
    for (int i = m; i < n; ++i) vertex[i] = static_cast<int>(rng.next_u64() % m);

    // split each vertex indicator across its outcomes
    Vector lambda(n);
    for (int j = 0; j < m; ++j) {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            if (vertex[i] == j) {
                lambda(i) = rng.uniform(0.2, 1.0);
                total += lambda(i);
            }
        for (int i = 0; i < n; ++i)
            if (vertex[i] == j) lambda(i) /= total;
    }

    const Matrix& Binv = space.bloch().B_inv;
    const Matrix& B = space.bloch().B;
    Matrix E(n, m);
    Matrix S(m, n);
    for (int i = 0; i < n; ++i) {
        E.row(i) = lambda(i) * Binv.row(vertex[i]);
        S.col(i) = B.col(vertex[i]);
    }
    ReferenceMeasurement meas = decompose_measurement(space, E);
    ReferenceStates states{S, S.bottomRows(m - 1)};
    return make_device(std::move(meas), std::move(states), 1.0);
}

}  // namespace gptref
