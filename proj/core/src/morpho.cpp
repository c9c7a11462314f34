#include "gptref/morpho.hpp"

#include <cmath>
#include <functional>

#include "gptref/errors.hpp"

namespace gptref {

namespace {

double largest_feasible_scale(const std::function<bool(double)>& feasible, double start,
                              const char* what) {
    double lo;
    double hi;
    if (feasible(start)) {
        lo = start;
        hi = 2.0 * start;
        int guard = 0;
        while (feasible(hi)) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 200) return lo;
        }
    } else {
        hi = start;
        lo = 0.5 * start;
        int guard = 0;
        while (!feasible(lo)) {
            hi = lo;
            lo *= 0.5;
            if (++guard > 200) throw NoFeasibleAlpha(what);
        }
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

}  // namespace

MorphoReport weight_morphophoricity_check(const ReferenceMeasurement& m) {
    const int r = m.r();
    if (m.w.minCoeff() < 1e-12) throw ZeroBias("weight-morphophoricity needs positive biases");
    Vector winv = m.w.cwiseInverse();
    Matrix G = m.Zt.transpose() * winv.asDiagonal() * m.Zt;
    const double gamma = G.trace() / (r - 1);

    MorphoReport report;
    report.residual = (G - gamma * Matrix::Identity(r - 1, r - 1)).norm();
    report.is_weight_morphophoric = report.residual <= tol::kVerify && gamma > 0.0;
    report.alpha_c_product = gamma > 0.0 ? 1.0 / gamma : 0.0;
    const bool unbiased = m.unbiased();
    report.is_morphophoric = report.is_weight_morphophoric && unbiased;
    report.similarity_ratio =
        unbiased && report.is_weight_morphophoric ? gamma / m.n() : 0.0;
    return report;
}

double similarity_residual(const ReferenceMeasurement& m,
                           const std::vector<std::pair<Vector, Vector>>& state_pairs) {
    MorphoReport report = weight_morphophoricity_check(m);
    if (!report.is_weight_morphophoric)
        throw PreconditionFailure("measurement is not weight-morphophoric");
    const int r = m.r();
    Vector metric = report.alpha_c_product * m.w.cwiseInverse();  // alpha c W^{-1}

    double worst = 0.0;
    for (const auto& [rho, sigma] : state_pairs) {
        if (rho.size() != r || sigma.size() != r)
            throw DimensionMismatch("state has wrong dimension");
        Vector diff = m.E * (rho - sigma);
        const double lhs = diff.cwiseProduct(metric.cwiseProduct(diff)).sum();
        const double rhs = (rho - sigma).tail(r - 1).squaredNorm();
        worst = std::max(worst, std::abs(lhs - rhs));
        if (m.unbiased()) {
            worst = std::max(worst,
                             std::abs(diff.squaredNorm() - report.similarity_ratio * rhs));
        }
    }
    return worst;
}

ReferenceMeasurement construct_weight_morphophoric(const GptSpace& space, int n,
                                                   const Vector& weights,
                                                   std::uint64_t seed) {
    const int r = space.dim();
    if (n < r) throw NotInformationallyComplete("weight-morphophoric needs n >= r");
    if (weights.size() != n) throw DimensionMismatch("weights must have length n");
    if (weights.minCoeff() <= 0.0) throw ZeroBias("weights must be strictly positive");
    Vector w = weights / weights.sum();

    // Orthonormal columns orthogonal to W^{1/2} u, so the rows of E sum to
    // the unit effect and Z W^{-1} Zt lands exactly on a multiple of I.
    Vector anchor = w.cwiseSqrt().normalized();
    Rng rng(seed);
    Matrix Q(n, r - 1);
    for (int col = 0; col < r - 1; ++col) {
        Vector v(n);
        for (;;) {
            for (int i = 0; i < n; ++i) v(i) = rng.normal();
            v -= anchor.dot(v) * anchor;
            for (int pass = 0; pass < 2; ++pass)
                for (int k = 0; k < col; ++k) v -= Q.col(k).dot(v) * Q.col(k);
            if (v.norm() > 1e-8) break;
        }
        Q.col(col) = v.normalized();
    }
    Matrix Zt0 = w.cwiseSqrt().asDiagonal() * Q;  // n x (r-1)

    auto effect_feasible = [&](double t) {
        RowVector e(r);
        for (int i = 0; i < n; ++i) {
            e(0) = w(i);
            e.tail(r - 1) = t * Zt0.row(i);
            if (!space.effect_valid_strict(e)) return false;
        }
        return true;
    };
    const double t_e =
        largest_feasible_scale(effect_feasible, 1.0, "no valid effect scale exists");

    // Parallel-update state block at unit scale: columns of Q^T W^{-1/2}.
    Matrix X0 = Q.transpose() * w.cwiseSqrt().cwiseInverse().asDiagonal();
    auto state_feasible = [&](double t) {
        Vector s(r);
        s(0) = 1.0;
        for (int i = 0; i < n; ++i) {
            s.tail(r - 1) = t * X0.col(i);
            if (!space.state_in_cone_strict(s)) return false;
        }
        return true;
    };
    const double t_s_max =
        largest_feasible_scale(state_feasible, t_e, "no valid state scale exists");
    (void)t_s_max;  // both scales exist; the split c = t_s/t_e is chosen at
                    // parallel_update_states time, capped at 1

    Matrix E(n, r);
    E.col(0) = w;
    E.rightCols(r - 1) = t_e * Zt0;
    return decompose_measurement(space, E);
}

std::vector<SignSolution> fixed_up_to_sign_check(const ReferenceMeasurement& m) {
    if (m.n() != m.r()) throw NotAMic("fixed-up-to-sign applies to MIC measurements");
    MorphoReport report = weight_morphophoricity_check(m);
    if (!report.is_weight_morphophoric)
        throw PreconditionFailure("measurement is not weight-morphophoric");

    ParallelUpdateResult plus = parallel_update_states(m, Sign::plus);
    const double alpha_plus = report.alpha_c_product / plus.c;

    std::vector<SignSolution> out;
    out.push_back(SignSolution{plus.device.states, alpha_plus, plus.c});

    Matrix Xm = -plus.device.states.X;
    bool minus_valid = true;
    Vector s(m.r());
    s(0) = 1.0;
    for (int i = 0; i < m.n() && minus_valid; ++i) {
        s.tail(m.r() - 1) = Xm.col(i);
        minus_valid = m.space.state_in_cone(s);
    }
    if (minus_valid) {
        Matrix Sm(m.r(), m.n());
        Sm.row(0).setOnes();
        Sm.bottomRows(m.r() - 1) = Xm;
        out.push_back(SignSolution{ReferenceStates{Sm, Xm}, -alpha_plus, plus.c});
    }
    return out;
}

SimplexEmbeddingReport simplex_embedding_check(const ReferenceDevice& device,
                                               std::uint64_t seed) {
    DepolarizingFit fit = depolarizing_fit(device);
    SimplexEmbeddingReport report;
    report.alpha = fit.alpha;
    report.fit_residual = fit.residual;
    report.embeddable = fit.depolarizing && std::abs(fit.alpha - 1.0) <= tol::kVerify;
    if (!report.embeddable) return report;

    const Matrix& P = device.self_conditional;
    report.projector_residual = (P * P - P).norm();

    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        RowVector eta = device.space().sample_effect(rng);
        Vector rho = device.space().sample_state(rng);
        const double direct = pair(eta, rho);
        const double embedded =
            ((eta * device.states.S) * (device.measurement.E * rho))(0, 0);
        worst = std::max(worst, std::abs(direct - embedded));
    }
    report.pairing_residual = worst;
    return report;
}

}  // namespace gptref
