#include "gptref/space.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <utility>

#include "gptref/errors.hpp"
#include "gptref/quantum.hpp"

namespace gptref {

namespace {

// Orthonormal basis of the hyperplane orthogonal to the covector, with a
// deterministic sign convention so repeated runs agree bit for bit.
Matrix orthonormal_complement(const RowVector& covector) {
    const int r = static_cast<int>(covector.size());
    Vector dir = covector.transpose().normalized();
    // Aligned case: the complement is just the remaining coordinate axes.
    if (std::abs(dir(0) - 1.0) < 1e-14 && dir.tail(r - 1).norm() < 1e-14) {
        Matrix T = Matrix::Zero(r - 1, r);
        T.rightCols(r - 1).setIdentity();
        return T;
    }
    Matrix A(r, r + 1);
    A.col(0) = dir;
    A.rightCols(r).setIdentity();
    Eigen::HouseholderQR<Matrix> qr(A);
    Matrix Q = qr.householderQ() * Matrix::Identity(r, r);
    Matrix T = Q.rightCols(r - 1).transpose();
    for (int i = 0; i < T.rows(); ++i) {
        int j = 0;
        T.row(i).cwiseAbs().maxCoeff(&j);
        if (T(i, j) < 0) T.row(i) = -T.row(i);
    }
    return T;
}

BlochForm assemble_bloch(const RowVector& native_unit, const Matrix& traceless) {
    BlochForm form;
    const int r = static_cast<int>(native_unit.size());
    form.B.resize(r, r);
    form.B.row(0) = native_unit;
    form.B.bottomRows(r - 1) = traceless;
    form.B_inv = form.B.inverse();
    form.traceless_basis = traceless;
    return form;
}

}  // namespace

std::string to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::classical: return "classical";
        case SpaceKind::quantum_complex: return "quantum_complex";
        case SpaceKind::quantum_real: return "quantum_real";
        case SpaceKind::square: return "square";
        case SpaceKind::ball: return "ball";
        case SpaceKind::custom: return "custom";
    }
    return "unknown";
}

struct GptSpace::Impl {
    SpaceKind kind = SpaceKind::custom;
    int param = 0;
    int r = 0;
    double norm_trace = 1.0;
    RowVector native_unit;
    BlochForm bloch;
    std::vector<quantum::CMatrix> basis_c;  // quantum_complex
    std::vector<Matrix> basis_r;            // quantum_real
    std::function<bool(const Vector&, double)> custom_state;
    std::function<bool(const RowVector&, double)> custom_effect;

    bool state_in_cone(const Vector& v, double slack) const {
        switch (kind) {
            case SpaceKind::classical: {
                Vector p = bloch.B_inv * v;
                return p.minCoeff() >= -slack;
            }
            case SpaceKind::quantum_complex: {
                const int d = param;
                quantum::CMatrix rho = quantum::CMatrix::Identity(d, d) * (v(0) / d);
                for (int k = 1; k < r; ++k) rho += 0.5 * v(k) * basis_c[k];
                Eigen::SelfAdjointEigenSolver<quantum::CMatrix> es(rho, Eigen::EigenvaluesOnly);
                return es.eigenvalues().minCoeff() >= -slack;
            }
            case SpaceKind::quantum_real: {
                const int d = param;
                Matrix rho = Matrix::Identity(d, d) * (v(0) / d);
                for (int k = 1; k < r; ++k) rho += 0.5 * v(k) * basis_r[k];
                Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
                return es.eigenvalues().minCoeff() >= -slack;
            }
            case SpaceKind::square:
                return std::abs(v(1)) <= v(0) + slack && std::abs(v(2)) <= v(0) + slack;
            case SpaceKind::ball:
                return v.tail(r - 1).norm() <= v(0) + slack;
            case SpaceKind::custom:
                return custom_state(v, slack);
        }
        return false;
    }

    bool effect_valid(const RowVector& e, double slack) const {
        switch (kind) {
            case SpaceKind::classical: {
                RowVector native = e * bloch.B;
                return native.minCoeff() >= -slack && native.maxCoeff() <= 1.0 + slack;
            }
            case SpaceKind::quantum_complex: {
                const int d = param;
                quantum::CMatrix op = quantum::CMatrix::Identity(d, d) * e(0);
                for (int k = 1; k < r; ++k) op += e(k) * basis_c[k];
                Eigen::SelfAdjointEigenSolver<quantum::CMatrix> es(op, Eigen::EigenvaluesOnly);
                return es.eigenvalues().minCoeff() >= -slack &&
                       es.eigenvalues().maxCoeff() <= 1.0 + slack;
            }
            case SpaceKind::quantum_real: {
                const int d = param;
                Matrix op = Matrix::Identity(d, d) * e(0);
                for (int k = 1; k < r; ++k) op += e(k) * basis_r[k];
                Eigen::SelfAdjointEigenSolver<Matrix> es(op, Eigen::EigenvaluesOnly);
                return es.eigenvalues().minCoeff() >= -slack &&
                       es.eigenvalues().maxCoeff() <= 1.0 + slack;
            }
            case SpaceKind::square: {
                const double l1 = std::abs(e(1)) + std::abs(e(2));
                return l1 <= e(0) + slack && l1 <= 1.0 - e(0) + slack;
            }
            case SpaceKind::ball: {
                const double norm = e.tail(r - 1).norm();
                return norm <= e(0) + slack && norm <= 1.0 - e(0) + slack;
            }
            case SpaceKind::custom:
                return custom_effect(e, slack);
        }
        return false;
    }
};

GptSpace GptSpace::classical(int m) {
    if (m < 2) throw Error("classical(m) requires m >= 2");
    auto impl = std::make_shared<Impl>();
    impl->kind = SpaceKind::classical;
    impl->param = m;
    impl->r = m;
    impl->norm_trace = m;
    impl->native_unit = RowVector::Ones(m);
    impl->bloch = assemble_bloch(impl->native_unit, orthonormal_complement(impl->native_unit));
    return GptSpace(std::move(impl));
}

GptSpace GptSpace::quantum_complex(int d) {
    if (d < 2) throw Error("quantum_complex(d) requires d >= 2");
    auto impl = std::make_shared<Impl>();
    impl->kind = SpaceKind::quantum_complex;
    impl->param = d;
    impl->r = d * d;
    impl->norm_trace = d;
    impl->native_unit = RowVector::Zero(impl->r);
    impl->native_unit(0) = 1.0;
    impl->basis_c = quantum::operator_basis_complex(d);
    impl->bloch = assemble_bloch(impl->native_unit, orthonormal_complement(impl->native_unit));
    return GptSpace(std::move(impl));
}

GptSpace GptSpace::quantum_real(int d) {
    if (d < 2) throw Error("quantum_real(d) requires d >= 2");
    auto impl = std::make_shared<Impl>();
    impl->kind = SpaceKind::quantum_real;
    impl->param = d;
    impl->r = d * (d + 1) / 2;
    impl->norm_trace = d;
    impl->native_unit = RowVector::Zero(impl->r);
    impl->native_unit(0) = 1.0;
    impl->basis_r = quantum::operator_basis_real(d);
    impl->bloch = assemble_bloch(impl->native_unit, orthonormal_complement(impl->native_unit));
    return GptSpace(std::move(impl));
}

GptSpace GptSpace::square() {
    auto impl = std::make_shared<Impl>();
    impl->kind = SpaceKind::square;
    impl->param = 0;
    impl->r = 3;
    impl->norm_trace = 1.0;
    impl->native_unit = RowVector::Zero(3);
    impl->native_unit(0) = 1.0;
    impl->bloch = assemble_bloch(impl->native_unit, orthonormal_complement(impl->native_unit));
    return GptSpace(std::move(impl));
}

GptSpace GptSpace::ball(int k) {
    if (k < 2) throw Error("ball(k) requires k >= 2");
    auto impl = std::make_shared<Impl>();
    impl->kind = SpaceKind::ball;
    impl->param = k;
    impl->r = k + 1;
    impl->norm_trace = 1.0;
    impl->native_unit = RowVector::Zero(impl->r);
    impl->native_unit(0) = 1.0;
    impl->bloch = assemble_bloch(impl->native_unit, orthonormal_complement(impl->native_unit));
    return GptSpace(std::move(impl));
}

GptSpace GptSpace::custom(int r, double norm_trace,
                          std::function<bool(const Vector&, double)> state_cone,
                          std::function<bool(const RowVector&, double)> effect_interval) {
    if (r < 2) throw Error("custom space requires r >= 2");
    auto impl = std::make_shared<Impl>();
    impl->kind = SpaceKind::custom;
    impl->param = 0;
    impl->r = r;
    impl->norm_trace = norm_trace;
    impl->native_unit = RowVector::Zero(r);
    impl->native_unit(0) = 1.0;
    impl->custom_state = std::move(state_cone);
    impl->custom_effect = std::move(effect_interval);
    impl->bloch = assemble_bloch(impl->native_unit, orthonormal_complement(impl->native_unit));
    return GptSpace(std::move(impl));
}

SpaceKind GptSpace::kind() const { return impl_->kind; }
int GptSpace::param() const { return impl_->param; }
int GptSpace::dim() const { return impl_->r; }
double GptSpace::norm_trace() const { return impl_->norm_trace; }
const BlochForm& GptSpace::bloch() const { return impl_->bloch; }
RowVector GptSpace::native_unit_effect() const { return impl_->native_unit; }

RowVector GptSpace::unit_effect() const {
    RowVector e = RowVector::Zero(impl_->r);
    e(0) = 1.0;
    return e;
}

Vector GptSpace::maximally_mixed() const {
    Vector v = Vector::Zero(impl_->r);
    v(0) = 1.0;
    return v;
}

bool GptSpace::state_in_cone(const Vector& v) const {
    if (v.size() != impl_->r) throw DimensionMismatch("state has wrong dimension");
    return impl_->state_in_cone(v, tol::kConeSlack);
}

bool GptSpace::effect_valid(const RowVector& e) const {
    if (e.size() != impl_->r) throw DimensionMismatch("effect has wrong dimension");
    return impl_->effect_valid(e, tol::kConeSlack);
}

bool GptSpace::state_valid(const Vector& v) const {
    if (v.size() != impl_->r) throw DimensionMismatch("state has wrong dimension");
    return std::abs(v(0) - 1.0) <= tol::kConeSlack && impl_->state_in_cone(v, tol::kConeSlack);
}

bool GptSpace::state_in_cone_strict(const Vector& v) const {
    return impl_->state_in_cone(v, tol::kConstruct);
}

bool GptSpace::effect_valid_strict(const RowVector& e) const {
    return impl_->effect_valid(e, tol::kConstruct);
}

Vector GptSpace::sample_state(Rng& rng) const {
    const int r = impl_->r;
    switch (impl_->kind) {
        case SpaceKind::classical: {
            Vector p(r);
            for (int i = 0; i < r; ++i) p(i) = -std::log(1.0 - rng.uniform());
            p /= p.sum();
            return impl_->bloch.B * p;
        }
        case SpaceKind::quantum_complex: {
            const int d = impl_->param;
            quantum::CMatrix g(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) g(i, j) = {rng.normal(), rng.normal()};
            quantum::CMatrix rho = g * g.adjoint();
            rho /= rho.trace().real();
            return quantum::state_to_bloch(rho);
        }
        case SpaceKind::quantum_real: {
            const int d = impl_->param;
            Matrix g(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
            Matrix rho = g * g.transpose();
            rho /= rho.trace();
            return quantum::state_to_bloch_real(rho);
        }
        case SpaceKind::square: {
            Vector v(3);
            v << 1.0, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
            return v;
        }
        case SpaceKind::ball: {
            const int k = impl_->param;
            Vector dir(k);
            for (int i = 0; i < k; ++i) dir(i) = rng.normal();
            dir.normalize();
            const double rad = std::pow(rng.uniform(), 1.0 / k);
            Vector v(r);
            v(0) = 1.0;
            v.tail(k) = rad * dir;
            return v;
        }
        case SpaceKind::custom: {
            double scale = 1.0;
            for (int tries = 0; tries < 10000; ++tries) {
                Vector v(r);
                v(0) = 1.0;
                for (int i = 1; i < r; ++i) v(i) = scale * rng.normal();
                if (impl_->state_in_cone(v, 0.0)) return v;
                scale *= 0.8;
            }
            return maximally_mixed();
        }
    }
    return maximally_mixed();
}

RowVector GptSpace::sample_effect(Rng& rng) const {
    const int r = impl_->r;
    switch (impl_->kind) {
        case SpaceKind::classical: {
            RowVector native(r);
            for (int i = 0; i < r; ++i) native(i) = rng.uniform();
            return native * impl_->bloch.B_inv;
        }
        case SpaceKind::quantum_complex: {
            const int d = impl_->param;
            quantum::CMatrix g(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) g(i, j) = {rng.normal(), rng.normal()};
            Eigen::HouseholderQR<quantum::CMatrix> qr(g);
            quantum::CMatrix q = qr.householderQ();
            Vector spectrum(d);
            for (int i = 0; i < d; ++i) spectrum(i) = rng.uniform();
            quantum::CMatrix op = q * spectrum.asDiagonal() * q.adjoint();
            return quantum::effect_to_bloch(op);
        }
        case SpaceKind::quantum_real: {
            const int d = impl_->param;
            Matrix g(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
            Eigen::HouseholderQR<Matrix> qr(g);
            Matrix q = qr.householderQ();
            Vector spectrum(d);
            for (int i = 0; i < d; ++i) spectrum(i) = rng.uniform();
            Matrix op = q * spectrum.asDiagonal() * q.transpose();
            return quantum::effect_to_bloch_real(op);
        }
        case SpaceKind::square: {
            const double e0 = rng.uniform(0.02, 0.98);
            const double cap = std::min(e0, 1.0 - e0);
            double a = rng.normal();
            double b = rng.normal();
            const double l1 = std::abs(a) + std::abs(b);
            const double scale = l1 > 0 ? cap * rng.uniform() / l1 : 0.0;
            RowVector e(3);
            e << e0, a * scale, b * scale;
            return e;
        }
        case SpaceKind::ball: {
            const int k = impl_->param;
            const double e0 = rng.uniform(0.02, 0.98);
            const double cap = std::min(e0, 1.0 - e0);
            RowVector y(k);
            for (int i = 0; i < k; ++i) y(i) = rng.normal();
            y.normalize();
            RowVector e(r);
            e(0) = e0;
            e.tail(k) = cap * rng.uniform() * y;
            return e;
        }
        case SpaceKind::custom: {
            double scale = 0.5;
            for (int tries = 0; tries < 10000; ++tries) {
                RowVector e(r);
                e(0) = rng.uniform(0.1, 0.9);
                for (int i = 1; i < r; ++i) e(i) = scale * rng.normal();
                if (impl_->effect_valid(e, 0.0)) return e;
                scale *= 0.8;
            }
            return 0.5 * unit_effect();
        }
    }
    return unit_effect();
}

std::string GptSpace::describe() const {
    switch (impl_->kind) {
        case SpaceKind::square: return "square";
        case SpaceKind::custom: return "custom(r=" + std::to_string(impl_->r) + ")";
        default:
            return to_string(impl_->kind) + "(" + std::to_string(impl_->param) + ")";
    }
}

GptSpace make_space(SpaceKind kind, int param) {
    switch (kind) {
        case SpaceKind::classical: return GptSpace::classical(param);
        case SpaceKind::quantum_complex: return GptSpace::quantum_complex(param);
        case SpaceKind::quantum_real: return GptSpace::quantum_real(param);
        case SpaceKind::square: return GptSpace::square();
        case SpaceKind::ball: return GptSpace::ball(param);
        case SpaceKind::custom:
            throw Error("custom spaces are built through GptSpace::custom");
    }
    throw Error("unsupported space kind");
}

BlochForm bloch_transform(const GptSpace& space, std::optional<std::uint64_t> basis_seed) {
    if (!basis_seed) return space.bloch();
    const int r = space.dim();
    RowVector unit = space.native_unit_effect();
    Vector axis = unit.transpose().normalized();
    Rng rng(*basis_seed);
    Matrix rows(r - 1, r);
    for (int i = 0; i < r - 1; ++i) {
        Vector v(r);
        for (;;) {
            for (int j = 0; j < r; ++j) v(j) = rng.normal();
            v -= axis.dot(v) * axis;
            for (int pass = 0; pass < 2; ++pass)
                for (int k = 0; k < i; ++k) v -= rows.row(k).dot(v) * rows.row(k).transpose();
            if (v.norm() > 1e-8) break;
        }
        rows.row(i) = v.normalized().transpose();
    }
    BlochForm form;
    form.B.resize(r, r);
    form.B.row(0) = unit;
    form.B.bottomRows(r - 1) = rows;
    form.B_inv = form.B.inverse();
    form.traceless_basis = rows;
    return form;
}

double pair(const RowVector& effect, const Vector& state) {
    if (effect.size() != state.size())
        throw DimensionMismatch("effect and state dimensions differ");
    return (effect * state)(0, 0);
}

}  // namespace gptref
