// antilinear.hpp — antilinear operators in normal form (unitary matrix followed
// by entrywise conjugation), the linear/antilinear composition table, and
// conjugation J T J^{-1}.

#pragma once

#include "twistkit/core.hpp"

#include <variant>
#include <vector>

namespace twistkit {

// psi -> u * conj(psi).  Compositions are eagerly normalized back to this form.
struct AntilinearOp {
    Matrix u;

    int dim() const { return static_cast<int>(u.rows()); }

    Vector apply(const Vector& v) const {
        if (v.size() != u.cols()) throw DimensionError("AntilinearOp::apply: dimension mismatch");
        return u * v.conjugate();
    }

    // adjoint in the antilinear sense: <C x, y> = conj(<x, C* y>)
    AntilinearOp adjoint() const { return {u.transpose()}; }

    bool is_antiunitary(const Tolerance& tol = {}) const { return is_unitary(u, tol); }

    AntilinearOp inverse() const { return {u.inverse().conjugate()}; }
};

// --------------------------- composition table ---------------------------
// antilinear . antilinear -> linear, antilinear . linear -> antilinear, etc.

inline Matrix compose(const AntilinearOp& a, const AntilinearOp& b) {
    require_same_dim(a.u, b.u, "compose");
    return a.u * b.u.conjugate();
}

inline AntilinearOp compose(const Matrix& t, const AntilinearOp& a) {
    require_same_dim(t, a.u, "compose");
    return {t * a.u};
}

inline AntilinearOp compose(const AntilinearOp& a, const Matrix& t) {
    require_same_dim(a.u, t, "compose");
    return {a.u * t.conjugate()};
}

inline Matrix compose(const Matrix& s, const Matrix& t) {
    require_same_dim(s, t, "compose");
    return s * t;
}

// Words in {linear, antilinear} close onto the two kinds; the kind is the
// parity of antilinear factors.
using AnyOp = std::variant<Matrix, AntilinearOp>;

inline AnyOp compose(const AnyOp& x, const AnyOp& y) {
    return std::visit([](const auto& a, const auto& b) -> AnyOp { return compose(a, b); }, x, y);
}

inline AnyOp adjoint(const AnyOp& x) {
    if (std::holds_alternative<Matrix>(x)) return Matrix(std::get<Matrix>(x).adjoint());
    return std::get<AntilinearOp>(x).adjoint();
}

inline bool is_antilinear(const AnyOp& x) { return std::holds_alternative<AntilinearOp>(x); }

// ------------------------------ conjugation ------------------------------

inline void require_antiunitary(const AntilinearOp& j, const char* who) {
    if (!j.is_antiunitary()) throw NotAntiunitaryError(std::string(who) + ": unitary part fails u*u = 1");
}

// J T J^{-1} = u conj(T) u^{-1}; maps algebra to commutant, preserves products.
inline Matrix conjugate_by(const AntilinearOp& j, const Matrix& t) {
    require_antiunitary(j, "conjugate_by");
    require_same_dim(j.u, t, "conjugate_by");
    return j.u * t.conjugate() * j.u.adjoint();
}

// a° = J a* J^{-1}, the right-action implementer
inline Matrix opposite_op(const AntilinearOp& j, const Matrix& a) {
    return conjugate_by(j, a.adjoint().eval());
}

}  // namespace twistkit
