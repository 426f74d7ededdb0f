// forms.hpp — the bimodule of twisted 1-forms, its opposite-side mirror,
// bimodule actions, the derivation property, and conjugation by the real
// structure. Forms always carry their generator decomposition so both sides
// of every identity can be recomputed independently.

#pragma once

#include "twistkit/triple.hpp"

#include <utility>
#include <vector>

namespace twistkit {

enum class FormSide { plain, opposite };

using GeneratorList = std::vector<std::pair<AlgebraElement, AlgebraElement>>;

struct TwistedOneForm {
    FormSide side = FormSide::plain;
    GeneratorList generators;
    Matrix value;

    bool is_zero(const Tolerance& tol = {}) const { return tol.ok(opnorm(value), 1.0); }
};

namespace detail {

inline Matrix opposite_delta(const RealTwistedTriple& t, const AlgebraElement& b) {
    // delta°_rho(b) = [D, b°]_{rho°}
    return t.dirac * t.opposite(b) - t.rho_opposite_of(b) * t.dirac;
}

inline Matrix value_from_generators(const RealTwistedTriple& t, const GeneratorList& gens, FormSide side) {
    Matrix v = Matrix::Zero(t.dim(), t.dim());
    for (const auto& [a, b] : gens) {
        if (side == FormSide::plain)
            v += t.pi(a) * t.delta_rho(b);
        else
            v += t.opposite(a) * opposite_delta(t, b);
    }
    return v;
}

}  // namespace detail

inline TwistedOneForm zero_form(const RealTwistedTriple& t, FormSide side = FormSide::plain) {
    return {side, {}, Matrix::Zero(t.dim(), t.dim())};
}

inline TwistedOneForm form_from_generators(const RealTwistedTriple& t, GeneratorList gens,
                                           FormSide side = FormSide::plain, const Tolerance& tol = {}) {
    for (const auto& [a, b] : gens) {
        a.check(b, "form_from_generators");
        if (a.algebra != t.algebra) throw AlgebraMismatchError("form_from_generators: wrong algebra");
    }
    if (side == FormSide::opposite) {
        auto reg = check_regular(t.rho, tol);
        if (!reg.regular)
            throw IrregularTwistError("form_from_generators: opposite side needs a regular twist");
    }
    TwistedOneForm w;
    w.side = side;
    w.value = detail::value_from_generators(t, gens, side);
    w.generators = std::move(gens);
    return w;
}

inline TwistedOneForm operator+(const TwistedOneForm& x, const TwistedOneForm& y) {
    if (x.side != y.side) throw AlgebraMismatchError("form addition: mixed sides");
    TwistedOneForm out = x;
    out.generators.insert(out.generators.end(), y.generators.begin(), y.generators.end());
    out.value = x.value + y.value;
    return out;
}

inline TwistedOneForm operator*(Complex c, const TwistedOneForm& w) {
    TwistedOneForm out = w;
    for (auto& [a, b] : out.generators) a *= c;
    out.value = c * w.value;
    return out;
}

// rebuild the operator value from the stored generators (coherence oracle)
inline Matrix rebuild_value(const RealTwistedTriple& t, const TwistedOneForm& w) {
    return detail::value_from_generators(t, w.generators, w.side);
}

// --------------------------------- bimodule ---------------------------------
//
// plain side:     a · w · b   acts as  pi(rho(a)) w pi(b)
// opposite side:  a · w° · b  acts as  rho°(b°) w° a°
//
// Generator rewrites keep value/generator coherence:
//   plain:    (a·w)_j = (rho(a) a_j, b_j); for ·b, [D,b_j]_rho b is rewritten
//             through the derivation rule into (a_j, b_j b) and (-a_j rho(b_j), b).
//   opposite: mirrored through the opposite derivation rule.
inline TwistedOneForm bimodule_act(const RealTwistedTriple& t, const AlgebraElement& a, const TwistedOneForm& w,
                                   const AlgebraElement& b) {
    if (a.algebra != t.algebra || b.algebra != t.algebra)
        throw AlgebraMismatchError("bimodule_act: wrong algebra");
    TwistedOneForm out;
    out.side = w.side;
    if (w.side == FormSide::plain) {
        out.value = t.pi(t.rho(a)) * w.value * t.pi(b);
        AlgebraElement ra = t.rho(a);
        for (const auto& [aj, bj] : w.generators) {
            out.generators.emplace_back(ra * aj, bj * b);
            out.generators.emplace_back(Complex(-1, 0) * (ra * aj * t.rho(bj)), b);
        }
    } else {
        out.value = t.rho_opposite_of(b) * w.value * t.opposite(a);
        Automorphism rinv = t.rho.inverse();
        AlgebraElement rb = rinv(b);
        for (const auto& [cj, dj] : w.generators) {
            out.generators.emplace_back(cj * rb, a * dj);
            out.generators.emplace_back(Complex(-1, 0) * (rinv(dj) * cj * rb), a);
        }
    }
    return out;
}

// | delta_rho(ab) - pi(rho(a)) delta_rho(b) - delta_rho(a) pi(b) |, relative
inline double derivation_residual(const RealTwistedTriple& t, const AlgebraElement& a, const AlgebraElement& b) {
    Matrix lhs = t.delta_rho(a * b);
    Matrix rhs = t.pi(t.rho(a)) * t.delta_rho(b) + t.delta_rho(a) * t.pi(b);
    return rel_residual(lhs, rhs);
}

// ------------------------- conjugation by the real structure -------------------------

struct JConjugateResult {
    TwistedOneForm form;          // opposite-side form with starred generators
    double direct_residual = 0;   // J w J^{-1} vs eps' * form.value
    double rebuild_residual = 0;  // form.value vs eps' * J (plain form from starred generators) J^{-1}
};

inline JConjugateResult j_conjugate_form(const RealTwistedTriple& t, const TwistedOneForm& w,
                                         const Tolerance& tol = {}) {
    if (w.side != FormSide::plain) throw AlgebraMismatchError("j_conjugate_form: expects a plain-side form");
    GeneratorList starred;
    starred.reserve(w.generators.size());
    for (const auto& [a, b] : w.generators) starred.emplace_back(a.adjoint(), b.adjoint());

    JConjugateResult out;
    out.form = form_from_generators(t, starred, FormSide::opposite, tol);
    double ep = t.signs.eps_prime;

    Matrix lhs = conjugate_by(t.j, w.value);
    out.direct_residual = residual(lhs, Matrix(ep * out.form.value));

    GeneratorList unstarred;
    for (const auto& [c, d] : out.form.generators) unstarred.emplace_back(c.adjoint(), d.adjoint());
    TwistedOneForm rebuilt = form_from_generators(t, unstarred, FormSide::plain, tol);
    out.rebuild_residual = residual(out.form.value, Matrix(ep * conjugate_by(t.j, rebuilt.value)));

    double scale = std::max(opnorm(w.value), opnorm(out.form.value));
    if (!tol.ok(out.direct_residual, scale) || !tol.ok(out.rebuild_residual, scale))
        throw IdentityViolation("j_conjugate_form: conjugation identities fail (residuals " +
                                std::to_string(out.direct_residual) + ", " +
                                std::to_string(out.rebuild_residual) + ") — malformed triple");
    return out;
}

// ------------------------------- self-adjointness -------------------------------

inline double self_adjoint_check(const Matrix& value) { return residual(value, value.adjoint().eval()); }

inline double self_adjoint_check(const TwistedOneForm& w) { return self_adjoint_check(w.value); }

}  // namespace twistkit
