// morita.hpp — hermitian modules p·A^N, lifted twists, connections in
// Grassmann-plus-potential form, balanced tensor products (abstract quotient
// and concrete model), covariant operators, and assembled fluctuations.

#pragma once

#include "twistkit/forms.hpp"
#include "twistkit/triple.hpp"

#include <optional>
#include <string>
#include <vector>

namespace twistkit {

enum class ModuleSide { right, left };

using ModuleElement = std::vector<AlgebraElement>;  // N components in A

struct HermitianModule {
    ModuleSide side = ModuleSide::right;
    StarAlgebra algebra;
    int n_slots = 0;
    std::vector<std::vector<AlgebraElement>> p;  // N x N projection over A

    double projection_residual() const {
        double r = 0;
        for (int i = 0; i < n_slots; ++i)
            for (int j = 0; j < n_slots; ++j) {
                AlgebraElement sq = zero_element(algebra);
                for (int k = 0; k < n_slots; ++k) sq += p[i][k] * p[k][j];
                r = std::max(r, (sq - p[i][j]).norm());
                r = std::max(r, (p[j][i].adjoint() - p[i][j]).norm());
            }
        return r;
    }

    double invariance_residual(const Automorphism& rho) const {
        double r = 0;
        for (const auto& row : p)
            for (const auto& e : row) r = std::max(r, (rho(e) - e).norm());
        return r;
    }
};

inline HermitianModule make_module(ModuleSide side, const StarAlgebra& alg,
                                   std::vector<std::vector<AlgebraElement>> p, const Tolerance& tol = {}) {
    HermitianModule m;
    m.side = side;
    m.algebra = alg;
    m.n_slots = static_cast<int>(p.size());
    for (auto& row : p) {
        if (static_cast<int>(row.size()) != m.n_slots) throw SchemaError("make_module: p must be square");
        for (auto& e : row)
            if (e.algebra != alg) throw AlgebraMismatchError("make_module: p entry in wrong algebra");
    }
    m.p = std::move(p);
    double r = m.projection_residual();
    if (!tol.ok(r, 1.0))
        throw SchemaError("make_module: p is not a projection (residual " + std::to_string(r) + ")");
    return m;
}

// the algebra itself as a module, p = 1 (N = 1)
inline HermitianModule trivial_module(ModuleSide side, const StarAlgebra& alg) {
    return make_module(side, alg, {{unit_element(alg)}});
}

// ------------------------------ element algebra ------------------------------

inline ModuleElement compress(const HermitianModule& m, const ModuleElement& raw) {
    ModuleElement out(m.n_slots, zero_element(m.algebra));
    for (int i = 0; i < m.n_slots; ++i)
        for (int k = 0; k < m.n_slots; ++k)
            out[i] += (m.side == ModuleSide::right) ? m.p[i][k] * raw[k] : raw[k] * m.p[k][i];
    return out;
}

inline ModuleElement module_right_mul(const ModuleElement& eta, const AlgebraElement& a) {
    ModuleElement out = eta;
    for (auto& c : out) c = c * a;
    return out;
}

inline ModuleElement module_left_mul(const AlgebraElement& a, const ModuleElement& eta) {
    ModuleElement out = eta;
    for (auto& c : out) c = a * c;
    return out;
}

inline ModuleElement random_module_element(const HermitianModule& m, Rng& rng) {
    ModuleElement raw;
    for (int i = 0; i < m.n_slots; ++i) raw.push_back(random_element(m.algebra, rng));
    return compress(m, raw);
}

// lifted twist: componentwise rho then compression; requires rho(p) = p
inline ModuleElement lift_automorphism(const HermitianModule& m, const Automorphism& rho, const ModuleElement& eta,
                                       const Tolerance& tol = {}) {
    double inv = m.invariance_residual(rho);
    if (!tol.ok(inv, 1.0))
        throw NotInvariantError("lift_automorphism: rho(p) != p (residual " + std::to_string(inv) + ")");
    ModuleElement mapped;
    mapped.reserve(eta.size());
    for (const auto& c : eta) mapped.push_back(rho(c));
    return compress(m, mapped);
}

// -------------------------------- connections --------------------------------

struct Connection {
    FormSide target = FormSide::plain;  // plain for right modules, opposite for left
    std::vector<std::vector<TwistedOneForm>> potential;  // N x N, p-compressed
};

inline Connection grassmann_connection(const RealTwistedTriple& t, const HermitianModule& m) {
    Connection c;
    c.target = (m.side == ModuleSide::right) ? FormSide::plain : FormSide::opposite;
    c.potential.assign(m.n_slots, std::vector<TwistedOneForm>(m.n_slots, zero_form(t, c.target)));
    return c;
}

// compress an N x N matrix of forms by p on both sides, using the bimodule laws
inline Connection compress_connection(const RealTwistedTriple& t, const HermitianModule& m,
                                      const std::vector<std::vector<TwistedOneForm>>& raw, FormSide target) {
    Connection c;
    c.target = target;
    c.potential.assign(m.n_slots, std::vector<TwistedOneForm>(m.n_slots, zero_form(t, target)));
    for (int i = 0; i < m.n_slots; ++i)
        for (int j = 0; j < m.n_slots; ++j) {
            TwistedOneForm acc = zero_form(t, target);
            for (int k = 0; k < m.n_slots; ++k)
                for (int l = 0; l < m.n_slots; ++l) acc = acc + bimodule_act(t, m.p[i][k], raw[k][l], m.p[l][j]);
            c.potential[i][j] = acc;
        }
    return c;
}

inline Connection random_connection(const RealTwistedTriple& t, const HermitianModule& m, Rng& rng,
                                    int gens_per_entry = 1) {
    FormSide target = (m.side == ModuleSide::right) ? FormSide::plain : FormSide::opposite;
    std::vector<std::vector<TwistedOneForm>> raw(m.n_slots, std::vector<TwistedOneForm>(m.n_slots, zero_form(t, target)));
    for (int i = 0; i < m.n_slots; ++i)
        for (int j = 0; j < m.n_slots; ++j) {
            GeneratorList gens;
            for (int g = 0; g < gens_per_entry; ++g)
                gens.emplace_back(random_element(t.algebra, rng), random_element(t.algebra, rng));
            raw[i][j] = form_from_generators(t, gens, target);
        }
    return compress_connection(t, m, raw, target);
}

// ----------------------------- coordinate helpers -----------------------------

namespace detail {

inline Vector vec_algebra(const AlgebraElement& a) {
    Vector v(a.algebra.dim());
    int off = 0;
    for (const auto& part : a.parts) {
        for (Eigen::Index c = 0; c < part.cols(); ++c)
            for (Eigen::Index r = 0; r < part.rows(); ++r) v(off++) = part(r, c);
    }
    return v;
}

inline AlgebraElement unvec_algebra(const StarAlgebra& alg, const Vector& v) {
    AlgebraElement a = zero_element(alg);
    int off = 0;
    for (auto& part : a.parts)
        for (Eigen::Index c = 0; c < part.cols(); ++c)
            for (Eigen::Index r = 0; r < part.rows(); ++r) part(r, c) = v(off++);
    return a;
}

inline Vector vec_module(const ModuleElement& eta) {
    int ad = eta.front().algebra.dim();
    Vector v(static_cast<int>(eta.size()) * ad);
    for (size_t i = 0; i < eta.size(); ++i) v.segment(static_cast<int>(i) * ad, ad) = vec_algebra(eta[i]);
    return v;
}

inline ModuleElement unvec_module(const StarAlgebra& alg, int n_slots, const Vector& v) {
    ModuleElement eta;
    int ad = alg.dim();
    for (int i = 0; i < n_slots; ++i) eta.push_back(unvec_algebra(alg, v.segment(i * ad, ad)));
    return eta;
}

// orthonormal column space with a guarded rank cut; lambda are Gram eigenvalues
struct RankedSpan {
    Matrix basis;
    int rank = 0;
    double gap = 0.0;  // ratio of smallest kept to largest dropped singular value
};

inline RankedSpan ranked_span(const Matrix& gram, const Tolerance& tol, const char* who) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    RealVector lam = es.eigenvalues();  // ascending
    int n = static_cast<int>(lam.size());
    double lmax = std::max(lam(n - 1), 0.0);
    double cut = std::max(tol.rel * lmax, tol.abs * tol.abs);
    int rank = 0;
    for (int i = 0; i < n; ++i)
        if (lam(i) > cut) ++rank;
    double kept = rank > 0 ? std::sqrt(std::max(lam(n - rank), 0.0)) : 0.0;
    double dropped = rank < n ? std::sqrt(std::max(lam(n - rank - 1), 0.0)) : 0.0;
    double gap = dropped > 0 ? kept / dropped : std::numeric_limits<double>::infinity();
    if (rank > 0 && rank < n && gap < 1e3)
        throw RankDeficiencyError(std::string(who) + ": ambiguous numerical rank (spectral gap " +
                                  std::to_string(gap) + ")");
    RankedSpan out;
    out.rank = rank;
    out.gap = gap;
    out.basis = Matrix(gram.rows(), rank);
    for (int i = 0; i < rank; ++i) out.basis.col(i) = es.eigenvectors().col(n - 1 - i);
    return out;
}

}  // namespace detail

// ------------------------------ balanced tensor ------------------------------

struct BalancedSpace {
    ModuleSide side = ModuleSide::right;
    int n_slots = 0;
    int hilbert_dim = 0;
    Matrix e_basis;         // (N * dim_C A) x dE, orthonormal basis of E as a C-space
    int module_cdim = 0;    // dE
    int abstract_dim = 0;   // dim of (E (x)_C H) / relation span
    int concrete_dim = 0;   // rank of the p-action on H^N
    double rank_gap = 0.0;
    Matrix relation_basis;  // (dE*h) x r, orthonormal
    Matrix canonical;       // (N*h) x (dE*h), eta (x) psi -> concrete vector
    Matrix model_basis;     // (N*h) x concrete_dim, orthonormal

    ModuleElement basis_element(const StarAlgebra& alg, int alpha) const {
        return detail::unvec_module(alg, n_slots, e_basis.col(alpha));
    }

    // coordinates of an element of E in the e_basis
    Vector coords(const ModuleElement& eta) const { return e_basis.adjoint() * detail::vec_module(eta); }

    // eta (x) psi in the E-slot-first product model
    Vector embed(const ModuleElement& eta, const Vector& psi) const {
        Vector c = coords(eta);
        Vector out(module_cdim * hilbert_dim);
        for (int a = 0; a < module_cdim; ++a) out.segment(a * hilbert_dim, hilbert_dim) = c(a) * psi;
        return out;
    }
};

inline BalancedSpace balanced_tensor(const RealTwistedTriple& t, const HermitianModule& m,
                                     const Tolerance& tol = {}) {
    BalancedSpace bs;
    bs.side = m.side;
    bs.n_slots = m.n_slots;
    bs.hilbert_dim = t.dim();
    const StarAlgebra& alg = m.algebra;
    int ad = alg.dim();
    auto basis = canonical_basis(alg);
    int B = static_cast<int>(basis.size());

    // E as a C-linear subspace of A^N: span of p acting on slot-wise basis vectors
    Matrix span(m.n_slots * ad, m.n_slots * B);
    for (int slot = 0; slot < m.n_slots; ++slot)
        for (int b = 0; b < B; ++b) {
            ModuleElement raw(m.n_slots, zero_element(alg));
            raw[slot] = basis[b];
            span.col(slot * B + b) = detail::vec_module(compress(m, raw));
        }
    auto espan = detail::ranked_span(Matrix(span * span.adjoint()), tol, "balanced_tensor(module span)");
    bs.e_basis = espan.basis;
    bs.module_cdim = espan.rank;
    int dE = bs.module_cdim, h = bs.hilbert_dim;

    // relation span: (eta a) (x) psi - eta (x) (a psi), columns over basis pairs
    Matrix gram = Matrix::Zero(dE * h, dE * h);
    for (int b = 0; b < B; ++b) {
        Matrix mul(dE, dE);  // action of basis[b] on E in e_basis coordinates
        for (int a = 0; a < dE; ++a) {
            ModuleElement ea = bs.basis_element(alg, a);
            ModuleElement moved =
                (m.side == ModuleSide::right) ? module_right_mul(ea, basis[b]) : module_left_mul(basis[b], ea);
            mul.col(a) = bs.e_basis.adjoint() * detail::vec_module(moved);
        }
        Matrix act = (m.side == ModuleSide::right) ? t.pi(basis[b]) : t.opposite(basis[b]);
        Matrix rel = kron(mul, Matrix::Identity(h, h)) - kron(Matrix::Identity(dE, dE), act);
        gram += rel * rel.adjoint();
    }
    auto rspan = detail::ranked_span(gram, tol, "balanced_tensor(relation span)");
    bs.relation_basis = rspan.basis;
    bs.rank_gap = rspan.gap;
    bs.abstract_dim = dE * h - rspan.rank;

    // canonical map onto the concrete model inside H^N
    bs.canonical = Matrix::Zero(m.n_slots * h, dE * h);
    for (int a = 0; a < dE; ++a) {
        ModuleElement ea = bs.basis_element(alg, a);
        for (int j = 0; j < m.n_slots; ++j) {
            Matrix blk = (m.side == ModuleSide::right) ? t.pi(ea[j]) : t.opposite(ea[j]);
            bs.canonical.block(j * h, a * h, h, h) = blk;
        }
    }

    // concrete model: range of the p-action on H^N
    Matrix phat = Matrix::Zero(m.n_slots * h, m.n_slots * h);
    for (int i = 0; i < m.n_slots; ++i)
        for (int j = 0; j < m.n_slots; ++j)
            phat.block(i * h, j * h, h, h) = (m.side == ModuleSide::right) ? t.pi(m.p[i][j]) : t.opposite(m.p[j][i]);
    auto mspan = detail::ranked_span(Matrix(phat * phat.adjoint()), tol, "balanced_tensor(model span)");
    bs.model_basis = mspan.basis;
    bs.concrete_dim = mspan.rank;
    return bs;
}

// --------------------------- connection as an operator ---------------------------

namespace detail {

// the map induced on E (x)_C H by the connection, without the twist composition
inline Matrix connection_matrix(const RealTwistedTriple& t, const HermitianModule& m, const Connection& c,
                                const BalancedSpace& bs) {
    int dE = bs.module_cdim, h = bs.hilbert_dim, N = m.n_slots;
    Matrix nabla = Matrix::Zero(dE * h, dE * h);
    // coordinates of the compressed slot vectors (columns of p for right, rows for left)
    std::vector<Vector> slot_coords(N);
    for (int j = 0; j < N; ++j) {
        ModuleElement pe(N, zero_element(m.algebra));
        for (int i = 0; i < N; ++i) pe[i] = (m.side == ModuleSide::right) ? m.p[i][j] : m.p[j][i];
        slot_coords[j] = bs.e_basis.adjoint() * vec_module(pe);
    }
    for (int alpha = 0; alpha < dE; ++alpha) {
        ModuleElement ea = bs.basis_element(m.algebra, alpha);
        for (int j = 0; j < N; ++j) {
            Matrix op = Matrix::Zero(h, h);
            for (int k = 0; k < N; ++k) {
                if (m.side == ModuleSide::right) {
                    // (p_{jk} · delta(eta_k)) acts as pi(rho(p_{jk})) [D, eta_k]_rho
                    op += t.pi(t.rho(m.p[j][k])) * t.delta_rho(ea[k]);
                    op += c.potential[j][k].value * t.pi(ea[k]);
                } else {
                    // (delta°(eta_k) · p_{kj}) acts as rho°(p_{kj}°) [D, eta_k°]_{rho°}
                    op += t.rho_opposite_of(m.p[k][j]) * opposite_delta(t, ea[k]);
                    op += c.potential[k][j].value * t.opposite(ea[k]);
                }
            }
            for (int beta = 0; beta < dE; ++beta)
                if (std::abs(slot_coords[j](beta)) > 0)
                    nabla.block(beta * h, alpha * h, h, h) += slot_coords[j](beta) * op;
        }
    }
    return nabla;
}

}  // namespace detail

// ------------------------------ covariant operator ------------------------------

struct CovariantOperator {
    BalancedSpace space;
    Matrix on_product;        // on E (x)_C H
    Matrix compressed;        // on H^N, supported on the concrete model
    double welldef_residual;  // max |D~ v| over an orthonormal basis of the relation span
};

inline CovariantOperator covariant_operator(const RealTwistedTriple& t, const HermitianModule& m,
                                            const Connection& c, BalancedSpace bs, const Tolerance& tol = {}) {
    int dE = bs.module_cdim, h = bs.hilbert_dim;

    // lifted twist in e_basis coordinates (rho~ for right modules, rho~^{-1} for left)
    Matrix lift(dE, dE);
    Automorphism rho_used = (m.side == ModuleSide::right) ? t.rho : t.rho.inverse();
    for (int a = 0; a < dE; ++a) {
        ModuleElement ea = bs.basis_element(m.algebra, a);
        lift.col(a) = bs.e_basis.adjoint() * detail::vec_module(lift_automorphism(m, rho_used, ea, tol));
    }

    Matrix dfree = kron(Matrix::Identity(dE, dE), t.dirac);
    Matrix nabla = detail::connection_matrix(t, m, c, bs);
    CovariantOperator out;
    out.space = std::move(bs);
    out.on_product = kron(lift, Matrix::Identity(h, h)) * (dfree + nabla);

    double resid = 0;
    for (int r = 0; r < out.space.relation_basis.cols(); ++r)
        resid = std::max(resid, (out.on_product * out.space.relation_basis.col(r)).norm());
    out.welldef_residual = resid;
    double scale = opnorm(out.on_product);
    if (!tol.ok(resid, scale))
        throw NotWellDefinedError("covariant_operator: relation span not annihilated (residual " +
                                  std::to_string(resid) + ", operator norm " + std::to_string(scale) +
                                  ") — connection target does not match the module side");

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(out.space.canonical);
    out.compressed = out.space.canonical * out.on_product * cod.pseudoInverse();
    return out;
}

inline CovariantOperator covariant_operator(const RealTwistedTriple& t, const HermitianModule& m,
                                            const Connection& c, const Tolerance& tol = {}) {
    return covariant_operator(t, m, c, balanced_tensor(t, m, tol), tol);
}

// ------------------------------- Leibniz residual -------------------------------

// the connection as a map on the product space, with its balanced-space data
struct ConnectionOperator {
    BalancedSpace space;
    Matrix nabla;
};

inline ConnectionOperator connection_operator(const RealTwistedTriple& t, const HermitianModule& m,
                                              const Connection& c, const Tolerance& tol = {}) {
    ConnectionOperator out;
    out.space = balanced_tensor(t, m, tol);
    out.nabla = detail::connection_matrix(t, m, c, out.space);
    return out;
}

// right: | nabla(eta a (x) psi) - nabla(eta (x) a psi) - eta (x) delta_rho(a) psi |
// left:  mirrored with the right action psi a = a° psi and delta°_rho
inline double leibniz_residual(const RealTwistedTriple& t, const HermitianModule& m, const ConnectionOperator& co,
                               const ModuleElement& eta, const AlgebraElement& a, const Vector& psi) {
    const BalancedSpace& bs = co.space;
    Vector v1, v2, v3;
    if (m.side == ModuleSide::right) {
        v1 = co.nabla * bs.embed(module_right_mul(eta, a), psi);
        v2 = co.nabla * bs.embed(eta, Vector(t.pi(a) * psi));
        v3 = bs.embed(eta, Vector(t.delta_rho(a) * psi));
    } else {
        v1 = co.nabla * bs.embed(module_left_mul(a, eta), psi);
        v2 = co.nabla * bs.embed(eta, Vector(t.opposite(a) * psi));
        v3 = bs.embed(eta, Vector(detail::opposite_delta(t, a) * psi));
    }
    return (v1 - v2 - v3).norm();
}

inline double leibniz_residual(const RealTwistedTriple& t, const HermitianModule& m, const Connection& c,
                               const ModuleElement& eta, const AlgebraElement& a, const Vector& psi,
                               const Tolerance& tol = {}) {
    return leibniz_residual(t, m, connection_operator(t, m, c, tol), eta, a, psi);
}

// --------------------------- assembled fluctuations ---------------------------

// D + w + eps' J w J^{-1} on top of an arbitrary base operator
inline Matrix fluctuate(const RealTwistedTriple& t, const Matrix& base, const TwistedOneForm& w) {
    return base + w.value + double(t.signs.eps_prime) * conjugate_by(t.j, w.value);
}

struct FluctuationResult {
    Matrix d_prime;
    double j_residual = 0.0;          // relative residual of J D' = eps' D' J
    bool j_compatible = false;
    double violation_residual = 0.0;  // |(w_R - w_L) - eps' J (w_R - w_L) J^{-1}|, relative
    std::optional<TwistedOneForm> omega;
    double symmetrized_residual = 0.0;
};

inline FluctuationResult assemble_fluctuation(const RealTwistedTriple& t, const TwistedOneForm& w_r,
                                              const TwistedOneForm& w_l, const Tolerance& tol = {}) {
    if (w_r.side != FormSide::plain || w_l.side != FormSide::plain)
        throw AlgebraMismatchError("assemble_fluctuation: expects plain-side forms");
    double ep = t.signs.eps_prime;
    FluctuationResult out;
    out.d_prime = t.dirac + w_l.value + ep * conjugate_by(t.j, w_r.value);
    double raw = residual(conjugate_by(t.j, out.d_prime), Matrix(ep * out.d_prime));
    double scale = opnorm(out.d_prime);
    out.j_residual = scale > 0 ? raw / scale : raw;
    out.j_compatible = tol.ok(raw, scale);

    Matrix diff = w_r.value - w_l.value;
    out.violation_residual = rel_residual(diff, Matrix(ep * conjugate_by(t.j, diff)));
    if (out.j_compatible) {
        TwistedOneForm omega = Complex(0.5, 0) * (w_r + w_l);
        out.symmetrized_residual = rel_residual(out.d_prime, fluctuate(t, t.dirac, omega));
        out.omega = std::move(omega);
    }
    return out;
}

// | fluct(fluct(D,w1),w2) - fluct(D, w1+w2) |, relative
inline double fluctuation_monoid_check(const RealTwistedTriple& t, const TwistedOneForm& w1,
                                       const TwistedOneForm& w2) {
    Matrix twice = fluctuate(t, fluctuate(t, t.dirac, w1), w2);
    Matrix once = fluctuate(t, t.dirac, w1 + w2);
    return rel_residual(twice, once);
}

// endomorphism action b: (eta (x) psi) -> (b eta) (x) psi on the product model
inline Matrix endomorphism_action(const RealTwistedTriple& t, const HermitianModule& m, const BalancedSpace& bs,
                                  const std::vector<std::vector<AlgebraElement>>& b) {
    int dE = bs.module_cdim;
    Matrix mul(dE, dE);
    for (int a = 0; a < dE; ++a) {
        ModuleElement ea = bs.basis_element(m.algebra, a);
        ModuleElement moved(m.n_slots, zero_element(m.algebra));
        for (int i = 0; i < m.n_slots; ++i)
            for (int k = 0; k < m.n_slots; ++k) moved[i] += b[i][k] * ea[k];
        mul.col(a) = bs.e_basis.adjoint() * detail::vec_module(compress(m, moved));
    }
    return kron(mul, Matrix::Identity(bs.hilbert_dim, bs.hilbert_dim));
}

}  // namespace twistkit
