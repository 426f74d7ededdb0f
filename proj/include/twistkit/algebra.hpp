// algebra.hpp — finite-dimensional *-algebras as direct sums of full matrix
// blocks, their Hilbert-space representations, and the regular automorphisms
// (block permutation composed with blockwise inner) used as twists.

#pragma once

#include "twistkit/antilinear.hpp"
#include "twistkit/core.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

namespace twistkit {

// ------------------------------- StarAlgebra -------------------------------

struct StarAlgebra {
    std::vector<int> blocks;  // block i is the full blocks[i] x blocks[i] matrix algebra

    int num_blocks() const { return static_cast<int>(blocks.size()); }

    // complex dimension, sum of n_i^2
    int dim() const {
        int d = 0;
        for (int n : blocks) d += n * n;
        return d;
    }

    bool operator==(const StarAlgebra& o) const { return blocks == o.blocks; }
    bool operator!=(const StarAlgebra& o) const { return !(*this == o); }
};

struct AlgebraElement {
    StarAlgebra algebra;
    std::vector<Matrix> parts;

    AlgebraElement() = default;
    AlgebraElement(StarAlgebra alg, std::vector<Matrix> p) : algebra(std::move(alg)), parts(std::move(p)) {}

    AlgebraElement adjoint() const {
        AlgebraElement out{algebra, parts};
        for (auto& m : out.parts) m = m.adjoint().eval();
        return out;
    }

    double norm() const {
        double s = 0;
        for (const auto& m : parts) s += m.squaredNorm();
        return std::sqrt(s);
    }

    AlgebraElement& operator+=(const AlgebraElement& o) {
        check(o, "operator+");
        for (size_t i = 0; i < parts.size(); ++i) parts[i] += o.parts[i];
        return *this;
    }
    AlgebraElement& operator-=(const AlgebraElement& o) {
        check(o, "operator-");
        for (size_t i = 0; i < parts.size(); ++i) parts[i] -= o.parts[i];
        return *this;
    }
    AlgebraElement& operator*=(Complex c) {
        for (auto& m : parts) m *= c;
        return *this;
    }

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(Complex c, AlgebraElement a) { return a *= c; }
    friend AlgebraElement operator*(AlgebraElement a, Complex c) { return a *= c; }

    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
        a.check(b, "operator*");
        AlgebraElement out{a.algebra, a.parts};
        for (size_t i = 0; i < out.parts.size(); ++i) out.parts[i] = a.parts[i] * b.parts[i];
        return out;
    }

    void check(const AlgebraElement& o, const char* who) const {
        if (algebra != o.algebra) throw AlgebraMismatchError(std::string(who) + ": elements of different algebras");
    }
};

inline AlgebraElement zero_element(const StarAlgebra& alg) {
    std::vector<Matrix> parts;
    for (int n : alg.blocks) parts.push_back(Matrix::Zero(n, n));
    return {alg, parts};
}

inline AlgebraElement unit_element(const StarAlgebra& alg) {
    std::vector<Matrix> parts;
    for (int n : alg.blocks) parts.push_back(Matrix::Identity(n, n));
    return {alg, parts};
}

// matrix-unit basis, block by block
inline std::vector<AlgebraElement> canonical_basis(const StarAlgebra& alg) {
    std::vector<AlgebraElement> basis;
    basis.reserve(alg.dim());
    for (int b = 0; b < alg.num_blocks(); ++b) {
        int n = alg.blocks[b];
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                AlgebraElement e = zero_element(alg);
                e.parts[b](r, c) = 1.0;
                basis.push_back(std::move(e));
            }
    }
    return basis;
}

inline AlgebraElement random_element(const StarAlgebra& alg, Rng& rng) {
    std::vector<Matrix> parts;
    for (int n : alg.blocks) parts.push_back(random_matrix(n, n, rng));
    return {alg, parts};
}

inline AlgebraElement random_hermitian_element(const StarAlgebra& alg, Rng& rng) {
    std::vector<Matrix> parts;
    for (int n : alg.blocks) parts.push_back(random_hermitian(n, rng));
    return {alg, parts};
}

// u = exp(i h), h hermitian scaled to |h| <= pi; spans the identity component
inline AlgebraElement random_unitary_element(const StarAlgebra& alg, Rng& rng) {
    AlgebraElement h = random_hermitian_element(alg, rng);
    double s = h.norm();
    if (s > M_PI) h *= Complex(M_PI / s, 0);
    AlgebraElement u = h;
    for (size_t i = 0; i < u.parts.size(); ++i) u.parts[i] = hermitian_phase(h.parts[i]);
    return u;
}

// ------------------------------- Automorphism -------------------------------

// rho(a)_i = W_i a_{perm[i]} W_i^*, perm a block permutation with matching sizes
struct Automorphism {
    StarAlgebra algebra;
    std::vector<int> perm;
    std::vector<Matrix> unitaries;

    AlgebraElement operator()(const AlgebraElement& a) const {
        if (a.algebra != algebra) throw AlgebraMismatchError("Automorphism: element of a different algebra");
        AlgebraElement out = zero_element(algebra);
        for (int i = 0; i < algebra.num_blocks(); ++i)
            out.parts[i] = unitaries[i] * a.parts[perm[i]] * unitaries[i].adjoint();
        return out;
    }

    Automorphism inverse() const {
        int k = algebra.num_blocks();
        std::vector<int> iperm(k);
        std::vector<Matrix> iw(k);
        for (int i = 0; i < k; ++i) iperm[perm[i]] = i;
        for (int j = 0; j < k; ++j) iw[j] = unitaries[iperm[j]].adjoint();
        return {algebra, iperm, iw};
    }

    // identity action iff the permutation is trivial and each W_i is a scalar phase
    bool is_identity(const Tolerance& tol = {}) const {
        for (int i = 0; i < algebra.num_blocks(); ++i) {
            if (perm[i] != i) return false;
            const Matrix& w = unitaries[i];
            Complex w00 = w(0, 0);
            if (std::abs(w00) < 0.5) return false;
            Matrix scaled = w * (std::abs(w00) / w00);
            if (!tol.ok((scaled - Matrix::Identity(w.rows(), w.cols())).norm(), 1.0)) return false;
        }
        return true;
    }
};

inline Automorphism identity_automorphism(const StarAlgebra& alg) {
    std::vector<int> perm(alg.num_blocks());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Matrix> ws;
    for (int n : alg.blocks) ws.push_back(Matrix::Identity(n, n));
    return {alg, perm, ws};
}

// the flip on an algebra of two matching halves: block i <-> i + k/2
inline Automorphism flip_automorphism(const StarAlgebra& alg) {
    int k = alg.num_blocks();
    if (k % 2 != 0) throw AlgebraMismatchError("flip_automorphism: needs an even number of blocks");
    std::vector<int> perm(k);
    for (int i = 0; i < k / 2; ++i) {
        if (alg.blocks[i] != alg.blocks[i + k / 2])
            throw AlgebraMismatchError("flip_automorphism: halves have mismatched block sizes");
        perm[i] = i + k / 2;
        perm[i + k / 2] = i;
    }
    std::vector<Matrix> ws;
    for (int n : alg.blocks) ws.push_back(Matrix::Identity(n, n));
    return {alg, perm, ws};
}

struct RegularityReport {
    double max_residual = 0.0;
    bool regular = false;
};

// regularity: rho(a*) = (rho^{-1}(a))*, checked on the canonical basis
inline RegularityReport check_regular(const Automorphism& rho, const Tolerance& tol = {}) {
    Automorphism inv = rho.inverse();
    RegularityReport rep;
    for (const auto& e : canonical_basis(rho.algebra)) {
        AlgebraElement lhs = rho(e.adjoint());
        AlgebraElement rhs = inv(e).adjoint();
        rep.max_residual = std::max(rep.max_residual, (lhs - rhs).norm());
    }
    rep.regular = tol.ok(rep.max_residual, 1.0);
    return rep;
}

// Seeded regular twist: an involutive block pairing with W_{perm(i)} W_i
// proportional to 1 (that is exactly what regularity forces on this form).
inline Automorphism random_regular_automorphism(const StarAlgebra& alg, Rng& rng) {
    int k = alg.num_blocks();
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    // random involution among equal-size blocks
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> used(k, false);
    for (int idx = 0; idx < k; ++idx) {
        int i = order[idx];
        if (used[i]) continue;
        used[i] = true;
        for (int jdx = idx + 1; jdx < k; ++jdx) {
            int j = order[jdx];
            if (!used[j] && alg.blocks[i] == alg.blocks[j] && (rng() & 1)) {
                used[j] = true;
                perm[i] = j;
                perm[j] = i;
                break;
            }
        }
    }
    std::vector<Matrix> ws(k);
    for (int i = 0; i < k; ++i) {
        int n = alg.blocks[i];
        if (perm[i] == i) {
            // fixed point: W^2 proportional to 1 -> phase times hermitian unitary
            Matrix v = random_unitary(n, rng);
            Vector signs(n);
            for (int s = 0; s < n; ++s) signs(s) = (rng() & 1) ? 1.0 : -1.0;
            double theta = std::uniform_real_distribution<double>(0, 2 * M_PI)(rng);
            ws[i] = std::polar(1.0, theta) * (v * signs.asDiagonal() * v.adjoint());
        } else if (perm[i] > i) {
            ws[i] = random_unitary(n, rng);
        }
    }
    for (int i = 0; i < k; ++i)
        if (perm[i] < i) ws[i] = ws[perm[i]].adjoint();
    return {alg, perm, ws};
}

// ------------------------------ Representation ------------------------------

// embed(a) = V (blkdiag_i a_i ⊗ 1_{m_i}) V^*, V unitary; pi(1) = 1 by construction
struct Representation {
    StarAlgebra algebra;
    int hilbert_dim = 0;
    std::vector<int> multiplicities;
    Matrix isometry;  // hilbert_dim x hilbert_dim

    // permutation fast path, detected at construction
    std::vector<int> col_perm;  // non-empty iff isometry is a permutation

    Matrix operator()(const AlgebraElement& a) const {
        if (a.algebra != algebra) throw AlgebraMismatchError("Representation: element of a different algebra");
        Matrix blk = Matrix::Zero(hilbert_dim, hilbert_dim);
        int off = 0;
        for (int i = 0; i < algebra.num_blocks(); ++i) {
            int n = algebra.blocks[i], m = multiplicities[i];
            if (m > 0) blk.block(off, off, n * m, n * m) = kron(a.parts[i], Matrix::Identity(m, m));
            off += n * m;
        }
        if (!col_perm.empty()) {
            Matrix out = Matrix::Zero(hilbert_dim, hilbert_dim);
            for (int r = 0; r < hilbert_dim; ++r)
                for (int c = 0; c < hilbert_dim; ++c) out(col_perm[r], col_perm[c]) = blk(r, c);
            return out;
        }
        return isometry * blk * isometry.adjoint();
    }
};

inline Representation make_representation(StarAlgebra alg, std::vector<int> mult, Matrix v) {
    Representation rep;
    rep.algebra = std::move(alg);
    rep.multiplicities = std::move(mult);
    int total = 0;
    for (int i = 0; i < rep.algebra.num_blocks(); ++i) total += rep.algebra.blocks[i] * rep.multiplicities[i];
    rep.hilbert_dim = total;
    if (v.rows() != total || v.cols() != total)
        throw DimensionError("make_representation: isometry must be square of total block size");
    rep.isometry = std::move(v);
    // detect permutation matrices for the fast path (and to skip the unitarity product)
    std::vector<int> perm(total, -1);
    std::vector<bool> hit_row(total, false);
    bool is_perm = true;
    for (int c = 0; c < total && is_perm; ++c) {
        int hits = 0, row = -1;
        for (int r = 0; r < total; ++r) {
            Complex x = rep.isometry(r, c);
            if (std::abs(x) > 1e-14) {
                ++hits;
                row = r;
                if (std::abs(x - Complex(1, 0)) > 1e-14) is_perm = false;
            }
        }
        if (hits != 1 || hit_row[row]) is_perm = false;
        if (is_perm) {
            perm[c] = row;
            hit_row[row] = true;
        }
    }
    if (is_perm)
        rep.col_perm = std::move(perm);
    else if (!is_unitary(rep.isometry))
        throw SchemaError("make_representation: basis assignment is not an isometry");
    return rep;
}

inline Representation multiplicity_rep(const StarAlgebra& alg, std::vector<int> mult) {
    int total = 0;
    for (int i = 0; i < alg.num_blocks(); ++i) total += alg.blocks[i] * mult[i];
    return make_representation(alg, std::move(mult), Matrix::Identity(total, total));
}

struct HomomorphismReport {
    double max_product_residual = 0.0;
    double max_star_residual = 0.0;
    double unit_residual = 0.0;
    bool ok = false;
};

// full-basis check; used at fixture scale where bases are small
inline HomomorphismReport check_representation(const Representation& rep, const Tolerance& tol = {}) {
    HomomorphismReport out;
    auto basis = canonical_basis(rep.algebra);
    std::vector<Matrix> ops;
    ops.reserve(basis.size());
    for (const auto& e : basis) ops.push_back(rep(e));
    for (size_t i = 0; i < basis.size(); ++i) {
        out.max_star_residual = std::max(out.max_star_residual, residual(rep(basis[i].adjoint()), ops[i].adjoint()));
        for (size_t j = 0; j < basis.size(); ++j)
            out.max_product_residual =
                std::max(out.max_product_residual, residual(rep(basis[i] * basis[j]), Matrix(ops[i] * ops[j])));
    }
    out.unit_residual = residual(rep(unit_element(rep.algebra)), Matrix::Identity(rep.hilbert_dim, rep.hilbert_dim));
    out.ok = tol.ok(out.max_product_residual, 1.0) && tol.ok(out.max_star_residual, 1.0) &&
             tol.ok(out.unit_residual, 1.0);
    return out;
}

// -------------------------- opposite-algebra machinery --------------------------

// rho°(b°) computed two ways: (rho^{-1}(b))° and J rho(b*) J^{-1}; the two
// routes agree exactly when the twist is regular, and that agreement is asserted.
inline Matrix rho_opposite(const Representation& rep, const Automorphism& rho, const AntilinearOp& j,
                           const AlgebraElement& b, const Tolerance& tol = {}, double* route_residual = nullptr) {
    auto reg = check_regular(rho, tol);
    if (!reg.regular)
        throw IrregularTwistError("rho_opposite: twist violates regularity (residual " +
                                  std::to_string(reg.max_residual) + ")");
    Matrix via_inverse = opposite_op(j, rep(rho.inverse()(b)));
    Matrix via_j = conjugate_by(j, rep(rho(b.adjoint())));
    double r = residual(via_inverse, via_j);
    if (route_residual) *route_residual = r;
    double scale = std::max(opnorm(via_inverse), opnorm(via_j));
    if (!tol.ok(r, scale))
        throw IrregularTwistError("rho_opposite: dual routes disagree (residual " + std::to_string(r) + ")");
    return via_j;
}

}  // namespace twistkit
