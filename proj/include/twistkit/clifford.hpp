// clifford.hpp — hermitian Euclidean gamma matrices by iterated tensor
// construction, the chirality element, and the spinor-space conjugation
// matrix found by bounded search over signed Pauli words.

#pragma once

#include "twistkit/core.hpp"
#include "twistkit/triple.hpp"

#include <vector>

namespace twistkit {

inline Matrix pauli(int k) {
    Matrix m(2, 2);
    switch (k) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

struct CliffordData {
    int m = 0;
    std::vector<Matrix> gammas;  // 2m hermitian matrices of size 2^m
    Matrix chirality;            // normalized product of all gammas
};

// gamma^{2k-1} = s3^{(k-1)} (x) s1 (x) 1...,  gamma^{2k} = s3^{(k-1)} (x) s2 (x) 1...
inline CliffordData gamma_basis(int m) {
    if (m < 1) throw UnsupportedDimensionError("gamma_basis: m must be >= 1");
    CliffordData cd;
    cd.m = m;
    for (int k = 1; k <= m; ++k) {
        for (int which : {1, 2}) {
            Matrix g = Matrix::Identity(1, 1);
            for (int i = 0; i < k - 1; ++i) g = kron(g, pauli(3));
            g = kron(g, pauli(which));
            for (int i = k; i < m; ++i) g = kron(g, pauli(0));
            cd.gammas.push_back(g);
        }
    }
    Matrix prod = Matrix::Identity(1 << m, 1 << m);
    for (const auto& g : cd.gammas) prod = prod * g;
    cd.chirality = std::pow(Complex(0, -1), m) * prod;
    return cd;
}

// Search the 4^m Pauli words for the constant spinor matrix c with
//   c conj(c) = eps,  c conj(gamma^mu) c* = -eps' gamma^mu,  c conj(G) c* = eps'' G.
// Phases drop out of every constraint, so words with coefficient 1 suffice.
inline Matrix charge_conjugation_matrix(const CliffordData& cd, const KOSignature& signs,
                                        const Tolerance& tol = {}) {
    if (signs.dim_mod8 && *signs.dim_mod8 != (2 * cd.m) % 8)
        throw NoSuchConjugationError("charge_conjugation_matrix: declared dimension class is not 2m mod 8");
    int dim = 1 << cd.m;
    Matrix id = Matrix::Identity(dim, dim);
    for (int word = 0; word < (1 << (2 * cd.m)); ++word) {
        Matrix c = Matrix::Identity(1, 1);
        for (int k = 0; k < cd.m; ++k) c = kron(c, pauli((word >> (2 * k)) & 3));
        if (!tol.ok(residual(Matrix(c * c.conjugate()), Matrix(double(signs.eps) * id)), 1.0)) continue;
        bool ok = true;
        for (const auto& g : cd.gammas)
            if (!tol.ok(residual(Matrix(c * g.conjugate() * c.adjoint()), Matrix(-double(signs.eps_prime) * g)),
                        1.0)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        if (!tol.ok(residual(Matrix(c * cd.chirality.conjugate() * c.adjoint()),
                             Matrix(double(signs.eps_second) * cd.chirality)),
                    1.0))
            continue;
        return c;
    }
    throw NoSuchConjugationError("charge_conjugation_matrix: no Pauli word realizes the requested signs");
}

}  // namespace twistkit
