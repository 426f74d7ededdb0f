// fixtures.hpp — the built-in fixture catalog: the two-point minimal twist,
// the untwisted matrix-bimodule triple, the lattice minimal twists, and the
// p·A^2 module.

#pragma once

#include "twistkit/io.hpp"
#include "twistkit/lattice.hpp"
#include "twistkit/morita.hpp"
#include "twistkit/triple.hpp"

#include <string>

namespace twistkit {

// A = C^2 on H = C^2, D = s1, G = s3, J = s1 ∘ conj, flip twist. The twisted
// commutator [D, a]_rho vanishes identically, so the form bimodule is {0}.
inline RealTwistedTriple two_point_fixture() {
    RealTwistedTriple t;
    t.algebra = StarAlgebra{{1, 1}};
    t.rep = multiplicity_rep(t.algebra, {1, 1});
    t.dirac = pauli(1);
    t.j = AntilinearOp{pauli(1)};
    t.grading = pauli(3);
    t.rho = flip_automorphism(t.algebra);
    t.signs = KOSignature{1, 1, -1, 6};
    return t;
}

// A = M_2(C) acting on C^2 (x) C^2 by a (x) 1, J the swap composed with
// conjugation, D = D0 (x) 1 + 1 (x) conj(D0), rho = id. A real spectral triple
// with nonzero one-forms and the first-order condition exact; the regression
// fixture for every untwisted identity.
inline RealTwistedTriple matrix_bimodule_fixture() {
    RealTwistedTriple t;
    t.algebra = StarAlgebra{{2}};
    t.rep = multiplicity_rep(t.algebra, {2});
    Matrix d0(2, 2);
    d0 << 0.35, Complex(0.6, -0.45), Complex(0.6, 0.45), -0.8;
    t.dirac = kron(d0, Matrix::Identity(2, 2)) + kron(Matrix::Identity(2, 2), d0.conjugate());
    Matrix swap = Matrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = 1.0;
    t.j = AntilinearOp{swap};
    t.rho = identity_automorphism(t.algebra);
    t.signs = KOSignature{1, 1, 1, std::nullopt};
    return t;
}

inline MinimalTwistTriple lattice_m1_fixture(int L = 9) {
    return lattice_minimal_twist(1, L, ko_preset("ko2"));
}

inline MinimalTwistTriple lattice_m2_fixture(int L = 3) {
    return lattice_minimal_twist(2, L, ko_preset("ko4"));
}

// E = p A^2 with p = diag(1, 0); flip-invariant, so the twist lifts
inline HermitianModule pa2_module(const StarAlgebra& alg, ModuleSide side = ModuleSide::right) {
    std::vector<std::vector<AlgebraElement>> p(2, std::vector<AlgebraElement>(2, zero_element(alg)));
    p[0][0] = unit_element(alg);
    return make_module(side, alg, std::move(p));
}

// ------------------------------ fixture catalog ------------------------------

inline Json fixture_descriptor(const std::string& name) {
    if (name == "two-point") return triple_to_json(two_point_fixture());
    if (name == "matrix-bimodule") return triple_to_json(matrix_bimodule_fixture());
    if (name == "lattice-m1")
        return Json{{"fixture", "lattice-m1"}, {"m", 1}, {"L", 9}, {"signs", signs_to_json(ko_preset("ko2"))}};
    if (name == "lattice-m2")
        return Json{{"fixture", "lattice-m2"}, {"m", 2}, {"L", 3}, {"signs", signs_to_json(ko_preset("ko4"))}};
    if (name == "pA2-module") {
        RealTwistedTriple t = two_point_fixture();
        HermitianModule m = pa2_module(t.algebra);
        Connection c = grassmann_connection(t, m);
        Json j = module_to_json(m, &c);
        j["triple"] = "two-point";
        return j;
    }
    throw SchemaError("fixture_descriptor: unknown fixture '" + name + "'");
}

// triple loader accepting either a named fixture or a full inline descriptor
inline RealTwistedTriple triple_from_descriptor(const Json& j, const std::string& where) {
    if (j.contains("fixture")) {
        std::string name = j["fixture"].get<std::string>();
        if (name == "two-point") return two_point_fixture();
        if (name == "matrix-bimodule") return matrix_bimodule_fixture();
        if (name == "lattice-m1") return lattice_m1_fixture(j.value("L", 9)).triple;
        if (name == "lattice-m2") return lattice_m2_fixture(j.value("L", 3)).triple;
        throw SchemaError(where + ".fixture: unknown fixture '" + name + "'");
    }
    return triple_from_json(j, where);
}

}  // namespace twistkit
