#include "twistkit/fixtures.hpp"
#include "twistkit/forms.hpp"
#include "twistkit/morita.hpp"
#include "twistkit/triple.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace twistkit;

TEST_CASE("two-point fixture satisfies every axiom exactly", "[triple]") {
    RealTwistedTriple t = two_point_fixture();
    ValidationReport rep = validate_triple(t);
    CHECK(rep.pass);
    CHECK(rep.basis_mode == "full-basis");
    for (const auto& c : rep.checks) {
        INFO(c.name);
        CHECK(c.residual <= 1e-14);
    }
    // the twisted first-order check is vacuous there: the form bimodule is {0}
    const ValidationCheck* fo = rep.find("twisted-first-order");
    REQUIRE(fo != nullptr);
    CHECK(fo->note.find("vacuous") != std::string::npos);
}

TEST_CASE("untwisted matrix bimodule triple passes", "[triple]") {
    RealTwistedTriple t = matrix_bimodule_fixture();
    ValidationReport rep = validate_triple(t);
    CHECK(rep.pass);
    // and its one-forms are genuinely nonzero
    Rng rng(3);
    TwistedOneForm w = form_from_generators(t, {{random_element(t.algebra, rng), random_element(t.algebra, rng)}});
    CHECK(opnorm(w.value) > 0.1);
}

TEST_CASE("twisted first-order residual", "[triple]") {
    SECTION("b = 1 gives zero") {
        RealTwistedTriple t = matrix_bimodule_fixture();
        Rng rng(5);
        CHECK(twisted_first_order_residual(t, random_element(t.algebra, rng), unit_element(t.algebra)) < 1e-14);
    }
    SECTION("two-point fixture: identically zero (inner bracket vanishes)") {
        RealTwistedTriple t = two_point_fixture();
        Rng rng(7);
        for (int k = 0; k < 10; ++k)
            CHECK(twisted_first_order_residual(t, random_element(t.algebra, rng),
                                               random_element(t.algebra, rng)) == 0.0);
    }
    SECTION("matrix fixture: exact for random pairs") {
        RealTwistedTriple t = matrix_bimodule_fixture();
        Rng rng(9);
        for (int k = 0; k < 20; ++k)
            CHECK(twisted_first_order_residual(t, random_element(t.algebra, rng),
                                               random_element(t.algebra, rng)) < 1e-14);
    }
    SECTION("rho = id: equals the classical first-order residual exactly") {
        RealTwistedTriple t = matrix_bimodule_fixture();
        Rng rng(11);
        AlgebraElement a = random_element(t.algebra, rng), b = random_element(t.algebra, rng);
        Matrix x = commutator(t.dirac, t.pi(a));
        Matrix bo = t.opposite(b);
        double classical = rel_residual(Matrix(x * bo), Matrix(bo * x));
        CHECK(twisted_first_order_residual(t, a, b) == classical);
    }
}

TEST_CASE("validation is monotone in the tolerance", "[triple]") {
    RealTwistedTriple t = two_point_fixture();
    // perturb the Dirac operator so some residuals are small but nonzero
    t.dirac(0, 0) += 1e-8;
    for (double tau : {1e-12, 1e-9, 1e-6, 1e-3}) {
        ValidateOptions o1, o2;
        o1.tol = Tolerance{tau, 1e-15};
        o2.tol = Tolerance{tau * 1000, 1e-15};
        bool p1 = validate_triple(t, o1).pass;
        bool p2 = validate_triple(t, o2).pass;
        if (p1) CHECK(p2);  // pass at tau implies pass at looser tau
    }
}

TEST_CASE("self-adjoint fluctuations revalidate with the same signs", "[triple]") {
    RealTwistedTriple t = matrix_bimodule_fixture();
    Rng rng(13);
    // hermitian one-form: w + w* stays in the untwisted bimodule
    AlgebraElement a = random_element(t.algebra, rng), b = random_element(t.algebra, rng);
    GeneratorList gens{{a, b},
                       {Complex(-1, 0) * unit_element(t.algebra), b.adjoint() * a.adjoint()},
                       {b.adjoint(), a.adjoint()}};
    TwistedOneForm w = form_from_generators(t, gens);
    REQUIRE(self_adjoint_check(w) < 1e-13);

    RealTwistedTriple fluct = t;
    fluct.dirac = fluctuate(t, t.dirac, w);
    ValidationReport rep = validate_triple(fluct);
    CHECK(rep.pass);
}
