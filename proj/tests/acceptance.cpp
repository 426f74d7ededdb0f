// Acceptance suite. One test case per criterion, each printing a PASS/FAIL
// line with the decisive residuals. Tolerances are pinned here, in code.
//
// Known honest failures: the twisted first-order condition is a continuum
// identity; on a finite lattice the commutator [nabla, f] is a hopping
// operator and no nonzero derivative satisfies the condition exactly (a
// derivation on a finite commutative function algebra vanishes). Criteria
// that consume that condition on lattice fixtures (parts of 1, 5, 7, 8)
// therefore report the measured O(h) gap and fail as stated rather than
// being loosened. Everything that holds exactly on the lattice — the other
// axioms, the conjugation lemmas, the direct self-adjointness route, the
// constant-phase class, the weak-sense O(h^2) convergence — is asserted
// green at full precision.

#include "twistkit/fixtures.hpp"
#include "twistkit/gauge.hpp"
#include "twistkit/io.hpp"
#include "twistkit/lattice.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>

using namespace twistkit;

namespace {

struct Criterion {
    const char* id;
    bool ok = true;
    std::vector<std::string> rows;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    explicit Criterion(const char* id) : id(id) {}

    void row(const std::string& label, double value, double bound, bool expect_below = true,
             const std::string& note = "") {
        bool pass = expect_below ? (value <= bound) : (value > bound);
        ok = ok && pass;
        char buf[256];
        std::snprintf(buf, sizeof buf, "    %-52s %11.4e %s %.1e  %s%s", label.c_str(), value,
                      expect_below ? "<=" : "> ", bound, pass ? "ok" : "VIOLATED",
                      note.empty() ? "" : ("  [" + note + "]").c_str());
        rows.push_back(buf);
        CHECK((expect_below ? value <= bound : value > bound));
    }

    void claim(const std::string& label, bool pass, const std::string& note = "") {
        ok = ok && pass;
        rows.push_back("    " + label + std::string(pass ? "  ok" : "  VIOLATED") +
                       (note.empty() ? "" : "  [" + note + "]"));
        CHECK(pass);
    }

    ~Criterion() {
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %s  (%.1f s)\n", id, ok ? "PASS" : "FAIL", secs);
        for (const auto& r : rows) std::printf("%s\n", r.c_str());
        std::fflush(stdout);
    }
};

RealVector smooth_field(const LatticeGeometry& g, Rng& rng) {
    RealVector f = RealVector::Zero(g.sites);
    std::uniform_real_distribution<double> ph(0, 2 * M_PI), amp(0.3, 1.0);
    std::uniform_int_distribution<int> kk(-2, 2);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<int> ks(2 * g.m);
        for (auto& k : ks) k = kk(rng);
        double phase = ph(rng), a = amp(rng);
        for (int x = 0; x < g.sites; ++x) {
            double arg = phase;
            for (int d = 0; d < 2 * g.m; ++d) arg += 2 * M_PI * ks[d] * g.coord(x, d) / g.L;
            f(x) += a * std::cos(arg);
        }
    }
    return f;
}

TwistedOneForm random_form(const RealTwistedTriple& t, Rng& rng) {
    return form_from_generators(t, {{random_element(t.algebra, rng), random_element(t.algebra, rng)}});
}

double validation_worst(const ValidationReport& rep, std::string* worst_name = nullptr) {
    double worst = 0;
    for (const auto& c : rep.checks)
        if (c.relative > worst) {
            worst = c.relative;
            if (worst_name) *worst_name = c.name;
        }
    return worst;
}

}  // namespace

TEST_CASE("axiom suite on the built-in fixtures", "[c1]") {
    Criterion c("C01 axiom suite");
    {
        ValidationReport rep = validate_triple(two_point_fixture());
        c.row("two-point: worst axiom residual", validation_worst(rep), 1e-10);
    }
    {
        MinimalTwistTriple mt = lattice_m1_fixture(9);
        ValidationReport rep = validate_triple(mt.triple);
        double exact_worst = 0, first_order = 0;
        for (const auto& ck : rep.checks)
            (ck.name == "twisted-first-order" ? first_order : exact_worst) =
                std::max(ck.name == "twisted-first-order" ? first_order : exact_worst, ck.relative);
        c.row("lattice m=1 L=9: worst residual outside first order", exact_worst, 1e-10);
        c.row("lattice m=1 L=9: twisted first-order residual", first_order, 1e-10, true,
              "continuum identity; the lattice hop operator violates it at O(h)");
    }
    {
        MinimalTwistTriple mt = lattice_m2_fixture(3);
        ValidateOptions opt;
        opt.sampled_elements = 6;
        opt.sampled_basis_pairs = 6;
        ValidationReport rep = validate_triple(mt.triple, opt);
        double exact_worst = 0, first_order = 0;
        for (const auto& ck : rep.checks)
            (ck.name == "twisted-first-order" ? first_order : exact_worst) =
                std::max(ck.name == "twisted-first-order" ? first_order : exact_worst, ck.relative);
        c.row("lattice m=2 L=3: worst residual outside first order", exact_worst, 1e-10);
        c.row("lattice m=2 L=3: twisted first-order residual", first_order, 1e-10, true,
              "continuum identity; the lattice hop operator violates it at O(h)");
    }
}

TEST_CASE("self-Morita reductions for right and left modules", "[c2]") {
    Criterion c("C02 covariant reductions");
    RealTwistedTriple fixtures[] = {matrix_bimodule_fixture(), lattice_m1_fixture(3).triple};
    const char* names[] = {"matrix", "lattice m=1 L=3"};
    Rng rng(202);
    for (int f = 0; f < 2; ++f) {
        const RealTwistedTriple& t = fixtures[f];
        HermitianModule mr = trivial_module(ModuleSide::right, t.algebra);
        HermitianModule ml = trivial_module(ModuleSide::left, t.algebra);
        BalancedSpace bsr = balanced_tensor(t, mr);
        BalancedSpace bsl = balanced_tensor(t, ml);
        double worst_r = 0, worst_l = 0;
        for (int k = 0; k < 10; ++k) {
            TwistedOneForm w = random_form(t, rng);
            Connection cr;
            cr.target = FormSide::plain;
            cr.potential = {{w}};
            CovariantOperator cov = covariant_operator(t, mr, cr, bsr);
            worst_r = std::max(worst_r, rel_residual(cov.compressed, Matrix(t.dirac + w.value)));

            Connection cl;
            cl.target = FormSide::opposite;
            cl.potential = {{j_conjugate_form(t, w).form}};
            CovariantOperator covl = covariant_operator(t, ml, cl, bsl);
            double ep = t.signs.eps_prime;
            worst_l = std::max(
                worst_l, rel_residual(covl.compressed, Matrix(t.dirac + ep * conjugate_by(t.j, w.value))));
        }
        c.row(std::string(names[f]) + ": |D_R - (D + w)| over 10 potentials", worst_r, 1e-10);
        c.row(std::string(names[f]) + ": |D_L - (D + eps' J w J^-1)|", worst_l, 1e-10);
    }
}

TEST_CASE("fluctuation compatibility equivalence", "[c3]") {
    Criterion c("C03 bimodule fluctuation equivalence");
    RealTwistedTriple fixtures[] = {matrix_bimodule_fixture(), lattice_m1_fixture(3).triple};
    const char* names[] = {"matrix", "lattice m=1 L=3"};
    Rng rng(303);
    for (int f = 0; f < 2; ++f) {
        const RealTwistedTriple& t = fixtures[f];
        double worst_sym = 0, worst_j = 0;
        for (int k = 0; k < 10; ++k) {
            TwistedOneForm w = random_form(t, rng);
            FluctuationResult res = assemble_fluctuation(t, w, w);
            worst_j = std::max(worst_j, res.j_residual);
            worst_sym = std::max(worst_sym, res.symmetrized_residual);
        }
        c.row(std::string(names[f]) + ": equal halves, J-compatibility", worst_j, 1e-10);
        c.row(std::string(names[f]) + ": symmetrized form reproduces D'", worst_sym, 1e-10);

        double weakest_violation = 1e300;
        int compatible = 0;
        for (int k = 0; k < 20; ++k) {
            FluctuationResult res = assemble_fluctuation(t, random_form(t, rng), random_form(t, rng));
            if (res.j_compatible) ++compatible;
            weakest_violation = std::min(weakest_violation, res.j_residual);
        }
        c.row(std::string(names[f]) + ": generic unequal halves violate J-compat", weakest_violation, 1e-3,
              false);
        c.claim(std::string(names[f]) + ": no generic pair passed as compatible", compatible == 0);
    }
}

TEST_CASE("conjugation lemmas for one-forms", "[c4]") {
    Criterion c("C04 one-form conjugation lemmas");
    struct Item {
        const char* name;
        RealTwistedTriple t;
    } fixtures[] = {{"two-point", two_point_fixture()},
                    {"matrix", matrix_bimodule_fixture()},
                    {"lattice m=1 L=9", lattice_m1_fixture(9).triple},
                    {"lattice m=2 L=3", lattice_m2_fixture(3).triple}};
    Rng rng(404);
    for (const auto& item : fixtures) {
        double worst = 0;
        int lists = item.t.dim() > 200 ? 12 : 50;  // generator lists per fixture
        for (int k = 0; k < lists; ++k) {
            GeneratorList gens;
            int len = 1 + int(rng() % 3);
            for (int g = 0; g < len; ++g)
                gens.emplace_back(random_element(item.t.algebra, rng), random_element(item.t.algebra, rng));
            TwistedOneForm w = form_from_generators(item.t, gens);
            auto res = j_conjugate_form(item.t, w);
            double scale = std::max(1.0, opnorm(w.value));
            worst = std::max(worst, std::max(res.direct_residual, res.rebuild_residual) / scale);
        }
        c.row(std::string(item.name) + ": both conjugation routes agree", worst, 1e-12);
    }
}

TEST_CASE("twisted conjugation reproduces the transformed fluctuation", "[c5]") {
    Criterion c("C05 gauge conjugation identity");
    Rng rng(505);

    {  // two-point: the form bimodule is {0}; the conjugation identity is exact
        RealTwistedTriple t = two_point_fixture();
        double worst = 0;
        for (int k = 0; k < 50; ++k) {
            GaugeUnitary g = random_gauge_unitary(t, rng);
            worst = std::max(worst,
                             twisted_conjugate_dirac(t, t.dirac, zero_form(t), g).identity_residual);
        }
        c.row("two-point: 50 random u (w = 0 forced)", worst, 1e-10);
    }
    {  // untwisted regression
        RealTwistedTriple t = matrix_bimodule_fixture();
        double worst = 0, worst_pure = 0;
        for (int k = 0; k < 50; ++k) {
            TwistedOneForm w = random_form(t, rng);
            GaugeUnitary g = random_gauge_unitary(t, rng);
            auto rep = twisted_conjugate_dirac(t, fluctuate(t, t.dirac, w), w, g);
            worst = std::max(worst, rep.identity_residual);
            worst_pure = std::max(worst_pure, rep.pure_dirac_residual);
        }
        c.row("matrix (rho = id): 50 random (u, w)", worst, 1e-10);
        c.row("matrix (rho = id): w = 0 special case", worst_pure, 1e-10);
    }
    auto lattice_rows = [&](const MinimalTwistTriple& mt, const char* name, int samples) {
        const RealTwistedTriple& t = mt.triple;
        double ep = t.signs.eps_prime;
        double worst = 0;
        for (int k = 0; k < samples; ++k) {
            TwistedOneForm w = random_form(t, rng);
            GaugeUnitary g = random_gauge_unitary(t, rng);
            Matrix dw = fluctuate(t, t.dirac, w);
            Matrix lhs = twist_of_adjoint(t, g) * dw * g.ad.adjoint();
            AlgebraElement us = g.u.adjoint();
            Matrix wu = t.pi(t.rho(g.u)) * t.delta_rho(us) + t.pi(t.rho(g.u)) * w.value * t.pi(us);
            Matrix rhs = t.dirac + wu + ep * conjugate_by(t.j, wu);
            worst = std::max(worst, rel_residual(lhs, rhs));
        }
        c.row(std::string(name) + ": random (u, w)", worst, 1e-10, true,
              "identity consumes the twisted first-order condition, broken at O(h) on the lattice");
    };
    lattice_rows(lattice_m1_fixture(9), "lattice m=1 L=9 (20 samples)", 20);
    lattice_rows(lattice_m2_fixture(3), "lattice m=2 L=3 (10 samples)", 10);
}

TEST_CASE("certificate consistency", "[c6]") {
    Criterion c("C06 certificate consistency");
    struct Item {
        const char* name;
        RealTwistedTriple t;
        int samples;
    } fixtures[] = {{"two-point", two_point_fixture(), 40},
                    {"matrix", matrix_bimodule_fixture(), 30},
                    {"lattice m=1 L=9", lattice_m1_fixture(9).triple, 30}};
    Rng rng(606);
    double worst_gap = 0;
    bool verdicts_agree = true;
    for (const auto& item : fixtures) {
        for (int k = 0; k < item.samples; ++k) {
            GaugeUnitary g = random_gauge_unitary(item.t, rng);
            SelfAdjointnessCertificate cert = selfadjointness_certificate(item.t, g);
            worst_gap = std::max(worst_gap, std::abs(cert.variant_a_residual - cert.variant_b_residual) /
                                                std::max(1.0, cert.omega_norm));
            verdicts_agree = verdicts_agree && (cert.verdict == cert.direct_verdict);
        }
    }
    c.row("variant-a vs variant-b over 100 unitaries", worst_gap, 1e-10);
    c.claim("direct self-adjointness agrees with the verdict on every sample", verdicts_agree,
            "fixtures satisfying the first-order hypothesis; the m=2 lattice gap is reported under C07");
    // the variant agreement is exact even where the hypothesis fails:
    MinimalTwistTriple m2 = lattice_m2_fixture(3);
    Rng rng2(607);
    double m2gap = 0;
    for (int k = 0; k < 10; ++k) {
        auto cert = selfadjointness_certificate(m2.triple, random_gauge_unitary(m2.triple, rng2));
        m2gap = std::max(m2gap,
                         std::abs(cert.variant_a_residual - cert.variant_b_residual) /
                             std::max(1.0, cert.omega_norm));
    }
    c.row("variant agreement also on the m=2 lattice", m2gap, 1e-10);
}

TEST_CASE("self-adjointness classes of the minimal twist", "[c7]") {
    Criterion c("C07 self-adjointness classes");
    Rng rng(707);
    {  // m = 2: the criterion route vs the exact direct route
        MinimalTwistTriple mt = lattice_m2_fixture(3);
        double best_variant = 1e300, worst_direct = 0;
        for (int k = 0; k < 50; ++k) {
            RealVector t1 = smooth_field(mt.geom, rng), t2 = smooth_field(mt.geom, rng);
            AnnotatedCertificate ann = prop53_experiment(mt, t1, t2);
            best_variant = std::min(best_variant, ann.cert.variant_a_residual /
                                                      std::max(1.0, ann.cert.omega_norm));
            worst_direct = std::max(worst_direct, ann.cert.direct_residual);
        }
        c.row("m=2: direct route, 50 random unitaries (Ad(u) = 1 exactly)", worst_direct, 1e-8);
        c.row("m=2: criterion route, best of 50 random unitaries", best_variant, 1e-8, true,
              "criterion consumes the first-order condition; O(h) on the lattice, exact only in the continuum");
    }
    {  // m = 1: constant phase difference is certified, generic phases fail loudly
        MinimalTwistTriple mt = lattice_m1_fixture(9);
        double worst_const = 0;
        bool generic_fail = true;
        for (int k = 0; k < 50; ++k) {
            RealVector t1 = smooth_field(mt.geom, rng);
            AnnotatedCertificate annc = prop53_experiment(mt, t1, RealVector(t1.array() - (0.1 + 0.05 * k)));
            worst_const = std::max(worst_const, annc.cert.variant_a_residual);
            RealVector t2 = smooth_field(mt.geom, rng);
            AnnotatedCertificate anng = prop53_experiment(mt, t1, t2);
            generic_fail =
                generic_fail && (anng.cert.variant_a_residual > 0.1 * anng.cert.omega_norm);
        }
        c.row("m=1: constant phase difference, 50 unitaries", worst_const, 1e-12);
        c.claim("m=1: 50 generic unitaries fail above 0.1 |omega(u)|", generic_fail);
    }
}

TEST_CASE("nonzero self-adjoint fluctuations by KO class", "[c8]") {
    Criterion c("C08 fluctuation classes");
    Rng rng(808);
    {  // m = 2
        MinimalTwistTriple mt = lattice_m2_fixture(3);
        double worst_sa = 0, worst_dec = 0;
        for (int k = 0; k < 10; ++k) {
            Vector f = random_vector(mt.sites(), rng), fp = random_vector(mt.sites(), rng);
            AlgebraElement a = mt.element(f, Vector(f.conjugate()));
            AlgebraElement ap = mt.element(fp, Vector(fp.conjugate()));
            Prop55Report rep = prop55_fluctuate(mt, a, ap);
            worst_sa = std::max(worst_sa, rep.sa_residual);
            // decompose against the closed form regardless of the verdict
            std::vector<RealVector> freal;
            for (const auto& v : rep.f_mu) freal.push_back(v.real());
            Matrix omega = mt.triple.pi(mt.triple.rho(a)) * mt.triple.delta_rho(ap);
            Matrix sum = omega + conjugate_by(mt.triple.j, omega);
            worst_dec = std::max(worst_dec, rel_residual(sum, mt.direct_fluctuation(freal)));
        }
        c.row("m=2: one-form-route self-adjointness (f = -g construction)", worst_sa, 1e-10, true,
              "exact only in the continuum; the lattice blocks are hopping operators");
        c.row("m=2: closed-form decomposition residual", worst_dec, 1e-10, true,
              "same lattice gap as above");
        // the closed-form fluctuation itself is exact on the lattice
        std::vector<RealVector> fmu;
        for (int mu = 0; mu < 4; ++mu) fmu.push_back(smooth_field(mt.geom, rng));
        Matrix sig = mt.direct_fluctuation(fmu);
        RealTwistedTriple fluct = mt.triple;
        fluct.dirac = mt.triple.dirac + sig;
        double ep = fluct.signs.eps_prime;
        c.row("m=2: closed-form shape is self-adjoint", self_adjoint_check(sig), 1e-10);
        c.row("m=2: closed-form shape keeps the real-structure sign",
              rel_residual(conjugate_by(fluct.j, fluct.dirac), Matrix(ep * fluct.dirac)), 1e-10);
        ValidationReport base = validate_triple(mt.triple), again = validate_triple(fluct);
        double drift = 0;
        for (size_t i = 0; i < base.checks.size(); ++i)
            drift = std::max(drift, std::abs(base.checks[i].residual - again.checks[i].residual));
        c.row("m=2: fluctuated triple revalidates with the same residual profile", drift, 1e-9);
    }
    {  // m = 1: self-adjointness forces vanishing blocks
        MinimalTwistTriple mt = lattice_m1_fixture(5);
        bool implication = true;
        for (int k = 0; k < 50; ++k) {
            Prop55Report rep = prop55_fluctuate(mt, random_element(mt.triple.algebra, rng),
                                                random_element(mt.triple.algebra, rng));
            if (rep.self_adjoint)
                implication = implication && std::max(rep.f_block_norm, rep.g_block_norm) <= 1e-10;
        }
        AlgebraElement one = unit_element(mt.triple.algebra);
        Prop55Report ctrl = prop55_fluctuate(mt, one, Complex(0.4, -0.2) * one);
        implication = implication && ctrl.self_adjoint && ctrl.f_block_norm <= 1e-10;
        c.claim("m=1: over 50 samples, self-adjointness only with vanishing blocks", implication);
    }
}

TEST_CASE("fluctuations form a monoid", "[c9]") {
    Criterion c("C09 fluctuation monoid");
    RealTwistedTriple fixtures[] = {matrix_bimodule_fixture(), lattice_m1_fixture(3).triple};
    const char* names[] = {"matrix", "lattice m=1 L=3"};
    Rng rng(909);
    for (int f = 0; f < 2; ++f) {
        double worst = 0;
        for (int k = 0; k < 25; ++k)
            worst = std::max(worst, fluctuation_monoid_check(fixtures[f], random_form(fixtures[f], rng),
                                                             random_form(fixtures[f], rng)));
        c.row(std::string(names[f]) + ": 25 random pairs", worst, 1e-10);
    }
}

TEST_CASE("balanced tensor products are sound", "[c10]") {
    Criterion c("C10 quotient soundness");
    struct Item {
        const char* name;
        RealTwistedTriple t;
    } fixtures[] = {{"two-point", two_point_fixture()},
                    {"matrix", matrix_bimodule_fixture()},
                    {"lattice m=1 L=3", lattice_m1_fixture(3).triple}};
    for (const auto& item : fixtures) {
        for (ModuleSide side : {ModuleSide::right, ModuleSide::left}) {
            HermitianModule triv = trivial_module(side, item.t.algebra);
            BalancedSpace bs = balanced_tensor(item.t, triv);
            std::string label = std::string(item.name) + (side == ModuleSide::right ? " right" : " left");
            c.claim(label + " E=A: dimensions agree", bs.abstract_dim == bs.concrete_dim);
            CovariantOperator cov = covariant_operator(item.t, triv, grassmann_connection(item.t, triv), bs);
            c.row(label + " E=A: relation span annihilated", cov.welldef_residual,
                  1e-10 * std::max(1.0, opnorm(cov.on_product)));
        }
        HermitianModule pa2 = pa2_module(item.t.algebra);
        BalancedSpace bs = balanced_tensor(item.t, pa2);
        c.claim(std::string(item.name) + " pA2: dimensions agree", bs.abstract_dim == bs.concrete_dim);
        CovariantOperator cov = covariant_operator(item.t, pa2, grassmann_connection(item.t, pa2), bs);
        c.row(std::string(item.name) + " pA2: relation span annihilated", cov.welldef_residual,
              1e-10 * std::max(1.0, opnorm(cov.on_product)));
    }
}

TEST_CASE("lattice commutators converge at second order", "[c11]") {
    Criterion c("C11 lattice convergence");
    ConvergenceReport rep = convergence_experiment({9, 17, 33}, ko_preset("ko2"));
    char buf[128];
    std::snprintf(buf, sizeof buf, "    residuals L=9/17/33: %.4e %.4e %.4e", rep.residuals[0],
                  rep.residuals[1], rep.residuals[2]);
    c.rows.push_back(buf);
    c.row("fitted order |p - 2|", std::abs(rep.fitted_order - 2.0), 0.3);
}

TEST_CASE("reports are deterministic", "[c12]") {
    Criterion c("C12 determinism");
    const char* cli = std::getenv("TWISTKIT_CLI");
    if (cli) {
        std::string base = std::string(cli);
        auto run = [&](const std::string& out) {
            std::string cmd = base + " lattice --m 1 --L 9 --experiment prop53 --seed 7 --out " + out +
                              " >/dev/null 2>&1";
            return std::system(cmd.c_str());
        };
        int rc1 = run("/tmp/twistkit_det_a.json");
        int rc2 = run("/tmp/twistkit_det_b.json");
        c.claim("two CLI runs exit identically", rc1 == rc2);
        auto slurp = [](const char* p) {
            std::ifstream in(p);
            return Json::parse(in);
        };
        Json a = slurp("/tmp/twistkit_det_a.json"), b = slurp("/tmp/twistkit_det_b.json");
        c.claim("reports agree after stripping wall-clock fields",
                strip_volatile(a).dump() == strip_volatile(b).dump());
    } else {
        // library-level determinism: identical seeds, identical serialized reports
        MinimalTwistTriple mt = lattice_m1_fixture(5);
        ValidateOptions opt;
        opt.seed = 77;
        Json a = validation_to_json(validate_triple(mt.triple, opt));
        Json b = validation_to_json(validate_triple(mt.triple, opt));
        c.claim("identical seeds give byte-identical validation reports", a.dump() == b.dump());
    }
}
