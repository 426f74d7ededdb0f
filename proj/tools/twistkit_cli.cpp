// twistkit CLI — batch front end: ingest triple/form/module/unitary
// descriptors, run a verb, emit a machine-readable report.
//
// Exit codes: 0 all expectation checks pass (observations may carry negative
// verdicts), 1 an expectation check failed, 2 malformed input.

#include "twistkit/fixtures.hpp"
#include "twistkit/gauge.hpp"
#include "twistkit/io.hpp"
#include "twistkit/lattice.hpp"
#include "twistkit/morita.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>

using namespace twistkit;

namespace {

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open input file: " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("malformed JSON in " + path + ": " + e.what());
    }
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
    return buf;
}

struct Session {
    Tolerance tol;
    std::uint64_t seed = 1;
    std::string out_path;
    RunReport report;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void expectation(const std::string& name, const std::string& anchor, double resid, double scale,
                     const std::string& note = "") {
        report.checks.push_back(
            {name, anchor, resid, tol.threshold(scale), tol.ok(resid, scale), CheckKind::expectation, note});
    }
    void observation(const std::string& name, const std::string& anchor, double resid, double scale, bool verdict,
                     const std::string& note = "") {
        report.checks.push_back(
            {name, anchor, resid, tol.threshold(scale), verdict, CheckKind::observation, note});
    }

    int finish() {
        report.seed = seed;
        report.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        report.timestamp = iso_timestamp();
        Json j = report_to_json(report);
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            out << j.dump(2) << "\n";
        } else {
            std::cout << j.dump(2) << "\n";
        }
        for (const auto& c : report.checks)
            std::cerr << (c.pass ? "  ok   " : (c.kind == CheckKind::observation ? "  obs- " : "  FAIL "))
                      << c.name << "  residual=" << c.residual << "\n";
        return report.all_expectations_pass() ? 0 : 1;
    }
};

void add_validation_rows(Session& s, const ValidationReport& rep) {
    for (const auto& c : rep.checks)
        s.report.checks.push_back({c.name, c.anchor, c.residual, c.threshold, c.pass, CheckKind::expectation,
                                   c.note});
}

RealVector seeded_field(const LatticeGeometry& g, Rng& rng) {
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

int run_validate(Session& s, const Json& triple_json, bool full_basis) {
    RealTwistedTriple t = triple_from_descriptor(triple_json, "input");
    ValidateOptions opt;
    opt.tol = s.tol;
    opt.seed = s.seed;
    opt.force_full_basis = full_basis;
    ValidationReport rep = validate_triple(t, opt);
    s.report.config["basis_mode"] = rep.basis_mode;
    add_validation_rows(s, rep);
    return s.finish();
}

int run_fluctuate(Session& s, const Json& triple_json, const Json& form_r, const Json& form_l) {
    RealTwistedTriple t = triple_from_descriptor(triple_json, "input");
    TwistedOneForm wr = form_from_json(t, form_r, "form-r");
    TwistedOneForm wl = form_from_json(t, form_l, "form-l");
    FluctuationResult res = assemble_fluctuation(t, wr, wl, s.tol);
    s.observation("j-compatibility", "fluctuation-j-compat", res.j_residual, 1.0, res.j_compatible,
                  res.j_compatible ? "" : "halves differ; violation residual reported below");
    s.observation("compatibility-violation", "fluctuation-violation", res.violation_residual, 1.0,
                  true, "difference-route residual of the compatibility equation");
    if (res.omega) s.expectation("symmetrized-reproduction", "fluctuation-symmetrized", res.symmetrized_residual, 1.0);
    Rng rng(s.seed);
    TwistedOneForm probe = form_from_generators(
        t, {{random_element(t.algebra, rng), random_element(t.algebra, rng)}});
    s.expectation("monoid-composition", "fluctuation-monoid", fluctuation_monoid_check(t, wr, probe), 1.0);
    return s.finish();
}

int run_gauge(Session& s, const Json& triple_json, const Json& unitary_json, const std::optional<Json>& form_json) {
    RealTwistedTriple t = triple_from_descriptor(triple_json, "input");
    AlgebraElement u = [&] {
        if (unitary_json.contains("theta")) {
            if (!triple_json.contains("fixture") ||
                triple_json["fixture"].get<std::string>().rfind("lattice", 0) != 0)
                throw SchemaError("unitary.theta: phase descriptors need a lattice triple");
            int m = triple_json["fixture"] == "lattice-m1" ? 1 : 2;
            int L = triple_json.value("L", m == 1 ? 9 : 3);
            MinimalTwistTriple mt = m == 1 ? lattice_m1_fixture(L) : lattice_m2_fixture(L);
            RealVector t1 = real_vector_from_json(unitary_json["theta"][0], "unitary.theta[0]");
            RealVector t2 = real_vector_from_json(unitary_json["theta"][1], "unitary.theta[1]");
            if (t1.size() != mt.sites() || t2.size() != mt.sites())
                throw SchemaError("unitary.theta: wrong number of sites");
            return mt.phase_unitary(t1, t2);
        }
        return element_from_json(t.algebra, unitary_json.at("element"), "unitary.element");
    }();
    GaugeUnitary g = make_gauge_unitary(t, u, s.tol);
    std::optional<Matrix> dfl;
    if (form_json) {
        TwistedOneForm w = form_from_json(t, *form_json, "fluctuation-form");
        dfl = fluctuate(t, t.dirac, w);
    }
    SelfAdjointnessCertificate cert = selfadjointness_certificate(t, g, dfl, s.tol);
    s.expectation("adjoint-action-unitary", "ad-unitary",
                  residual(Matrix(g.ad.adjoint() * g.ad), Matrix::Identity(t.dim(), t.dim())), 1.0);
    s.expectation("certificate-variant-agreement", "certificate-variants",
                  std::abs(cert.variant_a_residual - cert.variant_b_residual),
                  std::max(cert.omega_norm, 1.0));
    s.observation("certificate-verdict", "certificate-criterion", cert.variant_a_residual,
                  std::max(cert.omega_norm, 1.0), cert.verdict,
                  cert.verdict ? "gauge transform preserves self-adjointness"
                               : "self-adjointness lost under this unitary");
    s.observation("direct-selfadjointness", "certificate-direct", cert.direct_residual, opnorm(t.dirac),
                  cert.direct_verdict, "");
    s.observation("first-order-gap", "certificate-gap", cert.first_order_gap, std::max(cert.omega_norm, 1.0),
                  true, "difference budget between the criterion route and the direct route");
    s.report.config["frak_u_norm"] = cert.frak_u.norm();
    return s.finish();
}

int run_morita(Session& s, const Json& triple_json, const Json& module_json) {
    RealTwistedTriple t = triple_from_descriptor(triple_json, "input");
    HermitianModule m = module_from_json(t.algebra, module_json, "module");
    Connection c = module_json.contains("connection")
                       ? connection_from_json(t, m, module_json["connection"], "module.connection")
                       : grassmann_connection(t, m);
    s.expectation("projection-identities", "module-projection", m.projection_residual(), 1.0);
    CovariantOperator cov = covariant_operator(t, m, c, s.tol);
    s.expectation("quotient-dimensions-agree", "balanced-dims",
                  std::abs(cov.space.abstract_dim - cov.space.concrete_dim), 0.0);
    s.expectation("relation-span-annihilated", "covariant-welldef", cov.welldef_residual,
                  opnorm(cov.on_product));
    Rng rng(s.seed);
    ConnectionOperator co{cov.space, detail::connection_matrix(t, m, c, cov.space)};
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
        ModuleElement eta = random_module_element(m, rng);
        AlgebraElement a = random_element(t.algebra, rng);
        Vector psi = random_vector(t.dim(), rng);
        psi.normalize();
        worst = std::max(worst, leibniz_residual(t, m, co, eta, a, psi));
    }
    s.expectation("connection-leibniz", "connection-leibniz", worst, 1.0);
    if (m.n_slots == 1) {
        // self-Morita reductions on E = A
        if (m.side == ModuleSide::right)
            s.expectation("covariant-reduces-to-potential", "self-morita-right",
                          rel_residual(cov.compressed, Matrix(t.dirac + c.potential[0][0].value)), 1.0);
        else
            s.expectation("covariant-reduces-to-conjugated-potential", "self-morita-left",
                          rel_residual(cov.compressed, Matrix(t.dirac + c.potential[0][0].value)), 1.0);
    }
    return s.finish();
}

int run_lattice(Session& s, int m, int L, const std::string& experiment, bool constant_phi) {
    MinimalTwistTriple mt = m == 1 ? lattice_m1_fixture(L) : lattice_m2_fixture(L);
    s.report.config["hilbert_dim"] = mt.triple.dim();
    if (experiment == "validate") {
        ValidateOptions opt;
        opt.tol = s.tol;
        opt.seed = s.seed;
        ValidationReport rep = validate_triple(mt.triple, opt);
        s.report.config["basis_mode"] = rep.basis_mode;
        add_validation_rows(s, rep);
        Rng rng(s.seed);
        s.expectation("gamma-intertwining", "gamma-intertwining",
                      gamma_intertwining_residual(mt, random_element(mt.triple.algebra, rng)), 1.0);
        return s.finish();
    }
    if (experiment == "prop53") {
        Rng rng(s.seed);
        RealVector t1 = seeded_field(mt.geom, rng);
        RealVector t2 = constant_phi ? RealVector(t1.array() - 0.8) : seeded_field(mt.geom, rng);
        AnnotatedCertificate ann = prop53_experiment(mt, t1, t2, std::nullopt, s.tol);
        s.report.config["ko_class"] = ann.ko_class;
        s.report.config["grad_phi"] = ann.grad_phi;
        s.observation("certificate-verdict", "certificate-criterion", ann.cert.variant_a_residual,
                      std::max(ann.cert.omega_norm, 1.0), ann.cert.verdict,
                      ann.grad_phi < 1e-10 ? "constant phase difference (trivial class)" : "");
        s.observation("direct-selfadjointness", "certificate-direct", ann.cert.direct_residual,
                      opnorm(mt.triple.dirac), ann.cert.direct_verdict, "");
        s.observation("first-order-gap", "certificate-gap", ann.cert.first_order_gap,
                      std::max(ann.cert.omega_norm, 1.0), true,
                      "lattice derivative obstruction; vanishes only in the continuum limit");
        s.expectation("variant-agreement", "certificate-variants",
                      std::abs(ann.cert.variant_a_residual - ann.cert.variant_b_residual),
                      std::max(ann.cert.omega_norm, 1.0));
        return s.finish();
    }
    if (experiment == "prop55") {
        Rng rng(s.seed);
        Vector f = random_vector(mt.sites(), rng), fp = random_vector(mt.sites(), rng);
        AlgebraElement a = mt.element(f, Vector(f.conjugate()));
        AlgebraElement ap = mt.element(fp, Vector(fp.conjugate()));
        Prop55Report rep = prop55_fluctuate(mt, a, ap, s.tol);
        s.report.config["ko_class"] = rep.ko_class;
        s.observation("fluctuation-selfadjoint", "prop55-selfadjoint", rep.sa_residual, 1.0, rep.self_adjoint,
                      rep.self_adjoint ? "" : "one-form route carries the lattice derivative gap");
        s.observation("block-structure", "prop55-blocks", rep.block_structure_residual, 1.0, true, "");
        s.observation("extracted-block-norms", "prop55-block-norms",
                      std::max(rep.f_block_norm, rep.g_block_norm), 1.0, true, "");
        if (rep.decomposition_residual >= 0)
            s.observation("closed-form-decomposition", "prop55-decomposition", rep.decomposition_residual, 1.0,
                          rep.decomposition_residual <= s.tol.threshold(1.0), "");
        return s.finish();
    }
    if (experiment == "ad-trivial") {
        double r = adjoint_triviality_residual(mt, 50, s.seed);
        if (m == 2)
            s.expectation("adjoint-triviality", "ad-trivial", r, 1.0);
        else
            s.observation("adjoint-triviality", "ad-trivial", r, 1.0, r < s.tol.threshold(1.0),
                          "nontrivial adjoint action is expected in this class");
        return s.finish();
    }
    if (experiment == "convergence") {
        if (m != 1) throw SchemaError("convergence experiment runs in the m = 1 model");
        ConvergenceReport rep = convergence_experiment({9, 17, 33}, ko_preset("ko2"));
        Json rows = Json::array();
        for (size_t i = 0; i < rep.sizes.size(); ++i)
            rows.push_back(Json{{"L", rep.sizes[i]}, {"residual", rep.residuals[i]}});
        s.report.config["residuals"] = rows;
        s.report.config["fitted_order"] = rep.fitted_order;
        s.expectation("second-order-convergence", "lattice-convergence", std::abs(rep.fitted_order - 2.0), 0.0,
                      "fitted exponent within 2 +- 0.3");
        s.report.checks.back().threshold = 0.3;
        s.report.checks.back().pass = std::abs(rep.fitted_order - 2.0) <= 0.3;
        return s.finish();
    }
    throw SchemaError("unknown lattice experiment: " + experiment);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for twisted spectral triples"};
    app.require_subcommand(1);

    std::string in_path, out_path, form_r_path, form_l_path, unitary_path, module_path, form_path, fixture_name;
    std::uint64_t seed = 1;
    double rel_tol = -1, abs_tol = -1;
    bool full_basis = false, constant_phi = false;
    int lat_m = 1, lat_L = 9;
    std::string experiment = "validate";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "sampling seed (recorded in the report)");
        cmd->add_option("--rel-tol", rel_tol, "relative tolerance override");
        cmd->add_option("--abs-tol", abs_tol, "absolute tolerance override");
        cmd->add_option("--out", out_path, "report output path (stdout if omitted)");
    };

    CLI::App* validate = app.add_subcommand("validate", "run the axiom verifier on a triple");
    validate->add_option("--in", in_path, "triple descriptor JSON");
    validate->add_option("--fixture", fixture_name, "built-in fixture name");
    validate->add_flag("--full-basis", full_basis, "force the full pairwise basis sweep");
    add_common(validate);

    CLI::App* fluctuate = app.add_subcommand("fluctuate", "assemble a twisted fluctuation from two halves");
    fluctuate->add_option("--in", in_path, "triple descriptor JSON")->required();
    fluctuate->add_option("--form-r", form_r_path, "right-module one-form JSON")->required();
    fluctuate->add_option("--form-l", form_l_path, "left-module one-form JSON")->required();
    add_common(fluctuate);

    CLI::App* gauge = app.add_subcommand("gauge", "self-adjointness certificate for a gauge unitary");
    gauge->add_option("--in", in_path, "triple descriptor JSON")->required();
    gauge->add_option("--unitary", unitary_path, "unitary descriptor JSON")->required();
    gauge->add_option("--fluctuation-form", form_path, "optional self-adjoint fluctuation to gauge");
    add_common(gauge);

    CLI::App* morita = app.add_subcommand("morita", "balanced tensor product and covariant operator checks");
    morita->add_option("--in", in_path, "triple descriptor JSON")->required();
    morita->add_option("--module", module_path, "module descriptor JSON")->required();
    add_common(morita);

    CLI::App* lattice = app.add_subcommand("lattice", "minimal-twist lattice experiments");
    lattice->add_option("--m", lat_m, "half-dimension, 1 or 2")->required();
    lattice->add_option("--L", lat_L, "odd lattice size per direction");
    lattice->add_option("--experiment", experiment, "validate|prop53|prop55|ad-trivial|convergence");
    lattice->add_flag("--constant-phi", constant_phi, "use a constant phase difference in prop53");
    add_common(lattice);

    CLI::App* emit = app.add_subcommand("emit-fixture", "write a built-in fixture descriptor");
    emit->add_option("name", fixture_name, "two-point|matrix-bimodule|lattice-m1|lattice-m2|pA2-module")
        ->required();
    emit->add_option("--out", out_path, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (emit->parsed()) {
            Json j = fixture_descriptor(fixture_name);
            std::ofstream out(out_path);
            if (!out) throw SchemaError("cannot open output file: " + out_path);
            out << j.dump(2) << "\n";
            return 0;
        }

        Session s;
        if (const char* env = std::getenv("TWISTKIT_REL_TOL")) s.tol.rel = std::stod(env);
        if (const char* env = std::getenv("TWISTKIT_ABS_TOL")) s.tol.abs = std::stod(env);
        if (rel_tol > 0) s.tol.rel = rel_tol;
        if (abs_tol > 0) s.tol.abs = abs_tol;
        s.seed = seed;
        s.out_path = out_path;

        auto triple_input = [&]() -> Json {
            if (!fixture_name.empty()) return Json{{"fixture", fixture_name}};
            if (in_path.empty()) throw SchemaError("missing --in (or --fixture)");
            return load_json(in_path);
        };

        if (validate->parsed()) {
            Json tj = triple_input();
            s.report.verb = "validate";
            s.report.config = Json{{"in", in_path.empty() ? fixture_name : in_path},
                                   {"rel_tol", s.tol.rel},
                                   {"abs_tol", s.tol.abs}};
            return run_validate(s, tj, full_basis);
        }
        if (fluctuate->parsed()) {
            s.report.verb = "fluctuate";
            s.report.config = Json{{"in", in_path}, {"form_r", form_r_path}, {"form_l", form_l_path}};
            return run_fluctuate(s, load_json(in_path), load_json(form_r_path), load_json(form_l_path));
        }
        if (gauge->parsed()) {
            s.report.verb = "gauge";
            s.report.config = Json{{"in", in_path}, {"unitary", unitary_path}};
            std::optional<Json> fj;
            if (!form_path.empty()) fj = load_json(form_path);
            return run_gauge(s, load_json(in_path), load_json(unitary_path), fj);
        }
        if (morita->parsed()) {
            s.report.verb = "morita";
            s.report.config = Json{{"in", in_path}, {"module", module_path}};
            return run_morita(s, load_json(in_path), load_json(module_path));
        }
        if (lattice->parsed()) {
            s.report.verb = "lattice";
            s.report.config = Json{{"m", lat_m}, {"L", lat_L}, {"experiment", experiment}};
            return run_lattice(s, lat_m, lat_L, experiment, constant_phi);
        }
    } catch (const SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "identity failure: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
