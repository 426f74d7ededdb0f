// io.hpp — JSON serialization: matrices as nested arrays of [re, im] pairs
// (row-major), descriptors for algebras, triples, forms, modules and
// unitaries, KO-sign presets from the data file, and machine-readable run
// reports.

#pragma once

#include "twistkit/forms.hpp"
#include "twistkit/morita.hpp"
#include "twistkit/triple.hpp"
#include "twistkit/version.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <string>

namespace twistkit {

using Json = nlohmann::ordered_json;

// --------------------------------- matrices ---------------------------------

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty array of rows");
    size_t cols = 0;
    for (size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array()) throw SchemaError(where + "[" + std::to_string(r) + "]: expected a row array");
        if (r == 0)
            cols = j[r].size();
        else if (j[r].size() != cols)
            throw SchemaError(where + "[" + std::to_string(r) + "]: row length mismatch");
    }
    Matrix m(j.size(), cols);
    for (size_t r = 0; r < j.size(); ++r)
        for (size_t c = 0; c < cols; ++c) {
            const Json& e = j[r][c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw SchemaError(where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                  "]: expected an [re, im] pair");
            m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    return m;
}

inline Json real_vector_to_json(const RealVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline RealVector real_vector_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array of numbers");
    RealVector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError(where + "[" + std::to_string(i) + "]: expected a number");
        v(i) = j[i].get<double>();
    }
    return v;
}

// --------------------------------- algebra ---------------------------------

inline Json algebra_to_json(const StarAlgebra& a) { return Json{{"blocks", a.blocks}}; }

inline StarAlgebra algebra_from_json(const Json& j, const std::string& where) {
    if (!j.contains("blocks") || !j["blocks"].is_array())
        throw SchemaError(where + ".blocks: expected an array of block sizes");
    StarAlgebra alg;
    for (const auto& b : j["blocks"]) {
        if (!b.is_number_integer() || b.get<int>() < 1)
            throw SchemaError(where + ".blocks: block sizes must be positive integers");
        alg.blocks.push_back(b.get<int>());
    }
    return alg;
}

inline Json element_to_json(const AlgebraElement& e) {
    Json parts = Json::array();
    for (const auto& p : e.parts) parts.push_back(matrix_to_json(p));
    return Json{{"parts", parts}};
}

inline AlgebraElement element_from_json(const StarAlgebra& alg, const Json& j, const std::string& where) {
    if (!j.contains("parts") || !j["parts"].is_array() ||
        j["parts"].size() != static_cast<size_t>(alg.num_blocks()))
        throw SchemaError(where + ".parts: expected one matrix per algebra block");
    AlgebraElement e = zero_element(alg);
    for (int i = 0; i < alg.num_blocks(); ++i) {
        Matrix m = matrix_from_json(j["parts"][i], where + ".parts[" + std::to_string(i) + "]");
        if (m.rows() != alg.blocks[i] || m.cols() != alg.blocks[i])
            throw SchemaError(where + ".parts[" + std::to_string(i) + "]: wrong block size");
        e.parts[i] = std::move(m);
    }
    return e;
}

inline Json automorphism_to_json(const Automorphism& rho) {
    Json ws = Json::array();
    for (const auto& w : rho.unitaries) ws.push_back(matrix_to_json(w));
    return Json{{"perm", rho.perm}, {"unitaries", ws}};
}

inline Automorphism automorphism_from_json(const StarAlgebra& alg, const Json& j, const std::string& where) {
    Automorphism rho;
    rho.algebra = alg;
    if (!j.contains("perm") || j["perm"].size() != static_cast<size_t>(alg.num_blocks()))
        throw SchemaError(where + ".perm: expected a permutation of the blocks");
    for (const auto& p : j["perm"]) rho.perm.push_back(p.get<int>());
    for (int i = 0; i < alg.num_blocks(); ++i) {
        int t = rho.perm[i];
        if (t < 0 || t >= alg.num_blocks() || alg.blocks[t] != alg.blocks[i])
            throw SchemaError(where + ".perm: not a size-preserving block permutation");
    }
    if (j.contains("unitaries")) {
        if (j["unitaries"].size() != static_cast<size_t>(alg.num_blocks()))
            throw SchemaError(where + ".unitaries: expected one unitary per block");
        for (int i = 0; i < alg.num_blocks(); ++i)
            rho.unitaries.push_back(
                matrix_from_json(j["unitaries"][i], where + ".unitaries[" + std::to_string(i) + "]"));
    } else {
        for (int n : alg.blocks) rho.unitaries.push_back(Matrix::Identity(n, n));
    }
    return rho;
}

// ----------------------------------- signs -----------------------------------

inline std::string data_dir() {
    if (const char* env = std::getenv("TWISTKIT_DATA_DIR")) return env;
#ifdef TWISTKIT_DATA_DIR
    return TWISTKIT_DATA_DIR;
#else
    return "data";
#endif
}

inline Json signs_to_json(const KOSignature& s) {
    Json j{{"eps", s.eps}, {"eps_prime", s.eps_prime}, {"eps_second", s.eps_second}};
    if (s.dim_mod8) j["dim_mod8"] = *s.dim_mod8;
    return j;
}

inline KOSignature signs_from_json(const Json& j, const std::string& where);

// named presets from the shipped even-dimension table
inline KOSignature ko_preset(const std::string& name) {
    std::ifstream in(data_dir() + "/ko_signatures.json");
    if (!in) throw SchemaError("ko_preset: cannot open " + data_dir() + "/ko_signatures.json");
    Json table = Json::parse(in);
    if (!table.contains(name)) throw SchemaError("ko_preset: unknown preset '" + name + "'");
    return signs_from_json(table[name], "ko_preset." + name);
}

inline KOSignature signs_from_json(const Json& j, const std::string& where) {
    if (j.contains("preset")) return ko_preset(j["preset"].get<std::string>());
    KOSignature s;
    for (const char* key : {"eps", "eps_prime", "eps_second"})
        if (!j.contains(key) || !j[key].is_number_integer() || std::abs(j[key].get<int>()) != 1)
            throw SchemaError(where + "." + key + ": expected +1 or -1");
    s.eps = j["eps"].get<int>();
    s.eps_prime = j["eps_prime"].get<int>();
    s.eps_second = j["eps_second"].get<int>();
    if (j.contains("dim_mod8")) s.dim_mod8 = j["dim_mod8"].get<int>();
    return s;
}

// ----------------------------------- triple -----------------------------------

inline Json triple_to_json(const RealTwistedTriple& t) {
    Json j;
    j["algebra"] = algebra_to_json(t.algebra);
    j["rep"] = Json{{"multiplicities", t.rep.multiplicities}, {"isometry", matrix_to_json(t.rep.isometry)}};
    j["dirac"] = matrix_to_json(t.dirac);
    j["j"] = matrix_to_json(t.j.u);
    if (t.grading) j["grading"] = matrix_to_json(*t.grading);
    j["auto"] = automorphism_to_json(t.rho);
    j["signs"] = signs_to_json(t.signs);
    return j;
}

inline RealTwistedTriple triple_from_json(const Json& j, const std::string& where) {
    RealTwistedTriple t;
    t.algebra = algebra_from_json(j.at("algebra"), where + ".algebra");
    const Json& rj = j.at("rep");
    std::vector<int> mult;
    for (const auto& m : rj.at("multiplicities")) mult.push_back(m.get<int>());
    int total = 0;
    for (int i = 0; i < t.algebra.num_blocks(); ++i) total += t.algebra.blocks[i] * mult[i];
    Matrix v = rj.contains("isometry") ? matrix_from_json(rj["isometry"], where + ".rep.isometry")
                                       : Matrix(Matrix::Identity(total, total));
    t.rep = make_representation(t.algebra, mult, v);
    t.dirac = matrix_from_json(j.at("dirac"), where + ".dirac");
    t.j = AntilinearOp{matrix_from_json(j.at("j"), where + ".j")};
    if (j.contains("grading") && !j["grading"].is_null())
        t.grading = matrix_from_json(j["grading"], where + ".grading");
    t.rho = automorphism_from_json(t.algebra, j.at("auto"), where + ".auto");
    t.signs = signs_from_json(j.at("signs"), where + ".signs");
    if (t.dirac.rows() != t.rep.hilbert_dim || t.j.u.rows() != t.rep.hilbert_dim)
        throw SchemaError(where + ": operator dimensions disagree with the representation");
    return t;
}

// ----------------------------------- forms -----------------------------------

inline Json form_to_json(const TwistedOneForm& w) {
    Json pairs = Json::array();
    for (const auto& [a, b] : w.generators) pairs.push_back({element_to_json(a), element_to_json(b)});
    return Json{{"side", w.side == FormSide::plain ? "plain" : "opposite"}, {"pairs", pairs}};
}

inline TwistedOneForm form_from_json(const RealTwistedTriple& t, const Json& j, const std::string& where) {
    std::string side = j.value("side", "plain");
    if (side != "plain" && side != "opposite") throw SchemaError(where + ".side: expected plain|opposite");
    GeneratorList gens;
    for (size_t i = 0; i < j.at("pairs").size(); ++i) {
        const Json& p = j["pairs"][i];
        if (!p.is_array() || p.size() != 2)
            throw SchemaError(where + ".pairs[" + std::to_string(i) + "]: expected [a, b]");
        gens.emplace_back(element_from_json(t.algebra, p[0], where + ".pairs.a"),
                          element_from_json(t.algebra, p[1], where + ".pairs.b"));
    }
    return form_from_generators(t, std::move(gens), side == "plain" ? FormSide::plain : FormSide::opposite);
}

// ----------------------------------- modules -----------------------------------

inline Json module_to_json(const HermitianModule& m, const Connection* c = nullptr) {
    Json rows = Json::array();
    for (const auto& row : m.p) {
        Json r = Json::array();
        for (const auto& e : row) r.push_back(element_to_json(e));
        rows.push_back(std::move(r));
    }
    Json j{{"side", m.side == ModuleSide::right ? "right" : "left"}, {"N", m.n_slots}, {"p", rows}};
    if (c) {
        Json pot = Json::array();
        for (const auto& row : c->potential) {
            Json r = Json::array();
            for (const auto& w : row) r.push_back(form_to_json(w));
            pot.push_back(std::move(r));
        }
        j["connection"] = Json{{"target", c->target == FormSide::plain ? "plain" : "opposite"},
                               {"potential", pot}};
    }
    return j;
}

inline HermitianModule module_from_json(const StarAlgebra& alg, const Json& j, const std::string& where) {
    std::string side = j.value("side", "right");
    int n = j.at("N").get<int>();
    std::vector<std::vector<AlgebraElement>> p;
    if (j.at("p").size() != static_cast<size_t>(n)) throw SchemaError(where + ".p: expected N rows");
    for (int r = 0; r < n; ++r) {
        std::vector<AlgebraElement> row;
        if (j["p"][r].size() != static_cast<size_t>(n))
            throw SchemaError(where + ".p[" + std::to_string(r) + "]: expected N entries");
        for (int c = 0; c < n; ++c)
            row.push_back(element_from_json(alg, j["p"][r][c],
                                            where + ".p[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
        p.push_back(std::move(row));
    }
    return make_module(side == "right" ? ModuleSide::right : ModuleSide::left, alg, std::move(p));
}

inline Connection connection_from_json(const RealTwistedTriple& t, const HermitianModule& m, const Json& j,
                                       const std::string& where) {
    Connection c;
    std::string target = j.value("target", m.side == ModuleSide::right ? "plain" : "opposite");
    c.target = target == "plain" ? FormSide::plain : FormSide::opposite;
    c.potential.assign(m.n_slots, std::vector<TwistedOneForm>(m.n_slots, zero_form(t, c.target)));
    if (j.contains("potential")) {
        for (int r = 0; r < m.n_slots; ++r)
            for (int col = 0; col < m.n_slots; ++col)
                c.potential[r][col] = form_from_json(
                    t, j["potential"][r][col],
                    where + ".potential[" + std::to_string(r) + "][" + std::to_string(col) + "]");
    }
    return c;
}

// ----------------------------------- reports -----------------------------------

// expectation rows gate the exit code; observation rows record experiment
// outcomes (a mathematical negative is a result, not a tool failure)
enum class CheckKind { expectation, observation };

struct CheckRow {
    std::string name;
    std::string anchor;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = true;
    CheckKind kind = CheckKind::expectation;
    std::string note;
};

struct RunReport {
    std::string verb;
    Json config;
    std::uint64_t seed = 0;
    std::vector<CheckRow> checks;
    double wall_time_ms = 0.0;
    std::string timestamp;

    bool all_expectations_pass() const {
        for (const auto& c : checks)
            if (c.kind == CheckKind::expectation && !c.pass) return false;
        return true;
    }
};

inline Json report_to_json(const RunReport& r) {
    Json rows = Json::array();
    for (const auto& c : r.checks) {
        Json row{{"name", c.name},
                 {"anchor", c.anchor},
                 {"residual", c.residual},
                 {"threshold", c.threshold},
                 {"pass", c.pass},
                 {"kind", c.kind == CheckKind::expectation ? "expectation" : "observation"}};
        if (!c.note.empty()) row["note"] = c.note;
        rows.push_back(std::move(row));
    }
    return Json{{"tool", kToolName},     {"version", kVersion},
                {"verb", r.verb},        {"config", r.config},
                {"seed", r.seed},        {"checks", rows},
                {"pass", r.all_expectations_pass()}, {"wall_time_ms", r.wall_time_ms},
                {"timestamp", r.timestamp}};
}

// comparison form: identical runs must agree byte-for-byte after stripping
// the wall-clock fields
inline Json strip_volatile(Json j) {
    j.erase("wall_time_ms");
    j.erase("timestamp");
    return j;
}

inline Json validation_to_json(const ValidationReport& rep) {
    Json axioms = Json::object();
    for (const auto& c : rep.checks)
        axioms[c.name] = Json{{"anchor", c.anchor},     {"residual", c.residual}, {"relative", c.relative},
                              {"threshold", c.threshold}, {"pass", c.pass},        {"note", c.note}};
    return Json{{"tool", kToolName},
                {"version", kVersion},
                {"seed", rep.seed},
                {"basis_mode", rep.basis_mode},
                {"axioms", axioms},
                {"pass", rep.pass}};
}

}  // namespace twistkit
