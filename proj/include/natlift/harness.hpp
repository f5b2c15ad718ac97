#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "natlift/bundle.hpp"
#include "natlift/coefficients.hpp"
#include "natlift/connection.hpp"
#include "natlift/curvature.hpp"
#include "natlift/errors.hpp"
#include "natlift/space_form.hpp"

namespace natlift {

using Json = nlohmann::ordered_json;

/// Default tolerances, by check name.
inline const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> tol = {
        {"closure", 1e-10},
        {"integrability_equivalent", 1e-9},
        {"j_squared", 1e-10},
        {"hermitian", 1e-10},
        {"omega_antisymmetry", 1e-10},
        {"inverse_blocks", 1e-10},
        {"inverse_dense", 1e-9},
        {"nijenhuis", 1e-5},
        {"d_omega", 1e-5},
        {"connection_vs_oracle", 1e-5},
        {"base_christoffel", 1e-6},
        {"metric_compatibility", 1e-5},
        {"torsion", 1e-5},
        {"connection_symmetry", 1e-10},
        {"curvature_vs_oracle", 1e-4},
        {"bianchi", 1e-4},
        {"ricci_symmetry", 1e-8},
        {"ricci_vs_oracle", 1e-4},
        {"einstein", 1e-6},
        {"einstein_oracle", 1e-4},
        {"holomorphic_curvature", 1e-3},
        {"case_equation", 1e-9},
        {"e_nonnegative", 0.0},
        {"e_decomposition", 1e-12},
        {"q_nonnegative", 0.0},
        {"positivity", 0.0},
    };
    return tol;
}

/// Thresholds a deliberate defect must exceed to count as detected.
struct ControlThresholds {
    double nijenhuis = 1e-2;
    double j_squared = 1e-2;
    double d_omega = 1e-3;
    double hermitian = 1e-2;
    double einstein = 1e-2;
    double torsion = 1e-2;
};

struct Scenario {
    std::string name = "custom";
    SpaceForm space;
    FamilySpec a1 = FamilySpec::constant(1.0);
    FamilySpec a3 = FamilySpec::constant(0.0);
    LambdaRule lambda = LambdaRule::explicit_spec_rule(FamilySpec::constant(1.0));
    double rho = 0.0;
    double t_min = 0.05;
    double t_max = 0.4;
    int t_grid = 5;
    int points_per_t = 4;
    std::uint64_t seed = 7;
    bool assert_einstein = true;
    bool assert_holomorphic = false;
    int control_points = 3;
    Perturbation perturbation;
    std::map<std::string, double> tolerances;

    void validate() const {
        space.validate();
        if (t_grid < 1 || points_per_t < 1) throw ConfigError("sample counts must be at least 1");
        if (control_points < 0) throw ConfigError("control_points must be nonnegative");
        if (!(t_min >= 0.0) || !(t_max >= t_min)) throw ConfigError("t range must satisfy 0 <= t_min <= t_max");
        if (lambda.kind == LambdaRule::Kind::case2 && !(t_min > 0.0))
            throw ConfigError("the case-II lambda lives on nonzero covectors; t_min must be > 0");
        if (lambda.kind != LambdaRule::Kind::explicit_spec && rho == 0.0)
            throw ConfigError("Einstein lambda rules need a nonzero rho");
        for (const auto& [key, value] : tolerances) {
            if (!default_tolerances().count(key)) throw ConfigError("unknown tolerance override '" + key + "'");
            if (!(value >= 0.0)) throw ConfigError("tolerance '" + key + "' must be nonnegative");
        }
    }

    double tolerance(const std::string& check) const {
        const auto it = tolerances.find(check);
        return it != tolerances.end() ? it->second : default_tolerances().at(check);
    }

    CoefficientFamily family() const {
        CoefficientFamily f;
        f.a1 = a1;
        f.a3 = a3;
        f.lambda = lambda;
        f.space = space;
        f.rho = rho;
        f.perturbation = perturbation;
        return f;
    }

    Json to_json() const;
    static Scenario from_json(const Json& j);
};

inline std::string branch_name(int branch) { return branch > 0 ? "+" : "-"; }

inline int parse_branch(const std::string& s) {
    if (s == "+" || s == "+1" || s == "plus") return 1;
    if (s == "-" || s == "-1" || s == "minus") return -1;
    throw ConfigError("branch must be '+' or '-', got '" + s + "'");
}

inline Json Scenario::to_json() const {
    Json j;
    j["name"] = name;
    j["n"] = space.n;
    j["c"] = space.c;
    j["a1"] = a1.to_string();
    j["a3"] = a3.to_string();
    Json l;
    switch (lambda.kind) {
        case LambdaRule::Kind::case1: l["rule"] = "case1"; break;
        case LambdaRule::Kind::case2:
            l["rule"] = "case2";
            l["branch"] = branch_name(lambda.branch);
            break;
        default:
            l["rule"] = "explicit";
            l["spec"] = lambda.spec.to_string();
    }
    j["lambda"] = l;
    j["rho"] = rho;
    j["t_range"] = {t_min, t_max};
    j["t_grid"] = t_grid;
    j["points_per_t"] = points_per_t;
    j["seed"] = seed;
    j["assert_einstein"] = assert_einstein;
    j["assert_holomorphic"] = assert_holomorphic;
    j["control_points"] = control_points;
    Json pj;
    pj["a2_shift"] = perturbation.a2_shift;
    pj["b1_shift"] = perturbation.b1_shift;
    pj["mu_shift"] = perturbation.mu_shift;
    pj["lambda_scale"] = perturbation.lambda_scale;
    pj["c1_factor"] = perturbation.c1_factor;
    j["perturbation"] = pj;
    Json tj = Json::object();
    for (const auto& [k, v] : tolerances) tj[k] = v;
    j["tolerances"] = tj;
    return j;
}

inline Scenario Scenario::from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    static const char* known[] = {"name",         "n",           "c",
                                  "a1",           "a3",          "lambda",
                                  "rho",          "t_range",     "t_grid",
                                  "points_per_t", "seed",        "assert_einstein",
                                  "assert_holomorphic", "control_points", "perturbation",
                                  "tolerances"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw ConfigError("unknown scenario field '" + item.key() + "'");
    }
    Scenario s;
    try {
        s.name = j.value("name", s.name);
        s.space.n = j.value("n", s.space.n);
        s.space.c = j.value("c", s.space.c);
        if (j.contains("a1")) s.a1 = FamilySpec::parse(j.at("a1").get<std::string>());
        if (j.contains("a3")) s.a3 = FamilySpec::parse(j.at("a3").get<std::string>());
        if (j.contains("lambda")) {
            const Json& l = j.at("lambda");
            const std::string rule = l.value("rule", "explicit");
            if (rule == "case1") {
                s.lambda = LambdaRule::case1_rule();
            } else if (rule == "case2") {
                s.lambda = LambdaRule::case2_rule(parse_branch(l.value("branch", "-")));
            } else if (rule == "explicit") {
                s.lambda = LambdaRule::explicit_spec_rule(FamilySpec::parse(l.value("spec", "1")));
            } else {
                throw ConfigError("unknown lambda rule '" + rule + "'");
            }
        }
        s.rho = j.value("rho", s.rho);
        if (j.contains("t_range")) {
            const Json& r = j.at("t_range");
            if (!r.is_array() || r.size() != 2) throw ConfigError("t_range must be [t_min, t_max]");
            s.t_min = r[0].get<double>();
            s.t_max = r[1].get<double>();
        }
        s.t_grid = j.value("t_grid", s.t_grid);
        s.points_per_t = j.value("points_per_t", s.points_per_t);
        s.seed = j.value("seed", s.seed);
        s.assert_einstein = j.value("assert_einstein", s.assert_einstein);
        s.assert_holomorphic = j.value("assert_holomorphic", s.lambda.kind == LambdaRule::Kind::case1);
        s.control_points = j.value("control_points", s.control_points);
        if (j.contains("perturbation")) {
            const Json& p = j.at("perturbation");
            s.perturbation.a2_shift = p.value("a2_shift", 0.0);
            s.perturbation.b1_shift = p.value("b1_shift", 0.0);
            s.perturbation.mu_shift = p.value("mu_shift", 0.0);
            s.perturbation.lambda_scale = p.value("lambda_scale", 1.0);
            s.perturbation.c1_factor = p.value("c1_factor", 1.0);
        }
        if (j.contains("tolerances"))
            for (const auto& item : j.at("tolerances").items()) s.tolerances[item.key()] = item.value().get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
    s.validate();
    return s;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return Scenario::from_json(j);
}

/// Built-in scenarios, addressable by name.
inline std::vector<Scenario> presets() {
    std::vector<Scenario> out;
    {
        Scenario s;
        s.name = "flat-sasaki";
        s.space = {2, 0.0};
        s.rho = 0.0;
        s.t_min = 0.0;
        s.t_max = 1.5;
        s.assert_holomorphic = true;
        out.push_back(s);
    }
    {
        Scenario s;
        s.name = "sphere-case1";
        s.space = {2, 1.0};
        s.lambda = LambdaRule::case1_rule();
        s.rho = 6.0;
        s.t_min = 0.05;
        s.t_max = 0.4;
        s.t_grid = 20;
        s.points_per_t = 10;
        s.assert_holomorphic = true;
        out.push_back(s);
    }
    {
        Scenario s = out.back();
        s.name = "sphere-case1-broken";
        s.perturbation.lambda_scale = 1.1;
        s.t_grid = 5;
        s.points_per_t = 4;
        out.push_back(s);
    }
    {
        Scenario s;
        s.name = "sphere-case2-const";
        s.space = {2, 1.0};
        s.lambda = LambdaRule::case2_rule(-1);
        s.rho = 2.0;
        s.t_min = 0.05;
        s.t_max = 0.45;
        s.t_grid = 9;
        s.points_per_t = 5;
        out.push_back(s);
    }
    {
        Scenario s;
        s.name = "hyperbolic-case1";
        s.space = {2, -1.0};
        s.lambda = LambdaRule::case1_rule();
        s.rho = -6.0;
        s.t_min = 0.05;
        s.t_max = 0.4;
        s.assert_holomorphic = true;
        out.push_back(s);
    }
    {
        Scenario s;
        s.name = "generic-case1";
        s.space = {3, 1.0};
        s.a1 = FamilySpec::parse("(+ 1 (* 0.3 t))");
        s.a3 = FamilySpec::parse("(+ 0.2 (* 0.1 t))");
        s.lambda = LambdaRule::case1_rule();
        s.rho = 8.0;
        s.t_min = 0.05;
        s.t_max = 0.3;
        s.t_grid = 4;
        s.points_per_t = 3;
        s.assert_holomorphic = true;
        out.push_back(s);
    }
    {
        Scenario s;
        s.name = "generic-case2";
        s.space = {2, 1.0};
        s.a1 = FamilySpec::parse("(+ 1 (* 0.3 t))");
        s.a3 = FamilySpec::parse("(+ 0.2 (* 0.1 t))");
        s.lambda = LambdaRule::case2_rule(-1);
        s.rho = 6.0;
        s.t_min = 0.05;
        s.t_max = 0.3;
        out.push_back(s);
    }
    {
        Scenario s;
        s.name = "sphere-non-einstein";
        s.space = {2, 1.0};
        s.lambda = LambdaRule::explicit_spec_rule(FamilySpec::parse("(+ 1 t)"));
        s.rho = 6.0;
        s.t_min = 0.05;
        s.t_max = 0.4;
        s.assert_einstein = false;
        out.push_back(s);
    }
    return out;
}

inline std::optional<Scenario> find_preset(const std::string& name) {
    for (auto& s : presets())
        if (s.name == name) return s;
    return std::nullopt;
}

struct SamplePoint {
    Vector x;
    Vector p;
    double t = 0.0;
    Vector direction;  ///< random frame vector for the holomorphic curvature
};

/// Seeded samples: a t grid, and per t random base points in |x| <= 0.8 with
/// a random covector direction scaled so that 1/2 g^ik p_i p_k = t.
inline std::vector<SamplePoint> sample_points(const Scenario& s) {
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = s.space.n;
    auto random_unit = [&](int dim) {
        Vector v(dim);
        do {
            for (int i = 0; i < dim; ++i) v(i) = normal(rng);
        } while (v.norm() < 1e-12);
        return Vector(v / v.norm());
    };
    std::vector<SamplePoint> out;
    for (int k = 0; k < s.t_grid; ++k) {
        const double t = s.t_grid == 1 ? s.t_min : s.t_min + (s.t_max - s.t_min) * k / (s.t_grid - 1);
        for (int q = 0; q < s.points_per_t; ++q) {
            SamplePoint sp;
            const double radius = 0.8 * std::pow(unit(rng), 1.0 / n);
            sp.x = radius * random_unit(n);
            const double phi = s.space.conformal_factor(sp.x);
            sp.p = std::sqrt(2.0 * t) / phi * random_unit(n);
            sp.t = t;
            sp.direction = random_unit(2 * n);
            out.push_back(std::move(sp));
        }
    }
    return out;
}

inline Json point_json(const Vector& x, const Vector& p, double t) {
    Json j;
    j["x"] = std::vector<double>(x.data(), x.data() + x.size());
    j["p"] = std::vector<double>(p.data(), p.data() + p.size());
    j["t"] = t;
    return j;
}

/// Aggregates one named check over all sampled points.
struct CheckRecord {
    std::string name;
    double tolerance = 0.0;
    bool diagnostic = false;
    double max_residual = 0.0;
    int evaluated = 0;
    int failures = 0;
    Json worst_point;
    Json extra = Json::object();

    bool pass() const { return diagnostic || failures == 0; }

    /// Records a residual; NaN counts as a failure.
    void add(double residual, const SamplePoint& sp) {
        ++evaluated;
        const bool bad = !(residual <= tolerance);
        if (bad) ++failures;
        if (evaluated == 1 || !(residual <= max_residual)) {
            if (!(max_residual != max_residual)) {
                max_residual = residual;
                worst_point = point_json(sp.x, sp.p, sp.t);
            }
        }
    }

    Json to_json() const {
        Json j;
        j["name"] = name;
        j["max_residual"] = max_residual;
        j["tolerance"] = tolerance;
        j["pass"] = pass();
        j["diagnostic"] = diagnostic;
        j["evaluated"] = evaluated;
        j["failures"] = failures;
        j["worst_point"] = worst_point;
        if (!extra.empty()) j["details"] = extra;
        return j;
    }
};

/// A deliberate defect whose detection is required.
struct ControlRecord {
    std::string name;
    std::string measure;
    double threshold = 0.0;
    bool applicable = true;
    double max_effect = 0.0;
    int evaluated = 0;

    bool fired() const { return max_effect > threshold; }
    bool pass() const { return !applicable || fired(); }

    Json to_json() const {
        Json j;
        j["name"] = name;
        j["measure"] = measure;
        j["threshold"] = threshold;
        j["applicable"] = applicable;
        j["max_effect"] = max_effect;
        j["evaluated"] = evaluated;
        j["fired"] = applicable && fired();
        j["pass"] = pass();
        return j;
    }
};

struct VerificationReport {
    Scenario scenario;
    std::vector<CheckRecord> checks;
    std::vector<ControlRecord> controls;
    int points = 0;
    std::optional<double> wall_seconds;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        for (const auto& c : controls)
            if (!c.pass()) return false;
        return true;
    }

    const CheckRecord* check(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    const ControlRecord* control(const std::string& name) const {
        for (const auto& c : controls)
            if (c.name == name) return &c;
        return nullptr;
    }

    Json to_json() const {
        Json j;
        j["scenario"] = scenario.to_json();
        j["seed"] = scenario.seed;
        j["points"] = points;
        j["pass"] = pass();
        Json cj = Json::array();
        for (const auto& c : checks) cj.push_back(c.to_json());
        j["checks"] = cj;
        Json kj = Json::array();
        for (const auto& c : controls) kj.push_back(c.to_json());
        j["controls"] = kj;
        if (wall_seconds) j["wall_seconds"] = *wall_seconds;
        return j;
    }

    std::string dump() const { return to_json().dump(2); }
};

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double symmetry_residual(const Array3& a, bool first_two) {
    const int n = a.dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int h = 0; h < n; ++h) {
                const double d = first_two ? a(i, j, h) - a(j, i, h) : 0.0;
                worst = std::max(worst, std::abs(d));
            }
    return worst;
}

/// Closed-form connection with S negated, for the mutation control.
inline Array3 mutated_frame_connection(const CotangentPoint& pt, ConnectionBlocks b) {
    b.S *= -1.0;
    return frame_connection(pt, b);
}

}  // namespace detail

/// Runs every check of the pipeline over the scenario's sample points.
inline VerificationReport run_scenario(const Scenario& s) {
    s.validate();
    const CoefficientFamily family = s.family();
    const InducedChart chart(family);
    const int n = s.space.n;
    const bool case1 = s.lambda.kind == LambdaRule::Kind::case1;
    const bool case2 = s.lambda.kind == LambdaRule::Kind::case2;

    VerificationReport report;
    report.scenario = s;
    std::vector<CheckRecord>& checks = report.checks;
    std::map<std::string, std::size_t> index;
    auto declare = [&](const std::string& name, bool diagnostic) {
        CheckRecord r;
        r.name = name;
        r.tolerance = s.tolerance(name);
        r.diagnostic = diagnostic;
        index[name] = checks.size();
        checks.push_back(r);
    };
    auto rec = [&](const std::string& name) -> CheckRecord& { return checks[index.at(name)]; };

    declare("positivity", false);
    declare("closure", false);
    declare("integrability_equivalent", false);
    declare("j_squared", false);
    declare("hermitian", false);
    declare("omega_antisymmetry", false);
    declare("inverse_blocks", false);
    declare("inverse_dense", false);
    declare("nijenhuis", false);
    declare("d_omega", false);
    declare("connection_vs_oracle", false);
    declare("base_christoffel", false);
    declare("connection_symmetry", false);
    declare("metric_compatibility", false);
    declare("torsion", false);
    declare("curvature_vs_oracle", false);
    declare("bianchi", false);
    declare("ricci_symmetry", false);
    declare("ricci_vs_oracle", false);
    declare("einstein", !s.assert_einstein);
    declare("einstein_oracle", !s.assert_einstein);
    declare("holomorphic_curvature", !s.assert_holomorphic);
    declare("case_equation", !(case1 || case2));
    declare("e_nonnegative", false);
    declare("e_decomposition", false);
    declare("q_nonnegative", false);

    const double k_expected = 2.0 * s.rho / (n + 1);
    double k_min = std::numeric_limits<double>::infinity(), k_max = -k_min;
    double f_min = std::numeric_limits<double>::infinity();
    double margin_min = std::numeric_limits<double>::infinity();
    Json einstein_fit = Json::object();
    double einstein_fit_residual = -1.0;

    const ControlThresholds thr;
    std::vector<ControlRecord>& controls = report.controls;
    controls.push_back({"b1_shift", "nijenhuis", thr.nijenhuis, true, 0.0, 0});
    controls.push_back({"a2_shift", "j_squared", thr.j_squared, true, 0.0, 0});
    controls.push_back({"mu_shift", "d_omega", thr.d_omega, true, 0.0, 0});
    controls.push_back({"c1_factor", "hermitian", thr.hermitian, true, 0.0, 0});
    controls.push_back({"lambda_scale", "einstein", thr.einstein, s.assert_einstein && s.rho != 0.0, 0.0, 0});
    controls.push_back({"s_sign", "torsion_or_metric", thr.torsion, s.space.c != 0.0, 0.0, 0});
    auto mutated = [&](auto&& tweak) {
        CoefficientFamily f = family;
        tweak(f.perturbation);
        return f;
    };
    const CoefficientFamily f_b1 = mutated([](Perturbation& p) { p.b1_shift += 0.1; });
    const CoefficientFamily f_a2 = mutated([](Perturbation& p) { p.a2_shift += 0.1; });
    const CoefficientFamily f_mu = mutated([](Perturbation& p) { p.mu_shift += 0.1; });
    const CoefficientFamily f_c1 = mutated([](Perturbation& p) { p.c1_factor *= 2.0; });
    const CoefficientFamily f_lambda = mutated([](Perturbation& p) { p.lambda_scale *= 1.1; });
    int control_budget = s.control_points;

    const std::vector<SamplePoint> samples = sample_points(s);
    report.points = static_cast<int>(samples.size());
    for (const SamplePoint& sp : samples) {
        const CotangentPoint pt = CotangentPoint::make(s.space, sp.x, sp.p);
        CoefficientValues v;
        try {
            v = family.at(pt.t);
        } catch (const Error&) {
            rec("positivity").add(std::numeric_limits<double>::infinity(), sp);
            continue;
        }
        const PositivityReport pos = v.positivity();
        margin_min = std::min(margin_min, pos.min_margin());
        rec("positivity").add(pos.admissible() ? 0.0 : std::max(-pos.min_margin(), 1e-300), sp);

        // Scalar identities.
        rec("closure").add(closure_residual(v.structure, pt.t), sp);
        rec("integrability_equivalent").add(integrability_equivalent_residual(v.structure, s.space.c, pt.t), sp);
        const EFQ efq = e_f_expressions(v.structure.a1, v.structure.a3, s.space.c, pt.t);
        rec("e_nonnegative").add(std::max(0.0, -efq.E), sp);
        rec("e_decomposition").add(std::abs(efq.E - efq.E_from_decomposition) / std::max(1.0, std::abs(efq.E)), sp);
        rec("q_nonnegative").add(std::max(0.0, -efq.Q), sp);
        f_min = std::min(f_min, efq.F);
        const CaseResiduals cr = case_equations_residual(v.structure.a1, v.structure.a3, v.lambda, s.space.c, pt.t);
        rec("case_equation").add(case2 ? cr.case2 : cr.case1, sp);

        // Pointwise structures.
        const BlockTensor G = assemble_G(pt, v.metric);
        const BlockTensor J = assemble_J(pt, v.structure);
        rec("j_squared").add(j_square_residual(J), sp);
        rec("hermitian").add(hermitian_residual(G, J), sp);
        rec("omega_antisymmetry").add(antisymmetry_residual(fundamental_form(pt, v)), sp);
        BlockTensor H;
        try {
            H = invert_G_closed_form(pt, v.metric);
        } catch (const Error&) {
            rec("inverse_blocks").add(std::numeric_limits<double>::infinity(), sp);
            continue;
        }
        rec("inverse_blocks").add(inverse_residual(G, H), sp);
        rec("inverse_dense").add(detail::max_abs(H.dense() - G.dense().inverse()), sp);

        const Vector y = join(sp.x, sp.p);
        rec("nijenhuis").add(nijenhuis_numeric(chart, y), sp);
        rec("d_omega").add(d_omega_numeric(chart, y), sp);

        // Connection.
        const ClosedFormConnection conn = closed_form_connection(pt, v.metric);
        const Array3 w = frame_connection(pt, conn.blocks);
        const Array3 w_oracle = koszul_frame_connection(chart, y);
        const ConnectionBlocks oracle = extract_blocks(pt, w_oracle);
        rec("connection_vs_oracle").add(conn.blocks.max_abs_diff_to(oracle), sp);
        rec("base_christoffel").add(base_christoffel_residual(pt, w_oracle, conn.blocks), sp);
        {
            double sym = std::max(detail::symmetry_residual(conn.blocks.Q, true),
                                  detail::symmetry_residual(conn.blocks.St, true));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int h = 0; h < n; ++h)
                        sym = std::max(sym, std::abs(conn.blocks.S(i, j, h) - conn.blocks.S(j, i, h) - pt.r0(h, i, j)));
            rec("connection_symmetry").add(sym, sp);
        }
        const MetricTorsionResidual mt = metric_torsion_check(chart, y, w);
        rec("metric_compatibility").add(mt.metric, sp);
        rec("torsion").add(mt.torsion, sp);

        // Curvature.
        const CurvatureBlocks cb = curvature_blocks(pt, conn);
        const CurvatureBlocks ob = curvature_oracle(chart, y);
        const Array4 K = cb.full();
        const Array4 Ko = ob.full();
        rec("curvature_vs_oracle").add(max_abs_diff(K, Ko), sp);
        rec("bianchi").add(bianchi_residual(K), sp);
        const BlockTensor ric = ricci(K);
        const BlockTensor ric_blocks = ricci_blocks(cb).tensor();
        rec("ricci_symmetry").add(std::max(ricci_symmetry_residual(ric),
                                           detail::max_abs(ric.dense() - ric_blocks.dense())),
                                  sp);
        const BlockTensor ric_oracle = ricci(Ko);
        rec("ricci_vs_oracle").add(detail::max_abs(ric.dense() - ric_oracle.dense()), sp);
        const EinsteinResidual er = einstein_residual(pt, ric, G, s.rho);
        rec("einstein").add(er.max_abs, sp);
        if (er.max_abs > einstein_fit_residual) {
            einstein_fit_residual = er.max_abs;
            auto fit_json = [](const PatternFit& f) {
                Json j;
                j["u"] = f.u;
                j["v"] = std::isnan(f.v) ? Json(nullptr) : Json(f.v);
                j["misfit"] = f.misfit;
                return j;
            };
            einstein_fit = Json::object();
            einstein_fit["hh"] = fit_json(er.hh);
            einstein_fit["vv"] = fit_json(er.vv);
            einstein_fit["hv"] = fit_json(er.hv);
        }
        rec("einstein_oracle").add(einstein_residual(pt, ric_oracle, G, s.rho).max_abs, sp);
        const double k = holomorphic_sectional_curvature(K, G, J, sp.direction);
        k_min = std::min(k_min, k);
        k_max = std::max(k_max, k);
        rec("holomorphic_curvature").add(std::abs(k - k_expected), sp);

        // Negative controls on the first few points with p != 0.
        if (control_budget > 0 && pt.t > 0.0) {
            --control_budget;
            auto run_control = [&](ControlRecord& c, auto&& measure) {
                if (!c.applicable) return;
                try {
                    const double effect = measure();
                    ++c.evaluated;
                    if (effect > c.max_effect || std::isnan(effect)) c.max_effect = effect;
                } catch (const Error&) {
                }
            };
            run_control(controls[0], [&] { return nijenhuis_numeric(InducedChart(f_b1), y); });
            run_control(controls[1], [&] { return j_square_residual(assemble_J(pt, f_a2.at(pt.t).structure)); });
            run_control(controls[2], [&] { return d_omega_numeric(InducedChart(f_mu), y); });
            run_control(controls[3], [&] {
                const CoefficientValues vc = f_c1.at(pt.t);
                return hermitian_residual(assemble_G(pt, vc.metric), assemble_J(pt, vc.structure));
            });
            run_control(controls[4], [&] {
                const CoefficientValues vl = f_lambda.at(pt.t);
                const Array4 Kl = curvature_blocks(pt, vl.metric).full();
                return einstein_residual(pt, ricci(Kl), assemble_G(pt, vl.metric), s.rho).max_abs;
            });
            run_control(controls[5], [&] {
                const MetricTorsionResidual m = metric_torsion_check(chart, y, detail::mutated_frame_connection(pt, conn.blocks));
                return std::max(m.metric, m.torsion);
            });
        }
    }

    rec("einstein").extra["rho"] = s.rho;
    if (!einstein_fit.empty()) rec("einstein").extra["decomposition_at_worst"] = einstein_fit;
    if (std::isfinite(k_min)) {
        rec("holomorphic_curvature").extra["expected"] = k_expected;
        rec("holomorphic_curvature").extra["min"] = k_min;
        rec("holomorphic_curvature").extra["max"] = k_max;
    }
    if (std::isfinite(f_min)) rec("e_nonnegative").extra["f_min"] = f_min;
    if (std::isfinite(margin_min)) rec("positivity").extra["min_margin"] = margin_min;
    return report;
}

/// Runs a scenario and records wall time in the report.
inline VerificationReport run_scenario_timed(const Scenario& s) {
    const auto start = std::chrono::steady_clock::now();
    VerificationReport r = run_scenario(s);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// Largest interval [t_lo, t] starting at the first grid point on which the
/// family stays admissible, scanned on `steps` points over [t_lo, t_hi].
/// Returns NaN when the first point is already inadmissible.
inline double admissible_until(const CoefficientFamily& f, double t_lo, double t_hi, int steps = 400) {
    double last = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k <= steps; ++k) {
        const double t = t_lo + (t_hi - t_lo) * k / steps;
        if (!f.positivity(t).admissible()) break;
        last = t;
    }
    return last;
}

struct SweepRow {
    std::string value;
    VerificationReport report;
    double admissible_t_max = 0.0;
};

/// Reruns a scenario over a grid of one parameter: c, rho, t_max or branch.
inline std::vector<SweepRow> sweep(const Scenario& base, const std::string& vary, const std::vector<std::string>& grid) {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    if (vary != "c" && vary != "rho" && vary != "t_max" && vary != "branch")
        throw ConfigError("sweep parameter must be one of c, rho, t_max, branch; got '" + vary + "'");
    std::vector<SweepRow> rows;
    for (const std::string& value : grid) {
        Scenario s = base;
        try {
            if (vary == "branch") {
                if (s.lambda.kind != LambdaRule::Kind::case2)
                    throw ConfigError("branch sweep needs a case2 lambda rule");
                s.lambda.branch = parse_branch(value);
            } else {
                std::size_t used = 0;
                const double x = std::stod(value, &used);
                if (used != value.size()) throw ConfigError("bad grid value '" + value + "'");
                if (vary == "c") s.space.c = x;
                if (vary == "rho") s.rho = x;
                if (vary == "t_max") s.t_max = x;
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad grid value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError("grid value out of range '" + value + "'");
        }
        s.name = base.name + "[" + vary + "=" + value + "]";
        SweepRow row;
        row.value = value;
        row.report = run_scenario(s);
        row.admissible_t_max = admissible_until(s.family(), s.t_min, std::max(s.t_max * 2.0, s.t_min + 1.0));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Tab-separated table of a sweep, one row per grid value.
inline std::string sweep_table(const std::string& vary, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out.precision(10);
    out << vary << "\tpass\tadmissible_points\tadmissible_t_max\tmin_margin\teinstein\tholomorphic_min\tholomorphic_max"
        << "\tholomorphic_expected\tnijenhuis\tcurvature_vs_oracle\n";
    for (const SweepRow& row : rows) {
        const VerificationReport& r = row.report;
        const CheckRecord* pos = r.check("positivity");
        const CheckRecord* hol = r.check("holomorphic_curvature");
        auto extra = [](const CheckRecord* c, const char* key) {
            return c && c->extra.contains(key) ? c->extra.at(key).get<double>()
                                               : std::numeric_limits<double>::quiet_NaN();
        };
        out << row.value << '\t' << (r.pass() ? "pass" : "fail") << '\t' << (pos->evaluated - pos->failures) << '/'
            << pos->evaluated << '\t' << row.admissible_t_max << '\t' << extra(pos, "min_margin") << '\t'
            << r.check("einstein")->max_residual << '\t' << extra(hol, "min") << '\t' << extra(hol, "max") << '\t'
            << extra(hol, "expected") << '\t' << r.check("nijenhuis")->max_residual << '\t'
            << r.check("curvature_vs_oracle")->max_residual << '\n';
    }
    return out.str();
}

}  // namespace natlift
