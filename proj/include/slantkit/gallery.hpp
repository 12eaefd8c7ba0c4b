#pragma once

// Worked fixtures on Euclidean space: a structure with 2x2 invariant block on e1, e2
// and k rotation blocks on e_{4j-1}..e_{4j+2}; the submanifold drops x_{4j+1}, x_{4j+2}.
// Blocks carry coefficients (a_j, b_j) with a_j^2 + b_j^2 = 1, so cos(theta_j) = a_j.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "slantkit/classifier.hpp"
#include "slantkit/duality.hpp"
#include "slantkit/spec_format.hpp"
#include "slantkit/verifier.hpp"

namespace slantkit {

struct FixtureParams {
    int k = 2;
    int epsilon = -1;
    std::optional<double> gamma;
    std::optional<double> delta;
};

struct GalleryFixture {
    std::string id;
    int k = 2;
    int epsilon = -1;
    double gamma = 0.0;
    double delta = 0.0;
    bool pointwise = false;
    ManifoldSpec spec;
    Model model;
    std::vector<ScalarFieldExpr> closed_form_thetas;        // one per proper component
    std::vector<std::vector<std::size_t>> expected_duals;  // 0-based coordinates spanning w(D_j)
    std::vector<std::size_t> mask;                         // 0-based coordinates of TM

    [[nodiscard]] const Decomposition& decomposition() const { return model.decomposition; }
    [[nodiscard]] const StructureField& structure() const { return *model.structure; }
    [[nodiscard]] std::size_t n() const { return spec.ambient_dim; }
};

inline const std::vector<std::string>& fixture_ids() {
    static const std::vector<std::string> ids{"ex1", "ex3", "ex4", "ex5", "ex8", "ex9"};
    return ids;
}

namespace gallery_detail {

inline std::string num(double v) { return "(" + ast::format_number(v) + ")"; }

struct Block {
    std::string a;  // cosine coefficient
    std::string b;  // sine coefficient
};

inline std::string scaled(const std::string& e, int sign) { return sign > 0 ? "(" + e + ")" : "-(" + e + ")"; }

// Closed-form coefficients of block j.
inline Block block(const std::string& id, int j, double gamma, double delta) {
    const std::string J = num(j);
    const std::string G = num(gamma);
    const std::string D = num(delta);
    auto over = [](const std::string& top, const std::string& bottom) { return "(" + top + ")/(" + bottom + ")"; };
    if (id == "ex1") return {over(num(j * j - 1), num(j * j + 1)), over(num(2 * j), num(j * j + 1))};
    if (id == "ex3") {
        const std::string root = "sqrt(2*" + num(j * j + 1) + ")";
        return {over(num(j - 1), root), over(num(j + 1), root)};
    }
    if (id == "ex4") {
        const std::string e = "sqrt(norm2^2 + 2*" + G + "*norm2 + " + J + "^2*" + D + "^2 + " + G + "^2)";
        return {over("norm2 + " + G, e), over(J + "*" + D, e)};
    }
    if (id == "ex5") {
        const std::string e = "sqrt(2*norm2^2 + 2*(" + G + " + " + J + " - 1)*norm2 + (" + G + "^2 - 2*" + G + " + " + J +
                              "^2 + 1))";
        return {over("norm2 + " + G + " - 1", e), over("norm2 + " + J, e)};
    }
    if (id == "ex8") {
        const std::string shift = "(" + J + " - 1)*" + D + " + " + G;
        const std::string e = "sqrt(norm2^2 + 2*(" + shift + ")*norm2 + " + D + "^2 + (" + shift + ")^2)";
        return {over("norm2 + " + shift, e), over(D, e)};
    }
    const std::string e = "sqrt(2*norm2^2 + 2*(" + J + " + " + G + " - 1)*norm2 + (" + J + "^2 + " + G + "^2 + 2*" + J + "*" +
                          G + " - 4*(" + J + " + " + G + ") + 5))";
    return {over("norm2 + " + J + " + " + G + " - 2", e), over("norm2 + 1", e)};
}

inline bool contact_fixture(const std::string& id) { return id == "ex1" || id == "ex4" || id == "ex8"; }

inline void check_params(const std::string& id, const FixtureParams& p) {
    if (std::find(fixture_ids().begin(), fixture_ids().end(), id) == fixture_ids().end())
        throw ParamError("unknown fixture '" + id + "'");
    if (p.k < 2) throw ParamError(id + " needs k >= 2");
    if (p.epsilon != 1 && p.epsilon != -1) throw ParamError("epsilon must be +1 or -1");
    const bool takes_gamma = id != "ex1" && id != "ex3";
    const bool takes_delta = id == "ex4" || id == "ex8";
    if (!takes_gamma && p.gamma) throw ParamError(id + " takes no gamma");
    if (!takes_delta && p.delta) throw ParamError(id + " takes no delta");
    if (p.gamma && !std::isfinite(*p.gamma)) throw ParamError("gamma must be finite");
    if (p.delta && !std::isfinite(*p.delta)) throw ParamError("delta must be finite");
    if (takes_delta) {
        if (p.gamma && *p.gamma < 0.0) throw ParamError(id + " needs gamma >= 0");
        if (p.delta && !(*p.delta > 0.0)) throw ParamError(id + " needs delta > 0");
    } else if (takes_gamma && p.gamma && *p.gamma < 1.0) {
        throw ParamError(id + " needs gamma >= 1");
    }
}

inline void unit_expr(std::size_t n, std::size_t one_based, std::vector<std::string>& out) {
    out.assign(n, "0");
    out[one_based - 1] = "1";
}

}  // namespace gallery_detail

// Origin, unit points along each tangent axis, and `count` seeded points in [-2, 2] on TM.
inline std::vector<AmbientPoint> default_sample_points(std::size_t n, const std::vector<std::size_t>& mask,
                                                       std::uint64_t seed = default_seed, std::size_t count = 16) {
    std::vector<AmbientPoint> out;
    out.emplace_back(Vec::Zero(static_cast<Eigen::Index>(n)));
    for (auto c : mask) out.emplace_back(Vec::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c)));
    const auto box = box_points(n, mask, SampleBox{seed, count, -2.0, 2.0});
    out.insert(out.end(), box.begin(), box.end());
    return out;
}

inline GalleryFixture build_fixture(const std::string& id, const FixtureParams& params = {}) {
    using namespace gallery_detail;
    check_params(id, params);
    const bool contact = contact_fixture(id);
    const int k = params.k;
    const int eps = params.epsilon;
    const bool unit_gamma = id == "ex5" || id == "ex9";
    const double gamma = id == "ex1" || id == "ex3" ? 0.0 : params.gamma.value_or(unit_gamma ? 2.0 : 1.0);
    const double delta = id == "ex4" || id == "ex8" ? params.delta.value_or(1.0) : 0.0;
    const std::size_t n = static_cast<std::size_t>(4 * k + (contact ? 3 : 2));

    ManifoldSpec s;
    s.ambient_dim = n;
    s.epsilon = eps;
    s.kind = contact ? StructureKind::contact_like : StructureKind::hermitian_like;
    s.phi_columns.assign(n, std::vector<std::string>(n, "0"));
    auto set = [&](std::size_t col, std::size_t row, const std::string& e) { s.phi_columns[col - 1][row - 1] = e; };
    set(1, 2, "1");
    set(2, 1, num(eps));

    std::vector<ScalarFieldExpr> thetas;
    std::vector<std::vector<std::size_t>> duals;
    for (int j = 1; j <= k; ++j) {
        const auto [a, b] = block(id, j, gamma, delta);
        const auto c = static_cast<std::size_t>(4 * j);
        if (contact) {
            set(c - 1, c, a);
            set(c - 1, c + 2, scaled(b, eps));
            set(c, c - 1, scaled(a, eps));
            set(c, c + 1, scaled(b, eps));
            set(c + 1, c, b);
            set(c + 1, c + 2, scaled(a, -eps));
            set(c + 2, c - 1, b);
            set(c + 2, c + 1, scaled(a, -1));
        } else {
            set(c - 1, c, a);
            set(c - 1, c + 2, b);
            set(c, c - 1, scaled(a, eps));
            set(c, c + 1, scaled(b, -1));
            set(c + 1, c, scaled(b, -eps));
            set(c + 1, c + 2, scaled(a, eps));
            set(c + 2, c - 1, scaled(b, eps));
            set(c + 2, c + 1, a);
        }
        thetas.push_back(ScalarFieldExpr::parse("arccos(" + a + ")", n));
        duals.push_back({c, c + 1});
    }
    if (contact) {
        s.xi.emplace();
        unit_expr(n, n, *s.xi);
    }

    std::vector<std::size_t> mask;
    for (std::size_t c = 1; c <= n; ++c) {
        const bool dropped = c >= 5 && c <= static_cast<std::size_t>(4 * k + 2) && (c % 4 == 1 || c % 4 == 2);
        if (!dropped) mask.push_back(c);
    }
    s.submanifold_mask = mask;

    auto frame = [&](std::size_t first) {
        ExprMatrix fields(2);
        unit_expr(n, first, fields[0]);
        unit_expr(n, first + 1, fields[1]);
        return fields;
    };
    s.distributions["D0"] = frame(1);
    s.invariant = "D0";
    for (int j = 1; j <= k; ++j) {
        const std::string name = "D" + std::to_string(j);
        s.distributions[name] = frame(static_cast<std::size_t>(4 * j - 1));
        s.proper.push_back(name);
    }

    std::vector<std::size_t> mask0;
    for (auto c : mask) mask0.push_back(c - 1);
    std::vector<std::vector<double>> pts;
    for (const auto& p : default_sample_points(n, mask0)) pts.emplace_back(p.coords().data(), p.coords().data() + n);
    s.sample_points = std::move(pts);

    auto model = build_model(s);
    return GalleryFixture{id,  k, eps, gamma, delta, id != "ex1" && id != "ex3", std::move(s), std::move(model), std::move(thetas),
                          std::move(duals), std::move(mask0)};
}

inline std::vector<AmbientPoint> default_sample_points(const GalleryFixture& fx, std::uint64_t seed = default_seed,
                                                       std::size_t count = 16) {
    return default_sample_points(fx.n(), fx.mask, seed, count);
}

struct OracleClaim {
    std::string name;
    bool expected = false;
    bool observed = false;
    bool passed = false;
    std::string detail;
};

struct FixtureOracleReport {
    std::string id;
    std::vector<OracleClaim> claims;
    double max_theta_error = 0.0;
    double max_dual_angle = 0.0;
    bool passed = false;
};

struct OracleOptions {
    double theta_tol = 1e-8;
    double dual_tol = 1e-8;
    double identity_tol = 1e-9;
    std::size_t trials = 10;
    std::uint64_t seed = default_seed;
    Tolerances tol{};
};

// The labels each worked example is stated to carry, given its parameters.
inline std::vector<std::pair<std::string, bool>> stated_labels(const GalleryFixture& fx) {
    if (!fx.pointwise) return {{labels::k_slant, true}};
    if (fx.id == "ex4")
        return {{labels::k_pointwise_slant, true}, {labels::generic, fx.gamma > 0}, {labels::pointwise_k_slant, fx.gamma > 0}};
    if (fx.id == "ex5")
        return {{labels::k_pointwise_slant, true}, {labels::generic, fx.gamma > 1}, {labels::pointwise_k_slant, fx.gamma > 1}};
    if (fx.id == "ex8") return {{labels::k_pointwise_slant, true}, {labels::generic, fx.gamma > 0}, {labels::pointwise_k_slant, true}};
    return {{labels::k_pointwise_slant, true}, {labels::generic, fx.gamma > 1}, {labels::pointwise_k_slant, true}};
}

// Runs every module on the fixture and compares against the example's stated outcomes.
inline FixtureOracleReport fixture_oracle_check(const GalleryFixture& fx, const std::vector<AmbientPoint>& points,
                                                const OracleOptions& opt = {}) {
    FixtureOracleReport rep;
    rep.id = fx.id;
    auto claim = [&](std::string name, bool expected, bool observed, std::string detail = {}) {
        rep.claims.push_back({std::move(name), expected, observed, expected == observed, std::move(detail)});
    };

    const auto structure = validate_structure(fx.structure(), points, 4, opt.tol.structure, opt.seed);
    claim("structure axioms", true, structure.passed, structure.passed ? "" : "worst: " + structure.worst_axiom());

    const auto cls = classify(fx.decomposition(), points, opt.tol);
    for (const auto& [label, expected] : stated_labels(fx)) {
        const auto it = cls.verdicts.find(label);
        claim("label " + label, expected, cls.holds(label), it == cls.verdicts.end() ? "" : it->second.evidence);
    }
    claim("lattice", true, lattice_violations(cls).empty());

    for (std::size_t j = 0; j < fx.closed_form_thetas.size(); ++j) {
        const std::string name = "D" + std::to_string(j + 1);
        const auto it = std::find_if(cls.components.begin(), cls.components.end(),
                                     [&](const ComponentSummary& c) { return c.name == name; });
        if (it == cls.components.end()) {
            claim("theta " + name, true, false, "component missing");
            continue;
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            worst = std::max(worst, std::abs(it->theta[i] - fx.closed_form_thetas[j].eval(points[i])));
        rep.max_theta_error = std::max(rep.max_theta_error, worst);
        claim("theta " + name, true, worst <= opt.theta_tol, "max error " + ast::format_number(worst));
    }

    bool duals_ok = true;
    bool roundtrip_ok = true;
    for (const auto& p : points) {
        const auto s = slice_at(fx.decomposition(), p, SliceOptions{opt.tol.cluster, opt.tol.angle_const});
        const auto d = dual_of(s);
        for (std::size_t j = 0; j < d.duals.size() && j < fx.expected_duals.size(); ++j) {
            Mat expected = Mat::Zero(static_cast<Eigen::Index>(fx.n()), 2);
            for (std::size_t c = 0; c < 2; ++c)
                expected(static_cast<Eigen::Index>(fx.expected_duals[j][c]), static_cast<Eigen::Index>(c)) = 1.0;
            if (d.duals[j].cols() != expected.cols()) {
                duals_ok = false;
                continue;
            }
            const double angle = max_principal_angle(s.g, SubspaceBasis(p, d.duals[j], true), SubspaceBasis(p, expected, true));
            rep.max_dual_angle = std::max(rep.max_dual_angle, angle);
            if (angle > opt.dual_tol) duals_ok = false;
        }
        if (d.duals.size() != fx.expected_duals.size()) duals_ok = false;
        if (!roundtrip_of(s, d, opt.dual_tol).passed) roundtrip_ok = false;
    }
    claim("dual spans", true, duals_ok, "max angle " + ast::format_number(rep.max_dual_angle));
    claim("dual round trip", true, roundtrip_ok);

    const auto suite = run_identity_suite(fx.decomposition(), points, opt.trials, opt.identity_tol, opt.seed,
                                          SliceOptions{opt.tol.cluster, opt.tol.angle_const});
    std::string failing;
    for (const auto& r : suite.results)
        if (r.verdict == "fail") failing += (failing.empty() ? "" : ", ") + r.key;
    claim("identities", true, suite.passed(), failing.empty() ? "" : "failing: " + failing);

    rep.passed = std::all_of(rep.claims.begin(), rep.claims.end(), [](const OracleClaim& c) { return c.passed; });
    return rep;
}

}  // namespace slantkit
