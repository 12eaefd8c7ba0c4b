#pragma once

// JSON and Markdown renderings of every report. Output depends only on report
// contents, so equal inputs give byte-identical text.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "slantkit/classifier.hpp"
#include "slantkit/duality.hpp"
#include "slantkit/spec_format.hpp"
#include "slantkit/verifier.hpp"
#include "slantkit/version.hpp"

namespace slantkit {

inline Json to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// Columns as arrays: a basis becomes a list of vectors.
inline Json columns_json(const Mat& m) {
    Json a = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(to_json(Vec(m.col(c))));
    return a;
}

template <class T>
Json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_same_v<T, Vec>) {
        return to_json(*v);
    } else {
        return Json(*v);
    }
}

inline Json to_json(const StructureVerdict& v) {
    Json j;
    j["passed"] = v.passed;
    j["tolerance"] = v.tolerance;
    j["axioms"] = Json::object();
    for (const auto& [name, r] : v.axioms)
        j["axioms"][name] = {{"max_residual", r.max_residual},
                             {"point", optional_json(r.point)},
                             {"x", optional_json(r.x)},
                             {"y", optional_json(r.y)}};
    j["failures"] = Json::array();
    for (const auto& f : v.failures) j["failures"].push_back({{"point", to_json(f.point)}, {"message", f.message}});
    return j;
}

inline Json to_json(const ClassificationReport& r) {
    Json j;
    j["discovery"] = r.discovery;
    j["k"] = r.k();
    j["labels"] = r.holding_labels();
    j["verdicts"] = Json::object();
    for (const auto& [label, v] : r.verdicts)
        j["verdicts"][label] = {{"holds", v.holds}, {"evidence", v.evidence}, {"witness", optional_json(v.witness)}};
    j["components"] = Json::array();
    for (const auto& c : r.components) {
        j["components"].push_back({{"name", c.name},
                                   {"kind", to_string(c.kind)},
                                   {"rank", c.rank},
                                   {"declared_invariant", c.declared_invariant},
                                   {"group", optional_json(c.group)},
                                   {"theta", c.theta},
                                   {"lambda", c.lambda},
                                   {"theta_min", c.theta_min()},
                                   {"theta_max", c.theta_max()}});
    }
    j["groups"] = r.groups;
    j["invariant_part"] = r.invariant_part;
    j["f_invariance_defect"] = r.f_invariance_defect;
    j["notes"] = r.notes;
    j["points"] = Json::array();
    for (const auto& p : r.points) j["points"].push_back(to_json(p.coords()));
    j["lattice_violations"] = lattice_violations(r);
    return j;
}

struct DualPointReport {
    DualSlice dual;
    DualRoundtripReport roundtrip;
};

inline Json to_json(const DualPointReport& d) {
    Json j;
    j["point"] = to_json(d.dual.point.coords());
    j["passed"] = d.roundtrip.passed;
    j["orthogonality_residual"] = d.roundtrip.orthogonality_residual;
    j["containment_residual"] = d.roundtrip.containment_residual;
    j["f_h_residual"] = d.roundtrip.f_h_residual;
    j["h_rank"] = d.roundtrip.h_rank;
    j["components"] = Json::array();
    for (std::size_t i = 0; i < d.roundtrip.components.size(); ++i) {
        const auto& c = d.roundtrip.components[i];
        j["components"].push_back({{"name", c.name},
                                   {"rank", c.rank},
                                   {"dual_rank", c.dual_rank},
                                   {"theta", c.theta},
                                   {"dual_theta", c.dual_theta},
                                   {"roundtrip_angle", c.roundtrip_angle},
                                   {"w2_spread", c.w2_spread},
                                   {"passed", c.passed},
                                   {"basis", columns_json(d.dual.duals[i])}});
    }
    j["h_basis"] = columns_json(d.dual.h);
    return j;
}

inline Json to_json(const IdentitySuiteReport& r) {
    Json j;
    j["tolerance"] = r.tolerance;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["point_count"] = r.point_count;
    j["passed"] = r.passed();
    j["counts"] = {{"pass", r.count("pass")},
                   {"fail", r.count("fail")},
                   {"skipped(setting)", r.count("skipped(setting)")},
                   {"skipped(empty)", r.count("skipped(empty)")}};
    j["results"] = Json::array();
    for (const auto& x : r.results) {
        Json e{{"key", x.key},
               {"topic", x.topic},
               {"statement", x.statement},
               {"setting", x.setting},
               {"max_residual", optional_json(x.max_residual)},
               {"witness_point", optional_json(x.witness_point)},
               {"evaluations", x.evaluations},
               {"verdict", x.verdict}};
        if (!x.note.empty()) e["note"] = x.note;
        j["results"].push_back(std::move(e));
    }
    return j;
}

inline Json to_json(const ConnectionReport& r) {
    Json j;
    j["probe"] = {{"h", r.probe.h}, {"zero_threshold", r.probe.zero_threshold}};
    j["point_count"] = r.point_count;
    j["consistent"] = r.consistent;
    j["nabla_f2_max"] = r.nabla_max();
    j["lambda_rate_max"] = r.lambda_rate_max();
    j["sampled_hypothesis_residual"] = r.hypothesis_residual;
    j["components"] = Json::array();
    for (const auto& c : r.components) {
        j["components"].push_back({{"name", c.name},
                                   {"classifier_kind", c.classifier_kind},
                                   {"classifier_constant", c.classifier_constant},
                                   {"nabla_f2_max", c.nabla_max},
                                   {"lambda_rate_component", c.lambda_rate_component},
                                   {"lambda_rate_tangent", c.lambda_rate_tangent},
                                   {"witness_point", optional_json(c.witness_point)},
                                   {"witness_direction", optional_json(c.witness_direction)},
                                   {"derivative_constant", c.derivative_constant},
                                   {"consistent", c.consistent},
                                   {"sampled_hypothesis_residual", c.hypothesis_residual}});
    }
    return j;
}

// Sections not run by a command stay "skipped".
struct RunReport {
    std::string spec_digest;
    std::uint64_t seed = 0;
    Json structure = "skipped";
    Json classification = "skipped";
    Json dual = "skipped";
    Json identities = "skipped";
    Json connection = "skipped";
};

inline Json to_json(const RunReport& r) {
    return {{"spec_digest", r.spec_digest},       {"seed", r.seed},         {"structure", r.structure},
            {"classification", r.classification}, {"dual", r.dual},         {"identities", r.identities},
            {"connection", r.connection},         {"tool_version", std::string(tool_version)}};
}

inline std::string dump_report(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

namespace md {

// Ten significant digits; the JSON report keeps full precision.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : "-"; }

inline std::string point(const Vec& p) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? ", " : "") + num(p(i));
    return s + ")";
}

inline std::string point(const std::optional<Vec>& p) { return p ? point(*p) : "-"; }

}  // namespace md

inline std::string to_markdown(const StructureVerdict& v) {
    std::ostringstream out;
    out << "## Structure\n\n" << (v.passed ? "PASS" : "FAIL") << " at tolerance " << md::num(v.tolerance) << "\n\n";
    out << "| axiom | max residual | witness point |\n|---|---|---|\n";
    for (const auto& [name, r] : v.axioms) out << "| " << name << " | " << md::num(r.max_residual) << " | " << md::point(r.point) << " |\n";
    for (const auto& f : v.failures) out << "\nnot evaluable at " << md::point(f.point) << ": " << f.message << "\n";
    return out.str();
}

inline std::string to_markdown(const ClassificationReport& r) {
    std::ostringstream out;
    out << "## Classification\n\n";
    const auto holding = r.holding_labels();
    out << "Holds:";
    if (holding.empty()) out << " none";
    for (const auto& l : holding) out << " " << l << (l == labels::k_slant || l == labels::k_pointwise_slant ? " (k=" + std::to_string(r.k()) + ")" : "") << ";";
    out << "\n\n| label | holds | evidence | witness |\n|---|---|---|---|\n";
    for (const auto& label : labels::all()) {
        const auto it = r.verdicts.find(label);
        if (it == r.verdicts.end()) continue;
        out << "| " << label << " | " << (it->second.holds ? "yes" : "NO") << " | " << it->second.evidence << " | "
            << md::point(it->second.witness) << " |\n";
    }
    out << "\n### Slant angles\n\n| component | kind | rank | theta min | theta max |\n|---|---|---|---|---|\n";
    for (const auto& c : r.components)
        out << "| " << c.name << " | " << to_string(c.kind) << " | " << c.rank << " | " << md::num(c.theta_min()) << " | "
            << md::num(c.theta_max()) << " |\n";
    out << "\n| point |";
    for (const auto& c : r.components) out << " " << c.name << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < r.components.size(); ++i) out << "---|";
    out << "\n";
    for (std::size_t p = 0; p < r.points.size(); ++p) {
        out << "| " << md::point(r.points[p].coords()) << " |";
        for (const auto& c : r.components) out << " " << md::num(c.theta[p]) << " |";
        out << "\n";
    }
    for (const auto& n : r.notes) out << "\n- " << n;
    if (!r.notes.empty()) out << "\n";
    return out.str();
}

inline std::string to_markdown(const std::vector<DualPointReport>& reports) {
    std::ostringstream out;
    out << "## Dual distributions\n\n| point | component | rank | dual rank | theta | dual theta | round trip | result |\n"
           "|---|---|---|---|---|---|---|---|\n";
    bool all = true;
    for (const auto& d : reports) {
        all = all && d.roundtrip.passed;
        for (const auto& c : d.roundtrip.components)
            out << "| " << md::point(d.dual.point.coords()) << " | " << c.name << " | " << c.rank << " | " << c.dual_rank << " | "
                << md::num(c.theta) << " | " << md::num(c.dual_theta) << " | " << md::num(c.roundtrip_angle) << " | "
                << (c.passed ? "PASS" : "FAIL") << " |\n";
    }
    out << "\nRound trip: " << (all ? "PASS" : "FAIL") << "\n";
    return out.str();
}

inline std::string to_markdown(const IdentitySuiteReport& r) {
    std::ostringstream out;
    out << "## Identities\n\n" << r.count("pass") << " pass, " << r.count("fail") << " fail, "
        << r.count("skipped(setting)") + r.count("skipped(empty)") << " skipped (" << r.trials << " trials x " << r.point_count
        << " points, tolerance " << md::num(r.tolerance) << ")\n\n";
    out << "| key | verdict | max residual | witness point |\n|---|---|---|---|\n";
    for (const auto& x : r.results)
        out << "| " << x.key << " | " << x.verdict << " | " << md::num(x.max_residual) << " | " << md::point(x.witness_point)
            << " |\n";
    for (const auto& x : r.results)
        if (!x.note.empty()) out << "\n- " << x.key << ": " << x.note;
    return out.str();
}

inline std::string to_markdown(const ConnectionReport& r) {
    std::ostringstream out;
    out << "## Connection criteria\n\nstep " << md::num(r.probe.h) << ", zero threshold " << md::num(r.probe.zero_threshold)
        << "; classifier and derivatives " << (r.consistent ? "agree" : "DISAGREE") << "\n\n";
    out << "| component | classifier | max nabla f2 | max X(lambda) in D_i | max X(lambda) on TM | agree |\n"
           "|---|---|---|---|---|---|\n";
    for (const auto& c : r.components)
        out << "| " << c.name << " | " << c.classifier_kind << " | " << md::num(c.nabla_max) << " | "
            << md::num(c.lambda_rate_component) << " | " << md::num(c.lambda_rate_tangent) << " | " << (c.consistent ? "yes" : "NO")
            << " |\n";
    out << "\nSampled hypothesis (derivatives of D fields stay in D): max residual " << md::num(r.hypothesis_residual) << "\n";
    return out.str();
}

}  // namespace slantkit
