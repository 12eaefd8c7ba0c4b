// slantkit command-line front end.
//
// Exit codes: 0 success, 1 mathematical failure (a witness is printed),
// 2 input or usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slantkit/slantkit.hpp"

namespace {

using namespace slantkit;

constexpr int exit_ok = 0;
constexpr int exit_math = 1;
constexpr int exit_input = 2;

struct Options {
    std::string spec_path;
    std::string json_path;
    std::uint64_t seed = default_seed;
    std::size_t trials = 20;
    bool connection = false;
    bool force = false;
    std::optional<double> cluster_tol;
    std::optional<double> angle_tol;
    std::optional<double> distinct_tol;

    std::string fixture;
    int k = 2;
    int epsilon = -1;
    std::optional<double> gamma;
    std::optional<double> delta;
};

// Thrown for problems in the input rather than in the mathematics.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Loaded {
    ManifoldSpec spec;
    Model model;
    Tolerances tol;
};

// Evaluates every expression once per sample point so that undefined values are
// reported as input errors before any analysis runs.
void probe_expressions(const Model& m) {
    for (const auto& p : m.points) {
        try {
            (void)phi_at(*m.structure, p);
            (void)metric_at(*m.structure, p);
            if (m.structure->kind() == StructureKind::contact_like) (void)xi_at(*m.structure, p);
            for (const auto& f : m.decomposition.frames())
                for (const auto& field : f.fields()) (void)field.eval(p);
        } catch (const EvalError& e) {
            throw InputError("cannot evaluate at " + md::point(p.coords()) + ": " + e.what());
        }
    }
}

Loaded build(ManifoldSpec spec) {
    auto model = build_model(spec);
    auto tol = model.tolerances;
    return {std::move(spec), std::move(model), tol};
}

Loaded load(const Options& o) {
    std::optional<Loaded> loaded;
    try {
        loaded = build(load_spec(o.spec_path));
    } catch (const SpecError& e) {
        throw InputError(e.what());
    } catch (const ParseError& e) {
        throw InputError(e.what());
    } catch (const ArgumentError& e) {
        throw InputError(e.what());
    } catch (const DimensionError& e) {
        throw InputError(e.what());
    }
    auto& l = *loaded;
    if (o.cluster_tol) l.tol.cluster = *o.cluster_tol;
    if (o.angle_tol) l.tol.angle_const = *o.angle_tol;
    if (o.distinct_tol) l.tol.angle_distinct = *o.distinct_tol;
    probe_expressions(l.model);
    return std::move(*loaded);
}

SliceOptions slice_options(const Tolerances& t) { return {t.cluster, t.angle_const}; }

void write_json(const Options& o, const std::string& text) {
    if (o.json_path.empty()) return;
    std::ofstream out(o.json_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + o.json_path);
    out << text;
}

RunReport run_report(const Loaded& l, const Options& o) {
    RunReport r;
    r.spec_digest = spec_digest(l.spec);
    r.seed = o.seed;
    return r;
}

StructureVerdict structure_of(const Loaded& l, const Options& o) {
    return validate_structure(*l.model.structure, l.model.points, o.trials, l.tol.structure, o.seed);
}

void print_structure_failure(const StructureVerdict& v) {
    const auto worst = v.worst_axiom();
    std::cerr << "structure check failed";
    if (!worst.empty()) {
        const auto& r = v.axioms.at(worst);
        std::cerr << ": " << worst << " residual " << md::num(r.max_residual) << " at " << md::point(r.point);
    }
    std::cerr << "\n";
}

int cmd_validate(const Options& o) {
    const auto l = load(o);
    const auto v = structure_of(l, o);
    auto report = run_report(l, o);
    report.structure = to_json(v);
    std::cout << to_markdown(v);
    write_json(o, dump_report(report));
    if (!v.passed) print_structure_failure(v);
    return v.passed ? exit_ok : exit_math;
}

std::optional<ConnectionReport> connection_of(const Loaded& l, const Options& o) {
    if (!o.connection) return std::nullopt;
    CovariantProbe probe;
    probe.h = l.tol.fd_step;
    probe.zero_threshold = l.tol.zero_threshold;
    try {
        return connection_criterion_report(l.model.decomposition, probe, l.model.points, l.tol);
    } catch (const UnsupportedError& e) {
        throw InputError(std::string("--connection: ") + e.what());
    }
}

int cmd_classify(const Options& o) {
    const auto l = load(o);
    const auto v = structure_of(l, o);
    auto report = run_report(l, o);
    report.structure = to_json(v);
    if (!v.passed && !o.force) {
        std::cout << to_markdown(v);
        write_json(o, dump_report(report));
        print_structure_failure(v);
        std::cerr << "use --force to classify anyway\n";
        return exit_math;
    }
    const auto c = classify(l.model.decomposition, l.model.points, l.tol);
    report.classification = to_json(c);
    std::cout << to_markdown(c);
    if (const auto conn = connection_of(l, o)) {
        report.connection = to_json(*conn);
        std::cout << "\n" << to_markdown(*conn);
    }
    write_json(o, dump_report(report));
    return exit_ok;
}

int cmd_dual(const Options& o) {
    const auto l = load(o);
    std::vector<DualPointReport> per_point;
    for (const auto& p : l.model.points) {
        const auto s = slice_at(l.model.decomposition, p, slice_options(l.tol));
        auto d = dual_of(s, l.tol.identity, l.tol.angle_const);
        auto rt = roundtrip_of(s, d, l.tol.dual);
        per_point.push_back({std::move(d), std::move(rt)});
    }
    auto report = run_report(l, o);
    report.dual = Json::array();
    bool passed = true;
    for (const auto& d : per_point) {
        report.dual.push_back(to_json(d));
        passed = passed && d.roundtrip.passed;
    }
    std::cout << to_markdown(per_point);
    write_json(o, dump_report(report));
    return passed ? exit_ok : exit_math;
}

int cmd_identities(const Options& o) {
    const auto l = load(o);
    const auto r = run_identity_suite(l.model.decomposition, l.model.points, o.trials, l.tol.identity, o.seed,
                                      slice_options(l.tol));
    auto report = run_report(l, o);
    report.identities = to_json(r);
    std::cout << to_markdown(r);
    bool passed = r.passed();
    if (const auto conn = connection_of(l, o)) {
        report.connection = to_json(*conn);
        std::cout << "\n" << to_markdown(*conn);
        passed = passed && conn->consistent;
    }
    write_json(o, dump_report(report));
    return passed ? exit_ok : exit_math;
}

FixtureParams fixture_params(const Options& o) { return {o.k, o.epsilon, o.gamma, o.delta}; }

int cmd_gallery_list() {
    for (const auto& id : fixture_ids()) std::cout << id << "\n";
    return exit_ok;
}

int cmd_gallery_spec(const Options& o) {
    const auto fx = build_fixture(o.fixture, fixture_params(o));
    const auto text = spec_to_json(fx.spec).dump(2) + "\n";
    if (o.json_path.empty()) {
        std::cout << text;
    } else {
        write_json(o, text);
    }
    return exit_ok;
}

int cmd_gallery_check(const Options& o) {
    std::vector<std::string> ids = o.fixture.empty() ? fixture_ids() : std::vector<std::string>{o.fixture};
    Json out = Json::array();
    bool passed = true;
    OracleOptions opt;
    opt.seed = o.seed;
    std::cout << "## Gallery oracle check\n\n| fixture | claim | expected | observed | result |\n|---|---|---|---|---|\n";
    for (const auto& id : ids) {
        const auto fx = build_fixture(id, fixture_params(o));
        const auto rep = fixture_oracle_check(fx, default_sample_points(fx, o.seed), opt);
        passed = passed && rep.passed;
        Json j{{"id", rep.id}, {"passed", rep.passed}, {"max_theta_error", rep.max_theta_error},
               {"max_dual_angle", rep.max_dual_angle}, {"claims", Json::array()}};
        for (const auto& c : rep.claims) {
            j["claims"].push_back(
                {{"name", c.name}, {"expected", c.expected}, {"observed", c.observed}, {"passed", c.passed}, {"detail", c.detail}});
            std::cout << "| " << id << " | " << c.name << " | " << (c.expected ? "yes" : "no") << " | "
                      << (c.observed ? "yes" : "no") << " | " << (c.passed ? "PASS" : "FAIL") << " |\n";
        }
        out.push_back(std::move(j));
    }
    write_json(o, Json{{"fixtures", out}, {"seed", o.seed}, {"tool_version", std::string(tool_version)}}.dump(2) + "\n");
    return passed ? exit_ok : exit_math;
}

int cmd_manifest(const std::string& check_path) {
    if (check_path.empty()) {
        std::cout << render_manifest();
        return exit_ok;
    }
    std::vector<ManifestEntry> entries;
    try {
        entries = load_manifest(check_path);
    } catch (const SpecError& e) {
        throw InputError(e.what());
    }
    const auto c = manifest_check(entries);
    if (c.passed()) {
        std::cout << "manifest matches " << identity_registry().size() << " registry keys\n";
        return exit_ok;
    }
    std::cerr << c.summary();
    return exit_math;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical analysis of slant distributions"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);
    Options o;

    auto spec_command = [&](const std::string& name, const std::string& about) {
        auto* sub = app.add_subcommand(name, about);
        sub->add_option("spec", o.spec_path, "Manifold spec (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--json", o.json_path, "Write the JSON report to this path");
        sub->add_option("--seed", o.seed, "Seed for random trials");
        sub->add_option("--trials", o.trials, "Random trials per point")->check(CLI::PositiveNumber);
        sub->add_option("--cluster-tol", o.cluster_tol, "Eigenvalue clustering tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--angle-tol", o.angle_tol, "Tolerance for constant slant angles")->check(CLI::PositiveNumber);
        sub->add_option("--distinct-tol", o.distinct_tol, "Tolerance for distinct slant angles")->check(CLI::PositiveNumber);
        return sub;
    };
    auto* validate = spec_command("validate", "Check the structure axioms");
    auto* classify_cmd = spec_command("classify", "Classify the distribution");
    classify_cmd->add_flag("--force", o.force, "Classify even if the structure check fails");
    classify_cmd->add_flag("--connection", o.connection, "Also run the covariant-derivative criteria");
    auto* dual = spec_command("dual", "Build dual distributions and check the round trip");
    auto* identities = spec_command("identities", "Run the identity suite");
    identities->add_flag("--connection", o.connection, "Also run the covariant-derivative criteria");

    auto* gallery = app.add_subcommand("gallery", "Worked example fixtures");
    gallery->require_subcommand(1);
    auto* list = gallery->add_subcommand("list", "List fixture ids");
    auto* spec = gallery->add_subcommand("spec", "Print the JSON spec of a fixture");
    auto* check = gallery->add_subcommand("check", "Check fixtures against their stated outcomes");
    for (auto* sub : {spec, check}) {
        sub->add_option("--k", o.k, "Number of proper components")->check(CLI::Range(2, 64));
        sub->add_option("--epsilon", o.epsilon, "Sign of the structure")->check(CLI::IsMember({-1, 1}));
        sub->add_option("--gamma", o.gamma, "Fixture parameter gamma");
        sub->add_option("--delta", o.delta, "Fixture parameter delta");
        sub->add_option("--json", o.json_path, "Write JSON to this path");
    }
    spec->add_option("id", o.fixture, "Fixture id")->required()->check(CLI::IsMember(fixture_ids()));
    check->add_option("id", o.fixture, "Fixture id (default: all)")->check(CLI::IsMember(fixture_ids()));
    check->add_option("--seed", o.seed, "Seed for sample points and trials");

    auto* manifest = app.add_subcommand("manifest", "Print the identity manifest or check a manifest file");
    std::string manifest_path;
    manifest->add_option("--check", manifest_path, "Manifest file to check against the registry")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (validate->parsed()) return cmd_validate(o);
        if (classify_cmd->parsed()) return cmd_classify(o);
        if (dual->parsed()) return cmd_dual(o);
        if (identities->parsed()) return cmd_identities(o);
        if (list->parsed()) return cmd_gallery_list();
        if (spec->parsed()) return cmd_gallery_spec(o);
        if (check->parsed()) return cmd_gallery_check(o);
        if (manifest->parsed()) return cmd_manifest(manifest_path);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const Error& e) {
        std::cerr << "failed: " << e.what() << "\n";
        return exit_math;
    }
    return exit_input;
}
