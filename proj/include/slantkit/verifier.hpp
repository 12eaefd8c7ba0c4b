#pragma once

// Identity suite over the registry, and connection checks in flat ambient space via
// central differences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "slantkit/classifier.hpp"
#include "slantkit/identities.hpp"

namespace slantkit {

inline std::vector<std::string> registry_keys() {
    std::vector<std::string> keys;
    for (const auto& c : identity_registry()) keys.push_back(c.key);
    return keys;
}

struct IdentityResult {
    std::string key;
    std::string topic;
    std::string statement;
    std::string setting;
    std::optional<double> max_residual;
    std::optional<Vec> witness_point;
    std::size_t evaluations = 0;
    std::string verdict;  // pass, fail, skipped(setting), skipped(empty)
    std::string note;
};

struct IdentitySuiteReport {
    double tolerance = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t point_count = 0;
    std::vector<IdentityResult> results;

    [[nodiscard]] std::size_t count(const std::string& verdict) const {
        return static_cast<std::size_t>(
            std::count_if(results.begin(), results.end(), [&](const IdentityResult& r) { return r.verdict == verdict; }));
    }
    [[nodiscard]] bool passed() const { return count("fail") == 0; }
    [[nodiscard]] const IdentityResult* find(const std::string& key) const {
        for (const auto& r : results)
            if (r.key == key) return &r;
        return nullptr;
    }
};

namespace detail {

struct PairOutcome {
    std::optional<double> residual;
    std::size_t evaluations = 0;
    std::string unavailable;  // why the point could not serve this case
};

inline PairOutcome run_case(const IdentityCase& ic, const IdentityContext& ctx, std::size_t trials, std::uint64_t seed) {
    PairOutcome out;
    if (ic.needs != Needs::structure && !ctx.slice) {
        out.unavailable = ctx.slice_error;
        return out;
    }
    if (ic.needs == Needs::dual && !ctx.dual) {
        out.unavailable = ctx.dual_error;
        return out;
    }
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::optional<double> r;
        try {
            r = ic.eval(ctx, rng);
        } catch (const Error& e) {
            out.unavailable = e.what();
            return out;
        }
        if (!r) continue;
        ++out.evaluations;
        const double v = std::isfinite(*r) ? *r : std::numeric_limits<double>::infinity();
        if (!out.residual || v > *out.residual) out.residual = v;
    }
    return out;
}

}  // namespace detail

// Evaluates the selected registry cases `trials` times per point. Work is sharded by
// (point, case) with per-pair seeds, so the merged report does not depend on scheduling.
inline IdentitySuiteReport run_identity_suite(const Decomposition& dec, const std::vector<AmbientPoint>& points,
                                              std::size_t trials, double tol = 1e-9, std::uint64_t seed = default_seed,
                                              const SliceOptions& opts = {},
                                              const std::function<bool(const IdentityCase&)>& select = {}) {
    if (points.empty()) throw ArgumentError("identity suite needs at least one point");
    if (trials == 0) throw ArgumentError("identity suite needs at least one trial");
    for (const auto& p : points) require_dim(dec.structure(), p);

    const auto& registry = identity_registry();
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < registry.size(); ++i)
        if (!select || select(registry[i])) chosen.push_back(i);

    std::vector<IdentityContext> contexts(points.size());
    parallel_for(points.size(), [&](std::size_t i) { contexts[i] = identity_context(dec, points[i], opts); });

    const auto kind = dec.structure().kind();
    const std::size_t nc = chosen.size();
    std::vector<detail::PairOutcome> outcomes(points.size() * nc);
    parallel_for(outcomes.size(), [&](std::size_t job) {
        const std::size_t pi = job / nc;
        const std::size_t ci = chosen[job % nc];
        if (!applies(registry[ci].setting, kind)) return;
        outcomes[job] = detail::run_case(registry[ci], contexts[pi], trials, derive_seed(seed, pi, ci));
    });

    IdentitySuiteReport rep;
    rep.tolerance = tol;
    rep.trials = trials;
    rep.seed = seed;
    rep.point_count = points.size();
    for (std::size_t k = 0; k < nc; ++k) {
        const auto& ic = registry[chosen[k]];
        IdentityResult r;
        r.key = ic.key;
        r.topic = ic.topic;
        r.statement = ic.statement;
        r.setting = to_string(ic.setting);
        if (!applies(ic.setting, kind)) {
            r.verdict = "skipped(setting)";
            rep.results.push_back(std::move(r));
            continue;
        }
        std::size_t unavailable = 0;
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const auto& o = outcomes[pi * nc + k];
            r.evaluations += o.evaluations;
            if (!o.unavailable.empty()) {
                if (unavailable++ == 0) {
                    r.note = o.unavailable;
                    if (!r.witness_point) r.witness_point = points[pi].coords();
                }
                continue;
            }
            if (o.residual && (!r.max_residual || *o.residual > *r.max_residual)) {
                r.max_residual = o.residual;
                r.witness_point = points[pi].coords();
            }
        }
        if (unavailable > 0) {
            r.verdict = "fail";
            r.note = "not evaluable at " + std::to_string(unavailable) + " point(s): " + r.note;
        } else if (r.evaluations == 0) {
            r.verdict = "skipped(empty)";
            r.witness_point.reset();
        } else {
            r.verdict = *r.max_residual <= tol ? "pass" : "fail";
        }
        rep.results.push_back(std::move(r));
    }
    return rep;
}

// The cases living on the complement side: w(D_i), H and the G-side dual relations.
inline IdentitySuiteReport dual_identity_suite(const Decomposition& dec, const std::vector<AmbientPoint>& points,
                                               std::size_t trials, double tol = 1e-9, std::uint64_t seed = default_seed,
                                               const SliceOptions& opts = {}) {
    return run_identity_suite(dec, points, trials, tol, seed, opts,
                              [](const IdentityCase& c) { return c.needs == Needs::dual; });
}

struct CovariantProbe {
    double h = 1e-5;
    std::vector<Vec> directions;  // empty: the masked coordinate axes
    double zero_threshold = 1e-4;
};

namespace detail {

inline void require_flat(const Decomposition& dec) {
    if (!dec.structure().euclidean()) throw UnsupportedError("connection checks need the Euclidean ambient metric");
    if (!dec.mask()) throw UnsupportedError("connection checks need a submanifold mask");
}

inline void require_in_mask(const Decomposition& dec, const Vec& x) {
    std::vector<bool> inside(dec.n(), false);
    for (auto c : *dec.mask()) inside[c] = true;
    for (Eigen::Index r = 0; r < x.size(); ++r)
        if (!inside[static_cast<std::size_t>(r)] && std::abs(x(r)) > 1e-12)
            throw ArgumentError("direction leaves the submanifold mask at x" + std::to_string(r + 1));
}

// Ambient matrix of f^2 on D (zero on the complement).
inline Mat f2_field(const Decomposition& dec, const AmbientPoint& q) {
    const auto core = core_slice(dec, q);
    const auto& s = core.slice;
    return s.d_basis * s.f2 * s.d_basis.transpose() * s.g.matrix();
}

inline std::vector<Vec> probe_directions(const Decomposition& dec, const CovariantProbe& probe) {
    if (!probe.directions.empty()) return probe.directions;
    std::vector<Vec> out;
    for (auto c : *dec.mask()) out.push_back(Vec::Unit(static_cast<Eigen::Index>(dec.n()), static_cast<Eigen::Index>(c)));
    return out;
}

// Derivative of the eigenvalue nearest to `lambda` along x, by central differences.
inline double lambda_derivative(const Decomposition& dec, const AmbientPoint& p, const Vec& x, double lambda, double h,
                                double cluster_tol) {
    auto nearest = [&](const AmbientPoint& q) {
        const auto spec = slant_spectrum(dec, q, cluster_tol);
        double best = lambda;
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& c : spec.clusters) {
            if (std::abs(c.lambda - lambda) < gap) {
                gap = std::abs(c.lambda - lambda);
                best = c.lambda;
            }
        }
        return best;
    };
    return (nearest(AmbientPoint(p.coords() + h * x)) - nearest(AmbientPoint(p.coords() - h * x))) / (2.0 * h);
}

}  // namespace detail

// (nabla_X f^2) Y with Y extended constantly in ambient coordinates.
inline Vec nabla_f2(const Decomposition& dec, const CovariantProbe& probe, const AmbientPoint& p, const Vec& x, const Vec& y) {
    detail::require_flat(dec);
    require_dim(dec.structure(), p);
    if (x.size() != static_cast<Eigen::Index>(dec.n()) || y.size() != x.size())
        throw DimensionError("probe vectors must have the ambient dimension");
    if (!(probe.h > 0.0)) throw ArgumentError("finite-difference step must be positive");
    detail::require_in_mask(dec, x);
    if (x.isZero(0.0)) return Vec::Zero(y.size());
    const Mat plus = detail::f2_field(dec, AmbientPoint(p.coords() + probe.h * x));
    const Mat minus = detail::f2_field(dec, AmbientPoint(p.coords() - probe.h * x));
    return (plus - minus) * y / (2.0 * probe.h);
}

struct ConnectionComponent {
    std::string name;
    std::string classifier_kind;
    bool classifier_constant = false;
    double nabla_max = 0.0;              // max |(nabla_X f^2) Y| for X, Y in D_i
    double lambda_rate_component = 0.0;  // max |X(lambda_i)| for X in D_i
    double lambda_rate_tangent = 0.0;    // max |X(lambda_i)| over masked directions
    std::optional<Vec> witness_point;
    std::optional<Vec> witness_direction;
    double hypothesis_residual = 0.0;  // max |(I - P_D) d_X Y_j| over frame fields, sampled only
    bool derivative_constant = false;
    bool consistent = false;
};

struct ConnectionReport {
    CovariantProbe probe;
    std::size_t point_count = 0;
    std::vector<ConnectionComponent> components;
    bool consistent = false;
    double hypothesis_residual = 0.0;

    [[nodiscard]] double nabla_max() const {
        double m = 0.0;
        for (const auto& c : components) m = std::max(m, c.nabla_max);
        return m;
    }
    [[nodiscard]] double lambda_rate_max() const {
        double m = 0.0;
        for (const auto& c : components) m = std::max({m, c.lambda_rate_component, c.lambda_rate_tangent});
        return m;
    }
};

// Per component: parallelism of f^2 along D_i, derivatives of lambda_i inside D_i and
// along every masked direction, cross-checked against the classifier's constancy verdicts.
inline ConnectionReport connection_criterion_report(const Decomposition& dec, const CovariantProbe& probe,
                                                    const std::vector<AmbientPoint>& points, const Tolerances& tol = {}) {
    detail::require_flat(dec);
    if (!(probe.h > 0.0)) throw ArgumentError("finite-difference step must be positive");
    const auto classification = classify(dec, points, tol);
    const auto directions = detail::probe_directions(dec, probe);
    for (const auto& d : directions) detail::require_in_mask(dec, d);
    const SliceOptions opts{tol.cluster, tol.angle_const};

    const std::size_t np = points.size();
    std::vector<std::vector<ConnectionComponent>> per_point(np);
    parallel_for(np, [&](std::size_t pi) {
        const auto& p = points[pi];
        const auto s = slice_at(dec, p, opts);
        const auto core = detail::core_slice(dec, p);
        for (std::size_t ci = 0; ci < s.components.size(); ++ci) {
            const auto& comp = s.components[ci];
            ConnectionComponent cc;
            cc.name = comp.name;
            auto note = [&](double value, double& slot, const Vec& dir) {
                if (value > slot) {
                    slot = value;
                    cc.witness_point = p.coords();
                    cc.witness_direction = dir;
                }
            };
            for (Eigen::Index a = 0; a < comp.basis.cols(); ++a) {
                const Vec x = comp.basis.col(a);
                for (Eigen::Index b = 0; b < comp.basis.cols(); ++b)
                    cc.nabla_max = std::max(cc.nabla_max, nabla_f2(dec, probe, p, x, comp.basis.col(b)).norm());
                double rate = std::abs(detail::lambda_derivative(dec, p, x, comp.lambda, probe.h, tol.cluster));
                cc.lambda_rate_component = std::max(cc.lambda_rate_component, rate);
                note(rate, cc.lambda_rate_tangent, x);
            }
            for (const auto& x : directions)
                note(std::abs(detail::lambda_derivative(dec, p, x, comp.lambda, probe.h, tol.cluster)),
                     cc.lambda_rate_tangent, x);
            // Declared frames only: the fields behind each component are known.
            if (!dec.is_discovery()) {
                const auto& frame = dec.frames()[ci];
                for (Eigen::Index a = 0; a < comp.basis.cols(); ++a) {
                    const Vec x = comp.basis.col(a);
                    for (const auto& field : frame.fields()) {
                        const Vec dy = (field.eval(AmbientPoint(p.coords() + probe.h * x)) -
                                        field.eval(AmbientPoint(p.coords() - probe.h * x))) /
                                       (2.0 * probe.h);
                        cc.hypothesis_residual = std::max(cc.hypothesis_residual, (dy - core.slice.p_d * dy).norm());
                    }
                }
            }
            per_point[pi].push_back(std::move(cc));
        }
    });

    ConnectionReport rep;
    rep.probe = probe;
    rep.point_count = np;
    rep.consistent = true;
    for (std::size_t pi = 0; pi < np; ++pi) {
        for (auto& cc : per_point[pi]) {
            auto it = std::find_if(rep.components.begin(), rep.components.end(),
                                   [&](const ConnectionComponent& c) { return c.name == cc.name; });
            if (it == rep.components.end()) {
                rep.components.push_back(cc);
                continue;
            }
            it->nabla_max = std::max(it->nabla_max, cc.nabla_max);
            it->lambda_rate_component = std::max(it->lambda_rate_component, cc.lambda_rate_component);
            it->hypothesis_residual = std::max(it->hypothesis_residual, cc.hypothesis_residual);
            if (cc.lambda_rate_tangent > it->lambda_rate_tangent) {
                it->lambda_rate_tangent = cc.lambda_rate_tangent;
                it->witness_point = cc.witness_point;
                it->witness_direction = cc.witness_direction;
            }
        }
    }
    for (auto& cc : rep.components) {
        const auto it = std::find_if(classification.components.begin(), classification.components.end(),
                                     [&](const ComponentSummary& c) { return c.name == cc.name; });
        if (it == classification.components.end())
            throw ComponentError("component '" + cc.name + "' is missing from the classification");
        cc.classifier_kind = to_string(it->kind);
        cc.classifier_constant = it->kind == ComponentKind::invariant || it->kind == ComponentKind::slant;
        cc.derivative_constant = cc.lambda_rate_tangent <= probe.zero_threshold;
        cc.consistent = cc.classifier_constant == cc.derivative_constant;
        rep.consistent = rep.consistent && cc.consistent;
        rep.hypothesis_residual = std::max(rep.hypothesis_residual, cc.hypothesis_residual);
    }
    return rep;
}

}  // namespace slantkit
