#pragma once

// Registry of pointwise tensor identities. Each case draws seeded random vectors
// from the relevant subspaces at a point and returns a relative residual.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "slantkit/distribution.hpp"
#include "slantkit/duality.hpp"
#include "slantkit/random.hpp"

namespace slantkit {

enum class Setting { any, contact, hermitian };

inline std::string to_string(Setting s) {
    switch (s) {
        case Setting::any: return "any";
        case Setting::contact: return "contact-like";
        case Setting::hermitian: return "hermitian-like";
    }
    return "?";
}

inline bool applies(Setting s, StructureKind k) {
    return s == Setting::any || (s == Setting::contact) == (k == StructureKind::contact_like);
}

// What a case needs beyond the structure itself.
enum class Needs { structure, slice, dual };

struct IdentityContext {
    AmbientPoint point;
    int eps = -1;
    StructureKind kind = StructureKind::hermitian_like;
    MetricAtPoint g = MetricAtPoint::identity(1);
    Mat phi;
    std::optional<Vec> xi;
    Mat ambient;  // g-orthonormal basis of the ambient space
    Mat xi_perp;  // complement of xi (the whole space when there is no xi)

    std::optional<DecompositionSlice> slice;
    std::optional<DualSlice> dual;
    std::string slice_error;
    std::string dual_error;

    Mat d0;                    // invariant part of D
    std::vector<Mat> proper;   // proper component bases
    std::vector<double> theta;  // their slant angles
    std::vector<Mat> duals;    // w(D_i), same order
    Mat dg;                    // D + G
    Mat dx;                    // D + <xi>

    [[nodiscard]] const DecompositionSlice& s() const { return *slice; }
    [[nodiscard]] const Mat& f() const { return slice->f; }
    [[nodiscard]] const Mat& w() const { return slice->w; }
    [[nodiscard]] Mat pr(const Mat& basis) const { return projector_matrix(g, basis); }
    [[nodiscard]] double eta(const Vec& v) const { return xi ? g(v, *xi) : 0.0; }
    [[nodiscard]] bool perp(std::size_t i) const { return std::abs(theta[i] - std::numbers::pi / 2) <= 1e-6; }
};

inline IdentityContext identity_context(const Decomposition& dec, const AmbientPoint& p, const SliceOptions& opts = {}) {
    const auto& st = dec.structure();
    IdentityContext c;
    c.point = p;
    c.eps = st.epsilon();
    c.kind = st.kind();
    c.g = metric_at(st, p);
    c.phi = phi_at(st, p);
    const auto n = static_cast<Eigen::Index>(st.n());
    c.ambient = orthonormalize_columns(c.g, Mat::Identity(n, n));
    if (st.is_contact()) {
        c.xi = xi_at(st, p);
        c.xi_perp = orthogonal_complement(c.g, *c.xi / c.g.norm(*c.xi));
    } else {
        c.xi_perp = c.ambient;
    }
    try {
        c.slice = slice_at(dec, p, opts);
    } catch (const Error& e) {
        c.slice_error = e.what();
        return c;
    }
    const auto& s = *c.slice;
    Eigen::Index inv_cols = 0;
    for (const auto& comp : s.components)
        if (comp.invariant) inv_cols += comp.basis.cols();
    c.d0.resize(n, inv_cols);
    Eigen::Index col = 0;
    for (const auto& comp : s.components) {
        if (comp.invariant) {
            c.d0.middleCols(col, comp.basis.cols()) = comp.basis;
            col += comp.basis.cols();
        } else {
            c.proper.push_back(comp.basis);
            c.theta.push_back(comp.theta);
        }
    }
    c.dg.resize(n, s.d_basis.cols() + s.g_basis.cols());
    c.dg << s.d_basis, s.g_basis;
    if (c.xi) {
        c.dx.resize(n, s.d_basis.cols() + 1);
        c.dx << s.d_basis, *c.xi / c.g.norm(*c.xi);
    } else {
        c.dx = s.d_basis;
    }
    try {
        c.dual = dual_of(s, 1e-9, opts.invariant_tol);
        c.duals = c.dual->duals;
    } catch (const Error& e) {
        c.dual_error = e.what();
    }
    return c;
}

using IdentityEval = std::function<std::optional<double>(const IdentityContext&, Rng&)>;

struct IdentityCase {
    std::string key;
    std::string topic;
    std::string statement;
    Setting setting = Setting::any;
    Needs needs = Needs::slice;
    IdentityEval eval;
};

namespace ident {

using R = std::optional<double>;

inline double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

inline double relv(const IdentityContext& c, const Vec& a, const Vec& b) {
    return c.g.norm(a - b) / std::max({1.0, c.g.norm(a), c.g.norm(b)});
}

inline double chain(double a, double b, double d) { return std::max(rel(a, b), rel(b, d)); }

// Cosine of the angle between two vectors; empty when either is (numerically) zero.
inline std::optional<double> cosang(const IdentityContext& c, const Vec& a, const Vec& b) {
    const double na = c.g.norm(a);
    const double nb = c.g.norm(b);
    if (na < 1e-9 || nb < 1e-9) return std::nullopt;
    return c.g(a, b) / (na * nb);
}

inline R rel_cos(const IdentityContext& c, const Vec& a, const Vec& b, const Vec& x, const Vec& y) {
    const auto l = cosang(c, a, b);
    const auto r = cosang(c, x, y);
    if (!l || !r) return std::nullopt;
    return rel(*l, *r);
}

inline R chain_cos(const IdentityContext& c, const Vec& a1, const Vec& b1, const Vec& a2, const Vec& b2, const Vec& a3,
                   const Vec& b3) {
    const auto x = cosang(c, a1, b1);
    const auto y = cosang(c, a2, b2);
    const auto z = cosang(c, a3, b3);
    if (!x || !y || !z) return std::nullopt;
    return chain(*x, *y, *z);
}

inline Vec draw(Rng& rng, const Mat& basis) { return rng.unit_in(basis); }

// Random sum of one scaled unit vector per basis; parts receive the summands.
inline Vec draw_sum(Rng& rng, const std::vector<Mat>& bases, std::vector<Vec>& parts) {
    parts.clear();
    Vec sum = Vec::Zero(bases.front().rows());
    for (const auto& b : bases) {
        parts.push_back(rng.uniform(0.5, 1.5) * rng.unit_in(b));
        sum += parts.back();
    }
    return sum;
}

inline R max_of(R acc, R v) {
    if (!v) return acc;
    if (!acc) return v;
    return std::max(*acc, *v);
}

// Max over proper components of a per-component evaluator.
template <class Fn>
R per_component(const IdentityContext& c, Fn&& fn) {
    R out;
    for (std::size_t i = 0; i < c.proper.size(); ++i) out = max_of(out, fn(i));
    return out;
}

inline Vec component_sum(const std::vector<Vec>& parts, const std::vector<double>& weights) {
    Vec v = Vec::Zero(parts.front().size());
    for (std::size_t i = 0; i < parts.size(); ++i) v += weights[i] * parts[i];
    return v;
}

inline std::vector<double> map_theta(const IdentityContext& c, double (*fn)(double)) {
    std::vector<double> out;
    for (double t : c.theta) out.push_back(fn(t));
    return out;
}

inline double sin1(double t) { return std::sin(t); }
inline double sin2(double t) { return std::pow(std::sin(t), 2); }
inline double sin4(double t) { return std::pow(std::sin(t), 4); }
inline double cos2(double t) { return std::pow(std::cos(t), 2); }
inline double inv_sin(double t) { return 1.0 / std::sin(t); }
inline double inv_sin2(double t) { return 1.0 / std::pow(std::sin(t), 2); }

inline double span_angle(const IdentityContext& c, const Mat& image, const Mat& target) {
    const SubspaceBasis a(c.point, orthonormalize_columns(c.g, image), true);
    return max_principal_angle(c.g, a, SubspaceBasis(c.point, target, true));
}

inline double leak(const IdentityContext& c, const Vec& v, const Mat& basis) {
    return relv(c, v - c.pr(basis) * v, Vec::Zero(v.size()));
}

}  // namespace ident

// The full registry, in a fixed order.
inline const std::vector<IdentityCase>& identity_registry() {
    using namespace ident;
    using C = const IdentityContext&;
    static const std::vector<IdentityCase> cases = [] {
        std::vector<IdentityCase> v;
        auto add = [&](std::string key, std::string topic, std::string statement, Setting setting, Needs needs,
                       IdentityEval eval) {
            v.push_back({std::move(key), std::move(topic), std::move(statement), setting, needs, std::move(eval)});
        };
        const Setting any = Setting::any;
        const Setting con = Setting::contact;
        const Setting her = Setting::hermitian;
        const Needs st = Needs::structure;
        const Needs sl = Needs::slice;
        const Needs du = Needs::dual;

        // Structure axioms.
        add("compat.phi", "structure axioms", "g(phi X, Y) = eps g(X, phi Y)", any, st, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.ambient), y = draw(r, c.ambient);
            return rel(c.g(c.phi * x, y), c.eps * c.g(x, c.phi * y));
        });
        add("phi.square.contact", "structure axioms", "phi^2 X = eps (X - eta(X) xi)", con, st, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.ambient);
            return relv(c, c.phi * c.phi * x, c.eps * (x - c.eta(x) * *c.xi));
        });
        add("phi.square.hermitian", "structure axioms", "phi^2 X = eps X", her, st, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.ambient);
            return relv(c, c.phi * c.phi * x, c.eps * x);
        });
        add("phi.isometry.contact", "structure axioms", "g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y)", con, st,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.ambient), y = draw(r, c.ambient);
                return rel(c.g(c.phi * x, c.phi * y), c.g(x, y) - c.eta(x) * c.eta(y));
            });
        add("phi.isometry.hermitian", "structure axioms", "g(phi X, phi Y) = g(X, Y)", her, st, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.ambient), y = draw(r, c.ambient);
            return rel(c.g(c.phi * x, c.phi * y), c.g(x, y));
        });
        add("reeb.unit", "structure axioms", "g(xi, xi) = 1", con, st, [](C c, Rng&) -> R { return rel(c.g(*c.xi, *c.xi), 1.0); });
        add("reeb.kernel", "structure axioms", "phi xi = 0", con, st,
            [](C c, Rng&) -> R { return relv(c, c.phi * *c.xi, Vec::Zero(c.phi.rows())); });
        add("reeb.eta-phi", "structure axioms", "eta(phi X) = 0", con, st, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.ambient);
            return rel(c.eta(c.phi * x), 0.0);
        });
        add("phi.norm", "structure axioms", "|phi X| = |X| and phi^2 X = eps X for X orthogonal to xi", any, st,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.xi_perp);
                return std::max(rel(c.g.norm(c.phi * x), c.g.norm(x)), relv(c, c.phi * c.phi * x, c.eps * x));
            });

        // Adjointness of f and w.
        add("adj.f", "adjointness", "g(X, fY) = eps g(fX, Y) for X, Y in D", any, sl, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.s().d_basis), y = draw(r, c.s().d_basis);
            return rel(c.g(x, c.f() * y), c.eps * c.g(c.f() * x, y));
        });
        add("adj.fw", "adjointness", "g(X, fU) = eps g(wX, U) for X in D, U in D^perp", any, sl, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.s().d_basis), u = draw(r, c.s().dperp_basis);
            return rel(c.g(x, c.f() * u), c.eps * c.g(c.w() * x, u));
        });
        add("adj.w", "adjointness", "g(U, wV) = eps g(wU, V) for U, V in D^perp", any, sl, [](C c, Rng& r) -> R {
            const Vec u = draw(r, c.s().dperp_basis), w = draw(r, c.s().dperp_basis);
            return rel(c.g(u, c.w() * w), c.eps * c.g(c.w() * u, w));
        });

        // Second-order relations.
        add("sq.ff", "second-order relations", "g(f^2 X, Y) = eps g(fX, fY) = g(X, f^2 Y) for X, Y in D", any, sl,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis), y = draw(r, c.s().d_basis);
                const Mat& f = c.f();
                return chain(c.g(f * f * x, y), c.eps * c.g(f * x, f * y), c.g(x, f * f * y));
            });
        add("sq.fw", "second-order relations", "g(fwX, Y) = eps g(wX, wY) = g(X, fwY) for X, Y in D", any, sl,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis), y = draw(r, c.s().d_basis);
                const Mat& f = c.f();
                const Mat& w = c.w();
                return chain(c.g(f * w * x, y), c.eps * c.g(w * x, w * y), c.g(x, f * w * y));
            });
        add("sq.wf", "second-order relations", "g(wfU, V) = eps g(fU, fV) = g(U, wfV) for U, V in D^perp", any, sl,
            [](C c, Rng& r) -> R {
                const Vec u = draw(r, c.s().dperp_basis), y = draw(r, c.s().dperp_basis);
                const Mat& f = c.f();
                const Mat& w = c.w();
                return chain(c.g(w * f * u, y), c.eps * c.g(f * u, f * y), c.g(u, w * f * y));
            });
        add("sq.ww", "second-order relations", "g(w^2 U, V) = eps g(wU, wV) = g(U, w^2 V) for U, V in D^perp", any, sl,
            [](C c, Rng& r) -> R {
                const Vec u = draw(r, c.s().dperp_basis), y = draw(r, c.s().dperp_basis);
                const Mat& w = c.w();
                return chain(c.g(w * w * u, y), c.eps * c.g(w * u, w * y), c.g(u, w * w * y));
            });
        add("sq.mixed-wf", "second-order relations", "g(wfX, U) = eps g(fX, fU) = g(X, f^2 U) for X in D, U in D^perp",
            any, sl, [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis), u = draw(r, c.s().dperp_basis);
                const Mat& f = c.f();
                const Mat& w = c.w();
                return chain(c.g(w * f * x, u), c.eps * c.g(f * x, f * u), c.g(x, f * f * u));
            });
        add("sq.mixed-ww", "second-order relations", "g(w^2 X, U) = eps g(wX, wU) = g(X, fwU) for X in D, U in D^perp",
            any, sl, [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis), u = draw(r, c.s().dperp_basis);
                const Mat& f = c.f();
                const Mat& w = c.w();
                return chain(c.g(w * w * x, u), c.eps * c.g(w * x, w * u), c.g(x, f * w * u));
            });

        // phi^2 split along D and G.
        add("split.d.f", "phi^2 split", "f^2 X + fwX = eps (X - eta(X) xi) for X in D + <xi>", any, sl, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.dx);
            const Vec target = c.xi ? Vec(c.eps * (x - c.eta(x) * *c.xi)) : Vec(c.eps * x);
            return relv(c, c.f() * c.f() * x + c.f() * c.w() * x, target);
        });
        add("split.d.w", "phi^2 split", "wfX + w^2 X = 0 for X in D + <xi>", any, sl, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.dx);
            return relv(c, c.w() * c.f() * x + c.w() * c.w() * x, Vec::Zero(x.size()));
        });
        add("split.g.f", "phi^2 split", "f^2 U + fwU = 0 for U in G", any, sl, [](C c, Rng& r) -> R {
            if (c.s().g_basis.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.s().g_basis);
            return relv(c, c.f() * c.f() * u + c.f() * c.w() * u, Vec::Zero(u.size()));
        });
        add("split.g.w", "phi^2 split", "wfU + w^2 U = eps U for U in G", any, sl, [](C c, Rng& r) -> R {
            if (c.s().g_basis.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.s().g_basis);
            return relv(c, c.w() * c.f() * u + c.w() * c.w() * u, c.eps * u);
        });

        // Spectral form of f^2 and fw on D.
        add("spec.f2", "spectral form", "f^2 X = eps sum_i cos^2(theta_i) pr_i X for X in D (theta_0 = 0)", any, sl,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis);
                Vec rhs = Vec::Zero(x.size());
                for (const auto& comp : c.s().components) rhs += std::pow(std::cos(comp.theta), 2) * (c.pr(comp.basis) * x);
                return relv(c, c.f() * c.f() * x, c.eps * rhs);
            });
        add("spec.fw", "spectral form", "fwX = eps sum_i sin^2(theta_i) pr_i X for X in D", any, sl, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.s().d_basis);
            Vec rhs = Vec::Zero(x.size());
            for (std::size_t i = 0; i < c.proper.size(); ++i) rhs += sin2(c.theta[i]) * (c.pr(c.proper[i]) * x);
            return relv(c, c.f() * c.w() * x, c.eps * rhs);
        });
        add("spec.eigen", "spectral form", "lambda_i = eps cos^2(theta_i) on each component", any, sl, [](C c, Rng&) -> R {
            R out;
            for (const auto& comp : c.s().components) out = max_of(out, rel(comp.lambda, c.eps * cos2(comp.theta)));
            return out;
        });

        // Metric relations on D.
        add("metric.phi", "metric relations on D", "g(phi X, phi Y) = sum_i g(pr_i X, pr_i Y) for X, Y in D", any, sl,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis), y = draw(r, c.s().d_basis);
                double rhs = 0.0;
                for (const auto& comp : c.s().components) rhs += c.g(c.pr(comp.basis) * x, c.pr(comp.basis) * y);
                return rel(c.g(c.phi * x, c.phi * y), rhs);
            });
        add("metric.f", "metric relations on D", "g(fX, fY) = sum_i cos^2(theta_i) g(pr_i X, pr_i Y) for X, Y in D", any, sl,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis), y = draw(r, c.s().d_basis);
                double rhs = 0.0;
                for (const auto& comp : c.s().components)
                    rhs += cos2(comp.theta) * c.g(c.pr(comp.basis) * x, c.pr(comp.basis) * y);
                return rel(c.g(c.f() * x, c.f() * y), rhs);
            });
        add("metric.w", "metric relations on D", "g(wX, wY) = sum_i sin^2(theta_i) g(pr_i X, pr_i Y) for X, Y in D", any, sl,
            [](C c, Rng& r) -> R {
                const Vec x = draw(r, c.s().d_basis), y = draw(r, c.s().d_basis);
                double rhs = 0.0;
                for (std::size_t i = 0; i < c.proper.size(); ++i)
                    rhs += sin2(c.theta[i]) * c.g(c.pr(c.proper[i]) * x, c.pr(c.proper[i]) * y);
                return rel(c.g(c.w() * x, c.w() * y), rhs);
            });

        // Norm relations on D.
        add("norm.f-phi", "norm relations on D", "|fX_i| = cos(theta_i) |phi X_i|", any, sl, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec x = draw(r, c.proper[i]);
                return rel(c.g.norm(c.f() * x), std::cos(c.theta[i]) * c.g.norm(c.phi * x));
            });
        });
        add("norm.w", "norm relations on D", "|wX_i| = sin(theta_i) |X_i|", any, sl, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec x = draw(r, c.proper[i]);
                return rel(c.g.norm(c.w() * x), std::sin(c.theta[i]) * c.g.norm(x));
            });
        });
        add("norm.f-sum", "norm relations on D", "|fX|^2 = sum_i cos^2(theta_i) |X_i|^2 for X = sum_i X_i in D", any, sl,
            [](C c, Rng& r) -> R {
                std::vector<Mat> bases;
                std::vector<double> cs;
                for (const auto& comp : c.s().components) {
                    bases.push_back(comp.basis);
                    cs.push_back(cos2(comp.theta));
                }
                std::vector<Vec> parts;
                const Vec x = draw_sum(r, bases, parts);
                double rhs = 0.0;
                for (std::size_t i = 0; i < parts.size(); ++i) rhs += cs[i] * c.g(parts[i], parts[i]);
                return rel(c.g(c.f() * x, c.f() * x), rhs);
            });
        add("norm.w-sum", "norm relations on D", "|wX|^2 = sum_i sin^2(theta_i) |X_i|^2 for X = sum_i X_i, i >= 1", any, sl,
            [](C c, Rng& r) -> R {
                if (c.proper.empty()) return std::nullopt;
                std::vector<Vec> parts;
                const Vec x = draw_sum(r, c.proper, parts);
                double rhs = 0.0;
                for (std::size_t i = 0; i < parts.size(); ++i) rhs += sin2(c.theta[i]) * c.g(parts[i], parts[i]);
                return rel(c.g(c.w() * x, c.w() * x), rhs);
            });

        // Dual distribution.
        add("dual.wf", "dual distribution", "wfU = eps sum_i sin^2(theta_i) U_i for U = sum_i U_i in w(D)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> parts;
                const Vec u = draw_sum(r, c.duals, parts);
                return relv(c, c.w() * c.f() * u, c.eps * component_sum(parts, map_theta(c, sin2)));
            });
        add("dual.ww", "dual distribution", "w^2 U = eps sum_i cos^2(theta_i) U_i for U = sum_i U_i in w(D)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> parts;
                const Vec u = draw_sum(r, c.duals, parts);
                return relv(c, c.w() * c.w() * u, c.eps * component_sum(parts, map_theta(c, cos2)));
            });
        add("dual.w2-image", "dual distribution", "w^2(D_i) = w(D_i) if theta_i != pi/2, else w^2(D_i) = 0", any, du,
            [](C c, Rng& r) -> R {
                return per_component(c, [&](std::size_t i) -> R {
                    if (c.perp(i)) return relv(c, c.w() * c.w() * draw(r, c.proper[i]), Vec::Zero(c.phi.rows()));
                    return span_angle(c, c.w() * c.w() * c.proper[i], c.duals[i]);
                });
            });
        add("dual.metric.w", "dual distribution", "g(wU, wV) = sum_i cos^2(theta_i) g(U_i, V_i) for U, V in w(D)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> up, vp;
                const Vec u = draw_sum(r, c.duals, up);
                const Vec w = draw_sum(r, c.duals, vp);
                double rhs = 0.0;
                for (std::size_t i = 0; i < up.size(); ++i) rhs += cos2(c.theta[i]) * c.g(up[i], vp[i]);
                return rel(c.g(c.w() * u, c.w() * w), rhs);
            });
        add("dual.metric.phi", "dual distribution", "g(phi U, phi V) = sum_i g(U_i, V_i) for U, V in w(D)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> up, vp;
                const Vec u = draw_sum(r, c.duals, up);
                const Vec w = draw_sum(r, c.duals, vp);
                double rhs = 0.0;
                for (std::size_t i = 0; i < up.size(); ++i) rhs += c.g(up[i], vp[i]);
                return rel(c.g(c.phi * u, c.phi * w), rhs);
            });
        add("dual.norm.w-sum", "dual distribution", "|wU|^2 = sum_i cos^2(theta_i) |U_i|^2 for U in w(D)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> parts;
                const Vec u = draw_sum(r, c.duals, parts);
                double rhs = 0.0;
                for (std::size_t i = 0; i < parts.size(); ++i) rhs += cos2(c.theta[i]) * c.g(parts[i], parts[i]);
                return rel(c.g(c.w() * u, c.w() * u), rhs);
            });
        add("dual.norm.f", "dual distribution", "|fU_i| = sin(theta_i) |U_i| for U_i in w(D_i)", any, du, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec u = draw(r, c.duals[i]);
                return rel(c.g.norm(c.f() * u), std::sin(c.theta[i]) * c.g.norm(u));
            });
        });
        add("dual.norm.f-sum", "dual distribution", "|fU|^2 = sum_i sin^2(theta_i) |U_i|^2 for U in w(D)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> parts;
                const Vec u = draw_sum(r, c.duals, parts);
                double rhs = 0.0;
                for (std::size_t i = 0; i < parts.size(); ++i) rhs += sin2(c.theta[i]) * c.g(parts[i], parts[i]);
                return rel(c.g(c.f() * u, c.f() * u), rhs);
            });
        add("dual.norm.w", "dual distribution", "|wU_i| = cos(theta_i) |U_i| for U_i in w(D_i)", any, du, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec u = draw(r, c.duals[i]);
                return rel(c.g.norm(c.w() * u), std::cos(c.theta[i]) * c.g.norm(u));
            });
        });
        add("dual.fw-span", "dual distribution", "f(w(D_i)) = D_i", any, du, [](C c, Rng&) -> R {
            return per_component(c, [&](std::size_t i) -> R { return span_angle(c, c.f() * c.duals[i], c.proper[i]); });
        });
        add("dual.wf-span", "dual distribution", "w(f(w(D_i))) = w(D_i)", any, du, [](C c, Rng&) -> R {
            return per_component(c, [&](std::size_t i) -> R { return span_angle(c, c.w() * c.f() * c.duals[i], c.duals[i]); });
        });
        add("dual.f2-span", "dual distribution", "f^2(w(D_i)) = D_i if theta_i != pi/2, else f^2(w(D_i)) = 0", any, du,
            [](C c, Rng& r) -> R {
                return per_component(c, [&](std::size_t i) -> R {
                    if (c.perp(i)) return relv(c, c.f() * c.f() * draw(r, c.duals[i]), Vec::Zero(c.phi.rows()));
                    return span_angle(c, c.f() * c.f() * c.duals[i], c.proper[i]);
                });
            });
        add("dual.f-image", "dual distribution", "f(G) lies in D_1 + ... + D_k", any, du, [](C c, Rng& r) -> R {
            if (c.s().g_basis.cols() == 0 || c.proper.empty()) return std::nullopt;
            Mat all(c.phi.rows(), 0);
            for (const auto& b : c.proper) {
                Mat next(all.rows(), all.cols() + b.cols());
                next << all, b;
                all = next;
            }
            return leak(c, c.f() * draw(r, c.s().g_basis), all);
        });
        add("dual.g-sum", "dual distribution", "G = w(D_1) + ... + w(D_k) + H orthogonally, f(H) = 0", any, du, [](C c, Rng&) -> R {
            Mat p = c.pr(c.s().g_basis) - c.pr(c.dual->h);
            for (const auto& u : c.duals) p -= c.pr(u);
            return std::max({p.cwiseAbs().maxCoeff(), c.dual->f_h_residual, c.dual->orthogonality_residual});
        });

        // Angle preservation.
        add("angle.d0.f", "angle preservation", "cos(fX_0, fY_0) = cos(phi X_0, phi Y_0) = cos(X_0, Y_0) on D_0", any, sl,
            [](C c, Rng& r) -> R {
                if (c.d0.cols() == 0) return std::nullopt;
                const Vec x = draw(r, c.d0), y = draw(r, c.d0);
                return chain_cos(c, c.f() * x, c.f() * y, c.phi * x, c.phi * y, x, y);
            });
        add("angle.di.f", "angle preservation",
            "cos(fX_i, fY_i) = cos(phi X_i, phi Y_i) = cos(X_i, Y_i) for theta_i != pi/2", any, sl, [](C c, Rng& r) -> R {
                return per_component(c, [&](std::size_t i) -> R {
                    if (c.perp(i)) return std::nullopt;
                    const Vec x = draw(r, c.proper[i]), y = draw(r, c.proper[i]);
                    return chain_cos(c, c.f() * x, c.f() * y, c.phi * x, c.phi * y, x, y);
                });
            });
        add("angle.dual.w-metric", "angle preservation", "g(wU_i, wV_i) = cos^2(theta_i) g(U_i, V_i)", any, du,
            [](C c, Rng& r) -> R {
                return per_component(c, [&](std::size_t i) -> R {
                    const Vec u = draw(r, c.duals[i]), w = draw(r, c.duals[i]);
                    return rel(c.g(c.w() * u, c.w() * w), cos2(c.theta[i]) * c.g(u, w));
                });
            });
        add("angle.h.w", "angle preservation", "cos(wU_0, wV_0) = cos(U_0, V_0) = cos(phi U_0, phi V_0) on H", any, du,
            [](C c, Rng& r) -> R {
                if (c.dual->h.cols() == 0) return std::nullopt;
                const Vec u = draw(r, c.dual->h), w = draw(r, c.dual->h);
                return chain_cos(c, c.w() * u, c.w() * w, u, w, c.phi * u, c.phi * w);
            });
        add("angle.dual.w", "angle preservation",
            "cos(wU_i, wV_i) = cos(U_i, V_i) = cos(phi U_i, phi V_i) for theta_i != pi/2", any, du, [](C c, Rng& r) -> R {
                return per_component(c, [&](std::size_t i) -> R {
                    if (c.perp(i)) return std::nullopt;
                    const Vec u = draw(r, c.duals[i]), w = draw(r, c.duals[i]);
                    return chain_cos(c, c.w() * u, c.w() * w, u, w, c.phi * u, c.phi * w);
                });
            });
        add("angle.phi", "angle preservation", "cos(phi X, phi Y) = cos(X, Y) for X, Y in D + G", any, sl, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.dg), y = draw(r, c.dg);
            return rel_cos(c, c.phi * x, c.phi * y, x, y);
        });

        // Component-wise duality.
        add("comp.w-metric", "component duality", "g(wX_i, wY_i) = sin^2(theta_i) g(X_i, Y_i)", any, sl, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec x = draw(r, c.proper[i]), y = draw(r, c.proper[i]);
                return rel(c.g(c.w() * x, c.w() * y), sin2(c.theta[i]) * c.g(x, y));
            });
        });
        add("comp.f-metric", "component duality", "g(fU_i, fV_i) = sin^2(theta_i) g(U_i, V_i)", any, du, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec u = draw(r, c.duals[i]), w = draw(r, c.duals[i]);
                return rel(c.g(c.f() * u, c.f() * w), sin2(c.theta[i]) * c.g(u, w));
            });
        });
        add("comp.w-angle", "component duality", "cos(wX_i, wY_i) = cos(X_i, Y_i)", any, sl, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec x = draw(r, c.proper[i]), y = draw(r, c.proper[i]);
                return rel_cos(c, c.w() * x, c.w() * y, x, y);
            });
        });
        add("comp.f-angle", "component duality", "cos(fU_i, fV_i) = cos(U_i, V_i)", any, du, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec u = draw(r, c.duals[i]), w = draw(r, c.duals[i]);
                return rel_cos(c, c.f() * u, c.f() * w, u, w);
            });
        });

        // Summed duality.
        add("sum.w-metric", "summed duality", "g(wX, wY) = sum_i sin^2(theta_i) g(X_i, Y_i)", any, sl, [](C c, Rng& r) -> R {
            if (c.proper.empty()) return std::nullopt;
            std::vector<Vec> xp, yp;
            const Vec x = draw_sum(r, c.proper, xp);
            const Vec y = draw_sum(r, c.proper, yp);
            double rhs = 0.0;
            for (std::size_t i = 0; i < xp.size(); ++i) rhs += sin2(c.theta[i]) * c.g(xp[i], yp[i]);
            return rel(c.g(c.w() * x, c.w() * y), rhs);
        });
        add("sum.f-metric", "summed duality", "g(fU, fV) = sum_i sin^2(theta_i) g(U_i, V_i)", any, du, [](C c, Rng& r) -> R {
            if (c.duals.empty()) return std::nullopt;
            std::vector<Vec> up, vp;
            const Vec u = draw_sum(r, c.duals, up);
            const Vec w = draw_sum(r, c.duals, vp);
            double rhs = 0.0;
            for (std::size_t i = 0; i < up.size(); ++i) rhs += sin2(c.theta[i]) * c.g(up[i], vp[i]);
            return rel(c.g(c.f() * u, c.f() * w), rhs);
        });
        add("sum.w-angle", "summed duality", "cos(wX, wY) = cos(sum_i sin(theta_i) X_i, sum_i sin(theta_i) Y_i)", any, sl,
            [](C c, Rng& r) -> R {
                if (c.proper.empty()) return std::nullopt;
                std::vector<Vec> xp, yp;
                const Vec x = draw_sum(r, c.proper, xp);
                const Vec y = draw_sum(r, c.proper, yp);
                const auto s = map_theta(c, sin1);
                return rel_cos(c, c.w() * x, c.w() * y, component_sum(xp, s), component_sum(yp, s));
            });
        add("sum.f-angle", "summed duality", "cos(fU, fV) = cos(sum_i sin(theta_i) U_i, sum_i sin(theta_i) V_i)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> up, vp;
                const Vec u = draw_sum(r, c.duals, up);
                const Vec w = draw_sum(r, c.duals, vp);
                const auto s = map_theta(c, sin1);
                return rel_cos(c, c.f() * u, c.f() * w, component_sum(up, s), component_sum(vp, s));
            });

        // Inverse forms.
        add("inv.d-metric", "inverse forms", "g(X, Y) = sum_i g(wX_i, wY_i) / sin^2(theta_i)", any, sl, [](C c, Rng& r) -> R {
            if (c.proper.empty()) return std::nullopt;
            std::vector<Vec> xp, yp;
            const Vec x = draw_sum(r, c.proper, xp);
            const Vec y = draw_sum(r, c.proper, yp);
            double rhs = 0.0;
            for (std::size_t i = 0; i < xp.size(); ++i) rhs += inv_sin2(c.theta[i]) * c.g(c.w() * xp[i], c.w() * yp[i]);
            return rel(c.g(x, y), rhs);
        });
        add("inv.g-metric", "inverse forms", "g(U, V) = sum_i g(fU_i, fV_i) / sin^2(theta_i)", any, du, [](C c, Rng& r) -> R {
            if (c.duals.empty()) return std::nullopt;
            std::vector<Vec> up, vp;
            const Vec u = draw_sum(r, c.duals, up);
            const Vec w = draw_sum(r, c.duals, vp);
            double rhs = 0.0;
            for (std::size_t i = 0; i < up.size(); ++i) rhs += inv_sin2(c.theta[i]) * c.g(c.f() * up[i], c.f() * vp[i]);
            return rel(c.g(u, w), rhs);
        });
        add("inv.d-angle", "inverse forms", "cos(X, Y) = cos(sum_i wX_i / sin(theta_i), sum_i wY_i / sin(theta_i))", any, sl,
            [](C c, Rng& r) -> R {
                if (c.proper.empty()) return std::nullopt;
                std::vector<Vec> xp, yp;
                const Vec x = draw_sum(r, c.proper, xp);
                const Vec y = draw_sum(r, c.proper, yp);
                for (auto& v : xp) v = c.w() * v;
                for (auto& v : yp) v = c.w() * v;
                const auto s = map_theta(c, inv_sin);
                return rel_cos(c, x, y, component_sum(xp, s), component_sum(yp, s));
            });
        add("inv.g-angle", "inverse forms", "cos(U, V) = cos(sum_i fU_i / sin(theta_i), sum_i fV_i / sin(theta_i))", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> up, vp;
                const Vec u = draw_sum(r, c.duals, up);
                const Vec w = draw_sum(r, c.duals, vp);
                for (auto& v : up) v = c.f() * v;
                for (auto& v : vp) v = c.f() * v;
                const auto s = map_theta(c, inv_sin);
                return rel_cos(c, u, w, component_sum(up, s), component_sum(vp, s));
            });

        // Fourth-power forms.
        add("quart.fw-metric", "fourth-power forms", "g(fwX_i, fwY_i) = sin^4(theta_i) g(X_i, Y_i)", any, sl,
            [](C c, Rng& r) -> R {
                return per_component(c, [&](std::size_t i) -> R {
                    const Vec x = draw(r, c.proper[i]), y = draw(r, c.proper[i]);
                    return rel(c.g(c.f() * c.w() * x, c.f() * c.w() * y), sin4(c.theta[i]) * c.g(x, y));
                });
            });
        add("quart.wf-metric", "fourth-power forms", "g(wfU_i, wfV_i) = sin^4(theta_i) g(U_i, V_i)", any, du,
            [](C c, Rng& r) -> R {
                return per_component(c, [&](std::size_t i) -> R {
                    const Vec u = draw(r, c.duals[i]), w = draw(r, c.duals[i]);
                    return rel(c.g(c.w() * c.f() * u, c.w() * c.f() * w), sin4(c.theta[i]) * c.g(u, w));
                });
            });
        add("quart.fw-angle", "fourth-power forms", "cos(fwX_i, fwY_i) = cos(X_i, Y_i)", any, sl, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec x = draw(r, c.proper[i]), y = draw(r, c.proper[i]);
                return rel_cos(c, c.f() * c.w() * x, c.f() * c.w() * y, x, y);
            });
        });
        add("quart.wf-angle", "fourth-power forms", "cos(wfU_i, wfV_i) = cos(U_i, V_i)", any, du, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                const Vec u = draw(r, c.duals[i]), w = draw(r, c.duals[i]);
                return rel_cos(c, c.w() * c.f() * u, c.w() * c.f() * w, u, w);
            });
        });
        add("quart.sum.fw-metric", "fourth-power forms", "g(fwX, fwY) = sum_i sin^4(theta_i) g(X_i, Y_i)", any, sl,
            [](C c, Rng& r) -> R {
                if (c.proper.empty()) return std::nullopt;
                std::vector<Vec> xp, yp;
                const Vec x = draw_sum(r, c.proper, xp);
                const Vec y = draw_sum(r, c.proper, yp);
                double rhs = 0.0;
                for (std::size_t i = 0; i < xp.size(); ++i) rhs += sin4(c.theta[i]) * c.g(xp[i], yp[i]);
                return rel(c.g(c.f() * c.w() * x, c.f() * c.w() * y), rhs);
            });
        add("quart.sum.wf-metric", "fourth-power forms", "g(wfU, wfV) = sum_i sin^4(theta_i) g(U_i, V_i)", any, du,
            [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> up, vp;
                const Vec u = draw_sum(r, c.duals, up);
                const Vec w = draw_sum(r, c.duals, vp);
                double rhs = 0.0;
                for (std::size_t i = 0; i < up.size(); ++i) rhs += sin4(c.theta[i]) * c.g(up[i], vp[i]);
                return rel(c.g(c.w() * c.f() * u, c.w() * c.f() * w), rhs);
            });
        add("quart.sum.fw-angle", "fourth-power forms",
            "cos(fwX, fwY) = cos(sum_i sin^2(theta_i) X_i, sum_i sin^2(theta_i) Y_i)", any, sl, [](C c, Rng& r) -> R {
                if (c.proper.empty()) return std::nullopt;
                std::vector<Vec> xp, yp;
                const Vec x = draw_sum(r, c.proper, xp);
                const Vec y = draw_sum(r, c.proper, yp);
                const auto s = map_theta(c, sin2);
                return rel_cos(c, c.f() * c.w() * x, c.f() * c.w() * y, component_sum(xp, s), component_sum(yp, s));
            });
        add("quart.sum.wf-angle", "fourth-power forms",
            "cos(wfU, wfV) = cos(sum_i sin^2(theta_i) U_i, sum_i sin^2(theta_i) V_i)", any, du, [](C c, Rng& r) -> R {
                if (c.duals.empty()) return std::nullopt;
                std::vector<Vec> up, vp;
                const Vec u = draw_sum(r, c.duals, up);
                const Vec w = draw_sum(r, c.duals, vp);
                const auto s = map_theta(c, sin2);
                return rel_cos(c, c.w() * c.f() * u, c.w() * c.f() * w, component_sum(up, s), component_sum(vp, s));
            });

        // The invariant remainder H of G.
        add("h.ww", "remainder H", "w^2 U_0 = eps U_0 for U_0 in H", any, du, [](C c, Rng& r) -> R {
            if (c.dual->h.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.dual->h);
            return relv(c, c.w() * c.w() * u, c.eps * u);
        });
        add("h.w-metric", "remainder H", "g(wU_0, wV_0) = g(U_0, V_0) for U_0, V_0 in H", any, du, [](C c, Rng& r) -> R {
            if (c.dual->h.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.dual->h), w = draw(r, c.dual->h);
            return rel(c.g(c.w() * u, c.w() * w), c.g(u, w));
        });
        add("h.w-norm", "remainder H", "|wU_0| = |U_0| for U_0 in H", any, du, [](C c, Rng& r) -> R {
            if (c.dual->h.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.dual->h);
            return rel(c.g.norm(c.w() * u), c.g.norm(u));
        });
        add("h.f-null", "remainder H", "fU_0 = 0 for U_0 in H", any, du, [](C c, Rng& r) -> R {
            if (c.dual->h.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.dual->h);
            return relv(c, c.f() * u, Vec::Zero(u.size()));
        });
        add("h.phi-image", "remainder H", "phi(H) = w(H) = H", any, du, [](C c, Rng& r) -> R {
            if (c.dual->h.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.dual->h);
            return std::max(leak(c, c.phi * u, c.dual->h), relv(c, c.phi * u, c.w() * u));
        });

        // Components with slant angle pi/2.
        add("perp.fw", "right-angle components", "fwX_j = eps X_j when theta_j = pi/2", any, sl, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                if (!c.perp(i)) return std::nullopt;
                const Vec x = draw(r, c.proper[i]);
                return relv(c, c.f() * c.w() * x, c.eps * x);
            });
        });
        add("perp.wf", "right-angle components", "wfU_j = eps U_j when theta_j = pi/2", any, du, [](C c, Rng& r) -> R {
            return per_component(c, [&](std::size_t i) -> R {
                if (!c.perp(i)) return std::nullopt;
                const Vec u = draw(r, c.duals[i]);
                return relv(c, c.w() * c.f() * u, c.eps * u);
            });
        });

        // Contact-like specifics.
        add("contact.phi-dg", "contact-like complement", "phi(D + G) = D + G", con, sl, [](C c, Rng& r) -> R {
            return leak(c, c.phi * draw(r, c.dg), c.dg);
        });
        add("contact.g-perp-xi", "contact-like complement", "eta(U) = 0 for U in G", con, sl, [](C c, Rng& r) -> R {
            if (c.s().g_basis.cols() == 0) return std::nullopt;
            return rel(c.eta(draw(r, c.s().g_basis)), 0.0);
        });

        // The decomposition itself.
        add("decomp.f-inv", "decomposition", "f(D_i) lies in D_i", any, sl, [](C c, Rng& r) -> R {
            R out;
            for (const auto& comp : c.s().components) out = max_of(out, leak(c, c.f() * draw(r, comp.basis), comp.basis));
            return out;
        });
        add("decomp.f-onto", "decomposition", "f(D_i) = D_i when theta_i != pi/2", any, sl, [](C c, Rng&) -> R {
            R out;
            for (const auto& comp : c.s().components)
                if (std::abs(comp.theta - std::numbers::pi / 2) > 1e-6)
                    out = max_of(out, span_angle(c, c.f() * comp.basis, comp.basis));
            return out;
        });
        add("decomp.d0-phi", "decomposition", "phi(D_0) = D_0", any, sl, [](C c, Rng& r) -> R {
            if (c.d0.cols() == 0) return std::nullopt;
            return leak(c, c.phi * draw(r, c.d0), c.d0);
        });
        add("decomp.phi-orth", "decomposition", "phi(D_i) is orthogonal to D_j for i != j", any, sl, [](C c, Rng& r) -> R {
            if (c.proper.size() < 2) return std::nullopt;
            R out;
            for (std::size_t i = 0; i < c.proper.size(); ++i)
                for (std::size_t j = 0; j < c.proper.size(); ++j)
                    if (i != j) out = max_of(out, rel(c.g(c.phi * draw(r, c.proper[i]), draw(r, c.proper[j])), 0.0));
            return out;
        });
        add("decomp.w-orth", "decomposition", "w(D_i) is orthogonal to w(D_j) for i != j", any, sl, [](C c, Rng& r) -> R {
            if (c.proper.size() < 2) return std::nullopt;
            R out;
            for (std::size_t i = 0; i < c.proper.size(); ++i)
                for (std::size_t j = i + 1; j < c.proper.size(); ++j)
                    out = max_of(out, rel(c.g(c.w() * draw(r, c.proper[i]), c.w() * draw(r, c.proper[j])), 0.0));
            return out;
        });
        add("decomp.phi-d", "decomposition", "f(phi X) = eps X and w(phi X) = 0 for X in D", any, sl, [](C c, Rng& r) -> R {
            const Vec x = draw(r, c.s().d_basis);
            return std::max(relv(c, c.f() * c.phi * x, c.eps * x), relv(c, c.w() * c.phi * x, Vec::Zero(x.size())));
        });
        add("decomp.phi-g", "decomposition", "f(phi U) = 0 and w(phi U) = eps U for U in G", any, sl, [](C c, Rng& r) -> R {
            if (c.s().g_basis.cols() == 0) return std::nullopt;
            const Vec u = draw(r, c.s().g_basis);
            return std::max(relv(c, c.f() * c.phi * u, Vec::Zero(u.size())), relv(c, c.w() * c.phi * u, c.eps * u));
        });
        return v;
    }();
    return cases;
}

}  // namespace slantkit
