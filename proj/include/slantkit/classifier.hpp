#pragma once

// Slant spectra of f^2 on D and the taxonomy built on them. All constancy and
// distinctness verdicts are decided on the sampled points only.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "slantkit/distribution.hpp"
#include "slantkit/parallel.hpp"
#include "slantkit/tolerances.hpp"

namespace slantkit {

struct SpectrumCluster {
    double lambda = 0.0;
    double alpha = 0.0;  // cos(theta)
    double theta = 0.0;
    std::size_t multiplicity = 0;
    Mat eigenbasis;  // g-orthonormal columns in ambient coordinates
};

struct SlantSpectrum {
    AmbientPoint point;
    std::vector<SpectrumCluster> clusters;  // ascending theta
};

inline SlantSpectrum spectrum_of(const DecompositionSlice& s, double cluster_tol) {
    SlantSpectrum out{s.point, {}};
    if (s.f2.rows() == 0) return out;
    const auto eig = sym_eigen(s.f2);
    for (const auto& cl : cluster_eigenvalues(eig.values, cluster_tol)) {
        const auto len = static_cast<Eigen::Index>(cl.end - cl.begin);
        SpectrumCluster c;
        c.lambda = eig.values.segment(static_cast<Eigen::Index>(cl.begin), len).mean();
        require_lambda_range(c.lambda, s.epsilon, s.point);
        c.eigenbasis = s.d_basis * eig.vectors.middleCols(static_cast<Eigen::Index>(cl.begin), len);
        c.theta = slant_angle_of(s, c.eigenbasis);
        c.alpha = std::cos(c.theta);
        c.multiplicity = static_cast<std::size_t>(len);
        out.clusters.push_back(std::move(c));
    }
    std::stable_sort(out.clusters.begin(), out.clusters.end(),
                     [](const SpectrumCluster& a, const SpectrumCluster& b) { return a.theta < b.theta; });
    return out;
}

inline SlantSpectrum slant_spectrum(const Decomposition& dec, const AmbientPoint& p, double cluster_tol = 1e-8) {
    return spectrum_of(detail::core_slice(dec, p).slice, cluster_tol);
}

enum class ComponentKind { invariant, slant, pointwise_slant, degenerate };

inline std::string to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::invariant: return "invariant";
        case ComponentKind::slant: return "slant";
        case ComponentKind::pointwise_slant: return "pointwise-slant";
        case ComponentKind::degenerate: return "degenerate";
    }
    return "?";
}

struct ComponentSummary {
    std::string name;
    bool declared_invariant = false;
    ComponentKind kind = ComponentKind::slant;
    std::size_t rank = 0;
    std::vector<double> theta;   // per sample point
    std::vector<double> lambda;  // per sample point
    std::optional<std::size_t> group;

    [[nodiscard]] double theta_min() const { return *std::min_element(theta.begin(), theta.end()); }
    [[nodiscard]] double theta_max() const { return *std::max_element(theta.begin(), theta.end()); }
};

struct Verdict {
    bool holds = false;
    std::string evidence;
    std::optional<Vec> witness;
};

namespace labels {
inline constexpr const char* k_slant = "k-slant";
inline constexpr const char* k_pointwise_slant = "k-pointwise-slant";
inline constexpr const char* pointwise_k_slant = "pointwise-k-slant";
inline constexpr const char* generic = "generic";
inline constexpr const char* skew_cr = "skew-CR";
inline constexpr const char* cr = "CR";
inline constexpr const char* proper = "proper";
inline constexpr const char* slant = "slant";
inline constexpr const char* anti_invariant = "anti-invariant";
inline constexpr const char* semi_invariant = "semi-invariant";
inline constexpr const char* semi_slant = "semi-slant";
inline constexpr const char* bi_slant = "bi-slant";
inline constexpr const char* hemi_slant = "hemi-slant";
inline constexpr const char* almost_bi_slant = "almost-bi-slant";
inline constexpr const char* pointwise_semi_slant = "pointwise semi-slant";
inline constexpr const char* pointwise_bi_slant = "pointwise bi-slant";
inline constexpr const char* pointwise_hemi_slant = "pointwise hemi-slant";

inline const std::vector<std::string>& all() {
    static const std::vector<std::string> names{
        k_slant,    k_pointwise_slant, pointwise_k_slant, generic,          skew_cr,          cr,
        proper,     slant,             anti_invariant,    semi_invariant,   semi_slant,       bi_slant,
        hemi_slant, almost_bi_slant,   pointwise_semi_slant, pointwise_bi_slant, pointwise_hemi_slant};
    return names;
}
}  // namespace labels

struct ClassificationReport {
    bool discovery = false;
    Tolerances tol;
    std::vector<AmbientPoint> points;
    std::vector<SlantSpectrum> spectra;
    std::vector<ComponentSummary> components;      // invariant part first, then ascending theta at the first point
    std::vector<std::vector<std::size_t>> groups;  // joined proper components (indices into components)
    bool invariant_part = false;
    double f_invariance_defect = 0.0;
    std::map<std::string, Verdict> verdicts;
    std::vector<std::string> notes;

    [[nodiscard]] std::size_t k() const noexcept { return groups.size(); }
    [[nodiscard]] bool holds(const std::string& label) const {
        const auto it = verdicts.find(label);
        return it != verdicts.end() && it->second.holds;
    }
    [[nodiscard]] std::vector<std::string> holding_labels() const {
        std::vector<std::string> out;
        for (const auto& name : labels::all())
            if (holds(name)) out.push_back(name);
        return out;
    }
};

// Implications every report must respect; returns the violated ones.
inline std::vector<std::string> lattice_violations(const ClassificationReport& r) {
    std::vector<std::string> out;
    auto implies = [&](const char* a, const char* b) {
        if (r.holds(a) && !r.holds(b)) out.push_back(std::string(a) + " without " + b);
    };
    implies(labels::pointwise_k_slant, labels::k_pointwise_slant);
    implies(labels::generic, labels::pointwise_k_slant);
    implies(labels::k_slant, labels::k_pointwise_slant);
    implies(labels::k_slant, labels::pointwise_k_slant);
    return out;
}

namespace detail {

inline std::string fmt(double v) { return ast::format_number(v); }

inline std::string point_text(const Vec& p) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt(p(i));
    return s + ")";
}

inline double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace detail

inline ClassificationReport classify(const Decomposition& dec, const std::vector<AmbientPoint>& points,
                                     const Tolerances& tol = {}) {
    if (points.size() < 2) throw ArgumentError("classification needs at least two sample points");
    ClassificationReport rep;
    rep.discovery = dec.is_discovery();
    rep.tol = tol;
    rep.points = points;
    const std::size_t np = points.size();
    const SliceOptions opts{tol.cluster, tol.angle_const};

    std::vector<DecompositionSlice> slices(np);
    rep.spectra.resize(np);
    parallel_for(np, [&](std::size_t i) {
        slices[i] = slice_at(dec, points[i], opts);
        rep.spectra[i] = spectrum_of(slices[i], tol.cluster);
    });
    for (std::size_t i = 0; i < np; ++i) {
        const double defect = f_invariance_defect(slices[i]);
        if (defect > rep.f_invariance_defect) rep.f_invariance_defect = defect;
        if (defect > tol.structure)
            throw ModelError("decomposition is not f-invariant (defect " + detail::fmt(defect) + " at " +
                             detail::point_text(points[i].coords()) + ")");
    }

    std::vector<std::string> problems;
    std::optional<Vec> problem_witness;
    auto problem = [&](std::string text, const Vec& at) {
        if (!problem_witness) problem_witness = at;
        problems.push_back(std::move(text));
    };

    // Component table: declared components, or eigen-clusters tracked by rank.
    bool consistent = true;
    const std::size_t nc = slices[0].components.size();
    for (std::size_t i = 1; i < np && consistent; ++i) {
        if (slices[i].components.size() != nc) {
            consistent = false;
        } else {
            for (std::size_t c = 0; c < nc; ++c)
                if (slices[i].components[c].rank() != slices[0].components[c].rank()) consistent = false;
        }
        if (!consistent)
            problem("eigenspace decomposition changes between " + detail::point_text(points[0].coords()) + " and " +
                        detail::point_text(points[i].coords()),
                    points[i].coords());
    }
    if (consistent) {
        for (std::size_t c = 0; c < nc; ++c) {
            ComponentSummary cs;
            cs.name = slices[0].components[c].name;
            cs.declared_invariant = slices[0].components[c].invariant && !rep.discovery;
            cs.rank = slices[0].components[c].rank();
            for (const auto& s : slices) {
                cs.theta.push_back(s.components[c].theta);
                cs.lambda.push_back(s.components[c].lambda);
            }
            const double lo = cs.theta_min();
            const double hi = cs.theta_max();
            if (hi <= tol.angle_const) {
                cs.kind = ComponentKind::invariant;
            } else if (hi - lo <= tol.angle_const) {
                cs.kind = ComponentKind::slant;
            } else if (lo > tol.angle_const) {
                cs.kind = ComponentKind::pointwise_slant;
            } else {
                cs.kind = ComponentKind::degenerate;
            }
            rep.components.push_back(std::move(cs));
        }
        std::stable_sort(rep.components.begin(), rep.components.end(), [](const auto& a, const auto& b) {
            const bool ia = a.declared_invariant || a.kind == ComponentKind::invariant;
            const bool ib = b.declared_invariant || b.kind == ComponentKind::invariant;
            if (ia != ib) return ia;
            return a.theta.front() < b.theta.front();
        });
    }

    for (std::size_t c = 0; c < rep.components.size(); ++c) {
        auto& cs = rep.components[c];
        const auto worst = static_cast<std::size_t>(std::max_element(cs.theta.begin(), cs.theta.end()) - cs.theta.begin());
        if (cs.declared_invariant) {
            rep.invariant_part = true;
            if (cs.kind != ComponentKind::invariant)
                problem("declared invariant component '" + cs.name + "' has slant angle " + detail::fmt(cs.theta[worst]),
                        points[worst].coords());
            continue;
        }
        if (cs.kind == ComponentKind::invariant) {
            rep.invariant_part = true;
            if (!rep.discovery) rep.notes.push_back("component '" + cs.name + "' is invariant and joins the invariant part");
            continue;
        }
        if (cs.kind == ComponentKind::degenerate) {
            const auto zero = static_cast<std::size_t>(std::min_element(cs.theta.begin(), cs.theta.end()) - cs.theta.begin());
            problem("slant function of '" + cs.name + "' vanishes at some sampled points but not at others",
                    points[zero].coords());
            continue;
        }
        bool joined = false;
        for (std::size_t gi = 0; gi < rep.groups.size() && !joined; ++gi) {
            const auto& rep_theta = rep.components[rep.groups[gi].front()].theta;
            if (detail::max_gap(rep_theta, cs.theta) <= tol.angle_const) {
                rep.groups[gi].push_back(c);
                cs.group = gi;
                joined = true;
                rep.notes.push_back("component '" + cs.name + "' has the same slant function as '" +
                                    rep.components[rep.groups[gi].front()].name + "' and is joined with it");
            }
        }
        if (!joined) {
            cs.group = rep.groups.size();
            rep.groups.push_back({c});
        }
    }
    if (consistent && rep.groups.empty()) problem("no slant components", points[0].coords());

    auto group_theta = [&](std::size_t gi) -> const std::vector<double>& { return rep.components[rep.groups[gi].front()].theta; };
    auto group_name = [&](std::size_t gi) -> const std::string& { return rep.components[rep.groups[gi].front()].name; };
    auto set = [&](const char* label, bool holds, std::string evidence, std::optional<Vec> witness = std::nullopt) {
        rep.verdicts[label] = Verdict{holds, std::move(evidence), std::move(witness)};
    };

    // k-pointwise-slant: distinct slant functions.
    Verdict kpw{problems.empty(), "", problem_witness};
    if (!problems.empty()) kpw.evidence = problems.front();
    for (std::size_t a = 0; a < rep.groups.size() && kpw.holds; ++a) {
        for (std::size_t b = a + 1; b < rep.groups.size() && kpw.holds; ++b) {
            if (detail::max_gap(group_theta(a), group_theta(b)) <= tol.angle_distinct) {
                kpw.holds = false;
                kpw.evidence = "slant functions of '" + group_name(a) + "' and '" + group_name(b) + "' are not distinct";
            }
        }
    }
    if (kpw.holds)
        kpw.evidence = std::to_string(rep.groups.size()) + " distinct slant functions on sampled points";
    rep.verdicts[labels::k_pointwise_slant] = kpw;

    // pointwise-k-slant: distinct at every sampled point.
    Verdict pks{kpw.holds, "", std::nullopt};
    if (!kpw.holds) {
        pks.evidence = "requires k-pointwise-slant: " + kpw.evidence;
        pks.witness = kpw.witness;
    }
    for (std::size_t i = 0; i < np && pks.holds; ++i) {
        for (std::size_t a = 0; a < rep.groups.size() && pks.holds; ++a) {
            for (std::size_t b = a + 1; b < rep.groups.size() && pks.holds; ++b) {
                if (std::abs(group_theta(a)[i] - group_theta(b)[i]) <= tol.angle_distinct) {
                    pks.holds = false;
                    pks.witness = points[i].coords();
                    pks.evidence = "slant values of '" + group_name(a) + "' and '" + group_name(b) + "' coincide (" +
                                   detail::fmt(group_theta(a)[i]) + ") at " + detail::point_text(points[i].coords());
                }
            }
        }
    }
    if (pks.holds) pks.evidence = "slant values pairwise distinct at every sampled point";
    rep.verdicts[labels::pointwise_k_slant] = pks;

    // k-slant: constant, distinct angles.
    Verdict ks{pks.holds, "", std::nullopt};
    if (!pks.holds) {
        ks.evidence = "requires pointwise-k-slant: " + pks.evidence;
        ks.witness = pks.witness;
    }
    for (std::size_t gi = 0; gi < rep.groups.size() && ks.holds; ++gi) {
        const auto& th = group_theta(gi);
        if (*std::max_element(th.begin(), th.end()) - *std::min_element(th.begin(), th.end()) > tol.angle_const) {
            ks.holds = false;
            const auto far = static_cast<std::size_t>(
                std::max_element(th.begin(), th.end(), [&](double x, double y) { return std::abs(x - th[0]) < std::abs(y - th[0]); }) -
                th.begin());
            ks.witness = points[far].coords();
            ks.evidence = "slant angle of '" + group_name(gi) + "' varies from " + detail::fmt(th[0]) + " to " +
                          detail::fmt(th[far]) + " on sampled points";
        }
    }
    if (ks.holds) ks.evidence = std::to_string(rep.groups.size()) + " constant distinct slant angles on sampled points";
    rep.verdicts[labels::k_slant] = ks;

    // Eigenstructure of f^2 on all of D.
    const auto& first = rep.spectra.front().clusters;
    std::optional<std::size_t> unstable_at;
    for (std::size_t i = 1; i < np && !unstable_at; ++i) {
        const auto& cl = rep.spectra[i].clusters;
        if (cl.size() != first.size()) {
            unstable_at = i;
        } else {
            for (std::size_t c = 0; c < cl.size(); ++c)
                if (cl[c].multiplicity != first[c].multiplicity) unstable_at = i;
        }
    }
    const double gm = tol.generic_margin;
    bool endpoints_ok = true;
    std::string endpoint_evidence;
    std::optional<Vec> endpoint_witness;
    bool nonconstant_interior = false;
    bool all_constant = true;
    bool any_interior = false;
    if (!unstable_at) {
        for (std::size_t c = 0; c < first.size(); ++c) {
            std::size_t near0 = 0;
            std::size_t near1 = 0;
            double lo = first[c].theta;
            double hi = first[c].theta;
            bool interior_everywhere = true;
            for (std::size_t i = 0; i < np; ++i) {
                const auto& cl = rep.spectra[i].clusters[c];
                lo = std::min(lo, cl.theta);
                hi = std::max(hi, cl.theta);
                const bool z = cl.alpha <= gm;
                const bool u = cl.alpha >= 1.0 - gm;
                near0 += z;
                near1 += u;
                if (z || u) interior_everywhere = false;
                const double gap = std::min(cl.alpha, 1.0 - cl.alpha);
                if (gap > 1e-12 && gap <= gm)
                    rep.notes.push_back("alpha = " + detail::fmt(cl.alpha) + " lies within the generic margin at " +
                                        detail::point_text(points[i].coords()));
            }
            for (std::size_t i = 0; i < np && endpoints_ok; ++i) {
                const auto& cl = rep.spectra[i].clusters[c];
                const bool z = cl.alpha <= gm;
                const bool u = cl.alpha >= 1.0 - gm;
                if ((near0 > 0 && near0 < np && z) || (near1 > 0 && near1 < np && u)) {
                    endpoints_ok = false;
                    endpoint_witness = points[i].coords();
                    endpoint_evidence = "eigenvalue " + detail::fmt(cl.lambda) + " of f^2 reaches " + (z ? "0" : "epsilon") +
                                        " at " + detail::point_text(points[i].coords()) + " but not at every sampled point";
                }
            }
            const bool constant = hi - lo <= tol.angle_const;
            if (!constant) all_constant = false;
            if (!constant && interior_everywhere) nonconstant_interior = true;
            if (first[c].alpha > gm && first[c].alpha < 1.0 - gm) any_interior = true;
        }
    }

    Verdict gen{false, "", std::nullopt};
    if (unstable_at) {
        gen.witness = points[*unstable_at].coords();
        gen.evidence = "eigenvalue clusters of f^2 change from " + std::to_string(first.size()) + " to " +
                       std::to_string(rep.spectra[*unstable_at].clusters.size()) + " (or change multiplicity) at " +
                       detail::point_text(points[*unstable_at].coords());
    } else if (!endpoints_ok) {
        gen.witness = endpoint_witness;
        gen.evidence = endpoint_evidence;
    } else if (!nonconstant_interior) {
        gen.evidence = "no non-constant eigenvalue function with alpha strictly inside (0, 1)";
    } else if (!pks.holds) {
        gen.witness = pks.witness;
        gen.evidence = "requires pointwise-k-slant: " + pks.evidence;
    } else {
        gen.holds = true;
        gen.evidence = std::to_string(first.size()) + " eigenvalue clusters with constant multiplicities on sampled points";
    }
    rep.verdicts[labels::generic] = gen;

    if (unstable_at) {
        set(labels::skew_cr, false, gen.evidence, gen.witness);
        set(labels::cr, false, gen.evidence, gen.witness);
    } else if (!all_constant) {
        set(labels::skew_cr, false, "eigenvalue functions of f^2 are not constant on sampled points");
        set(labels::cr, false, "eigenvalue functions of f^2 are not constant on sampled points");
    } else if (any_interior) {
        set(labels::skew_cr, true, "constant eigenvalues with some alpha strictly inside (0, 1)");
        set(labels::cr, false, "some alpha lies strictly inside (0, 1)");
    } else {
        set(labels::skew_cr, false, "every alpha is 0 or 1");
        set(labels::cr, true, "every alpha is 0 or 1 on sampled points");
    }

    const std::size_t k = rep.groups.size();
    auto is_perp = [&](std::size_t gi) {
        const auto& th = group_theta(gi);
        return std::all_of(th.begin(), th.end(), [&](double t) { return std::abs(t - std::numbers::pi / 2) <= tol.angle_const; });
    };
    bool any_perp = false;
    for (std::size_t gi = 0; gi < k; ++gi) any_perp = any_perp || is_perp(gi);
    const bool inv = rep.invariant_part;
    set(labels::proper, kpw.holds && !inv, kpw.holds ? (inv ? "invariant part is nonzero" : "no invariant part") : kpw.evidence);

    const std::string na = "not applicable";
    for (const char* l : {labels::slant, labels::anti_invariant, labels::semi_invariant, labels::semi_slant, labels::bi_slant,
                          labels::hemi_slant, labels::almost_bi_slant, labels::pointwise_semi_slant,
                          labels::pointwise_bi_slant, labels::pointwise_hemi_slant})
        set(l, false, na);
    if (ks.holds) {
        if (k == 1 && !inv) {
            set(labels::slant, true, "one slant component, no invariant part");
            if (is_perp(0)) set(labels::anti_invariant, true, "slant angle pi/2");
        } else if (k == 1 && inv) {
            if (is_perp(0)) {
                set(labels::semi_invariant, true, "invariant part plus one component with angle pi/2");
            } else {
                set(labels::semi_slant, true, "invariant part plus one slant component");
            }
        } else if (k == 2 && !inv) {
            set(labels::bi_slant, true, "two slant components, no invariant part");
            if (any_perp) set(labels::hemi_slant, true, "one of the two angles is pi/2");
        } else if (k == 2 && inv) {
            set(labels::almost_bi_slant, true, "invariant part plus two slant components");
        }
    }
    if (kpw.holds) {
        if (k == 1 && inv && !is_perp(0)) {
            set(labels::pointwise_semi_slant, true, "invariant part plus one slant function");
        } else if (k == 2 && !inv) {
            set(labels::pointwise_bi_slant, true, "two slant functions, no invariant part");
            if (any_perp) set(labels::pointwise_hemi_slant, true, "one slant function is identically pi/2");
        }
    }
    return rep;
}

inline std::vector<std::pair<AmbientPoint, double>> slant_function_table(const Decomposition& dec, std::size_t component,
                                                                         const std::vector<AmbientPoint>& points,
                                                                         double cluster_tol = 1e-8) {
    std::vector<std::pair<AmbientPoint, double>> table(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        const auto s = slice_at(dec, points[i], {cluster_tol, 1e-6});
        if (component >= s.components.size()) throw ArgumentError("component index out of range");
        table[i] = {points[i], s.components[component].theta};
    });
    return table;
}

}  // namespace slantkit
