#pragma once

// Distributions, decompositions D = D0 + D1 + ... + Dk, and the f/w split of phi
// relative to D: f = P_D phi, w = (I - P_D) phi.

#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "slantkit/linalg.hpp"
#include "slantkit/structure.hpp"
#include "slantkit/tolerances.hpp"

namespace slantkit {

class DistributionFrame {
public:
    // mask: 0-based coordinates spanning TM; fields must vanish outside it.
    DistributionFrame(std::string name, std::vector<VectorFieldExpr> fields,
                      std::optional<std::vector<std::size_t>> mask = std::nullopt)
        : name_(std::move(name)), fields_(std::move(fields)), mask_(std::move(mask)) {
        if (fields_.empty()) throw ArgumentError("distribution '" + name_ + "' has no fields");
        for (const auto& f : fields_)
            if (f.dim() != fields_.front().dim()) throw DimensionError("distribution '" + name_ + "' mixes dimensions");
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t rank() const noexcept { return fields_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return fields_.front().dim(); }
    [[nodiscard]] const std::vector<VectorFieldExpr>& fields() const noexcept { return fields_; }
    [[nodiscard]] const std::optional<std::vector<std::size_t>>& mask() const noexcept { return mask_; }

    [[nodiscard]] Mat evaluate(const AmbientPoint& p) const {
        if (p.dim() != dim()) throw DimensionError("point dimension differs from distribution '" + name_ + "'");
        Mat m(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(rank()));
        for (std::size_t j = 0; j < rank(); ++j) m.col(static_cast<Eigen::Index>(j)) = fields_[j].eval(p);
        if (mask_) {
            std::vector<bool> inside(dim(), false);
            for (auto c : *mask_) inside[c] = true;
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                if (!inside[static_cast<std::size_t>(r)] && m.row(r).cwiseAbs().maxCoeff() > 1e-12)
                    throw InvariantError("distribution '" + name_ + "' leaves the submanifold mask at x" + std::to_string(r + 1));
        }
        return m;
    }

    [[nodiscard]] SubspaceBasis basis(const MetricAtPoint& g, const AmbientPoint& p) const {
        try {
            return gram_schmidt(g, SubspaceBasis(p, evaluate(p)));
        } catch (const RankError& e) {
            throw RankError("distribution '" + name_ + "' is rank deficient: " + e.what());
        }
    }

private:
    std::string name_;
    std::vector<VectorFieldExpr> fields_;
    std::optional<std::vector<std::size_t>> mask_;
};

class Decomposition {
public:
    // Declared form: optional invariant component D0 followed by proper components.
    Decomposition(std::shared_ptr<const StructureField> structure, std::optional<DistributionFrame> invariant,
                  std::vector<DistributionFrame> proper, std::optional<std::vector<std::size_t>> mask = std::nullopt)
        : structure_(std::move(structure)), mask_(std::move(mask)) {
        if (invariant) frames_.push_back(std::move(*invariant));
        has_invariant_ = !frames_.empty();
        for (auto& f : proper) frames_.push_back(std::move(f));
        validate();
    }

    // Undeclared form: D is the sum of the frames and its components are read off the
    // eigenspaces of f^2 at each point.
    static Decomposition discovery(std::shared_ptr<const StructureField> structure, std::vector<DistributionFrame> frames,
                                   std::optional<std::vector<std::size_t>> mask = std::nullopt) {
        Decomposition d(std::move(structure), std::move(frames), std::move(mask));
        return d;
    }

    [[nodiscard]] const StructureField& structure() const noexcept { return *structure_; }
    [[nodiscard]] const std::shared_ptr<const StructureField>& structure_ptr() const noexcept { return structure_; }
    [[nodiscard]] const std::vector<DistributionFrame>& frames() const noexcept { return frames_; }
    [[nodiscard]] bool has_invariant() const noexcept { return has_invariant_; }
    [[nodiscard]] bool is_discovery() const noexcept { return discovery_; }
    [[nodiscard]] const std::optional<std::vector<std::size_t>>& mask() const noexcept { return mask_; }
    [[nodiscard]] std::size_t n() const noexcept { return structure_->n(); }
    [[nodiscard]] std::size_t rank() const {
        return std::accumulate(frames_.begin(), frames_.end(), std::size_t{0},
                               [](std::size_t acc, const DistributionFrame& f) { return acc + f.rank(); });
    }

private:
    Decomposition(std::shared_ptr<const StructureField> structure, std::vector<DistributionFrame> frames,
                  std::optional<std::vector<std::size_t>> mask)
        : structure_(std::move(structure)), frames_(std::move(frames)), mask_(std::move(mask)), discovery_(true) {
        validate();
    }

    void validate() const {
        if (!structure_) throw ArgumentError("decomposition needs a structure");
        if (frames_.empty()) throw ArgumentError("decomposition has no distributions");
        for (const auto& f : frames_)
            if (f.dim() != structure_->n()) throw DimensionError("distribution '" + f.name() + "' has the wrong dimension");
        if (mask_)
            for (auto c : *mask_)
                if (c >= structure_->n()) throw DimensionError("submanifold mask index out of range");
        if (rank() > structure_->n()) throw DimensionError("distributions exceed the ambient dimension");
    }

    std::shared_ptr<const StructureField> structure_;
    std::vector<DistributionFrame> frames_;
    std::optional<std::vector<std::size_t>> mask_;
    bool has_invariant_ = false;
    bool discovery_ = false;
};

struct FWSplit {
    TangentVector f_part;
    TangentVector w_part;
};

namespace detail {

struct FrameBases {
    MetricAtPoint g;
    std::vector<Mat> bases;  // one g-orthonormal block per frame
    Mat d_basis;             // g-orthonormal basis of D
};

inline FrameBases frame_bases(const Decomposition& dec, const AmbientPoint& p) {
    const auto& s = dec.structure();
    require_dim(s, p);
    MetricAtPoint g = metric_at(s, p);
    std::vector<Mat> bases;
    Eigen::Index total = 0;
    for (const auto& frame : dec.frames()) {
        bases.push_back(frame.basis(g, p).matrix());
        total += bases.back().cols();
    }
    Mat d(static_cast<Eigen::Index>(s.n()), total);
    Eigen::Index col = 0;
    for (const auto& b : bases) {
        d.middleCols(col, b.cols()) = b;
        col += b.cols();
    }
    if (dec.is_discovery()) {
        d = orthonormalize_columns(g, d);
    } else {
        for (std::size_t i = 0; i < bases.size(); ++i) {
            for (std::size_t j = i + 1; j < bases.size(); ++j) {
                const double cross = (bases[i].transpose() * g.matrix() * bases[j]).cwiseAbs().maxCoeff();
                if (cross > 1e-10)
                    throw ModelError("components '" + dec.frames()[i].name() + "' and '" + dec.frames()[j].name() +
                                     "' are not orthogonal");
            }
        }
    }
    if (s.is_contact()) {
        const Vec xi = xi_at(s, p);
        const double leak = (d.transpose() * g.matrix() * xi).cwiseAbs().maxCoeff();
        if (d.cols() > 0 && leak > 1e-10) throw ModelError("distribution is not orthogonal to xi");
    }
    return {std::move(g), std::move(bases), std::move(d)};
}

inline double relative_asymmetry(const Mat& a) {
    return (a - a.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace detail

inline FWSplit fw_split(const Decomposition& dec, const AmbientPoint& p, const TangentVector& v) {
    if (!(v.base() == p)) throw BasePointError("vector is not based at p");
    const auto fb = detail::frame_bases(dec, p);
    const Vec image = phi_at(dec.structure(), p) * v.comps();
    const Vec f = projector_matrix(fb.g, fb.d_basis) * image;
    return {TangentVector(f, p), TangentVector(image - f, p)};
}

// Matrix of f^2 restricted to D in a g-orthonormal basis of D (the frames' order).
inline Mat f_squared_matrix(const Decomposition& dec, const AmbientPoint& p) {
    const auto fb = detail::frame_bases(dec, p);
    const Mat f = projector_matrix(fb.g, fb.d_basis) * phi_at(dec.structure(), p);
    const Mat a = fb.d_basis.transpose() * fb.g.matrix() * f * f * fb.d_basis;
    if (detail::relative_asymmetry(a) > 1e-9) throw ModelError("f^2 restricted to D is not symmetric");
    return 0.5 * (a + a.transpose());
}

struct ComponentSlice {
    std::string name;
    bool invariant = false;  // declared D0, or the theta = 0 cluster in discovery mode
    Mat basis;               // g-orthonormal columns
    double lambda = 0.0;     // eigenvalue of f^2 on the component
    double theta = 0.0;      // slant angle at the point

    [[nodiscard]] std::size_t rank() const noexcept { return static_cast<std::size_t>(basis.cols()); }
};

struct SliceOptions {
    double cluster_tol = 1e-8;
    double invariant_tol = 1e-6;
};

// Everything the classifier, duality and verifier need at one point.
struct DecompositionSlice {
    AmbientPoint point;
    int epsilon = -1;
    StructureKind kind = StructureKind::hermitian_like;
    MetricAtPoint g = MetricAtPoint::identity(1);
    Mat phi;
    std::optional<Vec> xi;
    Mat d_basis;      // g-orthonormal basis of D
    Mat p_d;          // g-orthogonal projector onto D
    Mat f;            // P_D phi
    Mat w;            // (I - P_D) phi
    Mat f2;           // f^2 on D in d_basis coordinates, symmetrized
    std::vector<ComponentSlice> components;
    Mat g_basis;      // complement of D (and of xi in the contact-like case)
    Mat dperp_basis;  // complement of D in the ambient space

    [[nodiscard]] double ip(const Vec& a, const Vec& b) const { return g(a, b); }
    [[nodiscard]] double norm(const Vec& a) const { return g.norm(a); }
    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(phi.rows()); }
    [[nodiscard]] Mat projector_onto(const Mat& cols) const { return projector_matrix(g, cols); }
};

struct Cluster {
    std::size_t begin;
    std::size_t end;  // one past last
};

// Greedy clustering of ascending eigenvalues: a gap above tol starts a new cluster.
inline std::vector<Cluster> cluster_eigenvalues(const Vec& ascending, double tol) {
    std::vector<Cluster> out;
    const auto n = static_cast<std::size_t>(ascending.size());
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || ascending(static_cast<Eigen::Index>(i)) - ascending(static_cast<Eigen::Index>(i - 1)) > tol) {
            out.push_back({begin, i});
            begin = i;
        }
    }
    return out;
}

// Angle between phi v and D, averaged over the columns of a g-orthonormal basis.
inline double slant_angle_of(const DecompositionSlice& s, const Mat& basis) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < basis.cols(); ++c) sum += std::atan2(s.norm(s.w * basis.col(c)), s.norm(s.f * basis.col(c)));
    return basis.cols() > 0 ? sum / static_cast<double>(basis.cols()) : 0.0;
}

inline void require_lambda_range(double lambda, int epsilon, const AmbientPoint& p) {
    const double el = epsilon * lambda;
    if (el < -1e-6 || el > 1.0 + 1e-6)
        throw ModelError("eigenvalue " + ast::format_number(lambda) + " of f^2 is outside the admissible range at distance " +
                         ast::format_number(p.coords().norm()) + " from the origin");
}

namespace detail {

struct CoreSlice {
    DecompositionSlice slice;
    std::vector<Mat> frame_bases;
};

// Slice without component data: metric, phi, f, w, f^2 and the complements.
inline CoreSlice core_slice(const Decomposition& dec, const AmbientPoint& p) {
    const auto& st = dec.structure();
    auto fb = frame_bases(dec, p);
    DecompositionSlice s;
    s.point = p;
    s.epsilon = st.epsilon();
    s.kind = st.kind();
    s.g = fb.g;
    s.phi = phi_at(st, p);
    if (st.is_contact()) s.xi = xi_at(st, p);
    s.d_basis = fb.d_basis;
    s.p_d = projector_matrix(s.g, s.d_basis);
    s.f = s.p_d * s.phi;
    s.w = s.phi - s.f;
    const Mat a = s.d_basis.transpose() * s.g.matrix() * s.f * s.f * s.d_basis;
    if (relative_asymmetry(a) > 1e-9) throw ModelError("f^2 restricted to D is not symmetric");
    s.f2 = 0.5 * (a + a.transpose());
    s.dperp_basis = orthogonal_complement(s.g, s.d_basis);
    if (s.xi) {
        Mat dx(s.d_basis.rows(), s.d_basis.cols() + 1);
        dx << s.d_basis, *s.xi / s.norm(*s.xi);
        s.g_basis = orthogonal_complement(s.g, dx);
    } else {
        s.g_basis = s.dperp_basis;
    }
    return {std::move(s), std::move(fb.bases)};
}

}  // namespace detail

inline DecompositionSlice slice_at(const Decomposition& dec, const AmbientPoint& p, const SliceOptions& opts = {}) {
    auto core = detail::core_slice(dec, p);
    DecompositionSlice& s = core.slice;
    if (!dec.is_discovery()) {
        Eigen::Index offset = 0;
        for (std::size_t i = 0; i < core.frame_bases.size(); ++i) {
            const Eigen::Index r = core.frame_bases[i].cols();
            const Vec values = sym_eigen(s.f2.block(offset, offset, r, r)).values;
            if (values(r - 1) - values(0) > opts.cluster_tol)
                throw ComponentError("component '" + dec.frames()[i].name() + "' carries several eigenvalues of f^2 (" +
                                     ast::format_number(values(0)) + " .. " + ast::format_number(values(r - 1)) + ")");
            ComponentSlice c;
            c.name = dec.frames()[i].name();
            c.invariant = dec.has_invariant() && i == 0;
            c.basis = core.frame_bases[i];
            c.lambda = values.mean();
            require_lambda_range(c.lambda, s.epsilon, p);
            s.components.push_back(std::move(c));
            offset += r;
        }
    } else {
        const auto eig = sym_eigen(s.f2);
        for (const auto& cl : cluster_eigenvalues(eig.values, opts.cluster_tol)) {
            const auto len = static_cast<Eigen::Index>(cl.end - cl.begin);
            ComponentSlice c;
            c.basis = s.d_basis * eig.vectors.middleCols(static_cast<Eigen::Index>(cl.begin), len);
            c.lambda = eig.values.segment(static_cast<Eigen::Index>(cl.begin), len).mean();
            require_lambda_range(c.lambda, s.epsilon, p);
            s.components.push_back(std::move(c));
        }
    }
    for (auto& c : s.components) c.theta = slant_angle_of(s, c.basis);
    if (dec.is_discovery()) {
        std::stable_sort(s.components.begin(), s.components.end(),
                         [](const ComponentSlice& x, const ComponentSlice& y) { return x.theta < y.theta; });
        std::size_t index = 0;
        for (auto& c : s.components) {
            c.invariant = c.theta <= opts.invariant_tol;
            c.name = c.invariant ? "invariant" : "cluster-" + std::to_string(++index);
        }
    }
    return std::move(core.slice);
}

struct FInvarianceReport {
    bool passed = true;
    double tolerance = 0.0;
    double max_leak = 0.0;   // component of f(X_i) outside D_i
    double max_cross = 0.0;  // |g(phi X_i, X_j)|, i != j proper
    std::optional<Vec> witness_point;
    std::string witness_component;
};

// Seeded random probe of f(D_i) in D_i and phi(D_i) orthogonal to D_j.
inline FInvarianceReport check_f_invariance(const Decomposition& dec, const std::vector<AmbientPoint>& points,
                                            std::size_t trials, double tol = 1e-9, std::uint64_t seed = default_seed) {
    FInvarianceReport report;
    report.tolerance = tol;
    struct PointResult {
        double leak = 0.0;
        double cross = 0.0;
        std::string component;
    };
    std::vector<PointResult> results(points.size());
    parallel_for(points.size(), [&](std::size_t pi) {
        const auto fb = detail::frame_bases(dec, points[pi]);
        const Mat phi = phi_at(dec.structure(), points[pi]);
        const Mat f = projector_matrix(fb.g, fb.d_basis) * phi;
        const std::size_t first_proper = dec.has_invariant() ? 1 : 0;
        auto& out = results[pi];
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng(derive_seed(seed, pi, t));
            std::vector<Vec> draws;
            for (const auto& b : fb.bases) draws.push_back(rng.unit_in(b));
            for (std::size_t i = 0; i < fb.bases.size(); ++i) {
                const Vec fx = f * draws[i];
                const double leak = fb.g.norm(fx - projector_matrix(fb.g, fb.bases[i]) * fx);
                if (leak > out.leak) {
                    out.leak = leak;
                    out.component = dec.frames()[i].name();
                }
                if (i < first_proper) continue;
                for (std::size_t j = first_proper; j < fb.bases.size(); ++j) {
                    if (j == i) continue;
                    const double cross = std::abs(fb.g(phi * draws[i], draws[j]));
                    if (cross > out.cross) {
                        out.cross = cross;
                        if (cross > out.leak) out.component = dec.frames()[i].name();
                    }
                }
            }
        }
    });
    double worst = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        report.max_leak = std::max(report.max_leak, results[i].leak);
        report.max_cross = std::max(report.max_cross, results[i].cross);
        const double local = std::max(results[i].leak, results[i].cross);
        if (local > worst) {
            worst = local;
            report.witness_point = points[i].coords();
            report.witness_component = results[i].component;
        }
    }
    report.passed = report.max_leak <= tol && report.max_cross <= tol;
    return report;
}

// Operator-norm version of the same defects on an already built slice.
inline double f_invariance_defect(const DecompositionSlice& s) {
    const Mat& lt = s.g.cholesky_lower();
    double worst = 0.0;
    for (std::size_t i = 0; i < s.components.size(); ++i) {
        const auto& ci = s.components[i];
        const Mat fb = s.f * ci.basis;
        const Mat leak = fb - s.projector_onto(ci.basis) * fb;
        worst = std::max(worst, Eigen::JacobiSVD<Mat>(lt.transpose() * leak).singularValues()(0));
        if (ci.invariant) continue;
        for (std::size_t j = 0; j < s.components.size(); ++j) {
            if (j == i || s.components[j].invariant) continue;
            const Mat cross = s.components[j].basis.transpose() * s.g.matrix() * s.phi * ci.basis;
            worst = std::max(worst, Eigen::JacobiSVD<Mat>(cross).singularValues()(0));
        }
    }
    return worst;
}

}  // namespace slantkit
