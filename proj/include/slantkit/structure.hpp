#pragma once

// Structural endomorphism phi with g(phi X, Y) = eps g(X, phi Y), in two flavours:
//   hermitian-like: phi^2 = eps I,                 g(phi X, phi Y) = g(X, Y)
//   contact-like:   phi^2 = eps (I - eta (x) xi),  g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y)
// eta is always g(., xi).

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slantkit/expr.hpp"
#include "slantkit/linalg.hpp"
#include "slantkit/parallel.hpp"
#include "slantkit/random.hpp"

namespace slantkit {

enum class StructureKind { hermitian_like, contact_like };

inline std::string to_string(StructureKind k) {
    return k == StructureKind::contact_like ? "contact-like" : "hermitian-like";
}

inline std::optional<StructureKind> parse_kind(std::string_view s) {
    if (s == "contact-like") return StructureKind::contact_like;
    if (s == "hermitian-like") return StructureKind::hermitian_like;
    return std::nullopt;
}

class StructureField {
public:
    // phi_columns[c] is the image of e_c. metric_rows absent means the Euclidean metric.
    StructureField(int epsilon, StructureKind kind, std::vector<VectorFieldExpr> phi_columns,
                   std::optional<std::vector<VectorFieldExpr>> metric_rows = std::nullopt,
                   std::optional<VectorFieldExpr> xi = std::nullopt)
        : epsilon_(epsilon),
          kind_(kind),
          phi_columns_(std::move(phi_columns)),
          metric_rows_(std::move(metric_rows)),
          xi_(std::move(xi)) {
        if (epsilon_ != 1 && epsilon_ != -1) throw ArgumentError("epsilon must be +1 or -1");
        const std::size_t n = phi_columns_.size();
        if (n == 0) throw DimensionError("structure needs at least one dimension");
        for (const auto& col : phi_columns_)
            if (col.dim() != n) throw DimensionError("phi must be n x n");
        if (metric_rows_) {
            if (metric_rows_->size() != n) throw DimensionError("metric must be n x n");
            for (const auto& row : *metric_rows_)
                if (row.dim() != n) throw DimensionError("metric must be n x n");
        }
        if (kind_ == StructureKind::contact_like && !xi_) throw ArgumentError("contact-like structure needs xi");
        if (kind_ == StructureKind::hermitian_like && xi_) throw ArgumentError("hermitian-like structure takes no xi");
        if (xi_ && xi_->dim() != n) throw DimensionError("xi must have n components");
    }

    [[nodiscard]] std::size_t n() const noexcept { return phi_columns_.size(); }
    [[nodiscard]] int epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] StructureKind kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_contact() const noexcept { return kind_ == StructureKind::contact_like; }
    [[nodiscard]] bool euclidean() const noexcept { return !metric_rows_.has_value(); }
    [[nodiscard]] const std::vector<VectorFieldExpr>& phi_columns() const noexcept { return phi_columns_; }
    [[nodiscard]] const std::optional<std::vector<VectorFieldExpr>>& metric_rows() const noexcept { return metric_rows_; }
    [[nodiscard]] const std::optional<VectorFieldExpr>& xi() const noexcept { return xi_; }

private:
    int epsilon_;
    StructureKind kind_;
    std::vector<VectorFieldExpr> phi_columns_;
    std::optional<std::vector<VectorFieldExpr>> metric_rows_;
    std::optional<VectorFieldExpr> xi_;
};

inline void require_dim(const StructureField& s, const AmbientPoint& p) {
    if (p.dim() != s.n()) throw DimensionError("point dimension differs from structure dimension");
}

inline Mat phi_at(const StructureField& s, const AmbientPoint& p) {
    require_dim(s, p);
    const auto n = static_cast<Eigen::Index>(s.n());
    Mat phi(n, n);
    for (Eigen::Index c = 0; c < n; ++c) phi.col(c) = s.phi_columns()[static_cast<std::size_t>(c)].eval(p);
    return phi;
}

inline MetricAtPoint metric_at(const StructureField& s, const AmbientPoint& p) {
    require_dim(s, p);
    if (s.euclidean()) return MetricAtPoint::identity(s.n());
    const auto n = static_cast<Eigen::Index>(s.n());
    Mat g(n, n);
    for (Eigen::Index r = 0; r < n; ++r) g.row(r) = (*s.metric_rows())[static_cast<std::size_t>(r)].eval(p).transpose();
    return MetricAtPoint(std::move(g));
}

inline Vec xi_at(const StructureField& s, const AmbientPoint& p) {
    if (!s.is_contact()) throw KindError("xi is only defined for contact-like structures");
    require_dim(s, p);
    return s.xi()->eval(p);
}

inline double eta(const StructureField& s, const AmbientPoint& p, const TangentVector& v) {
    if (!s.is_contact()) throw KindError("eta is only defined for contact-like structures");
    if (!(v.base() == p)) throw BasePointError("vector is not based at p");
    return metric_at(s, p)(v.comps(), xi_at(s, p));
}

// Number of singular values of phi_p below tol (the kernel dimension).
inline std::size_t kernel_dimension(const StructureField& s, const AmbientPoint& p, double tol = 1e-10) {
    const Vec sv = Eigen::JacobiSVD<Mat>(phi_at(s, p)).singularValues();
    return static_cast<std::size_t>((sv.array() < tol).count());
}

struct AxiomResidual {
    double max_residual = 0.0;
    std::optional<Vec> point;
    std::optional<Vec> x;
    std::optional<Vec> y;
};

struct EvaluationFailure {
    Vec point;
    std::string message;
};

struct StructureVerdict {
    bool passed = false;
    double tolerance = 0.0;
    std::map<std::string, AxiomResidual> axioms;
    std::vector<EvaluationFailure> failures;

    // Axiom with the largest residual, or empty when nothing was evaluated.
    [[nodiscard]] std::string worst_axiom() const {
        std::string worst;
        double value = -1.0;
        for (const auto& [name, r] : axioms) {
            if (r.max_residual > value) {
                value = r.max_residual;
                worst = name;
            }
        }
        return worst;
    }
};

namespace detail {

inline void record(std::map<std::string, AxiomResidual>& axioms, const std::string& name, double residual,
                   const Vec& point, const Vec& x, const std::optional<Vec>& y = std::nullopt) {
    auto& slot = axioms[name];
    if (!slot.point || residual > slot.max_residual) {
        slot.max_residual = residual;
        slot.point = point;
        slot.x = x;
        slot.y = y;
    }
}

inline std::map<std::string, AxiomResidual> axioms_at(const StructureField& s, const AmbientPoint& p, std::size_t trials,
                                                      std::uint64_t seed) {
    std::map<std::string, AxiomResidual> out;
    const MetricAtPoint g = metric_at(s, p);
    const Mat phi = phi_at(s, p);
    const double eps = s.epsilon();
    const auto n = static_cast<Eigen::Index>(s.n());
    const Mat identity_basis = orthonormalize_columns(g, Mat::Identity(n, n));
    std::optional<Vec> xi;
    if (s.is_contact()) {
        xi = xi_at(s, p);
        record(out, "reeb-unit", std::abs(g(*xi, *xi) - 1.0), p.coords(), *xi);
        record(out, "reeb-kernel", g.norm(phi * *xi), p.coords(), *xi);
    }
    auto eta_of = [&](const Vec& v) { return xi ? g(v, *xi) : 0.0; };
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const Vec x = rng.unit_in(identity_basis);
        const Vec y = rng.unit_in(identity_basis);
        const Vec px = phi * x;
        const Vec py = phi * y;
        record(out, "compatibility", std::abs(g(px, y) - eps * g(x, py)), p.coords(), x, y);
        const Vec square_target = eps * (x - eta_of(x) * (xi ? *xi : Vec::Zero(n)));
        record(out, "square", g.norm(phi * px - square_target), p.coords(), x);
        record(out, "isometry", std::abs(g(px, py) - (g(x, y) - eta_of(x) * eta_of(y))), p.coords(), x, y);
        Vec horizontal = x - eta_of(x) * (xi ? *xi : Vec::Zero(n));
        if (g.norm(horizontal) > 1e-8) {
            horizontal /= g.norm(horizontal);
            record(out, "norm", std::abs(g.norm(phi * horizontal) - 1.0), p.coords(), horizontal);
        }
        if (xi) record(out, "eta-phi", std::abs(eta_of(px)), p.coords(), x);
    }
    return out;
}

}  // namespace detail

// Checks the structure axioms on seeded random unit vectors at each point.
// Evaluation problems at a point become failures rather than exceptions.
inline StructureVerdict validate_structure(const StructureField& s, const std::vector<AmbientPoint>& points,
                                           std::size_t trials, double tol = 1e-9, std::uint64_t seed = default_seed) {
    if (points.empty()) throw ArgumentError("validate_structure needs at least one point");
    if (trials == 0) throw ArgumentError("validate_structure needs at least one trial");
    for (const auto& p : points) require_dim(s, p);

    std::vector<std::map<std::string, AxiomResidual>> per_point(points.size());
    std::vector<std::optional<std::string>> errors(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        try {
            per_point[i] = detail::axioms_at(s, points[i], trials, derive_seed(seed, i));
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    StructureVerdict verdict;
    verdict.tolerance = tol;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (errors[i]) verdict.failures.push_back({points[i].coords(), *errors[i]});
        for (const auto& [name, r] : per_point[i]) {
            auto& slot = verdict.axioms[name];
            if (!slot.point || r.max_residual > slot.max_residual) slot = r;
        }
    }
    verdict.passed = verdict.failures.empty() && !verdict.axioms.empty();
    for (const auto& [name, r] : verdict.axioms)
        if (!(r.max_residual <= tol)) verdict.passed = false;
    return verdict;
}

}  // namespace slantkit
