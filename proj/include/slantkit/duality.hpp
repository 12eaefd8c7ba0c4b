#pragma once

// Dual distributions: w(D_i) inside G, the complement of D (of D + <xi> in the
// contact-like case), and the remainder H with f(H) = 0, so that
// G = w(D_1) + ... + w(D_k) + H orthogonally.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slantkit/distribution.hpp"
#include "slantkit/parallel.hpp"

namespace slantkit {

struct DualSlice {
    AmbientPoint point;
    Mat g_frame;                     // g-orthonormal basis of G
    std::vector<std::string> names;  // proper components, in slice order
    std::vector<std::size_t> component_index;
    std::vector<double> thetas;  // slant angle of D_i at the point
    std::vector<Mat> duals;      // g-orthonormal basis of w(D_i)
    Mat h;                       // g-orthonormal basis of H
    double f_h_residual = 0.0;   // operator norm of f on H
    double orthogonality_residual = 0.0;  // max |g(U_i, U_j)|, i != j
    double containment_residual = 0.0;    // duals leaking out of G
};

namespace detail {

inline double operator_norm(const MetricAtPoint& g, const Mat& m) {
    if (m.cols() == 0) return 0.0;
    return Eigen::JacobiSVD<Mat>(g.cholesky_lower().transpose() * m).singularValues()(0);
}

}  // namespace detail

// Builds the dual at p from an already computed slice.
inline DualSlice dual_of(const DecompositionSlice& s, double tol = 1e-9, double invariant_tol = 1e-6) {
    DualSlice d;
    d.point = s.point;
    d.g_frame = s.g_basis;
    for (std::size_t i = 0; i < s.components.size(); ++i) {
        const auto& c = s.components[i];
        if (c.invariant) continue;
        if (c.theta <= invariant_tol)
            throw ModelError("component '" + c.name + "' has slant angle " + ast::format_number(c.theta) +
                             " at the point, so w is not injective on it");
        d.names.push_back(c.name);
        d.component_index.push_back(i);
        d.thetas.push_back(c.theta);
        d.duals.push_back(orthonormalize_columns(s.g, s.w * c.basis));
    }

    Eigen::Index total = 0;
    for (const auto& u : d.duals) total += u.cols();
    const Mat& q = d.g_frame;
    Mat coords(q.cols(), total);  // dual bases in G coordinates
    Eigen::Index col = 0;
    for (const auto& u : d.duals) {
        coords.middleCols(col, u.cols()) = q.transpose() * s.g.matrix() * u;
        d.containment_residual = std::max(d.containment_residual, detail::operator_norm(s.g, u - projector_matrix(s.g, q) * u));
        col += u.cols();
    }
    if (total > q.cols()) throw ModelError("dual distributions do not fit into the complement G");
    if (total == 0) {
        d.h = q;
    } else {
        Eigen::HouseholderQR<Mat> qr(coords);
        const Mat full = qr.householderQ() * Mat::Identity(q.cols(), q.cols());
        d.h = q * full.rightCols(q.cols() - total);
    }

    for (std::size_t i = 0; i < d.duals.size(); ++i)
        for (std::size_t j = i + 1; j < d.duals.size(); ++j)
            d.orthogonality_residual = std::max(
                d.orthogonality_residual, (d.duals[i].transpose() * s.g.matrix() * d.duals[j]).cwiseAbs().maxCoeff());

    d.f_h_residual = detail::operator_norm(s.g, s.f * d.h);
    if (d.f_h_residual > tol)
        throw ModelError("f does not vanish on the remainder H (residual " + ast::format_number(d.f_h_residual) + ")");
    return d;
}

inline DualSlice build_dual(const Decomposition& dec, const AmbientPoint& p, double tol = 1e-9) {
    return dual_of(slice_at(dec, p), tol);
}

struct DualComponentCheck {
    std::string name;
    std::size_t rank = 0;
    std::size_t dual_rank = 0;
    double theta = 0.0;
    double dual_theta = 0.0;     // angle between phi U and G for U in w(D_i)
    double roundtrip_angle = 0.0;  // largest principal angle between f(w(D_i)) and D_i
    double w2_spread = 0.0;        // deviation of w^2 on w(D_i) from eps cos^2(theta) I
    bool passed = false;
};

struct DualRoundtripReport {
    AmbientPoint point;
    double tolerance = 0.0;
    bool passed = false;
    double orthogonality_residual = 0.0;
    double containment_residual = 0.0;
    double f_h_residual = 0.0;
    std::size_t h_rank = 0;
    std::vector<DualComponentCheck> components;
};

inline DualRoundtripReport roundtrip_of(const DecompositionSlice& s, const DualSlice& d, double tol = 1e-8) {
    DualRoundtripReport r;
    r.point = s.point;
    r.tolerance = tol;
    r.orthogonality_residual = d.orthogonality_residual;
    r.containment_residual = d.containment_residual;
    r.f_h_residual = d.f_h_residual;
    r.h_rank = static_cast<std::size_t>(d.h.cols());
    r.passed = d.orthogonality_residual <= tol && d.containment_residual <= tol && d.f_h_residual <= tol;
    for (std::size_t i = 0; i < d.duals.size(); ++i) {
        const auto& comp = s.components[d.component_index[i]];
        const Mat& u = d.duals[i];
        DualComponentCheck c;
        c.name = d.names[i];
        c.rank = comp.rank();
        c.dual_rank = static_cast<std::size_t>(u.cols());
        c.theta = d.thetas[i];
        double sum = 0.0;
        for (Eigen::Index j = 0; j < u.cols(); ++j) sum += std::atan2(s.norm(s.f * u.col(j)), s.norm(s.w * u.col(j)));
        c.dual_theta = u.cols() > 0 ? sum / static_cast<double>(u.cols()) : 0.0;
        const SubspaceBasis back(s.point, orthonormalize_columns(s.g, s.f * u), true);
        c.roundtrip_angle = max_principal_angle(s.g, back, SubspaceBasis(s.point, comp.basis, true));
        const double target = s.epsilon * std::pow(std::cos(c.theta), 2);
        const Mat w2 = u.transpose() * s.g.matrix() * s.w * s.w * u;
        c.w2_spread = (w2 - target * Mat::Identity(w2.rows(), w2.cols())).cwiseAbs().maxCoeff();
        c.passed = c.rank == c.dual_rank && c.roundtrip_angle <= tol && std::abs(c.dual_theta - c.theta) <= tol &&
                   c.w2_spread <= tol;
        r.passed = r.passed && c.passed;
        r.components.push_back(std::move(c));
    }
    return r;
}

inline DualRoundtripReport dual_roundtrip_check(const Decomposition& dec, const AmbientPoint& p, double tol = 1e-8) {
    const auto s = slice_at(dec, p);
    return roundtrip_of(s, dual_of(s), tol);
}

}  // namespace slantkit
