#pragma once

// Helpers shared by the test suites: constant structures from numeric matrices and
// random orthogonal and SPD matrices.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slantkit/distribution.hpp"
#include "slantkit/random.hpp"
#include "slantkit/structure.hpp"

namespace slantkit::testing {

inline std::string literal(double v) { return "(" + ast::format_number(v) + ")"; }

inline VectorFieldExpr constant_field(const Vec& v) {
    std::vector<ScalarFieldExpr> comps;
    for (Eigen::Index i = 0; i < v.size(); ++i) comps.push_back(parse(literal(v(i)), static_cast<std::size_t>(v.size())));
    return VectorFieldExpr(std::move(comps));
}

inline std::vector<VectorFieldExpr> constant_columns(const Mat& m) {
    std::vector<VectorFieldExpr> cols;
    for (Eigen::Index c = 0; c < m.cols(); ++c) cols.push_back(constant_field(m.col(c)));
    return cols;
}

inline std::vector<VectorFieldExpr> constant_rows(const Mat& m) { return constant_columns(m.transpose()); }

inline std::shared_ptr<const StructureField> constant_structure(const Mat& phi, int epsilon, StructureKind kind,
                                                                const std::optional<Mat>& metric = std::nullopt,
                                                                const std::optional<Vec>& xi = std::nullopt) {
    std::optional<std::vector<VectorFieldExpr>> rows;
    if (metric) rows = constant_rows(*metric);
    std::optional<VectorFieldExpr> reeb;
    if (xi) reeb = constant_field(*xi);
    return std::make_shared<const StructureField>(epsilon, kind, constant_columns(phi), std::move(rows), std::move(reeb));
}

inline DistributionFrame constant_frame(const std::string& name, const Mat& cols) {
    return DistributionFrame(name, constant_columns(cols));
}

inline Mat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) m.col(c) = rng.gaussian(rows);
    return m;
}

inline Mat random_orthogonal(Rng& rng, Eigen::Index n) {
    Eigen::HouseholderQR<Mat> qr(random_matrix(rng, n, n));
    return qr.householderQ() * Mat::Identity(n, n);
}

inline Mat random_spd(Rng& rng, Eigen::Index n) {
    const Mat a = random_matrix(rng, n, n);
    return a.transpose() * a + 0.5 * Mat::Identity(n, n);
}

// Block-diagonal endomorphism with 2x2 blocks e_{2i} -> e_{2i+1}, e_{2i+1} -> eps e_{2i}.
inline Mat standard_phi(Eigen::Index n, int epsilon) {
    Mat phi = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; i += 2) {
        phi(i + 1, i) = 1.0;
        phi(i, i + 1) = epsilon;
    }
    return phi;
}

inline Mat unit_columns(Eigen::Index n, std::initializer_list<Eigen::Index> zero_based) {
    Mat m = Mat::Zero(n, static_cast<Eigen::Index>(zero_based.size()));
    Eigen::Index c = 0;
    for (auto i : zero_based) m(i, c++) = 1.0;
    return m;
}

}  // namespace slantkit::testing
