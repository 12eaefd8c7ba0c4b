#pragma once

// Dense linear algebra on a tangent space with a (possibly non-Euclidean) metric.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "slantkit/errors.hpp"

namespace slantkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class AmbientPoint {
public:
    AmbientPoint() = default;

    explicit AmbientPoint(Vec coords) : coords_(std::move(coords)) {
        if (!coords_.allFinite()) throw InvariantError("ambient point has non-finite coordinates");
    }

    AmbientPoint(std::initializer_list<double> coords)
        : AmbientPoint(Vec(Eigen::Map<const Vec>(coords.begin(), static_cast<Eigen::Index>(coords.size())))) {}

    [[nodiscard]] const Vec& coords() const noexcept { return coords_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(coords_.size()); }
    [[nodiscard]] double operator[](std::size_t i) const { return coords_(static_cast<Eigen::Index>(i)); }

    friend bool operator==(const AmbientPoint& a, const AmbientPoint& b) {
        return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
    }

private:
    Vec coords_;
};

class TangentVector {
public:
    TangentVector(Vec comps, AmbientPoint base) : comps_(std::move(comps)), base_(std::move(base)) {
        if (static_cast<std::size_t>(comps_.size()) != base_.dim())
            throw DimensionError("tangent vector length differs from base point dimension");
        if (!comps_.allFinite()) throw InvariantError("tangent vector has non-finite components");
    }

    [[nodiscard]] const Vec& comps() const noexcept { return comps_; }
    [[nodiscard]] const AmbientPoint& base() const noexcept { return base_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(comps_.size()); }

private:
    Vec comps_;
    AmbientPoint base_;
};

class MetricAtPoint {
public:
    explicit MetricAtPoint(Mat matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
            throw DimensionError("metric must be a non-empty square matrix");
        if (!matrix_.allFinite()) throw InvariantError("metric has non-finite entries");
        const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
        if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvariantError("metric is not symmetric");
        matrix_ = 0.5 * (matrix_ + matrix_.transpose());
        Eigen::LLT<Mat> llt(matrix_);
        if (llt.info() != Eigen::Success) throw InvariantError("metric is not positive definite");
        lower_ = llt.matrixL();
    }

    static MetricAtPoint identity(std::size_t n) {
        return MetricAtPoint(Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    }

    [[nodiscard]] const Mat& matrix() const noexcept { return matrix_; }
    // Cholesky factor L with g = L L^T; L^T maps to Euclidean coordinates.
    [[nodiscard]] const Mat& cholesky_lower() const noexcept { return lower_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

    [[nodiscard]] double operator()(const Vec& u, const Vec& v) const { return u.dot(matrix_ * v); }
    [[nodiscard]] double norm(const Vec& u) const { return std::sqrt(std::max(0.0, (*this)(u, u))); }

private:
    Mat matrix_;
    Mat lower_;
};

// r vectors (stored as the columns of an n x r matrix) at a common base point.
class SubspaceBasis {
public:
    SubspaceBasis(AmbientPoint base, Mat vectors, bool orthonormal = false)
        : base_(std::move(base)), vectors_(std::move(vectors)), orthonormal_(orthonormal) {
        if (static_cast<std::size_t>(vectors_.rows()) != base_.dim() && vectors_.cols() > 0)
            throw DimensionError("basis vectors do not match the base point dimension");
        if (vectors_.cols() == 0) vectors_.resize(static_cast<Eigen::Index>(base_.dim()), 0);
        if (!vectors_.allFinite()) throw InvariantError("basis has non-finite entries");
        if (vectors_.cols() > 0) {
            const double scale = vectors_.colwise().norm().maxCoeff();
            if (scale == 0.0) throw RankError("basis contains only zero vectors");
            Eigen::JacobiSVD<Mat> svd(vectors_);
            const auto& s = svd.singularValues();
            if (vectors_.cols() > vectors_.rows() || s(s.size() - 1) <= 1e-12 * scale)
                throw RankError("basis vectors are linearly dependent");
        }
    }

    [[nodiscard]] const AmbientPoint& base() const noexcept { return base_; }
    [[nodiscard]] const Mat& matrix() const noexcept { return vectors_; }
    [[nodiscard]] std::size_t rank() const noexcept { return static_cast<std::size_t>(vectors_.cols()); }
    [[nodiscard]] std::size_t dim() const noexcept { return base_.dim(); }
    [[nodiscard]] bool orthonormal() const noexcept { return orthonormal_; }
    [[nodiscard]] TangentVector vector(std::size_t i) const {
        return TangentVector(vectors_.col(static_cast<Eigen::Index>(i)), base_);
    }

private:
    AmbientPoint base_;
    Mat vectors_;
    bool orthonormal_;
};

inline double inner(const MetricAtPoint& g, const TangentVector& u, const TangentVector& v) {
    if (u.dim() != g.dim() || v.dim() != g.dim()) throw DimensionError("vector and metric dimensions differ");
    if (!(u.base() == v.base())) throw BasePointError("vectors live at different base points");
    return g(u.comps(), v.comps());
}

namespace detail {

inline double max_gram_defect(const MetricAtPoint& g, const Mat& q) {
    if (q.cols() == 0) return 0.0;
    const Mat gram = q.transpose() * g.matrix() * q;
    return (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

inline void require_orthonormal(const MetricAtPoint& g, const SubspaceBasis& b) {
    if (b.dim() != g.dim()) throw DimensionError("basis and metric dimensions differ");
    if (max_gram_defect(g, b.matrix()) > 1e-10) throw InvariantError("basis is not g-orthonormal");
}

}  // namespace detail

// Modified Gram-Schmidt with one re-orthogonalization pass. Works on raw columns.
inline Mat orthonormalize_columns(const MetricAtPoint& g, const Mat& raw) {
    const Eigen::Index r = raw.cols();
    Mat q(raw.rows(), r);
    if (r == 0) return q;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < r; ++j) scale = std::max(scale, g.norm(raw.col(j)));
    if (scale == 0.0) throw RankError("all input vectors are zero");
    const Mat& gm = g.matrix();
    for (Eigen::Index j = 0; j < r; ++j) {
        Vec v = raw.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < j; ++i) v -= q.col(i).dot(gm * v) * q.col(i);
        }
        const double pivot = g.norm(v);
        if (pivot < 1e-12 * scale) throw RankError("input vectors are linearly dependent (column " + std::to_string(j) + ")");
        q.col(j) = v / pivot;
    }
    return q;
}

inline SubspaceBasis gram_schmidt(const MetricAtPoint& g, const SubspaceBasis& raw) {
    if (raw.dim() != g.dim()) throw DimensionError("basis and metric dimensions differ");
    return SubspaceBasis(raw.base(), orthonormalize_columns(g, raw.matrix()), true);
}

inline Mat projector_matrix(const MetricAtPoint& g, const Mat& orthonormal_cols) {
    return orthonormal_cols * orthonormal_cols.transpose() * g.matrix();
}

inline Mat projector(const MetricAtPoint& g, const SubspaceBasis& basis) {
    detail::require_orthonormal(g, basis);
    return projector_matrix(g, basis.matrix());
}

// g-orthonormal basis of the g-orthogonal complement of span(orthonormal_cols).
inline Mat orthogonal_complement(const MetricAtPoint& g, const Mat& orthonormal_cols) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.dim());
    const Eigen::Index r = orthonormal_cols.cols();
    const Mat& lower = g.cholesky_lower();
    // Euclidean picture: y = L^T x.
    Mat y = lower.transpose() * orthonormal_cols;
    Mat complement_y;
    if (r == 0) {
        complement_y = Mat::Identity(n, n);
    } else {
        Eigen::HouseholderQR<Mat> qr(y);
        const Mat q = qr.householderQ() * Mat::Identity(n, n);
        complement_y = q.rightCols(n - r);
    }
    return lower.transpose().triangularView<Eigen::Upper>().solve(complement_y);
}

struct EigenDecomposition {
    Vec values;   // ascending
    Mat vectors;  // columns, orthonormal
};

inline EigenDecomposition sym_eigen(const Mat& a) {
    if (a.rows() == 0 || a.rows() != a.cols()) throw DimensionError("sym_eigen needs a non-empty square matrix");
    if (!a.allFinite()) throw InvariantError("matrix has non-finite entries");
    const double norm = a.norm();
    if ((a - a.transpose()).norm() > 1e-9 * norm) throw SymmetryError("matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (a + a.transpose()));
    if (solver.info() != Eigen::Success) throw InvariantError("eigensolver did not converge");
    EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
            const double c = out.vectors(i, j);
            if (std::abs(c) > 1e-12) {
                if (c < 0) out.vectors.col(j) *= -1.0;
                break;
            }
        }
    }
    return out;
}

// Principal angles between two subspaces, ascending. Small angles come from sines,
// large ones from cosines, so both ends of [0, pi/2] stay accurate.
inline std::vector<double> principal_angles(const MetricAtPoint& g, const SubspaceBasis& a, const SubspaceBasis& b) {
    if (a.dim() != g.dim() || b.dim() != g.dim()) throw DimensionError("subspace and metric dimensions differ");
    if (!(a.base() == b.base())) throw BasePointError("subspaces live at different base points");
    detail::require_orthonormal(g, a);
    detail::require_orthonormal(g, b);
    const Mat* big = &a.matrix();
    const Mat* small = &b.matrix();
    if (big->cols() < small->cols()) std::swap(big, small);
    const Eigen::Index r = small->cols();
    std::vector<double> angles;
    if (r == 0) return angles;

    const Mat cross = big->transpose() * g.matrix() * *small;
    const Vec cosines = Eigen::JacobiSVD<Mat>(cross).singularValues();  // descending
    const Mat residual = *small - *big * cross;
    const Vec sines_desc = Eigen::JacobiSVD<Mat>(g.cholesky_lower().transpose() * residual).singularValues();

    angles.reserve(static_cast<std::size_t>(r));
    for (Eigen::Index k = 0; k < r; ++k) {
        const double c = std::min(1.0, cosines(k));
        const double s = std::min(1.0, sines_desc(r - 1 - k));
        angles.push_back(c * c >= 0.5 ? std::asin(s) : std::acos(c));
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

inline double max_principal_angle(const MetricAtPoint& g, const SubspaceBasis& a, const SubspaceBasis& b) {
    const auto angles = principal_angles(g, a, b);
    return angles.empty() ? 0.0 : angles.back();
}

}  // namespace slantkit
