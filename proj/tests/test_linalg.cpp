#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "slantkit/linalg.hpp"
#include "slantkit/random.hpp"

using namespace slantkit;

namespace {

Mat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) m.col(c) = rng.gaussian(rows);
    return m;
}

Mat random_orthogonal(Rng& rng, Eigen::Index n) {
    Eigen::HouseholderQR<Mat> qr(random_matrix(rng, n, n));
    return qr.householderQ() * Mat::Identity(n, n);
}

MetricAtPoint random_spd(Rng& rng, Eigen::Index n) {
    const Mat a = random_matrix(rng, n, n);
    return MetricAtPoint(a.transpose() * a + 0.5 * Mat::Identity(n, n));
}

AmbientPoint origin(Eigen::Index n) { return AmbientPoint(Vec::Zero(n)); }

}  // namespace

TEST(Metric, InnerProductIsSymmetric) {
    Rng rng(1);
    const auto g = random_spd(rng, 5);
    const Vec u = rng.gaussian(5);
    const Vec v = rng.gaussian(5);
    const TangentVector tu(u, origin(5));
    const TangentVector tv(v, origin(5));
    EXPECT_NEAR(inner(g, tu, tv), inner(g, tv, tu), 1e-12);
    EXPECT_NEAR(inner(g, tu, tv), u.dot(g.matrix() * v), 1e-12);
}

TEST(Metric, RejectsIndefiniteAndAsymmetric) {
    Mat m = Mat::Identity(3, 3);
    m(2, 2) = -1.0;
    EXPECT_THROW(MetricAtPoint{m}, InvariantError);
    Mat a = Mat::Identity(3, 3);
    a(0, 1) = 0.5;
    EXPECT_THROW(MetricAtPoint{a}, InvariantError);
}

TEST(Metric, MismatchedBasePointsRejected) {
    const auto g = MetricAtPoint::identity(2);
    const TangentVector u(Vec::Unit(2, 0), AmbientPoint{0.0, 0.0});
    const TangentVector v(Vec::Unit(2, 1), AmbientPoint{1.0, 0.0});
    EXPECT_THROW(inner(g, u, v), BasePointError);
}

TEST(GramSchmidt, KnownPlane) {
    Mat raw(3, 2);
    raw << 3, 1, 0, 1, 4, 0;
    const auto q = gram_schmidt(MetricAtPoint::identity(3), SubspaceBasis(origin(3), raw));
    Vec e1(3);
    e1 << 0.6, 0.0, 0.8;
    EXPECT_NEAR((q.matrix().col(0) - e1).norm(), 0.0, 1e-15);
    EXPECT_NEAR(q.matrix().col(0).dot(q.matrix().col(1)), 0.0, 1e-15);
}

TEST(GramSchmidt, DependentInputRaisesRankError) {
    Mat raw(3, 2);
    raw << 1, 2, 1, 2, 0, 0;
    EXPECT_THROW(gram_schmidt(MetricAtPoint::identity(3), SubspaceBasis(origin(3), raw)), RankError);
    Mat near(3, 2);
    near << 1, 1, 0, 1e-14, 0, 0;
    EXPECT_THROW(orthonormalize_columns(MetricAtPoint::identity(3), near), RankError);
}

TEST(GramSchmidtProperty, OrthonormalAndSpanPreservedUnderRandomMetrics) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng(derive_seed(11, trial));
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(trial % 6);
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(trial % static_cast<std::uint64_t>(n));
        const auto g = random_spd(rng, n);
        const Mat raw = random_matrix(rng, n, r);
        const Mat q = orthonormalize_columns(g, raw);
        const Mat gram = q.transpose() * g.matrix() * q;
        EXPECT_LT((gram - Mat::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-10);
        const auto raw_on = gram_schmidt(g, SubspaceBasis(origin(n), raw));
        EXPECT_LT(max_principal_angle(g, raw_on, SubspaceBasis(origin(n), q, true)), 1e-10);
        // Same span: projecting the raw vectors onto span(q) changes nothing.
        const Mat p = projector_matrix(g, q);
        EXPECT_LT((p * raw - raw).norm(), 1e-10 * raw.norm());
    }
}

TEST(Projector, CoordinatePlane) {
    Mat b(3, 2);
    b << 1, 0, 0, 1, 0, 0;
    Mat expected = Mat::Zero(3, 3);
    expected(0, 0) = expected(1, 1) = 1.0;
    EXPECT_NEAR((projector(MetricAtPoint::identity(3), SubspaceBasis(origin(3), b, true)) - expected).norm(), 0.0, 1e-15);
}

TEST(Projector, NonOrthonormalBasisRejected) {
    Mat b(2, 1);
    b << 2, 0;
    EXPECT_THROW(projector(MetricAtPoint::identity(2), SubspaceBasis(origin(2), b)), InvariantError);
}

TEST(ProjectorProperty, IdempotentSelfAdjointWithCorrectImage) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng(derive_seed(12, trial));
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(trial % 7);
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(trial % static_cast<std::uint64_t>(n));
        const auto g = random_spd(rng, n);
        const Mat q = orthonormalize_columns(g, random_matrix(rng, n, r));
        const Mat p = projector(g, SubspaceBasis(origin(n), q, true));
        EXPECT_LT((p * p - p).norm(), 1e-10 * std::max(1.0, p.norm()));
        EXPECT_LT((g.matrix() * p - p.transpose() * g.matrix()).norm(), 1e-10 * g.matrix().norm() * std::max(1.0, p.norm()));
        EXPECT_LT((p * q - q).norm(), 1e-10);
        const Mat c = orthogonal_complement(g, q);
        EXPECT_EQ(c.cols(), n - r);
        if (c.cols() > 0) {
            EXPECT_LT((p * c).norm(), 1e-9 * std::max(1.0, c.norm()));
        }
    }
}

TEST(SymEigen, ZeroMatrix) {
    const auto e = sym_eigen(Mat::Zero(2, 2));
    EXPECT_EQ(e.values(0), 0.0);
    EXPECT_EQ(e.values(1), 0.0);
}

TEST(SymEigen, KnownSpectrum) {
    Mat a(2, 2);
    a << 2, 1, 1, 2;
    const auto e = sym_eigen(a);
    EXPECT_NEAR(e.values(0), 1.0, 1e-14);
    EXPECT_NEAR(e.values(1), 3.0, 1e-14);
}

TEST(SymEigen, AsymmetricRejected) {
    Mat a(2, 2);
    a << 0, 1, 0, 0;
    EXPECT_THROW(sym_eigen(a), SymmetryError);
}

TEST(SymEigenProperty, ResidualAndOrthogonality) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng(derive_seed(13, trial));
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(trial % 9);
        const Mat m = random_matrix(rng, n, n);
        const Mat a = m + m.transpose();
        const auto e = sym_eigen(a);
        for (Eigen::Index i = 0; i < n; ++i)
            EXPECT_LE((a * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm(), 1e-10 * std::max(1.0, a.norm()));
        EXPECT_LT((e.vectors.transpose() * e.vectors - Mat::Identity(n, n)).norm(), 1e-12);
        for (Eigen::Index i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
    }
}

TEST(PrincipalAngles, LinesAtKnownAngle) {
    for (double t : {0.0, 1e-9, 0.3, std::numbers::pi / 4, 1.2, std::numbers::pi / 2 - 1e-9, std::numbers::pi / 2}) {
        Mat a(2, 1);
        a << 1, 0;
        Mat b(2, 1);
        b << std::cos(t), std::sin(t);
        const auto angles = principal_angles(MetricAtPoint::identity(2), SubspaceBasis(origin(2), a, true),
                                             SubspaceBasis(origin(2), b, true));
        ASSERT_EQ(angles.size(), 1U);
        EXPECT_NEAR(angles[0], t, 1e-15);
    }
}

TEST(PrincipalAngles, PlaneTiltedAboutSharedAxis) {
    const double t = 0.7;
    Mat a = Mat::Zero(3, 2);
    a(0, 0) = a(1, 1) = 1.0;
    Mat b = Mat::Zero(3, 2);
    b(0, 0) = 1.0;
    b(1, 1) = std::cos(t);
    b(2, 1) = std::sin(t);
    const auto angles =
        principal_angles(MetricAtPoint::identity(3), SubspaceBasis(origin(3), a, true), SubspaceBasis(origin(3), b, true));
    ASSERT_EQ(angles.size(), 2U);
    EXPECT_NEAR(angles[0], 0.0, 1e-15);
    EXPECT_NEAR(angles[1], t, 1e-15);
}

TEST(PrincipalAnglesProperty, InvariantUnderOrthogonalConjugation) {
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        Rng rng(derive_seed(14, trial));
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(trial % 5);
        const auto g = MetricAtPoint::identity(static_cast<std::size_t>(n));
        const Mat a = orthonormalize_columns(g, random_matrix(rng, n, 2));
        const Mat b = orthonormalize_columns(g, random_matrix(rng, n, 2));
        const Mat q = random_orthogonal(rng, n);
        const auto before = principal_angles(g, SubspaceBasis(origin(n), a, true), SubspaceBasis(origin(n), b, true));
        const auto after = principal_angles(g, SubspaceBasis(origin(n), q * a, true), SubspaceBasis(origin(n), q * b, true));
        ASSERT_EQ(before.size(), after.size());
        for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(before[i], after[i], 1e-10);
    }
}

TEST(PrincipalAnglesProperty, MetricChangeMatchesEuclideanPicture) {
    // Angles in metric g equal Euclidean angles after mapping by L^T, where g = L L^T.
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        Rng rng(derive_seed(15, trial));
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(trial % 5);
        const auto g = random_spd(rng, n);
        const Mat a = orthonormalize_columns(g, random_matrix(rng, n, 2));
        const Mat b = orthonormalize_columns(g, random_matrix(rng, n, 1 + static_cast<Eigen::Index>(trial % 2)));
        const Mat lt = g.cholesky_lower().transpose();
        const auto e = MetricAtPoint::identity(static_cast<std::size_t>(n));
        const auto in_g = principal_angles(g, SubspaceBasis(origin(n), a, true), SubspaceBasis(origin(n), b, true));
        const auto in_e = principal_angles(e, SubspaceBasis(origin(n), lt * a, true), SubspaceBasis(origin(n), lt * b, true));
        ASSERT_EQ(in_g.size(), in_e.size());
        for (std::size_t i = 0; i < in_g.size(); ++i) {
            EXPECT_NEAR(in_g[i], in_e[i], 1e-10);
            EXPECT_GE(in_g[i], 0.0);
            EXPECT_LE(in_g[i], std::numbers::pi / 2 + 1e-15);
        }
    }
}

TEST(PrincipalAnglesProperty, SymmetricInArguments) {
    Rng rng(16);
    const auto g = random_spd(rng, 6);
    const Mat a = orthonormalize_columns(g, random_matrix(rng, 6, 3));
    const Mat b = orthonormalize_columns(g, random_matrix(rng, 6, 2));
    const auto ab = principal_angles(g, SubspaceBasis(origin(6), a, true), SubspaceBasis(origin(6), b, true));
    const auto ba = principal_angles(g, SubspaceBasis(origin(6), b, true), SubspaceBasis(origin(6), a, true));
    ASSERT_EQ(ab.size(), 2U);
    for (std::size_t i = 0; i < ab.size(); ++i) EXPECT_NEAR(ab[i], ba[i], 1e-12);
}
