#include <cmath>
#include <cstdlib>
#include <set>

#include <gtest/gtest.h>

#include "slantkit/gallery.hpp"
#include "slantkit/verifier.hpp"
#include "support.hpp"

using namespace slantkit;
using namespace slantkit::testing;

namespace {

Mat slant_plane(Eigen::Index n, Eigen::Index first, double t) {
    Mat m = Mat::Zero(n, 2);
    m(first, 0) = 1.0;
    m(first + 1, 1) = std::cos(t);
    m(first + 2, 1) = std::sin(t);
    return m;
}

std::vector<AmbientPoint> points(Eigen::Index n, std::size_t count = 3) {
    std::vector<AmbientPoint> out{AmbientPoint(Vec::Zero(n))};
    Rng rng(9);
    for (std::size_t i = 1; i < count; ++i) out.emplace_back(rng.gaussian(n));
    return out;
}

// Invariant plane plus one slant plane in dimension 8 leaves an invariant plane outside
// the slant part and its dual, so the remainder H is nonzero.
Decomposition with_remainder(int eps, bool contact, std::optional<Mat> metric_change = std::nullopt) {
    const Eigen::Index m = 8;
    const Eigen::Index n = contact ? m + 1 : m;
    Mat phi = Mat::Zero(n, n);
    phi.topLeftCorner(m, m) = standard_phi(m, eps);
    Mat d0 = Mat::Zero(n, 2);
    d0.topRows(m) = unit_columns(m, {0, 1});
    Mat d1 = Mat::Zero(n, 2);
    d1.topRows(m) = slant_plane(m, 2, 0.9);
    std::optional<Vec> xi;
    if (contact) xi = Vec::Unit(n, n - 1);
    std::optional<Mat> metric;
    if (metric_change) {
        const Mat& a = *metric_change;
        const Mat ainv = a.inverse();
        phi = ainv * phi * a;
        d0 = ainv * d0;
        d1 = ainv * d1;
        if (xi) xi = ainv * *xi;
        metric = a.transpose() * a;
    }
    const auto s = constant_structure(phi, eps, contact ? StructureKind::contact_like : StructureKind::hermitian_like, metric, xi);
    return Decomposition(s, constant_frame("D0", d0), {constant_frame("D1", d1)});
}

const std::set<std::string> remainder_keys{"h.ww", "h.w-metric", "h.w-norm", "h.f-null", "h.phi-image", "angle.h.w"};

}  // namespace

TEST(Registry, KeysUniqueWithStatements) {
    const auto& reg = identity_registry();
    EXPECT_EQ(reg.size(), 88U);
    std::set<std::string> keys;
    for (const auto& c : reg) {
        EXPECT_TRUE(keys.insert(c.key).second) << c.key;
        EXPECT_FALSE(c.statement.empty()) << c.key;
        EXPECT_FALSE(c.topic.empty()) << c.key;
        EXPECT_TRUE(static_cast<bool>(c.eval)) << c.key;
    }
    for (const auto& k : remainder_keys) EXPECT_TRUE(keys.count(k)) << k;
}

TEST(IdentitySuite, RemainderKeysEvaluateAndPass) {
    for (bool contact : {false, true}) {
        for (int eps : {-1, 1}) {
            const auto dec = with_remainder(eps, contact);
            const auto r = run_identity_suite(dec, points(static_cast<Eigen::Index>(dec.n())), 30);
            for (const auto& x : r.results) {
                EXPECT_NE(x.verdict, "fail") << x.key << " eps=" << eps << " contact=" << contact << " " << x.note;
                if (remainder_keys.count(x.key)) {
                    EXPECT_EQ(x.verdict, "pass") << x.key;
                }
            }
            EXPECT_TRUE(r.passed());
        }
    }
}

TEST(IdentitySuiteProperty, PassUnderSpdMetricChange) {
    for (std::uint64_t trial = 0; trial < 6; ++trial) {
        Rng rng(derive_seed(61, trial));
        const bool contact = trial % 2;
        const int eps = trial % 4 < 2 ? -1 : 1;
        const Eigen::Index n = contact ? 9 : 8;
        const Mat a = random_orthogonal(rng, n) * (0.2 * random_matrix(rng, n, n) + Mat::Identity(n, n));
        const auto dec = with_remainder(eps, contact, a);
        const auto r = run_identity_suite(dec, points(n, 2), 20, 1e-8);
        for (const auto& x : r.results) EXPECT_NE(x.verdict, "fail") << x.key << " trial " << trial << " " << x.note;
    }
}

TEST(IdentitySuite, SettingFilterSkipsOtherKind) {
    const auto dec = with_remainder(-1, false);
    const auto r = run_identity_suite(dec, points(8), 5);
    const auto* contact_key = r.find("contact.phi-dg");
    ASSERT_NE(contact_key, nullptr);
    EXPECT_EQ(contact_key->verdict, "skipped(setting)");
    const auto* herm_key = r.find("phi.square.hermitian");
    ASSERT_NE(herm_key, nullptr);
    EXPECT_EQ(herm_key->verdict, "pass");
}

TEST(IdentitySuite, GalleryConstantFixturesPass) {
    for (const char* id : {"ex1", "ex3"}) {
        for (int eps : {-1, 1}) {
            const auto fx = build_fixture(id, {2, eps, std::nullopt, std::nullopt});
            const auto r = run_identity_suite(fx.decomposition(), default_sample_points(fx), 20);
            EXPECT_TRUE(r.passed()) << id;
            EXPECT_GT(r.count("pass"), 70U);
            for (const auto& x : r.results) {
                if (x.max_residual) {
                    EXPECT_LE(*x.max_residual, 1e-9) << x.key;
                }
            }
        }
    }
}

TEST(IdentitySuite, PerturbedStructureFailsCompatibility) {
    Mat phi = standard_phi(8, -1);
    phi(1, 0) += 1e-3;
    const auto s = constant_structure(phi, -1, StructureKind::hermitian_like);
    const Decomposition dec(s, constant_frame("D0", unit_columns(8, {0, 1})), {constant_frame("D1", slant_plane(8, 2, 0.9))});
    const auto r = run_identity_suite(dec, points(8), 50);
    EXPECT_FALSE(r.passed());
    const auto* compat = r.find("compat.phi");
    ASSERT_NE(compat, nullptr);
    EXPECT_EQ(compat->verdict, "fail");
    ASSERT_TRUE(compat->max_residual.has_value());
    EXPECT_GE(*compat->max_residual, 1e-4);
    ASSERT_TRUE(compat->witness_point.has_value());
}

TEST(IdentitySuite, DualSubsetOnly) {
    const auto dec = with_remainder(-1, false);
    const auto r = dual_identity_suite(dec, points(8), 5);
    ASSERT_FALSE(r.results.empty());
    std::set<std::string> dual_keys;
    for (const auto& c : identity_registry())
        if (c.needs == Needs::dual) dual_keys.insert(c.key);
    EXPECT_EQ(r.results.size(), dual_keys.size());
    for (const auto& x : r.results) EXPECT_TRUE(dual_keys.count(x.key)) << x.key;
}

TEST(IdentitySuite, DeterministicAcrossThreadCounts) {
    const auto dec = with_remainder(1, true);
    const auto pts = points(9, 4);
    ::setenv("SLANTKIT_THREADS", "1", 1);
    const auto a = run_identity_suite(dec, pts, 10);
    ::setenv("SLANTKIT_THREADS", "4", 1);
    const auto b = run_identity_suite(dec, pts, 10);
    ::unsetenv("SLANTKIT_THREADS");
    ASSERT_EQ(a.results.size(), b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        EXPECT_EQ(a.results[i].key, b.results[i].key);
        EXPECT_EQ(a.results[i].max_residual, b.results[i].max_residual);
        EXPECT_EQ(a.results[i].verdict, b.results[i].verdict);
    }
}

TEST(Connection, ConstantFixturesHaveParallelF2) {
    for (const char* id : {"ex1", "ex3"}) {
        const auto fx = build_fixture(id);
        const auto r = connection_criterion_report(fx.decomposition(), {}, default_sample_points(fx));
        EXPECT_LE(r.nabla_max(), 1e-4) << id;
        EXPECT_LE(r.lambda_rate_max(), 1e-4) << id;
        EXPECT_TRUE(r.consistent) << id;
    }
}

TEST(Connection, PointwiseFixturesMoveAtUnitPoints) {
    for (const char* id : {"ex5", "ex9"}) {
        const auto fx = build_fixture(id, {2, -1, 1.0, std::nullopt});
        // Two unit points carry the same angles, so the origin is added to let the
        // classifier see the variation too.
        std::vector<AmbientPoint> unit{AmbientPoint(Vec::Zero(static_cast<Eigen::Index>(fx.n())))};
        for (auto c : {fx.mask[0], fx.mask[2]}) unit.emplace_back(Vec::Unit(static_cast<Eigen::Index>(fx.n()), static_cast<Eigen::Index>(c)));
        const auto r = connection_criterion_report(fx.decomposition(), {}, unit);
        EXPECT_GE(r.lambda_rate_max(), 1e-2) << id;
        EXPECT_TRUE(r.consistent) << id;
    }
}

TEST(Connection, ClassifierAgreesOnEveryFixture) {
    for (const auto& id : fixture_ids()) {
        const auto fx = build_fixture(id);
        const auto r = connection_criterion_report(fx.decomposition(), {}, default_sample_points(fx));
        EXPECT_TRUE(r.consistent) << id;
        EXPECT_LE(r.hypothesis_residual, 1e-9) << id;
        for (const auto& c : r.components) EXPECT_EQ(c.classifier_constant, c.derivative_constant) << id << " " << c.name;
    }
}

TEST(Connection, NablaOfQuadraticCoefficient) {
    // On ex4 with gamma = 0, delta = 1, j = 1 the cosine coefficient is r / sqrt(r^2 + 1)
    // with r = |x|^2, and lambda = -cos^2, so X(lambda) = -2 a a' X(r).
    const auto fx = build_fixture("ex4", {2, -1, 0.0, 1.0});
    const auto& dec = fx.decomposition();
    const Eigen::Index n = static_cast<Eigen::Index>(fx.n());
    Vec p = Vec::Zero(n);
    p(static_cast<Eigen::Index>(fx.mask[0])) = 0.8;
    const Vec x = Vec::Unit(n, static_cast<Eigen::Index>(fx.mask[0]));
    const double r = 0.64;
    const double a = r / std::sqrt(r * r + 1);
    const double da_dr = 1.0 / std::pow(r * r + 1, 1.5);
    const double expected = -2 * a * da_dr * 2 * 0.8;
    const double got = detail::lambda_derivative(dec, AmbientPoint(p), x, -a * a, 1e-5, 1e-8);
    EXPECT_NEAR(got, expected, 1e-7);
}

TEST(Connection, RejectsCurvedMetricAndOffMaskDirections) {
    const auto curved = with_remainder(-1, false, Mat(2.0 * Mat::Identity(8, 8)));
    EXPECT_THROW(connection_criterion_report(curved, {}, points(8)), UnsupportedError);
    const auto fx = build_fixture("ex1");
    const Eigen::Index n = static_cast<Eigen::Index>(fx.n());
    const Vec off = Vec::Unit(n, 4);  // x5 is outside the mask
    EXPECT_THROW(nabla_f2(fx.decomposition(), {}, AmbientPoint(Vec::Zero(n)), off, off), ArgumentError);
    EXPECT_EQ(nabla_f2(fx.decomposition(), {}, AmbientPoint(Vec::Zero(n)), Vec::Zero(n), Vec::Ones(n)).norm(), 0.0);
}
