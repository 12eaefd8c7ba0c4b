#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "slantkit/classifier.hpp"
#include "support.hpp"

using namespace slantkit;
using namespace slantkit::testing;

namespace {

std::vector<AmbientPoint> points(Eigen::Index n) {
    std::vector<AmbientPoint> out{AmbientPoint(Vec::Zero(n))};
    Rng rng(8);
    for (int i = 0; i < 3; ++i) out.emplace_back(rng.gaussian(n));
    return out;
}

Decomposition declared(std::shared_ptr<const StructureField> s, std::optional<Mat> invariant, const std::vector<Mat>& proper) {
    std::optional<DistributionFrame> inv;
    if (invariant) inv = constant_frame("D0", *invariant);
    std::vector<DistributionFrame> frames;
    for (std::size_t i = 0; i < proper.size(); ++i) frames.push_back(constant_frame("D" + std::to_string(i + 1), proper[i]));
    return Decomposition(std::move(s), std::move(inv), std::move(frames));
}

// span(e1, cos(t) e2 + sin(t) e3): slant with angle t under the standard structure.
Mat slant_plane(Eigen::Index n, Eigen::Index first, double t) {
    Mat m = Mat::Zero(n, 2);
    m(first, 0) = 1.0;
    m(first + 1, 1) = std::cos(t);
    m(first + 2, 1) = std::sin(t);
    return m;
}

const ComponentSummary& component(const ClassificationReport& r, const std::string& name) {
    for (const auto& c : r.components)
        if (c.name == name) return c;
    throw std::out_of_range(name);
}

}  // namespace

TEST(Spectrum, SlantPlaneAngleAndEigenvalue) {
    for (int eps : {-1, 1}) {
        for (double t : {0.2, 0.9, 1.3}) {
            const auto s = constant_structure(standard_phi(4, eps), eps, StructureKind::hermitian_like);
            const auto dec = declared(s, std::nullopt, {slant_plane(4, 0, t)});
            const auto spec = slant_spectrum(dec, AmbientPoint(Vec::Zero(4)));
            ASSERT_EQ(spec.clusters.size(), 1U);
            EXPECT_NEAR(spec.clusters[0].theta, t, 1e-12);
            EXPECT_NEAR(spec.clusters[0].lambda, eps * std::cos(t) * std::cos(t), 1e-12);
            EXPECT_EQ(spec.clusters[0].multiplicity, 2U);
        }
    }
}

TEST(Spectrum, InvariantAndAntiInvariantEndpoints) {
    const auto s = constant_structure(standard_phi(4, -1), -1, StructureKind::hermitian_like);
    const auto inv = slant_spectrum(declared(s, unit_columns(4, {0, 1}), {}), AmbientPoint(Vec::Zero(4)));
    ASSERT_EQ(inv.clusters.size(), 1U);
    EXPECT_NEAR(inv.clusters[0].lambda, -1.0, 1e-14);
    EXPECT_NEAR(inv.clusters[0].theta, 0.0, 1e-7);
    const auto anti = slant_spectrum(declared(s, std::nullopt, {unit_columns(4, {0, 2})}), AmbientPoint(Vec::Zero(4)));
    ASSERT_EQ(anti.clusters.size(), 1U);
    EXPECT_NEAR(anti.clusters[0].lambda, 0.0, 1e-14);
    EXPECT_NEAR(anti.clusters[0].theta, std::numbers::pi / 2, 1e-14);
}

TEST(Classify, SingleSlantComponent) {
    const auto s = constant_structure(standard_phi(4, -1), -1, StructureKind::hermitian_like);
    const auto r = classify(declared(s, std::nullopt, {slant_plane(4, 0, 0.8)}), points(4));
    EXPECT_TRUE(r.holds(labels::slant));
    EXPECT_TRUE(r.holds(labels::k_slant));
    EXPECT_TRUE(r.holds(labels::proper));
    EXPECT_FALSE(r.holds(labels::anti_invariant));
    EXPECT_EQ(r.k(), 1U);
    EXPECT_EQ(component(r, "D1").kind, ComponentKind::slant);
    EXPECT_NEAR(component(r, "D1").theta_max(), 0.8, 1e-12);
}

TEST(Classify, AntiInvariant) {
    const auto s = constant_structure(standard_phi(4, -1), -1, StructureKind::hermitian_like);
    const auto r = classify(declared(s, std::nullopt, {unit_columns(4, {0, 2})}), points(4));
    EXPECT_TRUE(r.holds(labels::anti_invariant));
    EXPECT_TRUE(r.holds(labels::slant));  // the right-angle case of a slant distribution
    EXPECT_FALSE(r.holds(labels::skew_cr));
}

TEST(Classify, SemiInvariantIsCR) {
    const auto s = constant_structure(standard_phi(6, -1), -1, StructureKind::hermitian_like);
    const auto r = classify(declared(s, unit_columns(6, {0, 1}), {unit_columns(6, {2, 4})}), points(6));
    EXPECT_TRUE(r.holds(labels::semi_invariant));
    EXPECT_TRUE(r.holds(labels::cr));
    EXPECT_FALSE(r.holds(labels::skew_cr));
    EXPECT_FALSE(r.holds(labels::generic));
    EXPECT_TRUE(lattice_violations(r).empty());
}

TEST(Classify, SemiSlantAndHemiSlant) {
    const auto s = constant_structure(standard_phi(8, -1), -1, StructureKind::hermitian_like);
    const auto semi = classify(declared(s, unit_columns(8, {0, 1}), {slant_plane(8, 2, 0.6)}), points(8));
    EXPECT_TRUE(semi.holds(labels::semi_slant));
    EXPECT_TRUE(semi.holds(labels::skew_cr));
    const auto hemi = classify(declared(s, std::nullopt, {slant_plane(8, 0, 0.6), unit_columns(8, {4, 6})}), points(8));
    EXPECT_TRUE(hemi.holds(labels::hemi_slant));
    EXPECT_TRUE(hemi.holds(labels::k_slant));
    EXPECT_EQ(hemi.k(), 2U);
    const auto bi = classify(declared(s, std::nullopt, {slant_plane(8, 0, 0.6), slant_plane(8, 4, 1.1)}), points(8));
    EXPECT_TRUE(bi.holds(labels::bi_slant));
}

TEST(Classify, EqualAnglesJoinIntoOneComponent) {
    const auto s = constant_structure(standard_phi(8, -1), -1, StructureKind::hermitian_like);
    const auto r = classify(declared(s, std::nullopt, {slant_plane(8, 0, 0.6), slant_plane(8, 4, 0.6)}), points(8));
    EXPECT_EQ(r.k(), 1U);
    EXPECT_TRUE(r.holds(labels::slant));
    EXPECT_FALSE(r.notes.empty());
}

TEST(Classify, CoarseComponentRaisesComponentError) {
    const auto s = constant_structure(standard_phi(6, -1), -1, StructureKind::hermitian_like);
    Mat mixed = unit_columns(6, {0, 1, 2, 4});
    EXPECT_THROW(classify(declared(s, std::nullopt, {mixed}), points(6)), ComponentError);
}

TEST(Classify, NonInvariantSplitRaisesModelError) {
    // D = span(e1, e2) is invariant, but neither line is preserved by f.
    const auto s = constant_structure(standard_phi(4, -1), -1, StructureKind::hermitian_like);
    EXPECT_THROW(classify(declared(s, std::nullopt, {unit_columns(4, {0}), unit_columns(4, {1})}), points(4)), Error);
}

TEST(Classify, DiscoveryModeFindsComponents) {
    const auto s = constant_structure(standard_phi(8, -1), -1, StructureKind::hermitian_like);
    Mat all(8, 6);
    all << unit_columns(8, {0, 1}), slant_plane(8, 2, 0.5), unit_columns(8, {6, 7});
    const auto dec = Decomposition::discovery(s, {constant_frame("D", all)});
    const auto r = classify(dec, points(8));
    EXPECT_TRUE(r.discovery);
    EXPECT_TRUE(r.invariant_part);
    EXPECT_EQ(r.k(), 1U);
    EXPECT_TRUE(r.holds(labels::semi_slant));
}

TEST(ClassifierProperty, EigenvalueRangeAndAngleRelation) {
    // Random subspaces of random conjugates of the standard structure, both signs.
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        Rng rng(derive_seed(41, trial));
        const int eps = trial % 2 ? 1 : -1;
        const Eigen::Index n = 2 * (2 + static_cast<Eigen::Index>(trial % 3));
        const Mat q = random_orthogonal(rng, n);
        const auto s = constant_structure(q * standard_phi(n, eps) * q.transpose(), eps, StructureKind::hermitian_like);
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(trial % static_cast<std::uint64_t>(n - 1));
        const auto dec = Decomposition::discovery(s, {constant_frame("D", random_matrix(rng, n, r))});
        const auto spec = slant_spectrum(dec, AmbientPoint(Vec::Zero(n)));
        for (const auto& c : spec.clusters) {
            EXPECT_GE(eps * c.lambda, -1e-9);
            EXPECT_LE(eps * c.lambda, 1.0 + 1e-9);
            EXPECT_NEAR(c.lambda, eps * std::cos(c.theta) * std::cos(c.theta), 1e-9);
        }
    }
}

TEST(ClassifierProperty, SpectrumInvariantUnderOrthogonalConjugation) {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Rng rng(derive_seed(42, trial));
        const int eps = trial % 2 ? 1 : -1;
        const Eigen::Index n = 6;
        const Mat d = random_matrix(rng, n, 3);
        const Mat q = random_orthogonal(rng, n);
        const auto base = constant_structure(standard_phi(n, eps), eps, StructureKind::hermitian_like);
        const auto turned = constant_structure(q * standard_phi(n, eps) * q.transpose(), eps, StructureKind::hermitian_like);
        const auto a = slant_spectrum(Decomposition::discovery(base, {constant_frame("D", d)}), AmbientPoint(Vec::Zero(n)));
        const auto b = slant_spectrum(Decomposition::discovery(turned, {constant_frame("D", q * d)}), AmbientPoint(Vec::Zero(n)));
        ASSERT_EQ(a.clusters.size(), b.clusters.size());
        for (std::size_t i = 0; i < a.clusters.size(); ++i) {
            EXPECT_NEAR(a.clusters[i].theta, b.clusters[i].theta, 1e-8);
            EXPECT_EQ(a.clusters[i].multiplicity, b.clusters[i].multiplicity);
        }
    }
}

TEST(ClassifierProperty, SpectrumInvariantUnderSpdMetricChange) {
    // (g, phi, D) and (A^T A, A^{-1} phi A, A^{-1} D) are isometric.
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Rng rng(derive_seed(43, trial));
        const int eps = trial % 2 ? 1 : -1;
        const Eigen::Index n = 6;
        const Mat d = random_matrix(rng, n, 2 + static_cast<Eigen::Index>(trial % 3));
        const Mat a = random_matrix(rng, n, n) + 3.0 * Mat::Identity(n, n);
        const Mat ainv = a.inverse();
        const auto flat = constant_structure(standard_phi(n, eps), eps, StructureKind::hermitian_like);
        const auto curved =
            constant_structure(ainv * standard_phi(n, eps) * a, eps, StructureKind::hermitian_like, Mat(a.transpose() * a));
        const auto x = slant_spectrum(Decomposition::discovery(flat, {constant_frame("D", d)}), AmbientPoint(Vec::Zero(n)));
        const auto y =
            slant_spectrum(Decomposition::discovery(curved, {constant_frame("D", ainv * d)}), AmbientPoint(Vec::Zero(n)));
        ASSERT_EQ(x.clusters.size(), y.clusters.size());
        for (std::size_t i = 0; i < x.clusters.size(); ++i) EXPECT_NEAR(x.clusters[i].theta, y.clusters[i].theta, 1e-7);
    }
}

TEST(ClassifierProperty, LatticeHoldsOnRandomDiscoveryRuns) {
    for (std::uint64_t trial = 0; trial < 15; ++trial) {
        Rng rng(derive_seed(44, trial));
        const int eps = trial % 2 ? 1 : -1;
        const Eigen::Index n = 6;
        const auto s = constant_structure(standard_phi(n, eps), eps, StructureKind::hermitian_like);
        try {
            const auto r = classify(Decomposition::discovery(s, {constant_frame("D", random_matrix(rng, n, 3))}), points(n));
            EXPECT_TRUE(lattice_violations(r).empty()) << trial;
            if (r.holds(labels::k_slant)) {
                EXPECT_TRUE(r.holds(labels::k_pointwise_slant));
            }
        } catch (const ModelError&) {
            // A random subspace need not be f-invariant after splitting; nothing to check.
        }
    }
}
