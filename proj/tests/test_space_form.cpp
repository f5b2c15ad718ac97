#include <gtest/gtest.h>

#include <random>

#include "natlift/fd_geometry.hpp"
#include "natlift/space_form.hpp"

using natlift::Array3;
using natlift::Array4;
using natlift::Matrix;
using natlift::SpaceForm;
using natlift::Vector;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Vector random_point(std::mt19937_64& rng, int n, double radius) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(n);
    do {
        for (int i = 0; i < n; ++i) x(i) = u(rng);
    } while (x.norm() > 1.0);
    return radius * x;
}

}  // namespace

TEST(SpaceForm, MetricIsIdentityAtOrigin) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto m = natlift::metric(SpaceForm{3, c}, Vector::Zero(3));
        EXPECT_TRUE(m.g.isApprox(Matrix::Identity(3, 3)));
    }
}

TEST(SpaceForm, MetricValueOnSphere) {
    const auto m = natlift::metric(SpaceForm{2, 1.0}, vec({1.0, 0.0}));
    EXPECT_NEAR(m.g(0, 0), 0.64, 1e-15);
    EXPECT_NEAR(m.g(1, 1), 0.64, 1e-15);
    EXPECT_EQ(m.g(0, 1), 0.0);
    EXPECT_LT((m.g * m.g_inv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpaceForm, FlatMetricEverywhere) {
    const auto m = natlift::metric(SpaceForm{2, 0.0}, vec({3.0, -7.0}));
    EXPECT_TRUE(m.g.isApprox(Matrix::Identity(2, 2)));
}

TEST(SpaceForm, ChartDomainViolationThrows) {
    EXPECT_THROW(natlift::metric(SpaceForm{2, -1.0}, vec({2.0, 0.0})), natlift::ChartDomainError);
    EXPECT_THROW(natlift::metric(SpaceForm{2, 1.0}, vec({1.0})), natlift::ChartDomainError);
}

TEST(SpaceForm, DimensionBelowTwoRejected) { EXPECT_THROW((SpaceForm{1, 1.0}).validate(), natlift::ConfigError); }

TEST(SpaceForm, ChristoffelVanishesAtOriginAndWhenFlat) {
    EXPECT_LT(natlift::christoffel(SpaceForm{3, 1.0}, Vector::Zero(3)).max_abs(), 1e-15);
    EXPECT_LT(natlift::christoffel(SpaceForm{3, 0.0}, vec({0.4, -0.2, 0.1})).max_abs(), 1e-15);
}

TEST(SpaceForm, ChristoffelReferenceValues) {
    // Symbolic reference values at x = (0.3, 0.1), c = 1.
    const Array3 g = natlift::christoffel(SpaceForm{2, 1.0}, vec({0.3, 0.1}));
    const double a = 0.14634146341463415, b = 0.048780487804878049;
    const double want[2][2][2] = {{{-a, -b}, {-b, a}}, {{b, -a}, {-a, -b}}};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) EXPECT_NEAR(g(k, i, j), want[k][i][j], 1e-15);
    EXPECT_LT(max_abs_diff(g, natlift::christoffel_fd(SpaceForm{2, 1.0}, vec({0.3, 0.1}))), 1e-6);
}

TEST(SpaceForm, CurvatureClosedFormValues) {
    const Array4 r = natlift::curvature(SpaceForm{2, 1.0}, Vector::Zero(2));
    EXPECT_DOUBLE_EQ(r(0, 1, 0, 1), 1.0);  // R^1_212 in one-based indices
    EXPECT_LT(natlift::curvature(SpaceForm{3, 0.0}, vec({0.2, 0.1, 0.0})).max_abs(), 1e-15);
}

TEST(SpaceFormProperty, ClosedFormsMatchFiniteDifferences) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 2;
        const double c = (trial % 3) - 1.0;
        const SpaceForm sf{n, c};
        const Vector x = random_point(rng, n, 0.9);
        EXPECT_LT(max_abs_diff(natlift::christoffel(sf, x), natlift::christoffel_fd(sf, x)), 1e-6);
        EXPECT_LT(max_abs_diff(natlift::curvature(sf, x), natlift::curvature_fd(sf, x)), 1e-5);
    }
}

TEST(SpaceFormProperty, SectionalCurvatureEqualsC) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3;
        const double c = trial % 2 ? 0.7 : -0.4;
        const SpaceForm sf{n, c};
        const Vector x = random_point(rng, n, 0.8);
        Vector u(n), v(n);
        for (int i = 0; i < n; ++i) {
            u(i) = nd(rng);
            v(i) = nd(rng);
        }
        const Matrix g = natlift::metric(sf, x).g;
        EXPECT_NEAR(natlift::fd::sectional_curvature(g, natlift::curvature_fd(sf, x), u, v), c, 1e-6);
        EXPECT_NEAR(natlift::fd::sectional_curvature(g, natlift::curvature(sf, x), u, v), c, 1e-12);
    }
}

TEST(SpaceFormProperty, FirstBianchiAndAntisymmetry) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const SpaceForm sf{3, 1.0};
        const Array4 r = natlift::curvature(sf, random_point(rng, 3, 0.8));
        for (int h = 0; h < 3; ++h)
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        EXPECT_NEAR(r(h, k, i, j) + r(h, i, j, k) + r(h, j, k, i), 0.0, 1e-10);
                        EXPECT_NEAR(r(h, k, i, j) + r(h, k, j, i), 0.0, 1e-15);
                    }
    }
}
