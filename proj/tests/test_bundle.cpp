#include <gtest/gtest.h>

#include <random>

#include "natlift/bundle.hpp"
#include "natlift/harness.hpp"

using namespace natlift;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

MetricCoefficients constant_metric(double c1, double c2, double c3, double d1, double d2, double d3) {
    return {c1, c2, c3, d1, d2, d3};
}

StructureCoefficients constant_structure(double a1, double a2, double a3, double b1, double b2, double b3) {
    return {a1, a2, a3, b1, b2, b3};
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Sample points of a preset, as the harness generates them.
std::vector<SamplePoint> samples_of(const char* name) { return sample_points(*find_preset(name)); }

}  // namespace

TEST(Bundle, EnergyDensity) {
    const CotangentPoint pt = CotangentPoint::make(SpaceForm{2, 0.0}, vec({0.1, 0.2}), vec({0.6, 0.8}));
    EXPECT_DOUBLE_EQ(pt.t, 0.5);
    EXPECT_THROW(CotangentPoint::make(SpaceForm{2, 0.0}, vec({0.1, 0.2}), vec({1.0})), ChartDomainError);
}

TEST(Bundle, SasakiTypeMetricAtOrigin) {
    const CotangentPoint pt = CotangentPoint::make(SpaceForm{2, 1.0}, Vector::Zero(2), vec({0.0, 0.0}));
    const BlockTensor G = assemble_G(pt, constant_metric(1, 1, 0, 0, 0, 0));
    EXPECT_TRUE(G.dense().isApprox(Matrix::Identity(4, 4)));
}

TEST(Bundle, ComplexStructureAtOrigin) {
    const CotangentPoint pt = CotangentPoint::make(SpaceForm{2, 0.0}, Vector::Zero(2), Vector::Zero(2));
    const BlockTensor J = assemble_J(pt, constant_structure(1, 1, 0, 0, 0, 0));
    Matrix want = Matrix::Zero(4, 4);
    want.bottomLeftCorner(2, 2) = Matrix::Identity(2, 2);  // J delta_i = d^i
    want.topRightCorner(2, 2) = -Matrix::Identity(2, 2);   // J d^i = -delta_i
    EXPECT_TRUE(J.dense().isApprox(want));
    EXPECT_EQ(j_square_residual(J), 0.0);
}

TEST(Bundle, InverseOfIdentityMetric) {
    const CotangentPoint pt = CotangentPoint::make(SpaceForm{2, 0.0}, Vector::Zero(2), vec({0.3, 0.4}));
    const BlockTensor H = invert_G_closed_form(pt, constant_metric(1, 1, 0, 0, 0, 0));
    EXPECT_TRUE(H.dense().isApprox(Matrix::Identity(4, 4)));
}

TEST(Bundle, OffDiagonalRankOnePerturbation) {
    const CotangentPoint pt = CotangentPoint::make(SpaceForm{2, 0.0}, Vector::Zero(2), vec({0.6, 0.3}));
    const MetricCoefficients m = constant_metric(1, 1, 0, 0, 0, 0.1);
    const BlockTensor G = assemble_G(pt, m);
    // G(d^j, delta_k) = d3 p_j p_k at the origin.
    EXPECT_NEAR(G.vh(0, 1), 0.1 * 0.6 * 0.3, 1e-15);
    EXPECT_NEAR(G.hv(1, 0), 0.1 * 0.6 * 0.3, 1e-15);
    // Symbolic inverse of the dense 4 x 4 matrix.
    const double want[4][4] = {
        {1.0016232871564919, 0.00081164357824594804, -0.036073047922042135, -0.018036523961021068},
        {0.00081164357824594804, 1.0004058217891230, -0.018036523961021068, -0.0090182619805105338},
        {-0.036073047922042135, -0.018036523961021068, 1.0016232871564919, 0.00081164357824594804},
        {-0.018036523961021068, -0.0090182619805105338, 0.00081164357824594804, 1.0004058217891230}};
    const Matrix H = invert_G_closed_form(pt, m).dense();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(H(i, j), want[i][j], 1e-14) << i << "," << j;
}

TEST(Bundle, SingularCoefficientsRejected) {
    EXPECT_THROW(inverse_coefficients(constant_metric(1, 1, 1, 0, 0, 0), 0.2), SingularCoefficientError);
}

TEST(Bundle, FrameMatrixInverse) {
    const CotangentPoint pt = CotangentPoint::make(SpaceForm{3, 1.0}, vec({0.2, -0.3, 0.1}), vec({0.5, 0.1, -0.4}));
    EXPECT_LT(max_abs(frame_matrix(pt) * frame_matrix_inverse(pt) - Matrix::Identity(6, 6)), 1e-15);
}

TEST(BundleProperty, AlgebraicIdentitiesOnPresetSamples) {
    for (const char* name : {"flat-sasaki", "sphere-case1", "hyperbolic-case1", "generic-case1", "generic-case2"}) {
        const Scenario s = *find_preset(name);
        const CoefficientFamily f = s.family();
        for (const SamplePoint& sp : sample_points(s)) {
            const CotangentPoint pt = CotangentPoint::make(s.space, sp.x, sp.p);
            ASSERT_NEAR(pt.t, sp.t, 1e-12);
            const CoefficientValues v = f.at(pt.t);
            const BlockTensor G = assemble_G(pt, v.metric);
            const BlockTensor J = assemble_J(pt, v.structure);
            EXPECT_LT(j_square_residual(J), 1e-10) << name;
            EXPECT_LT(hermitian_residual(G, J), 1e-10) << name;
            EXPECT_LT(antisymmetry_residual(fundamental_form(pt, v)), 1e-10) << name;
            const BlockTensor H = invert_G_closed_form(pt, v.metric);
            EXPECT_LT(inverse_residual(G, H), 1e-9) << name;
            EXPECT_LT(max_abs(H.dense() - G.dense().inverse()), 1e-9) << name;
            const Eigen::LLT<Matrix> llt(G.dense());
            EXPECT_EQ(llt.info(), Eigen::Success) << name << " G not positive definite at t=" << pt.t;
        }
    }
}

TEST(BundleProperty, InducedChartMatchesAdaptedFrame) {
    const Scenario s = *find_preset("sphere-case1");
    const InducedChart chart(s.family());
    const SamplePoint sp = sample_points(s).front();
    const CotangentPoint pt = CotangentPoint::make(s.space, sp.x, sp.p);
    const CoefficientValues v = s.family().at(pt.t);
    const Matrix phi = frame_matrix(pt), phi_inv = frame_matrix_inverse(pt);
    const Vector y = join(sp.x, sp.p);
    EXPECT_LT(max_abs(chart.metric(y) - phi_inv.transpose() * assemble_G(pt, v.metric).dense() * phi_inv), 1e-14);
    EXPECT_LT(max_abs(chart.complex_structure(y) - phi * assemble_J(pt, v.structure).dense() * phi_inv), 1e-14);
}

TEST(BundleProperty, IntegrableAndClosedOnEinsteinFamilies) {
    for (const char* name : {"sphere-case1", "sphere-case2-const", "hyperbolic-case1", "generic-case1"}) {
        const Scenario s = *find_preset(name);
        const InducedChart chart(s.family());
        for (const SamplePoint& sp : samples_of(name)) {
            const Vector y = join(sp.x, sp.p);
            EXPECT_LT(nijenhuis_numeric(chart, y), 1e-6) << name << " t=" << sp.t;
            EXPECT_LT(d_omega_numeric(chart, y), 1e-6) << name << " t=" << sp.t;
        }
    }
}

TEST(BundleControl, ShiftedB1BreaksIntegrability) {
    Scenario s = *find_preset("sphere-case1");
    s.perturbation.b1_shift = 0.1;
    const InducedChart chart(s.family());
    const SamplePoint sp = sample_points(s)[3];
    EXPECT_GT(nijenhuis_numeric(chart, join(sp.x, sp.p)), 1e-2);
}

TEST(BundleControl, ShiftedA2BreaksJSquared) {
    Scenario s = *find_preset("sphere-case1");
    s.perturbation.a2_shift = 0.1;
    const SamplePoint sp = sample_points(s)[3];
    const CotangentPoint pt = CotangentPoint::make(s.space, sp.x, sp.p);
    EXPECT_GT(j_square_residual(assemble_J(pt, s.family().at(pt.t, false).structure)), 1e-2);
}

TEST(BundleControl, ShiftedMuBreaksClosedness) {
    Scenario s = *find_preset("sphere-case1");
    s.perturbation.mu_shift = 0.5;
    const InducedChart chart(s.family());
    const SamplePoint sp = sample_points(s)[3];
    EXPECT_GT(d_omega_numeric(chart, join(sp.x, sp.p)), 1e-3);
}
