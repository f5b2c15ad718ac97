#include <gtest/gtest.h>

#include "natlift/connection.hpp"
#include "natlift/harness.hpp"

using namespace natlift;

namespace {

struct Sampled {
    Scenario scenario;
    CotangentPoint point;
    CoefficientValues values;
    Vector y;
};

std::vector<Sampled> samples_of(const char* name) {
    const Scenario s = *find_preset(name);
    const CoefficientFamily f = s.family();
    std::vector<Sampled> out;
    for (const SamplePoint& sp : sample_points(s)) {
        const CotangentPoint pt = CotangentPoint::make(s.space, sp.x, sp.p);
        out.push_back({s, pt, f.at(pt.t), join(sp.x, sp.p)});
    }
    return out;
}

const char* const kEinsteinPresets[] = {"sphere-case1", "sphere-case2-const", "hyperbolic-case1", "generic-case1",
                                        "generic-case2"};

}  // namespace

TEST(Connection, FlatSasakiBlocksVanish) {
    for (const Sampled& s : samples_of("flat-sasaki")) {
        const ConnectionBlocks b = mtensor_coeffs(s.point, s.values.metric);
        EXPECT_LT(std::max({b.Q.max_abs(), b.Qt.max_abs(), b.P.max_abs(), b.Pt.max_abs(), b.S.max_abs(),
                            b.St.max_abs()}),
                  1e-14);
    }
}

TEST(Connection, ZeroSectionMatchesOracle) {
    const Scenario s = *find_preset("sphere-case1");
    const InducedChart chart(s.family());
    Vector x(2);
    x << 0.3, -0.2;
    const Vector p = Vector::Zero(2);
    const CotangentPoint pt = CotangentPoint::make(s.space, x, p);
    const ConnectionBlocks b = mtensor_coeffs(pt, s.family().at(0.0).metric);
    EXPECT_LT(b.max_abs_diff_to(koszul_oracle(chart, join(x, p))), 1e-6);
}

TEST(ConnectionProperty, MatchesKoszulOracle) {
    for (const char* name : kEinsteinPresets) {
        const InducedChart chart(find_preset(name)->family());
        for (const Sampled& s : samples_of(name)) {
            const ConnectionBlocks b = mtensor_coeffs(s.point, s.values.metric);
            EXPECT_LT(b.max_abs_diff_to(koszul_oracle(chart, s.y)), 1e-6) << name << " t=" << s.point.t;
        }
    }
}

TEST(ConnectionProperty, ReproducesBaseChristoffel) {
    for (const char* name : kEinsteinPresets) {
        const InducedChart chart(find_preset(name)->family());
        for (const Sampled& s : samples_of(name)) {
            const Array3 w = koszul_frame_connection(chart, s.y);
            EXPECT_LT(base_christoffel_residual(s.point, w, extract_blocks(s.point, w)), 1e-6) << name;
        }
    }
}

TEST(ConnectionProperty, TorsionSymmetries) {
    for (const char* name : kEinsteinPresets) {
        for (const Sampled& s : samples_of(name)) {
            const ConnectionBlocks b = mtensor_coeffs(s.point, s.values.metric);
            const int n = s.point.n();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int h = 0; h < n; ++h) {
                        EXPECT_NEAR(b.Q(i, j, h), b.Q(j, i, h), 1e-10);
                        EXPECT_NEAR(b.Qt(i, j, h), b.Qt(j, i, h), 1e-10);
                        EXPECT_NEAR(b.St(i, j, h), b.St(j, i, h), 1e-10);
                        // [delta_i, delta_j] = p_k R^k_hij d^h.
                        EXPECT_NEAR(b.S(i, j, h) - b.S(j, i, h), s.point.r0(h, i, j), 1e-10);
                    }
        }
    }
}

TEST(ConnectionProperty, MetricCompatibleAndTorsionFree) {
    for (const char* name : kEinsteinPresets) {
        const InducedChart chart(find_preset(name)->family());
        for (const Sampled& s : samples_of(name)) {
            const Array3 w = frame_connection(s.point, mtensor_coeffs(s.point, s.values.metric));
            const MetricTorsionResidual r = metric_torsion_check(chart, s.y, w);
            EXPECT_LT(r.metric, 1e-6) << name;
            EXPECT_LT(r.torsion, 1e-6) << name;
        }
    }
}

TEST(ConnectionControl, FlippedSBreaksTorsion) {
    const Sampled s = samples_of("sphere-case1")[2];
    const InducedChart chart(s.scenario.family());
    ConnectionBlocks b = mtensor_coeffs(s.point, s.values.metric);
    b.S *= -1.0;
    const MetricTorsionResidual r = metric_torsion_check(chart, s.y, frame_connection(s.point, b));
    EXPECT_GT(r.torsion, 1e-2);
}

TEST(ConnectionProperty, VerticalDerivativesMatchFiniteDifferences) {
    const double h = 1e-4;
    for (const char* name : {"sphere-case1", "generic-case1"}) {
        const CoefficientFamily f = find_preset(name)->family();
        for (const Sampled& s : samples_of(name)) {
            const ConnectionDerivatives d = closed_form_connection(s.point, s.values.metric).derivatives;
            const int n = s.point.n();
            for (int m = 0; m < n; ++m) {
                auto blocks_at = [&](double shift) {
                    Vector p = s.point.p;
                    p(m) += shift;
                    const CotangentPoint q = CotangentPoint::make(s.scenario.space, s.point.x, p);
                    return mtensor_coeffs(q, f.at(q.t).metric);
                };
                const ConnectionBlocks p1 = blocks_at(h), m1 = blocks_at(-h), p2 = blocks_at(2 * h),
                                       m2 = blocks_at(-2 * h);
                auto fd = [&](Array3 ConnectionBlocks::*field, int i, int j, int k) {
                    return (8.0 * ((p1.*field)(i, j, k) - (m1.*field)(i, j, k)) -
                            ((p2.*field)(i, j, k) - (m2.*field)(i, j, k))) /
                           (12.0 * h);
                };
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k) {
                            EXPECT_NEAR(d.dQ(m, i, j, k), fd(&ConnectionBlocks::Q, i, j, k), 1e-6) << name;
                            EXPECT_NEAR(d.dQt(m, i, j, k), fd(&ConnectionBlocks::Qt, i, j, k), 1e-6) << name;
                            EXPECT_NEAR(d.dP(m, i, j, k), fd(&ConnectionBlocks::P, i, j, k), 1e-6) << name;
                            EXPECT_NEAR(d.dPt(m, i, j, k), fd(&ConnectionBlocks::Pt, i, j, k), 1e-6) << name;
                            EXPECT_NEAR(d.dS(m, i, j, k), fd(&ConnectionBlocks::S, i, j, k), 1e-6) << name;
                            EXPECT_NEAR(d.dSt(m, i, j, k), fd(&ConnectionBlocks::St, i, j, k), 1e-6) << name;
                        }
            }
        }
    }
}
