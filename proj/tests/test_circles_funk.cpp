#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sysarea/circles_funk.hpp"
#include "test_util.hpp"

using namespace sysarea;

namespace {

double legendre_at_zero(int l) {
    // P_l(0) = (-1)^{l/2} (l-1)!! / l!! for even l, 0 for odd l.
    if (l % 2) return 0.0;
    double v = 1.0;
    for (int k = 1; k <= l / 2; ++k) v *= -(2.0 * k - 1.0) / (2.0 * k);
    return v;
}

}  // namespace

TEST(Circles, SampleCircleGeometry) {
    const auto c = sample_circle({north_pole, 0.0}, 4);
    EXPECT_NEAR(c[0].x(), 1.0, 1e-15);
    EXPECT_NEAR(c[1].y(), 1.0, 1e-15);
    EXPECT_NEAR(c[2].x(), -1.0, 1e-15);
    EXPECT_NEAR(c[3].y(), -1.0, 1e-15);
    EXPECT_TRUE(sample_circle({north_pole, 1.0}, 16).is_point());
    EXPECT_THROW(sample_circle({north_pole, 0.0}, 2), InvalidArgument);
    EXPECT_THROW(sample_circle({north_pole, 1.5}, 8), InvalidArgument);

    const SphericalPoint u = SphericalPoint::project({1.0, 2.0, -0.5});
    const auto small = sample_circle({u, 0.6}, 64);
    for (const auto& p : small.vertices()) EXPECT_NEAR(dot(p, u), 0.6, 1e-14);
    // Orientation: consecutive samples turn counterclockwise around u.
    EXPECT_GT(dot(cross(small[0], small[1]), u), 0.0);
}

TEST(Funk, EigenvaluesAreLegendreAtZero) {
    std::mt19937_64 rng(41);
    for (int l = 0; l <= 8; ++l) {
        for (int m = -l; m <= l; ++m) {
            const SphericalFunction y = SphericalFunction::harmonic(l, m);
            for (int trial = 0; trial < 3; ++trial) {
                const SphericalPoint u = testing_util::random_point(rng);
                EXPECT_NEAR(funk_transform(y, u), two_pi * legendre_at_zero(l) * y.eval(u), 1e-12)
                    << l << "," << m;
            }
        }
    }
}

TEST(Funk, Examples) {
    EXPECT_NEAR(funk_transform(SphericalFunction::constant(1.0), north_pole), two_pi, 1e-13);
    EXPECT_NEAR(funk_transform(SphericalFunction::harmonic(1, 0), north_pole), 0.0, 1e-14);
    EXPECT_NEAR(funk_transform(SphericalFunction::harmonic(2, 0), north_pole), -pi * 0.5 * std::sqrt(5.0 / pi),
                1e-12);
    EXPECT_NEAR(funk_transform(SphericalFunction::harmonic(2, 0), north_pole), -1.9817, 5e-5);
    EXPECT_THROW(funk_transform(SphericalFunction::harmonic(4, 0), north_pole, 9), InvalidArgument);
}

TEST(Funk, AntipodalAndOrientationIndependent) {
    std::mt19937_64 rng(43);
    const SphericalFunction f = testing_util::random_function(rng, 7);
    for (int i = 0; i < 20; ++i) {
        const SphericalPoint u = testing_util::random_point(rng);
        EXPECT_NEAR(funk_transform(f, u), funk_transform(f, u.antipode()), 1e-12);
    }
}

TEST(GreatCircles, LengthIdentity) {
    std::mt19937_64 rng(47);
    const SphericalFunction f = testing_util::random_function(rng, 6, true);
    const double t = 0.5 * max_admissible_t(f);
    const ConformalMetric g = make_variation(f, t, 0.0);
    for (int i = 0; i < 100; ++i) {
        const SphericalPoint u = testing_util::random_point(rng);
        EXPECT_NEAR(great_circle_length(g, u), two_pi + t * funk_transform(f, u), 1e-12);
    }
}

TEST(GreatCircles, AverageIsTwoPi) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 3; ++trial) {
        const SphericalFunction f = testing_util::random_function(rng, 5, true);
        const ConformalMetric g = make_variation(f, 0.5 * max_admissible_t(f), 0.0);
        EXPECT_NEAR(average_great_circle_length(g), two_pi, 1e-12);
    }
    EXPECT_NEAR(average_great_circle_length(make_variation(SphericalFunction::harmonic(2, 0), 0.5, 0.0)), two_pi,
                1e-12);
}

TEST(GreatCircles, TangentBundleIdentity) {
    std::mt19937_64 rng(59);
    const SphericalFunction f = testing_util::random_function(rng, 4, true);
    const auto id = verify_tangent_bundle_identity(make_variation(f, 0.4 * max_admissible_t(f), 0.0));
    EXPECT_NEAR(id.lhs, 8.0 * pi * pi, 1e-10);
    EXPECT_NEAR(id.rhs, 8.0 * pi * pi, 1e-10);
}

TEST(SignedAxes, Y20PoleAndEquator) {
    const auto axes = find_signed_funk_axes(SphericalFunction::harmonic(2, 0));
    ASSERT_TRUE(axes.has_value());
    EXPECT_NEAR(std::abs(axes->u0.z()), 1.0, 1e-8);
    EXPECT_NEAR(axes->funk_u0, -1.9817, 5e-5);
    EXPECT_NEAR(axes->u1.z(), 0.0, 1e-4);
    EXPECT_NEAR(axes->funk_u1, 0.9908, 5e-5);
}

TEST(SignedAxes, OddAndNonMeanZero) {
    EXPECT_FALSE(find_signed_funk_axes(SphericalFunction::harmonic(3, 1)).has_value());
    EXPECT_THROW(find_signed_funk_axes(SphericalFunction::constant(1.0) + SphericalFunction::harmonic(2, 0)),
                 InvalidArgument);
}

TEST(SignedAxes, RandomEvenDirections) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        const SphericalFunction f = parity_decompose(testing_util::random_function(rng, 6, true)).f_plus;
        const auto axes = find_signed_funk_axes(f);
        ASSERT_TRUE(axes.has_value());
        EXPECT_LT(axes->funk_u0, 0.0);
        EXPECT_GT(axes->funk_u1, 0.0);
        // Refinement should land at least as far out as any node of a fine scan.
        double lo = 0.0;
        double hi = 0.0;
        for (const auto& u : lat_long_grid(61, 120)) {
            const double v = funk_transform(f, u);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        EXPECT_LE(axes->funk_u0, lo + 1e-6);
        EXPECT_GE(axes->funk_u1, hi - 1e-6);
    }
}

TEST(FunkScan, CsvLayout) {
    const auto rows = funk_scan(SphericalFunction::harmonic(2, 0), {north_pole, SphericalPoint(1, 0, 0)});
    std::ostringstream os;
    write_funk_scan_csv(rows, os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "ux,uy,uz,funk_value");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
