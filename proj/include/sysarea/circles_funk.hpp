#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "sysarea/errors.hpp"
#include "sysarea/harmonics.hpp"
#include "sysarea/metric.hpp"
#include "sysarea/sphere.hpp"

namespace sysarea {

/// Circle gamma(u, s): the sphere cut by the plane orthogonal to u shifted by
/// s u. s = 0 is the great circle gamma(u); |s| = 1 is the point curve at s u.
struct CircleSpec {
    SphericalPoint axis;
    double offset = 0.0;

    double radius() const { return std::sqrt(std::max(0.0, 1.0 - offset * offset)); }
};

// Default number of samples on a circle for a direction of degree L.
inline int default_circle_samples(int L) { return std::max(256, 4 * L + 8); }

/// m points uniformly spaced in arc length, oriented counterclockwise seen
/// from the tip of u (screw rule: e1 x e2 = u).
inline DiscreteClosedCurve sample_circle(const CircleSpec& spec, int m) {
    if (m < 3) throw InvalidArgument("circle needs at least 3 samples");
    const double s = spec.offset;
    if (!(std::abs(s) <= 1.0)) throw InvalidArgument("circle offset must lie in [-1, 1]");
    const Vec3& u = spec.axis;
    if (std::abs(s) == 1.0) return DiscreteClosedCurve::point(SphericalPoint::project(s * u), m);
    const TangentFrame fr = tangent_frame(u);
    const double r = spec.radius();
    std::vector<SphericalPoint> pts;
    pts.reserve(m);
    for (int k = 0; k < m; ++k) {
        const double a = two_pi * k / m;
        pts.push_back(SphericalPoint::project(s * u + r * (std::cos(a) * fr.e1 + std::sin(a) * fr.e2)));
    }
    return DiscreteClosedCurve(std::move(pts));
}

namespace detail {

// Periodic trapezoid rule of a callable over the great circle gamma(u).
template <class F>
double great_circle_integral(F&& func, const Vec3& u, int m) {
    const TangentFrame fr = tangent_frame(u);
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
        const double a = two_pi * k / m;
        s += func(SphericalPoint::project(std::cos(a) * fr.e1 + std::sin(a) * fr.e2));
    }
    return s * two_pi / m;
}

}  // namespace detail

/// Integral of f over gamma(u) against round arc length. Spectrally exact for
/// band-limited f once m >= 2 deg(f) + 2.
inline double funk_transform(const SphericalFunction& f, const SphericalPoint& u, int m) {
    const int deg = f.effective_degree();
    if (m < 2 * deg + 2) {
        throw InvalidArgument("funk_transform needs m >= 2 deg + 2 = " + std::to_string(2 * deg + 2));
    }
    const SphericalFunction fe = f.resized(deg);
    return detail::great_circle_integral([&](const SphericalPoint& p) { return fe.eval(p); }, u, m);
}

inline double funk_transform(const SphericalFunction& f, const SphericalPoint& u) {
    return funk_transform(f, u, default_circle_samples(f.degree_max()));
}

/// Length of gamma(u) under g. For the square form with lambda = 0 this is
/// exactly 2 pi + t * funk_transform(f, u).
inline double great_circle_length(const ConformalMetric& g, const SphericalPoint& u, int m) {
    return detail::great_circle_integral([&](const SphericalPoint& p) { return g.w(p); }, u, m);
}

inline double great_circle_length(const ConformalMetric& g, const SphericalPoint& u) {
    return great_circle_length(g, u, default_circle_samples(g.direction().degree_max()));
}

// Mean over axes u of the great-circle length, (1/4pi) int l(gamma(u)) dv0(u).
inline double average_great_circle_length(const ConformalMetric& g, const SphereQuadrature& q, int m) {
    if (q.band < g.direction().effective_degree()) {
        throw BandTooLow("axis quadrature band below the direction degree");
    }
    return integrate_fn([&](const SphericalPoint& u) { return great_circle_length(g, u, m); }, q) / four_pi;
}

inline double average_great_circle_length(const ConformalMetric& g) {
    return average_great_circle_length(g, g.quadrature(), default_circle_samples(g.direction().degree_max()));
}

struct TangentBundleIdentity {
    double lhs;  // fiber first: int_{S^2} (int_{S^1} Lambda dsigma) dv0
    double rhs;  // base first:  int_{S^2} l(gamma(u)) dv0(u)
};

/// Integrates Lambda(q, v) = sqrt(g(q)(v, v)) over the unit tangent bundle in
/// both orders. Both equal 8 pi^2 when lambda = 0 and f is mean-zero.
inline TangentBundleIdentity verify_tangent_bundle_identity(const ConformalMetric& g, int fiber_samples = 64) {
    const int m = default_circle_samples(g.direction().degree_max());
    const double lhs = integrate_fn(
        [&](const SphericalPoint& q) {
            const TangentFrame fr = tangent_frame(q);
            const double wq = g.w(q);
            double s = 0.0;
            for (int k = 0; k < fiber_samples; ++k) {
                const double a = two_pi * k / fiber_samples;
                const Vec3 v = std::cos(a) * fr.e1 + std::sin(a) * fr.e2;
                s += wq * norm(v);
            }
            return s * two_pi / fiber_samples;
        },
        g.quadrature());
    const double rhs =
        integrate_fn([&](const SphericalPoint& u) { return great_circle_length(g, u, m); }, g.quadrature());
    return {lhs, rhs};
}

struct SignedFunkAxes {
    SphericalPoint u0;  // Funk integral < 0
    SphericalPoint u1;  // Funk integral > 0
    double funk_u0;
    double funk_u1;
};

/// Axes where the Funk integral of f is negative and positive. Empty when
/// the transform vanishes (max |Funk| <= 1e-9 on the scan nodes).
inline std::optional<SignedFunkAxes> find_signed_funk_axes(const SphericalFunction& f, const SphereQuadrature& q) {
    const int m = default_circle_samples(f.degree_max());
    const SphericalFunction fe = f.resized(f.effective_degree());
    auto funk = [&](const SphericalPoint& u) {
        return detail::great_circle_integral([&](const SphericalPoint& p) { return fe.eval(p); }, u, m);
    };
    std::size_t imin = 0;
    std::size_t imax = 0;
    double vmin = 0.0;
    double vmax = 0.0;
    double amax = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double v = funk(q.nodes[i]);
        if (i == 0 || v < vmin) {
            vmin = v;
            imin = i;
        }
        if (i == 0 || v > vmax) {
            vmax = v;
            imax = i;
        }
        amax = std::max(amax, std::abs(v));
    }
    if (amax <= 1e-9) return std::nullopt;
    if (!(vmin < 0.0 && vmax > 0.0)) {
        throw InvalidArgument("Funk transform does not change sign; the direction is not mean-zero");
    }
    const double step = pi / (q.band + 2);
    const SphericalPoint u0 = refine_maximum([&](const SphericalPoint& u) { return -funk(u); }, q.nodes[imin], step);
    const SphericalPoint u1 = refine_maximum(funk, q.nodes[imax], step);
    SignedFunkAxes out{u0, u1, funk(u0), funk(u1)};
    if (!(out.funk_u0 < 0.0 && out.funk_u1 > 0.0)) {
        throw Error("signed Funk axes postcondition violated");
    }
    return out;
}

inline std::optional<SignedFunkAxes> find_signed_funk_axes(const SphericalFunction& f) {
    return find_signed_funk_axes(f, build_quadrature(4 * f.degree_max() + 8));
}

struct FunkSample {
    SphericalPoint u;
    double value;
};

inline std::vector<FunkSample> funk_scan(const SphericalFunction& f, const std::vector<SphericalPoint>& axes) {
    std::vector<FunkSample> out;
    out.reserve(axes.size());
    for (const auto& u : axes) out.push_back({u, funk_transform(f, u)});
    return out;
}

// CSV rows (ux, uy, uz, funk_value).
inline void write_funk_scan_csv(const std::vector<FunkSample>& rows, std::ostream& os) {
    char buf[160];
    os << "ux,uy,uz,funk_value\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.u.x(), r.u.y(), r.u.z(), r.value);
        os << buf;
    }
}

}  // namespace sysarea
