#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "sysarea/errors.hpp"
#include "sysarea/metric.hpp"
#include "sysarea/sphere.hpp"

namespace sysarea {

namespace detail {

// Ambient acceleration of a geodesic of w^2 g0 on the unit sphere:
//   c'' = -2 (grad rho . c') c' + |c'|^2 grad rho - |c'|^2 c,   rho = log w.
inline Vec3 geodesic_acceleration(const ConformalMetric& g, const Vec3& c, const Vec3& v) {
    const double vv = dot(v, v);
    if (g.is_round()) return -vv * c;
    const Vec3 grad = g.log_factor(SphericalPoint::project(c)).grad;
    return -2.0 * dot(grad, v) * v + vv * grad - vv * c;
}

struct PhaseState {
    Vec3 c;
    Vec3 v;
};

// Classical RK4 step followed by projection back onto the unit tangent bundle
// constraint (|c| = 1, v . c = 0). Returns the pre-projection radial drift.
inline double rk4_step(const ConformalMetric& g, PhaseState& s, double h) {
    const Vec3 k1c = s.v;
    const Vec3 k1v = geodesic_acceleration(g, s.c, s.v);
    const Vec3 c2 = s.c + (0.5 * h) * k1c;
    const Vec3 v2 = s.v + (0.5 * h) * k1v;
    const Vec3 k2v = geodesic_acceleration(g, c2, v2);
    const Vec3 c3 = s.c + (0.5 * h) * v2;
    const Vec3 v3 = s.v + (0.5 * h) * k2v;
    const Vec3 k3v = geodesic_acceleration(g, c3, v3);
    const Vec3 c4 = s.c + h * v3;
    const Vec3 v4 = s.v + h * k3v;
    const Vec3 k4v = geodesic_acceleration(g, c4, v4);
    const Vec3 c_new = s.c + (h / 6.0) * (k1c + 2.0 * v2 + 2.0 * v3 + v4);
    const Vec3 v_new = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    const double r = norm(c_new);
    s.c = c_new / r;
    s.v = tangential(s.c, v_new);
    return std::abs(r - 1.0);
}

inline void check_drift(double drift) {
    if (drift > 1e-6) {
        throw StepTooLarge("single-step radial drift " + std::to_string(drift) + " exceeds 1e-6");
    }
}

// Length of the cubic Hermite interpolant through the trajectory nodes,
// projected onto the sphere, by 3-point Gauss-Legendre per step.
inline double hermite_length(const ConformalMetric& g, const std::vector<PhaseState>& nodes, double h) {
    static constexpr std::array<double, 3> gs{0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
    static constexpr std::array<double, 3> gw{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const PhaseState& a = nodes[k];
        const PhaseState& b = nodes[k + 1];
        double seg = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double s = gs[i];
            const double s2 = s * s;
            const double s3 = s2 * s;
            const Vec3 H = (2 * s3 - 3 * s2 + 1) * a.c + (h * (s3 - 2 * s2 + s)) * a.v + (-2 * s3 + 3 * s2) * b.c +
                           (h * (s3 - s2)) * b.v;
            const Vec3 dH = ((6 * s2 - 6 * s) / h) * a.c + (3 * s2 - 4 * s + 1) * a.v + ((-6 * s2 + 6 * s) / h) * b.c +
                            (3 * s2 - 2 * s) * b.v;
            const double r = norm(H);
            const Vec3 gamma = H / r;
            const Vec3 dgamma = tangential(gamma, dH) / r;
            seg += gw[i] * g.w(SphericalPoint::project(gamma)) * norm(dgamma);
        }
        total += h * seg;
    }
    return total;
}

}  // namespace detail

enum class SpeedNorm { Round, Metric };

struct Trajectory {
    std::vector<SphericalPoint> points;  // one per step, including both ends
    double step = 0.0;
    double speed = 0.0;         // g-speed at the start
    double length = 0.0;        // speed * T (constant-speed parameterization)
    double energy_drift = 0.0;  // max relative deviation of the g-speed along the run
};

/// Fixed-step RK4 integration of the geodesic of g from p with initial
/// direction v over parameter time T (h <= 1e-2). v is scaled to unit round
/// speed or unit g-speed depending on `speed`.
inline Trajectory integrate_geodesic(const ConformalMetric& g, const SphericalPoint& p, const Vec3& v, double T,
                                     double h, SpeedNorm speed = SpeedNorm::Round) {
    if (!(h > 0.0 && h <= 1e-2)) throw InvalidArgument("integration step must lie in (0, 1e-2]");
    if (!(T >= 0.0)) throw InvalidArgument("integration time must be non-negative");
    Vec3 v0 = tangential(p, v);
    const double vn = norm(v0);
    if (!(vn > 0.0)) throw InvalidArgument("initial velocity must have a nonzero tangential part");
    v0 = v0 / vn;
    if (speed == SpeedNorm::Metric) v0 = v0 / g.w(p);

    const int n = std::max(1, static_cast<int>(std::ceil(T / h - 1e-12)));
    const double hh = T / n;
    Trajectory out;
    out.step = hh;
    out.speed = g.w(p) * norm(v0);
    out.length = out.speed * T;
    out.points.reserve(n + 1);
    out.points.push_back(p);
    detail::PhaseState s{p.vec(), v0};
    for (int k = 0; k < n; ++k) {
        detail::check_drift(detail::rk4_step(g, s, hh));
        const SphericalPoint c = SphericalPoint::project(s.c);
        out.points.push_back(c);
        out.energy_drift = std::max(out.energy_drift, std::abs(g.w(c) * norm(s.v) / out.speed - 1.0));
    }
    return out;
}

struct ArcOptions {
    double step = 0.03;     // RK4 step per unit of round distance
    double tol = 1e-10;     // required arrival accuracy
    int max_iter = 100;
};

struct ArcResult {
    SphericalPoint midpoint;
    double length = 0.0;
    int iterations = 0;
    double arrival_error = 0.0;
};

/// Reusable shooting state for an arc whose endpoints move slowly (e.g. the
/// same vertex pair across Birkhoff passes): initial velocities and Broyden
/// Jacobians of both shooting directions.
struct ArcWarmStart {
    bool valid = false;
    Vec3 v_fwd;
    Vec3 v_bwd;
    std::array<double, 4> j_fwd{};
    std::array<double, 4> j_bwd{};
};

namespace detail {

struct Shot {
    std::vector<PhaseState> nodes;
    double h = 0.0;
    int iterations = 0;
    double error = 0.0;
};

// Shooting from p to q over unit parameter time with n steps: quasi-Newton on
// the initial tangent vector with Broyden updates of the Jacobian J, which maps
// changes of the initial velocity (frame e1, e2 at p) to changes of the arrival
// point (frame f1, f2 at q). With fresh_jacobian, J is first replaced by a
// forward-difference estimate; J is updated in place either way.
inline Shot shoot(const ConformalMetric& g, const SphericalPoint& p, const SphericalPoint& q, int n,
                  const Vec3& initial_velocity, std::array<double, 4>& J, bool fresh_jacobian,
                  const ArcOptions& opt) {
    const double d = round_distance(p, q);
    const Vec3 e1 = normalized(tangential(p, q.vec()));
    const Vec3 e2 = cross(p.vec(), e1);
    const Vec3 f1 = -std::sin(d) * p.vec() + std::cos(d) * e1;
    const Vec3 f2 = e2;
    const double h = 1.0 / n;

    double a0 = dot(initial_velocity, e1);
    double a1 = dot(initial_velocity, e2);
    auto& [j00, j01, j10, j11] = J;

    Shot best;
    best.h = h;
    best.error = std::numeric_limits<double>::infinity();
    std::vector<PhaseState> nodes(static_cast<std::size_t>(n) + 1);
    auto arrival = [&](double b0, double b1, std::vector<PhaseState>* out) {
        PhaseState s{p.vec(), b0 * e1 + b1 * e2};
        if (out) (*out)[0] = s;
        for (int k = 0; k < n; ++k) {
            check_drift(rk4_step(g, s, h));
            if (out) (*out)[k + 1] = s;
        }
        return s.c - q.vec();
    };
    double prev_r0 = 0.0, prev_r1 = 0.0, da0 = 0.0, da1 = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const Vec3 e = arrival(a0, a1, &nodes);
        const double err = norm(e);
        const double r0 = dot(e, f1);
        const double r1 = dot(e, f2);
        if (it == 1 && fresh_jacobian && err > 1e-15) {
            const double delta = 1e-7 * (1.0 + d);
            const Vec3 e0 = arrival(a0 + delta, a1, nullptr);
            const Vec3 e1d = arrival(a0, a1 + delta, nullptr);
            j00 = (dot(e0, f1) - r0) / delta;
            j10 = (dot(e0, f2) - r1) / delta;
            j01 = (dot(e1d, f1) - r0) / delta;
            j11 = (dot(e1d, f2) - r1) / delta;
        }
        if (it > 1) {
            const double dr0 = r0 - prev_r0 - (j00 * da0 + j01 * da1);
            const double dr1 = r1 - prev_r1 - (j10 * da0 + j11 * da1);
            const double nn = da0 * da0 + da1 * da1;
            if (nn > 1e-20) {  // smaller steps only see rounding noise
                j00 += dr0 * da0 / nn;
                j01 += dr0 * da1 / nn;
                j10 += dr1 * da0 / nn;
                j11 += dr1 * da1 / nn;
            }
        }
        const bool improved = err < best.error;
        if (improved) {
            best.nodes = nodes;
            best.error = err;
        }
        best.iterations = it;
        if (err <= 1e-15 || (!improved && best.error <= opt.tol)) break;
        if (improved && err <= 4e-16 * (1.0 + d)) break;
        const double det = j00 * j11 - j01 * j10;
        da0 = -(j11 * r0 - j01 * r1) / det;
        da1 = -(-j10 * r0 + j00 * r1) / det;
        if (std::abs(da0) + std::abs(da1) < 1e-17) break;
        a0 += da0;
        a1 += da1;
        prev_r0 = r0;
        prev_r1 = r1;
    }
    if (!(best.error <= opt.tol)) {
        throw NoConvergence("geodesic shooting missed the target by " + std::to_string(best.error));
    }
    return best;
}

inline int arc_steps(double d, const ArcOptions& opt) {
    return std::max(8, 2 * static_cast<int>(std::ceil(d / (2.0 * opt.step))));
}

}  // namespace detail

/// Shortest g-geodesic from p to q (round distance < pi/2) by shooting.
/// Returns the g-midpoint (symmetrized over both shooting directions) and the
/// g-length of the arc.
inline ArcResult geodesic_arc(const ConformalMetric& g, const SphericalPoint& p, const SphericalPoint& q,
                              const ArcOptions& opt = {}, ArcWarmStart* warm = nullptr) {
    const double d = round_distance(p, q);
    if (!(d < 0.5 * pi)) throw InvalidArgument("geodesic_arc needs round distance < pi/2");
    if (d == 0.0) return {p, 0.0, 0, 0.0};
    const int n = detail::arc_steps(d, opt);
    ArcWarmStart local;
    ArcWarmStart& ws = warm ? *warm : local;
    if (!ws.valid) ws.v_fwd = round_log(p, q);
    const bool fresh = !ws.valid;
    const detail::Shot fwd = detail::shoot(g, p, q, n, tangential(p, ws.v_fwd), ws.j_fwd, fresh, opt);
    ws.v_fwd = fwd.nodes.front().v;
    if (fresh) ws.v_bwd = -fwd.nodes.back().v;
    const detail::Shot bwd = detail::shoot(g, q, p, n, tangential(q, ws.v_bwd), ws.j_bwd, fresh, opt);
    ws.v_bwd = bwd.nodes.front().v;
    ws.valid = true;
    ArcResult out;
    out.midpoint = SphericalPoint::project(fwd.nodes[n / 2].c + bwd.nodes[n / 2].c);
    out.length = 0.5 * (detail::hermite_length(g, fwd.nodes, fwd.h) + detail::hermite_length(g, bwd.nodes, bwd.h));
    out.iterations = fwd.iterations + bwd.iterations;
    out.arrival_error = std::max(fwd.error, bwd.error);
    return out;
}

/// Points along the g-geodesic from p to q: `samples` points starting at p,
/// excluding q.
inline std::vector<SphericalPoint> geodesic_arc_points(const ConformalMetric& g, const SphericalPoint& p,
                                                       const SphericalPoint& q, int samples,
                                                       const ArcOptions& opt = {}) {
    const double d = round_distance(p, q);
    if (d == 0.0) return std::vector<SphericalPoint>(static_cast<std::size_t>(samples), p);
    const int base = detail::arc_steps(d, opt);
    const int mult = std::max(1, (base + samples - 1) / samples);
    std::array<double, 4> J{};
    const detail::Shot shot = detail::shoot(g, p, q, samples * mult, round_log(p, q), J, true, opt);
    std::vector<SphericalPoint> out;
    out.reserve(samples);
    for (int k = 0; k < samples; ++k) out.push_back(SphericalPoint::project(shot.nodes[k * mult].c));
    return out;
}

}  // namespace sysarea

namespace sysarea {

struct ClosedGeodesicOptions {
    double step = 0.005;     // RK4 step in g-arc length
    int samples = 256;       // output points (the step count is a multiple of this)
    double tol = 1e-12;      // closure tolerance
    int max_iter = 30;
};

struct ClosedGeodesic {
    std::vector<SphericalPoint> points;  // unit g-speed samples, first point repeated at the end omitted
    double length = 0.0;
    double closure_error = 0.0;
    int iterations = 0;
};

/// Closed g-geodesic near the one through p0 with direction v0 and length
/// about length0. Newton iteration on (a, theta, T): the start moves by a along
/// the normal great circle, theta tilts the direction, T is the g-length. The
/// closure residual is the arrival offset from the start plus the turning of
/// the direction. Works for unstable geodesics that curve shortening leaves.
inline ClosedGeodesic close_geodesic(const ConformalMetric& g, const SphericalPoint& p0, const Vec3& v0,
                                     double length0, const ClosedGeodesicOptions& opt = {}) {
    const Vec3 t0 = normalized(tangential(p0, v0));
    const Vec3 m0 = cross(p0.vec(), t0);
    const int per = std::max(1, static_cast<int>(std::ceil(length0 / (opt.step * opt.samples))));
    const int n = per * opt.samples;

    struct Eval {
        std::array<double, 3> r;
        std::vector<detail::PhaseState> nodes;
    };
    auto evaluate = [&](const std::array<double, 3>& x, bool keep) {
        const auto [a, th, T] = x;
        const Vec3 p = std::cos(a) * p0.vec() + std::sin(a) * m0;
        const Vec3 m = -std::sin(a) * p0.vec() + std::cos(a) * m0;
        const Vec3 d = std::cos(th) * t0 + std::sin(th) * m;
        const Vec3 dn = -std::sin(th) * t0 + std::cos(th) * m;
        detail::PhaseState s{p, d / g.w(SphericalPoint::project(p))};
        Eval e;
        if (keep) e.nodes.reserve(n + 1);
        if (keep) e.nodes.push_back(s);
        const double h = T / n;
        for (int k = 0; k < n; ++k) {
            detail::check_drift(detail::rk4_step(g, s, h));
            if (keep) e.nodes.push_back(s);
        }
        const Vec3 off = s.c - p;
        e.r = {dot(off, t0), dot(off, m), dot(normalized(s.v), dn)};
        return e;
    };
    auto rnorm = [](const std::array<double, 3>& r) { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); };

    std::array<double, 3> x{0.0, 0.0, length0};
    ClosedGeodesic out;
    Eval cur = evaluate(x, false);
    double err = rnorm(cur.r);
    int it = 0;
    while (it < opt.max_iter && err > opt.tol) {
        ++it;
        double J[3][3];
        for (int j = 0; j < 3; ++j) {
            auto xp = x;
            const double delta = 1e-7 * (j == 2 ? std::max(1.0, x[2]) : 1.0);
            xp[j] += delta;
            const auto rp = evaluate(xp, false).r;
            for (int i = 0; i < 3; ++i) J[i][j] = (rp[i] - cur.r[i]) / delta;
        }
        // Solve J dx = -r by Cramer's rule.
        auto det3 = [](double M[3][3]) {
            return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                   M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
        };
        const double D = det3(J);
        if (!(std::abs(D) > 0.0)) break;
        std::array<double, 3> dx{};
        for (int j = 0; j < 3; ++j) {
            double M[3][3];
            for (int i = 0; i < 3; ++i) {
                for (int k = 0; k < 3; ++k) M[i][k] = (k == j) ? -cur.r[i] : J[i][k];
            }
            dx[j] = det3(M) / D;
        }
        // Damped step: halve until the residual decreases.
        double lam = 1.0;
        bool accepted = false;
        for (int k = 0; k < 20; ++k) {
            std::array<double, 3> xn{x[0] + lam * dx[0], x[1] + lam * dx[1], x[2] + lam * dx[2]};
            Eval trial = evaluate(xn, false);
            const double e = rnorm(trial.r);
            if (e < err) {
                x = xn;
                cur = std::move(trial);
                err = e;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) break;
    }
    if (!(err <= opt.tol)) {
        throw NoConvergence("closed geodesic closure residual " + std::to_string(err));
    }
    const Eval fin = evaluate(x, true);
    out.length = x[2];
    out.closure_error = err;
    out.iterations = it;
    out.points.reserve(opt.samples);
    for (int k = 0; k < opt.samples; ++k) out.points.push_back(SphericalPoint::project(fin.nodes[k * per].c));
    return out;
}

}  // namespace sysarea
