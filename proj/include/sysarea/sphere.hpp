#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "sysarea/errors.hpp"

namespace sysarea {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

// Plain ambient vector in R^3.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

// Point of the unit sphere. Construction renormalizes small drift (< 1e-9)
// and rejects anything further from the sphere.
class SphericalPoint {
public:
    SphericalPoint() : p_{0.0, 0.0, 1.0} {}

    explicit SphericalPoint(const Vec3& v) : p_(v) {
        const double r = norm(v);
        if (!(std::abs(r - 1.0) <= 1e-9)) {
            throw InvalidArgument("point is not on the unit sphere (|p| = " + std::to_string(r) + ")");
        }
        p_ = v / r;
    }

    SphericalPoint(double x, double y, double z) : SphericalPoint(Vec3{x, y, z}) {}

    // Projects any nonzero vector radially onto the sphere.
    static SphericalPoint project(const Vec3& v) {
        const double r = norm(v);
        if (!(r > 0.0)) {
            throw InvalidArgument("cannot project the zero vector onto the sphere");
        }
        SphericalPoint p;
        p.p_ = v / r;
        return p;
    }

    const Vec3& vec() const { return p_; }
    operator const Vec3&() const { return p_; }  // NOLINT(google-explicit-constructor)
    double x() const { return p_.x; }
    double y() const { return p_.y; }
    double z() const { return p_.z; }

    SphericalPoint antipode() const {
        SphericalPoint q;
        q.p_ = -p_;
        return q;
    }

private:
    Vec3 p_;
};

inline const SphericalPoint north_pole{0.0, 0.0, 1.0};

// Round (great-circle) distance; stable for both tiny and near-antipodal pairs.
inline double round_distance(const Vec3& a, const Vec3& b) {
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

// Midpoint of the short great-circle arc between a and b (a != -b).
inline SphericalPoint round_midpoint(const Vec3& a, const Vec3& b) {
    return SphericalPoint::project(a + b);
}

// Removes the component of v along the unit normal p.
inline Vec3 tangential(const Vec3& p, const Vec3& v) { return v - dot(v, p) * p; }

// Round exponential map: follows the great circle from p with initial velocity v.
inline SphericalPoint round_exp(const Vec3& p, const Vec3& v) {
    const double len = norm(v);
    if (len == 0.0) return SphericalPoint::project(p);
    return SphericalPoint::project(std::cos(len) * p + (std::sin(len) / len) * v);
}

// Inverse of round_exp for non-antipodal pairs.
inline Vec3 round_log(const Vec3& p, const Vec3& q) {
    const Vec3 t = tangential(p, q);
    const double tn = norm(t);
    if (tn == 0.0) return {};
    return (round_distance(p, q) / tn) * t;
}

// Point at fraction s of the short arc from a to b.
inline SphericalPoint slerp(const Vec3& a, const Vec3& b, double s) {
    return round_exp(a, s * round_log(a, b));
}

// Orthonormal tangent frame (e1, e2) at u with e1 x e2 = u. The seed axis is
// the coordinate axis least aligned with u (lowest index on ties), so the
// north pole gets e1 = x, e2 = y.
struct TangentFrame {
    Vec3 e1;
    Vec3 e2;
};

inline TangentFrame tangent_frame(const Vec3& u) {
    const std::array<double, 3> a{std::abs(u.x), std::abs(u.y), std::abs(u.z)};
    const auto k = static_cast<int>(std::min_element(a.begin(), a.end()) - a.begin());
    const Vec3 seed = k == 0 ? Vec3{1, 0, 0} : (k == 1 ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    const Vec3 e1 = normalized(tangential(u, seed));
    return {e1, cross(u, e1)};
}

// Latitude-longitude grid including both poles; used for dense scans.
inline std::vector<SphericalPoint> lat_long_grid(int n_lat, int n_lon) {
    std::vector<SphericalPoint> pts;
    pts.reserve(static_cast<std::size_t>(n_lat - 2) * n_lon + 2);
    pts.emplace_back(0.0, 0.0, 1.0);
    for (int i = 1; i < n_lat - 1; ++i) {
        const double theta = pi * i / (n_lat - 1);
        for (int j = 0; j < n_lon; ++j) {
            const double phi = two_pi * j / n_lon;
            pts.push_back(SphericalPoint::project(
                {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)}));
        }
    }
    pts.emplace_back(0.0, 0.0, -1.0);
    return pts;
}

// Pattern-search refinement of a local maximum of F on the sphere, halving the
// step until it drops below min_step.
template <class F>
SphericalPoint refine_maximum(F&& func, SphericalPoint start, double initial_step, double min_step = 1e-10) {
    SphericalPoint best = start;
    double best_val = func(best);
    double step = initial_step;
    while (step > min_step) {
        const TangentFrame fr = tangent_frame(best);
        bool improved = false;
        for (int k = 0; k < 8; ++k) {
            const double ang = pi * k / 4.0;
            const Vec3 dir = std::cos(ang) * fr.e1 + std::sin(ang) * fr.e2;
            const SphericalPoint cand = round_exp(best, step * dir);
            const double v = func(cand);
            if (v > best_val) {
                best_val = v;
                best = cand;
                improved = true;
                break;
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

// Global maximum estimate: scan a dense grid, then refine the best few nodes.
template <class F>
SphericalPoint locate_maximum(F&& func, int resolution, int refine_count = 4) {
    const auto grid = lat_long_grid(resolution + 1, 2 * resolution);
    std::vector<std::pair<double, std::size_t>> vals;
    vals.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals.emplace_back(func(grid[i]), i);
    std::stable_sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const double step = pi / resolution;
    SphericalPoint best = grid[vals.front().second];
    double best_val = vals.front().first;
    const int count = std::min<int>(refine_count, static_cast<int>(vals.size()));
    for (int k = 0; k < count; ++k) {
        const SphericalPoint p = refine_maximum(func, grid[vals[k].second], step);
        const double v = func(p);
        if (v > best_val) {
            best_val = v;
            best = p;
        }
    }
    return best;
}

}  // namespace sysarea
