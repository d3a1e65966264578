#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysarea/errors.hpp"
#include "sysarea/harmonics.hpp"
#include "sysarea/sphere.hpp"

namespace sysarea {

/// How the direction f enters the conformal factor.
///   Square:      g = (1 + lambda t) (1 + t f)^2 g0, length factor sqrt(1 + lambda t)(1 + t f)
///   Exponential: g = (1 + lambda t) exp(t f) g0,    length factor sqrt(1 + lambda t) exp(t f / 2)
/// Square is the variation used throughout; Exponential is the first-order
/// truncation exp(rho_t) g0 with rho_t = t f used by the Zoll experiment.
enum class ConformalForm { Square, Exponential };

// Smallest |f|-scaled admissible bound: a = 1 / sup|f| (infinite for f = 0).
inline double max_admissible_t(const SphericalFunction& f) {
    const double s = sup_norm(f);
    return s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity();
}

/// Conformal metric on S^2 with pointwise length factor w, so that lengths are
/// w ds0 and areas w^2 dv0. Immutable; build it with make_variation.
class ConformalMetric {
public:
    struct LogFactor {
        double rho;  // log w
        Vec3 grad;   // round surface gradient of rho
    };

    const SphericalFunction& direction() const { return f_; }
    double t() const { return t_; }
    double lambda() const { return lambda_; }
    ConformalForm form() const { return form_; }
    const SphereQuadrature& quadrature() const { return quad_; }
    double scale() const { return scale_; }
    bool is_round() const { return round_; }

    double w(const SphericalPoint& p) const {
        if (round_) return scale_;
        const double v = f_eval_.eval(p);
        return form_ == ConformalForm::Square ? scale_ * (1.0 + t_ * v) : scale_ * std::exp(0.5 * t_ * v);
    }

    LogFactor log_factor(const SphericalPoint& p) const {
        if (round_) return {std::log(scale_), {}};
        const auto [v, g] = f_eval_.value_and_gradient(p);
        if (form_ == ConformalForm::Square) {
            const double base = 1.0 + t_ * v;
            return {std::log(scale_ * base), (t_ / base) * g};
        }
        return {std::log(scale_) + 0.5 * t_ * v, (0.5 * t_) * g};
    }

    // Same metric multiplied by the constant mu > 0 (lengths scale by sqrt(mu)).
    ConformalMetric scaled(double mu) const {
        if (!(mu > 0.0)) throw InvalidArgument("scale factor must be positive");
        ConformalMetric g = *this;
        g.scale_ *= std::sqrt(mu);
        return g;
    }

private:
    friend ConformalMetric make_variation(const SphericalFunction&, double, double, ConformalForm, int);

    SphericalFunction f_;
    SphericalFunction f_eval_;  // f truncated to its effective degree
    double t_ = 0.0;
    double lambda_ = 0.0;
    ConformalForm form_ = ConformalForm::Square;
    SphereQuadrature quad_;
    double scale_ = 1.0;
    bool round_ = true;
};

/// Builds (1 + lambda t)(1 + t f)^2 g0 (or the exponential form). f must be
/// mean-zero; |t| must stay below max_admissible_t(f) for the square form.
/// quad_band < 0 selects the default 2L + 2.
inline ConformalMetric make_variation(const SphericalFunction& f, double t, double lambda,
                                      ConformalForm form = ConformalForm::Square, int quad_band = -1) {
    if (!std::isfinite(t) || !std::isfinite(lambda)) throw InvalidArgument("t and lambda must be finite");
    const double c00 = f.coeff(0, 0);
    if (std::abs(c00) > 1e-12 * std::max(1.0, std::sqrt(f.squared_l2_norm()))) {
        throw InvalidArgument("variation direction must be mean-zero; split it with mean_zero_decompose");
    }
    if (!(1.0 + lambda * t > 0.0)) {
        throw NonAdmissibleT("1 + lambda t = " + std::to_string(1.0 + lambda * t) + " is not positive");
    }
    const int band = quad_band < 0 ? 2 * f.degree_max() + 2 : quad_band;
    const int deg = f.effective_degree();
    if (band < 2 * deg) {
        throw BandTooLow("metric quadrature band " + std::to_string(band) + " cannot integrate w^2 of degree " +
                         std::to_string(2 * deg));
    }

    ConformalMetric g;
    g.f_ = f;
    g.f_.set(0, 0, 0.0);
    g.f_eval_ = g.f_.resized(deg);
    g.t_ = t;
    g.lambda_ = lambda;
    g.form_ = form;
    g.quad_ = build_quadrature(band);
    g.scale_ = std::sqrt(1.0 + lambda * t);
    g.round_ = (t == 0.0) || f.is_zero();

    if (form == ConformalForm::Square && !g.round_) {
        const double a = max_admissible_t(f);
        if (!(std::abs(t) < a)) {
            throw NonAdmissibleT("|t| = " + std::to_string(std::abs(t)) + " outside ]-a, a[ with a = " +
                                 std::to_string(a));
        }
        // Positivity on the quadrature nodes and on a 10x denser check grid.
        for (const auto& p : g.quad_.nodes) {
            if (!(1.0 + t * g.f_eval_.eval(p) > 0.0)) throw NonAdmissibleT("1 + t f <= 0 at a quadrature node");
        }
        const int n_theta = band / 2 + 1;
        for (const auto& p : lat_long_grid(10 * n_theta + 1, 10 * (band + 1))) {
            if (!(1.0 + t * g.f_eval_.eval(p) > 0.0)) throw NonAdmissibleT("1 + t f <= 0 on the check grid");
        }
    }
    return g;
}

inline ConformalMetric round_metric(int degree_max = 8) {
    return make_variation(SphericalFunction(degree_max), 0.0, 0.0);
}

// Metric spec JSON: {"f": <function>, "t": real, "lambda": real, "L_quad_band": int}.
inline nlohmann::json metric_to_json(const ConformalMetric& g) {
    return {{"f", g.direction()}, {"t", g.t()}, {"lambda", g.lambda()}, {"L_quad_band", g.quadrature().band}};
}

inline ConformalMetric metric_from_json(const nlohmann::json& j) {
    const auto f = j.at("f").get<SphericalFunction>();
    const double t = j.value("t", 0.0);
    const double lambda = j.value("lambda", 0.0);
    const int band = j.value("L_quad_band", -1);
    return make_variation(f, t, lambda, ConformalForm::Square, band);
}

/// Closed polygon on S^2; vertex n-1 connects back to vertex 0. A curve whose
/// vertices all coincide is the degenerate point curve.
class DiscreteClosedCurve {
public:
    explicit DiscreteClosedCurve(std::vector<SphericalPoint> vertices) : v_(std::move(vertices)) {
        if (v_.empty()) throw InvalidArgument("curve needs at least one vertex");
        point_ = true;
        for (const auto& p : v_) {
            if (round_distance(p, v_.front()) != 0.0) {
                point_ = false;
                break;
            }
        }
        if (point_) return;
        if (v_.size() < 3) throw InvalidArgument("non-degenerate curve needs at least 3 vertices");
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const double d = round_distance(v_[i], v_[(i + 1) % v_.size()]);
            if (d > 0.5 * pi + 1e-12) {
                throw InvalidArgument("consecutive vertices farther apart than pi/2 (" + std::to_string(d) + ")");
            }
        }
    }

    static DiscreteClosedCurve point(const SphericalPoint& p, std::size_t n = 1) {
        return DiscreteClosedCurve(std::vector<SphericalPoint>(std::max<std::size_t>(n, 1), p));
    }

    bool is_point() const { return point_; }
    std::size_t size() const { return v_.size(); }
    const std::vector<SphericalPoint>& vertices() const { return v_; }
    const SphericalPoint& operator[](std::size_t i) const { return v_[i]; }

private:
    std::vector<SphericalPoint> v_;
    bool point_ = false;
};

inline double round_length(const DiscreteClosedCurve& c) {
    if (c.is_point()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += round_distance(c[i], c[(i + 1) % c.size()]);
    return s;
}

inline double area(const ConformalMetric& g) {
    return integrate_fn(
        [&](const SphericalPoint& p) {
            const double w = g.w(p);
            return w * w;
        },
        g.quadrature());
}

// Edge lengths use w at the round midpoint of each arc (second order).
inline double curve_length(const ConformalMetric& g, const DiscreteClosedCurve& c) {
    if (c.is_point()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec3& a = c[i];
        const Vec3& b = c[(i + 1) % c.size()];
        s += g.w(round_midpoint(a, b)) * round_distance(a, b);
    }
    return s;
}

// Energy for the uniform parameter grid on a circle of total measure 2 pi, so
// a constant-speed curve has E = l^2 / (4 pi).
inline double curve_energy(const ConformalMetric& g, const DiscreteClosedCurve& c) {
    if (c.is_point()) return 0.0;
    const double dtau = two_pi / static_cast<double>(c.size());
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec3& a = c[i];
        const Vec3& b = c[(i + 1) % c.size()];
        const double e = g.w(round_midpoint(a, b)) * round_distance(a, b);
        s += e * e;
    }
    return 0.5 * s / dtau;
}

/// Gaussian curvature K = (1 - Lap0 rho) exp(-2 rho), rho = log w, with the
/// Laplacian taken spectrally on a band-limited projection of rho. The
/// projection starts at degree 2L and is refined (doubling, up to max_degree)
/// until its relative L2 residual is below max_residual.
class CurvatureField {
public:
    explicit CurvatureField(const ConformalMetric& g, double max_residual = 1e-6, int max_degree = 96) : g_(g) {
        int Lp = std::min(max_degree, 2 * std::max(1, g.direction().effective_degree()));
        for (;;) {
            project(Lp);
            if (residual_ <= max_residual || g.is_round()) break;
            if (Lp >= max_degree) {
                throw ProjectionResidualTooLarge("log w projection residual " + std::to_string(residual_) +
                                                 " at degree " + std::to_string(Lp) + " exceeds " +
                                                 std::to_string(max_residual));
            }
            Lp = std::min(max_degree, 2 * Lp);
        }
        lap_rho_ = laplacian(rho_);
    }

    double at(const SphericalPoint& p) const {
        const double w = g_.w(p);
        return (1.0 - lap_rho_.eval(p)) / (w * w);
    }

    double projection_residual() const { return residual_; }
    const SphericalFunction& log_factor_projection() const { return rho_; }
    const SphereQuadrature& check_nodes() const { return proj_quad_; }

    double min_over_nodes() const {
        double k = std::numeric_limits<double>::infinity();
        for (const auto& p : proj_quad_.nodes) k = std::min(k, at(p));
        return k;
    }

private:
    void project(int Lp) {
        proj_quad_ = build_quadrature(2 * Lp + 16);
        rho_ = SphericalFunction(Lp);
        const std::size_t nc = static_cast<std::size_t>((Lp + 1) * (Lp + 1));
        std::vector<double> rho_vals(proj_quad_.size());
        std::vector<double> coeffs(nc, 0.0);
        for (std::size_t i = 0; i < proj_quad_.size(); ++i) {
            rho_vals[i] = g_.log_factor(proj_quad_.nodes[i]).rho;
            const auto b = detail::basis_values(Lp, proj_quad_.nodes[i]);
            for (std::size_t k = 0; k < nc; ++k) coeffs[k] += proj_quad_.weights[i] * rho_vals[i] * b[k];
        }
        for (int l = 0; l <= Lp; ++l) {
            for (int m = -l; m <= l; ++m) rho_.set(l, m, coeffs[detail::coeff_index(l, m)]);
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < proj_quad_.size(); ++i) {
            const double r = rho_vals[i] - rho_.eval(proj_quad_.nodes[i]);
            num += proj_quad_.weights[i] * r * r;
            den += proj_quad_.weights[i] * rho_vals[i] * rho_vals[i];
        }
        residual_ = den > 0.0 ? std::sqrt(num / den) : 0.0;
    }

    ConformalMetric g_;
    SphereQuadrature proj_quad_;
    SphericalFunction rho_;
    SphericalFunction lap_rho_;
    double residual_ = 0.0;
};

inline double gauss_curvature(const ConformalMetric& g, const SphericalPoint& p) { return CurvatureField(g).at(p); }

inline double systolic_ratio(double area_value, double systole) {
    if (!(systole > 0.0)) throw DegenerateSystole("systole must be positive");
    if (!(area_value > 0.0)) throw InvalidArgument("area must be positive");
    return area_value / (systole * systole);
}

}  // namespace sysarea
