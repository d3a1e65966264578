#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sysarea/errors.hpp"
#include "sysarea/sphere.hpp"

namespace sysarea {

namespace detail {

// Forward-mode jet carrying a value and its ambient gradient.
struct Jet {
    double v = 0.0;
    Vec3 g{};
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.g + b.g}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.g - b.g}; }
inline Jet operator*(const Jet& a, const Jet& b) { return {a.v * b.v, a.v * b.g + b.v * a.g}; }
inline Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.g}; }
inline Jet operator*(const Jet& a, double s) { return {s * a.v, s * a.g}; }

// Recurrence coefficients of the orthonormal associated Legendre functions
// (without the sin^m factor, which is carried by (x + iy)^m).
class LegendreTable {
public:
    static constexpr int max_degree = 128;

    static const LegendreTable& get() {
        static const LegendreTable table;
        return table;
    }

    static constexpr std::size_t index(int l, int m) {
        return static_cast<std::size_t>(l) * (l + 1) / 2 + m;
    }

    double a(int l, int m) const { return a_[index(l, m)]; }
    double b(int l, int m) const { return b_[index(l, m)]; }
    double diag(int m) const { return diag_[m]; }

private:
    LegendreTable() : a_(index(max_degree + 1, 0)), b_(index(max_degree + 1, 0)), diag_(max_degree + 1) {
        diag_[0] = 1.0 / std::sqrt(four_pi);
        for (int m = 1; m <= max_degree; ++m) {
            diag_[m] = diag_[m - 1] * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        }
        for (int l = 1; l <= max_degree; ++l) {
            for (int m = 0; m < l; ++m) {
                const double l2 = double(l) * l;
                const double m2 = double(m) * m;
                a_[index(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
                const double lm1 = l - 1.0;
                b_[index(l, m)] = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
            }
        }
    }

    std::vector<double> a_;
    std::vector<double> b_;
    std::vector<double> diag_;
};

template <class T>
T lift(double v) {
    if constexpr (std::is_same_v<T, double>) {
        return v;
    } else {
        return T{v, {}};
    }
}

inline constexpr std::size_t coeff_index(int l, int m) { return static_cast<std::size_t>(l * l + l + m); }

// Evaluates sum_{l<=L, |m|<=l} c_{lm} Y_{lm}(x, y, z) for the real orthonormal
// basis (no Condon-Shortley phase). T is double or Jet.
template <class T>
T sum_harmonics(std::span<const double> c, int L, const T& x, const T& y, const T& z) {
    const LegendreTable& tab = LegendreTable::get();
    const double sqrt2 = std::numbers::sqrt2;
    T total{};
    T cm = lift<T>(1.0);  // Re (x + iy)^m
    T sm{};               // Im (x + iy)^m
    double diag = tab.diag(0);
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            const T cn = cm * x - sm * y;
            const T sn = sm * x + cm * y;
            cm = cn;
            sm = sn;
            diag = tab.diag(m);
        }
        // q_{m}^{m} is constant, q_{m+1}^{m} = sqrt(2m+3) z q_m^m.
        T q_prev2{};
        T q_prev = lift<T>(diag);
        T sum_c = c[coeff_index(m, m)] * q_prev;
        T sum_s{};
        if (m > 0) sum_s = c[coeff_index(m, -m)] * q_prev;
        for (int l = m + 1; l <= L; ++l) {
            T q;
            if (l == m + 1) {
                q = std::sqrt(2.0 * m + 3.0) * (z * q_prev);
            } else {
                q = tab.a(l, m) * (z * q_prev - tab.b(l, m) * q_prev2);
            }
            sum_c = sum_c + c[coeff_index(l, m)] * q;
            if (m > 0) sum_s = sum_s + c[coeff_index(l, -m)] * q;
            q_prev2 = q_prev;
            q_prev = q;
        }
        if (m == 0) {
            total = total + sum_c;
        } else {
            total = total + sqrt2 * (cm * sum_c + sm * sum_s);
        }
    }
    return total;
}

// All basis values Y_lm(p), l <= L, in coeff_index order.
inline std::vector<double> basis_values(int L, const SphericalPoint& p) {
    const LegendreTable& tab = LegendreTable::get();
    std::vector<double> out(static_cast<std::size_t>((L + 1) * (L + 1)));
    double cm = 1.0;
    double sm = 0.0;
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            const double cn = cm * p.x() - sm * p.y();
            sm = sm * p.x() + cm * p.y();
            cm = cn;
        }
        const double fc = m == 0 ? 1.0 : std::numbers::sqrt2 * cm;
        const double fs = std::numbers::sqrt2 * sm;
        double q_prev2 = 0.0;
        double q_prev = tab.diag(m);
        for (int l = m; l <= L; ++l) {
            double q = q_prev;
            if (l == m + 1) {
                q = std::sqrt(2.0 * m + 3.0) * p.z() * q_prev;
            } else if (l > m + 1) {
                q = tab.a(l, m) * (p.z() * q_prev - tab.b(l, m) * q_prev2);
            }
            if (l > m) {
                q_prev2 = q_prev;
                q_prev = q;
            }
            out[coeff_index(l, m)] = fc * q;
            if (m > 0) out[coeff_index(l, -m)] = fs * q;
        }
    }
    return out;
}

}  // namespace detail

/// Band-limited real function on S^2, stored as coefficients in the real
/// orthonormal spherical-harmonic basis (integral of Y_lm^2 over S^2 is 1).
/// Coefficients are indexed by (l, m) with 0 <= l <= L and -l <= m <= l.
class SphericalFunction {
public:
    SphericalFunction() : SphericalFunction(0) {}

    explicit SphericalFunction(int degree_max)
        : L_(degree_max), c_(static_cast<std::size_t>((degree_max + 1) * (degree_max + 1)), 0.0) {
        if (degree_max < 0 || degree_max > detail::LegendreTable::max_degree) {
            throw InvalidArgument("degree_max must lie in [0, 128]");
        }
    }

    static SphericalFunction zero(int degree_max = 0) { return SphericalFunction(degree_max); }

    static SphericalFunction constant(double value, int degree_max = 0) {
        SphericalFunction f(degree_max);
        f.c_[0] = value * std::sqrt(four_pi);
        return f;
    }

    static SphericalFunction harmonic(int l, int m, double scale = 1.0) {
        SphericalFunction f(l);
        f.set(l, m, scale);
        return f;
    }

    int degree_max() const { return L_; }

    // Highest l carrying a nonzero coefficient (0 for the zero function).
    int effective_degree() const {
        for (int l = L_; l > 0; --l) {
            for (int m = -l; m <= l; ++m) {
                if (coeff(l, m) != 0.0) return l;
            }
        }
        return 0;
    }

    double coeff(int l, int m) const {
        check_index(l, m);
        return c_[detail::coeff_index(l, m)];
    }

    void set(int l, int m, double value) {
        check_index(l, m);
        c_[detail::coeff_index(l, m)] = value;
    }

    std::span<const double> coeffs() const { return c_; }

    bool is_zero() const {
        for (double v : c_) {
            if (v != 0.0) return false;
        }
        return true;
    }

    double eval(const SphericalPoint& p) const {
        return detail::sum_harmonics<double>(c_, L_, p.x(), p.y(), p.z());
    }

    // Value and tangential (surface) gradient at p.
    std::pair<double, Vec3> value_and_gradient(const SphericalPoint& p) const {
        using detail::Jet;
        const Jet jx{p.x(), {1, 0, 0}};
        const Jet jy{p.y(), {0, 1, 0}};
        const Jet jz{p.z(), {0, 0, 1}};
        const Jet r = detail::sum_harmonics<Jet>(c_, L_, jx, jy, jz);
        return {r.v, tangential(p, r.g)};
    }

    // Copy with degree_max changed; truncates when shrinking.
    SphericalFunction resized(int degree_max) const {
        SphericalFunction out(degree_max);
        const int lmin = std::min(L_, degree_max);
        for (int l = 0; l <= lmin; ++l) {
            for (int m = -l; m <= l; ++m) out.set(l, m, coeff(l, m));
        }
        return out;
    }

    // Sum of squared coefficients, i.e. the squared L2 norm over (S^2, g0).
    double squared_l2_norm() const {
        double s = 0.0;
        for (double v : c_) s += v * v;
        return s;
    }

    SphericalFunction& operator+=(const SphericalFunction& o) {
        if (o.L_ > L_) *this = resized(o.L_);
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }

    SphericalFunction& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }

    friend SphericalFunction operator+(SphericalFunction a, const SphericalFunction& b) { return a += b; }
    friend SphericalFunction operator-(SphericalFunction a, const SphericalFunction& b) {
        SphericalFunction nb = b;
        nb *= -1.0;
        return a += nb;
    }
    friend SphericalFunction operator*(double s, SphericalFunction a) { return a *= s; }
    friend SphericalFunction operator*(SphericalFunction a, double s) { return a *= s; }

    friend bool operator==(const SphericalFunction& a, const SphericalFunction& b) {
        const int L = std::max(a.L_, b.L_);
        const SphericalFunction ra = a.resized(L);
        const SphericalFunction rb = b.resized(L);
        return ra.c_ == rb.c_;
    }

private:
    void check_index(int l, int m) const {
        if (l < 0 || l > L_ || m < -l || m > l) {
            throw InvalidArgument("harmonic index (" + std::to_string(l) + ", " + std::to_string(m) +
                                  ") outside degree_max " + std::to_string(L_));
        }
    }

    int L_;
    std::vector<double> c_;
};

/// Tensor-product rule: Gauss-Legendre in cos(theta) times a uniform longitude
/// grid. Exact for every spherical harmonic of degree <= band.
struct SphereQuadrature {
    int band = 0;
    std::vector<SphericalPoint> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Re-evaluate the derivative at the converged node.
        double p0 = 1.0;
        double p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    return {x, w};
}

}  // namespace detail

inline SphereQuadrature build_quadrature(int band) {
    if (band < 0) throw InvalidArgument("quadrature band must be >= 0");
    const int n_theta = band / 2 + 1;
    const int n_phi = band + 1;
    const auto [zs, ws] = detail::gauss_legendre(n_theta);
    SphereQuadrature q;
    q.band = band;
    q.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    q.weights.reserve(q.nodes.capacity());
    for (int i = 0; i < n_theta; ++i) {
        const double z = zs[i];
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = two_pi * j / n_phi;
            q.nodes.push_back(SphericalPoint::project({r * std::cos(phi), r * std::sin(phi), z}));
            q.weights.push_back(ws[i] * two_pi / n_phi);
        }
    }
    return q;
}

// Quadrature of an arbitrary callable; fixed node order keeps sums deterministic.
template <class F>
double integrate_fn(F&& func, const SphereQuadrature& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * func(q.nodes[i]);
    return s;
}

inline double integrate(const SphericalFunction& f, const SphereQuadrature& q) {
    if (q.band < f.effective_degree()) {
        throw BandTooLow("quadrature band " + std::to_string(q.band) + " below function degree " +
                         std::to_string(f.effective_degree()));
    }
    return integrate_fn([&](const SphericalPoint& p) { return f.eval(p); }, q);
}

struct MeanZeroSplit {
    double lambda;          // mean value (1/4pi) * integral of f
    SphericalFunction f0;   // f - lambda, integrates to zero
};

inline MeanZeroSplit mean_zero_decompose(const SphericalFunction& f) {
    MeanZeroSplit out{f.coeff(0, 0) / std::sqrt(four_pi), f};
    out.f0.set(0, 0, 0.0);
    return out;
}

struct ParitySplit {
    SphericalFunction f_plus;   // even degrees: invariant under the antipodal map
    SphericalFunction f_minus;  // odd degrees: changes sign under it
};

inline ParitySplit parity_decompose(const SphericalFunction& f) {
    ParitySplit out{SphericalFunction(f.degree_max()), SphericalFunction(f.degree_max())};
    for (int l = 0; l <= f.degree_max(); ++l) {
        SphericalFunction& dst = (l % 2 == 0) ? out.f_plus : out.f_minus;
        for (int m = -l; m <= l; ++m) dst.set(l, m, f.coeff(l, m));
    }
    return out;
}

// Round Laplace-Beltrami operator: Y_lm -> -l(l+1) Y_lm.
inline SphericalFunction laplacian(const SphericalFunction& f) {
    SphericalFunction out(f.degree_max());
    for (int l = 1; l <= f.degree_max(); ++l) {
        for (int m = -l; m <= l; ++m) out.set(l, m, -double(l) * (l + 1) * f.coeff(l, m));
    }
    return out;
}

// L-infinity norm estimated by a dense scan plus local refinement of both signs.
inline double sup_norm(const SphericalFunction& f) {
    if (f.is_zero()) return 0.0;
    const int res = 4 * f.effective_degree() + 16;
    const auto fmax = locate_maximum([&](const SphericalPoint& p) { return f.eval(p); }, res);
    const auto fmin = locate_maximum([&](const SphericalPoint& p) { return -f.eval(p); }, res);
    return std::max(std::abs(f.eval(fmax)), std::abs(f.eval(fmin)));
}

// JSON layout: {"L": int, "coeffs": [[l, m, value], ...]}; omitted entries are zero.
inline void to_json(nlohmann::json& j, const SphericalFunction& f) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (int l = 0; l <= f.degree_max(); ++l) {
        for (int m = -l; m <= l; ++m) {
            const double v = f.coeff(l, m);
            if (v != 0.0) coeffs.push_back(nlohmann::json::array({l, m, v}));
        }
    }
    j = nlohmann::json{{"L", f.degree_max()}, {"coeffs", coeffs}};
}

inline void from_json(const nlohmann::json& j, SphericalFunction& f) {
    if (!j.is_object() || !j.contains("L")) throw InvalidArgument("spherical function JSON needs an \"L\" field");
    f = SphericalFunction(j.at("L").get<int>());
    if (!j.contains("coeffs")) return;
    for (const auto& e : j.at("coeffs")) {
        if (!e.is_array() || e.size() != 3) throw InvalidArgument("coefficient entries must be [l, m, value]");
        f.set(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    }
}

}  // namespace sysarea
