// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sysarea/sysarea.hpp"

using namespace sysarea;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SphericalPoint random_point(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return SphericalPoint::project({n(rng), n(rng), n(rng)});
}

SphericalFunction random_mean_zero(std::mt19937_64& rng, int L) {
    std::normal_distribution<double> n(0.0, 1.0);
    SphericalFunction f(L);
    for (int l = 1; l <= L; ++l) {
        for (int m = -l; m <= l; ++m) f.set(l, m, n(rng) / (1.0 + l));
    }
    return f;
}

double coeff_square_sum(const SphericalFunction& f) {
    double s = 0.0;
    for (int l = 0; l <= f.degree_max(); ++l) {
        for (int m = -l; m <= l; ++m) s += f.coeff(l, m) * f.coeff(l, m);
    }
    return s;
}

double legendre_at_zero(int l) {
    if (l % 2) return 0.0;
    double v = 1.0;
    for (int k = 1; k <= l / 2; ++k) v *= -(2.0 * k - 1.0) / (2.0 * k);
    return v;
}

struct Direction {
    std::string name;
    SphericalFunction f;
};

std::vector<Direction> default_directions() {
    return {
        {"Y20", SphericalFunction::harmonic(2, 0)},
        {"Y30", SphericalFunction::harmonic(3, 0)},
        {"Y21+Y43/2", SphericalFunction::harmonic(2, 1) + SphericalFunction::harmonic(4, 3, 0.5)},
        {"Y10+Y20", SphericalFunction::harmonic(1, 0) + SphericalFunction::harmonic(2, 0)},
    };
}

struct Run {
    double area;
    double systole;
    double ratio;
    double gauss_bonnet_error;
};

// Systole runs shared by the inequality, margin and parity criteria.
class RunCache {
public:
    const Run& get(const Direction& d, double t) {
        const auto key = std::make_pair(d.name, t);
        auto it = runs_.find(key);
        if (it != runs_.end()) return it->second;
        const ConformalMetric g = make_variation(d.f, t, 0.0);
        const SystoleReport rep = estimate_systole(g);
        const CurvatureField k(g);
        const double total = integrate_fn(
            [&](const SphericalPoint& p) {
                const double w = g.w(p);
                return k.at(p) * w * w;
            },
            k.check_nodes());
        const double a = area(g);
        Run r{a, rep.systole, systolic_ratio(a, rep.systole), std::abs(total - 4.0 * pi)};
        std::printf("    %-10s t=%+.2f  systole %.10f  ratio-1/pi %+.3e\n", d.name.c_str(), t, r.systole,
                    r.ratio - 1.0 / pi);
        std::fflush(stdout);
        return runs_.emplace(key, r).first->second;
    }
    const std::map<std::pair<std::string, double>, Run>& all() const { return runs_; }

private:
    std::map<std::pair<std::string, double>, Run> runs_;
};

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

const std::vector<double> sweep_t = {-0.1, -0.05, -0.02, 0.02, 0.05, 0.1};

}  // namespace

int main() {
    std::mt19937_64 rng(20240601);
    RunCache cache;
    const auto dirs = default_directions();

    {  // 1. round baseline
        const auto t0 = Clock::now();
        const ConformalMetric g = round_metric();
        const double a = area(g);
        const double s = estimate_systole(g).systole;
        const double r = systolic_ratio(a, s);
        const double dt = seconds_since(t0);
        const bool ok = std::abs(a - 4.0 * pi) <= 1e-10 && std::abs(s - two_pi) <= 1e-4 &&
                        std::abs(r - 1.0 / pi) <= 1e-4 && dt < 60.0;
        report(1, ok, fmt("round baseline: |area-4pi| %.2e, |sys-2pi| %.2e, %.1f s", std::abs(a - 4.0 * pi),
                          std::abs(s - two_pi), dt) + fmt(", |ratio-1/pi| %.2e", std::abs(r - 1.0 / pi)));
    }

    {  // 2. Funk spectral table
        const auto t0 = Clock::now();
        double worst_even = 0.0;
        double worst_odd = 0.0;
        for (int l = 0; l <= 8; ++l) {
            for (int m = -l; m <= l; ++m) {
                const SphericalFunction y = SphericalFunction::harmonic(l, m);
                for (int i = 0; i < 50; ++i) {
                    const SphericalPoint u = random_point(rng);
                    const double e = std::abs(funk_transform(y, u) - two_pi * legendre_at_zero(l) * y.eval(u));
                    (l % 2 ? worst_odd : worst_even) = std::max(l % 2 ? worst_odd : worst_even, e);
                }
            }
        }
        const double dt = seconds_since(t0);
        report(2, worst_even <= 1e-9 && worst_odd <= 1e-12 && dt < 10.0,
               fmt("Funk table l<=8: even err %.2e, odd err %.2e, %.2f s", worst_even, worst_odd, dt));
    }

    {  // 3. exact area identity
        double worst = 0.0;
        std::uniform_real_distribution<double> frac(-0.95, 0.95);
        for (int i = 0; i < 20; ++i) {
            const SphericalFunction f = random_mean_zero(rng, 1 + i % 6);
            const double t = frac(rng) * max_admissible_t(f);
            worst = std::max(worst, std::abs(area(make_variation(f, t, 0.0)) - 4.0 * pi - t * t * coeff_square_sum(f)));
        }
        report(3, worst <= 1e-10, fmt("area identity over 20 (f, t): max err %.2e", worst));
    }

    {  // 4. exact length identity
        double worst = 0.0;
        std::uniform_real_distribution<double> frac(-0.95, 0.95);
        for (int i = 0; i < 100; ++i) {
            const SphericalFunction f = random_mean_zero(rng, 1 + i % 7);
            const double t = frac(rng) * max_admissible_t(f);
            const SphericalPoint u = random_point(rng);
            // Independent quadrature of the Funk transform: 4096-point trapezoid.
            const TangentFrame fr = tangent_frame(u);
            double funk = 0.0;
            for (int k = 0; k < 4096; ++k) {
                const double a = two_pi * k / 4096;
                funk += f.eval(SphericalPoint::project(std::cos(a) * fr.e1 + std::sin(a) * fr.e2)) * two_pi / 4096;
            }
            worst = std::max(worst, std::abs(great_circle_length(make_variation(f, t, 0.0), u) - two_pi - t * funk));
        }
        report(4, worst <= 1e-10, fmt("length identity over 100 (f, t, u): max err %.2e", worst));
    }

    {  // 5. averaging identities
        double worst_mean = 0.0;
        double worst_tb = 0.0;
        for (int i = 0; i < 5; ++i) {
            const SphericalFunction f = random_mean_zero(rng, 2 + i);
            const ConformalMetric g = make_variation(f, 0.5 * max_admissible_t(f), 0.0);
            worst_mean = std::max(worst_mean, std::abs(average_great_circle_length(g) - two_pi));
            const auto id = verify_tangent_bundle_identity(g);
            worst_tb = std::max({worst_tb, std::abs(id.lhs - 8.0 * pi * pi), std::abs(id.rhs - 8.0 * pi * pi)});
        }
        report(5, worst_mean <= 1e-8 && worst_tb <= 1e-7,
               fmt("averaging: mean length err %.2e, tangent-bundle err %.2e", worst_mean, worst_tb));
    }

    {  // 6. sys <= 2 pi over the default sweep, 7. ratio margin on the same sweep
        const auto t0 = Clock::now();
        double worst_excess = -1e300;
        double worst_margin = 1e300;
        bool strict = true;
        for (const auto& d : dirs) {
            const double n2 = coeff_square_sum(d.f);
            for (double t : sweep_t) {
                const Run& r = cache.get(d, t);
                worst_excess = std::max(worst_excess, r.systole - two_pi);
                worst_margin = std::min(worst_margin, r.ratio - (1.0 / pi + t * t * n2 / (4.0 * pi * pi)));
                strict = strict && r.ratio > 1.0 / pi;
            }
        }
        const double dt = seconds_since(t0);
        report(6, worst_excess <= 1e-4 && dt < 600.0,
               fmt("sys <= 2pi + 1e-4 over 4 directions x 6 t: max sys-2pi %.3e, %.0f s", worst_excess, dt));
        report(7, worst_margin >= -1e-6 && strict,
               fmt("ratio >= 1/pi + t^2|f|^2/4pi^2 - 1e-6: min slack %.3e, strict %.0f", worst_margin, strict));
    }

    {  // 8. first-order Zoll
        double worst_linear = 0.0;
        double lo_ratio = 1e300;
        double hi_ratio = -1e300;
        const std::vector<SphericalFunction> odd = {
            SphericalFunction::harmonic(3, 0), SphericalFunction::harmonic(1, 0) + SphericalFunction::harmonic(3, 2, 0.5),
            parity_decompose(random_mean_zero(rng, 5)).f_minus};
        for (const auto& f : odd) {
            for (double t : {0.1, 0.05}) {
                const ConformalMetric gp = make_variation(f, t, 0.0, ConformalForm::Exponential);
                const ConformalMetric gm = make_variation(f, -t, 0.0, ConformalForm::Exponential);
                for (int i = 0; i < 100; ++i) {
                    const SphericalPoint u = random_point(rng);
                    worst_linear = std::max(
                        worst_linear, std::abs(great_circle_length(gp, u) - great_circle_length(gm, u)) / (2.0 * t));
                }
                worst_linear = std::max(worst_linear, detail::max_linear_length_term(f, t, ConformalForm::Exponential));
                const double ratio = detail::max_great_circle_deviation(gp) /
                                     detail::max_great_circle_deviation(
                                         make_variation(f, 0.5 * t, 0.0, ConformalForm::Exponential));
                lo_ratio = std::min(lo_ratio, ratio);
                hi_ratio = std::max(hi_ratio, ratio);
            }
        }
        report(8, worst_linear <= 1e-10 && lo_ratio >= 3.5 && hi_ratio <= 4.5,
               fmt("first-order Zoll: linear term %.2e, deviation ratio in [%.4f, %.4f]", worst_linear, lo_ratio,
                   hi_ratio));
    }

    {  // 9. even directions
        double worst = 1e300;
        bool positive = true;
        for (const auto& d : dirs) {
            if (!parity_decompose(d.f).f_minus.is_zero()) continue;
            for (double t : {-0.1, -0.05, 0.05, 0.1}) {
                const Run& r = cache.get(d, t);
                worst = std::min(worst, r.ratio - 1.0 / pi);
                positive = positive && r.ratio > 1.0 / pi;
            }
        }
        report(9, worst >= -1e-6 && positive, fmt("even directions: min ratio-1/pi %.3e", worst));
    }

    {  // 10. numerics hygiene
        const ConformalMetric g = make_variation(dirs[2].f, 0.1, 0.0);
        const SphericalPoint p = SphericalPoint::project({0.3, -0.2, 0.9});
        const Vec3 v = tangent_frame(p).e1;
        auto end = [&](double h) { return integrate_geodesic(g, p, v, 2.0, h).points.back().vec(); };
        const Vec3 a = end(0.01);
        const Vec3 b = end(0.005);
        const Vec3 c = end(0.0025);
        const double order = std::log2(norm(a - b) / norm(b - c));
        double gb = 0.0;
        for (const auto& [key, r] : cache.all()) gb = std::max(gb, r.gauss_bonnet_error);
        const long mono = birkhoff_monotonicity_failures();
        report(10, std::abs(order - 4.0) <= 0.2 && mono == 0 && gb <= 1e-6,
               fmt("hygiene: RK4 observed order %.3f, Birkhoff length increases %.0f, Gauss-Bonnet err %.2e", order,
                   static_cast<double>(mono), gb));
    }

    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
