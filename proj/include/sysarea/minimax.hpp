#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "sysarea/circles_funk.hpp"
#include "sysarea/errors.hpp"
#include "sysarea/geodesic.hpp"
#include "sysarea/metric.hpp"
#include "sysarea/sphere.hpp"

namespace sysarea {

struct GeodesicResult {
    DiscreteClosedCurve curve = DiscreteClosedCurve::point(north_pole);
    double length = 0.0;
    double energy = 0.0;
    double residual = 0.0;  // max vertex displacement during the last pass
    int iterations = 0;
    bool converged = false;
    bool collapsed = false;
    int monotonicity_violations = 0;
};

struct BirkhoffOptions {
    int vertices = 16;          // even; vertices of the shortened polygon
    int output_samples = 0;     // dense output size; 0 keeps the input size (at least 128)
    double collapse_length = 0.1;
    double monotonicity_tol = 1e-13;
    ArcOptions arc;
};

namespace detail {

inline std::atomic<long>& monotonicity_failure_counter() {
    static std::atomic<long> counter{0};
    return counter;
}

// n points equally spaced in round arc length along the closed polygon c.
inline std::vector<SphericalPoint> resample_closed(const DiscreteClosedCurve& c, int n) {
    const std::size_t m = c.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + round_distance(c[i], c[(i + 1) % m]);
    const double total = cum[m];
    std::vector<SphericalPoint> out;
    out.reserve(n);
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double s = total * k / n;
        while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double frac = len > 0.0 ? (s - cum[seg]) / len : 0.0;
        out.push_back(slerp(c[seg], c[(seg + 1) % m], frac));
    }
    return out;
}

}  // namespace detail

/// Total number of length-increasing Birkhoff half passes seen in this process.
inline long birkhoff_monotonicity_failures() { return detail::monotonicity_failure_counter().load(); }

/// Birkhoff curve shortening on a geodesic polygon. Each pass replaces the
/// even-indexed vertices by the g-midpoints of their neighbours' geodesic arcs,
/// then the odd-indexed ones. After a half pass the polygon length is the sum
/// of the arcs just computed, so it can only decrease.
class BirkhoffPolygon {
public:
    BirkhoffPolygon(const ConformalMetric& g, const DiscreteClosedCurve& c, const BirkhoffOptions& opt = {})
        : g_(&g), opt_(opt), input_size_(static_cast<int>(c.size())) {
        if (opt.vertices < 4 || opt.vertices % 2 != 0) {
            throw InvalidArgument("Birkhoff polygon needs an even vertex count >= 4");
        }
        if (c.is_point()) {
            v_.assign(opt.vertices, c[0]);
            collapsed_ = true;
            return;
        }
        v_ = detail::resample_closed(c, opt.vertices);
        warm_.resize(v_.size());
        const std::size_t n = v_.size();
        for (std::size_t i = 0; i < n; ++i) length_ += geodesic_arc(g, v_[i], v_[(i + 1) % n], opt.arc).length;
        collapsed_ = length_ < opt.collapse_length;
    }

    // Polygon with the given vertices as-is (no resampling).
    static BirkhoffPolygon from_vertices(const ConformalMetric& g, std::vector<SphericalPoint> vertices,
                                         const BirkhoffOptions& opt = {}) {
        BirkhoffOptions o = opt;
        o.vertices = static_cast<int>(vertices.size());
        BirkhoffPolygon poly(g, DiscreteClosedCurve::point(vertices.front(), vertices.size()), o);
        poly.input_size_ = o.vertices;
        poly.v_ = std::move(vertices);
        poly.warm_.assign(poly.v_.size(), {});
        poly.length_ = 0.0;
        const std::size_t n = poly.v_.size();
        for (std::size_t i = 0; i < n; ++i) {
            poly.length_ += geodesic_arc(g, poly.v_[i], poly.v_[(i + 1) % n], o.arc).length;
        }
        poly.collapsed_ = poly.length_ < o.collapse_length;
        return poly;
    }

    // One full pass (even then odd half pass). Returns the new length.
    double pass() {
        residual_ = 0.0;
        if (collapsed_) return length_;
        const std::size_t n = v_.size();
        double moved = 0.0;
        for (std::size_t parity = 0; parity < 2; ++parity) {
            double total = 0.0;
            for (std::size_t i = parity; i < n; i += 2) {
                const ArcResult r = geodesic_arc(*g_, v_[(i + n - 1) % n], v_[(i + 1) % n], opt_.arc, &warm_[i]);
                moved = std::max(moved, round_distance(v_[i], r.midpoint));
                v_[i] = r.midpoint;
                total += r.length;
            }
            if (total > length_ + opt_.monotonicity_tol) {
                ++violations_;
                ++detail::monotonicity_failure_counter();
            }
            length_ = total;
        }
        ++iterations_;
        residual_ = moved;
        if (length_ < opt_.collapse_length) collapsed_ = true;
        return length_;
    }

    // Passes until the residual drops below tol, the curve collapses or
    // max_iter passes have been made in total.
    void run(double tol, int max_iter) {
        while (iterations_ < max_iter && !collapsed_) {
            pass();
            if (residual_ < tol) {
                converged_ = true;
                break;
            }
        }
    }

    double length() const { return length_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }
    bool collapsed() const { return collapsed_; }
    bool converged() const { return converged_; }
    int monotonicity_violations() const { return violations_; }
    const std::vector<SphericalPoint>& vertices() const { return v_; }

    // Dense sampling of the polygon along its g-geodesic edges.
    GeodesicResult result() const {
        GeodesicResult out;
        out.length = collapsed_ && length_ == 0.0 ? 0.0 : length_;
        out.residual = residual_;
        out.iterations = iterations_;
        out.converged = converged_;
        out.collapsed = collapsed_;
        out.monotonicity_violations = violations_;
        if (collapsed_) {
            out.curve = DiscreteClosedCurve(v_);
            out.energy = out.curve.is_point() ? 0.0 : curve_energy(*g_, out.curve);
            return out;
        }
        const int n = static_cast<int>(v_.size());
        const int target = opt_.output_samples > 0 ? opt_.output_samples : std::max(input_size_, 128);
        const int per_edge = std::max(1, (target + n - 1) / n);
        std::vector<SphericalPoint> pts;
        pts.reserve(static_cast<std::size_t>(per_edge) * n);
        for (int i = 0; i < n; ++i) {
            const auto seg = geodesic_arc_points(*g_, v_[i], v_[(i + 1) % n], per_edge, opt_.arc);
            pts.insert(pts.end(), seg.begin(), seg.end());
        }
        out.curve = DiscreteClosedCurve(std::move(pts));
        out.energy = curve_energy(*g_, out.curve);
        return out;
    }

private:
    const ConformalMetric* g_;
    BirkhoffOptions opt_;
    int input_size_;
    std::vector<SphericalPoint> v_;
    std::vector<ArcWarmStart> warm_;
    double length_ = 0.0;
    double residual_ = 0.0;
    int iterations_ = 0;
    int violations_ = 0;
    bool collapsed_ = false;
    bool converged_ = false;
};

/// Shortens c until the max vertex displacement per pass is below tol or
/// max_iter passes have run. Curves falling below the collapse length are
/// flagged collapsed.
inline GeodesicResult birkhoff_shorten(const ConformalMetric& g, const DiscreteClosedCurve& c, double tol,
                                       int max_iter, const BirkhoffOptions& opt = {}) {
    if (c.is_point()) throw InvalidArgument("birkhoff_shorten needs a non-degenerate curve");
    BirkhoffPolygon poly(g, c, opt);
    poly.run(tol, max_iter);
    return poly.result();
}

/// Stationary closed geodesic near a shortened polygon. Near-round metrics
/// have index-one closed geodesics that further shortening would leave, so the
/// polygon is first closed up exactly by close_geodesic; the result's residual
/// is the vertex displacement of one Birkhoff pass on g-equally spaced
/// vertices of that geodesic. Falls back to plain shortening when the closing
/// iteration fails.
inline GeodesicResult stationary_witness(const ConformalMetric& g, const BirkhoffPolygon& poly, double tol,
                                         int max_iter, const BirkhoffOptions& opt = {}) {
    if (!poly.collapsed()) {
        try {
            const auto& v = poly.vertices();
            ClosedGeodesicOptions copt;
            copt.samples = 16 * std::max(1, (std::max(opt.output_samples, 256) + 15) / 16);
            const ClosedGeodesic cg = close_geodesic(g, v[0], round_log(v[0], v[1]), poly.length(), copt);
            std::vector<SphericalPoint> coarse;
            const int stride = copt.samples / opt.vertices;
            for (int k = 0; k < opt.vertices; ++k) coarse.push_back(cg.points[k * stride]);
            BirkhoffPolygon check = BirkhoffPolygon::from_vertices(g, coarse, opt);
            check.pass();
            GeodesicResult out;
            out.curve = DiscreteClosedCurve(cg.points);
            out.length = cg.length;
            out.energy = curve_energy(g, out.curve);
            out.residual = check.residual();
            out.iterations = poly.iterations() + cg.iterations;
            out.converged = check.residual() < std::max(tol, 1e-8);
            out.monotonicity_violations = poly.monotonicity_violations() + check.monotonicity_violations();
            return out;
        } catch (const NoConvergence&) {
        }
    }
    BirkhoffPolygon cont = poly;
    cont.run(tol, max_iter);
    return cont.result();
}

enum class SweepoutKind { F, G };

/// One-parameter family of closed curves. F: great circles whose axes turn
/// half a revolution in the xy-plane. G(u): the circles gamma(u, s) for s from
/// -1 to 1, closed up by point curves along a half great circle from u to -u.
struct Sweepout {
    SweepoutKind kind = SweepoutKind::F;
    SphericalPoint axis = north_pole;
    std::vector<DiscreteClosedCurve> curves;
    std::vector<double> params;  // in [0, 1]
    int samples = 0;             // vertices per curve
    int circle_count = 0;        // G: members 0..circle_count-1 are circles
};

/// Family member at parameter p in [0, 1], interpolating the construction of
/// build_sweepout between its nodes.
inline DiscreteClosedCurve sweepout_curve(const Sweepout& sw, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("sweepout parameter must lie in [0, 1]");
    const double N1 = static_cast<double>(sw.curves.size()) - 1.0;
    if (sw.kind == SweepoutKind::F) {
        const double a = p * pi;
        return sample_circle({SphericalPoint(std::cos(a), std::sin(a), 0.0), 0.0}, sw.samples);
    }
    const double p_last = (sw.circle_count - 1) / N1;
    if (p <= p_last) return sample_circle({sw.axis, std::clamp(-1.0 + 2.0 * p / p_last, -1.0, 1.0)}, sw.samples);
    const int n2 = static_cast<int>(sw.curves.size()) - sw.circle_count;
    const double th = pi * (p - p_last) * N1 / (n2 + 1);
    const Vec3 e = tangent_frame(sw.axis).e1;
    return DiscreteClosedCurve::point(SphericalPoint::project(std::cos(th) * sw.axis + std::sin(th) * e), sw.samples);
}

inline Sweepout build_sweepout(SweepoutKind kind, int N, int n, const SphericalPoint& u = north_pole) {
    if (N < 9 || N % 2 == 0) throw InvalidArgument("sweepout needs an odd curve count N >= 9");
    if (n < 32) throw InvalidArgument("sweepout curves need n >= 32 samples");
    Sweepout sw;
    sw.kind = kind;
    sw.axis = u;
    sw.samples = n;
    for (int i = 0; i < N; ++i) sw.params.push_back(static_cast<double>(i) / (N - 1));
    if (kind == SweepoutKind::F) {
        for (int i = 0; i < N; ++i) {
            const double a = i * pi / (N - 1);
            sw.curves.push_back(sample_circle({SphericalPoint(std::cos(a), std::sin(a), 0.0), 0.0}, n));
        }
        return sw;
    }
    const int n2 = (N - 1) / 4;
    const int n1 = N - n2;
    sw.circle_count = n1;
    for (int k = 0; k < n1; ++k) {
        const double s = (k == (n1 - 1) / 2) ? 0.0 : -1.0 + 2.0 * k / (n1 - 1);
        sw.curves.push_back(sample_circle({u, s}, n));
    }
    const Vec3 e = tangent_frame(u).e1;
    for (int j = 1; j <= n2; ++j) {
        const double th = pi * j / (n2 + 1);
        sw.curves.push_back(DiscreteClosedCurve::point(SphericalPoint::project(std::cos(th) * u + std::sin(th) * e), n));
    }
    return sw;
}

struct TraceRow {
    int iteration;
    double max_length;
    int argmax_index;
};

struct TightenOptions {
    BirkhoffOptions birkhoff;
    bool witness = true;       // continue the argmax curve to stationarity
    double tol = 1e-10;
    int max_iter = 5000;
    int refine_levels = 0;     // bisections of the parameter around the argmax
};

struct SweepoutWidth {
    double width = 0.0;
    int argmax_index = 0;
    std::vector<TraceRow> trace;         // iteration 0 is the initial family
    std::vector<double> initial_lengths; // geodesic-polygon lengths before shortening
    std::vector<double> params;          // of every member, inserted ones last
    int shortened_curves = 0;            // curves that could reach the family max
    int monotonicity_violations = 0;
    std::optional<GeodesicResult> witness;
};

/// Applies `passes` Birkhoff passes to every member and reports the family
/// max. Curves whose initial length is already below the running max after
/// shortening cannot affect the result (shortening never lengthens) and are
/// skipped; the reported maxima are unchanged by this.
///
/// With refine_levels > 0, members are then inserted at the parameter
/// midpoints next to the current argmax, one level at a time, and tightened
/// the same way. A finite family otherwise misses the curves near the
/// saddle, whose neighbours drift off it during the passes.
inline SweepoutWidth tighten_sweepout(const ConformalMetric& g, const Sweepout& sw, int passes,
                                      const TightenOptions& opt = {}) {
    if (passes < 0) throw InvalidArgument("passes must be non-negative");
    if (opt.refine_levels < 0) throw InvalidArgument("refine_levels must be non-negative");
    const std::size_t N = sw.curves.size();
    std::vector<BirkhoffPolygon> polys;
    polys.reserve(N + 2 * static_cast<std::size_t>(opt.refine_levels));
    SweepoutWidth out;
    out.params = sw.params;
    for (const auto& c : sw.curves) {
        polys.emplace_back(g, c, opt.birkhoff);
        out.initial_lengths.push_back(polys.back().length());
    }
    std::vector<std::size_t> order(N);
    for (std::size_t i = 0; i < N; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.initial_lengths[a] > out.initial_lengths[b]; });

    // history[i][k] = length of curve i after k passes, for shortened curves.
    std::vector<std::vector<double>> history(N);
    auto shorten = [&](std::size_t idx) {
        auto& h = history[idx];
        h.push_back(polys[idx].length());
        for (int k = 0; k < passes; ++k) h.push_back(polys[idx].pass());
        out.monotonicity_violations += polys[idx].monotonicity_violations();
        ++out.shortened_curves;
        return h.back();
    };
    double running_max = -1.0;
    for (std::size_t idx : order) {
        if (running_max >= 0.0 && out.initial_lengths[idx] <= running_max) break;
        running_max = std::max(running_max, shorten(idx));
    }
    auto final_argmax = [&] {
        std::size_t best = 0;
        double m = -1.0;
        for (std::size_t i = 0; i < history.size(); ++i) {
            if (!history[i].empty() && history[i].back() > m) {
                m = history[i].back();
                best = i;
            }
        }
        return best;
    };
    for (int level = 0; level < opt.refine_levels; ++level) {
        const std::size_t i = final_argmax();
        if (history[i].back() <= opt.birkhoff.collapse_length) break;
        const double p = out.params[i];
        double lo = -1.0;
        double hi = 2.0;
        for (double q : out.params) {
            if (q < p) lo = std::max(lo, q);
            if (q > p) hi = std::min(hi, q);
        }
        for (double q : {0.5 * (lo + p), 0.5 * (p + hi)}) {
            if (q < 0.0 || q > 1.0) continue;
            polys.emplace_back(g, sweepout_curve(sw, q), opt.birkhoff);
            out.params.push_back(q);
            out.initial_lengths.push_back(polys.back().length());
            history.emplace_back();
            if (!polys.back().collapsed()) shorten(polys.size() - 1);
        }
    }
    for (int k = 0; k <= passes; ++k) {
        TraceRow row{k, -1.0, 0};
        for (std::size_t i = 0; i < history.size(); ++i) {
            if (!history[i].empty() && history[i][k] > row.max_length) {
                row.max_length = history[i][k];
                row.argmax_index = static_cast<int>(i);
            }
        }
        out.trace.push_back(row);
    }
    out.width = out.trace.back().max_length;
    out.argmax_index = out.trace.back().argmax_index;
    if (opt.witness) {
        out.witness = stationary_witness(g, polys[out.argmax_index], opt.tol, opt.max_iter, opt.birkhoff);
    }
    return out;
}

struct SystoleOptions {
    int N = 65;
    int n = 128;
    double tol = 1e-10;
    int max_iter = 5000;
    int passes = 8;
    int refine_levels = 12;
    std::uint64_t seed = 20240601;
    int seed_count = 20;
    int seed_max_iter = 60;
    double seed_residual = 1e-8;  // seeded candidates count only once this stationary
    BirkhoffOptions birkhoff;
};

struct Candidate {
    std::string source;
    double length;
    bool counted;
};

struct SystoleReport {
    double systole = 0.0;
    GeodesicResult witness;
    std::string witness_source;
    std::vector<Candidate> candidates;
    double curvature_min = 0.0;
    std::vector<std::string> warnings;
    std::vector<TraceRow> trace;  // of the sweepout giving the smallest width
    long monotonicity_violations = 0;
};

namespace detail {

// The 26 nonzero points of {-1, 0, 1}^3, normalized. Entries 13..25 are the
// antipodes of entries 12..0.
inline std::vector<SphericalPoint> cube_directions() {
    std::vector<SphericalPoint> out;
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            for (int k = -1; k <= 1; ++k) {
                if (i || j || k) out.push_back(SphericalPoint::project({double(i), double(j), double(k)}));
            }
        }
    }
    return out;
}

}  // namespace detail

/// Systole estimate: the smallest of the tightened widths of F and of G(u) over
/// the cube directions and the signed Funk axes, of the stationary limit of the
/// narrowest family's argmax curve, and of Birkhoff limits of seeded great
/// circles. Collapsed or non-stationary seed limits are listed but not counted.
/// Families are refined around their argmax (SystoleOptions::refine_levels);
/// a family whose unrefined width already exceeds the best refined width is
/// listed with its unrefined width.
inline SystoleReport estimate_systole(const ConformalMetric& g, const SystoleOptions& opt = {}) {
    SystoleReport rep;
    const long failures_before = birkhoff_monotonicity_failures();
    rep.curvature_min = CurvatureField(g).min_over_nodes();
    if (!(rep.curvature_min > 0.0)) {
        rep.warnings.push_back("CurvatureNotPositive: min node curvature " + std::to_string(rep.curvature_min));
    }

    TightenOptions topt;
    topt.birkhoff = opt.birkhoff;
    topt.witness = false;
    topt.refine_levels = opt.refine_levels;

    struct Family {
        std::string tag;
        Sweepout sw;
    };
    std::vector<Family> families;
    families.push_back({"F", build_sweepout(SweepoutKind::F, opt.N, opt.n)});
    const auto dirs = detail::cube_directions();
    // gamma(-u, -s) = gamma(u, s): antipodal directions give the same circles,
    // so only the first 13 are tightened and the rest reuse their widths.
    for (int k = 0; k < 13; ++k) {
        families.push_back({"G(cube " + std::to_string(k) + ")", build_sweepout(SweepoutKind::G, opt.N, opt.n, dirs[k])});
    }
    if (const auto axes = find_signed_funk_axes(g.direction())) {
        families.push_back({"G(u0)", build_sweepout(SweepoutKind::G, opt.N, opt.n, axes->u0)});
        families.push_back({"G(u1)", build_sweepout(SweepoutKind::G, opt.N, opt.n, axes->u1)});
    }

    // Unrefined widths first. Refinement only adds members, so a refined width
    // is at least the unrefined one: families are refined in increasing order
    // and skipped once their unrefined width reaches the best refined width.
    topt.refine_levels = 0;
    std::vector<SweepoutWidth> widths;
    for (const auto& fam : families) widths.push_back(tighten_sweepout(g, fam.sw, opt.passes, topt));
    std::vector<std::size_t> by_width(families.size());
    for (std::size_t i = 0; i < by_width.size(); ++i) by_width[i] = i;
    std::stable_sort(by_width.begin(), by_width.end(),
                     [&](std::size_t a, std::size_t b) { return widths[a].width < widths[b].width; });
    std::size_t best_family = by_width.front();
    for (std::size_t i : by_width) {
        if (widths[i].width > opt.birkhoff.collapse_length) {
            best_family = i;
            break;
        }
    }
    if (opt.refine_levels > 0) {
        topt.refine_levels = opt.refine_levels;
        double best_refined = std::numeric_limits<double>::infinity();
        for (std::size_t i : by_width) {
            if (widths[i].width >= best_refined) break;
            if (widths[i].width <= opt.birkhoff.collapse_length) continue;
            widths[i] = tighten_sweepout(g, families[i].sw, opt.passes, topt);
            if (widths[i].width < best_refined) {
                best_refined = widths[i].width;
                best_family = i;
            }
        }
    }
    for (std::size_t i = 0; i < families.size(); ++i) {
        rep.candidates.push_back({families[i].tag, widths[i].width, widths[i].width > opt.birkhoff.collapse_length});
        if (i == 1 + 12) {
            for (int k = 13; k < 26; ++k) {
                rep.candidates.push_back({"G(cube " + std::to_string(k) + ")", widths[1 + (25 - k)].width,
                                          widths[1 + (25 - k)].width > opt.birkhoff.collapse_length});
            }
        }
    }
    rep.trace = widths[best_family].trace;

    // The narrowest family's argmax curve made stationary.
    GeodesicResult family_witness;
    {
        const SweepoutWidth& wb = widths[best_family];
        BirkhoffPolygon poly(g, sweepout_curve(families[best_family].sw, wb.params[wb.argmax_index]), opt.birkhoff);
        for (int k = 0; k < opt.passes; ++k) poly.pass();
        family_witness = stationary_witness(g, poly, opt.tol, opt.max_iter, opt.birkhoff);
        const bool counted = !family_witness.collapsed && family_witness.residual <= opt.seed_residual;
        rep.candidates.push_back({families[best_family].tag + " witness", family_witness.length, counted});
    }

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<GeodesicResult> seeds;
    for (int k = 0; k < opt.seed_count; ++k) {
        const SphericalPoint axis = SphericalPoint::project({normal(rng), normal(rng), normal(rng)});
        const std::string tag = "seed " + std::to_string(k);
        try {
            GeodesicResult r = birkhoff_shorten(g, sample_circle({axis, 0.0}, opt.n), opt.tol, opt.seed_max_iter,
                                                opt.birkhoff);
            const bool counted = !r.collapsed && r.residual <= opt.seed_residual;
            rep.candidates.push_back({tag, r.length, counted});
            seeds.push_back(std::move(r));
        } catch (const Error& e) {
            rep.warnings.push_back(tag + " failed: " + e.what());
            rep.candidates.push_back({tag, std::numeric_limits<double>::quiet_NaN(), false});
            seeds.emplace_back();
        }
    }

    rep.systole = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
        const Candidate& c = rep.candidates[i];
        if (c.counted && c.length > opt.birkhoff.collapse_length && c.length < rep.systole) {
            rep.systole = c.length;
            best = i;
        }
    }
    if (!std::isfinite(rep.systole)) throw DegenerateSystole("no non-collapsed candidate");
    // Only the narrowest family's width, its witness or a seed can be smallest.
    rep.witness_source = rep.candidates[best].source;
    if (rep.witness_source.rfind("seed ", 0) == 0) {
        rep.witness = seeds[std::stoul(rep.witness_source.substr(5))];
    } else {
        rep.witness = family_witness;
    }
    rep.monotonicity_violations = birkhoff_monotonicity_failures() - failures_before;
    return rep;
}

// CSV (iteration, max_length, argmax_index).
inline void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& os) {
    char buf[96];
    os << "iteration,max_length,argmax_index\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%d\n", r.iteration, r.max_length, r.argmax_index);
        os << buf;
    }
}

// CSV of vertex coordinates (x, y, z).
inline void write_curve_csv(const DiscreteClosedCurve& c, std::ostream& os) {
    char buf[96];
    os << "x,y,z\n";
    for (const auto& p : c.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x(), p.y(), p.z());
        os << buf;
    }
}

}  // namespace sysarea
