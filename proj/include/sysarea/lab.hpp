#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysarea/circles_funk.hpp"
#include "sysarea/errors.hpp"
#include "sysarea/harmonics.hpp"
#include "sysarea/metric.hpp"
#include "sysarea/minimax.hpp"

namespace sysarea {

enum class ExperimentKind {
    Baseline,
    Proposition,
    GeneralDirection,
    ZollFirstOrder,
    PuEven,
    ScaleInvariance,
    ConjectureProbe,
};

enum class ReportFormat { Csv, Json };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Baseline: return "baseline";
        case ExperimentKind::Proposition: return "proposition";
        case ExperimentKind::GeneralDirection: return "general_direction";
        case ExperimentKind::ZollFirstOrder: return "zoll_first_order";
        case ExperimentKind::PuEven: return "pu_even";
        case ExperimentKind::ScaleInvariance: return "scale_invariance";
        case ExperimentKind::ConjectureProbe: return "conjecture_probe";
    }
    return "";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::Baseline, ExperimentKind::Proposition, ExperimentKind::GeneralDirection,
                   ExperimentKind::ZollFirstOrder, ExperimentKind::PuEven, ExperimentKind::ScaleInvariance,
                   ExperimentKind::ConjectureProbe}) {
        if (s == to_string(k)) return k;
    }
    throw InvalidArgument("unknown experiment kind '" + s + "'");
}

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw InvalidArgument("unknown report format '" + s + "' (csv or json)");
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Baseline;
    SphericalFunction f = SphericalFunction::harmonic(2, 0);
    std::vector<double> t_values{0.0};
    std::vector<double> mu_values{0.5, 2.0, 10.0};  // scale_invariance only
    SystoleOptions solver;
    std::string output;  // empty: standard output
    ReportFormat format = ReportFormat::Csv;
};

// {"experiment", "f", "t_values", "mu_values", "solver": {N, n, tol, seed, passes,
//  max_iter, seed_count, seed_max_iter, refine_levels}, "output", "format"}; all but "experiment" optional.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.kind = parse_experiment_kind(j.at("experiment").get<std::string>());
    if (cfg.kind != ExperimentKind::Baseline) cfg.t_values = {-0.1, -0.05, 0.05, 0.1};
    if (j.contains("f")) cfg.f = j.at("f").get<SphericalFunction>();
    if (j.contains("t_values")) cfg.t_values = j.at("t_values").get<std::vector<double>>();
    if (j.contains("mu_values")) cfg.mu_values = j.at("mu_values").get<std::vector<double>>();
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        SystoleOptions& o = cfg.solver;
        o.N = s.value("N", o.N);
        o.n = s.value("n", o.n);
        o.tol = s.value("tol", o.tol);
        o.seed = s.value("seed", o.seed);
        o.passes = s.value("passes", o.passes);
        o.max_iter = s.value("max_iter", o.max_iter);
        o.seed_count = s.value("seed_count", o.seed_count);
        o.seed_max_iter = s.value("seed_max_iter", o.seed_max_iter);
        o.refine_levels = s.value("refine_levels", o.refine_levels);
    }
    cfg.output = j.value("output", std::string());
    cfg.format = parse_report_format(j.value("format", std::string("csv")));
    if (cfg.t_values.empty()) throw InvalidArgument("t_values must not be empty");
    for (double mu : cfg.mu_values) {
        if (!(mu > 0.0)) throw InvalidArgument("mu_values must be positive");
    }
    return cfg;
}

struct ResultRow {
    double t = 0.0;
    double area = 0.0;
    double systole = 0.0;
    double ratio = 0.0;
    double ratio_minus_inv_pi = 0.0;
    double two_pi_minus_systole = 0.0;
    double curvature_min = 0.0;
    bool bound_check = false;
    std::vector<std::string> warnings;  // also carries key=value diagnostics
};

namespace detail {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string note(const std::string& key, double v) { return key + "=" + format_real(v); }

inline ResultRow measure(const ConformalMetric& g, double t, const SystoleOptions& solver) {
    const SystoleReport rep = estimate_systole(g, solver);
    ResultRow row;
    row.t = t;
    row.area = area(g);
    row.systole = rep.systole;
    row.ratio = systolic_ratio(row.area, row.systole);
    row.ratio_minus_inv_pi = row.ratio - 1.0 / pi;
    row.two_pi_minus_systole = two_pi - row.systole;
    row.curvature_min = rep.curvature_min;
    row.warnings = rep.warnings;
    if (rep.monotonicity_violations > 0) {
        row.warnings.push_back(note("monotonicity_violations", static_cast<double>(rep.monotonicity_violations)));
    }
    return row;
}

// max over axes u of |l_g(gamma(u)) - 2 pi|: node scan then local refinement.
inline double max_great_circle_deviation(const ConformalMetric& g) {
    const int L = g.direction().degree_max();
    const SphereQuadrature q = build_quadrature(4 * L + 8);
    auto dev = [&](const SphericalPoint& u) { return std::abs(great_circle_length(g, u) - two_pi); };
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double v = dev(q.nodes[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    return dev(refine_maximum(dev, q.nodes[best], pi / (q.band + 2)));
}

// max over axes of |l(t) - l(-t)| / (2 t), the t-linear part of the lengths.
inline double max_linear_length_term(const SphericalFunction& f, double t, ConformalForm form) {
    const ConformalMetric gp = make_variation(f, t, 0.0, form);
    const ConformalMetric gm = make_variation(f, -t, 0.0, form);
    const SphereQuadrature q = build_quadrature(4 * f.degree_max() + 8);
    double worst = 0.0;
    for (const auto& u : q.nodes) {
        worst = std::max(worst, std::abs(great_circle_length(gp, u) - great_circle_length(gm, u)) / (2.0 * std::abs(t)));
    }
    return worst;
}

inline void check_admissible(const SphericalFunction& f, const std::vector<double>& ts) {
    const double a = max_admissible_t(f);
    for (double t : ts) {
        if (!(std::abs(t) < a)) {
            throw NonAdmissibleT("t = " + format_real(t) + " outside ]-a, a[ with a = " + format_real(a));
        }
    }
}

}  // namespace detail

/// One row per t, computed concurrently and returned in t order. bound_check
/// holds each kind's inequality with tolerance 1e-4 on lengths and 1e-6 on
/// ratios.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    constexpr double inv_pi = 1.0 / pi;
    const MeanZeroSplit split = mean_zero_decompose(cfg.f);
    const SystoleOptions& solver = cfg.solver;
    std::function<ResultRow(double)> row_for;

    switch (cfg.kind) {
        case ExperimentKind::Baseline: {
            for (double t : cfg.t_values) {
                if (t != 0.0) throw InvalidArgument("baseline runs at t = 0 only");
            }
            row_for = [&](double t) {
                ResultRow row = detail::measure(round_metric(cfg.f.degree_max()), t, solver);
                row.bound_check = std::abs(row.two_pi_minus_systole) <= 1e-4 && std::abs(row.ratio_minus_inv_pi) <= 1e-4;
                return row;
            };
            break;
        }
        case ExperimentKind::Proposition: {
            detail::check_admissible(split.f0, cfg.t_values);
            row_for = [&, n2 = split.f0.squared_l2_norm()](double t) {
                ResultRow row = detail::measure(make_variation(split.f0, t, 0.0), t, solver);
                const double floor = inv_pi + t * t * n2 / (4.0 * pi * pi);
                row.bound_check = row.systole <= two_pi + 1e-4 && row.ratio >= floor - 1e-6 &&
                                  (t == 0.0 || row.ratio > inv_pi);
                row.warnings.push_back(detail::note("ratio_floor", floor));
                return row;
            };
            break;
        }
        case ExperimentKind::GeneralDirection: {
            detail::check_admissible(split.f0, cfg.t_values);
            row_for = [&](double t) {
                ResultRow row = detail::measure(make_variation(split.f0, t, split.lambda), t, solver);
                row.bound_check = row.ratio >= inv_pi - 1e-6;
                row.warnings.push_back(detail::note("lambda", split.lambda));
                return row;
            };
            break;
        }
        case ExperimentKind::ZollFirstOrder: {
            SphericalFunction odd = parity_decompose(split.f0).f_minus;
            if (odd.is_zero()) throw InvalidArgument("zoll_first_order needs a direction with an odd part");
            detail::check_admissible(odd, cfg.t_values);
            row_for = [&, odd = std::move(odd)](double t) {
                const ConformalMetric g = make_variation(odd, t, 0.0, ConformalForm::Exponential);
                ResultRow row = detail::measure(g, t, solver);
                row.warnings.push_back(detail::note("area_minus_4pi", row.area - 4.0 * pi));
                if (t == 0.0) {
                    row.bound_check = std::abs(row.two_pi_minus_systole) <= 1e-4;
                    return row;
                }
                const double linear = detail::max_linear_length_term(odd, t, ConformalForm::Exponential);
                const double dev_t = detail::max_great_circle_deviation(g);
                const double dev_half =
                    detail::max_great_circle_deviation(make_variation(odd, 0.5 * t, 0.0, ConformalForm::Exponential));
                const double scaling = dev_t / dev_half;
                row.bound_check = linear <= 1e-10 && scaling >= 3.5 && scaling <= 4.5;
                row.warnings.push_back(detail::note("linear_term", linear));
                row.warnings.push_back(detail::note("max_deviation", dev_t));
                row.warnings.push_back(detail::note("deviation_ratio", scaling));
                return row;
            };
            break;
        }
        case ExperimentKind::PuEven: {
            SphericalFunction even = parity_decompose(split.f0).f_plus;
            if (even.is_zero()) throw InvalidArgument("pu_even needs a direction with an even part");
            detail::check_admissible(even, cfg.t_values);
            row_for = [&, even = std::move(even)](double t) {
                ResultRow row = detail::measure(make_variation(even, t, 0.0), t, solver);
                row.bound_check = row.ratio >= inv_pi - 1e-6 && (t == 0.0 || row.ratio_minus_inv_pi > 0.0);
                return row;
            };
            break;
        }
        case ExperimentKind::ScaleInvariance: {
            detail::check_admissible(split.f0, cfg.t_values);
            row_for = [&](double t) {
                const ConformalMetric g = make_variation(split.f0, t, 0.0);
                ResultRow row = detail::measure(g, t, solver);
                double worst = 0.0;
                for (double mu : cfg.mu_values) {
                    // mu g as (1 + lambda t) g with lambda = (mu - 1) / t; at t = 0 scale directly.
                    const ConformalMetric gm = t != 0.0 ? make_variation(split.f0, t, (mu - 1.0) / t) : g.scaled(mu);
                    worst = std::max(worst, std::abs(detail::measure(gm, t, solver).ratio - row.ratio));
                }
                if (t == 0.0) row.warnings.push_back("scaled by constant factor at t=0");
                row.bound_check = worst <= 1e-10;
                row.warnings.push_back(detail::note("max_ratio_deviation", worst));
                return row;
            };
            break;
        }
        case ExperimentKind::ConjectureProbe: {
            detail::check_admissible(split.f0, cfg.t_values);
            row_for = [&, even_norm2 = parity_decompose(split.f0).f_plus.squared_l2_norm()](double t) {
                ResultRow row = detail::measure(make_variation(split.f0, t, 0.0), t, solver);
                row.bound_check = row.ratio >= inv_pi - 1e-6;
                if (t != 0.0 && even_norm2 > 0.0) {
                    row.warnings.push_back(detail::note("probe", (row.ratio * pi - 1.0) / (t * t * even_norm2)));
                }
                return row;
            };
            break;
        }
    }

    std::vector<std::future<ResultRow>> pending;
    for (double t : cfg.t_values) pending.push_back(std::async(std::launch::async, row_for, t));
    std::vector<ResultRow> rows;
    for (auto& p : pending) rows.push_back(p.get());
    if (cfg.kind != ExperimentKind::Baseline && cfg.kind != ExperimentKind::GeneralDirection && split.lambda != 0.0) {
        for (auto& row : rows) row.warnings.insert(row.warnings.begin(), detail::note("dropped_mean", split.lambda));
    }
    return rows;
}

inline const char* report_header() {
    return "t,area,systole,ratio,ratio_minus_inv_pi,two_pi_minus_systole,curvature_min,bound_check,warnings";
}

namespace detail {

inline std::string join_warnings(const std::vector<std::string>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ';';
        s += w[i];
    }
    return s;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace detail

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    using detail::format_real;
    os << report_header() << '\n';
    for (const auto& r : rows) {
        os << format_real(r.t) << ',' << format_real(r.area) << ',' << format_real(r.systole) << ','
           << format_real(r.ratio) << ',' << format_real(r.ratio_minus_inv_pi) << ','
           << format_real(r.two_pi_minus_systole) << ',' << format_real(r.curvature_min) << ','
           << (r.bound_check ? "true" : "false") << ',' << detail::csv_field(detail::join_warnings(r.warnings))
           << '\n';
    }
}

inline nlohmann::ordered_json rows_to_json(const std::vector<ResultRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json o;
        o["t"] = r.t;
        o["area"] = r.area;
        o["systole"] = r.systole;
        o["ratio"] = r.ratio;
        o["ratio_minus_inv_pi"] = r.ratio_minus_inv_pi;
        o["two_pi_minus_systole"] = r.two_pi_minus_systole;
        o["curvature_min"] = r.curvature_min;
        o["bound_check"] = r.bound_check;
        o["warnings"] = r.warnings;
        arr.push_back(std::move(o));
    }
    return arr;
}

inline void write_json(const std::vector<ResultRow>& rows, std::ostream& os) { os << rows_to_json(rows).dump(2) << '\n'; }

inline void write_report(const std::vector<ResultRow>& rows, std::ostream& os, ReportFormat format) {
    if (rows.empty()) throw InvalidArgument("report needs at least one row");
    if (format == ReportFormat::Csv) {
        write_csv(rows, os);
    } else {
        write_json(rows, os);
    }
}

inline void emit_report(const std::vector<ResultRow>& rows, const std::string& path, ReportFormat format) {
    if (rows.empty()) throw InvalidArgument("report needs at least one row");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOFailure("cannot open '" + path + "' for writing");
    write_report(rows, out, format);
    out.flush();
    if (!out) throw IOFailure("failed writing '" + path + "'");
}

}  // namespace sysarea
