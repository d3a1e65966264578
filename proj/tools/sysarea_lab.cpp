// Command-line driver for the systolic-area experiments.
//
//   sysarea_lab <experiment> [--config cfg.json] [--f SPEC] [--t LIST] [--seed S] [--out PATH] [--format csv|json]
//   sysarea_lab funk-scan --f SPEC [--resolution R] [--out PATH]
//   sysarea_lab systole --f SPEC --t T [--lambda L] [--form square|exp] [--out report.json]
//                       [--witness curve.csv] [--trace trace.csv]
//
// SPEC is either the JSON layout {"L":..,"coeffs":[[l,m,v],..]} or "l,m,v;l,m,v;...".

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sysarea/sysarea.hpp"

using namespace sysarea;

namespace {

SphericalFunction parse_direction(const std::string& spec) {
    const auto first = spec.find_first_not_of(" \t");
    if (first != std::string::npos && spec[first] == '{') {
        return nlohmann::json::parse(spec).get<SphericalFunction>();
    }
    struct Term {
        int l, m;
        double v;
    };
    std::vector<Term> terms;
    int L = 0;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        Term t{};
        char c1 = 0, c2 = 0;
        std::istringstream is(item);
        if (!(is >> t.l >> c1 >> t.m >> c2 >> t.v) || c1 != ',' || c2 != ',') {
            throw InvalidArgument("bad direction term '" + item + "', expected l,m,value");
        }
        L = std::max(L, t.l);
        terms.push_back(t);
    }
    if (terms.empty()) throw InvalidArgument("empty direction");
    SphericalFunction f(L);
    for (const auto& t : terms) f.set(t.l, t.m, f.coeff(t.l, t.m) + t.v);
    return f;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw InvalidArgument("bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOFailure("cannot open '" + path + "' for writing");
    return out;
}

struct Common {
    std::string config, f, t, out, format;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--f", c.f, "direction, JSON or l,m,v;l,m,v");
    sub->add_option("--t", c.t, "comma-separated t values");
    sub->add_option("--seed", c.seed, "solver seed");
    sub->add_option("--out", c.out, "output path (default: stdout)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

int run_experiment_cmd(ExperimentKind kind, const Common& c, const CLI::App& sub) {
    nlohmann::json j = nlohmann::json::object();
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        if (!in) throw IOFailure("cannot read '" + c.config + "'");
        j = nlohmann::json::parse(in);
        if (j.contains("experiment") && j.at("experiment").get<std::string>() != to_string(kind)) {
            throw InvalidArgument("config experiment '" + j.at("experiment").get<std::string>() +
                                  "' does not match subcommand");
        }
    }
    j["experiment"] = to_string(kind);
    ExperimentConfig cfg = config_from_json(j);
    if (!c.f.empty()) cfg.f = parse_direction(c.f);
    if (!c.t.empty()) cfg.t_values = parse_list(c.t);
    if (sub.count("--seed")) cfg.solver.seed = c.seed;
    if (!c.out.empty()) cfg.output = c.out;
    if (!c.format.empty()) cfg.format = parse_report_format(c.format);

    const auto rows = run_experiment(cfg);
    if (cfg.output.empty()) {
        write_report(rows, std::cout, cfg.format);
    } else {
        emit_report(rows, cfg.output, cfg.format);
    }
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.bound_check;
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Systolic area lab for conformal deformations of the round sphere"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, ExperimentKind>> kinds = {
        {"baseline", ExperimentKind::Baseline},         {"proposition", ExperimentKind::Proposition},
        {"general", ExperimentKind::GeneralDirection},  {"zoll", ExperimentKind::ZollFirstOrder},
        {"pu", ExperimentKind::PuEven},                 {"scale", ExperimentKind::ScaleInvariance},
        {"conjecture", ExperimentKind::ConjectureProbe},
    };
    std::vector<Common> commons(kinds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        auto* sub = app.add_subcommand(kinds[i].first, std::string("run the ") + to_string(kinds[i].second) +
                                                           " experiment");
        add_common(sub, commons[i]);
        subs.push_back(sub);
    }

    std::string scan_f, scan_out;
    int resolution = 36;
    auto* scan = app.add_subcommand("funk-scan", "Funk transform over a lat-long grid of axes");
    scan->add_option("--f", scan_f, "direction")->required();
    scan->add_option("--resolution", resolution, "latitude rows")->check(CLI::PositiveNumber);
    scan->add_option("--out", scan_out, "CSV output path (default: stdout)");

    std::string sys_f, sys_out, sys_witness, sys_trace, sys_form = "square";
    double sys_t = 0.0, sys_lambda = 0.0;
    std::uint64_t sys_seed = SystoleOptions{}.seed;
    int sys_N = SystoleOptions{}.N, sys_n = SystoleOptions{}.n;
    auto* sys = app.add_subcommand("systole", "estimate the systole of one metric");
    sys->add_option("--f", sys_f, "direction")->required();
    sys->add_option("--t", sys_t, "deformation parameter")->required();
    sys->add_option("--lambda", sys_lambda, "scale coefficient");
    sys->add_option("--form", sys_form, "square or exp")->check(CLI::IsMember({"square", "exp"}));
    sys->add_option("--seed", sys_seed, "seed for random great circles");
    sys->add_option("--N", sys_N, "curves per sweepout (odd, >= 9)");
    sys->add_option("--n", sys_n, "samples per curve (>= 32)");
    sys->add_option("--out", sys_out, "report JSON path (default: stdout)");
    sys->add_option("--witness", sys_witness, "CSV path for the witness geodesic");
    sys->add_option("--trace", sys_trace, "CSV path for the min-max trace");

    CLI11_PARSE(app, argc, argv);

    try {
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            if (*subs[i]) return run_experiment_cmd(kinds[i].second, commons[i], *subs[i]);
        }
        if (*scan) {
            const SphericalFunction f = parse_direction(scan_f);
            const auto rows = funk_scan(f, lat_long_grid(resolution + 1, 2 * resolution));
            if (scan_out.empty()) {
                write_funk_scan_csv(rows, std::cout);
            } else {
                auto out = open_out(scan_out);
                write_funk_scan_csv(rows, out);
            }
            return 0;
        }
        if (*sys) {
            const SphericalFunction f = parse_direction(sys_f);
            const ConformalForm form = sys_form == "exp" ? ConformalForm::Exponential : ConformalForm::Square;
            const ConformalMetric g = make_variation(f, sys_t, sys_lambda, form);
            SystoleOptions opt;
            opt.seed = sys_seed;
            opt.N = sys_N;
            opt.n = sys_n;
            const SystoleReport rep = estimate_systole(g, opt);
            const double a = area(g);
            nlohmann::ordered_json j;
            j["metric"] = metric_to_json(g);
            j["area"] = a;
            j["systole"] = rep.systole;
            j["ratio"] = systolic_ratio(a, rep.systole);
            j["witness_source"] = rep.witness_source;
            j["witness_residual"] = rep.witness.residual;
            j["curvature_min"] = rep.curvature_min;
            j["warnings"] = rep.warnings;
            nlohmann::ordered_json cands = nlohmann::ordered_json::array();
            for (const auto& c : rep.candidates) {
                cands.push_back({{"source", c.source}, {"length", c.length}, {"counted", c.counted}});
            }
            j["candidates"] = cands;
            if (sys_out.empty()) {
                std::cout << j.dump(2) << '\n';
            } else {
                auto out = open_out(sys_out);
                out << j.dump(2) << '\n';
            }
            if (!sys_witness.empty()) {
                auto out = open_out(sys_witness);
                write_curve_csv(rep.witness.curve, out);
            }
            if (!sys_trace.empty()) {
                auto out = open_out(sys_trace);
                write_trace_csv(rep.trace, out);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
