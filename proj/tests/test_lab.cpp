#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sysarea/lab.hpp"

using namespace sysarea;

namespace {

// Smaller solver settings for the experiment-level tests.
SystoleOptions quick_solver() {
    SystoleOptions o;
    o.N = 33;
    o.n = 64;
    o.passes = 4;
    o.seed_count = 2;
    o.refine_levels = 4;
    return o;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST(Config, ParsesAndDefaults) {
    const auto j = nlohmann::json::parse(R"({
        "experiment": "proposition",
        "f": {"L": 2, "coeffs": [[2, 0, 1.0]]},
        "t_values": [0.05, -0.05],
        "solver": {"N": 33, "n": 64, "seed": 7, "passes": 3},
        "output": "out.json",
        "format": "json"
    })");
    const ExperimentConfig c = config_from_json(j);
    EXPECT_EQ(c.kind, ExperimentKind::Proposition);
    EXPECT_EQ(c.f, SphericalFunction::harmonic(2, 0));
    EXPECT_EQ(c.t_values, (std::vector<double>{0.05, -0.05}));
    EXPECT_EQ(c.solver.N, 33);
    EXPECT_EQ(c.solver.n, 64);
    EXPECT_EQ(c.solver.seed, 7u);
    EXPECT_EQ(c.solver.passes, 3);
    EXPECT_EQ(c.solver.max_iter, SystoleOptions{}.max_iter);
    EXPECT_EQ(c.output, "out.json");
    EXPECT_EQ(c.format, ReportFormat::Json);

    const ExperimentConfig b = config_from_json(nlohmann::json{{"experiment", "baseline"}});
    EXPECT_EQ(b.t_values, std::vector<double>{0.0});
    EXPECT_EQ(b.format, ReportFormat::Csv);
}

TEST(Config, Rejections) {
    EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "nope"}}), InvalidArgument);
    EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "baseline"}, {"format", "xml"}}), InvalidArgument);
    EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "pu_even"}, {"t_values", nlohmann::json::array()}}),
                 InvalidArgument);
    EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "scale_invariance"}, {"mu_values", {1.0, -2.0}}}),
                 InvalidArgument);
    for (auto k : {ExperimentKind::Baseline, ExperimentKind::Proposition, ExperimentKind::GeneralDirection,
                   ExperimentKind::ZollFirstOrder, ExperimentKind::PuEven, ExperimentKind::ScaleInvariance,
                   ExperimentKind::ConjectureProbe}) {
        EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
    }
}

TEST(Report, CsvLayout) {
    ResultRow r;
    r.t = 0.1;
    r.area = 4.0 * pi;
    r.systole = two_pi;
    r.ratio = 1.0 / pi;
    r.bound_check = true;
    r.warnings = {"a=1", "b"};
    ResultRow q = r;
    q.bound_check = false;
    q.warnings = {"x,y"};
    std::ostringstream os;
    write_report({r, q}, os, ReportFormat::Csv);
    const auto lines = split_lines(os.str());
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "t,area,systole,ratio,ratio_minus_inv_pi,two_pi_minus_systole,curvature_min,bound_check,warnings");
    EXPECT_EQ(lines[1], "0.10000000000000001,12.566370614359172,6.2831853071795862,0.31830988618379069,0,0,0,true,a=1;b");
    EXPECT_EQ(lines[2].substr(lines[2].size() - 11), "false,\"x,y\"");
    // %.17g round-trips exactly.
    EXPECT_EQ(std::stod("12.566370614359172"), 4.0 * pi);
}

TEST(Report, JsonMirrorsCsv) {
    ResultRow r;
    r.t = -0.05;
    r.systole = 6.2;
    r.bound_check = true;
    r.warnings = {"w"};
    std::ostringstream os;
    write_report({r}, os, ReportFormat::Json);
    const auto j = nlohmann::json::parse(os.str());
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["t"].get<double>(), -0.05);
    EXPECT_EQ(j[0]["systole"].get<double>(), 6.2);
    EXPECT_TRUE(j[0]["bound_check"].get<bool>());
    EXPECT_EQ(j[0]["warnings"], nlohmann::json::array({"w"}));
    std::vector<std::string> keys;
    for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys.size(), 9u);
}

TEST(Report, EmitErrors) {
    EXPECT_THROW(emit_report({}, "/tmp/never.csv", ReportFormat::Csv), InvalidArgument);
    EXPECT_THROW(emit_report({ResultRow{}}, "/nonexistent-dir/x.csv", ReportFormat::Csv), IOFailure);
    const auto path = std::filesystem::temp_directory_path() / "sysarea_lab_emit.csv";
    emit_report({ResultRow{}}, path.string(), ReportFormat::Csv);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, report_header());
    std::filesystem::remove(path);
}

TEST(Experiment, Baseline) {
    ExperimentConfig c;
    c.kind = ExperimentKind::Baseline;
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].area, 4.0 * pi, 1e-10);
    EXPECT_NEAR(rows[0].systole, two_pi, 1e-4);
    EXPECT_TRUE(rows[0].bound_check);
    c.t_values = {0.1};
    EXPECT_THROW(run_experiment(c), InvalidArgument);
}

TEST(Experiment, RerunsAreByteIdentical) {
    ExperimentConfig c;
    c.kind = ExperimentKind::PuEven;
    c.f = SphericalFunction::harmonic(2, 2);
    c.t_values = {0.05, -0.05, 0.0};
    c.solver = quick_solver();
    std::ostringstream a;
    std::ostringstream b;
    const auto rows = run_experiment(c);
    write_report(rows, a, ReportFormat::Csv);
    write_report(run_experiment(c), b, ReportFormat::Csv);
    EXPECT_EQ(a.str(), b.str());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].t, 0.05);
    EXPECT_EQ(rows[2].t, 0.0);
    for (const auto& r : rows) EXPECT_NEAR(r.ratio, systolic_ratio(r.area, r.systole), 1e-12);
}

TEST(Experiment, RejectsNonAdmissibleT) {
    ExperimentConfig c;
    c.kind = ExperimentKind::Proposition;
    c.f = SphericalFunction::harmonic(2, 0);
    c.t_values = {0.1, 2.0};
    EXPECT_THROW(run_experiment(c), NonAdmissibleT);
}

TEST(Experiment, PropositionDropsMeanAndChecksMargin) {
    ExperimentConfig c;
    c.kind = ExperimentKind::Proposition;
    c.f = SphericalFunction::constant(0.3, 2) + SphericalFunction::harmonic(2, 0);
    c.t_values = {0.1};
    c.solver = quick_solver();
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    const ResultRow& r = rows[0];
    EXPECT_NEAR(r.area, 4.0 * pi + 0.01, 1e-12);
    EXPECT_NEAR(r.ratio, r.area / (r.systole * r.systole), 1e-15);
    EXPECT_NEAR(r.ratio_minus_inv_pi, r.ratio - 1.0 / pi, 1e-15);
    EXPECT_NEAR(r.two_pi_minus_systole, two_pi - r.systole, 1e-15);
    EXPECT_TRUE(r.bound_check);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_EQ(r.warnings[0].rfind("dropped_mean=", 0), 0u);
}

TEST(Experiment, ZollFirstOrderDiagnostics) {
    ExperimentConfig c;
    c.kind = ExperimentKind::ZollFirstOrder;
    c.f = SphericalFunction::harmonic(3, 1) + SphericalFunction::harmonic(2, 0);  // even part is discarded
    c.t_values = {0.1};
    c.solver = quick_solver();
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].bound_check);
    bool saw_ratio = false;
    for (const auto& w : rows[0].warnings) {
        if (w.rfind("deviation_ratio=", 0) == 0) {
            saw_ratio = true;
            EXPECT_NEAR(std::stod(w.substr(16)), 4.0, 0.5);
        }
    }
    EXPECT_TRUE(saw_ratio);
    c.f = SphericalFunction::harmonic(2, 0);
    EXPECT_THROW(run_experiment(c), InvalidArgument);
}

TEST(Experiment, ScaleInvariance) {
    ExperimentConfig c;
    c.kind = ExperimentKind::ScaleInvariance;
    c.f = SphericalFunction::harmonic(2, 0);
    c.t_values = {0.1};
    c.solver = quick_solver();
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].bound_check);
}

TEST(Experiment, PuEvenAndGeneralDirection) {
    ExperimentConfig c;
    c.kind = ExperimentKind::PuEven;
    c.f = SphericalFunction::harmonic(1, 1) + SphericalFunction::harmonic(2, -2);
    c.t_values = {-0.1};
    c.solver = quick_solver();
    const auto pu = run_experiment(c);
    EXPECT_TRUE(pu[0].bound_check);
    EXPECT_GT(pu[0].ratio_minus_inv_pi, 0.0);

    c.kind = ExperimentKind::GeneralDirection;
    c.f = SphericalFunction::constant(0.5, 2) + SphericalFunction::harmonic(2, -2);
    const auto gd = run_experiment(c);
    EXPECT_TRUE(gd[0].bound_check);
    // The constant only rescales: same ratio as the mean-zero direction.
    EXPECT_NEAR(gd[0].ratio, pu[0].ratio, 1e-12);
}
