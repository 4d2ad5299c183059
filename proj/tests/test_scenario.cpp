#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "test_support.hpp"
#include "ugks/error.hpp"
#include "ugks/oracles.hpp"
#include "ugks/scenario.hpp"

namespace ugks {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ugks_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ErrorCategory category_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.category();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCategory::Io;
}

Scenario small_scenario() {
    Scenario s = preset("intermediate");
    s.nx = 20;
    s.nv = 10;
    s.dt = 1e-3;
    s.t_snapshots = {0.005, 0.01};
    return s;
}

TEST(Presets, Values) {
    const auto t = preset("transport");
    EXPECT_EQ(t.eta, 1.0);
    EXPECT_EQ(t.epsilon, 100.0);
    const auto i = preset("intermediate");
    EXPECT_EQ(i.eta, 0.1);
    EXPECT_EQ(i.epsilon, 0.1);
    const auto d = preset("diffusive");
    EXPECT_EQ(d.eta, 1e-4);
    EXPECT_EQ(d.epsilon, 1e-4);
    EXPECT_EQ(d.t_snapshots, (std::vector<double>{0.05, 0.075, 0.1}));
    for (const auto& s : {t, i, d}) {
        EXPECT_EQ(s.nx, 100u);
        EXPECT_EQ(s.nv, 100u);
        EXPECT_EQ(s.sigma, 1.0);
        EXPECT_EQ(s.time_step(), 1e-5);
    }
}

TEST(Presets, Unknown) {
    EXPECT_EQ(category_of([] { preset("kinetic"); }), ErrorCategory::InvalidConfig);
    EXPECT_FALSE(is_preset("kinetic"));
}

TEST(Config, PresetWithOverride) {
    const auto s = parse_scenario_json(R"({"preset": "diffusive", "nx": 50, "operator": "fp"})");
    EXPECT_EQ(s.nx, 50u);
    EXPECT_EQ(s.op, OperatorKind::FokkerPlanck);
    EXPECT_EQ(s.eta, 1e-4);
    EXPECT_EQ(s.name, "diffusive");
}

TEST(Config, AutoTimeStep) {
    const auto s = parse_scenario_json(R"({"eta": 0.5, "epsilon": 0.5, "nx": 10, "nv": 4, "dt": "auto"})");
    EXPECT_FALSE(s.dt.has_value());
    EXPECT_NEAR(s.time_step(), 0.5 * 0.01 + 0.5 * 0.5 * 0.1, 1e-15);
}

TEST(Config, UnknownKeyRejected) {
    try {
        parse_scenario_json("{\n  \"nx\": 10,\n  \"colour\": 3\n}", "cfg.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Parse);
        EXPECT_NE(std::string(e.what()).find("cfg.json:3"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
    }
}

TEST(Config, WrongTypeNamesFieldAndLine) {
    try {
        parse_scenario_json("{\n  \"eta\": \"big\"\n}", "cfg.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Parse);
        EXPECT_NE(std::string(e.what()).find("cfg.json:2: field 'eta'"), std::string::npos);
    }
}

TEST(Config, MalformedJson) {
    EXPECT_EQ(category_of([] { parse_scenario_json("{\"nx\": 10,"); }), ErrorCategory::Parse);
    EXPECT_EQ(category_of([] { parse_scenario_json("[1, 2]"); }), ErrorCategory::Parse);
}

TEST(Config, InvalidValues) {
    EXPECT_EQ(category_of([] { parse_scenario_json(R"({"nv": 7})"); }), ErrorCategory::InvalidConfig);
    EXPECT_EQ(category_of([] { parse_scenario_json(R"({"epsilon": -1})"); }), ErrorCategory::InvalidConfig);
    EXPECT_EQ(category_of([] { parse_scenario_json(R"({"t_snapshots": [0.1, 0.05]})"); }),
              ErrorCategory::InvalidConfig);
    EXPECT_EQ(category_of([] {
                  parse_scenario_json(R"({"compare_exact_transport": true, "compare_exact_diffusion": true})");
              }),
              ErrorCategory::InvalidConfig);
}

TEST(Config, MissingFile) {
    EXPECT_EQ(category_of([] { load_scenario_file("/nonexistent/ugks.json"); }), ErrorCategory::Io);
}

TEST(Config, LoadFromFile) {
    const auto dir = scratch_dir("config");
    const auto path = dir / "s.json";
    std::ofstream(path) << R"({"preset": "transport", "nv": 20})";
    const auto s = load_scenario(path.string());
    EXPECT_EQ(s.nv, 20u);
    EXPECT_EQ(s.epsilon, 100.0);
}

TEST(Initialize, SamplesInitialData) {
    const auto s = preset("transport");
    const auto g = build_grid(s.nv / 2);
    const auto state = initialize_state(s, g);
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < s.nx; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * s.dx();
        EXPECT_NEAR(state.rho[i], oracles::rho0(x), 1e-3);
        if (state.rho[i] > state.rho[argmax]) argmax = i;
        double negative = 0.0;
        for (std::size_t j = 0; j < g.size() / 2; ++j) negative += state.row(i)[j];
        EXPECT_LE(negative / static_cast<double>(g.size()), 1e-4 * state.rho[i]);
    }
    EXPECT_TRUE(argmax == 49 || argmax == 50);
}

TEST(Norms, Examples) {
    const std::vector<double> a(4, 3.0), zero(4, 0.0);
    const auto n = error_norms(a, zero);
    EXPECT_DOUBLE_EQ(n.l1, 3.0);
    EXPECT_DOUBLE_EQ(n.l2, 3.0);
    EXPECT_DOUBLE_EQ(n.linf, 3.0);
    const std::vector<double> b{0.0, 0.0, 0.0, 4.0};
    const auto m = error_norms(b, zero);
    EXPECT_DOUBLE_EQ(m.l1, 1.0);
    EXPECT_DOUBLE_EQ(m.l2, 2.0);
    EXPECT_DOUBLE_EQ(m.linf, 4.0);
}

TEST(Csv, RoundTripIsBitwise) {
    const auto dir = scratch_dir("csv");
    std::mt19937_64 rng(71);
    const auto x = testing::random_vector(rng, 17);
    const auto rho = testing::random_vector(rng, 17);
    const auto ref = testing::random_vector(rng, 17);
    const auto path = (dir / "a.csv").string();
    write_density_csv(path, x, rho, ref);
    const auto back = read_density_csv(path);
    EXPECT_EQ(back.x, x);
    EXPECT_EQ(back.rho, rho);
    EXPECT_EQ(back.rho_ref, ref);
    const auto plain = (dir / "b.csv").string();
    write_density_csv(plain, x, rho);
    const auto back2 = read_density_csv(plain);
    EXPECT_EQ(back2.rho, rho);
    EXPECT_TRUE(back2.rho_ref.empty());
}

TEST(Csv, FileName) {
    Scenario s = preset("diffusive");
    s.op = OperatorKind::FokkerPlanck;
    EXPECT_EQ(snapshot_file_name(s, 0.075), "diffusive_fp_t0.075.csv");
    EXPECT_EQ(snapshot_file_name(s, 0.1), "diffusive_fp_t0.1.csv");
}

TEST(RunAndReport, WritesSnapshots) {
    const auto dir = scratch_dir("run");
    Scenario s = small_scenario();
    s.out_dir = dir.string();
    s.compare_limit_fd = true;
    const auto report = run_and_report(s);
    ASSERT_EQ(report.snapshots.size(), 2u);
    for (const auto& snap : report.snapshots) {
        ASSERT_TRUE(fs::exists(snap.csv_path));
        const auto csv = read_density_csv(snap.csv_path);
        EXPECT_EQ(csv.rho, snap.rho);
        EXPECT_EQ(csv.rho_ref.size(), s.nx);
        EXPECT_LE(std::abs(snap.mass_drift), 1e-13);
    }
    EXPECT_EQ(report.snapshots[1].steps, 10u);
}

TEST(RunAndReport, NoReferenceNoCsv) {
    Scenario s = small_scenario();
    s.out_dir = "/nonexistent";
    const auto report = run_and_report(s, false);
    EXPECT_TRUE(report.snapshots[0].rho_ref.empty());
    EXPECT_TRUE(report.snapshots[0].csv_path.empty());
}

TEST(LambdaStarReport, Values) {
    const std::vector<std::size_t> nvs{50, 100};
    const auto rows = lambda_star_report(OperatorKind::ScatteringPeriodic, nvs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[0].lambda_star, -1.49342891, 1e-8);
    EXPECT_NEAR(rows[1].lambda_star, -1.49835181, 1e-8);
    EXPECT_EQ(rows[0].continuum.value_or(0.0), -1.5);
    const auto fp = lambda_star_report(OperatorKind::FokkerPlanck, nvs);
    EXPECT_NEAR(fp[1].lambda_star, -2.0, 1e-12);
    const std::vector<std::size_t> odd{7};
    EXPECT_THROW(lambda_star_report(OperatorKind::Bgk, odd), Error);
}

TEST(ApSweep, BothBranches) {
    Scenario base = small_scenario();
    base.nx = 40;
    const std::vector<double> eps{1e8, 1e-4};
    const auto rows = ap_sweep(OperatorKind::Bgk, eps, base, 0.01);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].transport_branch);
    EXPECT_EQ(rows[0].eta, 1.0);
    EXPECT_LE(rows[0].upwind_gap, 1e-8);
    EXPECT_FALSE(rows[1].transport_branch);
    EXPECT_EQ(rows[1].eta, 1e-4);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.finite);
        EXPECT_LT(r.rel_l2_error, 0.1);
        EXPECT_NEAR(r.dt, 0.5 * 0.025 * 0.025 + 0.5 * r.eta * 0.025, 1e-15);
    }
}

TEST(CompareVariants, DifferenceShrinksWithTimeStep) {
    Scenario base = small_scenario();
    base.eta = 1e-3;
    base.epsilon = 1e-3;
    const std::vector<double> dts{2e-4, 1e-4};
    const auto rows = compare_variants(base, dts, 0.01);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_GT(rows[0].linf, rows[1].linf);
}

}  // namespace
}  // namespace ugks
