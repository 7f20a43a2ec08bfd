#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "emfg/processes.hpp"
#include "emfg/scenario.hpp"

using namespace emfg;
namespace fs = std::filesystem;

namespace {

const std::string kData = EMFG_DATA_DIR;

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("bundled scenarios load with the quoted economics") {
    ScenarioConfig cfg = load_scenario(kData + "/baseline.scenario");
    CHECK(cfg.n_t == 60);
    CHECK(cfg.cost_n_x == 60);
    CHECK(cfg.factor_n_x == 60);
    CHECK(cfg.horizon_years == 15.0);
    CHECK(cfg.kappa_c_gbp_per_mw_year == 30000.0);
    CHECK(cfg.capital_gbp_per_kw == 1377.0);
    CHECK(cfg.renewable_subsidy_fraction == 0.0);
    CHECK(cfg.capacity_payment_gbp_per_kw_year == 0.0);
    CHECK(cfg.rho_per_year == 0.086);
    CHECK(cfg.market.price_cap == 150.0);
    CHECK(cfg.market.conventional_capacity_gw == 35.9);

    ScenarioConfig s1 = load_scenario(kData + "/scenario1.scenario");
    CHECK(s1.renewable_subsidy_fraction > 0.27);
    ScenarioConfig s2 = load_scenario(kData + "/scenario2.scenario");
    CHECK(s2.capacity_payment_gbp_per_kw_year == 10.0);
}

TEST_CASE("policy application converts to per-GW units") {
    ScenarioConfig cfg = load_scenario(kData + "/baseline.scenario");
    auto [ce, re] = apply_policy(cfg);
    CHECK(ce.rho == 0.086);
    CHECK(ce.kappa_c == doctest::Approx(3e7).epsilon(1e-12));    // 30000 GBP/MW/yr
    CHECK(ce.k_c == 0.0);                                        // no salvage value
    CHECK(ce.gamma_c == 0.1);
    CHECK(re.kappa_r == doctest::Approx(0.0125 * 1.377e9).epsilon(1e-12));
    CHECK(re.k_r == doctest::Approx(1.377e9).epsilon(1e-12));
    CHECK(re.gamma_r == doctest::Approx(std::log(2.0) / 10.0).epsilon(1e-12));

    // The build subsidy drops the capital cost to exactly 1000 GBP/kW.
    ScenarioConfig s1 = load_scenario(kData + "/scenario1.scenario");
    auto [ce1, re1] = apply_policy(s1);
    CHECK(re1.k_r == doctest::Approx(1.0e9).epsilon(1e-9));
    CHECK(re1.kappa_r == doctest::Approx(0.0125 * 1.377e9).epsilon(1e-12));  // O&M unsubsidized
    CHECK(ce1.kappa_c == doctest::Approx(3e7).epsilon(1e-12));

    // The capacity payment offsets the conventional running cost and is
    // layered on top of the build subsidy, not instead of it.
    ScenarioConfig s2 = load_scenario(kData + "/scenario2.scenario");
    auto [ce2, re2] = apply_policy(s2);
    CHECK(ce2.kappa_c == doctest::Approx(2e7).epsilon(1e-12));
    CHECK(re2.k_r == doctest::Approx(1.0e9).epsilon(1e-9));
}

TEST_CASE("scenario parse failures carry their location") {
    CHECK_THROWS_AS(load_scenario(kData + "/does_not_exist.scenario"), IngestionError);

    auto bad_key = temp_file("emfg_bad_key.scenario");
    write_text(bad_key, "[grids]\nn_t = 10\nnot_a_knob = 1\n");
    CHECK_THROWS_AS(load_scenario(bad_key.string()), ParseError);

    auto bad_num = temp_file("emfg_bad_num.scenario");
    write_text(bad_num, "[grids]\nn_t = ten\n");
    CHECK_THROWS_AS(load_scenario(bad_num.string()), ParseError);

    auto dup = temp_file("emfg_dup.scenario");
    write_text(dup, "[grids]\nn_t = 10\nn_t = 12\n");
    CHECK_THROWS_AS(load_scenario(dup.string()), ParseError);

    auto no_section = temp_file("emfg_nosec.scenario");
    write_text(no_section, "n_t = 10\n");
    CHECK_THROWS_AS(load_scenario(no_section.string()), ParseError);

    for (auto& p : {bad_key, bad_num, dup, no_section}) std::remove(p.string().c_str());
}

TEST_CASE("demand loading enforces exact coverage") {
    const std::vector<std::pair<std::string, double>> weights = {{"peak", 0.25},
                                                                 {"offpeak", 0.75}};
    auto path = temp_file("emfg_demand.csv");

    write_text(path,
               "time_index,segment,demand_gw\n"
               "0,peak,40\n0,offpeak,25\n1,peak,41\n1,offpeak,26\n"
               "7,peak,99\n7,offpeak,99\n");  // rows past the horizon are ignored
    std::vector<DemandSegment> segs = load_demand(path.string(), 2, weights);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].label == "peak");
    CHECK(segs[0].hours_weight == 0.25);
    CHECK(segs[0].demand_gw == std::vector<double>{40.0, 41.0});
    CHECK(segs[1].demand_gw == std::vector<double>{25.0, 26.0});

    write_text(path, "time_index,segment,demand_gw\n0,peak,40\n0,offpeak,25\n1,peak,41\n");
    CHECK_THROWS_AS(load_demand(path.string(), 2, weights), IngestionError);  // offpeak gap

    write_text(path,
               "time_index,segment,demand_gw\n0,peak,40\n0,peak,41\n0,offpeak,25\n");
    CHECK_THROWS_AS(load_demand(path.string(), 1, weights), IngestionError);  // duplicate

    write_text(path, "time_index,segment,demand_gw\n0,peak,40\n0,night,25\n");
    CHECK_THROWS_AS(load_demand(path.string(), 1, weights), IngestionError);  // unknown label

    write_text(path, "time_index,segment,demand_gw\n0,peak,40\n0,offpeak,-2\n");
    CHECK_THROWS_AS(load_demand(path.string(), 1, weights), IngestionError);  // negative demand

    write_text(path, "bad,header,row\n0,peak,40\n");
    CHECK_THROWS_AS(load_demand(path.string(), 1, weights), IngestionError);

    CHECK_THROWS_AS(load_demand((path.string() + ".missing"), 1, weights), IngestionError);
    std::remove(path.string().c_str());
}

TEST_CASE("infeasible capacity factor moments fail at assembly") {
    ScenarioConfig cfg = load_scenario(kData + "/convergence_check.scenario");
    cfg.factor_std = 0.4946;  // above the bounded-diffusion ceiling for mean 0.4261
    CHECK_THROWS_AS(assemble_model(cfg), InfeasibleMomentsError);
}

TEST_CASE("config echo reloads to the same configuration") {
    ScenarioConfig cfg = load_scenario(kData + "/scenario1.scenario");
    auto echo = temp_file("emfg_echo.scenario");
    write_config_echo(cfg, echo.string());
    ScenarioConfig back = load_scenario(echo.string());
    CHECK(back.n_t == cfg.n_t);
    CHECK(back.cost_n_x == cfg.cost_n_x);
    CHECK(back.factor_n_x == cfg.factor_n_x);
    CHECK(back.horizon_years == cfg.horizon_years);
    CHECK(back.k_per_year == cfg.k_per_year);
    CHECK(back.cost_mean_gbp_mwh == cfg.cost_mean_gbp_mwh);
    CHECK(back.cost_std_gbp_mwh == cfg.cost_std_gbp_mwh);
    CHECK(back.factor_mean == cfg.factor_mean);
    CHECK(back.factor_std == cfg.factor_std);
    CHECK(back.kappa_c_gbp_per_mw_year == cfg.kappa_c_gbp_per_mw_year);
    CHECK(back.capital_gbp_per_kw == cfg.capital_gbp_per_kw);
    CHECK(back.renewable_subsidy_fraction == cfg.renewable_subsidy_fraction);
    CHECK(back.capacity_payment_gbp_per_kw_year == cfg.capacity_payment_gbp_per_kw_year);
    CHECK(back.max_iters == cfg.max_iters);
    CHECK(back.demand_file == cfg.demand_file);
    REQUIRE(back.segment_weights.size() == cfg.segment_weights.size());
    for (size_t i = 0; i < cfg.segment_weights.size(); ++i) {
        CHECK(back.segment_weights[i].first == cfg.segment_weights[i].first);
        CHECK(back.segment_weights[i].second == cfg.segment_weights[i].second);
    }
    std::remove(echo.string().c_str());
}

TEST_CASE("run bundle round-trips through its readers") {
    ScenarioConfig cfg = load_scenario(kData + "/convergence_check.scenario");
    cfg.max_iters = 2;
    AssembledModel assembled = assemble_model(cfg);
    FPConfig fp;
    fp.max_iters = cfg.max_iters;
    fp.threads = 1;
    EquilibriumResult result = fictitious_play(assembled.model, fp);

    auto out_dir = fs::temp_directory_path() / "emfg_bundle_test";
    fs::remove_all(out_dir);
    const std::string manifest = write_results(result, cfg, assembled, out_dir.string(),
                                               kData + "/convergence_check.scenario", 1.25);
    CHECK(fs::exists(manifest));
    for (const char* f : {"prices.csv", "capacities.csv", "exploitability.csv", "omega.csv",
                          "eta.csv", "eta_bar.csv", "config_echo.scenario", "manifest.txt"})
        CHECK(fs::exists(out_dir / f));

    auto prices = read_prices_csv((out_dir / "prices.csv").string());
    REQUIRE(prices.size() == assembled.model.segments.size());
    for (size_t s = 0; s < assembled.model.segments.size(); ++s) {
        const auto& label = assembled.model.segments[s].label;
        REQUIRE(prices.count(label) == 1);
        const auto& series = prices.at(label);
        REQUIRE(series.size() == result.prices[s].size());
        for (size_t i = 0; i < series.size(); ++i) CHECK(series[i] == result.prices[s][i]);
    }

    CapacitySeries caps = read_capacities_csv((out_dir / "capacities.csv").string());
    REQUIRE(caps.conventional_gw.size() == result.conventional_capacity_gw.size());
    for (size_t i = 0; i < caps.conventional_gw.size(); ++i) {
        CHECK(caps.conventional_gw[i] == result.conventional_capacity_gw[i]);
        CHECK(caps.renewable_entered_gw[i] == result.renewable_entered_gw[i]);
    }

    MeasureFlow omega = read_measure_flow_csv((out_dir / "omega.csv").string());
    REQUIRE(omega.n_times == result.omega.n_times);
    REQUIRE(omega.n_nodes == result.omega.n_nodes);
    for (size_t k = 0; k < omega.values.size(); ++k)
        CHECK(omega.values[k] == result.omega.values[k]);

    ScenarioConfig echoed = load_scenario((out_dir / "config_echo.scenario").string());
    CHECK(echoed.n_t == cfg.n_t);
    CHECK(echoed.max_iters == cfg.max_iters);

    std::ifstream mf(out_dir / "manifest.txt");
    std::string text((std::istreambuf_iterator<char>(mf)), std::istreambuf_iterator<char>());
    CHECK(text.find("status = complete") != std::string::npos);
    CHECK(text.find("iterations = 2") != std::string::npos);
    fs::remove_all(out_dir);
}

TEST_CASE("calibration warnings surface on assembly") {
    ScenarioConfig cfg = load_scenario(kData + "/convergence_check.scenario");
    AssembledModel assembled = assemble_model(cfg);
    CHECK(assembled.cost_process.delta
          == doctest::Approx(1.9033534855664525).epsilon(1e-12));
    CHECK(assembled.factor_process.delta_bar
          == doctest::Approx(0.08994552115141817).epsilon(1e-12));
    // Default cost ceiling sits at mean + 10 std.
    CHECK(assembled.model.cost_grid.x_max == doctest::Approx(143.4).epsilon(1e-12));
    CHECK(assembled.model.factor_grid.x_max == 1.0);
    // Initial masses carry the fleet and project totals.
    double conv = 0.0;
    for (double v : assembled.model.omega0) conv += v;
    CHECK(conv == doctest::Approx(35.9).epsilon(1e-9));
    double pot = 0.0;
    for (double v : assembled.model.eta0) pot += v;
    CHECK(pot == doctest::Approx(47.0).epsilon(1e-9));
    double all = 0.0;
    for (double v : assembled.model.eta_bar0) all += v;
    CHECK(all == doctest::Approx(82.6).epsilon(1e-9));
}
