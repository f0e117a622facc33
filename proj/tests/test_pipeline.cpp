#include "investval/pipeline.hpp"

#include "investval/csv.hpp"
#include "investval/errors.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

using namespace investval;
namespace fs = std::filesystem;

namespace {

std::string data_path(const char *relative) {
    return (testutil::data_dir() / relative).generic_string();
}

// Manifest wired to the bundled dataset and published ranking, with the
// profile directory and output directory swappable per test.
std::string manifest_text(const std::string &profiles_dir, const std::string &out_dir,
                          const std::string &extra = "") {
    return "{\n"
           "  \"data\": {\n"
           "    \"indicators\": \"" + data_path("indicators.csv") + "\",\n"
           "    \"observations\": \"" + data_path("observations.csv") + "\",\n"
           "    \"profiles_dir\": \"" + profiles_dir + "\",\n"
           "    \"ranking_fixture\": \"" + data_path("published_ranking.csv") + "\"\n"
           "  },\n"
           "  \"scenario\": \"" + data_path("scenario_base.json") + "\",\n"
           "  \"out_dir\": \"" + out_dir + "\"" + extra + "\n"
           "}\n";
}

RunManifest bundled_manifest(const testutil::TempDir &out, const std::string &extra = "") {
    return load_manifest_text(
        manifest_text(data_path("profiles"), out.path().generic_string(), extra), ".");
}

bool wrote_file(const RunSummary &summary, const std::string &suffix) {
    return std::any_of(summary.files_written.begin(), summary.files_written.end(),
                       [&](const fs::path &path) {
                           const auto text = path.generic_string();
                           return text.size() >= suffix.size() &&
                                  text.compare(text.size() - suffix.size(), suffix.size(),
                                               suffix) == 0;
                       });
}

std::string over_excluded_profile(const char *code) {
    return std::string("{\n") +
           "  \"country\": \"" + code + "\",\n" +
           "  \"population_total\": 10000.0,\n"
           "  \"share_under_14\": 0.3,\n"
           "  \"share_over_64\": 0.1,\n"
           "  \"urban_share\": 0.5,\n"
           "  \"basket_urban_monthly\": 100.0,\n"
           "  \"basket_rural_monthly\": 100.0,\n"
           "  \"currency_code\": \"USD\",\n"
           "  \"fx_to_usd\": 1.0,\n"
           "  \"excluded_counts\": [{\"label\": \"offline\", \"persons\": 9000.0}]\n"
           "}\n";
}

} // namespace

TEST_CASE("manifests resolve relative paths against their own directory") {
    testutil::TempDir dir;
    dir.write("inputs/indicators.csv", "indicator_id,pillar,element,label,unit,polarity,source_label\n");
    const auto manifest_path = dir.write(
        "manifests/run.json",
        "{\"data\": {\"indicators\": \"../inputs/indicators.csv\"}}\n");

    const auto manifest = load_manifest(manifest_path);
    CHECK(manifest.indicators_path ==
          (dir.path() / "inputs" / "indicators.csv").lexically_normal());
    // Untouched fields keep their defaults.
    CHECK(manifest.start_year == 2025);
    CHECK(manifest.jobs == 1);
    CHECK(manifest.write_csv);
    CHECK_FALSE(manifest.write_json);
    CHECK(manifest.out_dir == fs::path("out"));
    CHECK(manifest.countries.empty());
    CHECK(manifest.scenario.market_share == 0.10);
}

TEST_CASE("unknown manifest keys are rejected") {
    CHECK_THROWS_AS(load_manifest_text("{\"mystery\": 1}", "."), ConfigError);
    CHECK_THROWS_AS(load_manifest_text("{\"data\": {\"indicator\": \"x.csv\"}}", "."),
                    ConfigError);
    CHECK_THROWS_AS(
        load_manifest_text("{\"sweep\": [{\"parameter\": \"tax_rate\", \"values\": [0.1],"
                           " \"step\": 2}]}",
                           "."),
        ConfigError);
}

TEST_CASE("malformed manifest values are rejected with config errors") {
    CHECK_THROWS_AS(load_manifest_text("[]", "."), ConfigError);
    CHECK_THROWS_AS(load_manifest_text("{\"jobs\": 0}", "."), ConfigError);
    CHECK_THROWS_AS(load_manifest_text("{\"start_year\": \"soon\"}", "."), ConfigError);
    CHECK_THROWS_AS(load_manifest_text("{\"formats\": []}", "."), ConfigError);
    CHECK_THROWS_AS(load_manifest_text("{\"formats\": [\"yaml\"]}", "."), ConfigError);
    CHECK_THROWS_AS(load_manifest_text("{\"countries\": [\"Atlantis\"]}", "."), ConfigError);
    CHECK_THROWS_AS(load_manifest_text("{\"sweep\": [{\"parameter\": \"tax_rate\","
                                       " \"values\": []}]}",
                                       "."),
                    ConfigError);
}

TEST_CASE("country selections accept names and deduplicate codes") {
    const auto manifest = load_manifest_text(
        "{\"countries\": [\"Mexico\", \"mx\", \"BR\"]}", ".");
    REQUIRE(manifest.countries.size() == 3);
    CHECK(manifest.countries[0] == "MX");
    CHECK(manifest.countries[1] == "MX");
    CHECK(manifest.countries[2] == "BR");
}

TEST_CASE("a manifest pointing at a missing observations file fails with IoError") {
    testutil::TempDir out;
    const auto manifest = load_manifest_text(
        "{\n"
        "  \"data\": {\n"
        "    \"indicators\": \"" + data_path("indicators.csv") + "\",\n"
        "    \"observations\": \"" + (out.path() / "nope.csv").generic_string() + "\"\n"
        "  },\n"
        "  \"out_dir\": \"" + out.path().generic_string() + "\"\n"
        "}\n",
        ".");
    CHECK_THROWS_AS(run_pipeline(manifest, RunMode::Rank), IoError);
}

TEST_CASE("rank mode writes the ranking table and nothing else") {
    testutil::TempDir out;
    auto manifest = bundled_manifest(out);
    const auto summary = run_pipeline(manifest, RunMode::Rank);

    REQUIRE(summary.files_written.size() == 1);
    CHECK(wrote_file(summary, "ranking.csv"));
    CHECK(summary.runs.empty());
    REQUIRE(summary.ranking.rows.size() == 19);

    const auto text = testutil::slurp(out.path() / "ranking.csv");
    CHECK(text.rfind("country,infra_score,edu_score,econ_score,infra_rank,edu_rank,"
                     "econ_rank,overall_score,overall_rank,discount_rate\n",
                     0) == 0);
    // Published fixture rows carry ranks but no recomputed scores.
    CHECK(text.find("BR,,,,1,1,1,,1,0.35\n") != std::string::npos);
    CHECK(text.find("NI,,,,19,14,16,,19,0.50\n") != std::string::npos);
}

TEST_CASE("the bundled replication manifest matches its golden outputs") {
    testutil::TempDir out;
    auto manifest = load_manifest(testutil::data_dir() / "manifests" / "replicate.json");
    manifest.out_dir = out.path();

    const auto outcome = replicate_against_golden(manifest, testutil::data_dir() / "golden");
    for (const auto &reason : outcome.mismatched) {
        INFO(reason);
        CHECK(false);
    }
    CHECK(outcome.ok);
    CHECK_FALSE(outcome.matched.empty());
}

TEST_CASE("a nonviable market is reported and skipped, not fatal") {
    testutil::TempDir profiles;
    profiles.write("gt.json", over_excluded_profile("GT"));
    testutil::TempDir out;

    const auto manifest = load_manifest_text(
        manifest_text(profiles.path().generic_string(), out.path().generic_string(),
                      ",\n  \"countries\": [\"GT\"]"),
        ".");
    const auto summary = run_pipeline(manifest, RunMode::Full);

    REQUIRE(summary.runs.size() == 1);
    CHECK(summary.runs[0].nonviable);
    CHECK_FALSE(summary.runs[0].valuation.has_value());
    CHECK(summary.runs[0].sam.eligible_population < 0.0);

    CHECK(wrote_file(summary, "gt/funnel.csv"));
    CHECK_FALSE(wrote_file(summary, "gt/schedule.csv"));
    CHECK_FALSE(wrote_file(summary, "gt/valuation.csv"));

    const auto funnel = testutil::slurp(out.path() / "gt" / "funnel.csv");
    CHECK(funnel.rfind("stage,quantity,local_value,usd_value,flag\n", 0) == 0);
    CHECK(funnel.find(",nonviable\n") != std::string::npos);
    CHECK(funnel.find("exclude:offline,9000.00,,,exclusion\n") != std::string::npos);
}

TEST_CASE("full runs emit funnel, schedule, and valuation per country") {
    testutil::TempDir out;
    auto manifest = bundled_manifest(out, ",\n  \"countries\": [\"MX\"],\n"
                                          "  \"formats\": [\"csv\", \"json\"]");
    const auto summary = run_pipeline(manifest, RunMode::Full);

    REQUIRE(summary.runs.size() == 1);
    CHECK(summary.runs[0].country == "MX");
    CHECK_FALSE(summary.runs[0].nonviable);
    REQUIRE(summary.runs[0].valuation.has_value());
    // Mexico sits at rank 2 in the published table: first discount tier.
    CHECK(summary.runs[0].valuation->discount_rate == 0.35);

    for (const char *name : {"ranking.csv", "ranking.json", "mx/funnel.csv",
                             "mx/funnel.json", "mx/schedule.csv", "mx/schedule.json",
                             "mx/valuation.csv", "mx/valuation.json"}) {
        INFO(name);
        CHECK(wrote_file(summary, name));
    }

    const auto schedule = testutil::slurp(out.path() / "mx" / "schedule.csv");
    CHECK(schedule.rfind("year,capture_rate,obtainable_usd\n", 0) == 0);
    // Capture rates print as percentages with two decimals.
    CHECK(schedule.find("2025,0.50,") != std::string::npos);
    CHECK(schedule.find("2026,0.55,") != std::string::npos);

    const auto valuation = testutil::slurp(out.path() / "mx" / "valuation.csv");
    CHECK(valuation.rfind("year,revenue,cogs,gross_profit,opex,operating_income,taxes,"
                          "cash_flow,pv_cash_flow\n",
                          0) == 0);
    CHECK(valuation.find("\ndiscount_rate,terminal_value,pv_terminal_value,"
                         "total_present_value\n") != std::string::npos);
    CHECK(valuation.find("\n0.35,") != std::string::npos);

    const auto funnel_doc = nlohmann::json::parse(
        testutil::slurp(out.path() / "mx" / "funnel.json"));
    CHECK(funnel_doc["sam"]["nonviable"] == false);
    CHECK(funnel_doc["tam"]["usd_annual"].get<double>() ==
          doctest::Approx(106979373836.95).epsilon(5e-4));

    const auto valuation_doc = nlohmann::json::parse(
        testutil::slurp(out.path() / "mx" / "valuation.json"));
    CHECK(valuation_doc["assumptions_snapshot"]["market_share"].get<double>() == 0.10);
    CHECK(valuation_doc["rows"].size() == 5);
}

TEST_CASE("identical manifests write identical bytes, regardless of jobs") {
    testutil::TempDir out_a;
    testutil::TempDir out_b;
    testutil::TempDir out_c;
    const std::string extra = ",\n  \"formats\": [\"csv\", \"json\"]";

    auto manifest_a = bundled_manifest(out_a, extra);
    auto manifest_b = bundled_manifest(out_b, extra);
    auto manifest_c = bundled_manifest(out_c, extra);
    manifest_c.jobs = 4;

    const auto summary_a = run_pipeline(manifest_a, RunMode::Full);
    const auto summary_b = run_pipeline(manifest_b, RunMode::Full);
    const auto summary_c = run_pipeline(manifest_c, RunMode::Full);
    REQUIRE(summary_a.files_written.size() == summary_b.files_written.size());
    REQUIRE(summary_a.files_written.size() == summary_c.files_written.size());

    for (std::size_t i = 0; i < summary_a.files_written.size(); ++i) {
        const auto relative = fs::relative(summary_a.files_written[i], out_a.path());
        INFO(relative.generic_string());
        const auto bytes_a = testutil::slurp(summary_a.files_written[i]);
        CHECK(bytes_a == testutil::slurp(out_b.path() / relative));
        CHECK(bytes_a == testutil::slurp(out_c.path() / relative));
        CHECK_FALSE(bytes_a.empty());
    }
}

TEST_CASE("market share sweeps scale the valuation linearly") {
    testutil::TempDir out;
    const auto manifest = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\"],\n"
             "  \"sweep\": [{\"parameter\": \"market_share\","
             " \"values\": [0.05, 0.1, 0.2]}]");
    const auto sweep = sensitivity_sweep(manifest);

    REQUIRE(sweep.axes == std::vector<std::string>{"market_share"});
    REQUIRE(sweep.rows.size() == 3);
    CHECK(sweep.rows[0].coordinates[0].second == 0.05);
    CHECK(sweep.rows[1].coordinates[0].second == 0.1);
    CHECK(sweep.rows[2].coordinates[0].second == 0.2);

    const double base = sweep.rows[0].total_present_value;
    CHECK(base > 0.0);
    CHECK(sweep.rows[1].total_present_value == doctest::Approx(2.0 * base).epsilon(1e-12));
    CHECK(sweep.rows[2].total_present_value == doctest::Approx(4.0 * base).epsilon(1e-12));
}

TEST_CASE("discount rate sweeps value lower at steeper rates") {
    testutil::TempDir out;
    const auto manifest = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\"],\n"
             "  \"sweep\": [{\"parameter\": \"discount_rate\","
             " \"values\": [0.5, 0.35]}]");
    const auto sweep = sensitivity_sweep(manifest);

    REQUIRE(sweep.rows.size() == 2);
    // Rows come back sorted by the axis value, not input order.
    CHECK(sweep.rows[0].coordinates[0].second == 0.35);
    CHECK(sweep.rows[1].coordinates[0].second == 0.5);
    CHECK(sweep.rows[1].total_present_value < sweep.rows[0].total_present_value);
}

TEST_CASE("sweep grids multiply out into a sorted cartesian product") {
    testutil::TempDir out;
    const auto manifest = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\"],\n"
             "  \"sweep\": [{\"parameter\": \"market_share\", \"values\": [0.2, 0.1]},\n"
             "             {\"parameter\": \"tax_rate\", \"values\": [0.35, 0.25]}]");
    const auto sweep = sensitivity_sweep(manifest);

    REQUIRE(sweep.axes.size() == 2);
    REQUIRE(sweep.rows.size() == 4);
    std::vector<std::pair<double, double>> seen;
    for (const auto &row : sweep.rows) {
        seen.emplace_back(row.coordinates[0].second, row.coordinates[1].second);
    }
    const std::vector<std::pair<double, double>> expected = {
        {0.1, 0.25}, {0.1, 0.35}, {0.2, 0.25}, {0.2, 0.35}};
    CHECK(seen == expected);

    // Lower taxes value strictly higher at equal share.
    CHECK(sweep.rows[0].total_present_value > sweep.rows[1].total_present_value);
}

TEST_CASE("sweep rows agree with standalone pipeline runs") {
    testutil::TempDir out;
    const auto manifest = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\"],\n"
             "  \"sweep\": [{\"parameter\": \"market_share\", \"values\": [0.17]}]");
    const auto sweep = sensitivity_sweep(manifest);
    REQUIRE(sweep.rows.size() == 1);

    testutil::TempDir out2;
    auto standalone = bundled_manifest(out2, ",\n  \"countries\": [\"MX\"]");
    standalone.scenario.market_share = 0.17;
    const auto summary = run_pipeline(standalone, RunMode::Full);
    REQUIRE(summary.runs.size() == 1);
    REQUIRE(summary.runs[0].valuation.has_value());

    CHECK(sweep.rows[0].total_present_value ==
          summary.runs[0].valuation->total_present_value);
}

TEST_CASE("sweeps validate their axes") {
    testutil::TempDir out;
    const auto no_axes = bundled_manifest(out, ",\n  \"countries\": [\"MX\"]");
    CHECK_THROWS_AS(sensitivity_sweep(no_axes), UnknownParameter);

    const auto unknown = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\"],\n"
             "  \"sweep\": [{\"parameter\": \"warp_factor\", \"values\": [9.0]}]");
    CHECK_THROWS_AS(sensitivity_sweep(unknown), UnknownParameter);

    const auto duplicate = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\"],\n"
             "  \"sweep\": [{\"parameter\": \"tax_rate\", \"values\": [0.1]},\n"
             "             {\"parameter\": \"tax_rate\", \"values\": [0.2]}]");
    CHECK_THROWS_AS(sensitivity_sweep(duplicate), ConfigError);

    const auto two_countries = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\", \"BR\"],\n"
             "  \"sweep\": [{\"parameter\": \"tax_rate\", \"values\": [0.1]}]");
    CHECK_THROWS_AS(sensitivity_sweep(two_countries), ConfigError);

    const auto bad_rate = bundled_manifest(
        out, ",\n  \"countries\": [\"MX\"],\n"
             "  \"sweep\": [{\"parameter\": \"discount_rate\", \"values\": [0.0]}]");
    CHECK_THROWS_AS(sensitivity_sweep(bad_rate), ConfigError);
}

TEST_CASE("profiles must declare the country they are filed under") {
    testutil::TempDir profiles;
    profiles.write("mx.json", over_excluded_profile("BR"));
    testutil::TempDir out;
    const auto manifest = load_manifest_text(
        manifest_text(profiles.path().generic_string(), out.path().generic_string(),
                      ",\n  \"countries\": [\"MX\"]"),
        ".");
    CHECK_THROWS_AS(run_pipeline(manifest, RunMode::Size), ConfigError);
}

TEST_CASE("fixed two-decimal cells round half to even") {
    CHECK(csv::format_fixed2(0.125) == "0.12");
    CHECK(csv::format_fixed2(0.375) == "0.38");
    CHECK(csv::format_fixed2(-0.125) == "-0.12");
    CHECK(csv::format_fixed2(1234.5) == "1234.50");
    CHECK(csv::format_fixed2(0.0) == "0.00");
    CHECK(csv::format_fixed2(-0.001) == "0.00");
    CHECK(csv::format_fixed2(1995795220976.17) == "1995795220976.17");
    CHECK(csv::format_shortest(0.1) == "0.1");
    CHECK(csv::format_shortest(0.05) == "0.05");
}

TEST_CASE("the sweep report prints axes at full precision and money at two decimals") {
    report::SweepReport sweep;
    sweep.axes = {"market_share"};
    sweep.rows.push_back({{{"market_share", 0.05}}, 1234.5});
    sweep.rows.push_back({{{"market_share", 0.1}}, 2469.0});
    CHECK(report::sweep_csv(sweep) ==
          "market_share,total_present_value\n"
          "0.05,1234.50\n"
          "0.1,2469.00\n");

    const auto doc = report::sweep_json(sweep);
    CHECK(doc["rows"][0]["market_share"].get<double>() == 0.05);
    CHECK(doc["rows"][1]["total_present_value"].get<double>() == 2469.0);
}

TEST_CASE("the default data directory honors the environment override") {
    const char *previous = ::getenv("INVESTVAL_DATA_DIR");
    const std::string saved = previous ? previous : "";

    ::setenv("INVESTVAL_DATA_DIR", "/tmp/investval-elsewhere", 1);
    CHECK(default_data_dir() == fs::path("/tmp/investval-elsewhere"));

    if (previous) {
        ::setenv("INVESTVAL_DATA_DIR", saved.c_str(), 1);
    } else {
        ::unsetenv("INVESTVAL_DATA_DIR");
        // Without the variable the bundled tree is the fallback.
        CHECK(fs::equivalent(default_data_dir(), testutil::data_dir()));
    }
}
