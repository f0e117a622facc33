#include "investval/dcf.hpp"

#include "investval/dataset.hpp"
#include "investval/errors.hpp"
#include "investval/market.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace investval;

namespace {

ScenarioConfig base_scenario() {
    return parse_scenario_config(testutil::data_dir() / "scenario_base.json");
}

SomSchedule schedule_of(const std::vector<double> &obtainable, int start_year = 2025) {
    SomSchedule schedule;
    for (std::size_t i = 0; i < obtainable.size(); ++i) {
        schedule.years.push_back(
            {start_year + static_cast<int>(i), obtainable[i], 0.005});
    }
    return schedule;
}

// The five published Brazil revenue figures, 2025 through 2029.
const std::vector<double> kBrazilRevenues = {1666519.87, 1979825.60, 2332594.53,
                                             2729135.60, 3400922.82};
const double kBrazilTerminalValue = 3387721.87;

} // namespace

TEST_CASE("revenue projection applies the initial capture fraction") {
    const auto revenues = project_revenue(schedule_of({16665198.70}), base_scenario());
    REQUIRE(revenues.size() == 1);
    CHECK(revenues[0].year == 2025);
    CHECK(revenues[0].revenue_fraction == 0.10);
    CHECK(revenues[0].revenue == doctest::Approx(1666519.87).epsilon(1e-9));
}

TEST_CASE("zero obtainable market projects zero revenue") {
    const auto revenues = project_revenue(schedule_of({0.0, 0.0}), base_scenario());
    REQUIRE(revenues.size() == 2);
    CHECK(revenues[0].revenue == 0.0);
    CHECK(revenues[1].revenue == 0.0);
}

TEST_CASE("the capture fraction climbs one percentage point a year") {
    auto config = base_scenario();
    config.horizon_years = 3;
    const auto revenues = project_revenue(schedule_of({1000.0, 1000.0, 1000.0}), config);
    REQUIRE(revenues.size() == 3);
    CHECK(revenues[0].revenue == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(revenues[1].revenue == doctest::Approx(110.0).epsilon(1e-12));
    CHECK(revenues[2].revenue == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("the capture fraction saturates at one") {
    auto config = base_scenario();
    config.initial_revenue_fraction = 0.95;
    config.revenue_fraction_step = 0.03;
    const auto revenues =
        project_revenue(schedule_of({1000.0, 1000.0, 1000.0, 1000.0}), config);
    REQUIRE(revenues.size() == 4);
    CHECK(revenues[0].revenue_fraction == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(revenues[1].revenue_fraction == doctest::Approx(0.98).epsilon(1e-12));
    CHECK(revenues[2].revenue_fraction == 1.0);
    CHECK(revenues[3].revenue_fraction == 1.0);
    CHECK(revenues[3].revenue == 1000.0);
}

TEST_CASE("the pro forma reproduces the published 2025 row") {
    const auto rows = build_pro_forma({{2025, 1666519.87, 0.10}}, base_scenario());
    REQUIRE(rows.size() == 1);
    const auto &row = rows[0];
    CHECK(row.revenue == doctest::Approx(1666519.87).epsilon(1e-4));
    CHECK(row.cogs == doctest::Approx(416629.97).epsilon(1e-4));
    CHECK(row.gross_profit == doctest::Approx(1249889.90).epsilon(1e-4));
    CHECK(row.opex == doctest::Approx(374966.97).epsilon(1e-4));
    CHECK(row.operating_income == doctest::Approx(874922.93).epsilon(1e-4));
    CHECK(row.taxes == doctest::Approx(262476.88).epsilon(1e-4));
    CHECK(row.cash_flow == doctest::Approx(612446.05).epsilon(1e-4));
}

TEST_CASE("zero revenue yields an all-zero row") {
    const auto rows = build_pro_forma({{2025, 0.0, 0.0}}, base_scenario());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].revenue == 0.0);
    CHECK(rows[0].cogs == 0.0);
    CHECK(rows[0].gross_profit == 0.0);
    CHECK(rows[0].opex == 0.0);
    CHECK(rows[0].operating_income == 0.0);
    CHECK(rows[0].taxes == 0.0);
    CHECK(rows[0].cash_flow == 0.0);
}

TEST_CASE("a 1,000 revenue row follows the stated ratios") {
    const auto rows = build_pro_forma({{2025, 1000.0, 0.10}}, base_scenario());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].cogs == doctest::Approx(250.0).epsilon(1e-12));
    CHECK(rows[0].gross_profit == doctest::Approx(750.0).epsilon(1e-12));
    CHECK(rows[0].opex == doctest::Approx(225.0).epsilon(1e-12));
    CHECK(rows[0].operating_income == doctest::Approx(525.0).epsilon(1e-12));
    CHECK(rows[0].taxes == doctest::Approx(157.50).epsilon(1e-12));
    CHECK(rows[0].cash_flow == doctest::Approx(367.50).epsilon(1e-12));
}

TEST_CASE("negative revenue is rejected as nonviable") {
    CHECK_THROWS_AS(build_pro_forma({{2025, -1.0, 0.10}}, base_scenario()),
                    NonviableRevenue);
}

TEST_CASE("discounting matches the published present values") {
    auto rows = build_pro_forma(
        {
            {2025, kBrazilRevenues[0], 0.0},
            {2026, kBrazilRevenues[1], 0.0},
            {2027, kBrazilRevenues[2], 0.0},
            {2028, kBrazilRevenues[3], 0.0},
            {2029, kBrazilRevenues[4], 0.0},
        },
        base_scenario());
    const double total = discount_cash_flows(rows, 0.35);

    CHECK(rows[0].pv_cash_flow == doctest::Approx(453663.74).epsilon(1e-4));
    CHECK(rows[1].pv_cash_flow == doctest::Approx(399224.09).epsilon(1e-4));
    CHECK(rows[2].pv_cash_flow == doctest::Approx(348413.75).epsilon(1e-4));
    CHECK(rows[3].pv_cash_flow == doctest::Approx(301958.59).epsilon(1e-4));
    CHECK(rows[4].pv_cash_flow == doctest::Approx(278731.00).epsilon(1e-4));

    double sum = 0.0;
    for (const auto &row : rows) sum += row.pv_cash_flow;
    CHECK(total == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("a zero rate leaves cash flows undiscounted") {
    auto rows = build_pro_forma({{2025, 1000.0, 0.0}, {2026, 2000.0, 0.0}}, base_scenario());
    discount_cash_flows(rows, 0.0);
    CHECK(rows[0].pv_cash_flow == rows[0].cash_flow);
    CHECK(rows[1].pv_cash_flow == rows[1].cash_flow);
}

TEST_CASE("terminal value follows Gordon growth") {
    CHECK(terminal_value(100.0, 0.35, 0.0) == doctest::Approx(285.714286).epsilon(1e-6));
}

TEST_CASE("Gordon growth requires the rate to exceed the growth") {
    CHECK_THROWS_AS(terminal_value(100.0, 0.35, 0.35), GordonInvalid);
    CHECK_THROWS_AS(terminal_value(100.0, 0.35, 0.40), GordonInvalid);
}

TEST_CASE("a slightly shrinking perpetuity reproduces the published terminal value") {
    // Growth calibrated by bisection so that (1+g)/(0.35-g) matches the
    // published TV-to-final-cash-flow ratio.
    const double tv = terminal_value(1249839.14, 0.35, -0.0138298);
    CHECK(tv == doctest::Approx(kBrazilTerminalValue).epsilon(5e-3));
}

TEST_CASE("the Brazil fixture values to the published total") {
    const auto config = base_scenario();
    const auto result =
        valuate_revenues(kBrazilRevenues, 1, config, 2025, kBrazilTerminalValue);

    CHECK(result.discount_rate == 0.35);
    REQUIRE(result.rows.size() == 5);
    CHECK(result.rows[0].pv_cash_flow == doctest::Approx(453663.74).epsilon(1e-4));
    CHECK(result.rows[4].pv_cash_flow == doctest::Approx(278731.00).epsilon(1e-4));

    CHECK(result.terminal_value == kBrazilTerminalValue);
    CHECK(result.pv_terminal_value == doctest::Approx(755507.72).epsilon(5e-4));
    CHECK(result.total_present_value == doctest::Approx(2537498.90).epsilon(5e-4));

    double mean_cf = 0.0;
    for (const auto &row : result.rows) mean_cf += row.cash_flow;
    mean_cf /= static_cast<double>(result.rows.size());
    CHECK(mean_cf == doctest::Approx(890011.38).epsilon(1e-4));

    // The assumptions snapshot echoes the inputs verbatim.
    CHECK(result.assumptions.market_share == config.market_share);
    CHECK(result.assumptions.discount_tiers == config.discount_tiers);
}

TEST_CASE("an empty schedule with a zero override totals zero") {
    const auto result = valuate(SomSchedule{}, 1, base_scenario(), 0.0);
    CHECK(result.rows.empty());
    CHECK(result.terminal_value == 0.0);
    CHECK(result.pv_terminal_value == 0.0);
    CHECK(result.total_present_value == 0.0);
}

TEST_CASE("an empty schedule without an override has no terminal value") {
    const auto result = valuate(SomSchedule{}, 1, base_scenario());
    CHECK(result.terminal_value == 0.0);
    CHECK(result.total_present_value == 0.0);
}

TEST_CASE("two cash flows at 35% discount to a round two hundred") {
    auto config = base_scenario();
    config.horizon_years = 2;
    // Back out the revenues that produce cash flows of exactly 135 and 182.25
    // under the default margin ratios (cash flow = 0.3675 x revenue).
    const double margin = (1.0 - config.cogs_ratio) * (1.0 - config.opex_ratio_of_gross) *
                          (1.0 - config.tax_rate);
    const auto result = valuate_revenues_at_rate({135.0 / margin, 182.25 / margin}, config,
                                                 0.35, 2025, 0.0);
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].cash_flow == doctest::Approx(135.0).epsilon(1e-12));
    CHECK(result.rows[1].cash_flow == doctest::Approx(182.25).epsilon(1e-12));
    CHECK(result.rows[0].pv_cash_flow == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(result.rows[1].pv_cash_flow == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(result.total_present_value == doctest::Approx(200.0).epsilon(1e-9));
}

TEST_CASE("the rank picks the discount rate from the tier table") {
    const auto config = base_scenario();
    CHECK(valuate_revenues({1000.0}, 1, config, 2025, 0.0).discount_rate == 0.35);
    CHECK(valuate_revenues({1000.0}, 7, config, 2025, 0.0).discount_rate == 0.40);
    CHECK(valuate_revenues({1000.0}, 19, config, 2025, 0.0).discount_rate == 0.50);
    CHECK_THROWS_AS(valuate_revenues({1000.0}, 20, config, 2025, 0.0), RankOutOfRange);
}

TEST_CASE("a higher discount rate strictly lowers the valuation") {
    const auto config = base_scenario();
    const auto low = valuate_revenues_at_rate(kBrazilRevenues, config, 0.35, 2025);
    const auto high = valuate_revenues_at_rate(kBrazilRevenues, config, 0.50, 2025);
    CHECK(high.total_present_value < low.total_present_value);
}

TEST_CASE("a better rank never values lower than a worse rank") {
    const auto config = base_scenario();
    double previous = -1.0;
    for (int rank = 19; rank >= 1; --rank) {
        const double total =
            valuate_revenues(kBrazilRevenues, rank, config, 2025).total_present_value;
        CHECK(total >= previous);
        previous = total;
    }
}

TEST_CASE("valuation is homogeneous in the cash-flow scale") {
    const auto config = base_scenario();
    std::vector<double> doubled = kBrazilRevenues;
    for (auto &revenue : doubled) revenue *= 2.0;

    const auto base =
        valuate_revenues(kBrazilRevenues, 1, config, 2025, kBrazilTerminalValue);
    const auto scaled =
        valuate_revenues(doubled, 1, config, 2025, 2.0 * kBrazilTerminalValue);
    CHECK(scaled.total_present_value == 2.0 * base.total_present_value);
    CHECK(scaled.pv_terminal_value == 2.0 * base.pv_terminal_value);
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
        CHECK(scaled.rows[i].cash_flow == 2.0 * base.rows[i].cash_flow);
        CHECK(scaled.rows[i].pv_cash_flow == 2.0 * base.rows[i].pv_cash_flow);
    }
}

TEST_CASE("every emitted row satisfies the accounting identities") {
    const auto config = base_scenario();
    const auto result = valuate_revenues(kBrazilRevenues, 1, config, 2025);
    for (const auto &row : result.rows) {
        CHECK(row.cogs == doctest::Approx(config.cogs_ratio * row.revenue).epsilon(1e-9));
        CHECK(row.gross_profit == doctest::Approx(row.revenue - row.cogs).epsilon(1e-9));
        CHECK(row.opex ==
              doctest::Approx(config.opex_ratio_of_gross * row.gross_profit).epsilon(1e-9));
        CHECK(row.operating_income ==
              doctest::Approx(row.gross_profit - row.opex).epsilon(1e-9));
        CHECK(row.taxes ==
              doctest::Approx(config.tax_rate * row.operating_income).epsilon(1e-9));
        CHECK(row.cash_flow ==
              doctest::Approx(row.operating_income - row.taxes).epsilon(1e-9));
    }
}

TEST_CASE("the total decomposes into explicit and terminal parts") {
    const auto config = base_scenario();
    const auto result =
        valuate_revenues(kBrazilRevenues, 1, config, 2025, kBrazilTerminalValue);

    double explicit_sum = 0.0;
    for (const auto &row : result.rows) explicit_sum += row.pv_cash_flow;
    CHECK(result.pv_explicit == doctest::Approx(explicit_sum).epsilon(1e-12));
    CHECK(result.total_present_value ==
          doctest::Approx(result.pv_explicit + result.pv_terminal_value).epsilon(1e-12));

    // The terminal value is discounted from the end of the horizon.
    CHECK(result.pv_terminal_value ==
          doctest::Approx(result.terminal_value / std::pow(1.35, 5)).epsilon(1e-12));
}

TEST_CASE("valuation from a schedule walks the full chain") {
    auto config = base_scenario();
    config.horizon_years = 5;
    const auto schedule = som_schedule_from_base(3777577216.14, config, 2025);
    const auto result = valuate(schedule, 2, config);
    CHECK(result.discount_rate == 0.35);
    REQUIRE(result.rows.size() == 5);
    // Year one: obtainable 18,887,886.08 at a 10% capture fraction.
    CHECK(result.rows[0].revenue == doctest::Approx(1888788.61).epsilon(1e-4));
    CHECK(result.rows[0].year == 2025);
    CHECK(result.total_present_value > 0.0);
}
