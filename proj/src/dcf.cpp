#include "investval/dcf.hpp"

#include "investval/errors.hpp"
#include "investval/ranking.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace investval {

std::vector<YearRevenue> project_revenue(const SomSchedule &schedule,
                                         const ScenarioConfig &config) {
    validate_scenario(config);

    std::vector<YearRevenue> revenues;
    revenues.reserve(schedule.years.size());
    int t = 1;
    for (const auto &year : schedule.years) {
        YearRevenue rev;
        rev.year = year.year;
        rev.revenue_fraction = std::min(
            config.initial_revenue_fraction + config.revenue_fraction_step * (t - 1), 1.0);
        rev.revenue = rev.revenue_fraction * year.obtainable_usd;
        revenues.push_back(rev);
        ++t;
    }
    return revenues;
}

std::vector<ProFormaRow> build_pro_forma(const std::vector<YearRevenue> &revenues,
                                         const ScenarioConfig &config) {
    validate_scenario(config);

    std::vector<ProFormaRow> rows;
    rows.reserve(revenues.size());
    for (const auto &rev : revenues) {
        if (rev.revenue < 0.0) {
            throw NonviableRevenue(fmt::format(
                "projected revenue for year {} is negative ({}); the market is nonviable",
                rev.year, rev.revenue));
        }
        ProFormaRow row;
        row.year = rev.year;
        row.revenue = rev.revenue;
        row.cogs = row.revenue * config.cogs_ratio;
        row.gross_profit = row.revenue - row.cogs;
        row.opex = row.gross_profit * config.opex_ratio_of_gross;
        row.operating_income = row.gross_profit - row.opex;
        row.taxes = std::max(row.operating_income, 0.0) * config.tax_rate;
        row.cash_flow = row.operating_income - row.taxes;
        rows.push_back(row);
    }
    return rows;
}

double discount_cash_flows(std::vector<ProFormaRow> &rows, double discount_rate) {
    double total = 0.0;
    int t = 1;
    for (auto &row : rows) {
        row.pv_cash_flow = row.cash_flow / std::pow(1.0 + discount_rate, t);
        total += row.pv_cash_flow;
        ++t;
    }
    return total;
}

double terminal_value(double final_cash_flow, double discount_rate, double growth) {
    if (!(discount_rate > growth)) {
        throw GordonInvalid(
            fmt::format("Gordon growth requires discount rate > growth ({} <= {})",
                        discount_rate, growth));
    }
    return final_cash_flow * (1.0 + growth) / (discount_rate - growth);
}

namespace {

ValuationResult finish_valuation(std::vector<ProFormaRow> rows, const ScenarioConfig &config,
                                 double discount_rate, std::optional<double> tv_override) {
    ValuationResult result;
    result.discount_rate = discount_rate;
    result.assumptions = config;
    result.pv_explicit = discount_cash_flows(rows, discount_rate);

    if (tv_override.has_value()) {
        result.terminal_value = *tv_override;
    } else if (rows.empty()) {
        result.terminal_value = 0.0; // nothing to grow a perpetuity from
    } else {
        result.terminal_value =
            terminal_value(rows.back().cash_flow, discount_rate, config.terminal_growth);
    }
    const auto horizon = static_cast<int>(rows.size());
    result.pv_terminal_value =
        result.terminal_value / std::pow(1.0 + discount_rate, horizon);
    result.total_present_value = result.pv_explicit + result.pv_terminal_value;
    result.rows = std::move(rows);
    return result;
}

} // namespace

ValuationResult valuate_at_rate(const SomSchedule &schedule, const ScenarioConfig &config,
                                double discount_rate, std::optional<double> tv_override) {
    auto revenues = project_revenue(schedule, config);
    auto rows = build_pro_forma(revenues, config);
    return finish_valuation(std::move(rows), config, discount_rate, tv_override);
}

ValuationResult valuate(const SomSchedule &schedule, int rank, const ScenarioConfig &config,
                        std::optional<double> tv_override) {
    return valuate_at_rate(schedule, config,
                           discount_rate_for_rank(rank, config.discount_tiers), tv_override);
}

ValuationResult valuate_revenues_at_rate(const std::vector<double> &revenues,
                                         const ScenarioConfig &config, double discount_rate,
                                         int start_year, std::optional<double> tv_override) {
    validate_scenario(config);

    std::vector<YearRevenue> labeled;
    labeled.reserve(revenues.size());
    int t = 0;
    for (double revenue : revenues) {
        labeled.push_back({start_year + t, revenue, 0.0});
        ++t;
    }
    auto rows = build_pro_forma(labeled, config);
    return finish_valuation(std::move(rows), config, discount_rate, tv_override);
}

ValuationResult valuate_revenues(const std::vector<double> &revenues, int rank,
                                 const ScenarioConfig &config, int start_year,
                                 std::optional<double> tv_override) {
    return valuate_revenues_at_rate(revenues, config,
                                    discount_rate_for_rank(rank, config.discount_tiers),
                                    start_year, tv_override);
}

} // namespace investval
