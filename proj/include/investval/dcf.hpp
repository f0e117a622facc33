#pragma once

#include "investval/dataset.hpp"
#include "investval/market.hpp"

#include <optional>
#include <vector>

namespace investval {

struct YearRevenue {
    int year = 0;
    double revenue = 0.0;
    double revenue_fraction = 0.0; // share of the obtainable market realized
};

// revenue(t) = min(initial_fraction + step*(t-1), 1) * obtainable(t).
std::vector<YearRevenue> project_revenue(const SomSchedule &schedule,
                                         const ScenarioConfig &config);

struct ProFormaRow {
    int year = 0;
    double revenue = 0.0;
    double cogs = 0.0;
    double gross_profit = 0.0;
    double opex = 0.0;
    double operating_income = 0.0;
    double taxes = 0.0;
    double cash_flow = 0.0;
    double pv_cash_flow = 0.0; // filled by discount_cash_flows
};

// Income statement per year: COGS off revenue, opex off gross profit, taxes
// off operating income (never negative). Cash flow is after-tax operating
// income. Throws NonviableRevenue when any projected revenue is negative.
std::vector<ProFormaRow> build_pro_forma(const std::vector<YearRevenue> &revenues,
                                         const ScenarioConfig &config);

// End-of-year convention: PV(t) = cf / (1+rate)^t with t starting at 1.
// Fills pv_cash_flow in place and returns the sum.
double discount_cash_flows(std::vector<ProFormaRow> &rows, double discount_rate);

// Gordon growth perpetuity off the final year's cash flow. Throws
// GordonInvalid unless discount_rate > growth.
double terminal_value(double final_cash_flow, double discount_rate, double growth);

struct ValuationResult {
    std::vector<ProFormaRow> rows;
    double discount_rate = 0.0;
    double terminal_value = 0.0;
    double pv_terminal_value = 0.0;
    double pv_explicit = 0.0;       // sum of discounted in-horizon cash flows
    double total_present_value = 0.0;
    ScenarioConfig assumptions;     // snapshot of the inputs that produced this
};

// Full pipeline from an obtainable-market schedule at an explicit discount
// rate. tv_override, when set, replaces the Gordon terminal value (it is
// still discounted from the final year).
ValuationResult valuate_at_rate(const SomSchedule &schedule, const ScenarioConfig &config,
                                double discount_rate,
                                std::optional<double> tv_override = std::nullopt);

// Rank-driven variant: the discount rate comes from the config's tier table.
ValuationResult valuate(const SomSchedule &schedule, int rank, const ScenarioConfig &config,
                        std::optional<double> tv_override = std::nullopt);

// From externally supplied revenues (year labels inferred from start_year).
ValuationResult valuate_revenues_at_rate(const std::vector<double> &revenues,
                                         const ScenarioConfig &config, double discount_rate,
                                         int start_year,
                                         std::optional<double> tv_override = std::nullopt);

ValuationResult valuate_revenues(const std::vector<double> &revenues, int rank,
                                 const ScenarioConfig &config, int start_year,
                                 std::optional<double> tv_override = std::nullopt);

} // namespace investval
