#pragma once

#include "investval/dataset.hpp"
#include "investval/dcf.hpp"
#include "investval/market.hpp"
#include "investval/ranking.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace investval::report {

// All CSV emitters present numbers with fixed two decimals (round half to
// even); the JSON variants carry full shortest-roundtrip precision. Integer
// columns (years, ranks) are printed verbatim.

std::string ranking_csv(const RankingTable &table);
nlohmann::ordered_json ranking_json(const RankingTable &table);

std::string funnel_csv(const TamBreakdown &tam, const SamBreakdown &sam,
                       const SomSchedule &som);
nlohmann::ordered_json funnel_json(const TamBreakdown &tam, const SamBreakdown &sam,
                                   const SomSchedule &som);

// Capture rates are displayed as percentages with two decimals; the JSON
// variant keeps the raw fractions.
std::string schedule_csv(const SomSchedule &som);
nlohmann::ordered_json schedule_json(const SomSchedule &som);

std::string valuation_csv(const ValuationResult &valuation);
nlohmann::ordered_json valuation_json(const ValuationResult &valuation);

nlohmann::ordered_json scenario_json(const ScenarioConfig &config);

struct SweepRow {
    std::vector<std::pair<std::string, double>> coordinates; // axis name -> value
    double total_present_value = 0.0;
};

struct SweepReport {
    std::vector<std::string> axes;
    std::vector<SweepRow> rows;
};

// Axis coordinates keep full precision so nearby grid points stay distinct;
// the PV column is fixed two decimals like every other money column.
std::string sweep_csv(const SweepReport &sweep);
nlohmann::ordered_json sweep_json(const SweepReport &sweep);

void write_text_file(const std::filesystem::path &path, const std::string &content);

} // namespace investval::report
