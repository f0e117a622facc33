#include "investval/report.hpp"

#include "investval/csv.hpp"
#include "investval/errors.hpp"

#include <fmt/format.h>

#include <fstream>

namespace investval::report {

namespace {

std::string fixed2_or_empty(const std::optional<double> &value) {
    return value.has_value() ? csv::format_fixed2(*value) : std::string{};
}

nlohmann::ordered_json json_or_null(const std::optional<double> &value) {
    if (value.has_value()) {
        return *value;
    }
    return nullptr;
}

} // namespace

std::string ranking_csv(const RankingTable &table) {
    std::string out =
        "country,infra_score,edu_score,econ_score,infra_rank,edu_rank,econ_rank,"
        "overall_score,overall_rank,discount_rate\n";
    for (const auto &row : table.rows) {
        out += csv::join_row({
            row.country,
            fixed2_or_empty(row.pillar_scores[0]),
            fixed2_or_empty(row.pillar_scores[1]),
            fixed2_or_empty(row.pillar_scores[2]),
            std::to_string(row.pillar_ranks[0]),
            std::to_string(row.pillar_ranks[1]),
            std::to_string(row.pillar_ranks[2]),
            fixed2_or_empty(row.overall_score),
            std::to_string(row.overall_rank),
            fixed2_or_empty(row.discount_rate),
        });
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json ranking_json(const RankingTable &table) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &row : table.rows) {
        nlohmann::ordered_json entry;
        entry["country"] = row.country;
        entry["infra_score"] = json_or_null(row.pillar_scores[0]);
        entry["edu_score"] = json_or_null(row.pillar_scores[1]);
        entry["econ_score"] = json_or_null(row.pillar_scores[2]);
        entry["infra_rank"] = row.pillar_ranks[0];
        entry["edu_rank"] = row.pillar_ranks[1];
        entry["econ_rank"] = row.pillar_ranks[2];
        entry["overall_score"] = json_or_null(row.overall_score);
        entry["overall_rank"] = row.overall_rank;
        entry["discount_rate"] = json_or_null(row.discount_rate);
        rows.push_back(std::move(entry));
    }
    nlohmann::ordered_json doc;
    doc["rows"] = std::move(rows);
    doc["excluded"] = table.excluded;
    return doc;
}

std::string funnel_csv(const TamBreakdown &tam, const SamBreakdown &sam,
                       const SomSchedule &som) {
    std::string out = "stage,quantity,local_value,usd_value,flag\n";
    out += csv::join_row({"tam", csv::format_fixed2(tam.population_over_14),
                          csv::format_fixed2(tam.tam_local_annual),
                          csv::format_fixed2(tam.tam_usd_annual), ""});
    out += '\n';
    for (const auto &exclusion : sam.exclusions) {
        out += csv::join_row({fmt::format("exclude:{}", exclusion.label),
                              csv::format_fixed2(exclusion.persons), "", "", "exclusion"});
        out += '\n';
    }
    out += csv::join_row({"sam", csv::format_fixed2(sam.eligible_population),
                          csv::format_fixed2(sam.sam_local_annual),
                          csv::format_fixed2(sam.sam_usd_annual),
                          sam.nonviable ? "nonviable" : ""});
    out += '\n';
    out += csv::join_row({"som", "", "", csv::format_fixed2(som.som_base_usd),
                          sam.nonviable ? "nonviable" : ""});
    out += '\n';
    return out;
}

nlohmann::ordered_json funnel_json(const TamBreakdown &tam, const SamBreakdown &sam,
                                   const SomSchedule &som) {
    nlohmann::ordered_json doc;
    doc["tam"] = {{"population_over_14", tam.population_over_14},
                  {"urban_population", tam.urban_population},
                  {"rural_population", tam.rural_population},
                  {"local_annual", tam.tam_local_annual},
                  {"usd_annual", tam.tam_usd_annual}};
    nlohmann::ordered_json exclusions = nlohmann::ordered_json::array();
    for (const auto &exclusion : sam.exclusions) {
        exclusions.push_back({{"label", exclusion.label}, {"persons", exclusion.persons}});
    }
    doc["sam"] = {{"exclusions", std::move(exclusions)},
                  {"eligible_population", sam.eligible_population},
                  {"prorated_basket_monthly", sam.prorated_basket_monthly},
                  {"local_annual", sam.sam_local_annual},
                  {"usd_annual", sam.sam_usd_annual},
                  {"nonviable", sam.nonviable}};
    doc["som"] = {{"base_usd", som.som_base_usd}};
    return doc;
}

std::string schedule_csv(const SomSchedule &som) {
    std::string out = "year,capture_rate,obtainable_usd\n";
    for (const auto &year : som.years) {
        out += csv::join_row({std::to_string(year.year),
                              csv::format_fixed2(year.capture_rate * 100.0),
                              csv::format_fixed2(year.obtainable_usd)});
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json schedule_json(const SomSchedule &som) {
    nlohmann::ordered_json doc;
    doc["som_base_usd"] = som.som_base_usd;
    nlohmann::ordered_json years = nlohmann::ordered_json::array();
    for (const auto &year : som.years) {
        years.push_back({{"year", year.year},
                         {"capture_rate", year.capture_rate},
                         {"obtainable_usd", year.obtainable_usd}});
    }
    doc["years"] = std::move(years);
    return doc;
}

std::string valuation_csv(const ValuationResult &valuation) {
    std::string out =
        "year,revenue,cogs,gross_profit,opex,operating_income,taxes,cash_flow,pv_cash_flow\n";
    for (const auto &row : valuation.rows) {
        out += csv::join_row({
            std::to_string(row.year),
            csv::format_fixed2(row.revenue),
            csv::format_fixed2(row.cogs),
            csv::format_fixed2(row.gross_profit),
            csv::format_fixed2(row.opex),
            csv::format_fixed2(row.operating_income),
            csv::format_fixed2(row.taxes),
            csv::format_fixed2(row.cash_flow),
            csv::format_fixed2(row.pv_cash_flow),
        });
        out += '\n';
    }
    out += '\n';
    out += "discount_rate,terminal_value,pv_terminal_value,total_present_value\n";
    out += csv::join_row({csv::format_fixed2(valuation.discount_rate),
                          csv::format_fixed2(valuation.terminal_value),
                          csv::format_fixed2(valuation.pv_terminal_value),
                          csv::format_fixed2(valuation.total_present_value)});
    out += '\n';
    return out;
}

nlohmann::ordered_json scenario_json(const ScenarioConfig &config) {
    nlohmann::ordered_json doc;
    doc["country"] = config.country;
    doc["market_share"] = config.market_share;
    doc["initial_capture_rate"] = config.initial_capture_rate;
    doc["capture_escalation"] = config.capture_escalation;
    doc["horizon_years"] = config.horizon_years;
    doc["initial_revenue_fraction"] = config.initial_revenue_fraction;
    doc["revenue_fraction_step"] = config.revenue_fraction_step;
    doc["cogs_ratio"] = config.cogs_ratio;
    doc["opex_ratio_of_gross"] = config.opex_ratio_of_gross;
    doc["tax_rate"] = config.tax_rate;
    doc["terminal_growth"] = config.terminal_growth;
    nlohmann::ordered_json tiers = nlohmann::ordered_json::array();
    for (const auto &tier : config.discount_tiers) {
        tiers.push_back(
            {{"rank_lo", tier.rank_lo}, {"rank_hi", tier.rank_hi}, {"rate", tier.rate}});
    }
    doc["discount_tiers"] = std::move(tiers);
    return doc;
}

nlohmann::ordered_json valuation_json(const ValuationResult &valuation) {
    nlohmann::ordered_json doc;
    doc["discount_rate"] = valuation.discount_rate;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &row : valuation.rows) {
        rows.push_back({{"year", row.year},
                        {"revenue", row.revenue},
                        {"cogs", row.cogs},
                        {"gross_profit", row.gross_profit},
                        {"opex", row.opex},
                        {"operating_income", row.operating_income},
                        {"taxes", row.taxes},
                        {"cash_flow", row.cash_flow},
                        {"pv_cash_flow", row.pv_cash_flow}});
    }
    doc["rows"] = std::move(rows);
    doc["pv_explicit"] = valuation.pv_explicit;
    doc["terminal_value"] = valuation.terminal_value;
    doc["pv_terminal_value"] = valuation.pv_terminal_value;
    doc["total_present_value"] = valuation.total_present_value;
    doc["assumptions_snapshot"] = scenario_json(valuation.assumptions);
    return doc;
}

std::string sweep_csv(const SweepReport &sweep) {
    std::vector<std::string> header = sweep.axes;
    header.push_back("total_present_value");
    std::string out = csv::join_row(header);
    out += '\n';
    for (const auto &row : sweep.rows) {
        std::vector<std::string> fields;
        fields.reserve(row.coordinates.size() + 1);
        for (const auto &[name, value] : row.coordinates) {
            (void)name;
            fields.push_back(csv::format_shortest(value));
        }
        fields.push_back(csv::format_fixed2(row.total_present_value));
        out += csv::join_row(fields);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json sweep_json(const SweepReport &sweep) {
    nlohmann::ordered_json doc;
    doc["axes"] = sweep.axes;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &row : sweep.rows) {
        nlohmann::ordered_json entry;
        for (const auto &[name, value] : row.coordinates) {
            entry[name] = value;
        }
        entry["total_present_value"] = row.total_present_value;
        rows.push_back(std::move(entry));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

void write_text_file(const std::filesystem::path &path, const std::string &content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError(
                fmt::format("cannot create directory {}: {}", path.parent_path().string(),
                            ec.message()));
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(fmt::format("cannot open {} for writing", path.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw IoError(fmt::format("failed writing {}", path.string()));
    }
}

} // namespace investval::report
