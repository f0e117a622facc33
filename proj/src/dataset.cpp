#include "investval/dataset.hpp"
#include "investval/csv.hpp"
#include "investval/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace investval {

namespace {

constexpr double kShareSumTolerance = 1e-9;

const std::vector<csv::Row> &require_header(const std::vector<csv::Row> &rows,
                                            const std::vector<std::string> &expected,
                                            const std::string &what) {
    if (rows.empty()) {
        throw MalformedRow(fmt::format("{}: file is empty, expected header", what), 0, "header");
    }
    if (rows.front().fields != expected) {
        throw MalformedRow(
            fmt::format("{}: bad header '{}', expected '{}'", what,
                        fmt::join(rows.front().fields, ","), fmt::join(expected, ",")),
            rows.front().line_no, "header");
    }
    return rows;
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::string_view to_string(Pillar pillar) {
    switch (pillar) {
    case Pillar::Infrastructure: return "infrastructure";
    case Pillar::EducationResearch: return "education_research";
    case Pillar::Economic: return "economic";
    }
    return "unknown";
}

std::optional<Pillar> pillar_from_string(std::string_view text) {
    if (text == "infrastructure") return Pillar::Infrastructure;
    if (text == "education_research") return Pillar::EducationResearch;
    if (text == "economic") return Pillar::Economic;
    return std::nullopt;
}

std::string_view to_string(Polarity polarity) {
    return polarity == Polarity::HigherIsBetter ? "higher_is_better" : "lower_is_better";
}

std::optional<Polarity> polarity_from_string(std::string_view text) {
    if (text == "higher_is_better" || text.empty()) return Polarity::HigherIsBetter;
    if (text == "lower_is_better") return Polarity::LowerIsBetter;
    return std::nullopt;
}

void IndicatorDataset::add_definition(IndicatorDefinition def) {
    if (definition_index_.contains(def.id)) {
        throw DuplicateDefinition(fmt::format("indicator '{}' declared twice", def.id));
    }
    definition_index_.emplace(def.id, definitions_.size());
    definitions_.push_back(std::move(def));
}

void IndicatorDataset::add_observation(CountryObservation obs) {
    if (!definition_index_.contains(obs.indicator_id)) {
        throw UnknownIndicator(fmt::format(
            "observation for '{}' references undeclared indicator '{}'", obs.country,
            obs.indicator_id));
    }
    if (obs.value && !std::isfinite(*obs.value)) {
        throw RangeViolation(fmt::format("observation ({}, {}) has a non-finite value",
                                         obs.country, obs.indicator_id));
    }
    ObservationKey key{obs.country, obs.indicator_id};
    auto [it, inserted] = observations_.emplace(std::move(key), std::move(obs));
    if (!inserted) {
        throw DuplicateDefinition(
            fmt::format("second observation for ({}, {}); one vintage per pair",
                        it->first.first, it->first.second));
    }
}

const IndicatorDefinition *IndicatorDataset::find_definition(std::string_view id) const {
    auto it = definition_index_.find(std::string(id));
    if (it == definition_index_.end()) return nullptr;
    return &definitions_[it->second];
}

const CountryObservation *IndicatorDataset::find_observation(std::string_view country,
                                                             std::string_view indicator_id) const {
    auto it = observations_.find({std::string(country), std::string(indicator_id)});
    if (it == observations_.end()) return nullptr;
    return &it->second;
}

std::vector<std::string> IndicatorDataset::countries() const {
    std::set<std::string> seen;
    for (const auto &[key, obs] : observations_) {
        seen.insert(key.first);
    }
    return {seen.begin(), seen.end()};
}

IndicatorDataset parse_indicator_dataset_text(std::string_view indicators_text,
                                              std::string_view observations_text) {
    static const std::vector<std::string> kIndicatorHeader = {
        "indicator_id", "pillar", "element", "label", "unit", "polarity", "source_label"};
    static const std::vector<std::string> kObservationHeader = {"country", "indicator_id",
                                                                "value", "reference_year"};

    IndicatorDataset dataset;

    const auto ind_rows = require_header(csv::parse(indicators_text), kIndicatorHeader,
                                         "indicators");
    for (std::size_t i = 1; i < ind_rows.size(); ++i) {
        const auto &row = ind_rows[i];
        if (row.fields.size() != kIndicatorHeader.size()) {
            throw MalformedRow(fmt::format("line {}: expected {} columns, got {}", row.line_no,
                                           kIndicatorHeader.size(), row.fields.size()),
                               row.line_no, "row");
        }
        IndicatorDefinition def;
        def.id = row.fields[0];
        if (def.id.empty()) {
            throw MalformedRow(fmt::format("line {}: empty indicator_id", row.line_no),
                               row.line_no, "indicator_id");
        }
        auto pillar = pillar_from_string(row.fields[1]);
        if (!pillar) {
            throw MalformedRow(fmt::format("line {}: unknown pillar '{}'", row.line_no,
                                           row.fields[1]),
                               row.line_no, "pillar");
        }
        def.pillar = *pillar;
        def.element = row.fields[2];
        def.label = row.fields[3];
        def.unit = row.fields[4];
        auto polarity = polarity_from_string(row.fields[5]);
        if (!polarity) {
            throw MalformedRow(fmt::format("line {}: unknown polarity '{}'", row.line_no,
                                           row.fields[5]),
                               row.line_no, "polarity");
        }
        def.polarity = *polarity;
        def.source_label = row.fields[6];
        dataset.add_definition(std::move(def));
    }

    const auto obs_rows = require_header(csv::parse(observations_text), kObservationHeader,
                                         "observations");
    for (std::size_t i = 1; i < obs_rows.size(); ++i) {
        const auto &row = obs_rows[i];
        if (row.fields.size() != kObservationHeader.size()) {
            throw MalformedRow(fmt::format("line {}: expected {} columns, got {}", row.line_no,
                                           kObservationHeader.size(), row.fields.size()),
                               row.line_no, "row");
        }
        CountryObservation obs;
        obs.country = row.fields[0];
        if (obs.country.size() != 2) {
            throw MalformedRow(fmt::format("line {}: '{}' is not an ISO alpha-2 code",
                                           row.line_no, obs.country),
                               row.line_no, "country");
        }
        obs.indicator_id = row.fields[1];
        const std::string &cell = row.fields[2];
        if (cell.empty() || cell == "NA") {
            obs.value = std::nullopt;
        } else {
            obs.value = csv::parse_double(cell, row.line_no, "value");
        }
        obs.reference_year =
            static_cast<int>(csv::parse_int(row.fields[3], row.line_no, "reference_year"));
        dataset.add_observation(std::move(obs));
    }
    return dataset;
}

IndicatorDataset parse_indicator_dataset(const std::filesystem::path &indicators_csv,
                                         const std::filesystem::path &observations_csv) {
    return parse_indicator_dataset_text(read_text_file(indicators_csv),
                                        read_text_file(observations_csv));
}

std::string serialize_indicators(const IndicatorDataset &dataset) {
    std::string out = "indicator_id,pillar,element,label,unit,polarity,source_label\n";
    for (const auto &def : dataset.definitions()) {
        out += csv::join_row({def.id, std::string(to_string(def.pillar)), def.element, def.label,
                              def.unit, std::string(to_string(def.polarity)), def.source_label});
        out += '\n';
    }
    return out;
}

std::string serialize_observations(const IndicatorDataset &dataset) {
    std::string out = "country,indicator_id,value,reference_year\n";
    for (const auto &[key, obs] : dataset.observations()) {
        out += csv::join_row({obs.country, obs.indicator_id,
                              obs.value ? csv::format_shortest(*obs.value) : "NA",
                              std::to_string(obs.reference_year)});
        out += '\n';
    }
    return out;
}

void write_indicator_dataset(const IndicatorDataset &dataset,
                             const std::filesystem::path &indicators_csv,
                             const std::filesystem::path &observations_csv) {
    std::ofstream ind(indicators_csv, std::ios::binary);
    if (!ind) throw IoError(fmt::format("cannot open '{}' for writing", indicators_csv.string()));
    ind << serialize_indicators(dataset);
    std::ofstream obs(observations_csv, std::ios::binary);
    if (!obs) {
        throw IoError(fmt::format("cannot open '{}' for writing", observations_csv.string()));
    }
    obs << serialize_observations(dataset);
}

namespace {

double require_number(const nlohmann::json &doc, const std::string &key,
                      const std::string &origin) {
    if (!doc.contains(key)) {
        throw MissingField(fmt::format("{}: missing required field '{}'", origin, key));
    }
    if (!doc[key].is_number()) {
        throw RangeViolation(fmt::format("{}: field '{}' must be a number", origin, key));
    }
    return doc[key].get<double>();
}

std::string require_string(const nlohmann::json &doc, const std::string &key,
                           const std::string &origin) {
    if (!doc.contains(key)) {
        throw MissingField(fmt::format("{}: missing required field '{}'", origin, key));
    }
    if (!doc[key].is_string()) {
        throw RangeViolation(fmt::format("{}: field '{}' must be a string", origin, key));
    }
    return doc[key].get<std::string>();
}

void check_fraction(double value, const std::string &name, const std::string &origin) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw RangeViolation(
            fmt::format("{}: '{}' = {} outside [0, 1]", origin, name, value));
    }
}

nlohmann::json parse_json_or_throw(std::string_view text, const std::string &origin) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        throw MalformedRow(fmt::format("{}: invalid JSON", origin), 0, "document");
    }
    return doc;
}

} // namespace

CountryProfile parse_country_profile_text(std::string_view json_text, const std::string &origin) {
    const nlohmann::json doc = parse_json_or_throw(json_text, origin);

    CountryProfile profile;
    profile.country = require_string(doc, "country", origin);
    profile.population_total = require_number(doc, "population_total", origin);
    profile.share_under_14 = require_number(doc, "share_under_14", origin);
    profile.share_over_64 = doc.contains("share_over_64")
                                ? require_number(doc, "share_over_64", origin)
                                : 0.0;

    const bool has_urban = doc.contains("urban_share");
    const bool has_rural = doc.contains("rural_share");
    if (!has_urban && !has_rural) {
        throw MissingField(fmt::format("{}: needs 'urban_share' or 'rural_share'", origin));
    }
    if (has_urban) profile.urban_share = require_number(doc, "urban_share", origin);
    if (has_rural) profile.rural_share = require_number(doc, "rural_share", origin);
    if (!has_rural) profile.rural_share = 1.0 - profile.urban_share;
    if (!has_urban) profile.urban_share = 1.0 - profile.rural_share;

    profile.basket_urban_monthly = require_number(doc, "basket_urban_monthly", origin);
    profile.basket_rural_monthly = require_number(doc, "basket_rural_monthly", origin);
    profile.currency_code = require_string(doc, "currency_code", origin);
    profile.fx_to_usd = require_number(doc, "fx_to_usd", origin);

    if (doc.contains("excluded_counts")) {
        for (const auto &entry : doc["excluded_counts"]) {
            profile.excluded_counts.push_back(
                {require_string(entry, "label", origin), require_number(entry, "persons", origin)});
        }
    }
    if (doc.contains("excluded_shares")) {
        for (const auto &entry : doc["excluded_shares"]) {
            profile.excluded_shares.push_back(
                {require_string(entry, "label", origin), require_number(entry, "share", origin)});
        }
    }

    validate_profile(profile);
    return profile;
}

CountryProfile parse_country_profile(const std::filesystem::path &path) {
    return parse_country_profile_text(read_text_file(path), path.string());
}

void validate_profile(const CountryProfile &profile) {
    const std::string origin = profile.country.empty() ? "profile" : profile.country;
    if (profile.population_total < 0) {
        throw RangeViolation(fmt::format("{}: population_total must be >= 0", origin));
    }
    check_fraction(profile.share_under_14, "share_under_14", origin);
    check_fraction(profile.share_over_64, "share_over_64", origin);
    check_fraction(profile.urban_share, "urban_share", origin);
    check_fraction(profile.rural_share, "rural_share", origin);
    if (std::abs(profile.urban_share + profile.rural_share - 1.0) > kShareSumTolerance) {
        throw RangeViolation(fmt::format("{}: urban_share + rural_share = {} but must equal 1",
                                         origin,
                                         profile.urban_share + profile.rural_share));
    }
    if (profile.share_under_14 + profile.share_over_64 > 1.0 + kShareSumTolerance) {
        throw RangeViolation(
            fmt::format("{}: share_under_14 + share_over_64 exceeds 1", origin));
    }
    if (profile.basket_urban_monthly < 0 || profile.basket_rural_monthly < 0) {
        throw RangeViolation(fmt::format("{}: basket prices must be >= 0", origin));
    }
    if (!(profile.fx_to_usd > 0)) {
        throw RangeViolation(fmt::format("{}: fx_to_usd must be > 0", origin));
    }
    for (const auto &entry : profile.excluded_counts) {
        if (entry.persons < 0) {
            throw RangeViolation(
                fmt::format("{}: excluded count '{}' must be >= 0", origin, entry.label));
        }
    }
    for (const auto &entry : profile.excluded_shares) {
        check_fraction(entry.share, fmt::format("excluded share '{}'", entry.label), origin);
    }
}

std::vector<TierRule> default_discount_tiers() {
    return {{1, 3, 0.35}, {4, 6, 0.38}, {7, 10, 0.40}, {11, 13, 0.42}, {14, 16, 0.45},
            {17, 19, 0.50}};
}

void validate_tiers(const std::vector<TierRule> &tiers) {
    if (tiers.empty()) {
        throw ConfigError("discount tier table is empty");
    }
    int expected_lo = 1;
    for (const auto &tier : tiers) {
        if (tier.rank_lo != expected_lo) {
            throw ConfigError(fmt::format(
                "discount tiers must be contiguous: expected a tier starting at rank {}, got {}",
                expected_lo, tier.rank_lo));
        }
        if (tier.rank_hi < tier.rank_lo) {
            throw ConfigError(fmt::format("tier [{}, {}] is inverted", tier.rank_lo, tier.rank_hi));
        }
        if (!(tier.rate > 0.0 && tier.rate <= 1.0)) {
            throw ConfigError(fmt::format("tier rate {} outside (0, 1]", tier.rate));
        }
        expected_lo = tier.rank_hi + 1;
    }
}

void validate_scenario(const ScenarioConfig &config) {
    const std::string origin = config.country.empty() ? "scenario" : config.country;
    check_fraction(config.market_share, "market_share", origin);
    check_fraction(config.initial_capture_rate, "initial_capture_rate", origin);
    check_fraction(config.capture_escalation, "capture_escalation", origin);
    check_fraction(config.initial_revenue_fraction, "initial_revenue_fraction", origin);
    check_fraction(config.revenue_fraction_step, "revenue_fraction_step", origin);
    check_fraction(config.cogs_ratio, "cogs_ratio", origin);
    check_fraction(config.opex_ratio_of_gross, "opex_ratio_of_gross", origin);
    check_fraction(config.tax_rate, "tax_rate", origin);
    if (config.horizon_years < 1) {
        throw RangeViolation(fmt::format("{}: horizon_years must be >= 1", origin));
    }
    validate_tiers(config.discount_tiers);
    for (const auto &tier : config.discount_tiers) {
        if (config.terminal_growth >= tier.rate) {
            throw RangeViolation(fmt::format(
                "{}: terminal_growth {} must stay below every tier rate (tier [{}, {}] = {})",
                origin, config.terminal_growth, tier.rank_lo, tier.rank_hi, tier.rate));
        }
    }
}

ScenarioConfig parse_scenario_config_text(std::string_view json_text, const std::string &origin) {
    const nlohmann::json doc = parse_json_or_throw(json_text, origin);

    ScenarioConfig config;
    if (doc.contains("country")) config.country = require_string(doc, "country", origin);

    auto number = [&](const char *key, double fallback) {
        return doc.contains(key) ? require_number(doc, key, origin) : fallback;
    };
    config.market_share = number("market_share", config.market_share);
    config.initial_capture_rate = number("initial_capture_rate", config.initial_capture_rate);
    config.capture_escalation = number("capture_escalation", config.capture_escalation);
    config.horizon_years =
        static_cast<int>(number("horizon_years", static_cast<double>(config.horizon_years)));
    config.initial_revenue_fraction =
        number("initial_revenue_fraction", config.initial_revenue_fraction);
    config.revenue_fraction_step = number("revenue_fraction_step", config.revenue_fraction_step);
    config.cogs_ratio = number("cogs_ratio", config.cogs_ratio);
    config.opex_ratio_of_gross = number("opex_ratio_of_gross", config.opex_ratio_of_gross);
    config.tax_rate = number("tax_rate", config.tax_rate);
    config.terminal_growth = number("terminal_growth", config.terminal_growth);

    if (doc.contains("discount_tiers")) {
        config.discount_tiers.clear();
        for (const auto &entry : doc["discount_tiers"]) {
            TierRule tier;
            tier.rank_lo = static_cast<int>(require_number(entry, "rank_lo", origin));
            tier.rank_hi = static_cast<int>(require_number(entry, "rank_hi", origin));
            tier.rate = require_number(entry, "rate", origin);
            config.discount_tiers.push_back(tier);
        }
    }

    validate_scenario(config);
    return config;
}

ScenarioConfig parse_scenario_config(const std::filesystem::path &path) {
    return parse_scenario_config_text(read_text_file(path), path.string());
}

ValidationReport validate_dataset(const IndicatorDataset &dataset, double min_coverage) {
    ValidationReport report;
    report.min_coverage = min_coverage;

    std::array<int, 3> pillar_totals = {0, 0, 0};
    for (const auto &def : dataset.definitions()) {
        ++pillar_totals[static_cast<std::size_t>(def.pillar)];
    }
    const int total = static_cast<int>(dataset.definitions().size());

    for (const auto &country : dataset.countries()) {
        CountryCoverage coverage;
        coverage.country = country;
        coverage.total = total;
        std::array<int, 3> pillar_present = {0, 0, 0};
        for (const auto &def : dataset.definitions()) {
            const auto *obs = dataset.find_observation(country, def.id);
            if (obs != nullptr && obs->value.has_value()) {
                ++coverage.present;
                ++pillar_present[static_cast<std::size_t>(def.pillar)];
            }
        }
        for (std::size_t p = 0; p < kAllPillars.size(); ++p) {
            coverage.per_pillar[p] =
                pillar_totals[p] > 0
                    ? static_cast<double>(pillar_present[p]) / pillar_totals[p]
                    : 0.0;
        }
        coverage.overall = total > 0 ? static_cast<double>(coverage.present) / total : 0.0;
        coverage.flagged = coverage.overall < min_coverage;
        report.countries.push_back(std::move(coverage));
    }
    return report;
}

std::optional<std::string> country_code_from_name(std::string_view name) {
    static const std::map<std::string, std::string, std::less<>> kAliases = {
        {"Argentina", "AR"},      {"Bolivia", "BO"},
        {"Brazil", "BR"},         {"Chile", "CL"},
        {"Colombia", "CO"},       {"Costa Rica", "CR"},
        {"Cuba", "CU"},           {"Dominican Republic", "DO"},
        {"Ecuador", "EC"},        {"El Salvador", "SV"},
        {"Guatemala", "GT"},      {"Honduras", "HN"},
        {"Mexico", "MX"},         {"Nicaragua", "NI"},
        {"Panama", "PA"},         {"Paraguay", "PY"},
        {"Peru", "PE"},           {"Uruguay", "UY"},
        {"Venezuela", "VE"},
    };
    if (auto it = kAliases.find(name); it != kAliases.end()) return it->second;
    if (name.size() == 2) {
        std::string code(name);
        for (char &c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        for (const auto &[alias, mapped] : kAliases) {
            if (mapped == code) return code;
        }
    }
    return std::nullopt;
}

} // namespace investval
