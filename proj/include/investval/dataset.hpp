#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace investval {

enum class Pillar { Infrastructure, EducationResearch, Economic };

inline constexpr std::array<Pillar, 3> kAllPillars = {
    Pillar::Infrastructure, Pillar::EducationResearch, Pillar::Economic};

std::string_view to_string(Pillar pillar);
std::optional<Pillar> pillar_from_string(std::string_view text);

enum class Polarity { HigherIsBetter, LowerIsBetter };

std::string_view to_string(Polarity polarity);
std::optional<Polarity> polarity_from_string(std::string_view text);

struct IndicatorDefinition {
    std::string id;
    Pillar pillar = Pillar::Infrastructure;
    std::string element;
    std::string label;
    std::string unit;
    Polarity polarity = Polarity::HigherIsBetter;
    std::string source_label;

    bool operator==(const IndicatorDefinition &) const = default;
};

// A single (country, indicator) measurement. Missing data is a first-class
// state carried as nullopt, never as zero.
struct CountryObservation {
    std::string country; // ISO-3166 alpha-2
    std::string indicator_id;
    std::optional<double> value;
    int reference_year = 0;

    bool operator==(const CountryObservation &) const = default;
};

class IndicatorDataset {
  public:
    using ObservationKey = std::pair<std::string, std::string>; // (country, indicator_id)

    // Throws DuplicateDefinition on a repeated id.
    void add_definition(IndicatorDefinition def);

    // Throws UnknownIndicator for undeclared ids and DuplicateDefinition for a
    // second observation of the same (country, indicator) pair.
    void add_observation(CountryObservation obs);

    const std::vector<IndicatorDefinition> &definitions() const { return definitions_; }
    const std::map<ObservationKey, CountryObservation> &observations() const {
        return observations_;
    }

    const IndicatorDefinition *find_definition(std::string_view id) const;
    const CountryObservation *find_observation(std::string_view country,
                                               std::string_view indicator_id) const;

    // Distinct observed countries, sorted.
    std::vector<std::string> countries() const;

    bool operator==(const IndicatorDataset &) const = default;

  private:
    std::vector<IndicatorDefinition> definitions_; // declaration order
    std::map<std::string, std::size_t> definition_index_;
    // Keyed storage keeps aggregation order canonical no matter how the input
    // file was ordered.
    std::map<ObservationKey, CountryObservation> observations_;
};

// Loads the two-file dataset described in the docs:
//   indicators.csv:   indicator_id,pillar,element,label,unit,polarity,source_label
//   observations.csv: country,indicator_id,value,reference_year
// "NA" (case-sensitive) and empty value cells parse as missing.
IndicatorDataset parse_indicator_dataset(const std::filesystem::path &indicators_csv,
                                         const std::filesystem::path &observations_csv);

IndicatorDataset parse_indicator_dataset_text(std::string_view indicators_text,
                                              std::string_view observations_text);

// Lossless serialization; parse(serialize(d)) == d.
std::string serialize_indicators(const IndicatorDataset &dataset);
std::string serialize_observations(const IndicatorDataset &dataset);
void write_indicator_dataset(const IndicatorDataset &dataset,
                             const std::filesystem::path &indicators_csv,
                             const std::filesystem::path &observations_csv);

struct LabeledCount {
    std::string label;
    double persons = 0.0;

    bool operator==(const LabeledCount &) const = default;
};

struct LabeledShare {
    std::string label;
    double share = 0.0;

    bool operator==(const LabeledShare &) const = default;
};

// Demographic and price inputs for one country's market funnel.
struct CountryProfile {
    std::string country;
    double population_total = 0.0;
    double share_under_14 = 0.0;
    double share_over_64 = 0.0;
    double urban_share = 0.0;
    double rural_share = 0.0;
    double basket_urban_monthly = 0.0; // local currency per person-month
    double basket_rural_monthly = 0.0;
    std::string currency_code;
    double fx_to_usd = 1.0; // local-currency units per USD
    std::vector<LabeledCount> excluded_counts;
    std::vector<LabeledShare> excluded_shares;
};

// Throws MissingField / RangeViolation. Fills rural_share (or urban_share)
// as the complement when only one of the pair is given.
CountryProfile parse_country_profile(const std::filesystem::path &path);
CountryProfile parse_country_profile_text(std::string_view json_text,
                                          const std::string &origin = "profile");
void validate_profile(const CountryProfile &profile);

struct TierRule {
    int rank_lo = 0;
    int rank_hi = 0;
    double rate = 0.0;

    bool operator==(const TierRule &) const = default;
};

// Rank-band discount rates: 1-3 35%, 4-6 38%, 7-10 40%, 11-13 42%,
// 14-16 45%, 17-19 50%.
std::vector<TierRule> default_discount_tiers();

// Tiers must be contiguous from rank 1, non-overlapping, rates in (0, 1].
void validate_tiers(const std::vector<TierRule> &tiers);

// All modelling knobs for one valuation run.
struct ScenarioConfig {
    std::string country;
    double market_share = 0.10;
    double initial_capture_rate = 0.005;
    double capture_escalation = 0.10; // per year, relative
    int horizon_years = 5;
    double initial_revenue_fraction = 0.10;
    double revenue_fraction_step = 0.01; // percentage points per year
    double cogs_ratio = 0.25;
    double opex_ratio_of_gross = 0.30;
    double tax_rate = 0.30;
    double terminal_growth = 0.0;
    std::vector<TierRule> discount_tiers = default_discount_tiers();
};

// Throws RangeViolation / ConfigError; also checks Gordon validity
// (terminal_growth below every tier rate).
void validate_scenario(const ScenarioConfig &config);

// JSON document with the ScenarioConfig field names; absent keys keep
// defaults. "discount_tiers" is a list of {rank_lo, rank_hi, rate}.
ScenarioConfig parse_scenario_config(const std::filesystem::path &path);
ScenarioConfig parse_scenario_config_text(std::string_view json_text,
                                          const std::string &origin = "scenario");

struct CountryCoverage {
    std::string country;
    std::array<double, 3> per_pillar = {0.0, 0.0, 0.0}; // indexed as kAllPillars
    double overall = 0.0;
    int present = 0;
    int total = 0;
    bool flagged = false;
};

struct ValidationReport {
    double min_coverage = 0.0;
    std::vector<CountryCoverage> countries; // sorted by country code
};

// Per-country fraction of indicators with a value; coverage below
// min_coverage flags the country but never removes it.
ValidationReport validate_dataset(const IndicatorDataset &dataset, double min_coverage);

// Name -> ISO alpha-2 for the 19 ranked countries; accepts codes verbatim.
std::optional<std::string> country_code_from_name(std::string_view name);

} // namespace investval
