#pragma once

#include "investval/dataset.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace investval {

// One normalized indicator series: z = (x - mu) / sigma over the available
// values, population sigma. Missing positions stay missing.
struct ZScoreSeries {
    std::vector<std::optional<double>> z;
    double mu = 0.0;
    double sigma = 0.0;
    bool degenerate = false; // sigma == 0; all z forced to 0
};

// Throws AllMissing when the series has no available value.
ZScoreSeries zscore_normalize(std::span<const std::optional<double>> values);

struct IndicatorStats {
    double mu = 0.0;
    double sigma = 0.0;
    bool degenerate = false;
};

// Z-values for every (indicator, country) cell of a dataset. Countries are
// sorted, indicators follow catalog order, so results never depend on input
// file ordering.
struct NormalizedMatrix {
    std::vector<std::string> countries;
    std::vector<std::string> indicator_ids;
    std::vector<IndicatorStats> stats;                 // per indicator
    std::vector<std::vector<std::optional<double>>> z; // [indicator][country]

    std::optional<std::size_t> country_index(std::string_view country) const;
    std::optional<std::size_t> indicator_index(std::string_view indicator_id) const;
    std::optional<double> at(std::string_view country, std::string_view indicator_id) const;
};

NormalizedMatrix normalize_dataset(const IndicatorDataset &dataset);

struct PillarScore {
    std::string country;
    Pillar pillar = Pillar::Infrastructure;
    double score = 0.0;
    int indicators_used = 0;
};

// Weighted mean of the country's available z-values in the pillar;
// lower-is-better indicators contribute negated. Weights default to 1.
// Throws NoDataForPillar when nothing is available.
PillarScore pillar_score(const NormalizedMatrix &matrix, const IndicatorDataset &dataset,
                         const std::string &country, Pillar pillar,
                         const std::map<std::string, double> *weights = nullptr);

struct RankingRow {
    std::string country;
    std::array<std::optional<double>, 3> pillar_scores; // indexed as kAllPillars
    std::array<int, 3> pillar_ranks = {0, 0, 0};
    std::optional<double> overall_score;
    int overall_rank = 0;
    std::optional<double> discount_rate; // absent when the tier table does not cover the rank
};

struct RankingTable {
    std::vector<RankingRow> rows;       // sorted by overall_rank
    std::vector<std::string> excluded;  // countries missing at least one pillar, sorted
};

// Ranks countries by the unweighted mean of their three pillar scores,
// descending. Ties break by infrastructure, then education, then economic
// score, then ascending country code. Countries without all three pillar
// scores are excluded and listed.
RankingTable overall_rank(const std::vector<PillarScore> &scores,
                          const std::vector<TierRule> &tiers = default_discount_tiers());

// Full dataset -> ranking pipeline (normalize, score pillars, rank).
RankingTable rank_dataset(const IndicatorDataset &dataset,
                          const std::vector<TierRule> &tiers = default_discount_tiers(),
                          const std::map<std::string, double> *weights = nullptr);

// Returns the rate of the unique tier containing the rank.
double discount_rate_for_rank(int rank, const std::vector<TierRule> &tiers);

// Loads an authoritative ranking (published ranks without scores) from CSV:
//   country,name,infra_rank,edu_rank,econ_rank,overall_rank
RankingTable load_ranking_fixture(const std::filesystem::path &path,
                                  const std::vector<TierRule> &tiers = default_discount_tiers());

} // namespace investval
