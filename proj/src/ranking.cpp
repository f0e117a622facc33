#include "investval/ranking.hpp"
#include "investval/csv.hpp"
#include "investval/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace investval {

ZScoreSeries zscore_normalize(std::span<const std::optional<double>> values) {
    ZScoreSeries result;
    result.z.resize(values.size());

    double sum = 0.0;
    std::size_t available = 0;
    for (const auto &v : values) {
        if (v) {
            sum += *v;
            ++available;
        }
    }
    if (available == 0) {
        throw AllMissing("z-score normalization: series has no available values");
    }
    result.mu = sum / static_cast<double>(available);

    double sq_sum = 0.0;
    for (const auto &v : values) {
        if (v) {
            const double d = *v - result.mu;
            sq_sum += d * d;
        }
    }
    result.sigma = std::sqrt(sq_sum / static_cast<double>(available));
    result.degenerate = result.sigma == 0.0;

    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i]) continue;
        result.z[i] = result.degenerate ? 0.0 : (*values[i] - result.mu) / result.sigma;
    }
    return result;
}

std::optional<std::size_t> NormalizedMatrix::country_index(std::string_view country) const {
    auto it = std::lower_bound(countries.begin(), countries.end(), country);
    if (it == countries.end() || *it != country) return std::nullopt;
    return static_cast<std::size_t>(it - countries.begin());
}

std::optional<std::size_t> NormalizedMatrix::indicator_index(std::string_view indicator_id) const {
    auto it = std::find(indicator_ids.begin(), indicator_ids.end(), indicator_id);
    if (it == indicator_ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - indicator_ids.begin());
}

std::optional<double> NormalizedMatrix::at(std::string_view country,
                                           std::string_view indicator_id) const {
    const auto ci = country_index(country);
    const auto ii = indicator_index(indicator_id);
    if (!ci || !ii) return std::nullopt;
    return z[*ii][*ci];
}

NormalizedMatrix normalize_dataset(const IndicatorDataset &dataset) {
    NormalizedMatrix matrix;
    matrix.countries = dataset.countries();
    matrix.indicator_ids.reserve(dataset.definitions().size());
    for (const auto &def : dataset.definitions()) {
        matrix.indicator_ids.push_back(def.id);
    }

    for (const auto &id : matrix.indicator_ids) {
        std::vector<std::optional<double>> series;
        series.reserve(matrix.countries.size());
        for (const auto &country : matrix.countries) {
            const auto *obs = dataset.find_observation(country, id);
            series.push_back(obs ? obs->value : std::nullopt);
        }
        bool any = std::any_of(series.begin(), series.end(),
                               [](const auto &v) { return v.has_value(); });
        if (!any) {
            // Indicator observed nowhere: keep it as an all-missing column.
            matrix.stats.push_back({0.0, 0.0, true});
            matrix.z.push_back(std::move(series));
            continue;
        }
        auto normalized = zscore_normalize(series);
        matrix.stats.push_back({normalized.mu, normalized.sigma, normalized.degenerate});
        matrix.z.push_back(std::move(normalized.z));
    }
    return matrix;
}

PillarScore pillar_score(const NormalizedMatrix &matrix, const IndicatorDataset &dataset,
                         const std::string &country, Pillar pillar,
                         const std::map<std::string, double> *weights) {
    const auto ci = matrix.country_index(country);
    if (!ci) {
        throw NoDataForPillar(fmt::format("country '{}' not present in the dataset", country));
    }

    double weighted_sum = 0.0;
    double weight_total = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < matrix.indicator_ids.size(); ++i) {
        const auto *def = dataset.find_definition(matrix.indicator_ids[i]);
        if (def == nullptr || def->pillar != pillar) continue;
        const auto &zval = matrix.z[i][*ci];
        if (!zval) continue;
        double w = 1.0;
        if (weights != nullptr) {
            if (auto it = weights->find(def->id); it != weights->end()) w = it->second;
        }
        const double adjusted = def->polarity == Polarity::LowerIsBetter ? -*zval : *zval;
        weighted_sum += w * adjusted;
        weight_total += w;
        ++used;
    }
    if (used == 0 || weight_total == 0.0) {
        throw NoDataForPillar(fmt::format("country '{}' has no available indicator in pillar {}",
                                          country, to_string(pillar)));
    }
    return {country, pillar, weighted_sum / weight_total, used};
}

namespace {

// Descending score; ties by pillar scores in presentation order, then code.
bool ranks_before(const RankingRow &a, const RankingRow &b) {
    if (*a.overall_score != *b.overall_score) return *a.overall_score > *b.overall_score;
    for (std::size_t p = 0; p < kAllPillars.size(); ++p) {
        if (*a.pillar_scores[p] != *b.pillar_scores[p]) {
            return *a.pillar_scores[p] > *b.pillar_scores[p];
        }
    }
    return a.country < b.country;
}

void assign_discount_rates(RankingTable &table, const std::vector<TierRule> &tiers) {
    for (auto &row : table.rows) {
        try {
            row.discount_rate = discount_rate_for_rank(row.overall_rank, tiers);
        } catch (const RankOutOfRange &) {
            row.discount_rate = std::nullopt;
        }
    }
}

} // namespace

RankingTable overall_rank(const std::vector<PillarScore> &scores,
                          const std::vector<TierRule> &tiers) {
    validate_tiers(tiers);

    std::map<std::string, RankingRow> by_country;
    for (const auto &score : scores) {
        auto &row = by_country[score.country];
        row.country = score.country;
        row.pillar_scores[static_cast<std::size_t>(score.pillar)] = score.score;
    }

    RankingTable table;
    for (auto &[country, row] : by_country) {
        const bool complete = std::all_of(row.pillar_scores.begin(), row.pillar_scores.end(),
                                          [](const auto &s) { return s.has_value(); });
        if (!complete) {
            table.excluded.push_back(country);
            continue;
        }
        row.overall_score =
            (*row.pillar_scores[0] + *row.pillar_scores[1] + *row.pillar_scores[2]) / 3.0;
        table.rows.push_back(std::move(row));
    }

    // Per-pillar ranks.
    for (std::size_t p = 0; p < kAllPillars.size(); ++p) {
        std::vector<std::size_t> order(table.rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double sa = *table.rows[a].pillar_scores[p];
            const double sb = *table.rows[b].pillar_scores[p];
            if (sa != sb) return sa > sb;
            return table.rows[a].country < table.rows[b].country;
        });
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            table.rows[order[pos]].pillar_ranks[p] = static_cast<int>(pos + 1);
        }
    }

    std::sort(table.rows.begin(), table.rows.end(), ranks_before);
    for (std::size_t pos = 0; pos < table.rows.size(); ++pos) {
        table.rows[pos].overall_rank = static_cast<int>(pos + 1);
    }
    assign_discount_rates(table, tiers);
    return table;
}

RankingTable rank_dataset(const IndicatorDataset &dataset, const std::vector<TierRule> &tiers,
                          const std::map<std::string, double> *weights) {
    const auto matrix = normalize_dataset(dataset);
    std::vector<PillarScore> scores;
    for (const auto &country : matrix.countries) {
        for (const auto pillar : kAllPillars) {
            try {
                scores.push_back(pillar_score(matrix, dataset, country, pillar, weights));
            } catch (const NoDataForPillar &) {
                // Missing pillar: the country drops out of the overall ranking.
            }
        }
    }
    return overall_rank(scores, tiers);
}

double discount_rate_for_rank(int rank, const std::vector<TierRule> &tiers) {
    for (const auto &tier : tiers) {
        if (rank >= tier.rank_lo && rank <= tier.rank_hi) return tier.rate;
    }
    throw RankOutOfRange(
        fmt::format("rank {} not covered by the discount tier table (1..{})", rank,
                    tiers.empty() ? 0 : tiers.back().rank_hi));
}

RankingTable load_ranking_fixture(const std::filesystem::path &path,
                                  const std::vector<TierRule> &tiers) {
    validate_tiers(tiers);
    static const std::vector<std::string> kHeader = {"country", "name", "infra_rank",
                                                     "edu_rank", "econ_rank", "overall_rank"};
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows.front().fields != kHeader) {
        throw MalformedRow(fmt::format("{}: bad ranking fixture header", path.string()),
                           rows.empty() ? 0 : rows.front().line_no, "header");
    }

    RankingTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto &row = rows[i];
        if (row.fields.size() != kHeader.size()) {
            throw MalformedRow(fmt::format("{} line {}: expected {} columns", path.string(),
                                           row.line_no, kHeader.size()),
                               row.line_no, "row");
        }
        RankingRow entry;
        entry.country = row.fields[0];
        if (entry.country.empty()) {
            auto code = country_code_from_name(row.fields[1]);
            if (!code) {
                throw MalformedRow(fmt::format("{} line {}: unknown country '{}'", path.string(),
                                               row.line_no, row.fields[1]),
                                   row.line_no, "name");
            }
            entry.country = *code;
        }
        for (std::size_t p = 0; p < 3; ++p) {
            entry.pillar_ranks[p] = static_cast<int>(
                csv::parse_int(row.fields[2 + p], row.line_no, kHeader[2 + p]));
        }
        entry.overall_rank =
            static_cast<int>(csv::parse_int(row.fields[5], row.line_no, "overall_rank"));
        table.rows.push_back(std::move(entry));
    }

    std::sort(table.rows.begin(), table.rows.end(),
              [](const RankingRow &a, const RankingRow &b) {
                  return a.overall_rank < b.overall_rank;
              });
    std::set<int> seen;
    for (const auto &row : table.rows) {
        if (!seen.insert(row.overall_rank).second) {
            throw MalformedRow(fmt::format("{}: duplicate overall rank {}", path.string(),
                                           row.overall_rank),
                               0, "overall_rank");
        }
    }
    assign_discount_rates(table, tiers);
    return table;
}

} // namespace investval
