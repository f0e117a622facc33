#pragma once

#include "investval/dataset.hpp"

#include <string>
#include <vector>

namespace investval {

struct TamBreakdown {
    double population_over_14 = 0.0;
    double urban_population = 0.0;
    double rural_population = 0.0;
    double tam_local_annual = 0.0;
    double tam_usd_annual = 0.0;
};

// Annualized basket spend of the over-14 population, urban/rural split.
TamBreakdown compute_tam(const CountryProfile &profile);

struct ExclusionEntry {
    std::string label;
    double persons = 0.0;
};

struct SamBreakdown {
    double eligible_population = 0.0; // negative preserved, never clamped
    double prorated_basket_monthly = 0.0;
    double sam_local_annual = 0.0;
    double sam_usd_annual = 0.0;
    bool nonviable = false; // eligible_population <= 0
    std::vector<ExclusionEntry> exclusions;
};

// Subtracts every exclusion independently from the total population (the
// groups are allowed to overlap and are not corrected for it), then applies
// the urban/rural prorated basket. A non-positive remainder is a flagged
// result, not an error.
SamBreakdown compute_sam(const CountryProfile &profile, const TamBreakdown &tam);

struct SomYear {
    int year = 0;
    double obtainable_usd = 0.0;
    double capture_rate = 0.0; // fraction of the SOM base captured this year
};

struct SomSchedule {
    double som_base_usd = 0.0;
    std::vector<SomYear> years;
};

// obtainable(t) = base * initial_capture_rate * (1 + escalation)^(t-1).
SomSchedule som_schedule_from_base(double som_base_usd, const ScenarioConfig &config,
                                   int start_year);

// SOM base = SAM * market_share.
SomSchedule compute_som_schedule(double sam_usd, const ScenarioConfig &config, int start_year);

} // namespace investval
