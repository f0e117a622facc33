#include "investval/market.hpp"

#include "investval/errors.hpp"

namespace investval {

TamBreakdown compute_tam(const CountryProfile &profile) {
    validate_profile(profile);

    TamBreakdown tam;
    tam.population_over_14 = profile.population_total * (1.0 - profile.share_under_14);
    tam.urban_population = tam.population_over_14 * profile.urban_share;
    tam.rural_population = tam.population_over_14 * profile.rural_share;

    const double monthly = tam.urban_population * profile.basket_urban_monthly +
                           tam.rural_population * profile.basket_rural_monthly;
    tam.tam_local_annual = monthly * 12.0;
    tam.tam_usd_annual = tam.tam_local_annual / profile.fx_to_usd;
    return tam;
}

SamBreakdown compute_sam(const CountryProfile &profile, const TamBreakdown &tam) {
    validate_profile(profile);

    SamBreakdown sam;
    // Each group is removed from the *total* population independently.
    // Overlapping membership (e.g. a person both under 14 and without
    // internet access) is therefore subtracted more than once; the method
    // accepts that bias as a conservative narrowing of the market.
    sam.exclusions.push_back({"under_14", profile.population_total * profile.share_under_14});
    sam.exclusions.push_back({"over_64", profile.population_total * profile.share_over_64});
    for (const auto &count : profile.excluded_counts) {
        sam.exclusions.push_back({count.label, count.persons});
    }
    for (const auto &share : profile.excluded_shares) {
        sam.exclusions.push_back({share.label, profile.population_total * share.share});
    }

    double remaining = profile.population_total;
    for (const auto &entry : sam.exclusions) {
        remaining -= entry.persons;
    }
    sam.eligible_population = remaining;
    sam.nonviable = !(remaining > 0.0);

    sam.prorated_basket_monthly = profile.urban_share * profile.basket_urban_monthly +
                                  profile.rural_share * profile.basket_rural_monthly;
    sam.sam_local_annual = sam.eligible_population * sam.prorated_basket_monthly * 12.0;
    sam.sam_usd_annual = sam.sam_local_annual / profile.fx_to_usd;
    return sam;
}

SomSchedule som_schedule_from_base(double som_base_usd, const ScenarioConfig &config,
                                   int start_year) {
    validate_scenario(config);

    SomSchedule schedule;
    schedule.som_base_usd = som_base_usd;
    schedule.years.reserve(static_cast<std::size_t>(config.horizon_years));
    // capture_rate(t+1) = capture_rate(t) * (1 + escalation), applied as a
    // running product so consecutive years hold the recurrence to the ulp.
    double rate = config.initial_capture_rate;
    for (int t = 1; t <= config.horizon_years; ++t) {
        SomYear year;
        year.year = start_year + (t - 1);
        year.capture_rate = rate;
        year.obtainable_usd = som_base_usd * rate;
        schedule.years.push_back(year);
        rate *= 1.0 + config.capture_escalation;
    }
    return schedule;
}

SomSchedule compute_som_schedule(double sam_usd, const ScenarioConfig &config, int start_year) {
    return som_schedule_from_base(sam_usd * config.market_share, config, start_year);
}

} // namespace investval
