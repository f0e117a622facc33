"""Country investability ranking, TAM/SAM/SOM market sizing, and rank-tiered
DCF startup valuation."""

from investval._core import (
    CountryProfile,
    Error,
    ExclusionEntry,
    LabeledCount,
    LabeledShare,
    ProFormaRow,
    RankingRow,
    RankingTable,
    SamBreakdown,
    ScenarioConfig,
    SomSchedule,
    SomYear,
    TamBreakdown,
    TierRule,
    ValuationResult,
    compute_sam,
    compute_som_schedule,
    compute_tam,
    default_data_dir,
    default_discount_tiers,
    discount_rate_for_rank,
    load_country_profile,
    load_ranking_fixture,
    rank_countries,
    run_manifest,
    som_schedule_from_base,
    valuate,
    valuate_revenues,
    zscore_normalize,
)

__all__ = [
    "CountryProfile",
    "Error",
    "ExclusionEntry",
    "LabeledCount",
    "LabeledShare",
    "ProFormaRow",
    "RankingRow",
    "RankingTable",
    "SamBreakdown",
    "ScenarioConfig",
    "SomSchedule",
    "SomYear",
    "TamBreakdown",
    "TierRule",
    "ValuationResult",
    "compute_sam",
    "compute_som_schedule",
    "compute_tam",
    "default_data_dir",
    "default_discount_tiers",
    "discount_rate_for_rank",
    "load_country_profile",
    "load_ranking_fixture",
    "rank_countries",
    "run_manifest",
    "som_schedule_from_base",
    "valuate",
    "valuate_revenues",
    "zscore_normalize",
]
