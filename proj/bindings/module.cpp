// Python bindings for the investval core: dataset loading, ranking, market
// sizing, and DCF valuation, mirroring the C++ API one to one.

#include "investval/dataset.hpp"
#include "investval/dcf.hpp"
#include "investval/errors.hpp"
#include "investval/market.hpp"
#include "investval/pipeline.hpp"
#include "investval/ranking.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <vector>

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Country investability ranking, TAM/SAM/SOM market sizing, and "
              "rank-tiered DCF valuation";

    py::register_exception<investval::Error>(m, "Error");

    py::class_<investval::TierRule>(m, "TierRule")
        .def(py::init([](int rank_lo, int rank_hi, double rate) {
                 return investval::TierRule{rank_lo, rank_hi, rate};
             }),
             py::arg("rank_lo"), py::arg("rank_hi"), py::arg("rate"))
        .def_readwrite("rank_lo", &investval::TierRule::rank_lo)
        .def_readwrite("rank_hi", &investval::TierRule::rank_hi)
        .def_readwrite("rate", &investval::TierRule::rate)
        .def("__repr__", [](const investval::TierRule &tier) {
            return "TierRule(" + std::to_string(tier.rank_lo) + ", " +
                   std::to_string(tier.rank_hi) + ", " + std::to_string(tier.rate) + ")";
        });

    py::class_<investval::ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("country", &investval::ScenarioConfig::country)
        .def_readwrite("market_share", &investval::ScenarioConfig::market_share)
        .def_readwrite("initial_capture_rate",
                       &investval::ScenarioConfig::initial_capture_rate)
        .def_readwrite("capture_escalation", &investval::ScenarioConfig::capture_escalation)
        .def_readwrite("horizon_years", &investval::ScenarioConfig::horizon_years)
        .def_readwrite("initial_revenue_fraction",
                       &investval::ScenarioConfig::initial_revenue_fraction)
        .def_readwrite("revenue_fraction_step",
                       &investval::ScenarioConfig::revenue_fraction_step)
        .def_readwrite("cogs_ratio", &investval::ScenarioConfig::cogs_ratio)
        .def_readwrite("opex_ratio_of_gross", &investval::ScenarioConfig::opex_ratio_of_gross)
        .def_readwrite("tax_rate", &investval::ScenarioConfig::tax_rate)
        .def_readwrite("terminal_growth", &investval::ScenarioConfig::terminal_growth)
        .def_readwrite("discount_tiers", &investval::ScenarioConfig::discount_tiers);

    py::class_<investval::LabeledCount>(m, "LabeledCount")
        .def(py::init([](std::string label, double persons) {
                 return investval::LabeledCount{std::move(label), persons};
             }),
             py::arg("label"), py::arg("persons"))
        .def_readwrite("label", &investval::LabeledCount::label)
        .def_readwrite("persons", &investval::LabeledCount::persons);

    py::class_<investval::LabeledShare>(m, "LabeledShare")
        .def(py::init([](std::string label, double share) {
                 return investval::LabeledShare{std::move(label), share};
             }),
             py::arg("label"), py::arg("share"))
        .def_readwrite("label", &investval::LabeledShare::label)
        .def_readwrite("share", &investval::LabeledShare::share);

    py::class_<investval::CountryProfile>(m, "CountryProfile")
        .def(py::init<>())
        .def_readwrite("country", &investval::CountryProfile::country)
        .def_readwrite("population_total", &investval::CountryProfile::population_total)
        .def_readwrite("share_under_14", &investval::CountryProfile::share_under_14)
        .def_readwrite("share_over_64", &investval::CountryProfile::share_over_64)
        .def_readwrite("urban_share", &investval::CountryProfile::urban_share)
        .def_readwrite("rural_share", &investval::CountryProfile::rural_share)
        .def_readwrite("basket_urban_monthly",
                       &investval::CountryProfile::basket_urban_monthly)
        .def_readwrite("basket_rural_monthly",
                       &investval::CountryProfile::basket_rural_monthly)
        .def_readwrite("currency_code", &investval::CountryProfile::currency_code)
        .def_readwrite("fx_to_usd", &investval::CountryProfile::fx_to_usd)
        .def_readwrite("excluded_counts", &investval::CountryProfile::excluded_counts)
        .def_readwrite("excluded_shares", &investval::CountryProfile::excluded_shares);

    py::class_<investval::TamBreakdown>(m, "TamBreakdown")
        .def_readonly("population_over_14", &investval::TamBreakdown::population_over_14)
        .def_readonly("urban_population", &investval::TamBreakdown::urban_population)
        .def_readonly("rural_population", &investval::TamBreakdown::rural_population)
        .def_readonly("tam_local_annual", &investval::TamBreakdown::tam_local_annual)
        .def_readonly("tam_usd_annual", &investval::TamBreakdown::tam_usd_annual);

    py::class_<investval::ExclusionEntry>(m, "ExclusionEntry")
        .def_readonly("label", &investval::ExclusionEntry::label)
        .def_readonly("persons", &investval::ExclusionEntry::persons);

    py::class_<investval::SamBreakdown>(m, "SamBreakdown")
        .def_readonly("eligible_population", &investval::SamBreakdown::eligible_population)
        .def_readonly("prorated_basket_monthly",
                      &investval::SamBreakdown::prorated_basket_monthly)
        .def_readonly("sam_local_annual", &investval::SamBreakdown::sam_local_annual)
        .def_readonly("sam_usd_annual", &investval::SamBreakdown::sam_usd_annual)
        .def_readonly("nonviable", &investval::SamBreakdown::nonviable)
        .def_readonly("exclusions", &investval::SamBreakdown::exclusions);

    py::class_<investval::SomYear>(m, "SomYear")
        .def_readonly("year", &investval::SomYear::year)
        .def_readonly("obtainable_usd", &investval::SomYear::obtainable_usd)
        .def_readonly("capture_rate", &investval::SomYear::capture_rate);

    py::class_<investval::SomSchedule>(m, "SomSchedule")
        .def_readonly("som_base_usd", &investval::SomSchedule::som_base_usd)
        .def_readonly("years", &investval::SomSchedule::years);

    py::class_<investval::ProFormaRow>(m, "ProFormaRow")
        .def_readonly("year", &investval::ProFormaRow::year)
        .def_readonly("revenue", &investval::ProFormaRow::revenue)
        .def_readonly("cogs", &investval::ProFormaRow::cogs)
        .def_readonly("gross_profit", &investval::ProFormaRow::gross_profit)
        .def_readonly("opex", &investval::ProFormaRow::opex)
        .def_readonly("operating_income", &investval::ProFormaRow::operating_income)
        .def_readonly("taxes", &investval::ProFormaRow::taxes)
        .def_readonly("cash_flow", &investval::ProFormaRow::cash_flow)
        .def_readonly("pv_cash_flow", &investval::ProFormaRow::pv_cash_flow);

    py::class_<investval::ValuationResult>(m, "ValuationResult")
        .def_readonly("rows", &investval::ValuationResult::rows)
        .def_readonly("discount_rate", &investval::ValuationResult::discount_rate)
        .def_readonly("terminal_value", &investval::ValuationResult::terminal_value)
        .def_readonly("pv_terminal_value", &investval::ValuationResult::pv_terminal_value)
        .def_readonly("pv_explicit", &investval::ValuationResult::pv_explicit)
        .def_readonly("total_present_value",
                      &investval::ValuationResult::total_present_value)
        .def_readonly("assumptions", &investval::ValuationResult::assumptions);

    py::class_<investval::RankingRow>(m, "RankingRow")
        .def_readonly("country", &investval::RankingRow::country)
        .def_readonly("pillar_scores", &investval::RankingRow::pillar_scores)
        .def_readonly("pillar_ranks", &investval::RankingRow::pillar_ranks)
        .def_readonly("overall_score", &investval::RankingRow::overall_score)
        .def_readonly("overall_rank", &investval::RankingRow::overall_rank)
        .def_readonly("discount_rate", &investval::RankingRow::discount_rate);

    py::class_<investval::RankingTable>(m, "RankingTable")
        .def_readonly("rows", &investval::RankingTable::rows)
        .def_readonly("excluded", &investval::RankingTable::excluded);

    m.def("default_discount_tiers", &investval::default_discount_tiers);
    m.def(
        "discount_rate_for_rank",
        [](int rank, std::optional<std::vector<investval::TierRule>> tiers) {
            return investval::discount_rate_for_rank(
                rank, tiers.has_value() ? *tiers : investval::default_discount_tiers());
        },
        py::arg("rank"), py::arg("tiers") = py::none());

    m.def(
        "zscore_normalize",
        [](const std::vector<std::optional<double>> &values) {
            const auto result = investval::zscore_normalize(values);
            return py::make_tuple(result.z, result.mu, result.sigma, result.degenerate);
        },
        py::arg("values"),
        "Returns (z_values, mu, sigma, degenerate); missing entries stay None");

    m.def(
        "rank_countries",
        [](const std::filesystem::path &indicators, const std::filesystem::path &observations,
           std::optional<std::vector<investval::TierRule>> tiers) {
            const auto dataset = investval::parse_indicator_dataset(indicators, observations);
            return investval::rank_dataset(
                dataset, tiers.has_value() ? *tiers : investval::default_discount_tiers());
        },
        py::arg("indicators"), py::arg("observations"), py::arg("tiers") = py::none());

    m.def("load_ranking_fixture",
          [](const std::filesystem::path &path) {
              return investval::load_ranking_fixture(path);
          },
          py::arg("path"));

    m.def("load_country_profile", &investval::parse_country_profile, py::arg("path"));
    m.def("compute_tam", &investval::compute_tam, py::arg("profile"));
    m.def("compute_sam", &investval::compute_sam, py::arg("profile"), py::arg("tam"));
    m.def("compute_som_schedule", &investval::compute_som_schedule, py::arg("sam_usd"),
          py::arg("config"), py::arg("start_year"));
    m.def("som_schedule_from_base", &investval::som_schedule_from_base,
          py::arg("som_base_usd"), py::arg("config"), py::arg("start_year"));

    m.def("valuate", &investval::valuate, py::arg("schedule"), py::arg("rank"),
          py::arg("config"), py::arg("tv_override") = py::none());
    m.def("valuate_revenues", &investval::valuate_revenues, py::arg("revenues"),
          py::arg("rank"), py::arg("config"), py::arg("start_year"),
          py::arg("tv_override") = py::none());

    m.def("default_data_dir", &investval::default_data_dir);
    m.def(
        "run_manifest",
        [](const std::filesystem::path &path, const std::string &mode) {
            investval::RunMode run_mode = investval::RunMode::Full;
            if (mode == "rank") {
                run_mode = investval::RunMode::Rank;
            } else if (mode == "size") {
                run_mode = investval::RunMode::Size;
            } else if (mode != "full") {
                throw investval::ConfigError("mode must be rank, size, or full");
            }
            const auto summary =
                investval::run_pipeline(investval::load_manifest(path), run_mode);
            std::vector<std::string> files;
            files.reserve(summary.files_written.size());
            for (const auto &file : summary.files_written) {
                files.push_back(file.string());
            }
            return files;
        },
        py::arg("path"), py::arg("mode") = "full",
        "Runs a manifest and returns the list of files written");
}
