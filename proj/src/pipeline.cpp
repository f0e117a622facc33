#include "investval/pipeline.hpp"

#include "investval/csv.hpp"
#include "investval/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace investval {

namespace {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError(fmt::format("failed reading {}", path.string()));
    }
    return buffer.str();
}

json parse_json(std::string_view text, const std::string &origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &err) {
        throw ParseError(fmt::format("{}: invalid JSON: {}", origin, err.what()));
    }
}

void reject_unknown_keys(const json &obj, std::initializer_list<const char *> allowed,
                         const std::string &origin, const std::string &where) {
    for (const auto &item : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char *key) {
                return item.key() == key;
            }) == allowed.end()) {
            throw ConfigError(
                fmt::format("{}: unknown key \"{}\" in {}", origin, item.key(), where));
        }
    }
}

double require_finite_number(const json &value, const std::string &origin,
                             const std::string &where) {
    if (!value.is_number()) {
        throw ConfigError(fmt::format("{}: {} must be a number", origin, where));
    }
    const double v = value.get<double>();
    if (!std::isfinite(v)) {
        throw ConfigError(fmt::format("{}: {} must be finite", origin, where));
    }
    return v;
}

std::filesystem::path resolve_path(const std::filesystem::path &path,
                                   const std::filesystem::path &base_dir) {
    if (path.is_absolute()) {
        return path.lexically_normal();
    }
    return (base_dir / path).lexically_normal();
}

std::string normalized_country(const std::string &raw, const std::string &origin) {
    auto code = country_code_from_name(raw);
    if (!code.has_value()) {
        throw ConfigError(fmt::format("{}: unknown country \"{}\"", origin, raw));
    }
    return *code;
}

std::string lowercase(std::string text) {
    for (char &c : text) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return text;
}

CountryOverrides parse_overrides_entry(const json &obj, const std::string &origin,
                                       const std::string &country) {
    if (!obj.is_object()) {
        throw ConfigError(
            fmt::format("{}: overrides.{} must be an object", origin, country));
    }
    const std::string where = fmt::format("overrides.{}", country);
    reject_unknown_keys(obj, {"som_base_usd", "revenues", "terminal_value", "market_share"},
                        origin, where);
    CountryOverrides overrides;
    if (obj.contains("som_base_usd")) {
        overrides.som_base_usd =
            require_finite_number(obj["som_base_usd"], origin, where + ".som_base_usd");
    }
    if (obj.contains("revenues")) {
        const auto &arr = obj["revenues"];
        if (!arr.is_array() || arr.empty()) {
            throw ConfigError(
                fmt::format("{}: {}.revenues must be a nonempty array", origin, where));
        }
        std::vector<double> revenues;
        revenues.reserve(arr.size());
        for (const auto &value : arr) {
            revenues.push_back(require_finite_number(value, origin, where + ".revenues[]"));
        }
        overrides.revenues = std::move(revenues);
    }
    if (obj.contains("terminal_value")) {
        overrides.terminal_value =
            require_finite_number(obj["terminal_value"], origin, where + ".terminal_value");
    }
    if (obj.contains("market_share")) {
        overrides.market_share =
            require_finite_number(obj["market_share"], origin, where + ".market_share");
    }
    return overrides;
}

} // namespace

std::filesystem::path default_data_dir() {
    if (const char *env = std::getenv("INVESTVAL_DATA_DIR"); env != nullptr && *env != '\0') {
        return std::filesystem::path(env);
    }
#ifdef INVESTVAL_SOURCE_DATA_DIR
    return std::filesystem::path(INVESTVAL_SOURCE_DATA_DIR);
#else
    return std::filesystem::path("data");
#endif
}

RunManifest load_manifest_text(std::string_view json_text,
                               const std::filesystem::path &base_dir,
                               const std::string &origin) {
    const json doc = parse_json(json_text, origin);
    if (!doc.is_object()) {
        throw ConfigError(fmt::format("{}: manifest must be a JSON object", origin));
    }
    reject_unknown_keys(doc,
                        {"data", "scenario", "countries", "out_dir", "start_year", "jobs",
                         "formats", "overrides", "sweep"},
                        origin, "manifest");

    RunManifest manifest;
    const auto data_dir = default_data_dir();
    manifest.indicators_path = data_dir / "indicators.csv";
    manifest.observations_path = data_dir / "observations.csv";
    manifest.profiles_dir = data_dir / "profiles";

    if (doc.contains("data")) {
        const auto &data = doc["data"];
        if (!data.is_object()) {
            throw ConfigError(fmt::format("{}: \"data\" must be an object", origin));
        }
        reject_unknown_keys(
            data, {"indicators", "observations", "profiles_dir", "ranking_fixture"}, origin,
            "data");
        const auto path_field = [&](const char *key) -> std::optional<std::filesystem::path> {
            if (!data.contains(key)) {
                return std::nullopt;
            }
            if (!data[key].is_string()) {
                throw ConfigError(fmt::format("{}: data.{} must be a string", origin, key));
            }
            return resolve_path(data[key].get<std::string>(), base_dir);
        };
        if (auto p = path_field("indicators")) manifest.indicators_path = *p;
        if (auto p = path_field("observations")) manifest.observations_path = *p;
        if (auto p = path_field("profiles_dir")) manifest.profiles_dir = *p;
        manifest.ranking_fixture_path = path_field("ranking_fixture");
    }

    if (doc.contains("scenario")) {
        const auto &scenario = doc["scenario"];
        if (scenario.is_string()) {
            manifest.scenario =
                parse_scenario_config(resolve_path(scenario.get<std::string>(), base_dir));
        } else if (scenario.is_object()) {
            manifest.scenario =
                parse_scenario_config_text(scenario.dump(), origin + ":scenario");
        } else {
            throw ConfigError(
                fmt::format("{}: \"scenario\" must be a path or an object", origin));
        }
    }

    if (doc.contains("countries")) {
        const auto &countries = doc["countries"];
        if (!countries.is_array()) {
            throw ConfigError(fmt::format("{}: \"countries\" must be an array", origin));
        }
        for (const auto &entry : countries) {
            if (!entry.is_string()) {
                throw ConfigError(
                    fmt::format("{}: \"countries\" entries must be strings", origin));
            }
            manifest.countries.push_back(normalized_country(entry.get<std::string>(), origin));
        }
    }

    if (doc.contains("out_dir")) {
        if (!doc["out_dir"].is_string()) {
            throw ConfigError(fmt::format("{}: \"out_dir\" must be a string", origin));
        }
        manifest.out_dir = std::filesystem::path(doc["out_dir"].get<std::string>());
    }

    if (doc.contains("start_year")) {
        if (!doc["start_year"].is_number_integer()) {
            throw ConfigError(fmt::format("{}: \"start_year\" must be an integer", origin));
        }
        manifest.start_year = doc["start_year"].get<int>();
        if (manifest.start_year < 1) {
            throw ConfigError(fmt::format("{}: \"start_year\" must be positive", origin));
        }
    }

    if (doc.contains("jobs")) {
        if (!doc["jobs"].is_number_integer()) {
            throw ConfigError(fmt::format("{}: \"jobs\" must be an integer", origin));
        }
        manifest.jobs = doc["jobs"].get<int>();
        if (manifest.jobs < 1) {
            throw ConfigError(fmt::format("{}: \"jobs\" must be at least 1", origin));
        }
    }

    if (doc.contains("formats")) {
        const auto &formats = doc["formats"];
        if (!formats.is_array() || formats.empty()) {
            throw ConfigError(
                fmt::format("{}: \"formats\" must be a nonempty array", origin));
        }
        manifest.write_csv = false;
        manifest.write_json = false;
        for (const auto &entry : formats) {
            const std::string name = entry.is_string() ? entry.get<std::string>() : "";
            if (name == "csv") {
                manifest.write_csv = true;
            } else if (name == "json") {
                manifest.write_json = true;
            } else {
                throw ConfigError(fmt::format(
                    "{}: \"formats\" entries must be \"csv\" or \"json\"", origin));
            }
        }
    }

    if (doc.contains("overrides")) {
        const auto &overrides = doc["overrides"];
        if (!overrides.is_object()) {
            throw ConfigError(fmt::format("{}: \"overrides\" must be an object", origin));
        }
        for (const auto &item : overrides.items()) {
            const std::string code = normalized_country(item.key(), origin);
            manifest.overrides[code] = parse_overrides_entry(item.value(), origin, code);
        }
    }

    if (doc.contains("sweep")) {
        const auto &sweep = doc["sweep"];
        if (!sweep.is_array()) {
            throw ConfigError(fmt::format("{}: \"sweep\" must be an array", origin));
        }
        for (const auto &entry : sweep) {
            if (!entry.is_object()) {
                throw ConfigError(fmt::format("{}: sweep entries must be objects", origin));
            }
            reject_unknown_keys(entry, {"parameter", "values"}, origin, "sweep entry");
            if (!entry.contains("parameter") || !entry["parameter"].is_string()) {
                throw ConfigError(
                    fmt::format("{}: sweep entries need a string \"parameter\"", origin));
            }
            if (!entry.contains("values") || !entry["values"].is_array() ||
                entry["values"].empty()) {
                throw ConfigError(fmt::format(
                    "{}: sweep entries need a nonempty \"values\" array", origin));
            }
            SweepAxis axis;
            axis.parameter = entry["parameter"].get<std::string>();
            for (const auto &value : entry["values"]) {
                axis.values.push_back(require_finite_number(
                    value, origin, fmt::format("sweep values for {}", axis.parameter)));
            }
            manifest.sweep_axes.push_back(std::move(axis));
        }
    }

    return manifest;
}

RunManifest load_manifest(const std::filesystem::path &path) {
    return load_manifest_text(read_text_file(path), path.parent_path(), path.string());
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)> &fn) {
    if (count == 0) {
        return;
    }
    const std::size_t workers =
        std::min(count, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    break;
                }
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto &thread : pool) {
        thread.join();
    }
    // Rethrow the failure of the lowest index so the reported error does not
    // depend on thread scheduling.
    for (auto &error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

namespace {

std::vector<std::string> select_countries(const RunManifest &manifest) {
    if (!manifest.countries.empty()) {
        std::vector<std::string> countries = manifest.countries;
        std::sort(countries.begin(), countries.end());
        countries.erase(std::unique(countries.begin(), countries.end()), countries.end());
        return countries;
    }
    if (!std::filesystem::is_directory(manifest.profiles_dir)) {
        throw ConfigError(fmt::format("profile directory {} does not exist",
                                      manifest.profiles_dir.string()));
    }
    std::vector<std::string> countries;
    for (const auto &entry : std::filesystem::directory_iterator(manifest.profiles_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") {
            continue;
        }
        const std::string stem = entry.path().stem().string();
        if (stem.size() != 2 ||
            !std::isalpha(static_cast<unsigned char>(stem[0])) ||
            !std::isalpha(static_cast<unsigned char>(stem[1]))) {
            continue;
        }
        std::string code;
        code += static_cast<char>(std::toupper(static_cast<unsigned char>(stem[0])));
        code += static_cast<char>(std::toupper(static_cast<unsigned char>(stem[1])));
        countries.push_back(code);
    }
    if (countries.empty()) {
        throw ConfigError(fmt::format("no country profiles found under {}",
                                      manifest.profiles_dir.string()));
    }
    std::sort(countries.begin(), countries.end());
    return countries;
}

RankingTable make_ranking(const RunManifest &manifest) {
    if (manifest.ranking_fixture_path.has_value()) {
        return load_ranking_fixture(*manifest.ranking_fixture_path,
                                    manifest.scenario.discount_tiers);
    }
    const auto dataset =
        parse_indicator_dataset(manifest.indicators_path, manifest.observations_path);
    return rank_dataset(dataset, manifest.scenario.discount_tiers);
}

int rank_for_country(const RankingTable &ranking, const std::string &country) {
    for (const auto &row : ranking.rows) {
        if (row.country == country) {
            return row.overall_rank;
        }
    }
    throw ConfigError(fmt::format("country {} does not appear in the ranking", country));
}

ScenarioConfig scenario_for_country(const RunManifest &manifest, const std::string &country) {
    ScenarioConfig scenario = manifest.scenario;
    scenario.country = country;
    if (const auto it = manifest.overrides.find(country); it != manifest.overrides.end()) {
        if (it->second.market_share.has_value()) {
            scenario.market_share = *it->second.market_share;
        }
    }
    validate_scenario(scenario);
    return scenario;
}

CountryProfile load_profile(const RunManifest &manifest, const std::string &country) {
    const auto path = manifest.profiles_dir / (lowercase(country) + ".json");
    auto profile = parse_country_profile(path);
    if (profile.country != country) {
        throw ConfigError(fmt::format("{}: profile declares country {} but was selected as {}",
                                      path.string(), profile.country, country));
    }
    return profile;
}

CountryRun evaluate_market(const RunManifest &manifest, const std::string &country,
                           const ScenarioConfig &scenario, const CountryProfile &profile) {
    CountryRun run;
    run.country = country;
    run.tam = compute_tam(profile);
    run.sam = compute_sam(profile, run.tam);
    run.nonviable = run.sam.nonviable;

    double som_base = run.sam.sam_usd_annual * scenario.market_share;
    if (const auto it = manifest.overrides.find(country); it != manifest.overrides.end()) {
        if (it->second.som_base_usd.has_value()) {
            som_base = *it->second.som_base_usd;
        }
    }
    run.som = som_schedule_from_base(som_base, scenario, manifest.start_year);
    return run;
}

ValuationResult evaluate_valuation(const RunManifest &manifest, const CountryRun &run,
                                   const ScenarioConfig &scenario, int rank) {
    std::optional<double> tv_override;
    const auto it = manifest.overrides.find(run.country);
    if (it != manifest.overrides.end()) {
        tv_override = it->second.terminal_value;
        if (it->second.revenues.has_value()) {
            return valuate_revenues(*it->second.revenues, rank, scenario,
                                    manifest.start_year, tv_override);
        }
    }
    return valuate(run.som, rank, scenario, tv_override);
}

ValuationResult evaluate_valuation_at_rate(const RunManifest &manifest, const CountryRun &run,
                                           const ScenarioConfig &scenario, double rate) {
    std::optional<double> tv_override;
    const auto it = manifest.overrides.find(run.country);
    if (it != manifest.overrides.end()) {
        tv_override = it->second.terminal_value;
        if (it->second.revenues.has_value()) {
            return valuate_revenues_at_rate(*it->second.revenues, scenario, rate,
                                            manifest.start_year, tv_override);
        }
    }
    return valuate_at_rate(run.som, scenario, rate, tv_override);
}

} // namespace

RunSummary run_pipeline(const RunManifest &manifest, RunMode mode) {
    RunSummary summary;
    const bool want_ranking = mode == RunMode::Rank || mode == RunMode::Full;
    const bool want_market = mode == RunMode::Size || mode == RunMode::Full;
    const bool want_valuation = mode == RunMode::Full;

    if (want_ranking) {
        summary.ranking = make_ranking(manifest);
        if (manifest.write_csv) {
            const auto path = manifest.out_dir / "ranking.csv";
            report::write_text_file(path, report::ranking_csv(summary.ranking));
            summary.files_written.push_back(path);
        }
        if (manifest.write_json) {
            const auto path = manifest.out_dir / "ranking.json";
            report::write_text_file(path, report::ranking_json(summary.ranking).dump(2) + "\n");
            summary.files_written.push_back(path);
        }
    }

    if (want_market) {
        const auto countries = select_countries(manifest);
        summary.runs.resize(countries.size());
        std::vector<std::vector<std::filesystem::path>> files(countries.size());

        parallel_for(countries.size(), manifest.jobs, [&](std::size_t i) {
            const std::string &country = countries[i];
            const auto scenario = scenario_for_country(manifest, country);
            const auto profile = load_profile(manifest, country);
            CountryRun run = evaluate_market(manifest, country, scenario, profile);

            if (want_valuation && !run.nonviable) {
                const int rank = rank_for_country(summary.ranking, country);
                run.valuation = evaluate_valuation(manifest, run, scenario, rank);
            }

            const auto country_dir = manifest.out_dir / lowercase(country);
            const auto emit = [&](const char *name, const std::string &csv_text,
                                  const nlohmann::ordered_json &json_doc) {
                if (manifest.write_csv) {
                    const auto path = country_dir / fmt::format("{}.csv", name);
                    report::write_text_file(path, csv_text);
                    files[i].push_back(path);
                }
                if (manifest.write_json) {
                    const auto path = country_dir / fmt::format("{}.json", name);
                    report::write_text_file(path, json_doc.dump(2) + "\n");
                    files[i].push_back(path);
                }
            };

            emit("funnel", report::funnel_csv(run.tam, run.sam, run.som),
                 report::funnel_json(run.tam, run.sam, run.som));
            if (!run.nonviable) {
                emit("schedule", report::schedule_csv(run.som),
                     report::schedule_json(run.som));
            }
            if (run.valuation.has_value()) {
                emit("valuation", report::valuation_csv(*run.valuation),
                     report::valuation_json(*run.valuation));
            }
            summary.runs[i] = std::move(run);
        });

        for (auto &group : files) {
            summary.files_written.insert(summary.files_written.end(), group.begin(),
                                         group.end());
        }
    }

    std::sort(summary.files_written.begin(), summary.files_written.end());
    return summary;
}

namespace {

void apply_sweep_parameter(ScenarioConfig &scenario, std::optional<double> &rate_override,
                           const std::string &name, double value) {
    if (name == "market_share") {
        scenario.market_share = value;
    } else if (name == "initial_capture_rate") {
        scenario.initial_capture_rate = value;
    } else if (name == "capture_escalation") {
        scenario.capture_escalation = value;
    } else if (name == "horizon_years") {
        if (value < 1.0 || value != std::floor(value)) {
            throw ConfigError(fmt::format(
                "sweep value {} for horizon_years is not a positive integer", value));
        }
        scenario.horizon_years = static_cast<int>(value);
    } else if (name == "initial_revenue_fraction") {
        scenario.initial_revenue_fraction = value;
    } else if (name == "revenue_fraction_step") {
        scenario.revenue_fraction_step = value;
    } else if (name == "cogs_ratio") {
        scenario.cogs_ratio = value;
    } else if (name == "opex_ratio_of_gross") {
        scenario.opex_ratio_of_gross = value;
    } else if (name == "tax_rate") {
        scenario.tax_rate = value;
    } else if (name == "terminal_growth") {
        scenario.terminal_growth = value;
    } else if (name == "discount_rate") {
        if (!(value > 0.0) || !(value <= 1.0)) {
            throw ConfigError(
                fmt::format("sweep discount_rate {} outside (0, 1]", value));
        }
        rate_override = value;
    } else {
        throw UnknownParameter(fmt::format("unknown sweep parameter \"{}\"", name));
    }
}

} // namespace

report::SweepReport sensitivity_sweep(const RunManifest &manifest) {
    if (manifest.sweep_axes.empty()) {
        throw UnknownParameter("sweep requested but the manifest lists no sweep axes");
    }
    const auto countries = select_countries(manifest);
    if (countries.size() != 1) {
        throw ConfigError(fmt::format(
            "sensitivity sweeps need exactly one selected country, got {}",
            countries.size()));
    }
    const std::string country = countries.front();

    std::set<std::string> seen_axes;
    bool sweeps_rate = false;
    std::size_t combinations = 1;
    for (const auto &axis : manifest.sweep_axes) {
        if (!seen_axes.insert(axis.parameter).second) {
            throw ConfigError(
                fmt::format("sweep axis \"{}\" appears twice", axis.parameter));
        }
        if (axis.parameter == "discount_rate") {
            sweeps_rate = true;
        }
        combinations *= axis.values.size();
    }

    // The country's rank is only needed when the sweep does not pin the rate.
    std::optional<int> ranked;
    if (!sweeps_rate) {
        ranked = rank_for_country(make_ranking(manifest), country);
    }
    const auto profile = load_profile(manifest, country);

    report::SweepReport sweep;
    for (const auto &axis : manifest.sweep_axes) {
        sweep.axes.push_back(axis.parameter);
    }
    sweep.rows.resize(combinations);

    parallel_for(combinations, manifest.jobs, [&](std::size_t index) {
        report::SweepRow row;
        std::size_t remainder = index;
        // Mixed-radix decode, last axis fastest.
        std::vector<std::size_t> digits(manifest.sweep_axes.size(), 0);
        for (std::size_t a = manifest.sweep_axes.size(); a-- > 0;) {
            const std::size_t radix = manifest.sweep_axes[a].values.size();
            digits[a] = remainder % radix;
            remainder /= radix;
        }

        ScenarioConfig scenario = scenario_for_country(manifest, country);
        std::optional<double> rate_override;
        for (std::size_t a = 0; a < manifest.sweep_axes.size(); ++a) {
            const auto &axis = manifest.sweep_axes[a];
            const double value = axis.values[digits[a]];
            apply_sweep_parameter(scenario, rate_override, axis.parameter, value);
            row.coordinates.emplace_back(axis.parameter, value);
        }
        validate_scenario(scenario);

        CountryRun run = evaluate_market(manifest, country, scenario, profile);
        const auto valuation =
            rate_override.has_value()
                ? evaluate_valuation_at_rate(manifest, run, scenario, *rate_override)
                : evaluate_valuation(manifest, run, scenario, *ranked);
        row.total_present_value = valuation.total_present_value;
        sweep.rows[index] = std::move(row);
    });

    std::stable_sort(sweep.rows.begin(), sweep.rows.end(),
                     [](const report::SweepRow &a, const report::SweepRow &b) {
                         for (std::size_t i = 0;
                              i < a.coordinates.size() && i < b.coordinates.size(); ++i) {
                             if (a.coordinates[i].second != b.coordinates[i].second) {
                                 return a.coordinates[i].second < b.coordinates[i].second;
                             }
                         }
                         return false;
                     });
    return sweep;
}

ReplicationOutcome replicate_against_golden(const RunManifest &manifest,
                                            const std::filesystem::path &golden_dir) {
    if (!std::filesystem::is_directory(golden_dir)) {
        throw IoError(
            fmt::format("golden directory {} does not exist", golden_dir.string()));
    }
    run_pipeline(manifest, RunMode::Full);

    ReplicationOutcome outcome;
    for (const auto &entry : std::filesystem::recursive_directory_iterator(golden_dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const auto relative = std::filesystem::relative(entry.path(), golden_dir);
        const auto produced = manifest.out_dir / relative;
        if (!std::filesystem::is_regular_file(produced)) {
            outcome.mismatched.push_back(
                fmt::format("{}: missing from output", relative.generic_string()));
            continue;
        }
        if (read_text_file(produced) != read_text_file(entry.path())) {
            outcome.mismatched.push_back(
                fmt::format("{}: differs from golden copy", relative.generic_string()));
        } else {
            outcome.matched.push_back(relative.generic_string());
        }
    }
    std::sort(outcome.matched.begin(), outcome.matched.end());
    std::sort(outcome.mismatched.begin(), outcome.mismatched.end());
    outcome.ok = outcome.mismatched.empty() && !outcome.matched.empty();
    return outcome;
}

} // namespace investval
