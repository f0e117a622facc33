#pragma once

#include "investval/dataset.hpp"
#include "investval/dcf.hpp"
#include "investval/market.hpp"
#include "investval/ranking.hpp"
#include "investval/report.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace investval {

// Per-country replication knobs: pinned published figures take the place of
// the corresponding computed stage.
struct CountryOverrides {
    std::optional<double> som_base_usd;            // replaces SAM x market_share
    std::optional<std::vector<double>> revenues;   // replaces projected revenues
    std::optional<double> terminal_value;          // replaces the Gordon TV
    std::optional<double> market_share;            // per-country share
};

struct SweepAxis {
    std::string parameter;
    std::vector<double> values;
};

struct RunManifest {
    std::filesystem::path indicators_path;
    std::filesystem::path observations_path;
    std::filesystem::path profiles_dir;
    // When set, ranks come from this published table instead of the dataset.
    std::optional<std::filesystem::path> ranking_fixture_path;
    ScenarioConfig scenario;
    std::vector<std::string> countries; // empty: every country with a profile
    std::filesystem::path out_dir = "out";
    int start_year = 2025;
    int jobs = 1;
    bool write_csv = true;
    bool write_json = false;
    std::map<std::string, CountryOverrides> overrides; // keyed by country code
    std::vector<SweepAxis> sweep_axes;
};

// Resolution order: $INVESTVAL_DATA_DIR, then the bundled data directory
// baked in at build time.
std::filesystem::path default_data_dir();

// Loads a manifest document. Relative data paths resolve against the
// manifest's own directory; a relative out_dir resolves against the current
// working directory. Unknown keys are rejected.
RunManifest load_manifest(const std::filesystem::path &path);
RunManifest load_manifest_text(std::string_view json_text,
                               const std::filesystem::path &base_dir,
                               const std::string &origin = "manifest");

enum class RunMode {
    Rank, // ranking table only
    Size, // funnel + capture schedule per country
    Full, // ranking + funnel + schedule + valuation
};

struct CountryRun {
    std::string country;
    TamBreakdown tam;
    SamBreakdown sam;
    SomSchedule som;
    bool nonviable = false; // valuation skipped, funnel flagged
    std::optional<ValuationResult> valuation;
};

struct RunSummary {
    RankingTable ranking;         // populated in Rank and Full modes
    std::vector<CountryRun> runs; // sorted by country code
    std::vector<std::filesystem::path> files_written; // sorted
};

// Executes the selected stages for every selected country and writes report
// files under out_dir (ranking.csv at the top, per-country files in
// lowercase-code subdirectories). Output bytes are identical for identical
// manifests regardless of the jobs setting.
RunSummary run_pipeline(const RunManifest &manifest, RunMode mode = RunMode::Full);

// Cartesian product over the manifest's sweep axes for a single selected
// country; rows sorted lexicographically by coordinates. Throws
// UnknownParameter for axes that do not name a scenario parameter and
// ConfigError when the axis list is empty.
report::SweepReport sensitivity_sweep(const RunManifest &manifest);

struct ReplicationOutcome {
    bool ok = false;
    std::vector<std::string> matched;    // relative paths, sorted
    std::vector<std::string> mismatched; // relative paths + reason, sorted
};

// Runs the manifest into out_dir and compares every golden file byte for
// byte against the freshly written one.
ReplicationOutcome replicate_against_golden(const RunManifest &manifest,
                                            const std::filesystem::path &golden_dir);

// Runs fn(0..count-1) on up to `jobs` threads. Work items must not touch
// shared mutable state; the lowest-index exception is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)> &fn);

} // namespace investval
