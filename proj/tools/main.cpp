// investval: country ranking, market sizing, and DCF valuation pipelines
// driven by JSON run manifests.

#include "investval/errors.hpp"
#include "investval/pipeline.hpp"
#include "investval/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
    std::optional<std::string> out_dir;
    std::vector<std::string> formats;
    std::vector<std::string> countries;
    std::optional<int> jobs;
};

void add_common_flags(CLI::App &cmd, CommonFlags &flags) {
    cmd.add_option("--out", flags.out_dir, "Output directory (overrides the manifest)");
    cmd.add_option("--format", flags.formats,
                   "Report formats to write: csv, json (overrides the manifest)")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--countries", flags.countries,
                   "Countries to run, as ISO alpha-2 codes (overrides the manifest)")
        ->delimiter(',');
    cmd.add_option("--jobs", flags.jobs, "Worker threads (overrides the manifest)")
        ->check(CLI::PositiveNumber);
}

investval::RunManifest load_with_flags(const std::string &manifest_path,
                                       const CommonFlags &flags) {
    auto manifest = investval::load_manifest(manifest_path);
    if (flags.out_dir.has_value()) {
        manifest.out_dir = *flags.out_dir;
    }
    if (!flags.formats.empty()) {
        manifest.write_csv = false;
        manifest.write_json = false;
        for (const auto &format : flags.formats) {
            if (format == "csv") {
                manifest.write_csv = true;
            } else {
                manifest.write_json = true;
            }
        }
    }
    if (!flags.countries.empty()) {
        manifest.countries.clear();
        for (const auto &raw : flags.countries) {
            const auto code = investval::country_code_from_name(raw);
            if (!code.has_value()) {
                throw investval::ConfigError(
                    fmt::format("--countries: unknown country \"{}\"", raw));
            }
            manifest.countries.push_back(*code);
        }
    }
    if (flags.jobs.has_value()) {
        manifest.jobs = *flags.jobs;
    }
    return manifest;
}

void print_summary(const investval::RunSummary &summary) {
    for (const auto &run : summary.runs) {
        if (run.nonviable) {
            fmt::print("{}: market nonviable after exclusions; valuation skipped\n",
                       run.country);
        }
    }
    for (const auto &file : summary.files_written) {
        fmt::print("wrote {}\n", file.string());
    }
}

int run_mode(const std::string &manifest_path, const CommonFlags &flags,
             investval::RunMode mode) {
    const auto manifest = load_with_flags(manifest_path, flags);
    print_summary(investval::run_pipeline(manifest, mode));
    return 0;
}

int run_sweep(const std::string &manifest_path, const CommonFlags &flags) {
    const auto manifest = load_with_flags(manifest_path, flags);
    const auto sweep = investval::sensitivity_sweep(manifest);
    if (manifest.write_csv) {
        const auto path = manifest.out_dir / "sweep.csv";
        investval::report::write_text_file(path, investval::report::sweep_csv(sweep));
        fmt::print("wrote {}\n", path.string());
    }
    if (manifest.write_json) {
        const auto path = manifest.out_dir / "sweep.json";
        investval::report::write_text_file(
            path, investval::report::sweep_json(sweep).dump(2) + "\n");
        fmt::print("wrote {}\n", path.string());
    }
    return 0;
}

int run_replicate(const CommonFlags &flags) {
    const auto data_dir = investval::default_data_dir();
    auto manifest = investval::load_manifest(data_dir / "manifests" / "replicate.json");
    manifest.out_dir = flags.out_dir.value_or("replicate_out");
    if (flags.jobs.has_value()) {
        manifest.jobs = *flags.jobs;
    }
    const auto outcome =
        investval::replicate_against_golden(manifest, data_dir / "golden");
    for (const auto &file : outcome.matched) {
        fmt::print("ok       {}\n", file);
    }
    for (const auto &file : outcome.mismatched) {
        fmt::print("MISMATCH {}\n", file);
    }
    if (!outcome.ok) {
        fmt::print("replication failed: {} file(s) diverge\n", outcome.mismatched.size());
        return 1;
    }
    fmt::print("replication ok: {} files match the golden outputs\n",
               outcome.matched.size());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{
        "investval: country investability ranking, TAM/SAM/SOM market sizing, and\n"
        "rank-tiered DCF startup valuation.\n\n"
        "Bundled datasets are found via $INVESTVAL_DATA_DIR (falling back to the\n"
        "source-tree data directory)."};
    app.require_subcommand(1);

    std::string manifest_path;
    CommonFlags flags;

    auto *rank = app.add_subcommand("rank", "Compute the country ranking table");
    rank->add_option("manifest", manifest_path, "Run manifest (JSON)")->required();
    add_common_flags(*rank, flags);

    auto *size = app.add_subcommand("size", "Compute TAM/SAM/SOM funnels and schedules");
    size->add_option("manifest", manifest_path, "Run manifest (JSON)")->required();
    add_common_flags(*size, flags);

    auto *value = app.add_subcommand("value", "Run the full ranking + sizing + DCF pipeline");
    value->add_option("manifest", manifest_path, "Run manifest (JSON)")->required();
    add_common_flags(*value, flags);

    auto *sweep = app.add_subcommand("sweep", "Evaluate the manifest's sensitivity grid");
    sweep->add_option("manifest", manifest_path, "Run manifest (JSON)")->required();
    add_common_flags(*sweep, flags);

    auto *replicate = app.add_subcommand(
        "replicate-paper", "Run the bundled fixtures and diff against golden outputs");
    replicate->add_option("--out", flags.out_dir, "Output directory");
    replicate->add_option("--jobs", flags.jobs, "Worker threads")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rank->parsed()) {
            return run_mode(manifest_path, flags, investval::RunMode::Rank);
        }
        if (size->parsed()) {
            return run_mode(manifest_path, flags, investval::RunMode::Size);
        }
        if (value->parsed()) {
            return run_mode(manifest_path, flags, investval::RunMode::Full);
        }
        if (sweep->parsed()) {
            return run_sweep(manifest_path, flags);
        }
        if (replicate->parsed()) {
            return run_replicate(flags);
        }
    } catch (const investval::Error &err) {
        fmt::print(stderr, "error: {}\n", err.what());
        return 1;
    } catch (const std::exception &err) {
        fmt::print(stderr, "unexpected error: {}\n", err.what());
        return 2;
    }
    return 0;
}
