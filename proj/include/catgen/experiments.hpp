/**
 * @file experiments.hpp
 * @brief Seed-ensemble experiment harness: conditions, aggregation, effect report, CSV/JSON I/O.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "catgen/bayes.hpp"
#include "catgen/som.hpp"

namespace catgen {

struct ProbeGrid {
    double lo = 0.0;
    double hi = 100.0;
    double step = 1.0;

    std::vector<double> values() const;
};

struct ConditionSpec {
    std::string name;
    StimulusSet<double> stimuli;
    ProbeGrid probe_grid;
    SomConfig som_config;
    std::size_t n_seeds = 100;
    bool keep_raw = false;

    void validate() const;
};

/// Names of the built-in conditions: base, numerosity, variability, set1, set2.
const std::vector<std::string>& preset_names();
/// Throws std::invalid_argument for an unknown name.
ConditionSpec preset(const std::string& name);

/// Parses a JSON condition spec. Unknown keys are rejected.
ConditionSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ConditionSpec& spec);
ConditionSpec load_spec(const std::filesystem::path& path);

struct SeedRun {
    std::uint64_t seed = 0;
    double max_qe = 0.0;
    std::vector<double> rd;  // one per probe
};

struct ConditionResult {
    ConditionSpec spec;
    std::uint64_t seed_base = 0;
    std::vector<double> probes;  // dimension-0 probe values
    std::vector<double> mean_rd_curve;
    std::vector<double> rd_stderr_curve;
    double mean_max_qe = 0.0;
    double max_qe_stderr = 0.0;
    std::vector<SeedRun> raw;  // filled only if spec.keep_raw
};

/// Full pipeline for one seed: init, train, represent, probe.
SeedRun run_seed(const ConditionSpec& spec, std::uint64_t seed);

/**
 * Runs seeds s0 .. s0 + n_seeds - 1 with s0 = som_config.seed + seed_base,
 * possibly in parallel.
 * Results are reduced in seed order, so they do not depend on `threads`.
 * threads == 0 picks the hardware concurrency.
 */
ConditionResult run_condition(const ConditionSpec& spec, std::uint64_t seed_base = 0, unsigned threads = 0);

/// Seed offset from CATGEN_SEED_BASE, 0 if unset. Throws on a malformed value.
std::uint64_t seed_base_from_env();

// ---------------------------------------------------------------------------
// Effect report

inline constexpr double kSeparationFactor = 3.0;   // gaps must exceed this many pooled standard errors
inline constexpr std::size_t kMinReportSeeds = 30;

struct Verdict {
    std::string property;
    double statistic = 0.0;  // smallest (or for divergence, largest) gap / pooled standard error
    double threshold = kSeparationFactor;
    std::optional<bool> pass;  // empty when the sample is too small to judge
    std::string detail;
    nlohmann::json extra = nlohmann::json::object();
};

struct EffectReport {
    std::size_t n_seeds = 0;
    std::uint64_t seed_base = 0;
    std::vector<Verdict> verdicts;
    std::vector<std::string> warnings;
    std::vector<ConditionResult> conditions;

    bool all_pass() const;
};

/// Pooled standard error of a difference of two means.
double pooled_stderr(double se_a, double se_b);
/// (a - b) / pooled standard error, +/-infinity when the error is zero.
double separation(double mean_a, double se_a, double mean_b, double se_b);

EffectReport run_effect_report(std::size_t n_seeds = 100, std::uint64_t seed_base = 0, unsigned threads = 0,
                               const SomConfig& som_config = {});
nlohmann::json report_to_json(const EffectReport& report);

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Shortest representation that parses back to the same double; "inf"/"-inf"/"nan" for non-finite.
std::string format_double(double v);
double parse_double(const std::string& text);

void write_csv(const CsvTable& table, const std::filesystem::path& path);
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// `probe,mean_rd,stderr_rd`, one row per probe.
CsvTable curve_table(const ConditionResult& result);
/// `seed,probe,rd`, long format.
CsvTable raw_table(const ConditionResult& result);
/// `probe,p_in_category`.
CsvTable bayes_table(const bayes::BayesCurve& curve);

void emit_csv(const ConditionResult& result, const std::filesystem::path& path);
void emit_csv(const bayes::BayesCurve& curve, const std::filesystem::path& path);

nlohmann::json summary_json(const ConditionResult& result);

/// Dimension-0 coordinates of a stimulus set, as the Bayesian model consumes them.
std::vector<double> first_coordinates(const StimulusSet<double>& stimuli);

}  // namespace catgen
