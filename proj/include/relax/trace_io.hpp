#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relax/experiment.hpp"

namespace relax {

/// One CSV row of a run trace. Optional fields serialize as empty cells.
struct TraceRow {
    std::uint64_t run_seed = 0;
    std::size_t iter = 0;
    std::size_t n_train = 0;
    double pf_hat = 0.0;
    double beta_hat = 0.0;
    double delta_beta = 0.0;
    std::size_t pareto_k = 0;
    double pareto_frac = 0.0;
    std::optional<double> gamma;
    std::optional<double> w_min;
    std::optional<double> w_max;
    std::optional<double> w_bar;
    double sel_obj_fmu = 0.0;
    double sel_obj_fsigma = 0.0;
    double ell = 0.0;
    double sigma_f2 = 0.0;
    /// '|'-separated tokens.
    std::string flags;
    std::vector<double> sel_u;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Shortest-round-trip-safe text: 17 significant digits.
std::string format_double(double v);

std::vector<TraceRow> trace_rows(const RunResult& result);

std::string trace_header(std::size_t dim);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, std::size_t dim);
/// Parses a trace written by write_trace_csv; throws ArgumentError on malformed input.
std::vector<TraceRow> read_trace_csv(std::istream& in, std::size_t* dim = nullptr);

/// "1e-2:3,5e-3:3" -> targets. Throws ArgumentError on malformed text.
std::vector<TargetSpec> parse_targets(const std::string& text);
std::string format_targets(const std::vector<TargetSpec>& targets);

nlohmann::json config_to_json(const ExperimentConfig& config);
/// Overrides fields present in j; unknown keys are rejected.
void apply_config_json(const nlohmann::json& j, ExperimentConfig& config);

/// Run-level document: config echo, seed, per-target hits, timings.
nlohmann::json run_document(const RunResult& result);

struct SummaryTarget {
    TargetSpec target;
    double median = 0.0;
    double p2_5 = 0.0;
    double p97_5 = 0.0;
    std::size_t n_not_reached = 0;

    friend bool operator==(const SummaryTarget&, const SummaryTarget&) = default;
};

struct SummaryRun {
    std::uint64_t seed = 0;
    std::vector<std::size_t> first_hit_samples;
    bool truncated = false;

    friend bool operator==(const SummaryRun&, const SummaryRun&) = default;
};

struct SummaryDocument {
    nlohmann::json config;
    double reference_beta = 0.0;
    std::vector<SummaryTarget> targets;
    std::vector<SummaryRun> runs;

    friend bool operator==(const SummaryDocument&, const SummaryDocument&) = default;
};

SummaryDocument make_summary(const std::vector<RunResult>& results);
nlohmann::json to_json(const SummaryDocument& doc);
SummaryDocument summary_from_json(const nlohmann::json& j);

}  // namespace relax
