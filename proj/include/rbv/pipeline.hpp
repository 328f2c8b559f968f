#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbv/baseline.hpp"
#include "rbv/hgb.hpp"
#include "rbv/metrics.hpp"
#include "rbv/smote.hpp"

namespace rbv {

// Everything a pipeline run needs, fully serializable; every report and the
// manifest embed the exact configuration used.
struct RunConfig {
    std::string input_csv;    // one of input_csv / synth_spec must be set
    std::string synth_spec;   // marginals JSON for the synthetic surrogate
    std::string label_column = "label";
    std::string output_dir = "out";
    std::uint64_t seed = 42;
    double alpha = 0.05;
    double winsor_lower = 1.0;
    double winsor_upper = 99.0;
    std::size_t synth_survived = 2364;
    std::size_t synth_nonsurvived = 233;
    SmoteConfig smote{};
    HgbConfig hgb{};
    BaselineConfig baselines{};
    int folds = 5;
    bool paper_mode = false;
    bool train_set_eval = false;
    bool no_balance = false;
    bool snap_to_data = false;
    std::size_t mask_points = 200;
    std::size_t pair_top_k = 40;
    std::size_t delta_top_k = 41;
    double significant_cutoff = 0.5;
    bool verbose = false;

    std::string to_json_text() const;
    static RunConfig from_json_text(const std::string& text);

    EvalProtocol protocol() const;
};

// A pipeline stage failed after input was read successfully.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Bad input file / unreadable spec, distinguished for the CLI's exit codes.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PipelineResult {
    std::string manifest_path;
    std::vector<std::string> artifact_paths;
};

// Runs ingest -> winsorize -> impute -> describe -> select -> correlations ->
// model comparison -> single sweep -> significance screen -> pair sweep ->
// one/two-threshold search -> masks, writing one CSV/JSON artifact per result
// table plus a manifest with the config and per-artifact SHA-256 hashes.
// On a stage failure the partial outputs stay on disk and the manifest
// records the failed stage before the StageError propagates.
PipelineResult run_pipeline(const RunConfig& config);

// ISO-8601 UTC timestamp; honors SOURCE_DATE_EPOCH for reproducible runs.
std::string manifest_timestamp();

}  // namespace rbv
