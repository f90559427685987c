#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tger/edge_stream.hpp"
#include "tger/evaluation.hpp"
#include "tger/metrics.hpp"
#include "tger/normalization.hpp"
#include "tger/sampling.hpp"
#include "tger/temporal_model.hpp"

namespace tger {

/// FNV-1a 64-bit content hash, used to fingerprint datasets and configs.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& bytes);

/// "fnv1a64:<16 hex digits>" over the file's bytes.
std::string dataset_fingerprint(const std::string& path);

/// One experiment cell: everything needed to run
/// ingest → split → mask → normalize → sample → fit/train → evaluate.
struct RunConfig {
    std::string dataset;
    CsvFormat format = CsvFormat::generic;
    NormMethod norm = NormMethod::log;
    double range_lo = 0.0;
    double range_hi = 1.0;
    TrainStrategy strategy = TrainStrategy::positive_only;
    double neg_ratio = 1.0;
    Task task = Task::regression;
    std::string model = "persistence";
    SplitRequest split;
    double mask_fraction = 0.1;
    std::uint64_t mask_seed = 0;
    std::uint64_t eval_seed = 0;  // evaluation sample draws, fixed across training seeds
    std::vector<std::uint64_t> seeds = {0, 1, 2};
    int top_decade = 0;  // 0 → decades spanned by the training max raw weight
    TrainConfig train;
    int static_groups = 0;
    std::string out_dir = ".";

    /// Canonical resolved form; out_dir is excluded from the fingerprint.
    nlohmann::json to_json() const;
    std::string fingerprint() const;
};

/// Valid task/model pairings: mean and historical_average are
/// regression-only, most is classification-only, the rest support both.
bool model_supports_task(const std::string& model, Task task);
/// Training strategy only influences the trainable temporal model; other
/// models collapse onto positive_only so grids do not duplicate rows.
bool model_uses_strategy(const std::string& model);

struct CellResult {
    RunConfig config;
    std::string fingerprint;
    std::string dataset_hash;
    EvalReport report;                        // metrics keyed "<regime>/<scope>/<metric>"
    std::vector<std::string> scopes_skipped;  // "<regime>/<scope>: <reason>"
    std::string error;                        // non-empty → the cell failed

    bool failed() const { return !error.empty(); }
    nlohmann::json to_json() const;
};

/// Runs one cell against a pre-ingested graph (shared immutably across
/// cells). Evaluates both regimes over the available scopes, aggregates over
/// config.seeds, and never throws: failures land in CellResult::error. When
/// `trained` is given and the model is trainable, the per-seed models are
/// appended to it in seed order.
CellResult run_cell(const RunConfig& config, const TemporalGraph& graph,
                    const std::string& dataset_hash,
                    std::vector<TemporalModel>* trained = nullptr);

/// "<model>-<strategy>-<norm>-<task>-<fingerprint prefix>", the basename
/// stem shared by per-cell report files.
std::string cell_slug(const RunConfig& config, const std::string& fingerprint);

/// Grid of cells over models × strategies × normalizations × tasks against a
/// single dataset. Invalid task/model combinations are dropped at expansion;
/// strategies collapse for models that ignore them.
struct MatrixConfig {
    std::string dataset;
    CsvFormat format = CsvFormat::generic;
    std::vector<std::string> models = {"mean", "most", "persistence",
                                       "historical_average", "static_linear",
                                       "temporal_memory"};
    std::vector<TrainStrategy> strategies = {TrainStrategy::positive_only};
    std::vector<NormMethod> norms = {NormMethod::log};
    std::vector<Task> tasks = {Task::regression};
    SplitRequest split;
    double mask_fraction = 0.1;
    std::uint64_t mask_seed = 0;
    std::uint64_t eval_seed = 0;
    std::vector<std::uint64_t> seeds = {0, 1, 2};
    double neg_ratio = 1.0;
    double range_lo = 0.0;
    double range_hi = 1.0;
    int top_decade = 0;
    TrainConfig train;
    int static_groups = 0;
    std::string out_dir = ".";
    int jobs = 0;  // worker pool size, 0 → logical CPU count

    static MatrixConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct MatrixResult {
    std::vector<CellResult> cells;  // grid-expansion order
    std::string dataset_hash;

    int failed_count() const;
    /// 0 = every cell succeeded, 2 = some failed, 1 = all failed.
    int exit_code() const;
};

/// Expands the grid, runs cells on a worker pool, writes one JSON report per
/// cell, per-(task, scope) summary CSVs, and a matrix.json index into
/// config.out_dir. Output bytes are a pure function of (config, dataset).
MatrixResult run_matrix(const MatrixConfig& config);

std::vector<RunConfig> expand_matrix(const MatrixConfig& config);

/// Table-shaped summary for one task and node scope: rows = model × strategy,
/// columns = normalization × regime, cell = mean MSE (regression) or mean
/// accuracy (classification); failed cells and skipped scopes leave blanks.
std::string summary_csv(const MatrixConfig& config, const std::vector<CellResult>& cells,
                        Task task, const std::string& scope);

enum class HistScale { linear, log };

HistScale hist_scale_from_string(const std::string& name);

/// Raw edge-weight histogram. Linear: `bins` equal-width bins over
/// [min, max]. Log: one right-closed decade bin per power of ten spanned by
/// the data (`bins` is ignored). Rows are "lower_edge,count".
std::string histogram_csv(const TemporalGraph& graph, int bins, HistScale scale);
void emit_histogram(const TemporalGraph& graph, int bins, HistScale scale,
                    const std::string& path);

}  // namespace tger
