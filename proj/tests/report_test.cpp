#include "tger/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tger/edge_stream.hpp"
#include "tger/synthetic.hpp"
#include "test_util.hpp"

namespace tger {
namespace {

using test::make_graph;
using test::read_file;
using test::TempDir;

TEST(Fnv1a64, MatchesPublishedTestVectors) {
    EXPECT_EQ(fnv1a64("", 0), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(fnv1a64_hex("abc"), "e71fa2190541574b");
}

TEST(DatasetFingerprint, HashesTheFileBytes) {
    const TempDir dir;
    const std::string path = dir.file("data.csv");
    test::write_file(path, "hello\n");

    EXPECT_EQ(dataset_fingerprint(path), "fnv1a64:" + fnv1a64_hex("hello\n"));
    EXPECT_THROW(dataset_fingerprint(dir.file("missing.csv")), std::runtime_error);
}

TEST(RunConfigFingerprint, IgnoresOutputDirectoryButTracksEverythingElse) {
    RunConfig base;
    base.dataset = "data.csv";
    const std::string reference = base.fingerprint();
    EXPECT_EQ(reference.size(), 16u);

    RunConfig moved = base;
    moved.out_dir = "/somewhere/else";
    EXPECT_EQ(moved.fingerprint(), reference);

    RunConfig other_model = base;
    other_model.model = "mean";
    EXPECT_NE(other_model.fingerprint(), reference);

    RunConfig other_eval_seed = base;
    other_eval_seed.eval_seed = 99;
    EXPECT_NE(other_eval_seed.fingerprint(), reference);

    RunConfig other_seeds = base;
    other_seeds.seeds = {5};
    EXPECT_NE(other_seeds.fingerprint(), reference);

    RunConfig other_split = base;
    other_split.split.train = 10;
    EXPECT_NE(other_split.fingerprint(), reference);
}

TEST(ModelCatalog, TaskSupportAndStrategyUse) {
    EXPECT_TRUE(model_supports_task("mean", Task::regression));
    EXPECT_FALSE(model_supports_task("mean", Task::classification));
    EXPECT_FALSE(model_supports_task("most", Task::regression));
    EXPECT_TRUE(model_supports_task("most", Task::classification));
    EXPECT_TRUE(model_supports_task("persistence", Task::regression));
    EXPECT_TRUE(model_supports_task("persistence", Task::classification));
    EXPECT_TRUE(model_supports_task("historical_average", Task::regression));
    EXPECT_FALSE(model_supports_task("historical_average", Task::classification));
    EXPECT_TRUE(model_supports_task("static_linear", Task::regression));
    EXPECT_TRUE(model_supports_task("temporal_memory", Task::classification));
    EXPECT_THROW(model_supports_task("gnn", Task::regression), std::runtime_error);

    EXPECT_TRUE(model_uses_strategy("temporal_memory"));
    EXPECT_FALSE(model_uses_strategy("persistence"));
    EXPECT_FALSE(model_uses_strategy("static_linear"));
}

TEST(CellSlug, ComposesNameAndFingerprintPrefix) {
    RunConfig config;
    config.model = "persistence";
    const std::string fp = config.fingerprint();
    EXPECT_EQ(cell_slug(config, fp),
              "persistence-positive_only-log-regression-" + fp.substr(0, 8));
}

RunConfig constant_stream_config() {
    RunConfig config;
    config.model = "persistence";
    config.split.train = 6;
    config.split.val = 1;
    config.split.test = 1;
    config.seeds = {0, 1, 2};
    return config;
}

TEST(RunCell, PersistenceIsPerfectOnAConstantStream) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::constant, 8, 8, 0.5, 1);
    const RunConfig config = constant_stream_config();

    const CellResult cell = run_cell(config, graph, "fnv1a64:0123456789abcdef");
    ASSERT_FALSE(cell.failed()) << cell.error;
    EXPECT_EQ(cell.fingerprint, config.fingerprint());
    EXPECT_EQ(cell.dataset_hash, "fnv1a64:0123456789abcdef");
    EXPECT_EQ(cell.report.fingerprint, cell.fingerprint);
    EXPECT_FALSE(cell.report.single_seed);

    // The pair weights never change, so for pairs whose training history
    // survived the mask, last-seen reproduces every positive test target
    // exactly — and constant-stream negatives were absent from training too,
    // so the fallback 0 matches their target and even the overall regime is
    // exact on the old scope.
    ASSERT_TRUE(cell.report.metrics.count("positive/old/mse"));
    EXPECT_DOUBLE_EQ(cell.report.metrics.at("positive/old/mse").mean, 0.0);
    ASSERT_TRUE(cell.report.metrics.count("overall/old/mse"));
    EXPECT_DOUBLE_EQ(cell.report.metrics.at("overall/old/mse").mean, 0.0);
    ASSERT_TRUE(cell.report.metrics.count("positive/all/mse"));
    ASSERT_TRUE(cell.report.metrics.count("overall/all/mse"));

    // A deterministic model is fitted once, so seed aggregation sees
    // identical values and every spread is zero.
    for (const auto& [key, stat] : cell.report.metrics) {
        EXPECT_DOUBLE_EQ(stat.stddev, 0.0) << key;
        EXPECT_EQ(stat.per_seed.size(), 3u) << key;
    }

    // Masking was on, so the new scope either produced metrics or was skipped
    // with a reason. When the masked node does have test events, their
    // training history is gone: last-seen falls back to 0 and the error shows
    // up in both the new and the all scope.
    bool new_scope_seen = cell.report.metrics.count("positive/new/mse") > 0;
    for (const std::string& skip : cell.scopes_skipped) {
        if (skip.rfind("positive/new", 0) == 0) new_scope_seen = true;
    }
    EXPECT_TRUE(new_scope_seen);
    if (cell.report.metrics.count("positive/new/mse") > 0) {
        EXPECT_GT(cell.report.metrics.at("positive/new/mse").mean, 0.0);
        EXPECT_GT(cell.report.metrics.at("positive/all/mse").mean, 0.0);
    }

    // Sample counts are recorded per evaluated slot, and the overall regime
    // doubles the positive count.
    ASSERT_TRUE(cell.report.sample_counts.count("positive/all"));
    ASSERT_TRUE(cell.report.sample_counts.count("overall/all"));
    EXPECT_EQ(cell.report.sample_counts.at("overall/all"),
              2 * cell.report.sample_counts.at("positive/all"));

    // Cells are pure: rerunning produces the identical canonical report.
    const CellResult again = run_cell(config, graph, "fnv1a64:0123456789abcdef");
    EXPECT_EQ(cell.to_json().dump(), again.to_json().dump());
}

TEST(RunCell, ZeroMaskFractionEvaluatesOnlyTheAllScope) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::constant, 8, 8, 0.5, 1);
    RunConfig config = constant_stream_config();
    config.mask_fraction = 0.0;

    const CellResult cell = run_cell(config, graph, "hash");
    ASSERT_FALSE(cell.failed()) << cell.error;
    EXPECT_TRUE(cell.scopes_skipped.empty());
    for (const auto& [key, stat] : cell.report.metrics) {
        EXPECT_EQ(key.find("/old/"), std::string::npos) << key;
        EXPECT_EQ(key.find("/new/"), std::string::npos) << key;
    }
    EXPECT_EQ(cell.report.sample_counts.size(), 2u);
}

TEST(RunCell, FailuresAreCapturedNotThrown) {
    // Every weight equal makes the min-max fit degenerate.
    const TemporalGraph flat = make_graph({{0, 1, 0, 5.0},
                                           {1, 2, 0, 5.0},
                                           {0, 1, 1, 5.0},
                                           {0, 1, 2, 5.0}});
    RunConfig config;
    config.model = "persistence";
    config.norm = NormMethod::minmax;
    config.split.train = 1;
    config.split.val = 1;
    config.split.test = 1;
    config.mask_fraction = 0.0;

    const CellResult cell = run_cell(config, flat, "hash");
    ASSERT_TRUE(cell.failed());
    EXPECT_NE(cell.error.find("degenerate range"), std::string::npos);

    // Unsupported task/model pairings fail the same contained way.
    RunConfig wrong_task = config;
    wrong_task.norm = NormMethod::log;
    wrong_task.model = "mean";
    wrong_task.task = Task::classification;
    const CellResult unsupported = run_cell(wrong_task, flat, "hash");
    ASSERT_TRUE(unsupported.failed());
    EXPECT_NE(unsupported.error.find("does not support"), std::string::npos);

    RunConfig no_seeds = config;
    no_seeds.seeds.clear();
    const CellResult seedless = run_cell(no_seeds, flat, "hash");
    ASSERT_TRUE(seedless.failed());
    EXPECT_NE(seedless.error.find("seeds are empty"), std::string::npos);

    // A failed cell's JSON carries the error and omits the report.
    const nlohmann::json j = seedless.to_json();
    EXPECT_TRUE(j.contains("error"));
    EXPECT_FALSE(j.contains("report"));
}

TEST(RunCell, TrainableModelYieldsPerSeedModelsAndSpread) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::random_walk, 6, 6, 0.5, 2);
    RunConfig config;
    config.model = "temporal_memory";
    config.split.train = 4;
    config.split.val = 1;
    config.split.test = 1;
    config.mask_fraction = 0.0;
    config.seeds = {0, 1};
    config.train.dim = 2;
    config.train.max_epochs = 2;
    config.train.learning_rate = 0.01;

    std::vector<TemporalModel> trained;
    const CellResult cell = run_cell(config, graph, "hash", &trained);
    ASSERT_FALSE(cell.failed()) << cell.error;
    ASSERT_EQ(trained.size(), 2u);
    EXPECT_NE(trained[0].params().embeddings, trained[1].params().embeddings);

    ASSERT_TRUE(cell.report.metrics.count("positive/all/mse"));
    EXPECT_EQ(cell.report.metrics.at("positive/all/mse").per_seed.size(), 2u);
}

TEST(ExpandMatrix, DropsInvalidPairingsAndCollapsesStrategies) {
    MatrixConfig config;
    config.dataset = "unused.csv";
    config.models = {"mean", "most", "persistence"};
    config.strategies = {TrainStrategy::positive_only, TrainStrategy::all_pairs};
    config.tasks = {Task::regression, Task::classification};

    const std::vector<RunConfig> cells = expand_matrix(config);
    // mean: regression only; most: classification only; persistence: both.
    // None of the three is trainable, so the strategy axis collapses.
    ASSERT_EQ(cells.size(), 4u);
    for (const RunConfig& cell : cells)
        EXPECT_EQ(cell.strategy, TrainStrategy::positive_only);
    EXPECT_EQ(cells[0].model, "mean");
    EXPECT_EQ(cells[0].task, Task::regression);
    EXPECT_EQ(cells[1].model, "most");
    EXPECT_EQ(cells[1].task, Task::classification);
    EXPECT_EQ(cells[2].model, "persistence");
    EXPECT_EQ(cells[3].model, "persistence");

    MatrixConfig trainable = config;
    trainable.models = {"temporal_memory"};
    trainable.tasks = {Task::regression};
    const std::vector<RunConfig> trained_cells = expand_matrix(trainable);
    ASSERT_EQ(trained_cells.size(), 2u);
    EXPECT_EQ(trained_cells[0].strategy, TrainStrategy::positive_only);
    EXPECT_EQ(trained_cells[1].strategy, TrainStrategy::all_pairs);

    MatrixConfig bogus = config;
    bogus.models = {"gnn"};
    EXPECT_THROW(expand_matrix(bogus), std::runtime_error);
}

TEST(MatrixConfigJson, AcceptsArrayAndObjectSplits) {
    const MatrixConfig array_split = MatrixConfig::from_json(
        nlohmann::json::parse(R"({"dataset":"d.csv","split":[5,2,1]})"));
    EXPECT_EQ(array_split.split.policy, BoundaryPolicy::by_timestamp_count);
    EXPECT_EQ(array_split.split.train, 5);
    EXPECT_EQ(array_split.split.val, 2);
    EXPECT_EQ(array_split.split.test, 1);

    const MatrixConfig frac_split = MatrixConfig::from_json(nlohmann::json::parse(
        R"({"split":{"policy":"fraction","train":0.8,"val":0.1,"test":0.1}})"));
    EXPECT_EQ(frac_split.split.policy, BoundaryPolicy::by_fraction);
    EXPECT_DOUBLE_EQ(frac_split.split.train_frac, 0.8);

    EXPECT_THROW(MatrixConfig::from_json(
                     nlohmann::json::parse(R"({"split":{"policy":"weekly"}})")),
                 std::runtime_error);
    EXPECT_THROW(
        MatrixConfig::from_json(nlohmann::json::parse(R"({"split":[1,2]})")),
        std::runtime_error);

    const MatrixConfig full = MatrixConfig::from_json(nlohmann::json::parse(R"({
        "dataset": "d.csv", "format": "dgb",
        "models": ["persistence"], "strategies": ["positive"],
        "norms": ["minmax"], "tasks": ["classification"],
        "range": [-1.0, 2.0], "neg_ratio": 0.5, "seeds": [4, 5],
        "top_decade": 3, "static_groups": 2, "jobs": 4,
        "train": {"learning_rate": 0.5, "dim": 3}
    })"));
    EXPECT_EQ(full.format, CsvFormat::dgb);
    ASSERT_EQ(full.models.size(), 1u);
    ASSERT_EQ(full.strategies.size(), 1u);
    EXPECT_EQ(full.strategies[0], TrainStrategy::positive_only);
    ASSERT_EQ(full.norms.size(), 1u);
    EXPECT_EQ(full.norms[0], NormMethod::minmax);
    ASSERT_EQ(full.tasks.size(), 1u);
    EXPECT_EQ(full.tasks[0], Task::classification);
    EXPECT_DOUBLE_EQ(full.range_lo, -1.0);
    EXPECT_DOUBLE_EQ(full.range_hi, 2.0);
    EXPECT_DOUBLE_EQ(full.neg_ratio, 0.5);
    EXPECT_EQ(full.seeds, (std::vector<std::uint64_t>{4, 5}));
    EXPECT_EQ(full.top_decade, 3);
    EXPECT_EQ(full.static_groups, 2);
    EXPECT_EQ(full.jobs, 4);
    EXPECT_DOUBLE_EQ(full.train.learning_rate, 0.5);
    EXPECT_EQ(full.train.dim, 3);

    // Round trip through the canonical form.
    const MatrixConfig again = MatrixConfig::from_json(full.to_json());
    EXPECT_EQ(again.to_json().dump(), full.to_json().dump());
}

std::string write_constant_dataset(const TempDir& dir) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::constant, 8, 8, 0.5, 1);
    const std::string csv = dir.file("dataset.csv");
    serialize_graph(graph, csv, dir.file("dataset.json"));
    return csv;
}

TEST(RunMatrix, WritesReportsSummariesAndIndex) {
    const TempDir dir;
    const TempDir out;
    MatrixConfig config;
    config.dataset = write_constant_dataset(dir);
    config.models = {"mean", "persistence"};
    config.tasks = {Task::regression};
    config.split.train = 6;
    config.split.val = 1;
    config.split.test = 1;
    config.seeds = {0, 1};
    config.out_dir = out.path();
    config.jobs = 2;

    const MatrixResult result = run_matrix(config);
    EXPECT_EQ(result.exit_code(), 0);
    EXPECT_EQ(result.failed_count(), 0);
    ASSERT_EQ(result.cells.size(), 2u);
    EXPECT_EQ(result.dataset_hash, dataset_fingerprint(config.dataset));

    namespace fs = std::filesystem;
    ASSERT_TRUE(fs::exists(fs::path(out.path()) / "matrix.json"));
    ASSERT_TRUE(
        fs::exists(fs::path(out.path()) / "summary-regression-all.csv"));
    for (const CellResult& cell : result.cells) {
        const std::string file =
            "report-" + cell_slug(cell.config, cell.fingerprint) + ".json";
        EXPECT_TRUE(fs::exists(fs::path(out.path()) / file)) << file;
    }

    const nlohmann::json index =
        nlohmann::json::parse(read_file((fs::path(out.path()) / "matrix.json").string()));
    EXPECT_EQ(index.at("failed"), 0);
    EXPECT_EQ(index.at("dataset_hash"), result.dataset_hash);
    ASSERT_EQ(index.at("cells").size(), 2u);
    EXPECT_EQ(index.at("cells")[0].at("status"), "ok");

    const std::string summary =
        read_file((fs::path(out.path()) / "summary-regression-all.csv").string());
    EXPECT_EQ(summary.rfind("model,strategy,log/positive,log/overall\n", 0), 0u);
    EXPECT_NE(summary.find("\nmean,positive_only,"), std::string::npos);
    EXPECT_NE(summary.find("\npersistence,positive_only,"), std::string::npos);
}

TEST(RunMatrix, RerunningTheSameConfigIsByteIdentical) {
    const TempDir dir;
    const TempDir out;
    MatrixConfig config;
    config.dataset = write_constant_dataset(dir);
    config.models = {"mean", "persistence", "static_linear"};
    config.tasks = {Task::regression, Task::classification};
    config.split.train = 6;
    config.split.val = 1;
    config.split.test = 1;
    config.seeds = {0, 1};
    config.out_dir = out.path();
    config.jobs = 3;

    run_matrix(config);
    std::map<std::string, std::string> first;
    namespace fs = std::filesystem;
    for (const auto& entry : fs::directory_iterator(out.path()))
        first[entry.path().filename().string()] = read_file(entry.path().string());
    ASSERT_FALSE(first.empty());

    run_matrix(config);
    std::map<std::string, std::string> second;
    for (const auto& entry : fs::directory_iterator(out.path()))
        second[entry.path().filename().string()] = read_file(entry.path().string());

    EXPECT_EQ(first, second);
}

TEST(RunMatrix, MixedOutcomesProducePartialFailureExitCode) {
    const TempDir dir;
    // All weights identical: the min-max cell degenerates, the log cell works.
    const TemporalGraph flat = make_graph(
        {{0, 1, 0, 5.0}, {1, 2, 0, 5.0}, {0, 1, 1, 5.0}, {0, 2, 2, 5.0}});
    const std::string csv = dir.file("flat.csv");
    serialize_graph(flat, csv, dir.file("flat.json"));

    const TempDir out;
    MatrixConfig config;
    config.dataset = csv;
    config.models = {"persistence"};
    config.tasks = {Task::regression};
    config.norms = {NormMethod::log, NormMethod::minmax};
    config.split.train = 1;
    config.split.val = 1;
    config.split.test = 1;
    config.mask_fraction = 0.0;
    config.out_dir = out.path();
    config.jobs = 1;

    const MatrixResult mixed = run_matrix(config);
    EXPECT_EQ(mixed.failed_count(), 1);
    EXPECT_EQ(mixed.exit_code(), 2);

    MatrixConfig all_fail = config;
    all_fail.norms = {NormMethod::minmax};
    const MatrixResult failed = run_matrix(all_fail);
    EXPECT_EQ(failed.failed_count(), 1);
    EXPECT_EQ(failed.exit_code(), 1);
}

TEST(SummaryCsv, LeavesBlanksForMissingCells) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::constant, 8, 8, 0.5, 1);
    RunConfig run = constant_stream_config();
    run.mask_fraction = 0.0;
    const CellResult ok = run_cell(run, graph, "hash");
    ASSERT_FALSE(ok.failed());

    MatrixConfig config;
    config.norms = {NormMethod::log};
    const std::string csv = summary_csv(config, {ok}, Task::regression, "all");
    EXPECT_EQ(csv.rfind("model,strategy,log/positive,log/overall\n", 0), 0u);
    EXPECT_NE(csv.find("\npersistence,positive_only,"), std::string::npos);

    // The masked scopes were never evaluated, so their table is all blanks.
    const std::string blanks = summary_csv(config, {ok}, Task::regression, "new");
    EXPECT_NE(blanks.find("\npersistence,positive_only,,\n"), std::string::npos);

    // No cells for the task at all: no table.
    EXPECT_TRUE(summary_csv(config, {ok}, Task::classification, "all").empty());
}

TEST(Histogram, LogScaleEmitsOneBinPerDecade) {
    const TemporalGraph graph =
        make_graph({{0, 1, 0, 1.0}, {0, 1, 1, 10.0}, {0, 1, 2, 100.0}});
    const std::string csv = histogram_csv(graph, 99, HistScale::log);
    EXPECT_EQ(csv, "lower_edge,count\n0.10000000000000001,1\n1,1\n10,1\n");

    // Empty decades between the extremes still get rows.
    const TemporalGraph gappy =
        make_graph({{0, 1, 0, 0.5}, {0, 1, 1, 0.6}, {0, 1, 2, 500.0}});
    const std::string gap_csv = histogram_csv(gappy, 1, HistScale::log);
    EXPECT_EQ(gap_csv, "lower_edge,count\n0.10000000000000001,2\n1,0\n10,0\n100,1\n");

    const TemporalGraph single =
        make_graph({{0, 1, 0, 5.0}, {0, 1, 1, 5.0}, {0, 1, 2, 5.0}});
    EXPECT_EQ(histogram_csv(single, 1, HistScale::log), "lower_edge,count\n1,3\n");
}

TEST(Histogram, LinearScaleUsesEqualWidthBins) {
    const TemporalGraph graph =
        make_graph({{0, 1, 0, 1.0}, {0, 1, 1, 2.0}, {0, 1, 2, 3.0}});
    EXPECT_EQ(histogram_csv(graph, 2, HistScale::linear),
              "lower_edge,count\n1,1\n2,2\n");
    EXPECT_EQ(histogram_csv(graph, 1, HistScale::linear), "lower_edge,count\n1,3\n");
    EXPECT_THROW(histogram_csv(graph, 0, HistScale::linear), std::runtime_error);

    const TemporalGraph empty;
    EXPECT_THROW(histogram_csv(empty, 1, HistScale::linear), std::runtime_error);

    EXPECT_EQ(hist_scale_from_string("log"), HistScale::log);
    EXPECT_EQ(hist_scale_from_string("linear"), HistScale::linear);
    EXPECT_THROW(hist_scale_from_string("sqrt"), std::runtime_error);

    const TempDir dir;
    const std::string path = dir.file("hist.csv");
    emit_histogram(graph, 2, HistScale::linear, path);
    EXPECT_EQ(read_file(path), "lower_edge,count\n1,1\n2,2\n");
}

}  // namespace
}  // namespace tger
