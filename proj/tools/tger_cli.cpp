// tger — benchmark toolkit for temporal edge-weight regression and magnitude
// classification on timestamped edge streams.
//
// Subcommands: ingest, split, baseline, train, eval, matrix, synth, hist.
// Report-producing subcommands honor the TGER_OUT environment variable as the
// output directory when --out is not given.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tger/baselines.hpp"
#include "tger/edge_stream.hpp"
#include "tger/evaluation.hpp"
#include "tger/metrics.hpp"
#include "tger/normalization.hpp"
#include "tger/report.hpp"
#include "tger/sampling.hpp"
#include "tger/synthetic.hpp"
#include "tger/temporal_model.hpp"

namespace {

using namespace tger;

CsvFormat csv_format_from_string(const std::string& name) {
    if (name == "generic") return CsvFormat::generic;
    if (name == "dgb") return CsvFormat::dgb;
    throw std::runtime_error("format error: unknown csv format '" + name + "'");
}

SplitRequest make_split(const std::vector<int>& counts, const std::vector<double>& fracs) {
    SplitRequest request;
    if (!fracs.empty()) {
        request.policy = BoundaryPolicy::by_fraction;
        request.train_frac = fracs[0];
        request.val_frac = fracs[1];
        request.test_frac = fracs[2];
    } else if (!counts.empty()) {
        request.policy = BoundaryPolicy::by_timestamp_count;
        request.train = counts[0];
        request.val = counts[1];
        request.test = counts[2];
    }
    return request;
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

void ensure_parent_dir(const std::string& path) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& content) {
    ensure_parent_dir(path);
    std::ofstream file(path);
    if (!file.is_open()) throw std::runtime_error("cannot open file for writing: " + path);
    file << content;
    if (!file.good()) throw std::runtime_error("write failure: " + path);
}

void print_graph_summary(const TemporalGraph& graph) {
    std::cout << graph.events().size() << " events, " << graph.node_count() << " nodes, "
              << graph.timestamps().size() << " snapshots, " << graph.self_loop_count()
              << " self-loops\n";
}

void print_report(const EvalReport& report) {
    for (const auto& [label, stat] : report.metrics)
        std::printf("%-36s %.9g ± %.9g\n", label.c_str(), stat.mean, stat.stddev);
    for (const auto& [label, count] : report.sample_counts)
        std::printf("%-36s %lld samples\n", label.c_str(),
                    static_cast<long long>(count));
    if (report.single_seed) std::cout << "(single seed: stddev is 0 by definition)\n";
}

/// Flags shared by the cell-running subcommands (baseline, train).
struct CellOptions {
    std::string dataset;
    std::string format = "generic";
    std::string norm = "log";
    std::vector<double> range = {0.0, 1.0};
    std::string strategy = "positive";
    double neg_ratio = 1.0;
    std::string task;  // empty → regression, or classification for `most`
    std::string model;
    std::vector<int> split_counts = {22, 6, 4};
    std::vector<double> split_fracs;
    double mask_fraction = 0.1;
    std::uint64_t mask_seed = 0;
    std::uint64_t eval_seed = 0;
    std::vector<std::uint64_t> seeds = {0, 1, 2};
    int top_decade = 0;
    int static_groups = 0;
    TrainConfig train;
    std::string out = ".";
};

void add_cell_options(CLI::App* cmd, CellOptions& opt, bool with_train_knobs) {
    cmd->add_option("--dataset", opt.dataset, "edge stream CSV")->required();
    cmd->add_option("--format", opt.format, "csv format")
        ->check(CLI::IsMember({"generic", "dgb"}));
    cmd->add_option("--norm", opt.norm, "normalization method")
        ->check(CLI::IsMember({"log", "minmax", "degree", "node_degree"}));
    cmd->add_option("--range", opt.range, "min-max target range (lo hi)")->expected(2);
    cmd->add_option("--task", opt.task, "regression | classification")
        ->check(CLI::IsMember({"regression", "classification"}));
    auto* split_opt = cmd->add_option("--split", opt.split_counts,
                                      "train,val,test distinct-timestamp counts")
                          ->delimiter(',')
                          ->expected(3);
    cmd->add_option("--split-frac", opt.split_fracs,
                    "train,val,test fractions of distinct timestamps")
        ->delimiter(',')
        ->expected(3)
        ->excludes(split_opt);
    cmd->add_option("--mask-fraction", opt.mask_fraction,
                    "fraction of nodes masked from training as new nodes");
    cmd->add_option("--mask-seed", opt.mask_seed, "node-mask draw seed");
    cmd->add_option("--eval-seed", opt.eval_seed, "evaluation negative-draw seed");
    cmd->add_option("--seeds", opt.seeds, "training seeds")->delimiter(',');
    cmd->add_option("--top-decade", opt.top_decade,
                    "highest magnitude class (0 → from training data)");
    cmd->add_option("--out", opt.out, "output directory")->envname("TGER_OUT");
    if (with_train_knobs) {
        cmd->add_option("--strategy", opt.strategy, "training sample strategy")
            ->check(CLI::IsMember({"positive", "all", "negsample", "positive_only",
                                   "all_pairs", "negative_sampling"}));
        cmd->add_option("--neg-ratio", opt.neg_ratio,
                        "negatives per positive under negsample");
        cmd->add_option("--epochs", opt.train.max_epochs, "training epoch cap");
        cmd->add_option("--lr", opt.train.learning_rate, "SGD learning rate");
        cmd->add_option("--batch", opt.train.batch_size, "minibatch size");
        cmd->add_option("--patience", opt.train.patience, "early-stopping patience");
        cmd->add_option("--dim", opt.train.dim, "embedding dimension");
        cmd->add_option("--decay", opt.train.decay, "memory decay per timestamp step");
        cmd->add_option("--init-scale", opt.train.init_scale,
                        "embedding init normal scale");
        cmd->add_option("--groups", opt.static_groups,
                        "static regroup group count (0 → no regrouping)");
    }
}

RunConfig make_run_config(const CellOptions& opt) {
    RunConfig config;
    config.dataset = opt.dataset;
    config.format = csv_format_from_string(opt.format);
    config.norm = norm_method_from_string(opt.norm);
    config.range_lo = opt.range[0];
    config.range_hi = opt.range[1];
    config.strategy = train_strategy_from_string(opt.strategy);
    config.neg_ratio = opt.neg_ratio;
    config.task = opt.task.empty()
                      ? (opt.model == "most" ? Task::classification : Task::regression)
                      : task_from_string(opt.task);
    config.model = opt.model;
    config.split = make_split(opt.split_counts, opt.split_fracs);
    config.mask_fraction = opt.mask_fraction;
    config.mask_seed = opt.mask_seed;
    config.eval_seed = opt.eval_seed;
    config.seeds = opt.seeds;
    config.top_decade = opt.top_decade;
    config.train = opt.train;
    config.static_groups = opt.static_groups;
    config.out_dir = opt.out;
    return config;
}

/// Runs one cell, writes its JSON report into config.out_dir, prints the
/// aggregated metrics, and optionally saves per-seed checkpoints of trained
/// temporal models. Returns the process exit code.
int run_single_cell(const RunConfig& config, bool save_checkpoints) {
    const std::string dataset_hash = dataset_fingerprint(config.dataset);
    const TemporalGraph graph = ingest_csv(config.dataset, config.format);

    std::vector<TemporalModel> trained;
    const CellResult cell =
        run_cell(config, graph, dataset_hash,
                 save_checkpoints ? &trained : nullptr);

    ensure_dir(config.out_dir);
    const std::string slug = cell_slug(config, cell.fingerprint);
    const std::string report_path = join_path(config.out_dir, "report-" + slug + ".json");
    write_text_file(report_path, cell.to_json().dump(2) + "\n");

    for (const std::string& skipped : cell.scopes_skipped)
        std::cout << "skipped " << skipped << "\n";
    if (cell.failed()) {
        std::cerr << "error: cell " << cell.fingerprint << " failed: " << cell.error
                  << "\n";
        return 1;
    }
    print_report(cell.report);
    if (save_checkpoints && config.model == "temporal_memory") {
        for (std::size_t i = 0; i < trained.size(); ++i) {
            const std::uint64_t seed = config.seeds[i];
            const std::string path = join_path(
                config.out_dir, "checkpoint-" + slug + "-seed" + std::to_string(seed) +
                                    ".tger");
            trained[i].save(path);
            const auto& trace = trained[i].trace();
            double best_val = 0.0;
            for (const EpochRecord& r : trace)
                best_val = (r.epoch == 1 || r.val_mse < best_val) ? r.val_mse : best_val;
            std::cout << "seed " << seed << ": " << trace.size()
                      << " epochs, best val mse " << best_val << ", checkpoint " << path
                      << "\n";
        }
    }
    std::cout << "report written: " << report_path << "\n";
    return 0;
}

int cmd_ingest(const std::string& dataset, const std::string& format,
               const std::string& out) {
    const TemporalGraph graph = ingest_csv(dataset, csv_format_from_string(format));
    ensure_parent_dir(out + ".csv");
    serialize_graph(graph, out + ".csv", out + ".json");
    std::cout << "ingested " << dataset << " (" << dataset_fingerprint(dataset) << "): ";
    print_graph_summary(graph);
    std::cout << "wrote " << out << ".csv and " << out << ".json\n";
    return 0;
}

int cmd_split(const std::string& dataset, const std::string& format,
              const std::vector<int>& counts, const std::vector<double>& fracs,
              double mask_fraction, std::uint64_t mask_seed, const std::string& out) {
    const TemporalGraph full = ingest_csv(dataset, csv_format_from_string(format));
    SplitSpec split = chronological_split(full, make_split(counts, fracs));

    TemporalGraph masked;
    const TemporalGraph* active = &full;
    if (mask_fraction > 0.0) {
        auto [graph, masked_split] = mask_new_nodes(full, split, mask_fraction, mask_seed);
        masked = std::move(graph);
        split = masked_split;
        active = &masked;
    }

    std::size_t region_events[3] = {0, 0, 0};
    for (const EdgeEvent& event : active->events())
        ++region_events[static_cast<int>(split.region_of(event.timestamp))];
    std::cout << "split " << split.train_count << "/" << split.val_count << "/"
              << split.test_count << " timestamps; events train " << region_events[0]
              << ", val " << region_events[1] << ", test " << region_events[2] << "\n";
    if (mask_fraction > 0.0)
        std::cout << "masked " << split.new_nodes.size() << " new nodes, removed "
                  << full.events().size() - active->events().size()
                  << " training events\n";

    ensure_parent_dir(out + ".csv");
    serialize_graph(*active, out + ".csv", out + ".json", &split);
    std::cout << "wrote " << out << ".csv and " << out << ".json\n";
    return 0;
}

struct EvalOptions {
    std::string checkpoint;
    std::string dataset;
    std::string format = "generic";
    std::string norm = "log";
    std::vector<double> range = {0.0, 1.0};
    std::string task = "regression";
    std::string regime;  // empty → both
    std::string scope = "all";
    std::vector<int> split_counts = {22, 6, 4};
    std::vector<double> split_fracs;
    double mask_fraction = 0.1;
    std::uint64_t mask_seed = 0;
    std::uint64_t eval_seed = 0;
    int top_decade = 0;
    std::string out;  // empty → stdout only
};

int cmd_eval(const EvalOptions& opt) {
    const TemporalGraph full = ingest_csv(opt.dataset, csv_format_from_string(opt.format));
    SplitSpec split = chronological_split(full, make_split(opt.split_counts, opt.split_fracs));
    TemporalGraph masked;
    const TemporalGraph* active = &full;
    if (opt.mask_fraction > 0.0) {
        auto [graph, masked_split] =
            mask_new_nodes(full, split, opt.mask_fraction, opt.mask_seed);
        masked = std::move(graph);
        split = masked_split;
        active = &masked;
    }
    const TemporalGraph& g = *active;

    const NormMethod norm = norm_method_from_string(opt.norm);
    const Normalizer normalizer =
        Normalizer::fit(g, split, norm, opt.range[0], opt.range[1]);

    // The sidecar records the normalization the checkpoint was trained with;
    // evaluating under a different one would silently mis-scale everything.
    {
        std::ifstream side(opt.checkpoint + ".json");
        if (side.is_open()) {
            const nlohmann::json meta = nlohmann::json::parse(side);
            const std::string trained_norm = meta.value("normalization", "");
            if (!trained_norm.empty() && trained_norm != to_string(norm))
                throw std::runtime_error("checkpoint error: trained with '" +
                                         trained_norm + "' normalization but --norm is '" +
                                         to_string(norm) + "'");
        }
    }

    const TemporalModel model = TemporalModel::load(opt.checkpoint, normalizer);
    if (model.params().node_count() != g.node_count())
        throw std::runtime_error(
            "checkpoint error: checkpoint holds " +
            std::to_string(model.params().node_count()) + " nodes but the dataset has " +
            std::to_string(g.node_count()));

    int top = opt.top_decade;
    if (top <= 0) {
        double max_raw = 0.0;
        for (const Timestamp t : g.timestamps()) {
            if (split.region_of(t) != SplitSpec::Region::train) continue;
            for (const EdgeEvent& e : g.snapshot(t)) max_raw = std::max(max_raw, e.weight);
        }
        top = decades_spanned(max_raw);
    }

    const Task task = task_from_string(opt.task);
    const NodeScope scope = node_scope_from_string(opt.scope);
    std::vector<EvalRegime> regimes;
    if (opt.regime.empty())
        regimes = {EvalRegime::positive, EvalRegime::overall};
    else
        regimes = {eval_regime_from_string(opt.regime)};

    nlohmann::json out_metrics;
    for (const EvalRegime regime : regimes) {
        const BucketSpec spec{top, regime == EvalRegime::overall};
        const SampleSet set =
            build_eval_samples(g, split, regime, scope, opt.eval_seed, normalizer);
        const auto metrics = evaluate(model, set, task, spec);
        for (const auto& [name, value] : metrics) {
            const std::string label =
                to_string(regime) + "/" + to_string(scope) + "/" + name;
            std::printf("%-36s %.9g\n", label.c_str(), value);
            out_metrics[label] = value;
        }
    }

    if (!opt.out.empty()) {
        nlohmann::json j;
        j["checkpoint"] = opt.checkpoint;
        j["dataset"] = opt.dataset;
        j["dataset_hash"] = dataset_fingerprint(opt.dataset);
        j["norm"] = to_string(norm);
        j["task"] = to_string(task);
        j["top_decade"] = top;
        j["eval_seed"] = opt.eval_seed;
        j["metrics"] = out_metrics;
        ensure_dir(opt.out);
        const std::string path = join_path(
            opt.out,
            "eval-" + std::filesystem::path(opt.checkpoint).stem().string() + ".json");
        write_text_file(path, j.dump(2) + "\n");
        std::cout << "report written: " << path << "\n";
    }
    return 0;
}

int cmd_matrix(const std::string& config_path, const std::string& dataset,
               const std::string& out, int jobs) {
    std::ifstream file(config_path);
    if (!file.is_open())
        throw std::runtime_error("cannot open matrix config: " + config_path);
    MatrixConfig config = MatrixConfig::from_json(nlohmann::json::parse(file));
    if (!dataset.empty()) config.dataset = dataset;
    if (!out.empty()) config.out_dir = out;
    if (jobs >= 0) config.jobs = jobs;

    const MatrixResult result = run_matrix(config);
    for (const CellResult& cell : result.cells) {
        const std::string slug = cell_slug(cell.config, cell.fingerprint);
        if (cell.failed())
            std::cout << "FAIL " << slug << ": " << cell.error << "\n";
        else
            std::cout << "ok   " << slug << "\n";
    }
    std::cout << result.cells.size() << " cells, " << result.failed_count()
              << " failed; reports in " << config.out_dir << "\n";
    return result.exit_code();
}

int cmd_synth(const std::string& kind, int nodes, int timestamps, double density,
              std::uint64_t seed, double w0, double k, const std::string& out) {
    const TemporalGraph graph = generate_synthetic(synthetic_kind_from_string(kind), nodes,
                                                   timestamps, density, seed, w0, k);
    std::cout << "generated " << kind << " stream: ";
    print_graph_summary(graph);
    ensure_parent_dir(out + ".csv");
    serialize_graph(graph, out + ".csv", out + ".json");
    std::cout << "wrote " << out << ".csv and " << out << ".json\n";
    return 0;
}

int cmd_hist(const std::string& dataset, const std::string& format, int bins,
             const std::string& scale, const std::string& out) {
    const TemporalGraph graph = ingest_csv(dataset, csv_format_from_string(format));
    ensure_parent_dir(out);
    emit_histogram(graph, bins, hist_scale_from_string(scale), out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "tger — temporal edge-weight regression and magnitude-classification benchmark"};
    app.require_subcommand(1);
    int rc = 0;

    // ingest
    struct {
        std::string dataset, format = "generic", out = "dataset";
    } ingest;
    auto* ingest_cmd =
        app.add_subcommand("ingest", "parse an edge-stream CSV and re-serialize it");
    ingest_cmd->add_option("--dataset", ingest.dataset, "edge stream CSV")->required();
    ingest_cmd->add_option("--format", ingest.format, "csv format")
        ->check(CLI::IsMember({"generic", "dgb"}));
    ingest_cmd->add_option("--out", ingest.out, "output path prefix");
    ingest_cmd->callback(
        [&] { rc = cmd_ingest(ingest.dataset, ingest.format, ingest.out); });

    // split
    struct {
        std::string dataset, format = "generic", out = "split";
        std::vector<int> counts = {22, 6, 4};
        std::vector<double> fracs;
        double mask_fraction = 0.1;
        std::uint64_t mask_seed = 0;
    } split;
    auto* split_cmd = app.add_subcommand(
        "split", "chronological split with optional new-node masking");
    split_cmd->add_option("--dataset", split.dataset, "edge stream CSV")->required();
    split_cmd->add_option("--format", split.format, "csv format")
        ->check(CLI::IsMember({"generic", "dgb"}));
    auto* split_counts_opt =
        split_cmd
            ->add_option("--split", split.counts, "train,val,test timestamp counts")
            ->delimiter(',')
            ->expected(3);
    split_cmd
        ->add_option("--split-frac", split.fracs, "train,val,test timestamp fractions")
        ->delimiter(',')
        ->expected(3)
        ->excludes(split_counts_opt);
    split_cmd->add_option("--mask-fraction", split.mask_fraction,
                          "fraction of nodes masked from training (0 disables)");
    split_cmd->add_option("--mask-seed", split.mask_seed, "node-mask draw seed");
    split_cmd->add_option("--out", split.out, "output path prefix");
    split_cmd->callback([&] {
        rc = cmd_split(split.dataset, split.format, split.counts, split.fracs,
                       split.mask_fraction, split.mask_seed, split.out);
    });

    // baseline
    CellOptions baseline;
    baseline.model = "persistence";
    auto* baseline_cmd =
        app.add_subcommand("baseline", "fit and evaluate a deterministic baseline");
    baseline_cmd
        ->add_option("--model", baseline.model,
                     "mean | most | persistence | historical_average")
        ->check(CLI::IsMember({"mean", "most", "persistence", "historical_average"}));
    add_cell_options(baseline_cmd, baseline, /*with_train_knobs=*/false);
    baseline_cmd->callback(
        [&] { rc = run_single_cell(make_run_config(baseline), false); });

    // train
    CellOptions train;
    train.model = "temporal_memory";
    auto* train_cmd =
        app.add_subcommand("train", "train a model, evaluate it, save checkpoints");
    train_cmd->add_option("--model", train.model, "temporal_memory | static_linear")
        ->check(CLI::IsMember({"temporal_memory", "static_linear"}));
    add_cell_options(train_cmd, train, /*with_train_knobs=*/true);
    train_cmd->callback([&] { rc = run_single_cell(make_run_config(train), true); });

    // eval
    EvalOptions eval;
    auto* eval_cmd =
        app.add_subcommand("eval", "evaluate a saved checkpoint on a dataset");
    eval_cmd->add_option("--checkpoint", eval.checkpoint, "checkpoint path")->required();
    eval_cmd->add_option("--dataset", eval.dataset, "edge stream CSV")->required();
    eval_cmd->add_option("--format", eval.format, "csv format")
        ->check(CLI::IsMember({"generic", "dgb"}));
    eval_cmd->add_option("--norm", eval.norm, "normalization method")
        ->check(CLI::IsMember({"log", "minmax", "degree", "node_degree"}));
    eval_cmd->add_option("--range", eval.range, "min-max target range (lo hi)")
        ->expected(2);
    eval_cmd->add_option("--task", eval.task, "regression | classification")
        ->check(CLI::IsMember({"regression", "classification"}));
    eval_cmd->add_option("--regime", eval.regime, "positive | overall (default both)")
        ->check(CLI::IsMember({"positive", "overall"}));
    eval_cmd->add_option("--nodes", eval.scope, "node scope: all | old | new")
        ->check(CLI::IsMember({"all", "old", "new", "old_nodes", "new_nodes"}));
    auto* eval_split_opt =
        eval_cmd
            ->add_option("--split", eval.split_counts, "train,val,test timestamp counts")
            ->delimiter(',')
            ->expected(3);
    eval_cmd
        ->add_option("--split-frac", eval.split_fracs,
                     "train,val,test timestamp fractions")
        ->delimiter(',')
        ->expected(3)
        ->excludes(eval_split_opt);
    eval_cmd->add_option("--mask-fraction", eval.mask_fraction,
                         "fraction of nodes masked from training");
    eval_cmd->add_option("--mask-seed", eval.mask_seed, "node-mask draw seed");
    eval_cmd->add_option("--eval-seed", eval.eval_seed, "evaluation negative-draw seed");
    eval_cmd->add_option("--top-decade", eval.top_decade,
                         "highest magnitude class (0 → from training data)");
    eval_cmd->add_option("--out", eval.out, "report output directory")
        ->envname("TGER_OUT");
    eval_cmd->callback([&] { rc = cmd_eval(eval); });

    // matrix
    struct {
        std::string config, dataset, out;
        int jobs = -1;
    } matrix;
    auto* matrix_cmd =
        app.add_subcommand("matrix", "run a declarative grid of experiment cells");
    matrix_cmd->add_option("--config", matrix.config, "matrix config JSON")->required();
    matrix_cmd->add_option("--dataset", matrix.dataset, "override the config's dataset");
    matrix_cmd->add_option("--out", matrix.out, "override the output directory")
        ->envname("TGER_OUT");
    matrix_cmd->add_option("--jobs", matrix.jobs,
                           "worker pool size (0 → logical CPU count)");
    matrix_cmd->callback([&] {
        rc = cmd_matrix(matrix.config, matrix.dataset, matrix.out, matrix.jobs);
    });

    // synth
    struct {
        std::string kind = "constant", out = "synthetic";
        int nodes = 10, timestamps = 10;
        double density = 1.0, w0 = 1.0, k = 1.0;
        std::uint64_t seed = 0;
    } synth;
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a deterministic synthetic edge stream");
    synth_cmd->add_option("--kind", synth.kind, "constant | linear_trend | random_walk")
        ->check(CLI::IsMember({"constant", "linear_trend", "random_walk"}));
    synth_cmd->add_option("--node-count", synth.nodes, "node count (>= 2)");
    synth_cmd->add_option("--timestamps", synth.timestamps, "snapshot count (>= 3)");
    synth_cmd->add_option("--density", synth.density, "directed pair density in (0, 1]");
    synth_cmd->add_option("--seed", synth.seed, "generator seed");
    synth_cmd->add_option("--w0", synth.w0, "linear trend intercept");
    synth_cmd->add_option("--k", synth.k, "linear trend slope");
    synth_cmd->add_option("--out", synth.out, "output path prefix");
    synth_cmd->callback([&] {
        rc = cmd_synth(synth.kind, synth.nodes, synth.timestamps, synth.density,
                       synth.seed, synth.w0, synth.k, synth.out);
    });

    // hist
    struct {
        std::string dataset, format = "generic", scale = "log", out = "histogram.csv";
        int bins = 10;
    } hist;
    auto* hist_cmd = app.add_subcommand("hist", "emit a raw edge-weight histogram CSV");
    hist_cmd->add_option("--dataset", hist.dataset, "edge stream CSV")->required();
    hist_cmd->add_option("--format", hist.format, "csv format")
        ->check(CLI::IsMember({"generic", "dgb"}));
    hist_cmd->add_option("--bins", hist.bins, "bin count (linear scale only)");
    hist_cmd->add_option("--scale", hist.scale, "linear | log")
        ->check(CLI::IsMember({"linear", "log"}));
    hist_cmd->add_option("--out", hist.out, "output CSV path");
    hist_cmd->callback(
        [&] { rc = cmd_hist(hist.dataset, hist.format, hist.bins, hist.scale, hist.out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
