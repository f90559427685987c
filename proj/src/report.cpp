#include "tger/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tger/baselines.hpp"
#include "tger/static_collapse.hpp"

namespace tger {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

nlohmann::json split_to_json(const SplitRequest& split) {
    nlohmann::json j;
    if (split.policy == BoundaryPolicy::by_timestamp_count) {
        j["policy"] = "count";
        j["train"] = split.train;
        j["val"] = split.val;
        j["test"] = split.test;
    } else {
        j["policy"] = "fraction";
        j["train"] = split.train_frac;
        j["val"] = split.val_frac;
        j["test"] = split.test_frac;
    }
    return j;
}

SplitRequest split_from_json(const nlohmann::json& j) {
    SplitRequest split;
    if (j.is_array()) {
        if (j.size() != 3)
            throw std::runtime_error("config error: split array needs 3 entries");
        split.policy = BoundaryPolicy::by_timestamp_count;
        split.train = j[0].get<int>();
        split.val = j[1].get<int>();
        split.test = j[2].get<int>();
        return split;
    }
    const std::string policy = j.value("policy", "count");
    if (policy == "count") {
        split.policy = BoundaryPolicy::by_timestamp_count;
        split.train = j.value("train", 22);
        split.val = j.value("val", 6);
        split.test = j.value("test", 4);
    } else if (policy == "fraction") {
        split.policy = BoundaryPolicy::by_fraction;
        split.train_frac = j.value("train", 0.7);
        split.val_frac = j.value("val", 0.15);
        split.test_frac = j.value("test", 0.15);
    } else {
        throw std::runtime_error("config error: unknown split policy: " + policy);
    }
    return split;
}

nlohmann::json train_to_json(const TrainConfig& t) {
    nlohmann::json j;
    j["learning_rate"] = t.learning_rate;
    j["batch_size"] = t.batch_size;
    j["max_epochs"] = t.max_epochs;
    j["patience"] = t.patience;
    j["dim"] = t.dim;
    j["decay"] = t.decay;
    j["init_scale"] = t.init_scale;
    return j;
}

void train_from_json(const nlohmann::json& j, TrainConfig& t) {
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.max_epochs = j.value("max_epochs", t.max_epochs);
    t.patience = j.value("patience", t.patience);
    t.dim = j.value("dim", t.dim);
    t.decay = j.value("decay", t.decay);
    t.init_scale = j.value("init_scale", t.init_scale);
}

const char* format_name(CsvFormat format) {
    return format == CsvFormat::dgb ? "dgb" : "generic";
}

CsvFormat format_from_string(const std::string& name) {
    if (name == "generic") return CsvFormat::generic;
    if (name == "dgb") return CsvFormat::dgb;
    throw std::runtime_error("unknown dataset format: " + name);
}

void validate_model_name(const std::string& model) {
    static const char* known[] = {"mean",          "most",          "persistence",
                                  "historical_average", "static_linear", "temporal_memory"};
    for (const char* name : known)
        if (model == name) return;
    throw std::runtime_error("unknown model: " + model);
}

std::unique_ptr<Predictor> fit_unseeded_model(const RunConfig& config,
                                              const TemporalGraph& graph,
                                              const SplitSpec& split,
                                              const Normalizer& normalizer,
                                              const BucketSpec& spec) {
    if (config.model == "static_linear") {
        const CollapsedGraph collapsed =
            collapse(graph, split, SplitSpec::Region::train, normalizer);
        const auto targets =
            first_snapshot_targets(graph, split, SplitSpec::Region::test, normalizer);
        StaticFitConfig fit_config;
        fit_config.group_count = config.static_groups;
        return std::make_unique<StaticLinearModel>(
            fit_static_regressor(collapsed, targets, normalizer, fit_config));
    }
    return std::make_unique<Baseline>(fit_baseline(baseline_kind_from_string(config.model),
                                                   graph, split, normalizer, spec));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path);
    if (!file.is_open()) throw std::runtime_error("cannot open file for writing: " + path);
    file << content;
    if (!file.good()) throw std::runtime_error("write failure: " + path);
}

}  // namespace

std::string cell_slug(const RunConfig& config, const std::string& fingerprint) {
    return config.model + "-" + to_string(config.strategy) + "-" + to_string(config.norm) +
           "-" + to_string(config.task) + "-" + fingerprint.substr(0, 8);
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string fnv1a64_hex(const std::string& bytes) {
    return hex16(fnv1a64(bytes.data(), bytes.size()));
}

std::string dataset_fingerprint(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file.is_open()) throw std::runtime_error("cannot open dataset file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(file)),
                      std::istreambuf_iterator<char>());
    return "fnv1a64:" + fnv1a64_hex(bytes);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["dataset"] = dataset;
    j["format"] = format_name(format);
    j["norm"] = to_string(norm);
    j["range"] = {range_lo, range_hi};
    j["strategy"] = to_string(strategy);
    j["neg_ratio"] = neg_ratio;
    j["task"] = to_string(task);
    j["model"] = model;
    j["split"] = split_to_json(split);
    j["mask_fraction"] = mask_fraction;
    j["mask_seed"] = mask_seed;
    j["eval_seed"] = eval_seed;
    j["seeds"] = seeds;
    j["top_decade"] = top_decade;
    j["train"] = train_to_json(train);
    j["static_groups"] = static_groups;
    j["out_dir"] = out_dir;
    return j;
}

std::string RunConfig::fingerprint() const {
    nlohmann::json j = to_json();
    j.erase("out_dir");
    return fnv1a64_hex(j.dump());
}

bool model_supports_task(const std::string& model, Task task) {
    validate_model_name(model);
    if (model == "mean" || model == "historical_average") return task == Task::regression;
    if (model == "most") return task == Task::classification;
    return true;
}

bool model_uses_strategy(const std::string& model) { return model == "temporal_memory"; }

nlohmann::json CellResult::to_json() const {
    nlohmann::json j;
    j["config"] = config.to_json();
    j["fingerprint"] = fingerprint;
    j["dataset_hash"] = dataset_hash;
    j["scopes_skipped"] = scopes_skipped;
    if (failed())
        j["error"] = error;
    else
        j["report"] = report.to_json();
    return j;
}

CellResult run_cell(const RunConfig& config, const TemporalGraph& graph,
                    const std::string& dataset_hash, std::vector<TemporalModel>* trained) {
    CellResult cell;
    cell.config = config;
    cell.fingerprint = config.fingerprint();
    cell.dataset_hash = dataset_hash;
    try {
        if (config.seeds.empty()) throw std::runtime_error("config error: seeds are empty");
        if (!model_supports_task(config.model, config.task))
            throw std::runtime_error("task error: model '" + config.model +
                                     "' does not support " + to_string(config.task));

        SplitSpec split = chronological_split(graph, config.split);
        TemporalGraph masked_graph;
        const TemporalGraph* active = &graph;
        if (config.mask_fraction > 0.0) {
            auto [mg, msplit] =
                mask_new_nodes(graph, split, config.mask_fraction, config.mask_seed);
            masked_graph = std::move(mg);
            split = msplit;
            active = &masked_graph;
        }
        const TemporalGraph& g = *active;

        const Normalizer normalizer =
            Normalizer::fit(g, split, config.norm, config.range_lo, config.range_hi);

        int top = config.top_decade;
        if (top <= 0) {
            double max_raw = 0.0;
            for (Timestamp t : g.timestamps()) {
                if (split.region_of(t) != SplitSpec::Region::train) continue;
                for (const EdgeEvent& e : g.snapshot(t)) max_raw = std::max(max_raw, e.weight);
            }
            top = decades_spanned(max_raw);
        }
        const BucketSpec positive_spec{top, false};
        const BucketSpec overall_spec{top, true};

        struct EvalSlot {
            std::string label;  // "<regime>/<scope>"
            SampleSet set;
            BucketSpec spec;
        };
        std::vector<EvalSlot> slots;
        std::vector<NodeScope> scopes = {NodeScope::all};
        if (!split.new_nodes.empty()) {
            scopes.push_back(NodeScope::old_nodes);
            scopes.push_back(NodeScope::new_nodes);
        }
        for (const NodeScope scope : scopes) {
            for (const EvalRegime regime : {EvalRegime::positive, EvalRegime::overall}) {
                const std::string label = to_string(regime) + "/" + to_string(scope);
                try {
                    slots.push_back(EvalSlot{
                        label,
                        build_eval_samples(g, split, regime, scope, config.eval_seed,
                                           normalizer),
                        regime == EvalRegime::overall ? overall_spec : positive_spec});
                } catch (const std::exception& e) {
                    cell.scopes_skipped.push_back(label + ": " + e.what());
                }
            }
        }
        if (slots.empty())
            throw std::runtime_error("evaluation error: every scope came up empty");

        const auto eval_model = [&](const Predictor& model) {
            std::map<std::string, double> out;
            for (const EvalSlot& slot : slots)
                for (const auto& [metric, value] :
                     evaluate(model, slot.set, config.task, slot.spec))
                    out[slot.label + "/" + metric] = value;
            return out;
        };

        std::vector<std::map<std::string, double>> per_seed;
        if (config.model == "temporal_memory") {
            TrainConfig train = config.train;
            train.strategy = config.strategy;
            train.neg_ratio = config.neg_ratio;
            train.seeds = config.seeds;
            for (const std::uint64_t seed : config.seeds) {
                const SampleSet samples = build_training_samples(
                    g, split, config.strategy, config.neg_ratio, seed, normalizer);
                const TemporalModel model =
                    train_temporal(g, split, samples, train, seed, normalizer);
                per_seed.push_back(eval_model(model));
                if (trained != nullptr) trained->push_back(model);
            }
        } else {
            const auto model =
                fit_unseeded_model(config, g, split, normalizer, positive_spec);
            per_seed.assign(config.seeds.size(), eval_model(*model));
        }

        cell.report = aggregate_seeds(per_seed);
        cell.report.fingerprint = cell.fingerprint;
        for (const EvalSlot& slot : slots)
            cell.report.sample_counts[slot.label] =
                static_cast<std::int64_t>(slot.set.samples.size());
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

MatrixConfig MatrixConfig::from_json(const nlohmann::json& j) {
    MatrixConfig config;
    config.dataset = j.value("dataset", config.dataset);
    if (j.contains("format")) config.format = format_from_string(j.at("format"));
    if (j.contains("models")) config.models = j.at("models").get<std::vector<std::string>>();
    if (j.contains("strategies")) {
        config.strategies.clear();
        for (const auto& name : j.at("strategies"))
            config.strategies.push_back(train_strategy_from_string(name));
    }
    if (j.contains("norms")) {
        config.norms.clear();
        for (const auto& name : j.at("norms"))
            config.norms.push_back(norm_method_from_string(name));
    }
    if (j.contains("tasks")) {
        config.tasks.clear();
        for (const auto& name : j.at("tasks")) config.tasks.push_back(task_from_string(name));
    }
    if (j.contains("split")) config.split = split_from_json(j.at("split"));
    config.mask_fraction = j.value("mask_fraction", config.mask_fraction);
    config.mask_seed = j.value("mask_seed", config.mask_seed);
    config.eval_seed = j.value("eval_seed", config.eval_seed);
    if (j.contains("seeds"))
        config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    config.neg_ratio = j.value("neg_ratio", config.neg_ratio);
    if (j.contains("range")) {
        config.range_lo = j.at("range").at(0).get<double>();
        config.range_hi = j.at("range").at(1).get<double>();
    }
    config.top_decade = j.value("top_decade", config.top_decade);
    if (j.contains("train")) train_from_json(j.at("train"), config.train);
    config.static_groups = j.value("static_groups", config.static_groups);
    config.out_dir = j.value("out_dir", config.out_dir);
    config.jobs = j.value("jobs", config.jobs);
    return config;
}

nlohmann::json MatrixConfig::to_json() const {
    nlohmann::json j;
    j["dataset"] = dataset;
    j["format"] = format_name(format);
    j["models"] = models;
    nlohmann::json strategy_names = nlohmann::json::array();
    for (const TrainStrategy s : strategies) strategy_names.push_back(to_string(s));
    j["strategies"] = strategy_names;
    nlohmann::json norm_names = nlohmann::json::array();
    for (const NormMethod m : norms) norm_names.push_back(to_string(m));
    j["norms"] = norm_names;
    nlohmann::json task_names = nlohmann::json::array();
    for (const Task t : tasks) task_names.push_back(to_string(t));
    j["tasks"] = task_names;
    j["split"] = split_to_json(split);
    j["mask_fraction"] = mask_fraction;
    j["mask_seed"] = mask_seed;
    j["eval_seed"] = eval_seed;
    j["seeds"] = seeds;
    j["neg_ratio"] = neg_ratio;
    j["range"] = {range_lo, range_hi};
    j["top_decade"] = top_decade;
    j["train"] = train_to_json(train);
    j["static_groups"] = static_groups;
    j["out_dir"] = out_dir;
    j["jobs"] = jobs;
    return j;
}

std::vector<RunConfig> expand_matrix(const MatrixConfig& config) {
    std::vector<RunConfig> cells;
    for (const std::string& model : config.models) {
        validate_model_name(model);
        std::vector<TrainStrategy> strategies =
            model_uses_strategy(model) ? config.strategies
                                       : std::vector<TrainStrategy>{TrainStrategy::positive_only};
        for (const TrainStrategy strategy : strategies) {
            for (const NormMethod norm : config.norms) {
                for (const Task task : config.tasks) {
                    if (!model_supports_task(model, task)) continue;
                    RunConfig cell;
                    cell.dataset = config.dataset;
                    cell.format = config.format;
                    cell.norm = norm;
                    cell.range_lo = config.range_lo;
                    cell.range_hi = config.range_hi;
                    cell.strategy = strategy;
                    cell.neg_ratio = config.neg_ratio;
                    cell.task = task;
                    cell.model = model;
                    cell.split = config.split;
                    cell.mask_fraction = config.mask_fraction;
                    cell.mask_seed = config.mask_seed;
                    cell.eval_seed = config.eval_seed;
                    cell.seeds = config.seeds;
                    cell.top_decade = config.top_decade;
                    cell.train = config.train;
                    cell.static_groups = config.static_groups;
                    cell.out_dir = config.out_dir;
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

int MatrixResult::failed_count() const {
    int failed = 0;
    for (const CellResult& cell : cells)
        if (cell.failed()) ++failed;
    return failed;
}

int MatrixResult::exit_code() const {
    const int failed = failed_count();
    if (failed == 0) return 0;
    if (failed == static_cast<int>(cells.size())) return 1;
    return 2;
}

std::string summary_csv(const MatrixConfig& config, const std::vector<CellResult>& cells,
                        Task task, const std::string& scope) {
    const std::string metric = task == Task::regression ? "mse" : "accuracy";

    std::vector<std::pair<std::string, TrainStrategy>> rows;
    for (const CellResult& cell : cells) {
        if (cell.config.task != task) continue;
        const auto row = std::make_pair(cell.config.model, cell.config.strategy);
        if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    }
    if (rows.empty()) return {};

    std::string out = "model,strategy";
    for (const NormMethod norm : config.norms)
        for (const char* regime : {"positive", "overall"})
            out += "," + to_string(norm) + "/" + regime;
    out += '\n';

    const auto lookup = [&](const std::string& model, TrainStrategy strategy,
                            NormMethod norm, const char* regime) -> std::string {
        for (const CellResult& cell : cells) {
            if (cell.config.model != model || cell.config.strategy != strategy ||
                cell.config.norm != norm || cell.config.task != task)
                continue;
            if (cell.failed()) return {};
            const auto it =
                cell.report.metrics.find(std::string(regime) + "/" + scope + "/" + metric);
            if (it == cell.report.metrics.end()) return {};
            return format_double(it->second.mean);
        }
        return {};
    };

    for (const auto& [model, strategy] : rows) {
        out += model + "," + to_string(strategy);
        for (const NormMethod norm : config.norms)
            for (const char* regime : {"positive", "overall"})
                out += "," + lookup(model, strategy, norm, regime);
        out += '\n';
    }
    return out;
}

MatrixResult run_matrix(const MatrixConfig& config) {
    const TemporalGraph graph = ingest_csv(config.dataset, config.format);
    const std::string dataset_hash = dataset_fingerprint(config.dataset);
    const std::vector<RunConfig> grid = expand_matrix(config);
    if (grid.empty())
        throw std::runtime_error("matrix error: grid expands to zero valid cells");

    MatrixResult result;
    result.dataset_hash = dataset_hash;
    result.cells.resize(grid.size());

    unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                    : std::thread::hardware_concurrency();
    if (jobs == 0) jobs = 1;
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(grid.size()));

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            result.cells[i] = run_cell(grid[i], graph, dataset_hash);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);

    nlohmann::json index_cells = nlohmann::json::array();
    for (const CellResult& cell : result.cells) {
        const std::string file = "report-" + cell_slug(cell.config, cell.fingerprint) + ".json";
        write_text_file((fs::path(config.out_dir) / file).string(),
                        cell.to_json().dump(2) + "\n");
        nlohmann::json entry;
        entry["fingerprint"] = cell.fingerprint;
        entry["model"] = cell.config.model;
        entry["strategy"] = to_string(cell.config.strategy);
        entry["norm"] = to_string(cell.config.norm);
        entry["task"] = to_string(cell.config.task);
        entry["file"] = file;
        entry["status"] = cell.failed() ? "failed" : "ok";
        if (cell.failed()) entry["error"] = cell.error;
        index_cells.push_back(entry);
    }

    std::vector<Task> tasks;
    for (const CellResult& cell : result.cells)
        if (std::find(tasks.begin(), tasks.end(), cell.config.task) == tasks.end())
            tasks.push_back(cell.config.task);
    for (const Task task : tasks) {
        for (const char* scope : {"all", "old", "new"}) {
            bool present = false;
            for (const CellResult& cell : result.cells) {
                if (cell.config.task != task || cell.failed()) continue;
                for (const auto& [key, stat] : cell.report.metrics)
                    if (key.find("/" + std::string(scope) + "/") != std::string::npos) {
                        present = true;
                        break;
                    }
                if (present) break;
            }
            if (!present) continue;
            const std::string csv = summary_csv(config, result.cells, task, scope);
            if (csv.empty()) continue;
            write_text_file((fs::path(config.out_dir) /
                             ("summary-" + to_string(task) + "-" + scope + ".csv"))
                                .string(),
                            csv);
        }
    }

    nlohmann::json index;
    index["config"] = config.to_json();
    index["dataset_hash"] = dataset_hash;
    index["cells"] = index_cells;
    index["failed"] = result.failed_count();
    write_text_file((fs::path(config.out_dir) / "matrix.json").string(),
                    index.dump(2) + "\n");

    return result;
}

HistScale hist_scale_from_string(const std::string& name) {
    if (name == "linear") return HistScale::linear;
    if (name == "log") return HistScale::log;
    throw std::runtime_error("unknown histogram scale: " + name);
}

std::string histogram_csv(const TemporalGraph& graph, int bins, HistScale scale) {
    if (graph.events().empty())
        throw std::runtime_error("histogram error: graph holds no events");

    double min_w = graph.events().front().weight;
    double max_w = min_w;
    for (const EdgeEvent& e : graph.events()) {
        min_w = std::min(min_w, e.weight);
        max_w = std::max(max_w, e.weight);
    }

    std::string out = "lower_edge,count\n";
    if (scale == HistScale::log) {
        // Right-closed decade bins (10^{k-1}, 10^k], matching the magnitude
        // classes; `bins` is ignored.
        const auto decade = [](double w) {
            return static_cast<int>(std::ceil(std::log10(w) - 1e-12));
        };
        const int k_min = decade(min_w);
        const int k_max = decade(max_w);
        std::vector<std::int64_t> counts(static_cast<std::size_t>(k_max - k_min + 1), 0);
        for (const EdgeEvent& e : graph.events())
            ++counts[static_cast<std::size_t>(decade(e.weight) - k_min)];
        for (int k = k_min; k <= k_max; ++k) {
            out += format_double(std::pow(10.0, k - 1));
            out += ',';
            out += std::to_string(counts[static_cast<std::size_t>(k - k_min)]);
            out += '\n';
        }
        return out;
    }

    if (bins < 1) throw std::runtime_error("histogram error: bins must be at least 1");
    const double width = (max_w - min_w) / static_cast<double>(bins);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (const EdgeEvent& e : graph.events()) {
        std::size_t idx = 0;
        if (width > 0.0)
            idx = std::min(static_cast<std::size_t>((e.weight - min_w) / width),
                           static_cast<std::size_t>(bins - 1));
        ++counts[idx];
    }
    for (int i = 0; i < bins; ++i) {
        out += format_double(min_w + width * static_cast<double>(i));
        out += ',';
        out += std::to_string(counts[static_cast<std::size_t>(i)]);
        out += '\n';
    }
    return out;
}

void emit_histogram(const TemporalGraph& graph, int bins, HistScale scale,
                    const std::string& path) {
    write_text_file(path, histogram_csv(graph, bins, scale));
}

}  // namespace tger
