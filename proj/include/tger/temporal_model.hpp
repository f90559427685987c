#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tger/edge_stream.hpp"
#include "tger/evaluation.hpp"
#include "tger/normalization.hpp"
#include "tger/sampling.hpp"

namespace tger {

/// Learned state of the memory-embedding regressor. A query (s, d, t) scores
/// softplus(ẑ_s·ẑ_d + b_s + b_d + c), where ẑ_v is the node's memory decayed
/// by decay^(t − last update of v); softplus keeps predictions strictly
/// positive to match non-negative targets.
struct ModelParams {
    int dim = 16;
    double decay = 0.9;
    double global_bias = 0.0;
    std::vector<double> embeddings;  // node_count × dim, row-major
    std::vector<double> node_bias;   // node_count

    std::size_t node_count() const { return node_bias.size(); }
};

struct TrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 200;
    int max_epochs = 50;
    int patience = 5;
    int dim = 16;
    double decay = 0.9;
    double init_scale = 0.1;
    TrainStrategy strategy = TrainStrategy::positive_only;
    double neg_ratio = 1.0;
    std::vector<std::uint64_t> seeds = {0, 1, 2};  // loss is fixed to MSE
};

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_mse = 0.0;
    double val_mse = 0.0;
};

/// A trained model frozen at its best validation epoch, carrying the memory
/// state (per-node last-update timestamps) reached at that point. Prediction
/// is pure; evaluation-time events never update the memories.
class TemporalModel final : public Predictor {
public:
    TemporalModel() = default;
    TemporalModel(ModelParams params, std::vector<Timestamp> last_update,
                  Normalizer normalizer, std::vector<EpochRecord> trace = {});

    std::string name() const override { return "temporal_memory"; }
    bool supports(Task) const override { return true; }
    double predict_value(const Sample& query) const override;
    int predict_class(const Sample& query, const BucketSpec& spec) const override;

    const ModelParams& params() const { return params_; }
    const std::vector<Timestamp>& last_update() const { return last_update_; }
    const std::vector<EpochRecord>& trace() const { return trace_; }

    /// Binary checkpoint (magic "TGER", version byte, dim, node count,
    /// little-endian doubles, then the memory-state timestamps) plus a JSON
    /// metadata sidecar at path + ".json".
    void save(const std::string& path) const;
    static TemporalModel load(const std::string& path, Normalizer normalizer);

private:
    ModelParams params_;
    std::vector<Timestamp> last_update_;
    Normalizer normalizer_;
    std::vector<EpochRecord> trace_;
};

/// Prediction from explicit parameters and memory state. Nodes the state has
/// never updated (entry < 0, or an empty state vector) read undecayed.
double predict_score(const ModelParams& params, const std::vector<Timestamp>& last_update,
                     NodeId source, NodeId destination, Timestamp t);

/// Chronological minibatch SGD on MSE. Each epoch walks the training
/// snapshots in order: shuffled minibatch steps over that snapshot's samples,
/// then the gradient-free memory update pulling each incident node's memory
/// toward the weight-scaled mean of its partners' memories, advancing the
/// node's last-update time. Early stopping tracks validation positive MSE
/// with the configured patience and returns the best epoch's model.
TemporalModel train_temporal(const TemporalGraph& graph, const SplitSpec& split,
                             const SampleSet& samples, const TrainConfig& config,
                             std::uint64_t seed, const Normalizer& normalizer);

/// Maximum relative error between analytic batch-MSE gradients and central
/// finite differences, over every optimized parameter (embeddings, node
/// biases, global bias): max |a−n| / max(1e-8, |a|+|n|).
double check_gradients(const ModelParams& params, const std::vector<Sample>& batch,
                       double epsilon, const std::vector<Timestamp>& last_update = {});

}  // namespace tger
