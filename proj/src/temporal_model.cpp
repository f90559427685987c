#include "tger/temporal_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "tger/rng.hpp"

namespace tger {

namespace {

constexpr std::uint64_t kInitStreamTag = 0x74696e69;  // "init"

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double decay_factor(const ModelParams& params, const std::vector<Timestamp>& last_update,
                    NodeId v, Timestamp t) {
    if (last_update.empty()) return 1.0;
    const Timestamp seen = last_update[static_cast<std::size_t>(v)];
    if (seen < 0 || t <= seen) return 1.0;
    return std::pow(params.decay, static_cast<double>(t - seen));
}

void check_node(const ModelParams& params, NodeId v) {
    if (v < 0 || static_cast<std::size_t>(v) >= params.node_count())
        throw std::runtime_error("model error: node " + std::to_string(v) +
                                 " outside the trained registry of " +
                                 std::to_string(params.node_count()) + " nodes");
}

double score_linear(const ModelParams& params, const std::vector<Timestamp>& last_update,
                    NodeId s, NodeId d, Timestamp t) {
    const auto dim = static_cast<std::size_t>(params.dim);
    const double fs = decay_factor(params, last_update, s, t);
    const double fd = decay_factor(params, last_update, d, t);
    const double* zs = params.embeddings.data() + static_cast<std::size_t>(s) * dim;
    const double* zd = params.embeddings.data() + static_cast<std::size_t>(d) * dim;
    double prod = 0.0;
    for (std::size_t k = 0; k < dim; ++k) prod += zs[k] * zd[k];
    return fs * fd * prod + params.node_bias[static_cast<std::size_t>(s)] +
           params.node_bias[static_cast<std::size_t>(d)] + params.global_bias;
}

/// Mean-reduced batch MSE; when grads is non-null, accumulates the analytic
/// gradient into (d_embeddings, d_node_bias, d_global_bias) laid out like the
/// parameters.
struct Gradients {
    std::unordered_map<NodeId, std::vector<double>> d_embeddings;
    std::unordered_map<NodeId, double> d_node_bias;
    double d_global_bias = 0.0;
};

double batch_loss(const ModelParams& params, const std::vector<Timestamp>& last_update,
                  const Sample* batch, std::size_t count, Gradients* grads) {
    const auto dim = static_cast<std::size_t>(params.dim);
    double loss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const Sample& sample = batch[i];
        const double u = score_linear(params, last_update, sample.source,
                                      sample.destination, sample.timestamp);
        const double p = softplus(u);
        const double err = p - sample.target;
        loss += err * err;
        if (grads == nullptr) continue;

        const double du = 2.0 * err * logistic(u) / static_cast<double>(count);
        const double fs = decay_factor(params, last_update, sample.source, sample.timestamp);
        const double fd =
            decay_factor(params, last_update, sample.destination, sample.timestamp);
        const double* zs =
            params.embeddings.data() + static_cast<std::size_t>(sample.source) * dim;
        const double* zd =
            params.embeddings.data() + static_cast<std::size_t>(sample.destination) * dim;

        auto& gs = grads->d_embeddings[sample.source];
        if (gs.empty()) gs.assign(dim, 0.0);
        auto& gd = grads->d_embeddings[sample.destination];
        if (gd.empty()) gd.assign(dim, 0.0);
        // ∂u/∂z_s[k] = f_s f_d z_d[k]; the symmetric term accumulates into the
        // destination row, which for a self-pair lands on the same node twice.
        for (std::size_t k = 0; k < dim; ++k) {
            gs[k] += du * fs * fd * zd[k];
            gd[k] += du * fs * fd * zs[k];
        }
        grads->d_node_bias[sample.source] += du;
        grads->d_node_bias[sample.destination] += du;
        grads->d_global_bias += du;
    }
    return loss / static_cast<double>(count);
}

}  // namespace

TemporalModel::TemporalModel(ModelParams params, std::vector<Timestamp> last_update,
                             Normalizer normalizer, std::vector<EpochRecord> trace)
    : params_(std::move(params)),
      last_update_(std::move(last_update)),
      normalizer_(std::move(normalizer)),
      trace_(std::move(trace)) {}

double predict_score(const ModelParams& params, const std::vector<Timestamp>& last_update,
                     NodeId source, NodeId destination, Timestamp t) {
    check_node(params, source);
    check_node(params, destination);
    return softplus(score_linear(params, last_update, source, destination, t));
}

double TemporalModel::predict_value(const Sample& query) const {
    return predict_score(params_, last_update_, query.source, query.destination,
                         query.timestamp);
}

int TemporalModel::predict_class(const Sample& query, const BucketSpec& spec) const {
    const double raw =
        normalizer_.invert(predict_value(query), query.source, query.timestamp);
    return classify_raw_prediction(raw, spec);
}

TemporalModel train_temporal(const TemporalGraph& graph, const SplitSpec& split,
                             const SampleSet& samples, const TrainConfig& config,
                             std::uint64_t seed, const Normalizer& normalizer) {
    if (config.learning_rate < 0)
        throw std::runtime_error("train error: learning rate must be non-negative");
    if (config.batch_size < 1)
        throw std::runtime_error("train error: batch size must be at least 1");
    if (config.max_epochs < 1)
        throw std::runtime_error("train error: max epochs must be at least 1");
    if (config.patience < 1)
        throw std::runtime_error("train error: patience must be at least 1");
    if (config.dim < 1)
        throw std::runtime_error("train error: embedding dimension must be at least 1");
    if (config.decay < 0.0 || config.decay > 1.0)
        throw std::runtime_error("train error: decay must lie in [0,1]");
    if (samples.samples.empty())
        throw std::runtime_error("train error: empty training sample set");

    const std::size_t n = graph.node_count();
    const auto dim = static_cast<std::size_t>(config.dim);

    ModelParams params;
    params.dim = config.dim;
    params.decay = config.decay;
    params.embeddings.resize(n * dim);
    params.node_bias.assign(n, 0.0);
    Rng init_rng = Rng::keyed(seed, kInitStreamTag);
    for (double& w : params.embeddings) w = init_rng.normal() * config.init_scale;

    // Snapshot buckets in chronological order (samples arrive ordered by
    // timestamp).
    std::vector<std::pair<Timestamp, std::vector<Sample>>> buckets;
    for (const Sample& s : samples.samples) {
        if (buckets.empty() || buckets.back().first != s.timestamp)
            buckets.emplace_back(s.timestamp, std::vector<Sample>{});
        buckets.back().second.push_back(s);
    }

    const SampleSet val_set = build_eval_samples(graph, split, EvalRegime::positive,
                                                 NodeScope::all, 0, normalizer,
                                                 SplitSpec::Region::val);

    std::vector<Timestamp> last_update(n, -1);
    std::vector<Sample> batch(static_cast<std::size_t>(config.batch_size));
    std::vector<Sample> ordered;

    double best_val = std::numeric_limits<double>::infinity();
    ModelParams best_params;
    std::vector<Timestamp> best_state;
    std::vector<EpochRecord> trace;
    int bad_epochs = 0;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::fill(last_update.begin(), last_update.end(), Timestamp{-1});
        double sq_err_sum = 0.0;
        std::size_t seen = 0;
        int batch_index = 0;

        for (const auto& [t, bucket] : buckets) {
            ordered = bucket;
            Rng shuffle_rng =
                Rng::keyed(seed, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(t));
            shuffle_rng.shuffle(ordered);

            for (std::size_t start = 0; start < ordered.size();
                 start += static_cast<std::size_t>(config.batch_size)) {
                const std::size_t count =
                    std::min(ordered.size() - start, static_cast<std::size_t>(config.batch_size));
                ++batch_index;
                Gradients grads;
                const double loss =
                    batch_loss(params, last_update, ordered.data() + start, count, &grads);
                if (!std::isfinite(loss))
                    throw std::runtime_error("training diverged at epoch " +
                                             std::to_string(epoch) + ", batch " +
                                             std::to_string(batch_index) +
                                             ": loss is not finite");
                sq_err_sum += loss * static_cast<double>(count);
                seen += count;

                for (const auto& [v, g] : grads.d_embeddings) {
                    double* z = params.embeddings.data() + static_cast<std::size_t>(v) * dim;
                    for (std::size_t k = 0; k < dim; ++k)
                        z[k] -= config.learning_rate * g[k];
                }
                for (const auto& [v, g] : grads.d_node_bias)
                    params.node_bias[static_cast<std::size_t>(v)] -= config.learning_rate * g;
                params.global_bias -= config.learning_rate * grads.d_global_bias;
            }

            // Gradient-free memory update from this snapshot's events: read
            // all partner memories first, then write, so the update is
            // simultaneous.
            std::unordered_map<NodeId, std::vector<double>> pulled;
            std::unordered_map<NodeId, int> incident;
            for (const Sample& s : bucket) {
                if (!s.is_positive) continue;
                auto& ps = pulled[s.source];
                if (ps.empty()) ps.assign(dim, 0.0);
                auto& pd = pulled[s.destination];
                if (pd.empty()) pd.assign(dim, 0.0);
                const double* zs =
                    params.embeddings.data() + static_cast<std::size_t>(s.source) * dim;
                const double* zd =
                    params.embeddings.data() + static_cast<std::size_t>(s.destination) * dim;
                for (std::size_t k = 0; k < dim; ++k) {
                    ps[k] += s.target * zd[k];
                    pd[k] += s.target * zs[k];
                }
                ++incident[s.source];
                ++incident[s.destination];
            }
            for (const auto& [v, pull] : pulled) {
                double* z = params.embeddings.data() + static_cast<std::size_t>(v) * dim;
                const double share = 1.0 / static_cast<double>(incident[v]);
                for (std::size_t k = 0; k < dim; ++k)
                    z[k] = config.decay * z[k] + (1.0 - config.decay) * pull[k] * share;
                last_update[static_cast<std::size_t>(v)] = t;
            }
        }

        double val_sq = 0.0;
        for (const Sample& s : val_set.samples) {
            const double err =
                predict_score(params, last_update, s.source, s.destination, s.timestamp) -
                s.target;
            val_sq += err * err;
        }
        const double val_mse = val_sq / static_cast<double>(val_set.samples.size());
        trace.push_back(EpochRecord{epoch, sq_err_sum / static_cast<double>(seen), val_mse});

        if (val_mse < best_val) {
            best_val = val_mse;
            best_params = params;
            best_state = last_update;
            bad_epochs = 0;
        } else if (++bad_epochs >= config.patience) {
            break;
        }
    }

    return TemporalModel(std::move(best_params), std::move(best_state), normalizer,
                         std::move(trace));
}

double check_gradients(const ModelParams& params, const std::vector<Sample>& batch,
                       double epsilon, const std::vector<Timestamp>& last_update) {
    if (batch.empty()) throw std::runtime_error("gradient check error: empty batch");
    if (!(epsilon > 0.0) || epsilon > 1e-3)
        throw std::runtime_error("gradient check error: epsilon must lie in (0, 1e-3]");

    Gradients grads;
    batch_loss(params, last_update, batch.data(), batch.size(), &grads);

    const auto dim = static_cast<std::size_t>(params.dim);
    const std::size_t n = params.node_count();
    const std::size_t total = n * dim + n + 1;

    ModelParams probe = params;
    const auto loss_at = [&](std::size_t index, double delta) {
        double* slot = nullptr;
        if (index < n * dim)
            slot = &probe.embeddings[index];
        else if (index < n * dim + n)
            slot = &probe.node_bias[index - n * dim];
        else
            slot = &probe.global_bias;
        const double saved = *slot;
        *slot = saved + delta;
        const double loss = batch_loss(probe, last_update, batch.data(), batch.size(), nullptr);
        *slot = saved;
        return loss;
    };

    double worst = 0.0;
    for (std::size_t index = 0; index < total; ++index) {
        double analytic = 0.0;
        if (index < n * dim) {
            const auto v = static_cast<NodeId>(index / dim);
            const auto it = grads.d_embeddings.find(v);
            if (it != grads.d_embeddings.end()) analytic = it->second[index % dim];
        } else if (index < n * dim + n) {
            const auto v = static_cast<NodeId>(index - n * dim);
            const auto it = grads.d_node_bias.find(v);
            if (it != grads.d_node_bias.end()) analytic = it->second;
        } else {
            analytic = grads.d_global_bias;
        }
        const double numeric =
            (loss_at(index, epsilon) - loss_at(index, -epsilon)) / (2.0 * epsilon);
        const double err =
            std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

namespace {

constexpr char kMagic[4] = {'T', 'G', 'E', 'R'};
constexpr std::uint8_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in.good()) throw std::runtime_error("checkpoint error: truncated file: " + path);
    return value;
}

}  // namespace

void TemporalModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open())
        throw std::runtime_error("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint32_t>(params_.dim));
    write_raw(out, static_cast<std::uint32_t>(params_.node_count()));
    write_raw(out, params_.decay);
    write_raw(out, params_.global_bias);
    for (const double v : params_.embeddings) write_raw(out, v);
    for (const double v : params_.node_bias) write_raw(out, v);
    for (const Timestamp t : last_update_) write_raw(out, static_cast<std::int64_t>(t));
    if (!out.good()) throw std::runtime_error("write failure on checkpoint: " + path);
    out.close();

    nlohmann::json meta;
    meta["format"] = "tger-checkpoint";
    meta["version"] = kVersion;
    meta["dim"] = params_.dim;
    meta["node_count"] = params_.node_count();
    meta["decay"] = params_.decay;
    meta["normalization"] = to_string(normalizer_.method());
    meta["epochs_trained"] = trace_.size();
    if (!trace_.empty()) {
        double best = trace_.front().val_mse;
        for (const EpochRecord& r : trace_) best = std::min(best, r.val_mse);
        meta["best_val_mse"] = best;
    }
    std::ofstream side(path + ".json");
    if (!side.is_open())
        throw std::runtime_error("cannot open checkpoint sidecar for writing: " + path +
                                 ".json");
    side << meta.dump(2) << '\n';
    if (!side.good())
        throw std::runtime_error("write failure on checkpoint sidecar: " + path + ".json");
}

TemporalModel TemporalModel::load(const std::string& path, Normalizer normalizer) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw std::runtime_error("cannot open checkpoint: " + path);

    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in.good() || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint error: bad magic bytes: " + path);
    const auto version = read_raw<std::uint8_t>(in, path);
    if (version != kVersion)
        throw std::runtime_error("checkpoint error: unsupported version " +
                                 std::to_string(version) + ": " + path);

    ModelParams params;
    params.dim = static_cast<int>(read_raw<std::uint32_t>(in, path));
    const auto n = read_raw<std::uint32_t>(in, path);
    if (params.dim < 1)
        throw std::runtime_error("checkpoint error: non-positive dimension: " + path);
    params.decay = read_raw<double>(in, path);
    params.global_bias = read_raw<double>(in, path);
    params.embeddings.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(params.dim));
    for (double& v : params.embeddings) v = read_raw<double>(in, path);
    params.node_bias.resize(n);
    for (double& v : params.node_bias) v = read_raw<double>(in, path);
    std::vector<Timestamp> last_update(n);
    for (Timestamp& t : last_update)
        t = static_cast<Timestamp>(read_raw<std::int64_t>(in, path));
    in.peek();
    if (!in.eof()) throw std::runtime_error("checkpoint error: trailing bytes: " + path);

    return TemporalModel(std::move(params), std::move(last_update), std::move(normalizer));
}

}  // namespace tger
