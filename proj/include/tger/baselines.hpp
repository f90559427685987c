#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "tger/edge_stream.hpp"
#include "tger/evaluation.hpp"
#include "tger/metrics.hpp"
#include "tger/normalization.hpp"

namespace tger {

/// The non-learned reference predictors:
///   mean               — one global value, the mean over training snapshots of
///                        each snapshot's mean normalized weight (regression).
///   most               — the modal magnitude class of the training weights
///                        (classification).
///   persistence        — a pair's last value/class seen in training (both
///                        tasks).
///   historical_average — a pair's training mean, sum over observation count
///                        (regression).
enum class BaselineKind { mean, most, persistence, historical_average };

BaselineKind baseline_kind_from_string(const std::string& name);
std::string to_string(BaselineKind kind);

/// Fitted baseline statistics. Values are stored in the fitting normalizer's
/// space; raw weights ride along so class predictions can be re-bucketized
/// under any evaluation BucketSpec (with or without a zero class).
class Baseline final : public Predictor {
public:
    struct LastSeen {
        Timestamp timestamp = 0;
        double normalized = 0.0;
        double raw = 0.0;
    };
    struct History {
        double normalized_sum = 0.0;
        std::int64_t count = 0;
    };

    std::string name() const override { return to_string(kind_); }
    bool supports(Task task) const override;
    double predict_value(const Sample& query) const override;
    int predict_class(const Sample& query, const BucketSpec& spec) const override;

    BaselineKind kind() const { return kind_; }
    double global_mean() const { return global_mean_; }
    /// Modal decade index (zero-class offset not applied).
    int global_mode_magnitude() const { return global_mode_magnitude_; }
    const std::unordered_map<std::uint64_t, LastSeen>& last_seen() const {
        return last_seen_;
    }
    const std::unordered_map<std::uint64_t, History>& history() const { return history_; }

private:
    friend Baseline fit_baseline(BaselineKind, const TemporalGraph&, const SplitSpec&,
                                 const Normalizer&, const BucketSpec&, bool, bool);

    BaselineKind kind_ = BaselineKind::mean;
    double global_mean_ = 0.0;
    int global_mode_magnitude_ = 0;
    double fallback_value_ = 0.0;
    std::unordered_map<std::uint64_t, LastSeen> last_seen_;
    std::unordered_map<std::uint64_t, History> history_;
};

/// Fits baseline statistics over the normalized positive training events
/// (negatives never enter fitting). Only spec.top_decade is consulted, for the
/// modal class histogram. pooled_mean replaces the snapshot mean-of-means with
/// one pooled mean over all training events. fallback_global_mean makes
/// unseen-pair regression queries fall back to the global mean instead of 0
/// (class queries always fall back to the lowest class: the zero class when
/// the evaluation spec has one).
Baseline fit_baseline(BaselineKind kind, const TemporalGraph& graph, const SplitSpec& split,
                      const Normalizer& normalizer, const BucketSpec& spec,
                      bool pooled_mean = false, bool fallback_global_mean = false);

}  // namespace tger
