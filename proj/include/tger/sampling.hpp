#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tger/edge_stream.hpp"
#include "tger/normalization.hpp"

namespace tger {

/// One labeled (source, destination, timestamp, target) tuple. Targets are in
/// normalized space; negatives always carry target exactly 0. raw_weight keeps
/// the unnormalized value for magnitude classification (0 for negatives); it
/// is not part of the serialized form.
struct Sample {
    NodeId source = 0;
    NodeId destination = 0;
    Timestamp timestamp = 0;
    double target = 0.0;
    double raw_weight = 0.0;
    bool is_positive = false;
};

enum class TrainStrategy { positive_only, all_pairs, negative_sampling };
enum class EvalRegime { positive, overall };
enum class NodeScope { all, old_nodes, new_nodes };

TrainStrategy train_strategy_from_string(const std::string& name);
std::string to_string(TrainStrategy s);
EvalRegime eval_regime_from_string(const std::string& name);
std::string to_string(EvalRegime r);
NodeScope node_scope_from_string(const std::string& name);
std::string to_string(NodeScope s);

struct SampleSet {
    std::vector<Sample> samples;
    TrainStrategy strategy = TrainStrategy::positive_only;
    double neg_ratio = 1.0;
    std::uint64_t seed = 0;

    std::size_t positive_count() const;
};

/// Materializes training samples over the training region.
///
/// positive_only: the positive events, normalized.
/// all_pairs: per snapshot, every directed non-self pair over the nodes seen
///   at or before that snapshot; absent pairs carry target 0 (positive
///   self-loop events are outside the pair universe and are dropped here).
/// negative_sampling: positives plus floor(neg_ratio * positives) negatives
///   drawn uniformly over absent directed pairs, without replacement within a
///   snapshot (set with_replacement for the fidelity variant).
///
/// Output is ordered (timestamp, positives before negatives, input order) and
/// is a pure function of (graph, split, strategy, neg_ratio, seed).
SampleSet build_training_samples(const TemporalGraph& graph, const SplitSpec& split,
                                 TrainStrategy strategy, double neg_ratio,
                                 std::uint64_t seed, const Normalizer& normalizer,
                                 bool with_replacement = false);

/// Materializes evaluation samples over one region (test by default).
///
/// positive regime: the region's positive events, scope-filtered. overall
/// regime: those positives plus an equal count of absent directed pairs per
/// snapshot, drawn from the same scope class (old: both endpoints old, new: at
/// least one new endpoint), so every scoped set is exactly half positive and
/// the old and new sets partition the all-scope set draw for draw.
SampleSet build_eval_samples(const TemporalGraph& graph, const SplitSpec& split,
                             EvalRegime regime, NodeScope scope, std::uint64_t seed,
                             const Normalizer& normalizer,
                             SplitSpec::Region region = SplitSpec::Region::test);

/// CSV with header `source,destination,timestamp,target,is_positive`.
void write_samples_csv(const SampleSet& set, const std::string& path);
std::string samples_to_csv(const SampleSet& set);

}  // namespace tger
