#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tger/edge_stream.hpp"
#include "tger/evaluation.hpp"
#include "tger/normalization.hpp"

namespace tger {

/// One region of the temporal graph compressed into per-pair weight vectors:
/// entry i of a pair's vector is its normalized weight at the region's i-th
/// snapshot, zero when absent. Pairs that are absent everywhere stay implicit
/// (vector_for synthesizes their all-zero vector) unless collapse() ran dense.
/// Every node's feature is the same list of covered snapshot timestamps; it is
/// carried for completeness but consumed by no operation.
struct CollapsedGraph {
    std::vector<Timestamp> timestamps;
    std::unordered_map<std::uint64_t, std::vector<double>> edge_features;
    std::size_t length = 0;

    std::vector<double> vector_for(NodeId source, NodeId destination) const;
};

/// Collapses the given split region. dense materializes every directed
/// non-self pair over the node registry instead of only the observed ones.
CollapsedGraph collapse(const TemporalGraph& graph, const SplitSpec& split,
                        SplitSpec::Region region, const Normalizer& normalizer,
                        bool dense = false);

/// Contiguous group means: q groups over a length-p vector, the first p mod q
/// groups one element longer. q = p is the identity; q > p is an error.
std::vector<double> regroup(const std::vector<double>& values, int q);

std::string collapsed_to_csv(const CollapsedGraph& collapsed);
void write_collapsed_csv(const CollapsedGraph& collapsed, const std::string& path);

/// w·x + b fitted by steepest descent on the normal equations of the
/// least-squares objective, to a residual tolerance relative to the
/// right-hand side.
struct StaticFitConfig {
    int group_count = 0;  // q for regrouping history vectors; 0 keeps full length
    double tolerance = 1e-8;
    std::size_t max_iterations = 500000;
};

/// Linear map over a pair's regrouped history vector. Prediction is
/// time-independent; a pair with no positive history maps to the bias.
class StaticLinearModel final : public Predictor {
public:
    std::string name() const override { return "static_linear"; }
    bool supports(Task) const override { return true; }
    double predict_value(const Sample& query) const override;
    int predict_class(const Sample& query, const BucketSpec& spec) const override;

    double predict_features(const std::vector<double>& features) const;

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    std::size_t iterations() const { return iterations_; }
    double residual_norm() const { return residual_norm_; }

private:
    friend StaticLinearModel fit_linear_least_squares(
        const std::vector<std::vector<double>>&, const std::vector<double>&,
        const StaticFitConfig&);
    friend StaticLinearModel fit_static_regressor(
        const CollapsedGraph&, const std::unordered_map<std::uint64_t, double>&,
        const Normalizer&, const StaticFitConfig&);

    std::vector<double> weights_;
    double bias_ = 0.0;
    std::size_t iterations_ = 0;
    double residual_norm_ = 0.0;
    std::unordered_map<std::uint64_t, std::vector<double>> features_;  // regrouped
    std::size_t feature_length_ = 0;
    bool has_normalizer_ = false;
    Normalizer normalizer_;
};

/// Core least-squares fit over explicit rows (bias folded in as a constant
/// feature). Rows must be non-empty and of equal length.
StaticLinearModel fit_linear_least_squares(const std::vector<std::vector<double>>& features,
                                           const std::vector<double>& targets,
                                           const StaticFitConfig& config);

/// Pipeline fit: one training row per collapsed pair (history regrouped to
/// config.group_count), target = the pair's entry in `targets` (0 when
/// missing, mirroring the zero-fill convention). The fitted model predicts
/// from its stored per-pair vectors and classifies by inverting through the
/// normalizer and bucketizing.
StaticLinearModel fit_static_regressor(const CollapsedGraph& collapsed_train,
                                       const std::unordered_map<std::uint64_t, double>& targets,
                                       const Normalizer& normalizer,
                                       const StaticFitConfig& config);

/// Per-pair normalized weights at the first snapshot of a region — the
/// next-region targets for the static regressor.
std::unordered_map<std::uint64_t, double> first_snapshot_targets(const TemporalGraph& graph,
                                                                 const SplitSpec& split,
                                                                 SplitSpec::Region region,
                                                                 const Normalizer& normalizer);

}  // namespace tger
