#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "tger/edge_stream.hpp"
#include <json.hpp>

namespace tger {

enum class NormMethod { minmax, log, node_degree };

NormMethod norm_method_from_string(const std::string& name);
std::string to_string(NormMethod method);

/// Scales raw edge weights into model space and inverts the scaling for
/// raw-unit reporting.
///
/// minmax:      w* = a + (w - w_min)(b - a)/(w_max - w_min), range fitted on
///              the training split only; out-of-range test weights clamp to
///              [a, b] after scaling.
/// log:         w* = ln(w).
/// node_degree: w* = w / sum of raw weights leaving (source, timestamp). The
///              sum is a per-snapshot quantity, so it is precomputed for every
///              snapshot of the fitted graph, which is what recomputing it
///              from a test snapshot would yield.
///
/// Immutable after fit; apply/invert are pure.
class Normalizer {
public:
    static Normalizer fit(const TemporalGraph& graph, const SplitSpec& split,
                          NormMethod method, double range_lo = 0.0, double range_hi = 1.0);

    double apply(const EdgeEvent& event) const;
    double apply(NodeId source, Timestamp t, double raw_weight) const;

    /// Exact algebraic inverse of apply (minmax inverts linearly even outside
    /// [a, b]; callers may consult in_range for the clamp warning).
    double invert(double value, NodeId source, Timestamp t) const;

    bool in_range(double value) const;

    NormMethod method() const { return method_; }
    double range_lo() const { return range_lo_; }
    double range_hi() const { return range_hi_; }
    double train_min() const { return w_min_; }
    double train_max() const { return w_max_; }

    /// Outgoing raw-weight sum for (node, timestamp); throws if the snapshot
    /// was not part of the fitted graph.
    double degree_sum(NodeId source, Timestamp t) const;

    /// Serializes the fitted statistics (degree sums are regenerated from
    /// data on load).
    nlohmann::json to_json() const;
    static Normalizer from_json(const nlohmann::json& j, const TemporalGraph& graph,
                                const SplitSpec& split);

private:
    NormMethod method_ = NormMethod::log;
    double range_lo_ = 0.0;
    double range_hi_ = 1.0;
    double w_min_ = 0.0;
    double w_max_ = 0.0;
    std::unordered_map<std::uint64_t, double> degree_sums_;
};

}  // namespace tger
