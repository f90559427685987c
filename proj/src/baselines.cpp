#include "tger/baselines.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace tger {

BaselineKind baseline_kind_from_string(const std::string& name) {
    if (name == "mean") return BaselineKind::mean;
    if (name == "most") return BaselineKind::most;
    if (name == "persistence") return BaselineKind::persistence;
    if (name == "historical_average") return BaselineKind::historical_average;
    throw std::runtime_error("unknown baseline: " + name);
}

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::mean: return "mean";
        case BaselineKind::most: return "most";
        case BaselineKind::persistence: return "persistence";
        case BaselineKind::historical_average: return "historical_average";
    }
    return "?";
}

bool Baseline::supports(Task task) const {
    switch (kind_) {
        case BaselineKind::mean:
        case BaselineKind::historical_average:
            return task == Task::regression;
        case BaselineKind::most:
            return task == Task::classification;
        case BaselineKind::persistence:
            return true;
    }
    return false;
}

double Baseline::predict_value(const Sample& query) const {
    switch (kind_) {
        case BaselineKind::mean:
            return global_mean_;
        case BaselineKind::persistence: {
            const auto it = last_seen_.find(pack_pair(query.source, query.destination));
            return it == last_seen_.end() ? fallback_value_ : it->second.normalized;
        }
        case BaselineKind::historical_average: {
            const auto it = history_.find(pack_pair(query.source, query.destination));
            if (it == history_.end()) return fallback_value_;
            return it->second.normalized_sum / static_cast<double>(it->second.count);
        }
        case BaselineKind::most:
            break;
    }
    throw std::runtime_error("task error: predictor '" + name() +
                             "' does not support regression");
}

int Baseline::predict_class(const Sample& query, const BucketSpec& spec) const {
    const int offset = spec.zero_class ? 1 : 0;
    switch (kind_) {
        case BaselineKind::most:
            return std::min(global_mode_magnitude_, spec.top_decade) + offset;
        case BaselineKind::persistence: {
            const auto it = last_seen_.find(pack_pair(query.source, query.destination));
            if (it == last_seen_.end()) return 0;
            return bucketize(it->second.raw, spec);
        }
        case BaselineKind::mean:
        case BaselineKind::historical_average:
            break;
    }
    throw std::runtime_error("task error: predictor '" + name() +
                             "' does not support classification");
}

Baseline fit_baseline(BaselineKind kind, const TemporalGraph& graph, const SplitSpec& split,
                      const Normalizer& normalizer, const BucketSpec& spec,
                      bool pooled_mean, bool fallback_global_mean) {
    Baseline b;
    b.kind_ = kind;

    const BucketSpec magnitude_spec{spec.top_decade, false};
    std::vector<std::int64_t> class_counts(
        static_cast<std::size_t>(magnitude_spec.class_count()), 0);

    double pooled_sum = 0.0;
    std::int64_t pooled_count = 0;
    double snapshot_mean_sum = 0.0;
    int snapshot_count = 0;

    for (Timestamp t : graph.timestamps()) {
        if (split.region_of(t) != SplitSpec::Region::train) continue;
        double snapshot_sum = 0.0;
        std::int64_t snapshot_events = 0;
        for (const EdgeEvent& e : graph.snapshot(t)) {
            const double value = normalizer.apply(e);
            snapshot_sum += value;
            ++snapshot_events;
            pooled_sum += value;
            ++pooled_count;
            ++class_counts[static_cast<std::size_t>(bucketize(e.weight, magnitude_spec))];

            const std::uint64_t key = pack_pair(e.source, e.destination);
            b.last_seen_[key] = Baseline::LastSeen{e.timestamp, value, e.weight};
            auto& h = b.history_[key];
            h.normalized_sum += value;
            ++h.count;
        }
        snapshot_mean_sum += snapshot_sum / static_cast<double>(snapshot_events);
        ++snapshot_count;
    }

    if (pooled_count == 0)
        throw std::runtime_error("baseline error: training region holds no events");

    b.global_mean_ = pooled_mean
                         ? pooled_sum / static_cast<double>(pooled_count)
                         : snapshot_mean_sum / static_cast<double>(snapshot_count);

    int mode = 0;
    for (std::size_t c = 1; c < class_counts.size(); ++c)
        if (class_counts[c] > class_counts[static_cast<std::size_t>(mode)])
            mode = static_cast<int>(c);
    b.global_mode_magnitude_ = mode;

    b.fallback_value_ = fallback_global_mean ? b.global_mean_ : 0.0;
    return b;
}

}  // namespace tger
