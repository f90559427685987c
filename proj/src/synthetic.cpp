#include "tger/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tger/rng.hpp"

namespace tger {

namespace {

constexpr std::uint64_t kPairStreamTag = 0x72696170;    // "pair"
constexpr std::uint64_t kWeightStreamTag = 0x67696577;  // "weig"

}  // namespace

SyntheticKind synthetic_kind_from_string(const std::string& name) {
    if (name == "constant") return SyntheticKind::constant;
    if (name == "linear_trend") return SyntheticKind::linear_trend;
    if (name == "random_walk") return SyntheticKind::random_walk;
    throw std::runtime_error("unknown synthetic kind: " + name);
}

std::string to_string(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::constant: return "constant";
        case SyntheticKind::linear_trend: return "linear_trend";
        case SyntheticKind::random_walk: return "random_walk";
    }
    return "?";
}

TemporalGraph generate_synthetic(SyntheticKind kind, int nodes, int timestamps,
                                 double density, std::uint64_t seed, double w0, double k) {
    if (nodes < 2) throw std::runtime_error("synthetic error: need at least 2 nodes");
    if (timestamps < 3) throw std::runtime_error("synthetic error: need at least 3 timestamps");
    if (!(density > 0.0) || density > 1.0)
        throw std::runtime_error("synthetic error: density must lie in (0,1]");
    if (kind == SyntheticKind::linear_trend) {
        if (!(w0 > 0.0) || !(w0 + k * static_cast<double>(timestamps - 1) > 0.0))
            throw std::runtime_error(
                "synthetic error: linear trend weights must stay positive over every "
                "snapshot");
    }

    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes - 1));
    for (NodeId a = 0; a < nodes; ++a)
        for (NodeId b = 0; b < nodes; ++b)
            if (a != b) pairs.emplace_back(a, b);

    const auto want = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::floor(density * static_cast<double>(pairs.size()) + 1e-9)));
    Rng pair_rng = Rng::keyed(seed, kPairStreamTag);
    pair_rng.shuffle(pairs);
    pairs.resize(want);
    std::sort(pairs.begin(), pairs.end());

    Rng weight_rng = Rng::keyed(seed, kWeightStreamTag);
    std::vector<EdgeEvent> events;
    events.reserve(want * static_cast<std::size_t>(timestamps));
    for (const auto& [a, b] : pairs) {
        double walk = 0.0;
        double fixed = 0.0;
        switch (kind) {
            case SyntheticKind::constant: fixed = weight_rng.uniform(1.0, 10.0); break;
            case SyntheticKind::random_walk: walk = weight_rng.uniform(1.0, 10.0); break;
            case SyntheticKind::linear_trend: break;
        }
        for (Timestamp t = 0; t < timestamps; ++t) {
            double w = 0.0;
            switch (kind) {
                case SyntheticKind::constant: w = fixed; break;
                case SyntheticKind::linear_trend: w = w0 + k * static_cast<double>(t); break;
                case SyntheticKind::random_walk:
                    w = walk;
                    walk *= std::exp(0.25 * weight_rng.normal());
                    break;
            }
            events.push_back(EdgeEvent{a, b, t, w});
        }
    }

    std::vector<std::string> labels(static_cast<std::size_t>(nodes));
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
    return TemporalGraph::from_events(std::move(events), std::move(labels));
}

}  // namespace tger
