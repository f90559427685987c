#include "tger/normalization.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace tger {

NormMethod norm_method_from_string(const std::string& name) {
    if (name == "minmax") return NormMethod::minmax;
    if (name == "log") return NormMethod::log;
    if (name == "degree" || name == "node_degree") return NormMethod::node_degree;
    throw std::runtime_error("unknown normalization method: " + name);
}

std::string to_string(NormMethod method) {
    switch (method) {
        case NormMethod::minmax: return "minmax";
        case NormMethod::log: return "log";
        case NormMethod::node_degree: return "degree";
    }
    return "?";
}

Normalizer Normalizer::fit(const TemporalGraph& graph, const SplitSpec& split,
                           NormMethod method, double range_lo, double range_hi) {
    Normalizer n;
    n.method_ = method;
    n.range_lo_ = range_lo;
    n.range_hi_ = range_hi;

    bool train_seen = false;
    double w_min = std::numeric_limits<double>::infinity();
    double w_max = -std::numeric_limits<double>::infinity();
    for (const auto& e : graph.events()) {
        const bool in_train = split.region_of(e.timestamp) == SplitSpec::Region::train;
        if (in_train) {
            train_seen = true;
            w_min = std::min(w_min, e.weight);
            w_max = std::max(w_max, e.weight);
        }
        if (method == NormMethod::node_degree)
            n.degree_sums_[pack_pair(e.source, e.timestamp)] += e.weight;
    }
    if (!train_seen) throw std::runtime_error("normalizer fit: training split is empty");

    if (method == NormMethod::minmax) {
        if (!(range_lo < range_hi))
            throw std::runtime_error("normalizer fit: need range_lo < range_hi");
        if (w_min == w_max)
            throw std::runtime_error("degenerate range: all training weights equal " +
                                     std::to_string(w_min));
        n.w_min_ = w_min;
        n.w_max_ = w_max;
    }
    return n;
}

double Normalizer::apply(const EdgeEvent& event) const {
    return apply(event.source, event.timestamp, event.weight);
}

double Normalizer::apply(NodeId source, Timestamp t, double raw_weight) const {
    switch (method_) {
        case NormMethod::minmax: {
            const double scaled = range_lo_ + (raw_weight - w_min_) * (range_hi_ - range_lo_) /
                                                  (w_max_ - w_min_);
            return std::min(range_hi_, std::max(range_lo_, scaled));
        }
        case NormMethod::log:
            if (!(raw_weight > 0.0))
                throw std::runtime_error("log normalization: non-positive weight");
            return std::log(raw_weight);
        case NormMethod::node_degree:
            return raw_weight / degree_sum(source, t);
    }
    throw std::logic_error("unreachable");
}

double Normalizer::invert(double value, NodeId source, Timestamp t) const {
    switch (method_) {
        case NormMethod::minmax:
            return w_min_ + (value - range_lo_) * (w_max_ - w_min_) / (range_hi_ - range_lo_);
        case NormMethod::log:
            return std::exp(value);
        case NormMethod::node_degree:
            return value * degree_sum(source, t);
    }
    throw std::logic_error("unreachable");
}

bool Normalizer::in_range(double value) const {
    if (method_ != NormMethod::minmax) return true;
    return value >= range_lo_ && value <= range_hi_;
}

double Normalizer::degree_sum(NodeId source, Timestamp t) const {
    auto it = degree_sums_.find(pack_pair(source, t));
    if (it == degree_sums_.end())
        throw std::runtime_error("node-degree normalization: no outgoing weight sum for node " +
                                 std::to_string(source) + " at timestamp " + std::to_string(t));
    return it->second;
}

nlohmann::json Normalizer::to_json() const {
    nlohmann::json j;
    j["method"] = to_string(method_);
    j["range_lo"] = range_lo_;
    j["range_hi"] = range_hi_;
    if (method_ == NormMethod::minmax) {
        j["w_min"] = w_min_;
        j["w_max"] = w_max_;
    }
    return j;
}

Normalizer Normalizer::from_json(const nlohmann::json& j, const TemporalGraph& graph,
                                 const SplitSpec& split) {
    auto n = fit(graph, split, norm_method_from_string(j.at("method").get<std::string>()),
                 j.value("range_lo", 0.0), j.value("range_hi", 1.0));
    if (n.method_ == NormMethod::minmax) {
        const double w_min = j.at("w_min").get<double>();
        const double w_max = j.at("w_max").get<double>();
        if (w_min != n.w_min_ || w_max != n.w_max_)
            throw std::runtime_error("normalizer load: stored range does not match the data");
    }
    return n;
}

}  // namespace tger
