#include "tger/static_collapse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tger {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<double> CollapsedGraph::vector_for(NodeId source, NodeId destination) const {
    const auto it = edge_features.find(pack_pair(source, destination));
    if (it != edge_features.end()) return it->second;
    return std::vector<double>(length, 0.0);
}

CollapsedGraph collapse(const TemporalGraph& graph, const SplitSpec& split,
                        SplitSpec::Region region, const Normalizer& normalizer,
                        bool dense) {
    CollapsedGraph out;
    for (Timestamp t : graph.timestamps())
        if (split.region_of(t) == region) out.timestamps.push_back(t);
    if (out.timestamps.empty())
        throw std::runtime_error("collapse error: region contains no snapshots");
    out.length = out.timestamps.size();

    if (dense) {
        const auto n = static_cast<NodeId>(graph.node_count());
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = 0; b < n; ++b)
                if (a != b) out.edge_features.emplace(pack_pair(a, b),
                                                      std::vector<double>(out.length, 0.0));
    }

    for (std::size_t i = 0; i < out.timestamps.size(); ++i) {
        for (const EdgeEvent& e : graph.snapshot(out.timestamps[i])) {
            auto [it, inserted] = out.edge_features.try_emplace(
                pack_pair(e.source, e.destination), out.length, 0.0);
            it->second[i] = normalizer.apply(e);
        }
    }
    return out;
}

std::vector<double> regroup(const std::vector<double>& values, int q) {
    const std::size_t p = values.size();
    if (q < 1) throw std::runtime_error("regroup error: group count must be at least 1");
    if (static_cast<std::size_t>(q) > p)
        throw std::runtime_error("regroup error: " + std::to_string(q) +
                                 " groups requested for a length-" + std::to_string(p) +
                                 " vector");

    const std::size_t base = p / static_cast<std::size_t>(q);
    const std::size_t longer = p % static_cast<std::size_t>(q);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(q));
    std::size_t pos = 0;
    for (std::size_t g = 0; g < static_cast<std::size_t>(q); ++g) {
        const std::size_t size = base + (g < longer ? 1 : 0);
        double sum = 0.0;
        for (std::size_t i = 0; i < size; ++i) sum += values[pos + i];
        out.push_back(sum / static_cast<double>(size));
        pos += size;
    }
    return out;
}

std::string collapsed_to_csv(const CollapsedGraph& collapsed) {
    std::string out = "source,destination";
    for (std::size_t i = 0; i < collapsed.length; ++i) out += ",f" + std::to_string(i);
    out += '\n';

    std::vector<std::uint64_t> keys;
    keys.reserve(collapsed.edge_features.size());
    for (const auto& [key, vec] : collapsed.edge_features) keys.push_back(key);
    std::sort(keys.begin(), keys.end());

    for (const std::uint64_t key : keys) {
        out += std::to_string(static_cast<NodeId>(key >> 32));
        out += ',';
        out += std::to_string(static_cast<NodeId>(key & 0xffffffffu));
        for (const double v : collapsed.edge_features.at(key)) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

void write_collapsed_csv(const CollapsedGraph& collapsed, const std::string& path) {
    std::ofstream file(path);
    if (!file.is_open())
        throw std::runtime_error("cannot open collapse file for writing: " + path);
    file << collapsed_to_csv(collapsed);
    if (!file.good()) throw std::runtime_error("write failure on collapse file: " + path);
}

double StaticLinearModel::predict_features(const std::vector<double>& features) const {
    if (features.size() != weights_.size())
        throw std::runtime_error("static model error: expected " +
                                 std::to_string(weights_.size()) + " features, got " +
                                 std::to_string(features.size()));
    return dot(weights_, features) + bias_;
}

double StaticLinearModel::predict_value(const Sample& query) const {
    const auto it = features_.find(pack_pair(query.source, query.destination));
    if (it == features_.end()) return bias_;
    return predict_features(it->second);
}

int StaticLinearModel::predict_class(const Sample& query, const BucketSpec& spec) const {
    if (!has_normalizer_)
        throw std::runtime_error(
            "static model error: classification requires a model fitted through "
            "fit_static_regressor");
    const double raw =
        normalizer_.invert(predict_value(query), query.source, query.timestamp);
    return classify_raw_prediction(raw, spec);
}

StaticLinearModel fit_linear_least_squares(const std::vector<std::vector<double>>& features,
                                           const std::vector<double>& targets,
                                           const StaticFitConfig& config) {
    if (features.empty()) throw std::runtime_error("fit error: no training rows");
    if (features.size() != targets.size())
        throw std::runtime_error("fit error: " + std::to_string(features.size()) +
                                 " rows vs " + std::to_string(targets.size()) + " targets");
    const std::size_t d = features.front().size();
    for (const auto& row : features)
        if (row.size() != d) throw std::runtime_error("fit error: ragged feature rows");

    // Normal equations over the bias-augmented design matrix: M = XᵀX, rhs =
    // Xᵀy, with the constant feature in the last slot.
    const std::size_t a = d + 1;
    std::vector<double> m(a * a, 0.0);
    std::vector<double> rhs(a, 0.0);
    std::vector<double> row(a, 1.0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        std::copy(features[i].begin(), features[i].end(), row.begin());
        row[d] = 1.0;
        for (std::size_t r = 0; r < a; ++r) {
            rhs[r] += row[r] * targets[i];
            for (std::size_t c = 0; c < a; ++c) m[r * a + c] += row[r] * row[c];
        }
    }

    const auto mat_vec = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t r = 0; r < a; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < a; ++c) s += m[r * a + c] * x[c];
            out[r] = s;
        }
    };
    const auto norm2 = [](const std::vector<double>& x) { return std::sqrt(dot(x, x)); };

    // Steepest descent with exact line search: the residual r = rhs − Mw is
    // the descent direction; M is positive semidefinite and rhs lies in its
    // range, so rᵀMr > 0 until convergence.
    std::vector<double> w(a, 0.0);
    std::vector<double> r = rhs;
    std::vector<double> mr(a, 0.0);
    const double stop = config.tolerance * std::max(1.0, norm2(rhs));
    std::size_t iter = 0;
    double rnorm = norm2(r);
    while (rnorm > stop) {
        if (iter >= config.max_iterations)
            throw std::runtime_error("fit error: least squares did not converge within " +
                                     std::to_string(config.max_iterations) +
                                     " iterations (residual " + format_double(rnorm) + ")");
        mat_vec(r, mr);
        const double denom = dot(r, mr);
        if (denom <= 0.0) break;
        const double alpha = dot(r, r) / denom;
        for (std::size_t i = 0; i < a; ++i) w[i] += alpha * r[i];
        ++iter;
        if (iter % 64 == 0) {
            mat_vec(w, mr);
            for (std::size_t i = 0; i < a; ++i) r[i] = rhs[i] - mr[i];
        } else {
            for (std::size_t i = 0; i < a; ++i) r[i] -= alpha * mr[i];
        }
        rnorm = norm2(r);
    }

    StaticLinearModel model;
    model.weights_.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
    model.bias_ = w[d];
    model.iterations_ = iter;
    model.residual_norm_ = rnorm;
    model.feature_length_ = d;
    return model;
}

StaticLinearModel fit_static_regressor(const CollapsedGraph& collapsed_train,
                                       const std::unordered_map<std::uint64_t, double>& targets,
                                       const Normalizer& normalizer,
                                       const StaticFitConfig& config) {
    if (collapsed_train.edge_features.empty())
        throw std::runtime_error("fit error: no positive pairs in the training region");

    const int q = config.group_count > 0 ? config.group_count
                                         : static_cast<int>(collapsed_train.length);

    std::vector<std::uint64_t> keys;
    keys.reserve(collapsed_train.edge_features.size());
    for (const auto& [key, vec] : collapsed_train.edge_features) keys.push_back(key);
    std::sort(keys.begin(), keys.end());

    std::vector<std::vector<double>> x;
    std::vector<double> y;
    x.reserve(keys.size());
    y.reserve(keys.size());
    for (const std::uint64_t key : keys) {
        x.push_back(regroup(collapsed_train.edge_features.at(key), q));
        const auto it = targets.find(key);
        y.push_back(it == targets.end() ? 0.0 : it->second);
    }

    StaticLinearModel model = fit_linear_least_squares(x, y, config);
    for (std::size_t i = 0; i < keys.size(); ++i) model.features_.emplace(keys[i], x[i]);
    model.normalizer_ = normalizer;
    model.has_normalizer_ = true;
    return model;
}

std::unordered_map<std::uint64_t, double> first_snapshot_targets(const TemporalGraph& graph,
                                                                 const SplitSpec& split,
                                                                 SplitSpec::Region region,
                                                                 const Normalizer& normalizer) {
    Timestamp first = -1;
    for (Timestamp t : graph.timestamps()) {
        if (split.region_of(t) == region) {
            first = t;
            break;
        }
    }
    if (first < 0) throw std::runtime_error("target error: region contains no snapshots");

    std::unordered_map<std::uint64_t, double> out;
    for (const EdgeEvent& e : graph.snapshot(first))
        out.emplace(pack_pair(e.source, e.destination), normalizer.apply(e));
    return out;
}

}  // namespace tger
