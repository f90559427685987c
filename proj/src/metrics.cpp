#include "tger/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace tger {

int bucketize(double raw_value, const BucketSpec& spec) {
    if (raw_value < 0.0) throw std::runtime_error("bucketize: negative value");
    const int offset = spec.zero_class ? 1 : 0;
    if (raw_value == 0.0) {
        if (!spec.zero_class)
            throw std::runtime_error("bucketize: zero value but no zero class configured");
        return 0;
    }
    // Integer decade walk instead of log10 to keep right-closed boundaries
    // exact (10^k is representable up to k = 22).
    int k = 0;
    double bound = 1.0;
    while (raw_value > bound && k < spec.top_decade) {
        bound *= 10.0;
        ++k;
    }
    return k + offset;
}

int decades_spanned(double max_raw_weight) {
    int k = 1;
    double bound = 10.0;
    while (max_raw_weight > bound && k < 308) {
        bound *= 10.0;
        ++k;
    }
    return k;
}

double mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw std::runtime_error("mse: length mismatch or empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        sum += d * d;
    }
    return sum / static_cast<double>(predictions.size());
}

double accuracy(std::span<const int> pred_classes, std::span<const int> true_classes) {
    if (pred_classes.size() != true_classes.size() || pred_classes.empty())
        throw std::runtime_error("accuracy: length mismatch or empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred_classes.size(); ++i)
        if (pred_classes[i] == true_classes[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(pred_classes.size());
}

double f1(std::span<const int> pred_classes, std::span<const int> true_classes,
          F1Averaging averaging) {
    if (pred_classes.size() != true_classes.size() || pred_classes.empty())
        throw std::runtime_error("f1: length mismatch or empty input");

    struct Counts {
        std::int64_t tp = 0, fp = 0, fn = 0, support = 0;
    };
    std::unordered_map<int, Counts> by_class;
    for (std::size_t i = 0; i < true_classes.size(); ++i) {
        by_class[true_classes[i]].support++;  // classes present in the truth
        if (pred_classes[i] == true_classes[i]) {
            by_class[true_classes[i]].tp++;
        } else {
            by_class[true_classes[i]].fn++;
            by_class[pred_classes[i]].fp++;
        }
    }

    double weighted_sum = 0.0;
    double weight_total = 0.0;
    for (const auto& [cls, c] : by_class) {
        if (c.support == 0) continue;  // predicted-only classes carry no weight
        const double precision =
            (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
        const double recall =
            (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
        const double class_f1 =
            (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
        const double w =
            averaging == F1Averaging::macro ? 1.0 : static_cast<double>(c.support);
        weighted_sum += w * class_f1;
        weight_total += w;
    }
    return weight_total == 0.0 ? 0.0 : weighted_sum / weight_total;
}

EvalReport aggregate_seeds(const std::vector<std::map<std::string, double>>& per_seed) {
    if (per_seed.empty()) throw std::runtime_error("aggregate_seeds: no seed results");
    for (const auto& m : per_seed)
        if (m.size() != per_seed.front().size() ||
            !std::equal(m.begin(), m.end(), per_seed.front().begin(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }))
            throw std::runtime_error("aggregate_seeds: inconsistent metric keys across seeds");

    EvalReport report;
    report.single_seed = per_seed.size() == 1;
    const auto n = static_cast<double>(per_seed.size());
    for (const auto& [key, first_value] : per_seed.front()) {
        MetricStat stat;
        stat.per_seed.reserve(per_seed.size());
        for (const auto& m : per_seed) stat.per_seed.push_back(m.at(key));
        for (double v : stat.per_seed) stat.mean += v;
        stat.mean /= n;
        if (per_seed.size() > 1) {
            double ss = 0.0;
            for (double v : stat.per_seed) ss += (v - stat.mean) * (v - stat.mean);
            stat.stddev = std::sqrt(ss / (n - 1.0));
        }
        report.metrics.emplace(key, std::move(stat));
    }
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["fingerprint"] = fingerprint;
    j["stddev"] = stddev_kind;
    j["single_seed"] = single_seed;
    nlohmann::json m;
    for (const auto& [key, stat] : metrics)
        m[key] = {{"mean", stat.mean}, {"stddev", stat.stddev}, {"per_seed", stat.per_seed}};
    j["metrics"] = m;
    j["sample_counts"] = sample_counts;
    return j;
}

}  // namespace tger
