#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace tger {

/// Decade buckets for magnitude classification: (0,1], (1,10], ...,
/// (10^{top_decade-1}, 10^top_decade], all right-closed, with values above the
/// top interval clamped into it. When zero_class is set, index 0 is reserved
/// for the exact value 0 (synthesized negative edges) and the magnitude
/// classes shift up by one.
struct BucketSpec {
    int top_decade = 1;
    bool zero_class = false;

    int class_count() const { return top_decade + 1 + (zero_class ? 1 : 0); }
};

/// Smallest k >= 0 with value <= 10^k, clamped to spec.top_decade; 0 maps to
/// the zero class. Negative values are a domain error.
int bucketize(double raw_value, const BucketSpec& spec);

/// Smallest top_decade whose top interval contains max_raw_weight (>= 1).
int decades_spanned(double max_raw_weight);

double mse(std::span<const double> predictions, std::span<const double> targets);

double accuracy(std::span<const int> pred_classes, std::span<const int> true_classes);

enum class F1Averaging { macro, weighted };

/// Per-class F1 with 0/0 := 0, averaged over the classes present in the true
/// labels (macro: unweighted, weighted: by support).
double f1(std::span<const int> pred_classes, std::span<const int> true_classes,
          F1Averaging averaging = F1Averaging::macro);

struct MetricStat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n-1)
    std::vector<double> per_seed;
};

/// Per-configuration metric aggregates over seeds.
struct EvalReport {
    std::string fingerprint;
    std::map<std::string, MetricStat> metrics;
    std::map<std::string, std::int64_t> sample_counts;
    bool single_seed = false;
    std::string stddev_kind = "sample(n-1)";

    nlohmann::json to_json() const;
};

/// Mean and sample standard deviation per metric; a single seed reports
/// stddev 0 and is flagged in the report.
EvalReport aggregate_seeds(const std::vector<std::map<std::string, double>>& per_seed);

}  // namespace tger
