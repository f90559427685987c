#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tger/metrics.hpp"
#include "tger/sampling.hpp"

namespace tger {

enum class Task { regression, classification };

Task task_from_string(const std::string& name);
std::string to_string(Task task);

/// A fitted model. Predictions live in the normalized space of the normalizer
/// the model was fitted with; class predictions are magnitude classes under
/// the caller's BucketSpec. Implementations declare the tasks they support
/// and must throw on the other one.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual std::string name() const = 0;
    virtual bool supports(Task task) const = 0;

    /// Normalized-space weight prediction for one (source, destination,
    /// timestamp) query.
    virtual double predict_value(const Sample& query) const = 0;

    /// Magnitude-class prediction for one query.
    virtual int predict_class(const Sample& query, const BucketSpec& spec) const = 0;
};

/// Class index for a model's raw-unit prediction: non-positive values land in
/// the lowest class (the zero class when the bucket spec has one), everything
/// else is bucketized. Truth labels never take this path — a non-positive raw
/// truth without a zero class stays a domain error in bucketize.
int classify_raw_prediction(double raw_prediction, const BucketSpec& spec);

/// Scores a predictor over one sample set.
///
/// regression → {"mse"}: mean squared error between predicted and target
/// normalized weights. classification → {"accuracy", "f1_macro",
/// "f1_weighted"}: truth classes are bucketized raw weights, so a set holding
/// negatives (raw weight 0) requires spec.zero_class.
std::map<std::string, double> evaluate(const Predictor& predictor, const SampleSet& set,
                                       Task task, const BucketSpec& spec);

/// Scores one predictor over several labeled sample sets (typically the
/// positive and overall regimes) and prefixes each metric with the set's
/// label, e.g. "positive/mse".
std::map<std::string, double> evaluate_labeled(
    const Predictor& predictor,
    const std::vector<std::pair<std::string, const SampleSet*>>& sets, Task task,
    const BucketSpec& spec);

}  // namespace tger
