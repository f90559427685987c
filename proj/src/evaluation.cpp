#include "tger/evaluation.hpp"

#include <stdexcept>

namespace tger {

Task task_from_string(const std::string& name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw std::runtime_error("unknown task: " + name);
}

std::string to_string(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

int classify_raw_prediction(double raw_prediction, const BucketSpec& spec) {
    if (raw_prediction <= 0.0) return 0;
    return bucketize(raw_prediction, spec);
}

std::map<std::string, double> evaluate(const Predictor& predictor, const SampleSet& set,
                                       Task task, const BucketSpec& spec) {
    if (!predictor.supports(task))
        throw std::runtime_error("task error: predictor '" + predictor.name() +
                                 "' does not support " + to_string(task));
    if (set.samples.empty()) throw std::runtime_error("evaluation error: empty sample set");

    std::map<std::string, double> out;
    if (task == Task::regression) {
        std::vector<double> predictions;
        std::vector<double> targets;
        predictions.reserve(set.samples.size());
        targets.reserve(set.samples.size());
        for (const Sample& s : set.samples) {
            predictions.push_back(predictor.predict_value(s));
            targets.push_back(s.target);
        }
        out["mse"] = mse(predictions, targets);
        return out;
    }

    std::vector<int> predicted;
    std::vector<int> truth;
    predicted.reserve(set.samples.size());
    truth.reserve(set.samples.size());
    for (const Sample& s : set.samples) {
        if (!s.is_positive && !spec.zero_class)
            throw std::runtime_error(
                "evaluation error: classification over negative samples requires the "
                "zero class");
        truth.push_back(bucketize(s.raw_weight, spec));
        predicted.push_back(predictor.predict_class(s, spec));
    }
    out["accuracy"] = accuracy(predicted, truth);
    out["f1_macro"] = f1(predicted, truth, F1Averaging::macro);
    out["f1_weighted"] = f1(predicted, truth, F1Averaging::weighted);
    return out;
}

std::map<std::string, double> evaluate_labeled(
    const Predictor& predictor,
    const std::vector<std::pair<std::string, const SampleSet*>>& sets, Task task,
    const BucketSpec& spec) {
    if (sets.empty()) throw std::runtime_error("evaluation error: no sample sets supplied");
    std::map<std::string, double> out;
    for (const auto& [label, set] : sets) {
        for (const auto& [metric, value] : evaluate(predictor, *set, task, spec))
            out[label + "/" + metric] = value;
    }
    return out;
}

}  // namespace tger
