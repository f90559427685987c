#include "tger/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "tger/rng.hpp"

namespace tger {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Directed-pair classes used to keep scoped negative draws composable: the
/// unscoped draw is the union of the old-old and touches-new class draws, each
/// on its own RNG stream, so old/new scoping selects sub-draws instead of
/// re-rolling.
enum class PairClass { any = 0, old_old = 1, touches_new = 2 };

bool touches_new_set(const SplitSpec& split, NodeId a, NodeId b) {
    return split.is_new_node(a) || split.is_new_node(b);
}

bool pair_in_class(const SplitSpec& split, PairClass cls, NodeId a, NodeId b) {
    switch (cls) {
        case PairClass::any: return true;
        case PairClass::old_old: return !touches_new_set(split, a, b);
        case PairClass::touches_new: return touches_new_set(split, a, b);
    }
    return false;
}

std::uint64_t permutations2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1); }

Sample make_negative(NodeId a, NodeId b, Timestamp t) {
    Sample s;
    s.source = a;
    s.destination = b;
    s.timestamp = t;
    s.target = 0.0;
    s.raw_weight = 0.0;
    s.is_positive = false;
    return s;
}

/// Draws `want` absent directed pairs of the given class at snapshot t,
/// uniformly over the class universe (pairs over nodes seen by t, no self
/// pairs). Small universes are enumerated and partially shuffled; large ones
/// fall back to rejection sampling. Both paths are chosen by universe size
/// alone, so the draw stays a pure function of (graph, split, rng state).
void draw_negatives(const TemporalGraph& graph, const SplitSpec& split, PairClass cls,
                    Timestamp t, const std::vector<NodeId>& nodes, std::size_t want,
                    Rng& rng, bool with_replacement, std::vector<Sample>& out) {
    if (want == 0) return;

    std::uint64_t old_count = 0;
    for (NodeId v : nodes)
        if (!split.is_new_node(v)) ++old_count;

    std::uint64_t class_pairs = 0;
    switch (cls) {
        case PairClass::any: class_pairs = permutations2(nodes.size()); break;
        case PairClass::old_old: class_pairs = permutations2(old_count); break;
        case PairClass::touches_new:
            class_pairs = permutations2(nodes.size()) - permutations2(old_count);
            break;
    }

    std::uint64_t present = 0;
    for (const EdgeEvent& e : graph.snapshot(t))
        if (e.source != e.destination && pair_in_class(split, cls, e.source, e.destination))
            ++present;
    const std::uint64_t absent = class_pairs - present;

    if (absent == 0 || (!with_replacement && want > absent))
        throw std::runtime_error("sampling error: snapshot " + std::to_string(t) +
                                 " exhausted, requested " + std::to_string(want) +
                                 " negatives but only " + std::to_string(absent) +
                                 " absent pairs exist");

    if (class_pairs <= 4'000'000) {
        std::vector<std::pair<NodeId, NodeId>> pool;
        pool.reserve(static_cast<std::size_t>(absent));
        for (NodeId a : nodes)
            for (NodeId b : nodes) {
                if (a == b || !pair_in_class(split, cls, a, b)) continue;
                if (graph.has_edge(a, b, t)) continue;
                pool.emplace_back(a, b);
            }
        if (with_replacement) {
            for (std::size_t i = 0; i < want; ++i) {
                const auto& p = pool[static_cast<std::size_t>(rng.below(pool.size()))];
                out.push_back(make_negative(p.first, p.second, t));
            }
        } else {
            for (std::size_t i = 0; i < want; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
                std::swap(pool[i], pool[j]);
                out.push_back(make_negative(pool[i].first, pool[i].second, t));
            }
        }
        return;
    }

    std::unordered_set<std::uint64_t> taken;
    std::size_t made = 0;
    std::uint64_t attempts = 0;
    const std::uint64_t cap = 200 * static_cast<std::uint64_t>(want) + 1000;
    while (made < want) {
        if (++attempts > cap)
            throw std::runtime_error("sampling error: snapshot " + std::to_string(t) +
                                     " rejection draw stalled after " +
                                     std::to_string(attempts - 1) + " attempts");
        const NodeId a = nodes[static_cast<std::size_t>(rng.below(nodes.size()))];
        const NodeId b = nodes[static_cast<std::size_t>(rng.below(nodes.size()))];
        if (a == b || !pair_in_class(split, cls, a, b)) continue;
        if (graph.has_edge(a, b, t)) continue;
        if (!with_replacement && !taken.insert(pack_pair(a, b)).second) continue;
        out.push_back(make_negative(a, b, t));
        ++made;
    }
}

Sample make_positive(const EdgeEvent& e, const Normalizer& normalizer) {
    Sample s;
    s.source = e.source;
    s.destination = e.destination;
    s.timestamp = e.timestamp;
    s.target = normalizer.apply(e);
    s.raw_weight = e.weight;
    s.is_positive = true;
    return s;
}

std::vector<Timestamp> region_timestamps(const TemporalGraph& graph, const SplitSpec& split,
                                         SplitSpec::Region region) {
    std::vector<Timestamp> out;
    for (Timestamp t : graph.timestamps())
        if (split.region_of(t) == region) out.push_back(t);
    return out;
}

const char* region_name(SplitSpec::Region region) {
    switch (region) {
        case SplitSpec::Region::train: return "train";
        case SplitSpec::Region::val: return "validation";
        case SplitSpec::Region::test: return "test";
    }
    return "?";
}

}  // namespace

TrainStrategy train_strategy_from_string(const std::string& name) {
    if (name == "positive_only" || name == "positive") return TrainStrategy::positive_only;
    if (name == "all_pairs" || name == "all") return TrainStrategy::all_pairs;
    if (name == "negative_sampling" || name == "negsample")
        return TrainStrategy::negative_sampling;
    throw std::runtime_error("unknown training strategy: " + name);
}

std::string to_string(TrainStrategy s) {
    switch (s) {
        case TrainStrategy::positive_only: return "positive_only";
        case TrainStrategy::all_pairs: return "all_pairs";
        case TrainStrategy::negative_sampling: return "negative_sampling";
    }
    return "?";
}

EvalRegime eval_regime_from_string(const std::string& name) {
    if (name == "positive") return EvalRegime::positive;
    if (name == "overall") return EvalRegime::overall;
    throw std::runtime_error("unknown evaluation regime: " + name);
}

std::string to_string(EvalRegime r) {
    return r == EvalRegime::positive ? "positive" : "overall";
}

NodeScope node_scope_from_string(const std::string& name) {
    if (name == "all") return NodeScope::all;
    if (name == "old" || name == "old_nodes") return NodeScope::old_nodes;
    if (name == "new" || name == "new_nodes") return NodeScope::new_nodes;
    throw std::runtime_error("unknown node scope: " + name);
}

std::string to_string(NodeScope s) {
    switch (s) {
        case NodeScope::all: return "all";
        case NodeScope::old_nodes: return "old";
        case NodeScope::new_nodes: return "new";
    }
    return "?";
}

std::size_t SampleSet::positive_count() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(),
                      [](const Sample& s) { return s.is_positive; }));
}

SampleSet build_training_samples(const TemporalGraph& graph, const SplitSpec& split,
                                 TrainStrategy strategy, double neg_ratio,
                                 std::uint64_t seed, const Normalizer& normalizer,
                                 bool with_replacement) {
    if (neg_ratio < 0)
        throw std::runtime_error("sampling error: neg_ratio must be non-negative");

    SampleSet set;
    set.strategy = strategy;
    set.neg_ratio = neg_ratio;
    set.seed = seed;

    const std::vector<Timestamp> region =
        region_timestamps(graph, split, SplitSpec::Region::train);
    if (region.empty()) throw std::runtime_error("sampling error: training region is empty");

    if (strategy == TrainStrategy::positive_only) {
        for (Timestamp t : region)
            for (const EdgeEvent& e : graph.snapshot(t))
                set.samples.push_back(make_positive(e, normalizer));
        return set;
    }

    if (strategy == TrainStrategy::all_pairs) {
        for (Timestamp t : region) {
            const std::vector<NodeId> nodes = graph.nodes_seen_by(t);
            // Self-loop events fall outside the directed-pair universe and are
            // dropped so the per-snapshot count stays |V(t)|·(|V(t)|−1).
            for (const EdgeEvent& e : graph.snapshot(t))
                if (e.source != e.destination)
                    set.samples.push_back(make_positive(e, normalizer));
            for (NodeId a : nodes)
                for (NodeId b : nodes) {
                    if (a == b || graph.has_edge(a, b, t)) continue;
                    set.samples.push_back(make_negative(a, b, t));
                }
        }
        return set;
    }

    // negative_sampling: apportion ⌊neg_ratio · total positives⌋ negatives over
    // snapshots by cumulative floor, so the global count is exact and each
    // snapshot's share tracks its positive count.
    std::uint64_t cumulative_positives = 0;
    std::uint64_t drawn_so_far = 0;
    for (Timestamp t : region) {
        const auto snapshot = graph.snapshot(t);
        cumulative_positives += snapshot.size();
        const auto target_total = static_cast<std::uint64_t>(
            std::floor(neg_ratio * static_cast<double>(cumulative_positives) + 1e-9));
        const std::uint64_t want = target_total - drawn_so_far;
        drawn_so_far = target_total;

        for (const EdgeEvent& e : snapshot)
            set.samples.push_back(make_positive(e, normalizer));
        if (want == 0) continue;
        const std::vector<NodeId> nodes = graph.nodes_seen_by(t);
        Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(PairClass::any));
        draw_negatives(graph, split, PairClass::any, t, nodes,
                       static_cast<std::size_t>(want), rng, with_replacement, set.samples);
    }
    return set;
}

SampleSet build_eval_samples(const TemporalGraph& graph, const SplitSpec& split,
                             EvalRegime regime, NodeScope scope, std::uint64_t seed,
                             const Normalizer& normalizer, SplitSpec::Region region) {
    if (scope == NodeScope::new_nodes && split.new_nodes.empty())
        throw std::runtime_error(
            "sampling error: new-node scope requires a non-empty new-node set");

    SampleSet set;
    set.strategy = regime == EvalRegime::positive ? TrainStrategy::positive_only
                                                  : TrainStrategy::negative_sampling;
    set.neg_ratio = regime == EvalRegime::positive ? 0.0 : 1.0;
    set.seed = seed;

    const std::vector<Timestamp> snapshots = region_timestamps(graph, split, region);
    if (snapshots.empty())
        throw std::runtime_error(std::string("sampling error: ") + region_name(region) +
                                 " region contains no snapshots");

    for (Timestamp t : snapshots) {
        std::size_t old_positives = 0;
        std::size_t new_positives = 0;
        for (const EdgeEvent& e : graph.snapshot(t)) {
            const bool touches = touches_new_set(split, e.source, e.destination);
            if (touches)
                ++new_positives;
            else
                ++old_positives;
            if (scope == NodeScope::old_nodes && touches) continue;
            if (scope == NodeScope::new_nodes && !touches) continue;
            set.samples.push_back(make_positive(e, normalizer));
        }

        if (regime != EvalRegime::overall) continue;
        const std::vector<NodeId> nodes = graph.nodes_seen_by(t);
        if (scope != NodeScope::new_nodes && old_positives > 0) {
            Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(t),
                                 static_cast<std::uint64_t>(PairClass::old_old));
            draw_negatives(graph, split, PairClass::old_old, t, nodes, old_positives, rng,
                           /*with_replacement=*/false, set.samples);
        }
        if (scope != NodeScope::old_nodes && new_positives > 0) {
            Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(t),
                                 static_cast<std::uint64_t>(PairClass::touches_new));
            draw_negatives(graph, split, PairClass::touches_new, t, nodes, new_positives, rng,
                           /*with_replacement=*/false, set.samples);
        }
    }

    if (set.samples.empty())
        throw std::runtime_error(std::string("sampling error: node scope '") +
                                 to_string(scope) + "' selects no events in the " +
                                 region_name(region) + " region");
    return set;
}

std::string samples_to_csv(const SampleSet& set) {
    std::string out = "source,destination,timestamp,target,is_positive\n";
    for (const Sample& s : set.samples) {
        out += std::to_string(s.source);
        out += ',';
        out += std::to_string(s.destination);
        out += ',';
        out += std::to_string(s.timestamp);
        out += ',';
        out += format_double(s.target);
        out += ',';
        out += s.is_positive ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_samples_csv(const SampleSet& set, const std::string& path) {
    std::ofstream file(path);
    if (!file.is_open())
        throw std::runtime_error("cannot open samples file for writing: " + path);
    file << samples_to_csv(set);
    if (!file.good()) throw std::runtime_error("write failure on samples file: " + path);
}

}  // namespace tger
