#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tger {

using NodeId = std::int32_t;
using Timestamp = std::int32_t;

/// Packs a directed node pair (or a (node, timestamp) key) into one 64-bit key.
inline std::uint64_t pack_pair(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

/// One timestamped, weighted, directed edge observation.
/// Weights are strictly positive: absent pairs are never stored, they are
/// synthesized as zero-target negatives by the samplers.
struct EdgeEvent {
    NodeId source = 0;
    NodeId destination = 0;
    Timestamp timestamp = 0;
    double weight = 0.0;

    bool operator==(const EdgeEvent&) const = default;
};

enum class BoundaryPolicy { by_timestamp_count, by_fraction };

/// Chronological train/validation/test boundaries plus the old/new node
/// partition. Regions are defined by exclusive timestamp boundaries so the
/// spec stays valid for a graph whose events were later masked.
struct SplitSpec {
    int train_count = 0;
    int val_count = 0;
    int test_count = 0;
    BoundaryPolicy policy = BoundaryPolicy::by_timestamp_count;
    Timestamp train_end = 0;  // first validation timestamp (exclusive train bound)
    Timestamp val_end = 0;    // first test timestamp (exclusive validation bound)
    std::unordered_set<NodeId> new_nodes;

    enum class Region { train, val, test };

    Region region_of(Timestamp t) const {
        if (t < train_end) return Region::train;
        if (t < val_end) return Region::val;
        return Region::test;
    }

    bool is_new_node(NodeId v) const { return new_nodes.count(v) > 0; }
};

/// Requested split, either as distinct-timestamp counts or fractions.
struct SplitRequest {
    BoundaryPolicy policy = BoundaryPolicy::by_timestamp_count;
    int train = 22;
    int val = 6;
    int test = 4;
    double train_frac = 0.0;
    double val_frac = 0.0;
    double test_frac = 0.0;
};

/// Chronologically ordered event sequence with a node registry and a
/// timestamp index. Immutable after construction; safe to share across
/// concurrent readers.
class TemporalGraph {
public:
    TemporalGraph() = default;

    /// Builds a graph from events whose timestamps are already dense snapshot
    /// indices. Events are stable-sorted by timestamp (input order preserved
    /// within a timestamp) and validated: positive weights, no duplicate
    /// (source, destination, timestamp) triples.
    static TemporalGraph from_events(std::vector<EdgeEvent> events,
                                     std::vector<std::string> node_labels = {},
                                     std::vector<double> raw_ts_values = {});

    const std::vector<EdgeEvent>& events() const { return events_; }
    std::size_t node_count() const { return node_labels_.size(); }
    const std::vector<std::string>& node_labels() const { return node_labels_; }

    /// Sorted distinct timestamps present in the event sequence.
    const std::vector<Timestamp>& timestamps() const { return timestamps_; }

    /// Original timestamp values keyed by dense snapshot index (set by the
    /// ingestion adapters; identity when built from events directly).
    const std::vector<double>& raw_timestamp_values() const { return raw_ts_values_; }

    std::size_t self_loop_count() const { return self_loops_; }

    /// All events at one timestamp, in input order.
    std::span<const EdgeEvent> snapshot(Timestamp t) const;

    bool has_edge(NodeId source, NodeId destination, Timestamp t) const;

    /// First timestamp at which a node is incident to any event; -1 if the
    /// node never appears.
    Timestamp first_seen(NodeId v) const { return first_seen_[v]; }

    /// Nodes observed at or before timestamp t, ascending by id.
    std::vector<NodeId> nodes_seen_by(Timestamp t) const;

private:
    void build_index();

    std::vector<EdgeEvent> events_;
    std::vector<std::string> node_labels_;
    std::vector<Timestamp> timestamps_;
    std::vector<double> raw_ts_values_;
    std::vector<Timestamp> first_seen_;
    std::vector<std::size_t> snapshot_offsets_;  // indexed by timestamp value
    std::unordered_map<std::uint64_t, std::vector<Timestamp>> pair_timestamps_;  // sorted
    std::size_t self_loops_ = 0;
};

enum class CsvFormat { generic, dgb };

/// Parses a timestamped weighted edge stream from CSV.
///
/// generic: header `source,destination,timestamp,weight`; labels may be
/// arbitrary strings without commas. dgb: header beginning `u,i,ts` with the
/// weight in the first feature column after `ts` (and after a `label` column
/// when present). Node labels are densely re-indexed from 0 in first-seen
/// order; timestamps are re-indexed to dense snapshot indices by sorted
/// distinct value.
TemporalGraph ingest_csv(const std::string& path, CsvFormat format);

/// Chronological split over distinct timestamps. by_fraction floors each
/// cumulative count and assigns the remainder to train.
SplitSpec chronological_split(const TemporalGraph& graph, const SplitRequest& request);

/// Samples ceil(fraction * |nodes|) nodes without replacement and removes
/// every training-split event incident to one of them; validation and test
/// events are untouched. Returns the masked graph and a split carrying the
/// sampled set as new_nodes.
std::pair<TemporalGraph, SplitSpec> mask_new_nodes(const TemporalGraph& graph,
                                                   const SplitSpec& split,
                                                   double fraction,
                                                   std::uint64_t seed);

/// Writes the event stream as generic CSV plus a JSON sidecar carrying the
/// node-label mapping, original timestamp values, and split boundaries.
void serialize_graph(const TemporalGraph& graph, const std::string& csv_path,
                     const std::string& sidecar_path, const SplitSpec* split = nullptr);

}  // namespace tger
