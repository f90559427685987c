#include "tger/edge_stream.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tger/rng.hpp"
#include <json.hpp>

namespace tger {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& s, std::size_t line_no, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": non-numeric " + std::string(what) + " '" + s + "'");
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

TemporalGraph TemporalGraph::from_events(std::vector<EdgeEvent> events,
                                         std::vector<std::string> node_labels,
                                         std::vector<double> raw_ts_values) {
    TemporalGraph g;
    g.events_ = std::move(events);
    g.node_labels_ = std::move(node_labels);
    g.raw_ts_values_ = std::move(raw_ts_values);
    g.build_index();
    return g;
}

void TemporalGraph::build_index() {
    std::stable_sort(events_.begin(), events_.end(),
                     [](const EdgeEvent& a, const EdgeEvent& b) { return a.timestamp < b.timestamp; });

    NodeId max_node = -1;
    Timestamp max_ts = -1;
    for (const auto& e : events_) {
        if (e.source < 0 || e.destination < 0)
            throw std::runtime_error("negative node identifier in event stream");
        if (e.timestamp < 0) throw std::runtime_error("negative timestamp in event stream");
        if (!(e.weight > 0.0))
            throw std::runtime_error("non-positive weight " + format_double(e.weight) +
                                     " for edge (" + std::to_string(e.source) + "," +
                                     std::to_string(e.destination) + "," +
                                     std::to_string(e.timestamp) + ")");
        max_node = std::max({max_node, e.source, e.destination});
        max_ts = std::max(max_ts, e.timestamp);
    }

    const std::size_t node_span = static_cast<std::size_t>(max_node + 1);
    const std::size_t ts_span = static_cast<std::size_t>(max_ts + 1);
    if (node_labels_.empty()) {
        node_labels_.resize(node_span);
        for (std::size_t i = 0; i < node_labels_.size(); ++i)
            node_labels_[i] = std::to_string(i);
    } else if (node_span > node_labels_.size()) {
        throw std::runtime_error("event references node id beyond the registry");
    }
    if (raw_ts_values_.empty()) {
        raw_ts_values_.resize(ts_span);
        for (std::size_t i = 0; i < raw_ts_values_.size(); ++i)
            raw_ts_values_[i] = static_cast<double>(i);
    }

    first_seen_.assign(node_labels_.size(), Timestamp{-1});
    snapshot_offsets_.assign(ts_span + 1, 0);
    pair_timestamps_.clear();
    timestamps_.clear();
    self_loops_ = 0;

    for (std::size_t i = 0; i < events_.size(); ++i) {
        const auto& e = events_[i];
        if (timestamps_.empty() || timestamps_.back() != e.timestamp)
            timestamps_.push_back(e.timestamp);
        snapshot_offsets_[static_cast<std::size_t>(e.timestamp) + 1] = i + 1;
        auto& ts_list = pair_timestamps_[pack_pair(e.source, e.destination)];
        if (std::binary_search(ts_list.begin(), ts_list.end(), e.timestamp))
            throw std::runtime_error("duplicate event for (" + std::to_string(e.source) + "," +
                                     std::to_string(e.destination) + "," +
                                     std::to_string(e.timestamp) + ")");
        ts_list.insert(std::lower_bound(ts_list.begin(), ts_list.end(), e.timestamp), e.timestamp);
        if (first_seen_[e.source] < 0) first_seen_[e.source] = e.timestamp;
        if (first_seen_[e.destination] < 0) first_seen_[e.destination] = e.timestamp;
        if (e.source == e.destination) ++self_loops_;
    }
    // Forward-fill so empty snapshots resolve to an empty span.
    for (std::size_t t = 1; t < snapshot_offsets_.size(); ++t)
        snapshot_offsets_[t] = std::max(snapshot_offsets_[t], snapshot_offsets_[t - 1]);
}

std::span<const EdgeEvent> TemporalGraph::snapshot(Timestamp t) const {
    if (t < 0 || static_cast<std::size_t>(t) + 1 >= snapshot_offsets_.size()) return {};
    const std::size_t b = snapshot_offsets_[t];
    const std::size_t e = snapshot_offsets_[static_cast<std::size_t>(t) + 1];
    return {events_.data() + b, e - b};
}

bool TemporalGraph::has_edge(NodeId source, NodeId destination, Timestamp t) const {
    auto it = pair_timestamps_.find(pack_pair(source, destination));
    if (it == pair_timestamps_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), t);
}

std::vector<NodeId> TemporalGraph::nodes_seen_by(Timestamp t) const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < static_cast<NodeId>(first_seen_.size()); ++v)
        if (first_seen_[v] >= 0 && first_seen_[v] <= t) out.push_back(v);
    return out;
}

TemporalGraph ingest_csv(const std::string& path, CsvFormat format) {
    std::ifstream file(path);
    if (!file.is_open()) throw std::runtime_error("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(file, line)) throw std::runtime_error("empty file (missing header): " + path);
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    auto header = split_fields(line);
    for (auto& h : header)
        std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });

    std::size_t weight_col = 3;
    if (format == CsvFormat::generic) {
        if (header.size() != 4 || header[0] != "source" || header[1] != "destination" ||
            header[2] != "timestamp" || header[3] != "weight")
            throw std::runtime_error("generic format requires header 'source,destination,timestamp,weight'");
    } else {
        if (header.size() < 4 || header[0] != "u" || header[1] != "i" || header[2] != "ts")
            throw std::runtime_error("dgb format requires a header beginning 'u,i,ts' plus a feature column");
        weight_col = (header[3] == "label") ? 4 : 3;
        if (header.size() <= weight_col)
            throw std::runtime_error("dgb format: no feature column after 'ts'");
    }

    struct RawEvent {
        NodeId source, destination;
        double raw_ts;
        double weight;
    };
    std::vector<RawEvent> raw;
    std::unordered_map<std::string, NodeId> label_to_id;
    std::vector<std::string> labels;
    std::map<double, Timestamp> ts_index;  // ordered: dense index by sorted value

    auto intern = [&](const std::string& label) {
        auto [it, inserted] = label_to_id.emplace(label, static_cast<NodeId>(labels.size()));
        if (inserted) labels.push_back(label);
        return it->second;
    };

    std::size_t line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() < weight_col + 1 ||
            (format == CsvFormat::generic && fields.size() != 4))
            throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(weight_col + 1) +
                                     "+ fields, got " + std::to_string(fields.size()));
        RawEvent ev;
        ev.source = intern(fields[0]);
        ev.destination = intern(fields[1]);
        ev.raw_ts = parse_number(fields[2], line_no, "timestamp");
        ev.weight = parse_number(fields[weight_col], line_no, "weight");
        if (ev.raw_ts < 0)
            throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                     ": negative timestamp");
        if (!(ev.weight > 0.0))
            throw std::runtime_error("value error at line " + std::to_string(line_no) +
                                     ": non-positive weight " + fields[weight_col]);
        ts_index.emplace(ev.raw_ts, 0);
        raw.push_back(ev);
    }

    std::vector<double> raw_ts_values;
    raw_ts_values.reserve(ts_index.size());
    Timestamp next = 0;
    for (auto& [value, idx] : ts_index) {
        idx = next++;
        raw_ts_values.push_back(value);
    }

    std::vector<EdgeEvent> events;
    events.reserve(raw.size());
    for (const auto& ev : raw)
        events.push_back({ev.source, ev.destination, ts_index[ev.raw_ts], ev.weight});

    return TemporalGraph::from_events(std::move(events), std::move(labels),
                                      std::move(raw_ts_values));
}

SplitSpec chronological_split(const TemporalGraph& graph, const SplitRequest& request) {
    const auto& ts = graph.timestamps();
    const int total = static_cast<int>(ts.size());
    if (total < 3) throw std::runtime_error("split error: need at least 3 distinct timestamps, have " +
                                            std::to_string(total));

    SplitSpec spec;
    spec.policy = request.policy;
    if (request.policy == BoundaryPolicy::by_timestamp_count) {
        if (request.train + request.val + request.test != total)
            throw std::runtime_error("split error: counts " + std::to_string(request.train) + "+" +
                                     std::to_string(request.val) + "+" + std::to_string(request.test) +
                                     " do not sum to " + std::to_string(total) + " distinct timestamps");
        spec.train_count = request.train;
        spec.val_count = request.val;
        spec.test_count = request.test;
    } else {
        const double fsum = request.train_frac + request.val_frac + request.test_frac;
        if (std::abs(fsum - 1.0) > 1e-9)
            throw std::runtime_error("split error: fractions must sum to 1");
        // Floor each region's share of distinct timestamps; train absorbs the
        // remainder. The epsilon guards against 0.7*10 -> 6.999... artifacts.
        int t = static_cast<int>(std::floor(request.train_frac * total + 1e-9));
        int v = static_cast<int>(std::floor(request.val_frac * total + 1e-9));
        int q = static_cast<int>(std::floor(request.test_frac * total + 1e-9));
        t += total - (t + v + q);
        spec.train_count = t;
        spec.val_count = v;
        spec.test_count = q;
    }
    if (spec.train_count < 1 || spec.val_count < 1 || spec.test_count < 1)
        throw std::runtime_error("split error: every region needs at least one distinct timestamp");

    spec.train_end = ts[spec.train_count];
    spec.val_end = ts[spec.train_count + spec.val_count];
    return spec;
}

std::pair<TemporalGraph, SplitSpec> mask_new_nodes(const TemporalGraph& graph,
                                                   const SplitSpec& split,
                                                   double fraction,
                                                   std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0)
        throw std::runtime_error("mask error: fraction must lie in [0,1]");
    SplitSpec masked_split = split;
    masked_split.new_nodes.clear();
    if (fraction == 0.0) return {graph, masked_split};

    const std::size_t n = graph.node_count();
    const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));

    std::vector<NodeId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<NodeId>(i);
    Rng rng = Rng::keyed(seed, 0x6d61736b);  // dedicated masking stream
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(ids[i], ids[j]);
    }
    for (std::size_t i = 0; i < count; ++i) masked_split.new_nodes.insert(ids[i]);

    std::vector<EdgeEvent> kept;
    kept.reserve(graph.events().size());
    bool train_left = false;
    for (const auto& e : graph.events()) {
        const bool in_train = split.region_of(e.timestamp) == SplitSpec::Region::train;
        if (in_train && (masked_split.new_nodes.count(e.source) ||
                         masked_split.new_nodes.count(e.destination)))
            continue;
        if (in_train) train_left = true;
        kept.push_back(e);
    }
    if (!train_left) throw std::runtime_error("mask error: masking would empty the training split");

    auto masked = TemporalGraph::from_events(std::move(kept), graph.node_labels(),
                                             graph.raw_timestamp_values());
    return {std::move(masked), std::move(masked_split)};
}

void serialize_graph(const TemporalGraph& graph, const std::string& csv_path,
                     const std::string& sidecar_path, const SplitSpec* split) {
    std::ofstream csv(csv_path);
    if (!csv.is_open()) throw std::runtime_error("cannot write " + csv_path);
    csv << "source,destination,timestamp,weight\n";
    for (const auto& e : graph.events())
        csv << e.source << ',' << e.destination << ',' << e.timestamp << ','
            << format_double(e.weight) << '\n';

    nlohmann::json side;
    side["node_labels"] = graph.node_labels();
    side["raw_timestamp_values"] = graph.raw_timestamp_values();
    side["self_loops"] = graph.self_loop_count();
    side["events"] = graph.events().size();
    side["nodes"] = graph.node_count();
    side["distinct_timestamps"] = graph.timestamps().size();
    if (split != nullptr) {
        std::vector<NodeId> new_nodes(split->new_nodes.begin(), split->new_nodes.end());
        std::sort(new_nodes.begin(), new_nodes.end());
        side["split"] = {{"train_count", split->train_count},
                         {"val_count", split->val_count},
                         {"test_count", split->test_count},
                         {"train_end", split->train_end},
                         {"val_end", split->val_end},
                         {"new_nodes", new_nodes}};
    }
    std::ofstream sidecar(sidecar_path);
    if (!sidecar.is_open()) throw std::runtime_error("cannot write " + sidecar_path);
    sidecar << side.dump(2) << '\n';
}

}  // namespace tger
