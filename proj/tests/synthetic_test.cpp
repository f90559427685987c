#include "tger/synthetic.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "tger/edge_stream.hpp"

namespace tger {
namespace {

TEST(SyntheticKindNames, RoundTripAndReject) {
    EXPECT_EQ(synthetic_kind_from_string("constant"), SyntheticKind::constant);
    EXPECT_EQ(synthetic_kind_from_string("linear_trend"), SyntheticKind::linear_trend);
    EXPECT_EQ(synthetic_kind_from_string("random_walk"), SyntheticKind::random_walk);
    EXPECT_THROW(synthetic_kind_from_string("sawtooth"), std::runtime_error);

    EXPECT_EQ(to_string(SyntheticKind::constant), "constant");
    EXPECT_EQ(to_string(SyntheticKind::linear_trend), "linear_trend");
    EXPECT_EQ(to_string(SyntheticKind::random_walk), "random_walk");
}

TEST(ConstantStream, EveryPairKeepsOneWeightAcrossAllSnapshots) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::constant, 5, 10, 1.0, 42);

    EXPECT_EQ(graph.node_count(), 5u);
    EXPECT_EQ(graph.events().size(), 200u);  // 5*4 pairs, 10 snapshots
    EXPECT_EQ(graph.timestamps().size(), 10u);
    EXPECT_EQ(graph.self_loop_count(), 0u);

    std::map<std::pair<NodeId, NodeId>, double> first_weight;
    for (const EdgeEvent& e : graph.events()) {
        EXPECT_GE(e.weight, 1.0);
        EXPECT_LT(e.weight, 10.0);
        const auto key = std::make_pair(e.source, e.destination);
        const auto it = first_weight.find(key);
        if (it == first_weight.end())
            first_weight.emplace(key, e.weight);
        else
            EXPECT_DOUBLE_EQ(it->second, e.weight)
                << "pair (" << e.source << ", " << e.destination << ") drifted";
    }
    EXPECT_EQ(first_weight.size(), 20u);
}

TEST(LinearTrendStream, WeightsFollowTheConfiguredLine) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::linear_trend, 4, 10, 0.5, 7, 1.0, 1.0);
    for (const EdgeEvent& e : graph.events())
        EXPECT_DOUBLE_EQ(e.weight, 1.0 + static_cast<double>(e.timestamp));

    // A falling line is fine as long as it stays positive over the horizon.
    const TemporalGraph falling =
        generate_synthetic(SyntheticKind::linear_trend, 4, 5, 0.5, 7, 5.0, -1.0);
    for (const EdgeEvent& e : falling.events())
        EXPECT_DOUBLE_EQ(e.weight, 5.0 - static_cast<double>(e.timestamp));
}

TEST(RandomWalkStream, StaysPositiveAndStartsInTheSeedRange) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::random_walk, 6, 8, 0.7, 13);
    for (const EdgeEvent& e : graph.events()) EXPECT_GT(e.weight, 0.0);
    for (const EdgeEvent& e : graph.snapshot(0)) {
        EXPECT_GE(e.weight, 1.0);
        EXPECT_LT(e.weight, 10.0);
    }
}

TEST(SyntheticStream, SameSeedReproducesDifferentSeedDiffers) {
    const TemporalGraph a =
        generate_synthetic(SyntheticKind::random_walk, 5, 6, 1.0, 3);
    const TemporalGraph b =
        generate_synthetic(SyntheticKind::random_walk, 5, 6, 1.0, 3);
    const TemporalGraph c =
        generate_synthetic(SyntheticKind::random_walk, 5, 6, 1.0, 4);

    EXPECT_EQ(a.events(), b.events());
    EXPECT_NE(a.events(), c.events());
}

TEST(SyntheticStream, DensityControlsThePairCountWithAFloorOfOne) {
    // floor(0.3 * 20) = 6 directed pairs for 5 nodes.
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::constant, 5, 4, 0.3, 1);
    EXPECT_EQ(graph.snapshot(0).size(), 6u);
    EXPECT_EQ(graph.events().size(), 24u);

    const TemporalGraph sparse =
        generate_synthetic(SyntheticKind::constant, 5, 4, 0.001, 1);
    EXPECT_EQ(sparse.snapshot(0).size(), 1u);
}

TEST(SyntheticStream, EverySnapshotHoldsTheSamePairSet) {
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::random_walk, 7, 5, 0.4, 19);
    std::set<std::pair<NodeId, NodeId>> reference;
    for (const EdgeEvent& e : graph.snapshot(0))
        reference.emplace(e.source, e.destination);
    ASSERT_FALSE(reference.empty());

    for (Timestamp t : graph.timestamps()) {
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (const EdgeEvent& e : graph.snapshot(t)) {
            EXPECT_NE(e.source, e.destination);
            pairs.emplace(e.source, e.destination);
        }
        EXPECT_EQ(pairs, reference) << "timestamp " << t;
        EXPECT_EQ(pairs.size(), graph.snapshot(t).size()) << "timestamp " << t;
    }
}

TEST(SyntheticStream, IsolatedNodesStayInTheRegistry) {
    // One pair out of 30 leaves four of the six nodes isolated, but the
    // registry still spans all of them.
    const TemporalGraph graph =
        generate_synthetic(SyntheticKind::constant, 6, 3, 0.05, 2);
    EXPECT_EQ(graph.snapshot(0).size(), 1u);
    EXPECT_EQ(graph.node_count(), 6u);
    ASSERT_EQ(graph.node_labels().size(), 6u);
    EXPECT_EQ(graph.node_labels()[0], "0");
    EXPECT_EQ(graph.node_labels()[5], "5");
}

TEST(SyntheticStream, RejectsDegenerateRequests) {
    EXPECT_THROW(generate_synthetic(SyntheticKind::constant, 1, 5, 0.5, 0),
                 std::runtime_error);
    EXPECT_THROW(generate_synthetic(SyntheticKind::constant, 4, 2, 0.5, 0),
                 std::runtime_error);
    EXPECT_THROW(generate_synthetic(SyntheticKind::constant, 4, 5, 0.0, 0),
                 std::runtime_error);
    EXPECT_THROW(generate_synthetic(SyntheticKind::constant, 4, 5, 1.2, 0),
                 std::runtime_error);
    // The line 1 - t goes non-positive by t = 1; 5 - t stays positive
    // through t = 4.
    EXPECT_THROW(generate_synthetic(SyntheticKind::linear_trend, 4, 5, 0.5, 0, 1.0, -1.0),
                 std::runtime_error);
    EXPECT_THROW(generate_synthetic(SyntheticKind::linear_trend, 4, 5, 0.5, 0, 0.0, 1.0),
                 std::runtime_error);
    EXPECT_NO_THROW(generate_synthetic(SyntheticKind::linear_trend, 4, 5, 0.5, 0, 5.0, -1.0));
}

}  // namespace
}  // namespace tger
