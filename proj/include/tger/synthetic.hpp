#pragma once

#include <cstdint>
#include <string>

#include "tger/edge_stream.hpp"

namespace tger {

/// Deterministic synthetic edge streams for property tests:
///   constant     — each selected pair keeps one fixed weight across every
///                  snapshot (drawn uniform [1, 10)).
///   linear_trend — every selected pair follows w0 + k·t.
///   random_walk  — per-pair multiplicative walk w(t+1) = w(t)·exp(0.25·N(0,1))
///                  from a uniform [1, 10) start; always positive.
enum class SyntheticKind { constant, linear_trend, random_walk };

SyntheticKind synthetic_kind_from_string(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Selects floor(density · nodes·(nodes−1)) directed non-self pairs (at least
/// one) uniformly at random and emits one event per pair per snapshot. The
/// node registry keeps all `nodes` ids even when some end up isolated.
TemporalGraph generate_synthetic(SyntheticKind kind, int nodes, int timestamps,
                                 double density, std::uint64_t seed, double w0 = 1.0,
                                 double k = 1.0);

}  // namespace tger
