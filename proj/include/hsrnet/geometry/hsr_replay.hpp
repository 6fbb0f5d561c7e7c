#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "hsrnet/geometry/hsr_index.hpp"

namespace hsrnet::geometry {

struct ReplayConfig {
  std::size_t initial = 2000;  // points loaded by build()
  std::size_t dim = 8;
  std::size_t ops = 2000;  // mixed insert / erase / query operations after the build
  std::uint64_t seed = 1;
  double insert_share = 0.3;
  double erase_share = 0.2;  // the rest are queries
  HsrConfig tree;            // backend is forced to prune_tree
};

struct ReplayReport {
  bool ok = true;
  std::uint64_t queries = 0;
  std::uint64_t inserts = 0;
  std::uint64_t erases = 0;
  std::uint64_t reported = 0;
  std::uint64_t tree_ops = 0;   // query cost of the tree backend
  std::uint64_t naive_ops = 0;  // query cost of the linear scan
  std::optional<std::uint64_t> mismatch_op;
  std::string detail;
  HsrStats tree_stats;
};

// Replays one random operation trace on a tree index and on the naive
// backend and compares every query result as a set. Queries cut through the
// data (thresholds taken from stored points, sometimes exactly at a point),
// and some inserts duplicate live points. Stops at the first mismatch.
ReplayReport replay_against_naive(const ReplayConfig& config);

}  // namespace hsrnet::geometry
