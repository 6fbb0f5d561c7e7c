#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace hsrnet::geometry {

using PointId = std::uint64_t;

enum class HsrBackend { naive, prune_tree };

struct HsrConfig {
  HsrBackend backend = HsrBackend::prune_tree;
  std::size_t leaf_capacity = 16;
  // Rebuild once tombstones (or points inserted since the last build) exceed
  // this fraction of the live count.
  double rebuild_fraction = 0.25;
  // Test hook: inverts the subtree pruning test so replay checks can prove
  // they notice a broken index.
  bool inject_fault = false;
};

// Work done by one query. Every counted unit is one O(d) evaluation: a node
// bound or an inner product with a stored point.
struct QueryCost {
  std::uint64_t nodes_visited = 0;
  std::uint64_t points_scanned = 0;
  std::uint64_t points_reported = 0;

  std::uint64_t ops() const { return nodes_visited + points_scanned; }
  QueryCost& operator+=(const QueryCost& o) {
    nodes_visited += o.nodes_visited;
    points_scanned += o.points_scanned;
    points_reported += o.points_reported;
    return *this;
  }
};

struct HsrStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t points_scanned = 0;
  std::uint64_t points_reported = 0;
  std::uint64_t queries = 0;
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t rebuilds = 0;
  // O(d) evaluations spent on inserts and rebuilds (bound maintenance).
  std::uint64_t maintenance_ops = 0;
};

// Exact half-space reporting over a mutable point set: query(a, b) returns
// the ids of exactly the live points x with <a, x> - b > 0.
//
// The tree backend is a median-split tree over coordinates. Every node keeps
// an axis-aligned box and an enclosing ball; a query prunes a subtree when
// both bounds put max <a, x> at or below b and reports it wholesale when they
// put min <a, x> above b. Decisions within a relative 1e-10 of the threshold
// fall through to explicit inner products, so results always equal a linear
// scan computed with numerics::dot.
//
// Deletes are tombstones; the tree is rebuilt when tombstones or post-build
// inserts exceed rebuild_fraction of the live count. Ids are never reused.
//
// Concurrency: const query() may run concurrently; mutations need exclusive
// access.
class HsrIndex {
 public:
  explicit HsrIndex(std::size_t dim, HsrConfig config = {});

  // Points are row-major, `dim` values each; ids are assigned 0, 1, ... in
  // input order.
  static HsrIndex build(std::size_t dim, std::span<const double> points, HsrConfig config = {});
  static HsrIndex build(std::size_t dim, const std::vector<std::vector<double>>& points,
                        HsrConfig config = {});

  PointId insert(std::span<const double> x);
  void erase(PointId id);
  // Applies all erasures, then all insertions, then rebuilds at most once.
  // Returns the ids of the inserted points in order.
  std::vector<PointId> update_batch(std::span<const PointId> erase_ids,
                                    std::span<const double> insert_points);

  // Replaces `out` with the reporting set; does not touch stats().
  QueryCost query(std::span<const double> a, double b, std::vector<PointId>& out) const;
  // Convenience form that also records the cost in stats().
  std::vector<PointId> query(std::span<const double> a, double b);
  void account(const QueryCost& cost);

  void rebuild();

  std::size_t dim() const { return dim_; }
  std::size_t live_count() const { return live_; }
  std::size_t tombstone_count() const { return tombstones_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t internal_node_count() const;
  const HsrStats& stats() const { return stats_; }
  const HsrConfig& config() const { return config_; }

  bool contains(PointId id) const { return slot_of_.count(id) != 0; }
  std::span<const double> point(PointId id) const;
  std::vector<PointId> live_ids() const;

 private:
  struct Node {
    std::uint32_t begin = 0;  // range in perm_
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t split_dim = 0;
    double split_value = 0.0;
    double radius = 0.0;
    double center_norm = 0.0;
    bool leaf() const { return left < 0; }
  };

  std::span<const double> slot_point(std::uint32_t slot) const {
    return {coords_.data() + static_cast<std::size_t>(slot) * dim_, dim_};
  }
  std::span<const double> lo(std::size_t node) const { return {lo_.data() + node * dim_, dim_}; }
  std::span<const double> hi(std::size_t node) const { return {hi_.data() + node * dim_, dim_}; }
  std::span<const double> center(std::size_t node) const {
    return {center_.data() + node * dim_, dim_};
  }

  void check_dim(std::span<const double> x, const char* what) const;
  std::uint32_t add_slot(std::span<const double> x, PointId id);
  void erase_no_rebuild(PointId id);
  void insert_into_tree(std::uint32_t slot);
  bool needs_rebuild() const;
  std::int32_t build_node(std::uint32_t begin, std::uint32_t end, std::size_t depth);
  void collect_alive(std::size_t node, std::vector<PointId>& out, QueryCost& cost) const;

  std::size_t dim_;
  HsrConfig config_;

  std::vector<double> coords_;
  std::vector<PointId> slot_id_;
  std::vector<std::uint8_t> alive_;
  std::unordered_map<PointId, std::uint32_t> slot_of_;
  PointId next_id_ = 0;
  std::size_t live_ = 0;
  std::size_t tombstones_ = 0;
  std::size_t inserted_since_build_ = 0;

  std::vector<Node> nodes_;
  std::vector<double> lo_, hi_, center_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::vector<std::uint32_t>> extra_;  // per node; leaves only
  HsrStats stats_;
};

}  // namespace hsrnet::geometry
