#include "hsrnet/geometry/hsr_index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsrnet/errors.hpp"
#include "hsrnet/numerics/vector_ops.hpp"

namespace hsrnet::geometry {

using numerics::distance;
using numerics::dot;

namespace {
constexpr double kRelativeSlack = 1e-10;
}

HsrIndex::HsrIndex(std::size_t dim, HsrConfig config) : dim_(dim), config_(config) {
  if (dim_ == 0) throw InvalidArgument("HsrIndex: dimension must be >= 1");
  if (config_.leaf_capacity == 0) throw InvalidArgument("HsrIndex: leaf capacity must be >= 1");
  if (!(config_.rebuild_fraction > 0.0))
    throw InvalidArgument("HsrIndex: rebuild fraction must be positive");
}

HsrIndex HsrIndex::build(std::size_t dim, std::span<const double> points, HsrConfig config) {
  HsrIndex idx(dim, config);
  if (points.size() % dim != 0)
    throw DimensionMismatch("HsrIndex::build: flat point buffer is not a multiple of dim");
  const std::size_t n = points.size() / dim;
  for (std::size_t k = 0; k < n; ++k) idx.add_slot(points.subspan(k * dim, dim), idx.next_id_++);
  idx.rebuild();
  idx.stats_.rebuilds = 0;
  return idx;
}

HsrIndex HsrIndex::build(std::size_t dim, const std::vector<std::vector<double>>& points,
                         HsrConfig config) {
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim)
      throw DimensionMismatch("HsrIndex::build: point of dimension " + std::to_string(p.size()) +
                              " in a dimension-" + std::to_string(dim) + " set");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return build(dim, std::span<const double>(flat), config);
}

void HsrIndex::check_dim(std::span<const double> x, const char* what) const {
  if (x.size() != dim_)
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(dim_) +
                            ", got " + std::to_string(x.size()));
}

std::uint32_t HsrIndex::add_slot(std::span<const double> x, PointId id) {
  const auto slot = static_cast<std::uint32_t>(slot_id_.size());
  coords_.insert(coords_.end(), x.begin(), x.end());
  slot_id_.push_back(id);
  alive_.push_back(1);
  slot_of_.emplace(id, slot);
  ++live_;
  return slot;
}

PointId HsrIndex::insert(std::span<const double> x) {
  check_dim(x, "HsrIndex::insert");
  const PointId id = next_id_++;
  const std::uint32_t slot = add_slot(x, id);
  ++stats_.inserts;
  ++inserted_since_build_;
  if (config_.backend == HsrBackend::prune_tree) {
    if (nodes_.empty()) {
      rebuild();
      return id;
    }
    insert_into_tree(slot);
  }
  if (needs_rebuild()) rebuild();
  return id;
}

void HsrIndex::erase_no_rebuild(PointId id) {
  auto it = slot_of_.find(id);
  if (it == slot_of_.end())
    throw StaleId("HsrIndex::erase: unknown or deleted point id " + std::to_string(id));
  alive_[it->second] = 0;
  slot_of_.erase(it);
  --live_;
  ++tombstones_;
  ++stats_.deletes;
}

void HsrIndex::erase(PointId id) {
  erase_no_rebuild(id);
  if (needs_rebuild()) rebuild();
}

std::vector<PointId> HsrIndex::update_batch(std::span<const PointId> erase_ids,
                                            std::span<const double> insert_points) {
  if (insert_points.size() % dim_ != 0)
    throw DimensionMismatch("HsrIndex::update_batch: insert buffer is not a multiple of dim");
  for (PointId id : erase_ids) erase_no_rebuild(id);
  const std::size_t count = insert_points.size() / dim_;
  std::vector<PointId> ids;
  ids.reserve(count);
  const bool tree = config_.backend == HsrBackend::prune_tree && !nodes_.empty();
  for (std::size_t k = 0; k < count; ++k) {
    const PointId id = next_id_++;
    const std::uint32_t slot = add_slot(insert_points.subspan(k * dim_, dim_), id);
    ++stats_.inserts;
    ++inserted_since_build_;
    if (tree) insert_into_tree(slot);
    ids.push_back(id);
  }
  const bool missing_tree = config_.backend == HsrBackend::prune_tree && nodes_.empty() && live_ > 0;
  if (missing_tree || needs_rebuild()) rebuild();
  return ids;
}

bool HsrIndex::needs_rebuild() const {
  const double limit = config_.rebuild_fraction * static_cast<double>(live_);
  return static_cast<double>(tombstones_) > limit ||
         static_cast<double>(inserted_since_build_) > limit;
}

void HsrIndex::insert_into_tree(std::uint32_t slot) {
  const auto x = slot_point(slot);
  std::size_t node = 0;
  for (;;) {
    double* l = lo_.data() + node * dim_;
    double* h = hi_.data() + node * dim_;
    for (std::size_t j = 0; j < dim_; ++j) {
      l[j] = std::min(l[j], x[j]);
      h[j] = std::max(h[j], x[j]);
    }
    Node& nd = nodes_[node];
    nd.radius = std::max(nd.radius, distance(x, center(node)));
    ++stats_.maintenance_ops;
    if (nd.leaf()) {
      extra_[node].push_back(slot);
      return;
    }
    node = static_cast<std::size_t>(x[nd.split_dim] < nd.split_value ? nd.left : nd.right);
  }
}

void HsrIndex::rebuild() {
  std::vector<double> coords;
  std::vector<PointId> ids;
  coords.reserve(live_ * dim_);
  ids.reserve(live_);
  for (std::uint32_t s = 0; s < slot_id_.size(); ++s) {
    if (!alive_[s]) continue;
    const auto p = slot_point(s);
    coords.insert(coords.end(), p.begin(), p.end());
    ids.push_back(slot_id_[s]);
  }
  coords_ = std::move(coords);
  slot_id_ = std::move(ids);
  alive_.assign(slot_id_.size(), 1);
  slot_of_.clear();
  for (std::uint32_t s = 0; s < slot_id_.size(); ++s) slot_of_.emplace(slot_id_[s], s);
  tombstones_ = 0;
  inserted_since_build_ = 0;
  ++stats_.rebuilds;

  nodes_.clear();
  lo_.clear();
  hi_.clear();
  center_.clear();
  extra_.clear();
  perm_.clear();
  if (config_.backend != HsrBackend::prune_tree || live_ == 0) return;
  perm_.resize(live_);
  for (std::uint32_t s = 0; s < perm_.size(); ++s) perm_[s] = s;
  nodes_.reserve(2 * (live_ / config_.leaf_capacity + 1));
  build_node(0, static_cast<std::uint32_t>(live_), 0);
}

std::int32_t HsrIndex::build_node(std::uint32_t begin, std::uint32_t end, std::size_t depth) {
  const auto idx = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{});
  lo_.resize(nodes_.size() * dim_);
  hi_.resize(nodes_.size() * dim_);
  center_.resize(nodes_.size() * dim_);
  extra_.emplace_back();
  nodes_[idx].begin = begin;
  nodes_[idx].end = end;
  const std::size_t base = static_cast<std::size_t>(idx) * dim_;

  if (end - begin <= config_.leaf_capacity) {
    std::fill(lo_.begin() + base, lo_.begin() + base + dim_, INFINITY);
    std::fill(hi_.begin() + base, hi_.begin() + base + dim_, -INFINITY);
    std::fill(center_.begin() + base, center_.begin() + base + dim_, 0.0);
    for (std::uint32_t k = begin; k < end; ++k) {
      const auto p = slot_point(perm_[k]);
      for (std::size_t j = 0; j < dim_; ++j) {
        lo_[base + j] = std::min(lo_[base + j], p[j]);
        hi_[base + j] = std::max(hi_[base + j], p[j]);
        center_[base + j] += p[j];
      }
    }
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (std::size_t j = 0; j < dim_; ++j) center_[base + j] *= inv;
    double radius = 0.0;
    for (std::uint32_t k = begin; k < end; ++k)
      radius = std::max(radius, distance(slot_point(perm_[k]), center(idx)));
    nodes_[idx].radius = radius;
    nodes_[idx].center_norm = numerics::norm2(center(idx));
    stats_.maintenance_ops += 2 * static_cast<std::uint64_t>(end - begin);
    return idx;
  }

  // Median split on coordinates taken round-robin by depth.
  const auto dimk = static_cast<std::uint32_t>(depth % dim_);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return coords_[a * dim_ + dimk] < coords_[b * dim_ + dimk];
                   });
  const double split_value = coords_[perm_[mid] * dim_ + dimk];
  const std::int32_t left = build_node(begin, mid, depth + 1);
  const std::int32_t right = build_node(mid, end, depth + 1);

  Node& nd = nodes_[idx];
  nd.left = left;
  nd.right = right;
  nd.split_dim = dimk;
  nd.split_value = split_value;
  const std::size_t lb = static_cast<std::size_t>(left) * dim_;
  const std::size_t rb = static_cast<std::size_t>(right) * dim_;
  double half_diag = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    lo_[base + j] = std::min(lo_[lb + j], lo_[rb + j]);
    hi_[base + j] = std::max(hi_[lb + j], hi_[rb + j]);
    center_[base + j] = 0.5 * (lo_[base + j] + hi_[base + j]);
    const double e = 0.5 * (hi_[base + j] - lo_[base + j]);
    half_diag += e * e;
  }
  half_diag = std::sqrt(half_diag);
  const double via_children =
      std::max(distance(center(idx), center(left)) + nodes_[left].radius,
               distance(center(idx), center(right)) + nodes_[right].radius);
  nd.radius = std::min(via_children, half_diag);
  nd.center_norm = numerics::norm2(center(idx));
  stats_.maintenance_ops += 2;
  return idx;
}

QueryCost HsrIndex::query(std::span<const double> a, double b, std::vector<PointId>& out) const {
  check_dim(a, "HsrIndex::query");
  out.clear();
  QueryCost cost;

  if (config_.backend == HsrBackend::naive) {
    for (std::uint32_t s = 0; s < slot_id_.size(); ++s) {
      if (!alive_[s]) continue;
      ++cost.points_scanned;
      if (dot(a, slot_point(s)) - b > 0.0) out.push_back(slot_id_[s]);
    }
    cost.points_reported = out.size();
    return cost;
  }
  if (nodes_.empty()) return cost;

  const double anorm = numerics::norm2(a);
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const std::uint32_t node = stack.back();
    stack.pop_back();
    ++cost.nodes_visited;
    const Node& nd = nodes_[node];

    const auto l = lo(node);
    const auto h = hi(node);
    double box_max = 0.0, box_min = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (a[j] >= 0.0) {
        box_max += a[j] * h[j];
        box_min += a[j] * l[j];
      } else {
        box_max += a[j] * l[j];
        box_min += a[j] * h[j];
      }
    }
    const double ac = dot(a, center(node));
    const double upper = std::min(box_max, ac + anorm * nd.radius);
    const double lower = std::max(box_min, ac - anorm * nd.radius);
    const double slack = kRelativeSlack * (anorm * (nd.center_norm + nd.radius) + std::abs(b));

    const bool prune = config_.inject_fault ? upper > b + slack : upper <= b - slack;
    if (prune) continue;
    if (lower > b + slack) {
      collect_alive(node, out, cost);
      continue;
    }
    if (nd.leaf()) {
      auto scan = [&](std::uint32_t s) {
        if (!alive_[s]) return;
        ++cost.points_scanned;
        if (dot(a, slot_point(s)) - b > 0.0) out.push_back(slot_id_[s]);
      };
      for (std::uint32_t k = nd.begin; k < nd.end; ++k) scan(perm_[k]);
      for (std::uint32_t s : extra_[node]) scan(s);
      continue;
    }
    stack.push_back(static_cast<std::uint32_t>(nd.right));
    stack.push_back(static_cast<std::uint32_t>(nd.left));
  }
  cost.points_reported = out.size();
  return cost;
}

void HsrIndex::collect_alive(std::size_t node, std::vector<PointId>& out, QueryCost& cost) const {
  const Node& nd = nodes_[node];
  if (!nd.leaf()) {
    collect_alive(static_cast<std::size_t>(nd.left), out, cost);
    collect_alive(static_cast<std::size_t>(nd.right), out, cost);
    return;
  }
  for (std::uint32_t k = nd.begin; k < nd.end; ++k)
    if (alive_[perm_[k]]) out.push_back(slot_id_[perm_[k]]);
  for (std::uint32_t s : extra_[node])
    if (alive_[s]) out.push_back(slot_id_[s]);
}

std::vector<PointId> HsrIndex::query(std::span<const double> a, double b) {
  std::vector<PointId> out;
  account(query(a, b, out));
  return out;
}

void HsrIndex::account(const QueryCost& cost) {
  ++stats_.queries;
  stats_.nodes_visited += cost.nodes_visited;
  stats_.points_scanned += cost.points_scanned;
  stats_.points_reported += cost.points_reported;
}

std::size_t HsrIndex::internal_node_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.leaf(); }));
}

std::span<const double> HsrIndex::point(PointId id) const {
  auto it = slot_of_.find(id);
  if (it == slot_of_.end()) throw StaleId("HsrIndex::point: unknown point id " + std::to_string(id));
  return slot_point(it->second);
}

std::vector<PointId> HsrIndex::live_ids() const {
  std::vector<PointId> ids;
  ids.reserve(live_);
  for (std::uint32_t s = 0; s < slot_id_.size(); ++s)
    if (alive_[s]) ids.push_back(slot_id_[s]);
  return ids;
}

}  // namespace hsrnet::geometry
