#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

#include "terra/cloud/point_cloud.hpp"
#include "terra/common/error.hpp"

namespace terra {

struct Neighbor {
  std::size_t id;
  double distance;  // Euclidean, meters
};

/// Static kd-tree over Dim-dimensional points. Built once, read-only after.
///
/// knn() returns exactly min(k, size()) neighbors ordered by (distance, id),
/// which makes results identical to an exhaustive scan including ties.
template <int Dim>
class KdTree {
 public:
  using Coord = std::array<double, Dim>;

  explicit KdTree(std::vector<Coord> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw Error(ErrorCode::empty_cloud, "cannot index an empty point set");
    order_.resize(coords_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * coords_.size() / kLeafSize + 2);
    build(0, order_.size());
  }

  std::size_t size() const { return coords_.size(); }
  const Coord& coord(std::size_t id) const { return coords_[id]; }

  std::vector<Neighbor> knn(const Coord& query, std::size_t k) const {
    std::vector<Neighbor> out;
    knn(query, k, out);
    return out;
  }

  /// Allocation-reusing variant for hot loops.
  void knn(const Coord& query, std::size_t k, std::vector<Neighbor>& out) const {
    out.clear();
    k = std::min(k, coords_.size());
    if (k == 0) return;
    Heap heap;
    heap.items.reserve(k + 1);
    search(0, query, k, heap);
    std::sort(heap.items.begin(), heap.items.end(), Candidate::less);
    out.reserve(heap.items.size());
    for (const auto& c : heap.items) out.push_back({c.id, std::sqrt(c.d2)});
  }

 private:
  static constexpr std::size_t kLeafSize = 12;

  struct Node {
    std::size_t begin, end;  // range in order_
    int axis = -1;           // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  struct Candidate {
    double d2;
    std::size_t id;
    static bool less(const Candidate& a, const Candidate& b) {
      return a.d2 < b.d2 || (a.d2 == b.d2 && a.id < b.id);
    }
  };

  // Max-heap keyed on (d2, id); the top is the current worst candidate.
  struct Heap {
    std::vector<Candidate> items;
    void push(const Candidate& c, std::size_t k) {
      if (items.size() < k) {
        items.push_back(c);
        std::push_heap(items.begin(), items.end(), Candidate::less);
      } else if (Candidate::less(c, items.front())) {
        std::pop_heap(items.begin(), items.end(), Candidate::less);
        items.back() = c;
        std::push_heap(items.begin(), items.end(), Candidate::less);
      }
    }
    double worst() const { return items.front().d2; }
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;

    Coord lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      for (int d = 0; d < Dim; ++d) {
        lo[d] = std::min(lo[d], coords_[order_[i]][d]);
        hi[d] = std::max(hi[d], coords_[order_[i]][d]);
      }
    }
    int axis = 0;
    for (int d = 1; d < Dim; ++d) {
      if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    }
    if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) { return coords_[a][axis] < coords_[b][axis]; });
    const double split = coords_[order_[mid]][axis];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::size_t node_id, const Coord& q, std::size_t k, Heap& heap) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t id = order_[i];
        double d2 = 0.0;
        for (int d = 0; d < Dim; ++d) {
          const double diff = coords_[id][d] - q[d];
          d2 += diff * diff;
        }
        heap.push({d2, id}, k);
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    search(near, q, k, heap);
    // Points equal to the split value may sit on either side, so ties at the
    // plane distance must still be explored (<=, not <).
    if (heap.items.size() < k || diff * diff <= heap.worst()) search(far, q, k, heap);
  }

  std::vector<Coord> coords_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// KNN index over the xyz coordinates of one cloud.
using SpatialIndex = KdTree<3>;
/// KNN index over horizontal (x, y) coordinates.
using PlanarIndex = KdTree<2>;

SpatialIndex build_index(const PointCloud& cloud);
SpatialIndex build_index(std::span<const Point3> points);
PlanarIndex build_planar_index(std::span<const Point3> points);

inline std::vector<Neighbor> knn(const SpatialIndex& index, const Point3& query, std::size_t k) {
  return index.knn({query.x(), query.y(), query.z()}, k);
}

}  // namespace terra
