#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace corrvote {

struct NeighborHit {
  std::size_t index = 0;
  double distance = 0.0;
};

// Exact k-d tree over fixed-dimension points.
//
// Results are fully deterministic: equal distances rank by ascending point
// index, both in knn() and radius_search(). Subtrees whose splitting plane
// lies exactly at the current worst distance are still visited, so the
// tie-break order matches an exhaustive scan.
template <int Dim>
class KdTree {
 public:
  using PointT = std::array<double, Dim>;

  KdTree() = default;

  explicit KdTree(std::vector<PointT> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!points_.empty()) {
      root_ = build(0, points_.size());
    }
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const PointT& point(std::size_t i) const { return points_[i]; }

  // The k nearest points to `query`, sorted by (distance, index) ascending.
  // Returns min(k, size()) hits.
  std::vector<NeighborHit> knn(const PointT& query, std::size_t k) const {
    std::vector<NeighborHit> out;
    if (k == 0 || points_.empty()) return out;
    k = std::min(k, points_.size());

    std::vector<Entry> heap;  // max-heap, worst candidate on top
    heap.reserve(k + 1);
    knn_visit(root_, query.data(), k, heap);

    out.resize(heap.size());
    std::sort(heap.begin(), heap.end());
    for (std::size_t i = 0; i < heap.size(); ++i) {
      out[i] = NeighborHit{heap[i].index, std::sqrt(heap[i].dist2)};
    }
    return out;
  }

  // All points with distance <= radius, sorted by (distance, index) ascending.
  std::vector<NeighborHit> radius_search(const PointT& query, double radius) const {
    std::vector<Entry> hits;
    if (!points_.empty() && radius >= 0.0) {
      radius_visit(root_, query.data(), radius * radius, hits);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<NeighborHit> out(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      out[i] = NeighborHit{hits[i].index, std::sqrt(hits[i].dist2)};
    }
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = Dim >= 16 ? 48 : 16;

  struct Entry {
    double dist2;
    std::size_t index;
    bool operator<(const Entry& o) const {
      return dist2 != o.dist2 ? dist2 < o.dist2 : index < o.index;
    }
  };

  struct Node {
    int split_dim = -1;  // -1 marks a leaf
    double split_value = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };

  double sqdist(const double* a, const PointT& b) const {
    double s = 0.0;
    for (int d = 0; d < Dim; ++d) {
      const double diff = a[d] - b[d];
      s += diff * diff;
    }
    return s;
  }

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    const std::size_t count = end - begin;
    if (count <= kLeafSize) {
      nodes_[id].begin = static_cast<std::uint32_t>(begin);
      nodes_[id].end = static_cast<std::uint32_t>(end);
      return id;
    }

    // Split along the dimension with the widest extent over this range.
    std::array<double, Dim> lo, hi;
    lo = hi = points_[order_[begin]];
    for (std::size_t i = begin + 1; i < end; ++i) {
      const PointT& p = points_[order_[i]];
      for (int d = 0; d < Dim; ++d) {
        lo[d] = std::min(lo[d], p[d]);
        hi[d] = std::max(hi[d], p[d]);
      }
    }
    int dim = 0;
    double spread = hi[0] - lo[0];
    for (int d = 1; d < Dim; ++d) {
      if (hi[d] - lo[d] > spread) {
        spread = hi[d] - lo[d];
        dim = d;
      }
    }
    if (spread == 0.0) {
      // All points in this range are identical; splitting cannot help.
      nodes_[id].begin = static_cast<std::uint32_t>(begin);
      nodes_[id].end = static_cast<std::uint32_t>(end);
      return id;
    }

    const std::size_t mid = begin + count / 2;
    std::nth_element(
        order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
        [&](std::size_t a, std::size_t b) {
          const double ca = points_[a][dim];
          const double cb = points_[b][dim];
          return ca != cb ? ca < cb : a < b;
        });
    const double split_value = points_[order_[mid]][dim];

    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].split_dim = dim;
    nodes_[id].split_value = split_value;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void knn_visit(std::uint32_t node_id, const double* q, std::size_t k,
                 std::vector<Entry>& heap) const {
    const Node& n = nodes_[node_id];
    if (n.split_dim < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        const Entry e{sqdist(q, points_[idx]), idx};
        if (heap.size() < k) {
          heap.push_back(e);
          std::push_heap(heap.begin(), heap.end());
        } else if (e < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = e;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }

    const double diff = q[n.split_dim] - n.split_value;
    const std::uint32_t near = diff < 0.0 ? n.left : n.right;
    const std::uint32_t far = diff < 0.0 ? n.right : n.left;
    knn_visit(near, q, k, heap);
    // <= keeps equal-distance candidates reachable for the index tie-break.
    if (heap.size() < k || diff * diff <= heap.front().dist2) {
      knn_visit(far, q, k, heap);
    }
  }

  void radius_visit(std::uint32_t node_id, const double* q, double r2,
                    std::vector<Entry>& hits) const {
    const Node& n = nodes_[node_id];
    if (n.split_dim < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = sqdist(q, points_[idx]);
        if (d2 <= r2) hits.push_back(Entry{d2, idx});
      }
      return;
    }
    const double diff = q[n.split_dim] - n.split_value;
    const std::uint32_t near = diff < 0.0 ? n.left : n.right;
    const std::uint32_t far = diff < 0.0 ? n.right : n.left;
    radius_visit(near, q, r2, hits);
    if (diff * diff <= r2) {
      radius_visit(far, q, r2, hits);
    }
  }

  std::vector<PointT> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

}  // namespace corrvote
