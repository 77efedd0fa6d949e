#pragma once

// Exact k-nearest-neighbor queries via a median-split kd-tree.
// Distance ties are broken by point index, so query results (and every
// kernel built from them) are deterministic.

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "diffgeo/types.hpp"

namespace diffgeo {

class KdTree {
 public:
  explicit KdTree(const MatX& pts, int leaf_size = 16)
      : pts_(pts), leaf_(leaf_size) {
    idx_.resize(static_cast<size_t>(pts.rows()));
    std::iota(idx_.begin(), idx_.end(), 0);
    if (!idx_.empty()) root_ = build(0, static_cast<int>(idx_.size()));
  }

  // The k nearest neighbors of q, ascending by (distance, index); the point
  // with index `exclude` is skipped when exclude >= 0. Returns fewer than k
  // pairs only when the tree holds fewer eligible points.
  void knn(const Eigen::RowVectorXd& q, int k, std::vector<int>& out_idx,
           std::vector<double>& out_dist, int exclude = -1) const {
    out_idx.clear();
    out_dist.clear();
    if (k <= 0 || root_ < 0) return;
    std::vector<std::pair<double, int>> heap;  // max-heap on (dist^2, index)
    heap.reserve(static_cast<size_t>(k) + 1);
    search(root_, q, k, exclude, heap);
    std::sort_heap(heap.begin(), heap.end());
    out_idx.reserve(heap.size());
    out_dist.reserve(heap.size());
    for (const auto& [d2, j] : heap) {
      out_idx.push_back(j);
      out_dist.push_back(std::sqrt(d2));
    }
  }

 private:
  struct Node {
    int lo = 0, hi = 0;  // index range, used by leaves
    int axis = -1;       // split axis, -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(int lo, int hi) {
    Node nd;
    nd.lo = lo;
    nd.hi = hi;
    if (hi - lo <= leaf_) {
      nodes_.push_back(nd);
      return static_cast<int>(nodes_.size()) - 1;
    }
    // Split the widest axis at its median.
    int axis = 0;
    double best = -1.0;
    for (int a = 0; a < pts_.cols(); ++a) {
      double mn = pts_(idx_[static_cast<size_t>(lo)], a), mx = mn;
      for (int t = lo + 1; t < hi; ++t) {
        double v = pts_(idx_[static_cast<size_t>(t)], a);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      if (mx - mn > best) {
        best = mx - mn;
        axis = a;
      }
    }
    int mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](int a, int b) {
                       double va = pts_(a, axis), vb = pts_(b, axis);
                       return va < vb || (va == vb && a < b);
                     });
    nd.axis = axis;
    nd.split = pts_(idx_[static_cast<size_t>(mid)], axis);
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(nd);
    int left = build(lo, mid);
    int right = build(mid, hi);
    nodes_[static_cast<size_t>(self)].left = left;
    nodes_[static_cast<size_t>(self)].right = right;
    return self;
  }

  void search(int node, const Eigen::RowVectorXd& q, int k, int exclude,
              std::vector<std::pair<double, int>>& heap) const {
    const Node& nd = nodes_[static_cast<size_t>(node)];
    if (nd.axis < 0) {
      for (int t = nd.lo; t < nd.hi; ++t) {
        int j = idx_[static_cast<size_t>(t)];
        if (j == exclude) continue;
        double d2 = (pts_.row(j) - q).squaredNorm();
        std::pair<double, int> cand(d2, j);
        if (static_cast<int>(heap.size()) < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    double diff = q[nd.axis] - nd.split;
    int near = diff <= 0 ? nd.left : nd.right;
    int far = diff <= 0 ? nd.right : nd.left;
    search(near, q, k, exclude, heap);
    if (static_cast<int>(heap.size()) < k ||
        diff * diff <= heap.front().first) {
      search(far, q, k, exclude, heap);
    }
  }

  const MatX& pts_;
  int leaf_;
  std::vector<int> idx_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace diffgeo
