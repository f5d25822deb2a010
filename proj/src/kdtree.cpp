#include "neusurf/refine/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace neusurf {

KdTree3::KdTree3(const Mat& points) : points_(points) {
  if (points.rows() != 3)
    throw std::invalid_argument("KdTree3: points must be 3 x n");
  if (points.cols() == 0)
    throw std::invalid_argument("KdTree3: empty point set");
  if (!points.allFinite())
    throw std::invalid_argument("KdTree3: non-finite point");
  std::vector<int> order(static_cast<std::size_t>(points.cols()));
  std::iota(order.begin(), order.end(), 0);
  nodes_.reserve(order.size());
  root_ = build(order, 0, static_cast<int>(order.size()));
}

int KdTree3::build(std::vector<int>& order, int lo, int hi) {
  if (lo >= hi) return -1;

  // split on the widest axis of this subset's bounding box
  Vec3 mn = points_.col(order[static_cast<std::size_t>(lo)]);
  Vec3 mx = mn;
  for (int i = lo + 1; i < hi; ++i) {
    const Vec3 p = points_.col(order[static_cast<std::size_t>(i)]);
    mn = mn.cwiseMin(p);
    mx = mx.cwiseMax(p);
  }
  int axis = 0;
  const Vec3 extent = mx - mn;
  if (extent(1) > extent(axis)) axis = 1;
  if (extent(2) > extent(axis)) axis = 2;

  const int mid = lo + (hi - lo) / 2;
  std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                   [&](int a, int b) {
                     const Real pa = points_(axis, a), pb = points_(axis, b);
                     return pa < pb || (pa == pb && a < b);
                   });

  Node node;
  node.point = order[static_cast<std::size_t>(mid)];
  node.axis = axis;
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  nodes_[static_cast<std::size_t>(self)].left = build(order, lo, mid);
  nodes_[static_cast<std::size_t>(self)].right = build(order, mid + 1, hi);
  return self;
}

void KdTree3::search(int node, const Vec3& query, int& best_index,
                     Real& best_dist) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Vec3 p = points_.col(n.point);
  const Real d = (query - p).squaredNorm();
  if (d < best_dist || (d == best_dist && n.point < best_index)) {
    best_dist = d;
    best_index = n.point;
  }
  const Real diff = query(n.axis) - p(n.axis);
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  if (near != -1) search(near, query, best_index, best_dist);
  // <= so exact ties across the split plane are still visited (keeps the
  // lowest-index tie-break exact)
  if (far != -1 && diff * diff <= best_dist) search(far, query, best_index, best_dist);
}

std::pair<int, Real> KdTree3::nearest(const Vec3& query) const {
  int best_index = static_cast<int>(points_.cols());
  Real best_dist = std::numeric_limits<Real>::infinity();
  search(root_, query, best_index, best_dist);
  return {best_index, best_dist};
}

std::vector<int> nearest_indices(const Mat& queries, const KdTree3& tree) {
  if (queries.rows() != 3)
    throw std::invalid_argument("nearest_indices: queries must be 3 x n");
  std::vector<int> out(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index i = 0; i < queries.cols(); ++i)
    out[static_cast<std::size_t>(i)] = tree.nearest(queries.col(i)).first;
  return out;
}

}  // namespace neusurf
