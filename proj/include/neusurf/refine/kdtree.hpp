#pragma once

#include <utility>
#include <vector>

#include "neusurf/core/types.hpp"

namespace neusurf {

// Exact nearest-neighbor index over a fixed 3D point set.  Median-split
// build (widest-extent axis, ties broken by point index), so the tree and
// every query answer are deterministic.  Queries return the lowest point
// index among exact distance ties, matching an ascending brute-force scan.
class KdTree3 {
 public:
  explicit KdTree3(const Mat& points);  // 3 x n, copied; n >= 1

  Eigen::Index size() const { return points_.cols(); }

  // (index of nearest point, squared Euclidean distance)
  std::pair<int, Real> nearest(const Vec3& query) const;

 private:
  struct Node {
    int point = -1;  // column in points_
    int axis = 0;
    int left = -1, right = -1;
  };

  int build(std::vector<int>& order, int lo, int hi);
  void search(int node, const Vec3& query, int& best_index, Real& best_dist) const;

  Mat points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Nearest column of `tree`'s point set for every column of `queries`.
std::vector<int> nearest_indices(const Mat& queries, const KdTree3& tree);

}  // namespace neusurf
