#pragma once

#include <vector>

#include "neusurf/render/camera.hpp"
#include "neusurf/render/image.hpp"
#include "neusurf/scene/dataset.hpp"

namespace neusurf {

// One calibrated binary silhouette: mask pixels cover the object of
// interest as seen from `camera`.
struct SilhouetteView {
  Camera camera;
  Image mask;  // on = any channel > 0.5
};

struct SilhouetteSet {
  std::vector<SilhouetteView> views;

  // Throws std::invalid_argument if any mask's dimensions disagree with its
  // camera or a camera is malformed.  An empty set is valid here; operations
  // that need at least one view say so themselves.
  void validate() const;
};

// Pairs up a dataset's masks with its cameras.
SilhouetteSet silhouettes_from(const Dataset& dataset);

}  // namespace neusurf
