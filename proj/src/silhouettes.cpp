#include "neusurf/eval/silhouettes.hpp"

#include <stdexcept>

namespace neusurf {

void SilhouetteSet::validate() const {
  for (const auto& view : views) {
    view.camera.validate();
    if (view.mask.width != view.camera.width || view.mask.height != view.camera.height)
      throw std::invalid_argument(
          "SilhouetteSet: mask dimensions disagree with the camera");
    if (view.mask.pixels.cols() !=
        static_cast<Eigen::Index>(view.mask.width) * view.mask.height)
      throw std::invalid_argument("SilhouetteSet: malformed mask image");
  }
}

SilhouetteSet silhouettes_from(const Dataset& dataset) {
  if (dataset.cameras.size() != dataset.masks.size())
    throw std::invalid_argument("silhouettes_from: camera/mask count mismatch");
  SilhouetteSet set;
  set.views.reserve(dataset.cameras.size());
  for (std::size_t i = 0; i < dataset.cameras.size(); ++i)
    set.views.push_back({dataset.cameras[i], dataset.masks[i]});
  set.validate();
  return set;
}

}  // namespace neusurf
