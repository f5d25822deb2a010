#pragma once

#include <string>

#include "neusurf/scene/primitives.hpp"

namespace neusurf {

// Plain-text scene description.  Line oriented; '#' starts a comment and
// blank lines are ignored.  Numbers are free-form doubles.
//
//   scene 1
//   background r g b
//   ambient a
//   light x y z                          (normalized on parse)
//   foreground n                         (optional; -1 = all primitives)
//   sphere cx cy cz  radius  ar ag ab
//   box    cx cy cz  hx hy hz  ar ag ab  [axis_x axis_y axis_z angle_rad]
//   torus  cx cy cz  ring tube  ar ag ab [axis_x axis_y axis_z angle_rad]
//
// Primitives appear in file order (which fixes union tie-breaks and the
// foreground prefix).  Unknown directives and malformed numbers throw.
Scene parse_scene(const std::string& text);
std::string format_scene(const Scene& scene);

Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

// Built-in fixtures:
//   "sphere"    one sphere, radius 0.5
//   "composite" torus + box union (concavities and an opening)
//   "cluttered" bright object plus dim thin shards away from the orbit
//               focus; only the object is foreground
// Unknown names throw.
Scene make_fixture(const std::string& name);

}  // namespace neusurf
