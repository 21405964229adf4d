#pragma once

#include <string>

#include "fp3d/squeeze.hpp"

namespace fp3d {

// One panel per layer, one labeled rectangle per component. Rectangle
// coordinates equal the layout coordinates (SVG y grows downward; panels are
// flipped so the rally corner reads bottom-left).
std::string render_svg(const GeometricPlacement& g);

void write_text_file(const std::string& path, const std::string& content);  // IoError

}  // namespace fp3d
