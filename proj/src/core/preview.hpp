#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "scenegen.hpp"

namespace termstrip {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::uint8_t* at(int x, int y) { return rgb.data() + 3 * (y * width + x); }
  const std::uint8_t* at(int x, int y) const {
    return rgb.data() + 3 * (y * width + x);
  }
};

// Flat-shaded painter's-algorithm rasterization of the projected part boxes;
// a debugging aid and the image substrate for tests. Deterministic: the same
// scene always yields identical bytes.
Image render_preview(const Catalog& catalog, const SceneSpec& scene);

void write_png_rgb8(const std::string& path, const Image& image);

}  // namespace termstrip
