#pragma once

#include <string>

#include "hvdflow/colorize.hpp"
#include "hvdflow/grid.hpp"

namespace hvdflow {

// Loads a PNG, PGM, or PPM image (8- or 16-bit), normalized to [0,1].
// RGB inputs are reduced with the 0.299/0.587/0.114 luminance weights.
ScalarGrid read_image(const std::string& path);

// 16-bit binary PGM, values clamped to [0,1] before quantization.
void write_pgm16(const std::string& path, const ScalarGrid& g);

// 8-bit PNG writers for visualization output.
void write_png_rgb(const std::string& path, const RgbImage& img);
void write_png_gray(const std::string& path, const ScalarGrid& g);  // clamps to [0,1]

}  // namespace hvdflow
