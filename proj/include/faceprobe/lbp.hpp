#pragma once

#include <array>
#include <cstdint>

#include "faceprobe/core.hpp"

namespace fp {

// 3x3 local binary pattern codes. Bit i is set iff neighbor i is strictly
// brighter than the center; neighbor 0 is top-left, proceeding clockwise.
struct LbpCodeImage {
  int rows = 0, cols = 0;  // source interior dims: (src_rows-2) x (src_cols-2)
  std::vector<uint8_t> codes;

  uint8_t at(int r, int c) const { return codes[size_t(r) * cols + c]; }
};

// patch is row-major, patch[4] is the center.
int lbp_code(const std::array<double, 9>& patch);

LbpCodeImage lbp_image(const ImageMatrix& img);

// Code image partitioned into blocks_rows x blocks_cols rectangles (the last
// block in each direction absorbs remainder pixels); per block a 256-bin
// count histogram; concatenated block-row-major.
FeatureVector lbp_block_histograms(const ImageMatrix& img, int blocks_rows = 9, int blocks_cols = 9);

}  // namespace fp
