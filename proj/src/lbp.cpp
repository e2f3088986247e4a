#include "faceprobe/lbp.hpp"

#include <algorithm>

namespace fp {

namespace {
// neighbor offsets, clockwise from top-left: (dr, dc)
constexpr int kOff[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}};
}  // namespace

int lbp_code(const std::array<double, 9>& patch) {
  double center = patch[4];
  int code = 0;
  for (int i = 0; i < 8; ++i) {
    int r = 1 + kOff[i][0], c = 1 + kOff[i][1];
    if (patch[size_t(r) * 3 + c] - center > 0.0) code |= 1 << i;
  }
  return code;
}

LbpCodeImage lbp_image(const ImageMatrix& img) {
  if (img.rows < 3 || img.cols < 3) raise_data("lbp_image: image must be at least 3x3");
  LbpCodeImage out;
  out.rows = img.rows - 2;
  out.cols = img.cols - 2;
  out.codes.resize(size_t(out.rows) * out.cols);
  const double* px = img.px.data();
  int stride = img.cols;
  for (int r = 1; r < img.rows - 1; ++r) {
    const double* row = px + size_t(r) * stride;
    for (int c = 1; c < img.cols - 1; ++c) {
      double g = row[c];
      int code = 0;
      code |= (row[c - stride - 1] > g) << 0;
      code |= (row[c - stride] > g) << 1;
      code |= (row[c - stride + 1] > g) << 2;
      code |= (row[c + 1] > g) << 3;
      code |= (row[c + stride + 1] > g) << 4;
      code |= (row[c + stride] > g) << 5;
      code |= (row[c + stride - 1] > g) << 6;
      code |= (row[c - 1] > g) << 7;
      out.codes[size_t(r - 1) * out.cols + (c - 1)] = uint8_t(code);
    }
  }
  return out;
}

FeatureVector lbp_block_histograms(const ImageMatrix& img, int blocks_rows, int blocks_cols) {
  if (blocks_rows < 1 || blocks_cols < 1)
    raise_usage("lbp_block_histograms: block grid must be positive");
  LbpCodeImage codes = lbp_image(img);
  if (codes.rows < blocks_rows || codes.cols < blocks_cols)
    raise_data("lbp_block_histograms: more blocks than code pixels (" +
               std::to_string(codes.rows) + "x" + std::to_string(codes.cols) + " codes, " +
               std::to_string(blocks_rows) + "x" + std::to_string(blocks_cols) + " blocks)");

  FeatureVector fv;
  fv.source = FeatureSource::Lbp;
  fv.values.assign(size_t(blocks_rows) * blocks_cols * 256, 0.0);
  int bh = codes.rows / blocks_rows;
  int bw = codes.cols / blocks_cols;
  for (int r = 0; r < codes.rows; ++r) {
    int br = std::min(r / bh, blocks_rows - 1);
    for (int c = 0; c < codes.cols; ++c) {
      int bc = std::min(c / bw, blocks_cols - 1);
      size_t base = (size_t(br) * blocks_cols + bc) * 256;
      fv.values[base + codes.at(r, c)] += 1.0;
    }
  }
  return fv;
}

}  // namespace fp
