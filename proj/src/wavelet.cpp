#include "faceprobe/wavelet.hpp"

#include <algorithm>

namespace fp {

namespace {

// 16-tap Daubechies lowpass with 8 vanishing moments, sum = sqrt(2).
// Generated by spectral factorization of the Daubechies polynomial and
// validated by the orthogonality and moment tests.
constexpr double kDb8[16] = {
    0.054415842243104010,   0.31287159091429997,    0.67563073629728981,
    0.58535468365420671,    -0.015829105256349306,  -0.28401554296154693,
    0.00047248457391328277, 0.12874742662047846,    -0.017369301001807546,
    -0.044088253930794752,  0.013981027917398282,   0.0087460940474057767,
    -0.0048703529934515743, -0.00039174037337694705, 0.00067544940645056937,
    -0.00011747678412476953};

struct Grid {
  int rows = 0, cols = 0;
  std::vector<double> v;
  Grid(int r, int c) : rows(r), cols(c), v(size_t(r) * c, 0.0) {}
  double& at(int r, int c) { return v[size_t(r) * cols + c]; }
  double at(int r, int c) const { return v[size_t(r) * cols + c]; }
};

Grid to_grid(const ImageMatrix& im) {
  Grid g(im.rows, im.cols);
  g.v = im.px;
  return g;
}

ImageMatrix to_image_raw(const Grid& g) {
  ImageMatrix im;
  im.rows = g.rows;
  im.cols = g.cols;
  im.px = g.v;
  return im;
}

// Replicate-pad odd dimensions by one on the right/bottom.
Grid pad_even(const Grid& in) {
  int rows = in.rows + (in.rows & 1);
  int cols = in.cols + (in.cols & 1);
  if (rows == in.rows && cols == in.cols) return in;
  Grid out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    int sr = std::min(r, in.rows - 1);
    for (int c = 0; c < cols; ++c) out.at(r, c) = in.at(sr, std::min(c, in.cols - 1));
  }
  return out;
}

// Analysis along rows: each row of length N (even) -> low and high halves,
// out[n] = sum_k taps[k] * x[(2n + k) mod N].
void analyze_rows(const Grid& in, const std::vector<double>& lo, const std::vector<double>& hi,
                  Grid& low, Grid& high) {
  int n = in.cols;
  int half = n / 2;
  int taps = int(lo.size());
  for (int r = 0; r < in.rows; ++r) {
    for (int m = 0; m < half; ++m) {
      double sl = 0.0, sh = 0.0;
      for (int k = 0; k < taps; ++k) {
        double x = in.at(r, (2 * m + k) % n);
        sl += lo[size_t(k)] * x;
        sh += hi[size_t(k)] * x;
      }
      low.at(r, m) = sl;
      high.at(r, m) = sh;
    }
  }
}

Grid transpose(const Grid& in) {
  Grid out(in.cols, in.rows);
  for (int r = 0; r < in.rows; ++r)
    for (int c = 0; c < in.cols; ++c) out.at(c, r) = in.at(r, c);
  return out;
}

struct LevelBands {
  Grid ll, hl, lh, hh;
};

LevelBands dwt2_level_grid(const Grid& src, const WaveletFilters& f) {
  Grid in = pad_even(src);
  int half_c = in.cols / 2, half_r = in.rows / 2;
  Grid low(in.rows, half_c), high(in.rows, half_c);
  analyze_rows(in, f.lowpass, f.highpass, low, high);
  // column pass via transpose
  Grid low_t = transpose(low), high_t = transpose(high);
  Grid ll_t(half_c, half_r), lh_t(half_c, half_r);
  Grid hl_t(half_c, half_r), hh_t(half_c, half_r);
  analyze_rows(low_t, f.lowpass, f.highpass, ll_t, lh_t);
  analyze_rows(high_t, f.lowpass, f.highpass, hl_t, hh_t);
  return LevelBands{transpose(ll_t), transpose(hl_t), transpose(lh_t), transpose(hh_t)};
}

}  // namespace

WaveletFilters daubechies8_filters() {
  WaveletFilters f;
  f.family_tag = "db8";
  f.lowpass.assign(kDb8, kDb8 + 16);
  f.highpass.resize(16);
  for (int k = 0; k < 16; ++k)
    f.highpass[size_t(k)] = (k % 2 == 0 ? 1.0 : -1.0) * f.lowpass[size_t(15 - k)];
  return f;
}

SubbandSet dwt2_level(const ImageMatrix& img, const WaveletFilters& filters) {
  if (img.rows < 1 || img.cols < 1) raise_data("dwt2_level: empty image");
  LevelBands b = dwt2_level_grid(to_grid(img), filters);
  return SubbandSet{to_image_raw(b.ll), to_image_raw(b.hl), to_image_raw(b.lh), to_image_raw(b.hh)};
}

FeatureVector wavelet_features(const ImageMatrix& img, const WaveletFilters& filters, int levels) {
  if (levels < 1) raise_usage("wavelet_features: levels must be >= 1");
  if (img.rows < 1 || img.cols < 1) raise_data("wavelet_features: empty image");
  std::vector<LevelBands> pyramid;
  Grid cur = to_grid(img);
  for (int l = 0; l < levels; ++l) {
    pyramid.push_back(dwt2_level_grid(cur, filters));
    cur = pyramid.back().ll;
  }
  FeatureVector fv;
  fv.source = FeatureSource::Wd;
  auto append = [&fv](const Grid& g) { fv.values.insert(fv.values.end(), g.v.begin(), g.v.end()); };
  append(pyramid.back().ll);
  for (int l = levels - 1; l >= 0; --l) {
    append(pyramid[size_t(l)].hl);
    append(pyramid[size_t(l)].lh);
    append(pyramid[size_t(l)].hh);
  }
  return fv;
}

int wavelet_feature_dims(int rows, int cols, int levels) {
  int total = 0;
  for (int l = 0; l < levels; ++l) {
    rows += rows & 1;
    cols += cols & 1;
    rows /= 2;
    cols /= 2;
    total += 3 * rows * cols;  // detail bands of this level
  }
  return total + rows * cols;  // plus the deepest LL
}

}  // namespace fp
