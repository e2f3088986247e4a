#pragma once

#include <string>

#include "faceprobe/core.hpp"

namespace fp {

// Orthonormal analysis pair; highpass is the alternating-sign reversal of
// lowpass, taps normalized so sum(lowpass) = sqrt(2).
struct WaveletFilters {
  std::vector<double> lowpass;
  std::vector<double> highpass;
  std::string family_tag;
};

// 16-tap Daubechies filter with 8 vanishing moments.
WaveletFilters daubechies8_filters();

// One level of separable decomposition. Band letters: first = row-direction
// (horizontal) filter, second = column-direction filter.
struct SubbandSet {
  ImageMatrix ll, hl, lh, hh;
};

// Rows filtered and downsampled by 2, then columns. Periodic extension;
// an odd dimension is first right/bottom-padded by one replicated sample.
// 1-D convention: out[n] = sum_k taps[k] * x[(2n + k) mod N].
SubbandSet dwt2_level(const ImageMatrix& img, const WaveletFilters& filters);

// Recursively decomposes LL `levels` times and concatenates the final bands
// row-major in the order [deepest LL, deepest HL, LH, HH, then shallower
// HL, LH, HH per level outward].
FeatureVector wavelet_features(const ImageMatrix& img, const WaveletFilters& filters, int levels = 2);

// Feature length for a given input shape (accounts for per-level padding).
int wavelet_feature_dims(int rows, int cols, int levels);

}  // namespace fp
