#pragma once

#include <complex>

#include "faceprobe/core.hpp"

namespace fp {

struct GaborBankParams {
  double sigma = 2.0 * M_PI;
  double k_max = M_PI / 2.0;
  double f = M_SQRT2;
  int n_scales = 5;   // nu in [0, n_scales)
  int n_orients = 8;  // mu in [0, n_orients)
  int kernel_size = 32;
};

// Complex kernel grid per (scale, orientation); kernel center is at integer
// offset (kernel_size/2, kernel_size/2).
struct GaborBank {
  GaborBankParams params;
  std::vector<std::vector<std::complex<double>>> kernels;  // [nu * n_orients + mu], row-major

  int center() const { return params.kernel_size / 2; }
  int count() const { return params.n_scales * params.n_orients; }
  const std::complex<double>& kernel_at(int index, int r, int c) const {
    return kernels[size_t(index)][size_t(r) * params.kernel_size + c];
  }
};

GaborBank build_gabor_bank(const GaborBankParams& params = {});

using ComplexGrid = std::vector<std::complex<double>>;

// True 2-D convolution with zero-padded borders; each response grid has the
// input dimensions. The FFT path matches the direct path within 1e-9
// relative and is the default.
std::vector<ComplexGrid> convolve_bank(const ImageMatrix& img, const GaborBank& bank,
                                       bool use_fft = true);

// Reference spatial-domain convolution for one kernel.
ComplexGrid convolve_direct(const ImageMatrix& img, const GaborBank& bank, int kernel_index);

// Magnitude at pixels (r, c) with r % grid_step == 0 and c % grid_step == 0,
// row-major, kernels ordered scale-major then orientation.
FeatureVector gabor_features(const ImageMatrix& img, const GaborBank& bank, int grid_step = 4);

int gabor_feature_dims(int rows, int cols, const GaborBankParams& params, int grid_step);

}  // namespace fp
