#include "faceprobe/gabor.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace fp {

namespace {

using cd = std::complex<double>;

// Iterative radix-2 FFT, in place. n must be a power of two.
void fft(std::vector<cd>& a, bool inverse) {
  size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
    cd wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cd w(1.0);
      for (size_t j = 0; j < len / 2; ++j) {
        cd u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

void fft2(std::vector<cd>& a, size_t rows, size_t cols, bool inverse) {
  std::vector<cd> tmp(std::max(rows, cols));
  for (size_t r = 0; r < rows; ++r) {
    tmp.assign(a.begin() + long(r * cols), a.begin() + long((r + 1) * cols));
    fft(tmp, inverse);
    std::copy(tmp.begin(), tmp.end(), a.begin() + long(r * cols));
  }
  std::vector<cd> col(rows);
  for (size_t c = 0; c < cols; ++c) {
    for (size_t r = 0; r < rows; ++r) col[r] = a[r * cols + c];
    fft(col, inverse);
    for (size_t r = 0; r < rows; ++r) a[r * cols + c] = col[r];
  }
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Kernel spectra depend only on the bank parameters and the padded size, so
// they are shared across images (and threads) of one run.
const std::vector<std::vector<cd>>& kernel_spectra(const GaborBank& bank, size_t frows,
                                                   size_t fcols) {
  static std::mutex mu;
  static std::map<std::string, std::vector<std::vector<cd>>> cache;
  const GaborBankParams& p = bank.params;
  std::ostringstream key;
  key.precision(17);
  key << p.sigma << ':' << p.k_max << ':' << p.f << ':' << p.n_scales << ':' << p.n_orients << ':'
      << p.kernel_size << '@' << frows << 'x' << fcols;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;

  int size = p.kernel_size;
  int cx = size / 2;
  std::vector<std::vector<cd>> spectra(size_t(bank.count()));
  for (int i = 0; i < bank.count(); ++i) {
    std::vector<cd> fker(frows * fcols, cd(0.0));
    const auto& ker = bank.kernels[size_t(i)];
    for (int kr = 0; kr < size; ++kr) {
      size_t rr = size_t((kr - cx + int(frows)) % int(frows));
      for (int kc = 0; kc < size; ++kc) {
        size_t cc = size_t((kc - cx + int(fcols)) % int(fcols));
        fker[rr * fcols + cc] = ker[size_t(kr) * size + kc];
      }
    }
    fft2(fker, frows, fcols, false);
    spectra[size_t(i)] = std::move(fker);
  }
  return cache.emplace(key.str(), std::move(spectra)).first->second;
}

}  // namespace

GaborBank build_gabor_bank(const GaborBankParams& params) {
  if (params.sigma <= 0.0 || params.k_max <= 0.0 || params.f <= 0.0)
    raise_usage("build_gabor_bank: sigma, k_max and f must be positive");
  if (params.n_scales < 1 || params.n_orients < 1)
    raise_usage("build_gabor_bank: need at least one scale and one orientation");
  if (params.kernel_size < 3) raise_usage("build_gabor_bank: kernel_size must be >= 3");

  GaborBank bank;
  bank.params = params;
  bank.kernels.resize(size_t(params.n_scales) * params.n_orients);
  int size = params.kernel_size;
  int cx = size / 2;
  double sigma2 = params.sigma * params.sigma;
  double dc = std::exp(-sigma2 / 2.0);
  for (int nu = 0; nu < params.n_scales; ++nu) {
    double k = params.k_max / std::pow(params.f, double(nu));
    double k2 = k * k;
    for (int mu = 0; mu < params.n_orients; ++mu) {
      double phi = M_PI * double(mu) / double(params.n_orients);
      double kx = k * std::cos(phi), ky = k * std::sin(phi);
      std::vector<cd>& ker = bank.kernels[size_t(nu) * params.n_orients + mu];
      ker.resize(size_t(size) * size);
      for (int r = 0; r < size; ++r) {
        double zy = double(r - cx);
        for (int c = 0; c < size; ++c) {
          double zx = double(c - cx);
          double z2 = zx * zx + zy * zy;
          double env = (k2 / sigma2) * std::exp(-k2 * z2 / (2.0 * sigma2));
          double phase = kx * zx + ky * zy;
          ker[size_t(r) * size + c] =
              env * (cd(std::cos(phase), std::sin(phase)) - cd(dc, 0.0));
        }
      }
    }
  }
  return bank;
}

ComplexGrid convolve_direct(const ImageMatrix& img, const GaborBank& bank, int kernel_index) {
  validate_image(img, "convolve_direct");
  int size = bank.params.kernel_size;
  int cx = size / 2;
  ComplexGrid out(size_t(img.rows) * img.cols);
  const auto& ker = bank.kernels[size_t(kernel_index)];
  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      cd acc(0.0);
      // out[p] = sum_z ker(z) * img(p - z), z = grid offset from kernel center
      for (int kr = 0; kr < size; ++kr) {
        int sr = r - (kr - cx);
        if (sr < 0 || sr >= img.rows) continue;
        for (int kc = 0; kc < size; ++kc) {
          int sc = c - (kc - cx);
          if (sc < 0 || sc >= img.cols) continue;
          acc += ker[size_t(kr) * size + kc] * img.at(sr, sc);
        }
      }
      out[size_t(r) * img.cols + c] = acc;
    }
  }
  return out;
}

std::vector<ComplexGrid> convolve_bank(const ImageMatrix& img, const GaborBank& bank, bool use_fft) {
  validate_image(img, "convolve_bank");
  int n = bank.count();
  std::vector<ComplexGrid> out{size_t(n)};
  if (!use_fft) {
    for (int i = 0; i < n; ++i) out[size_t(i)] = convolve_direct(img, bank, i);
    return out;
  }

  int size = bank.params.kernel_size;
  size_t frows = next_pow2(size_t(img.rows + size));
  size_t fcols = next_pow2(size_t(img.cols + size));
  std::vector<cd> fimg(frows * fcols, cd(0.0));
  for (int r = 0; r < img.rows; ++r)
    for (int c = 0; c < img.cols; ++c) fimg[size_t(r) * fcols + size_t(c)] = img.at(r, c);
  fft2(fimg, frows, fcols, false);

  const auto& spectra = kernel_spectra(bank, frows, fcols);
  std::vector<cd> prod(frows * fcols);
  for (int i = 0; i < n; ++i) {
    const std::vector<cd>& fker = spectra[size_t(i)];
    for (size_t j = 0; j < prod.size(); ++j) prod[j] = fimg[j] * fker[j];
    fft2(prod, frows, fcols, true);
    ComplexGrid& grid = out[size_t(i)];
    grid.resize(size_t(img.rows) * img.cols);
    for (int r = 0; r < img.rows; ++r)
      for (int c = 0; c < img.cols; ++c) grid[size_t(r) * img.cols + c] = prod[size_t(r) * fcols + size_t(c)];
  }
  return out;
}

FeatureVector gabor_features(const ImageMatrix& img, const GaborBank& bank, int grid_step) {
  if (grid_step < 1) raise_usage("gabor_features: grid_step must be >= 1");
  auto responses = convolve_bank(img, bank, true);
  FeatureVector fv;
  fv.source = FeatureSource::Gabor;
  fv.values.reserve(size_t(gabor_feature_dims(img.rows, img.cols, bank.params, grid_step)));
  for (const auto& grid : responses) {
    for (int r = 0; r < img.rows; r += grid_step)
      for (int c = 0; c < img.cols; c += grid_step)
        fv.values.push_back(std::abs(grid[size_t(r) * img.cols + c]));
  }
  return fv;
}

int gabor_feature_dims(int rows, int cols, const GaborBankParams& params, int grid_step) {
  int pr = (rows + grid_step - 1) / grid_step;
  int pc = (cols + grid_step - 1) / grid_step;
  return params.n_scales * params.n_orients * pr * pc;
}

}  // namespace fp
