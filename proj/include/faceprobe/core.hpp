#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fp {

// Error taxonomy shared by the library, the C API and the CLI.
// Usage -> exit 1, Data -> exit 2, Numeric -> exit 3.
enum class ErrorKind { Usage = 1, Data = 2, Numeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise_usage(const std::string& msg) { throw Error(ErrorKind::Usage, msg); }
[[noreturn]] inline void raise_data(const std::string& msg) { throw Error(ErrorKind::Data, msg); }
[[noreturn]] inline void raise_numeric(const std::string& msg) { throw Error(ErrorKind::Numeric, msg); }

// 2-D grayscale raster, row-major, intensities in [0, 255].
struct ImageMatrix {
  int rows = 0, cols = 0;
  std::vector<double> px;

  ImageMatrix() = default;
  ImageMatrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), px(size_t(r) * size_t(c), fill) {}

  double& at(int r, int c) { return px[size_t(r) * cols + c]; }
  double at(int r, int c) const { return px[size_t(r) * cols + c]; }
  size_t size() const { return px.size(); }
};

// Bilinear sample at (x=col, y=row); samples outside the raster contribute 0.
double bilinear(const ImageMatrix& im, double x, double y);

// Checks the ImageMatrix invariants (finite, within [0,255], size coherent).
void validate_image(const ImageMatrix& im, const std::string& what);

enum class FeatureSource { Gabor, Lbp, Wd, Aam, Pca };

// Flat real-valued feature representation shared by all extractors.
struct FeatureVector {
  std::vector<double> values;
  FeatureSource source = FeatureSource::Pca;

  int dims() const { return int(values.size()); }
};

// Deterministic RNG. std::mt19937_64 is fully specified by the standard and
// the mappings below avoid std::*_distribution, whose output is
// implementation-defined; the same seed therefore yields the same stream on
// every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t raw() { return gen_(); }

  // 53-bit uniform in [0, 1).
  double uniform01() { return double(gen_() >> 11) * (1.0 / 9007199254740992.0); }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Fisher-style multiply-shift, uniform in [0, n).
  uint64_t uniform_int(uint64_t n) {
    return uint64_t((static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  // Box-Muller with the usual spare caching.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Worker cap: FACEPROBE_THREADS env var, 0 or unset = hardware concurrency.
int worker_count();

// Runs fn(begin, end) over [0, n) in fixed-size chunks. Chunk boundaries do
// not depend on the thread count, so chunked reductions stay bit-identical
// whatever the parallelism.
void parallel_chunks(size_t n, size_t chunk, const std::function<void(size_t, size_t)>& fn);

}  // namespace fp
