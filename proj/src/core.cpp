#include "faceprobe/core.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace fp {

double bilinear(const ImageMatrix& im, double x, double y) {
  int x0 = int(std::floor(x));
  int y0 = int(std::floor(y));
  double wx = x - x0, wy = y - y0;
  auto pick = [&](int r, int c) -> double {
    if (r < 0 || r >= im.rows || c < 0 || c >= im.cols) return 0.0;
    return im.at(r, c);
  };
  double v00 = pick(y0, x0), v01 = pick(y0, x0 + 1);
  double v10 = pick(y0 + 1, x0), v11 = pick(y0 + 1, x0 + 1);
  return (1.0 - wy) * ((1.0 - wx) * v00 + wx * v01) + wy * ((1.0 - wx) * v10 + wx * v11);
}

void validate_image(const ImageMatrix& im, const std::string& what) {
  if (im.rows < 1 || im.cols < 1) raise_data(what + ": image must be at least 1x1");
  if (im.px.size() != size_t(im.rows) * size_t(im.cols))
    raise_data(what + ": pixel count does not match rows*cols");
  for (double v : im.px) {
    if (!std::isfinite(v) || v < 0.0 || v > 255.0)
      raise_data(what + ": pixel intensity outside [0,255]");
  }
}

int worker_count() {
  if (const char* env = std::getenv("FACEPROBE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return int(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? int(hc) : 1;
}

void parallel_chunks(size_t n, size_t chunk, const std::function<void(size_t, size_t)>& fn) {
  if (n == 0) return;
  if (chunk == 0) chunk = 1;
  size_t n_chunks = (n + chunk - 1) / chunk;
  int workers = std::min<size_t>(worker_count(), n_chunks);
  if (workers <= 1) {
    for (size_t c = 0; c < n_chunks; ++c) fn(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<size_t> next{0};
  auto body = [&] {
    for (;;) {
      size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c * chunk, std::min(n, (c + 1) * chunk));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

}  // namespace fp
