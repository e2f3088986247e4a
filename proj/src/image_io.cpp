#include "faceprobe/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <memory>

namespace fp {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

// --- PGM (binary P5, maxval <= 255) ---

int pgm_next_token(FILE* f, char* buf, size_t cap) {
  int c;
  // skip whitespace and '#' comments
  for (;;) {
    c = std::fgetc(f);
    if (c == EOF) return 0;
    if (c == '#') {
      while (c != EOF && c != '\n') c = std::fgetc(f);
      continue;
    }
    if (!std::isspace(c)) break;
  }
  size_t n = 0;
  while (c != EOF && !std::isspace(c)) {
    if (n + 1 < cap) buf[n++] = char(c);
    c = std::fgetc(f);
  }
  buf[n] = '\0';
  return 1;
}

ImageMatrix load_pgm(FILE* f, const std::string& path) {
  char tok[64];
  if (!pgm_next_token(f, tok, sizeof tok) || std::strcmp(tok, "P5") != 0)
    raise_data(path + ": not a binary PGM (P5) file");
  long vals[3];
  for (int i = 0; i < 3; ++i) {
    if (!pgm_next_token(f, tok, sizeof tok)) raise_data(path + ": truncated PGM header");
    char* end = nullptr;
    vals[i] = std::strtol(tok, &end, 10);
    if (end == tok || vals[i] <= 0) raise_data(path + ": bad PGM header field '" + tok + "'");
  }
  long cols = vals[0], rows = vals[1], maxval = vals[2];
  if (maxval > 255) raise_data(path + ": 16-bit PGM not supported (maxval > 255)");
  ImageMatrix im{int(rows), int(cols)};
  std::vector<unsigned char> row(cols);
  for (long r = 0; r < rows; ++r) {
    if (std::fread(row.data(), 1, size_t(cols), f) != size_t(cols))
      raise_data(path + ": truncated PGM pixel data");
    for (long c = 0; c < cols; ++c) im.at(int(r), int(c)) = double(row[c]);
  }
  return im;
}

// --- PNG via libpng ---

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  std::string* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg ? msg : "png error";
  longjmp(png_jmpbuf(png), 1);
}

void png_warn_fn(png_structp, png_const_charp) {}

ImageMatrix load_png(FILE* f, const std::string& path) {
  std::string errmsg;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &errmsg, png_error_fn, png_warn_fn);
  if (!png) raise_data(path + ": failed to initialize PNG reader");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    raise_data(path + ": failed to initialize PNG reader");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> data;
  png_uint_32 w = 0, h = 0;
  int channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise_data(path + ": PNG decode failed: " + errmsg);
  }
  png_init_io(png, f);
  png_read_info(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  size_t rowbytes = png_get_rowbytes(png, info);
  data.resize(rowbytes * h);
  row_ptrs.resize(h);
  for (png_uint_32 r = 0; r < h; ++r) row_ptrs[r] = data.data() + r * rowbytes;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3)
    raise_data(path + ": unsupported PNG channel layout after expansion");
  ImageMatrix im{int(h), int(w)};
  for (png_uint_32 r = 0; r < h; ++r) {
    const unsigned char* src = data.data() + r * rowbytes;
    for (png_uint_32 c = 0; c < w; ++c) {
      if (channels == 1) {
        im.at(int(r), int(c)) = double(src[c]);
      } else {
        const unsigned char* p = src + 3 * c;
        im.at(int(r), int(c)) = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
      }
    }
  }
  return im;
}

unsigned char quantize(double v) {
  double c = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
  return static_cast<unsigned char>(std::floor(c + 0.5));
}

}  // namespace

ImageMatrix load_image(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) raise_data(path + ": cannot open image file");
  unsigned char magic[8] = {0};
  size_t got = std::fread(magic, 1, sizeof magic, f.get());
  std::rewind(f.get());
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) return load_png(f.get(), path);
  if (got >= 2 && magic[0] == 'P' && magic[1] == '5') return load_pgm(f.get(), path);
  raise_data(path + ": unrecognized image format (expected PNG or binary PGM)");
}

void save_pgm(const ImageMatrix& im, const std::string& path) {
  validate_image(im, path);
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) raise_data(path + ": cannot open for writing");
  std::fprintf(f.get(), "P5\n%d %d\n255\n", im.cols, im.rows);
  std::vector<unsigned char> row(im.cols);
  for (int r = 0; r < im.rows; ++r) {
    for (int c = 0; c < im.cols; ++c) row[c] = quantize(im.at(r, c));
    if (std::fwrite(row.data(), 1, row.size(), f.get()) != row.size())
      raise_data(path + ": short write");
  }
}

void save_png(const ImageMatrix& im, const std::string& path) {
  validate_image(im, path);
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) raise_data(path + ": cannot open for writing");
  std::string errmsg;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &errmsg, png_error_fn, png_warn_fn);
  if (!png) raise_data(path + ": failed to initialize PNG writer");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    raise_data(path + ": failed to initialize PNG writer");
  }
  std::vector<unsigned char> data(size_t(im.rows) * im.cols);
  std::vector<png_bytep> row_ptrs(im.rows);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    raise_data(path + ": PNG encode failed: " + errmsg);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, png_uint_32(im.cols), png_uint_32(im.rows), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < im.rows; ++r) {
    for (int c = 0; c < im.cols; ++c) data[size_t(r) * im.cols + c] = quantize(im.at(r, c));
    row_ptrs[r] = data.data() + size_t(r) * im.cols;
  }
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace fp
