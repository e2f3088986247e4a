#pragma once

#include <string>

#include "faceprobe/core.hpp"

namespace fp {

// Decodes PNG or binary PGM (P5), sniffing the magic bytes rather than the
// extension. Color PNGs are reduced to grayscale with the Rec. 601 luma
// weights; alpha is ignored.
ImageMatrix load_image(const std::string& path);

// Writers quantize to 8-bit with round-half-up after clamping to [0, 255].
void save_png(const ImageMatrix& im, const std::string& path);
void save_pgm(const ImageMatrix& im, const std::string& path);

}  // namespace fp
