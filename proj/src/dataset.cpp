#include "faceprobe/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fp {

namespace {

std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ", ";
    out += toks[i];
  }
  return out;
}

// Shortest round-trip formatting for doubles.
std::string fmt_double(double v) {
  std::array<char, 40> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double_field(const std::string& s, const std::string& ctx) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    raise_data(ctx + ": not a number: '" + s + "'");
  return v;
}

long parse_int_field(const std::string& s, const std::string& ctx) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    raise_data(ctx + ": not an integer: '" + s + "'");
  return v;
}

std::string strip_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename Enum>
Enum parse_token(const std::string& tok, const std::vector<std::string>& table,
                 const std::string& what, const std::string& ctx) {
  for (size_t i = 0; i < table.size(); ++i)
    if (tok == table[i]) return Enum(i);
  raise_data(ctx + ": unknown " + what + " token '" + tok + "' (allowed: " + join_tokens(table) + ")");
}

std::string resolve_path(const std::string& base_dir, const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute()) return rel;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

constexpr const char* kManifestHeader =
    "image,left_eye_x,left_eye_y,right_eye_x,right_eye_y,landmarks,gender,age,expression,ethnicity";

}  // namespace

const std::vector<std::string>& gender_tokens() {
  static const std::vector<std::string> t = {"male", "female"};
  return t;
}

const std::vector<std::string>& expression_tokens() {
  static const std::vector<std::string> t = {"anger", "disgust", "fear", "happy", "sad", "surprise"};
  return t;
}

const std::vector<std::string>& ethnicity_tokens() {
  static const std::vector<std::string> t = {"white", "black", "indian", "other"};
  return t;
}

int landmark_scheme_count(LandmarkScheme scheme, int custom_n) {
  switch (scheme) {
    case LandmarkScheme::Fgnet68:
    case LandmarkScheme::Cohn68:
      return 68;
    case LandmarkScheme::Custom:
      return custom_n;
  }
  return 0;
}

std::string landmark_scheme_token(LandmarkScheme scheme, int custom_n) {
  switch (scheme) {
    case LandmarkScheme::Fgnet68:
      return "fgnet68";
    case LandmarkScheme::Cohn68:
      return "cohn68";
    case LandmarkScheme::Custom:
      return "custom:" + std::to_string(custom_n);
  }
  return "";
}

void parse_landmark_scheme(const std::string& token, LandmarkScheme& scheme, int& custom_n) {
  if (token == "fgnet68") {
    scheme = LandmarkScheme::Fgnet68;
    custom_n = 68;
    return;
  }
  if (token == "cohn68") {
    scheme = LandmarkScheme::Cohn68;
    custom_n = 68;
    return;
  }
  if (token.rfind("custom:", 0) == 0) {
    long n = parse_int_field(token.substr(7), "landmark scheme");
    if (n < 3) raise_data("landmark scheme: custom point count must be >= 3");
    scheme = LandmarkScheme::Custom;
    custom_n = int(n);
    return;
  }
  raise_data("unknown landmark scheme '" + token + "' (allowed: fgnet68, cohn68, custom:<n>)");
}

std::vector<DatasetRecord> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise_data(path + ": cannot open manifest");
  std::string base_dir = std::filesystem::path(path).parent_path().string();
  if (base_dir.empty()) base_dir = ".";

  std::string line;
  if (!std::getline(in, line)) raise_data(path + ": empty manifest (header required)");
  if (strip_cr(line) != kManifestHeader)
    raise_data(path + ": bad manifest header (expected '" + std::string(kManifestHeader) + "')");

  std::vector<DatasetRecord> records;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::string ctx = path + ":" + std::to_string(row);
    auto cells = split_csv(line);
    if (cells.size() != 10)
      raise_data(ctx + ": expected 10 fields, got " + std::to_string(cells.size()));

    DatasetRecord rec;
    if (cells[0].empty()) raise_data(ctx + ": field 'image' is empty");
    rec.image_path = cells[0];
    rec.image_path_resolved = resolve_path(base_dir, cells[0]);

    int eyes_given = 0;
    for (int i = 1; i <= 4; ++i) eyes_given += !cells[i].empty();
    if (eyes_given != 0 && eyes_given != 4)
      raise_data(ctx + ": field 'left_eye_x..right_eye_y' must be all present or all empty");
    if (eyes_given == 4) {
      EyePair e;
      e.left.x = parse_double_field(cells[1], ctx + " field 'left_eye_x'");
      e.left.y = parse_double_field(cells[2], ctx + " field 'left_eye_y'");
      e.right.x = parse_double_field(cells[3], ctx + " field 'right_eye_x'");
      e.right.y = parse_double_field(cells[4], ctx + " field 'right_eye_y'");
      rec.eyes = e;
    }
    if (!cells[5].empty()) {
      rec.landmarks_path = cells[5];
      rec.landmarks_path_resolved = resolve_path(base_dir, cells[5]);
    }
    if (!cells[6].empty())
      rec.gender = parse_token<Gender>(cells[6], gender_tokens(), "gender", ctx);
    if (!cells[7].empty()) {
      long age = parse_int_field(cells[7], ctx + " field 'age'");
      if (age < 0) raise_data(ctx + ": field 'age' must be >= 0");
      rec.age_years = int(age);
    }
    if (!cells[8].empty())
      rec.expression = parse_token<Expression>(cells[8], expression_tokens(), "expression", ctx);
    if (!cells[9].empty())
      rec.ethnicity = parse_token<Ethnicity>(cells[9], ethnicity_tokens(), "ethnicity", ctx);

    if (!rec.gender && !rec.age_years && !rec.expression && !rec.ethnicity)
      raise_data(ctx + ": record carries no label (need at least one of gender/age/expression/ethnicity)");
    records.push_back(std::move(rec));
  }
  return records;
}

void save_manifest(const std::vector<DatasetRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise_data(path + ": cannot open for writing");
  out << kManifestHeader << "\n";
  for (const auto& r : records) {
    out << r.image_path << ',';
    if (r.eyes) {
      out << fmt_double(r.eyes->left.x) << ',' << fmt_double(r.eyes->left.y) << ','
          << fmt_double(r.eyes->right.x) << ',' << fmt_double(r.eyes->right.y);
    } else {
      out << ",,,";
    }
    out << ',' << (r.landmarks_path ? *r.landmarks_path : "");
    out << ',' << (r.gender ? gender_tokens()[size_t(*r.gender)] : "");
    out << ',' << (r.age_years ? std::to_string(*r.age_years) : "");
    out << ',' << (r.expression ? expression_tokens()[size_t(*r.expression)] : "");
    out << ',' << (r.ethnicity ? ethnicity_tokens()[size_t(*r.ethnicity)] : "");
    out << '\n';
  }
  if (!out) raise_data(path + ": write failed");
}

LandmarkSet load_landmarks(const std::string& path, LandmarkScheme scheme, int custom_n) {
  std::ifstream in(path);
  if (!in) raise_data(path + ": cannot open landmark file");
  std::string line;
  if (!std::getline(in, line)) raise_data(path + ": empty landmark file");
  line = strip_cr(line);
  if (line.rfind("n_points:", 0) != 0) raise_data(path + ": first line must be 'n_points: <N>'");
  std::string count_str = line.substr(9);
  count_str.erase(0, count_str.find_first_not_of(" \t"));
  long n = parse_int_field(count_str, path + " n_points");
  if (n < 1) raise_data(path + ": n_points must be >= 1");

  LandmarkSet lm;
  lm.scheme = scheme;
  lm.custom_n = scheme == LandmarkScheme::Custom ? custom_n : 68;
  int expected = landmark_scheme_count(scheme, custom_n);
  if (n != expected)
    raise_data(path + ": landmark count mismatch for scheme " +
               landmark_scheme_token(scheme, custom_n) + " (expected " + std::to_string(expected) +
               ", actual " + std::to_string(n) + ")");

  lm.points.reserve(size_t(n));
  for (long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) raise_data(path + ": truncated point list");
    std::istringstream ls(strip_cr(line));
    double x, y;
    if (!(ls >> x >> y)) raise_data(path + ": bad point on line " + std::to_string(i + 2));
    if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0 || y < 0.0)
      raise_data(path + ": coordinates must be finite and non-negative (line " + std::to_string(i + 2) + ")");
    lm.points.push_back({x, y});
  }
  return lm;
}

void save_landmarks(const LandmarkSet& lm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise_data(path + ": cannot open for writing");
  out << "n_points: " << lm.points.size() << "\n";
  for (const auto& p : lm.points) out << fmt_double(p.x) << ' ' << fmt_double(p.y) << "\n";
  if (!out) raise_data(path + ": write failed");
}

ImageMatrix normalize_face(const ImageMatrix& img, Point2 left_eye, Point2 right_eye,
                           int out_rows, int out_cols) {
  validate_image(img, "normalize_face");
  if (out_rows < 1 || out_cols < 1) raise_usage("normalize_face: output size must be positive");
  auto inside = [&](const Point2& p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= img.cols - 1 && p.y <= img.rows - 1;
  };
  if (!inside(left_eye) || !inside(right_eye))
    raise_data("normalize_face: eye point outside the image");
  double dx = right_eye.x - left_eye.x, dy = right_eye.y - left_eye.y;
  if (dx * dx + dy * dy < 1e-12)
    raise_data("normalize_face: degenerate geometry (coincident eye points)");

  // Canonical eye positions in the output frame.
  Point2 lc{0.3 * out_cols, 0.35 * out_rows};
  Point2 rc{0.7 * out_cols, 0.35 * out_rows};

  // Similarity T with T(lc) = left_eye, T(rc) = right_eye, as complex w*z + t.
  double den_x = rc.x - lc.x, den_y = rc.y - lc.y;
  double den2 = den_x * den_x + den_y * den_y;
  double wr = (dx * den_x + dy * den_y) / den2;
  double wi = (dy * den_x - dx * den_y) / den2;
  double tx = left_eye.x - (wr * lc.x - wi * lc.y);
  double ty = left_eye.y - (wi * lc.x + wr * lc.y);

  ImageMatrix out(out_rows, out_cols);
  for (int r = 0; r < out_rows; ++r) {
    for (int c = 0; c < out_cols; ++c) {
      double sx = wr * c - wi * r + tx;
      double sy = wi * c + wr * r + ty;
      out.at(r, c) = bilinear(img, sx, sy);
    }
  }
  return out;
}

ImageMatrix histogram_equalize(const ImageMatrix& img) {
  validate_image(img, "histogram_equalize");
  std::array<size_t, 256> hist{};
  auto bin_of = [](double v) {
    int b = int(std::floor(v));
    return b < 0 ? 0 : (b > 255 ? 255 : b);
  };
  for (double v : img.px) ++hist[size_t(bin_of(v))];
  std::array<double, 256> map{};
  size_t cum = 0;
  double n = double(img.px.size());
  for (int b = 0; b < 256; ++b) {
    cum += hist[size_t(b)];
    map[size_t(b)] = std::floor(255.0 * double(cum) / n + 0.5);
  }
  ImageMatrix out(img.rows, img.cols);
  for (size_t i = 0; i < img.px.size(); ++i) out.px[i] = map[size_t(bin_of(img.px[i]))];
  return out;
}

}  // namespace fp
