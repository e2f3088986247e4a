#include "faceprobe/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "faceprobe/image_io.hpp"

namespace fp {

namespace {

struct FaceParams {
  double cx, cy;          // head center
  double eye_dist;        // distance between eye centers
  double half_w, half_h;  // head ellipse half axes
  double eye_y;
  double skin;            // base intensity
  double chi;             // contrast multiplier tied to skin band
  double mouth_curv_px;   // parabola depth at mouth corners
  double mouth_open;      // mouth thickness
  double mouth_halfwidth;
  double eye_ry;          // vertical eye aperture
  double nose_crease;     // disgust marker strength in [0, 1]
  double wrinkle_lambda;  // stripe wavelength
  double wrinkle_phase;
  double brow_slant;      // vertical tilt of the brow bars, mirrored
  double brow_raise;
};

void fill_ellipse(ImageMatrix& im, double cx, double cy, double rx, double ry, double value) {
  int r0 = std::max(0, int(std::floor(cy - ry)));
  int r1 = std::min(im.rows - 1, int(std::ceil(cy + ry)));
  for (int r = r0; r <= r1; ++r) {
    double dy = (r - cy) / ry;
    double span = 1.0 - dy * dy;
    if (span <= 0.0) continue;
    double dx = rx * std::sqrt(span);
    int c0 = std::max(0, int(std::floor(cx - dx)));
    int c1 = std::min(im.cols - 1, int(std::ceil(cx + dx)));
    for (int c = c0; c <= c1; ++c) {
      double ddx = (c - cx) / rx, ddy = (r - cy) / ry;
      if (ddx * ddx + ddy * ddy <= 1.0) im.at(r, c) = value;
    }
  }
}

void fill_rect(ImageMatrix& im, double x0, double y0, double x1, double y1, double value) {
  int r0 = std::max(0, int(std::floor(y0)));
  int r1 = std::min(im.rows - 1, int(std::ceil(y1)));
  int c0 = std::max(0, int(std::floor(x0)));
  int c1 = std::min(im.cols - 1, int(std::ceil(x1)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) im.at(r, c) = value;
}

bool inside_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
  double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

double mouth_y(const FaceParams& p, double my, double x) {
  double t = (x - p.cx) / p.mouth_halfwidth;
  return my + p.mouth_curv_px * t * t;
}

// Slanted thick brow segment over one eye; sign mirrors between eyes.
void draw_brow(ImageMatrix& im, const FaceParams& p, double ex, double sign, double value) {
  double y0 = p.eye_y - 5.5 - p.brow_raise;
  for (double t = -1.0; t <= 1.0; t += 0.06) {
    double x = ex + 4.5 * t;
    double y = y0 + sign * p.brow_slant * t;
    int c = int(std::floor(x + 0.5));
    for (int r = int(std::floor(y - 1.0)); r <= int(std::ceil(y + 1.0)); ++r)
      if (r >= 0 && r < im.rows && c >= 0 && c < im.cols) im.at(r, c) = value;
  }
}

ImageMatrix render_face(const CorpusSpec& spec, const FaceParams& p, Rng& rng) {
  ImageMatrix im(spec.canvas_rows, spec.canvas_cols, 26.0);
  double chi = p.chi;
  fill_ellipse(im, p.cx, p.cy, p.half_w, p.half_h, p.skin);

  double ex_l = p.cx - p.eye_dist / 2.0, ex_r = p.cx + p.eye_dist / 2.0;
  // eyebrows
  draw_brow(im, p, ex_l, 1.0, std::max(5.0, p.skin - 70.0 * chi));
  draw_brow(im, p, ex_r, -1.0, std::max(5.0, p.skin - 70.0 * chi));
  // eyes
  fill_ellipse(im, ex_l, p.eye_y, 2.6, p.eye_ry, std::max(5.0, p.skin - 95.0 * chi));
  fill_ellipse(im, ex_r, p.eye_y, 2.6, p.eye_ry, std::max(5.0, p.skin - 95.0 * chi));
  // nose
  fill_rect(im, p.cx - 0.9, p.cy - 1.0, p.cx + 0.9, p.cy + 6.0, std::max(5.0, p.skin - 28.0 * chi));
  if (p.nose_crease > 0.05)
    fill_rect(im, p.cx - 4.5, p.cy - 4.5, p.cx + 4.5, p.cy - 3.0,
              std::max(5.0, p.skin - 75.0 * chi * p.nose_crease));

  // mouth: thick parabola
  double my = p.cy + 0.55 * p.half_h;
  double mw = p.mouth_halfwidth;
  double mouth_v = std::max(5.0, p.skin - 85.0 * chi);
  for (double x = p.cx - mw; x <= p.cx + mw; x += 0.25) {
    double yc = mouth_y(p, my, x);
    int r0 = int(std::floor(yc - p.mouth_open / 2.0));
    int r1 = int(std::ceil(yc + p.mouth_open / 2.0));
    int c = int(std::floor(x + 0.5));
    for (int r = r0; r <= r1; ++r)
      if (r >= 0 && r < im.rows && c >= 0 && c < im.cols) im.at(r, c) = mouth_v;
  }

  // wrinkle stripes: forehead and chin bands inside the head
  double amp = 11.0 * chi * spec.age_cue;
  if (amp > 0.0) {
    double forehead_hi = p.eye_y - 8.0;
    double chin_lo = my + p.mouth_open + 3.0;
    for (int r = 0; r < im.rows; ++r) {
      bool in_band = (r < forehead_hi && r > p.cy - p.half_h) || (r > chin_lo);
      if (!in_band) continue;
      double w = amp * std::sin(2.0 * M_PI * double(r) / p.wrinkle_lambda + p.wrinkle_phase);
      for (int c = 0; c < im.cols; ++c) {
        if (!inside_ellipse(c, r, p.cx, p.cy, p.half_w * 0.92, p.half_h * 0.92)) continue;
        im.at(r, c) += w;
      }
    }
  }

  for (double& v : im.px) {
    v += spec.noise * rng.gauss();
    v = std::clamp(v, 0.0, 255.0);
  }
  return im;
}

LandmarkSet make_landmarks(const FaceParams& p, Rng& rng) {
  LandmarkSet lm;
  lm.scheme = LandmarkScheme::Fgnet68;
  lm.custom_n = 68;
  auto push = [&lm, &rng](double x, double y) {
    lm.points.push_back({std::max(0.0, x + 0.35 * rng.gauss()), std::max(0.0, y + 0.35 * rng.gauss())});
  };
  // 1-15 face outer, right temple -> chin -> left temple
  for (int i = 0; i < 15; ++i) {
    double theta = (-0.05 + 1.10 * double(i) / 14.0) * M_PI;
    push(p.cx + p.half_w * std::cos(theta), p.cy + p.half_h * std::sin(theta));
  }
  double ex_l = p.cx - p.eye_dist / 2.0, ex_r = p.cx + p.eye_dist / 2.0;
  double brow_y = p.eye_y - 5.5 - p.brow_raise;
  // 16-21 right eyebrow (viewer right)
  for (int i = 0; i < 6; ++i) {
    double t = -1.0 + 2.0 * double(i) / 5.0;
    push(ex_r + 4.5 * t, brow_y - p.brow_slant * t);
  }
  // 22-27 left eyebrow
  for (int i = 0; i < 6; ++i) {
    double t = -1.0 + 2.0 * double(i) / 5.0;
    push(ex_l + 4.5 * t, brow_y + p.brow_slant * t);
  }
  // 28-32 left eye, 33-37 right eye
  for (double ex : {ex_l, ex_r}) {
    push(ex - 2.6, p.eye_y);
    push(ex - 0.9, p.eye_y - p.eye_ry);
    push(ex + 0.9, p.eye_y - p.eye_ry);
    push(ex + 2.6, p.eye_y);
    push(ex, p.eye_y + p.eye_ry);
  }
  // 38-48 nose bridge and base
  for (int i = 0; i < 7; ++i) push(p.cx + (i % 2 ? 0.8 : -0.8), p.cy - 1.0 + double(i));
  push(p.cx - 2.0, p.cy + 6.0);
  push(p.cx - 1.0, p.cy + 6.6);
  push(p.cx + 1.0, p.cy + 6.6);
  push(p.cx + 2.0, p.cy + 6.0);
  // 49-67 lips: 10 along the upper edge, 9 back along the lower edge
  double my = p.cy + 0.55 * p.half_h;
  double mw = p.mouth_halfwidth;
  for (int i = 0; i < 10; ++i) {
    double x = p.cx - mw + 2.0 * mw * double(i) / 9.0;
    push(x, mouth_y(p, my, x) - p.mouth_open / 2.0);
  }
  for (int i = 0; i < 9; ++i) {
    double x = p.cx + mw - 2.0 * mw * double(i + 1) / 9.0;
    push(x, mouth_y(p, my, x) + p.mouth_open / 2.0);
  }
  // 68 nose tip
  push(p.cx, p.cy + 3.0);
  return lm;
}

struct ExprShape {
  double curv, open, width, slant, raise, eye_scale, crease;
};

// Per-class mouth curvature/openness/width, brow tilt/lift, eye aperture and
// a nose-crease marker. Classes are separated along several axes at once; a
// cue strength of 0 collapses all of them onto the neutral values.
ExprShape expression_shape(const std::string& name) {
  if (name == "anger") return {-0.9, 2.0, 0.42, 3.0, -2.0, 0.60, 0.0};
  if (name == "disgust") return {-0.45, 4.0, 0.32, 1.2, 0.0, 0.80, 1.0};
  if (name == "fear") return {0.2, 5.5, 0.26, -1.6, 2.5, 1.70, 0.0};
  if (name == "happy") return {1.0, 2.5, 0.54, 0.0, 0.0, 1.00, 0.0};
  if (name == "sad") return {-1.5, 2.0, 0.30, -3.0, 1.0, 0.85, 0.0};
  if (name == "surprise") return {0.0, 8.0, 0.38, 0.0, 4.5, 2.00, 0.0};
  raise_data("synthetic corpus: unknown expression class '" + name + "'");
}

double ethnicity_offset(const std::string& name) {
  if (name == "white") return 62.0;
  if (name == "black") return -68.0;
  if (name == "indian") return -20.0;
  if (name == "other") return 25.0;
  raise_data("synthetic corpus: unknown ethnicity class '" + name + "'");
}

std::string fmt_double(double v) {
  std::array<char, 40> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

CorpusSpec default_corpus_spec() { return CorpusSpec{}; }

CorpusSpec parse_corpus_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise_data(path + ": cannot open corpus spec");
  CorpusSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string ctx = path + ":" + std::to_string(line_no);
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    size_t colon = line.find(':');
    if (colon == std::string::npos) {
      if (line.find_first_not_of(" \t\r\n") != std::string::npos)
        raise_data(ctx + ": expected 'key: value'");
      continue;
    }
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r\n");
      size_t b = s.find_last_not_of(" \t\r\n");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    key = trim(key);
    value = trim(value);
    auto as_int = [&](long lo, long hi) {
      long v = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size() || v < lo || v > hi)
        raise_data(ctx + ": bad integer value '" + value + "' for " + key);
      return int(v);
    };
    auto as_double = [&](double lo, double hi) {
      double v = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size() || v < lo || v > hi)
        raise_data(ctx + ": bad numeric value '" + value + "' for " + key);
      return v;
    };
    if (key == "train_count") spec.train_count = as_int(1, 1000000);
    else if (key == "test_count") spec.test_count = as_int(1, 1000000);
    else if (key == "canvas_rows") spec.canvas_rows = as_int(48, 1024);
    else if (key == "canvas_cols") spec.canvas_cols = as_int(48, 1024);
    else if (key == "gender_cue") spec.gender_cue = as_double(0.0, 4.0);
    else if (key == "age_cue") spec.age_cue = as_double(0.0, 4.0);
    else if (key == "expression_cue") spec.expression_cue = as_double(0.0, 4.0);
    else if (key == "ethnicity_cue") spec.ethnicity_cue = as_double(0.0, 4.0);
    else if (key == "age_gender_coupling") spec.age_gender_coupling = as_int(0, 1);
    else if (key == "noise") spec.noise = as_double(0.0, 64.0);
    else if (key == "age_bins") spec.age_bins = as_int(2, 6);
    else if (key == "genders") spec.genders = split_list(value);
    else if (key == "expressions") spec.expressions = split_list(value);
    else if (key == "ethnicities") spec.ethnicities = split_list(value);
    else raise_data(ctx + ": unknown corpus spec key '" + key + "'");
  }
  if (spec.genders.empty() || spec.expressions.empty() || spec.ethnicities.empty())
    raise_data(path + ": class lists must not be empty");
  return spec;
}

void write_corpus_spec(const CorpusSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise_data(path + ": cannot open for writing");
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  out << "train_count: " << spec.train_count << "\n";
  out << "test_count: " << spec.test_count << "\n";
  out << "canvas_rows: " << spec.canvas_rows << "\n";
  out << "canvas_cols: " << spec.canvas_cols << "\n";
  out << "gender_cue: " << fmt_double(spec.gender_cue) << "\n";
  out << "age_cue: " << fmt_double(spec.age_cue) << "\n";
  out << "expression_cue: " << fmt_double(spec.expression_cue) << "\n";
  out << "ethnicity_cue: " << fmt_double(spec.ethnicity_cue) << "\n";
  out << "age_gender_coupling: " << spec.age_gender_coupling << "\n";
  out << "noise: " << fmt_double(spec.noise) << "\n";
  out << "age_bins: " << spec.age_bins << "\n";
  out << "genders: " << join(spec.genders) << "\n";
  out << "expressions: " << join(spec.expressions) << "\n";
  out << "ethnicities: " << join(spec.ethnicities) << "\n";
}

SynthResult generate_synthetic_corpus(const CorpusSpec& spec, uint64_t seed,
                                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "images");
  fs::create_directories(fs::path(out_dir) / "landmarks");
  write_corpus_spec(spec, (fs::path(out_dir) / "spec.txt").string());

  const auto& gender_tab = gender_tokens();
  const auto& expr_tab = expression_tokens();
  const auto& eth_tab = ethnicity_tokens();
  auto token_index = [](const std::vector<std::string>& table, const std::string& tok,
                        const char* what) {
    for (size_t i = 0; i < table.size(); ++i)
      if (table[i] == tok) return int(i);
    raise_data(std::string("synthetic corpus: unknown ") + what + " token '" + tok + "'");
  };

  Rng rng(seed);
  int n_g = int(spec.genders.size());
  int n_e = int(spec.expressions.size());
  int n_t = int(spec.ethnicities.size());
  int n_b = spec.age_bins;

  auto make_split = [&](const std::string& stem, int count, int index_base) {
    std::vector<DatasetRecord> records;
    for (int i = 0; i < count; ++i) {
      int gi = index_base + i;
      const std::string& gender = spec.genders[size_t(gi % n_g)];
      const std::string& expr = spec.expressions[size_t((gi / n_g) % n_e)];
      const std::string& eth = spec.ethnicities[size_t((gi / (n_g * n_e)) % n_t)];
      int bin = (gi / (n_g * n_e * n_t)) % n_b;
      int age = bin * 10 + int(rng.uniform_int(bin == 5 ? 11 : 10));

      FaceParams p;
      p.cx = spec.canvas_cols / 2.0 + rng.uniform(-1.5, 1.5);
      p.cy = spec.canvas_rows * 0.46 + rng.uniform(-1.5, 1.5);
      p.eye_dist = 26.0 + rng.uniform(-1.0, 1.0);
      p.half_w = 0.80 * p.eye_dist;
      double gender_sign = gender == "male" ? 1.0 : -1.0;
      double aspect = 1.25 + 0.18 * gender_sign * spec.gender_cue + 0.02 * rng.gauss();
      p.half_h = p.half_w * aspect;
      p.eye_y = p.cy - 0.25 * p.half_h;
      p.skin = 150.0 + ethnicity_offset(eth) * spec.ethnicity_cue + rng.uniform(-4.0, 4.0);
      p.skin = std::clamp(p.skin, 40.0, 240.0);
      p.chi = p.skin / 150.0;
      ExprShape es = expression_shape(expr);
      double ecue = spec.expression_cue;
      p.mouth_curv_px = 6.0 * es.curv * ecue + 0.3 * rng.gauss();
      p.mouth_open = std::max(1.0, 3.3 + (es.open - 3.3) * ecue + 0.2 * rng.gauss());
      p.mouth_halfwidth =
          std::max(3.0, (0.37 + (es.width - 0.37) * ecue) * p.eye_dist + 0.3 * rng.gauss());
      p.brow_slant = es.slant * ecue + 0.15 * rng.gauss();
      p.brow_raise = es.raise * ecue + 0.15 * rng.gauss();
      p.eye_ry = std::max(0.8, 1.8 * (1.0 + (es.eye_scale - 1.0) * ecue) + 0.1 * rng.gauss());
      p.nose_crease = es.crease * ecue;
      int eff_bin = bin;
      if (spec.age_gender_coupling == 1 && gender == "female") eff_bin = n_b - 1 - bin;
      p.wrinkle_lambda = 14.0 - 1.8 * double(eff_bin) + 0.15 * rng.gauss();
      p.wrinkle_phase = rng.uniform(0.0, 2.0 * M_PI);

      char name[64];
      std::snprintf(name, sizeof name, "%s_%04d", stem.c_str(), i);
      std::string image_rel = std::string("images/") + name + ".png";
      std::string lm_rel = std::string("landmarks/") + name + ".pts";

      ImageMatrix img = render_face(spec, p, rng);
      save_png(img, (fs::path(out_dir) / image_rel).string());
      LandmarkSet lm = make_landmarks(p, rng);
      save_landmarks(lm, (fs::path(out_dir) / lm_rel).string());

      DatasetRecord rec;
      rec.image_path = image_rel;
      rec.image_path_resolved = (fs::path(out_dir) / image_rel).string();
      rec.eyes = EyePair{{p.cx - p.eye_dist / 2.0, p.eye_y}, {p.cx + p.eye_dist / 2.0, p.eye_y}};
      rec.landmarks_path = lm_rel;
      rec.landmarks_path_resolved = (fs::path(out_dir) / lm_rel).string();
      rec.gender = Gender(token_index(gender_tab, gender, "gender"));
      rec.age_years = age;
      rec.expression = Expression(token_index(expr_tab, expr, "expression"));
      rec.ethnicity = Ethnicity(token_index(eth_tab, eth, "ethnicity"));
      records.push_back(std::move(rec));
    }
    std::string manifest = (fs::path(out_dir) / (stem + ".csv")).string();
    save_manifest(records, manifest);
    return manifest;
  };

  SynthResult result;
  result.train_manifest = make_split("train", spec.train_count, 0);
  result.test_manifest = make_split("test", spec.test_count, spec.train_count);
  return result;
}

}  // namespace fp
