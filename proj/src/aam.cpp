#include "faceprobe/aam.hpp"

#include <algorithm>
#include <cmath>

#include "faceprobe/triangulate.hpp"

namespace fp {

namespace {

Eigen::VectorXd to_shape_vector(const LandmarkSet& lm) {
  const int n = int(lm.points.size());
  Eigen::VectorXd v(2 * n);
  for (int i = 0; i < n; ++i) {
    v[i] = lm.points[size_t(i)].x;
    v[n + i] = lm.points[size_t(i)].y;
  }
  return v;
}

void center_shape(Eigen::VectorXd& s) {
  const int n = int(s.size()) / 2;
  double mx = s.head(n).mean(), my = s.tail(n).mean();
  s.head(n).array() -= mx;
  s.tail(n).array() -= my;
}

// Rotation of `s` (centered) best matching `ref` (centered), both as flat
// x-then-y vectors.
void rotate_to(Eigen::VectorXd& s, const Eigen::VectorXd& ref) {
  const int n = int(s.size()) / 2;
  double a = 0.0, b = 0.0;
  for (int i = 0; i < n; ++i) {
    a += s[i] * ref[i] + s[n + i] * ref[n + i];
    b += s[i] * ref[n + i] - s[n + i] * ref[i];
  }
  double theta = std::atan2(b, a);
  double ct = std::cos(theta), st = std::sin(theta);
  for (int i = 0; i < n; ++i) {
    double x = s[i], y = s[n + i];
    s[i] = ct * x - st * y;
    s[n + i] = st * x + ct * y;
  }
}

}  // namespace

Eigen::VectorXd procrustes_align(const Eigen::VectorXd& shape, const Eigen::VectorXd& reference) {
  Eigen::VectorXd s = shape;
  center_shape(s);
  double norm = s.norm();
  if (norm < 1e-12) raise_data("procrustes: degenerate shape (all points identical)");
  s /= norm;
  rotate_to(s, reference);
  return s;
}

AlignedShapes align_shapes(const std::vector<LandmarkSet>& shapes) {
  if (shapes.size() < 2) raise_data("align_shapes: need at least 2 shapes");
  const size_t n_pts = shapes[0].points.size();
  for (const auto& s : shapes)
    if (s.points.size() != n_pts)
      raise_data("align_shapes: point count mismatch (" + std::to_string(s.points.size()) +
                 " vs " + std::to_string(n_pts) + ")");

  const int n = int(shapes.size());
  Eigen::MatrixXd mat(2 * long(n_pts), n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = to_shape_vector(shapes[size_t(i)]);
    center_shape(v);
    double norm = v.norm();
    if (norm < 1e-12) raise_data("align_shapes: degenerate shape (all points identical)");
    mat.col(i) = v / norm;
  }

  Eigen::VectorXd mean = mat.col(0);
  AlignedShapes out;
  for (int iter = 0; iter < 100; ++iter) {
    out.iterations = iter + 1;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd s = mat.col(i);
      rotate_to(s, mean);
      mat.col(i) = s;
    }
    Eigen::VectorXd new_mean = mat.rowwise().mean();
    center_shape(new_mean);
    double norm = new_mean.norm();
    if (norm < 1e-12) raise_numeric("align_shapes: mean shape collapsed");
    new_mean /= norm;
    double moved = (new_mean - mean).norm();
    mean = new_mean;
    if (moved < 1e-10) break;
  }
  // final pass against the converged mean
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd s = mat.col(i);
    rotate_to(s, mean);
    mat.col(i) = s;
  }
  out.shapes = mat;
  out.mean = mat.rowwise().mean();
  return out;
}

ShapeModel build_shape_model(const AlignedShapes& aligned, double variance_keep) {
  if (aligned.shapes.cols() < 2) raise_data("build_shape_model: need at least 2 shapes");
  PcaModel pca = fit_pca(aligned.shapes, PcaRetention::by_fraction(variance_keep));
  ShapeModel model;
  model.mean_shape = pca.mean;
  model.eigenvectors = pca.components;
  model.eigenvalues = pca.eigenvalues;
  model.n_points = int(aligned.shapes.rows()) / 2;
  return model;
}

Eigen::VectorXd normalize_texture(const Eigen::VectorXd& raw, const Eigen::VectorXd& reference) {
  Eigen::VectorXd v = raw.array() - raw.mean();
  double alpha = v.dot(reference) / double(v.size());
  if (std::abs(alpha) < 1e-12)
    raise_numeric("normalize_texture: patch has no component along the reference texture");
  return v / alpha;
}

TextureModel build_texture_model(const std::vector<Eigen::VectorXd>& patches, double variance_keep,
                                 const TextureModel& frame_info) {
  if (patches.size() < 2) raise_data("build_texture_model: need at least 2 patches");
  const long dim = patches[0].size();
  for (const auto& p : patches)
    if (p.size() != dim) raise_data("build_texture_model: patch length mismatch");

  Eigen::MatrixXd mat(dim, long(patches.size()));
  for (size_t i = 0; i < patches.size(); ++i) mat.col(long(i)) = patches[i];
  PcaModel pca = fit_pca(mat, PcaRetention::by_fraction(variance_keep));

  TextureModel model = frame_info;
  model.mean_texture = pca.mean;
  model.eigenvectors = pca.components;
  model.eigenvalues = pca.eigenvalues;
  return model;
}

AppearanceModel build_combined_model(const ShapeModel& shape, const TextureModel& texture,
                                     const Eigen::MatrixXd& bs, const Eigen::MatrixXd& bg,
                                     double variance_keep) {
  if (bs.cols() < 1 || bs.cols() != bg.cols())
    raise_data("build_combined_model: empty or mismatched parameter sets");
  double sum_ls = shape.eigenvalues.sum();
  double sum_lg = texture.eigenvalues.sum();
  if (sum_ls <= 0.0) raise_numeric("build_combined_model: shape model has zero variance");
  AppearanceModel model;
  model.shape = shape;
  model.texture = texture;
  model.w_s = std::sqrt(sum_lg / sum_ls);

  Eigen::MatrixXd stacked(bs.rows() + bg.rows(), bs.cols());
  stacked.topRows(bs.rows()) = model.w_s * bs;
  stacked.bottomRows(bg.rows()) = bg;
  PcaModel pca = fit_pca(stacked, PcaRetention::by_fraction(variance_keep));
  model.q = pca.components;
  model.eigenvalues = pca.eigenvalues;
  model.mean_bsg = pca.mean;
  return model;
}

void rebuild_warp_tables(AppearanceModel& model) {
  const auto& pts = model.frame_shape;
  model.triangles = delaunay_triangulate(pts);
  // reject zero-area triangles outright
  for (const auto& t : model.triangles) {
    const Point2 &a = pts[size_t(t[0])], &b = pts[size_t(t[1])], &c = pts[size_t(t[2])];
    double area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (std::abs(area2) < 1e-9)
      raise_numeric("aam warp: degenerate (zero-area) triangle in the mean shape");
  }

  const int rows = model.texture.texture_rows, cols = model.texture.texture_cols;
  model.tri_of_pixel.assign(size_t(rows) * cols, -1);
  model.barycentric.assign(size_t(rows) * cols, {0.0, 0.0, 0.0});
  for (size_t ti = 0; ti < model.triangles.size(); ++ti) {
    const auto& t = model.triangles[ti];
    const Point2 &a = pts[size_t(t[0])], &b = pts[size_t(t[1])], &c = pts[size_t(t[2])];
    int r0 = std::max(0, int(std::floor(std::min({a.y, b.y, c.y}))));
    int r1 = std::min(rows - 1, int(std::ceil(std::max({a.y, b.y, c.y}))));
    int c0 = std::max(0, int(std::floor(std::min({a.x, b.x, c.x}))));
    int c1 = std::min(cols - 1, int(std::ceil(std::max({a.x, b.x, c.x}))));
    double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    for (int r = r0; r <= r1; ++r) {
      for (int col = c0; col <= c1; ++col) {
        size_t idx = size_t(r) * cols + size_t(col);
        if (model.tri_of_pixel[idx] >= 0) continue;
        double px = double(col), py = double(r);
        double l1 = ((b.x - px) * (c.y - py) - (c.x - px) * (b.y - py)) / det;
        double l2 = ((c.x - px) * (a.y - py) - (a.x - px) * (c.y - py)) / det;
        double l3 = 1.0 - l1 - l2;
        if (l1 >= -1e-9 && l2 >= -1e-9 && l3 >= -1e-9) {
          model.tri_of_pixel[idx] = int(ti);
          model.barycentric[idx] = {l1, l2, l3};
        }
      }
    }
  }
  model.texture.patch_mask.assign(size_t(rows) * cols, 0);
  for (size_t i = 0; i < model.tri_of_pixel.size(); ++i)
    model.texture.patch_mask[i] = model.tri_of_pixel[i] >= 0 ? 1 : 0;
}

Eigen::VectorXd warp_to_mean(const ImageMatrix& img, const LandmarkSet& landmarks,
                             const AppearanceModel& model) {
  const int n = model.shape.n_points;
  if (int(landmarks.points.size()) != n)
    raise_data("warp_to_mean: landmark count mismatch (expected " + std::to_string(n) +
               ", actual " + std::to_string(landmarks.points.size()) + ")");
  const int rows = model.texture.texture_rows, cols = model.texture.texture_cols;
  std::vector<double> patch;
  patch.reserve(model.texture.patch_mask.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      size_t idx = size_t(r) * cols + size_t(c);
      int ti = model.tri_of_pixel[idx];
      if (ti < 0) continue;
      const auto& t = model.triangles[size_t(ti)];
      const auto& l = model.barycentric[idx];
      double sx = 0.0, sy = 0.0;
      for (int v = 0; v < 3; ++v) {
        const Point2& src = landmarks.points[size_t(t[size_t(v)])];
        sx += l[size_t(v)] * src.x;
        sy += l[size_t(v)] * src.y;
      }
      patch.push_back(bilinear(img, sx, sy));
    }
  }
  return Eigen::Map<Eigen::VectorXd>(patch.data(), long(patch.size()));
}

AamBuildResult build_appearance_model(const std::vector<AamTrainInput>& inputs, int texture_size,
                                      double variance_keep) {
  if (inputs.size() < 2) raise_data("build_appearance_model: need at least 2 annotated images");
  if (texture_size < 8) raise_usage("build_appearance_model: texture frame too small");

  std::vector<LandmarkSet> landmark_sets;
  landmark_sets.reserve(inputs.size());
  for (const auto& in : inputs) landmark_sets.push_back(in.landmarks);

  AlignedShapes aligned = align_shapes(landmark_sets);
  ShapeModel shape = build_shape_model(aligned, variance_keep);

  AppearanceModel model;
  model.shape = shape;
  model.texture.texture_rows = texture_size;
  model.texture.texture_cols = texture_size;

  // Scale the mean shape into the frame with a 5% margin, aspect preserved.
  const int n = shape.n_points;
  const Eigen::VectorXd& mean = shape.mean_shape;
  double min_x = mean.head(n).minCoeff(), max_x = mean.head(n).maxCoeff();
  double min_y = mean.tail(n).minCoeff(), max_y = mean.tail(n).maxCoeff();
  double usable = 0.9 * double(texture_size);
  double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
  double scale = usable / span;
  double off_x = 0.5 * texture_size - scale * 0.5 * (min_x + max_x);
  double off_y = 0.5 * texture_size - scale * 0.5 * (min_y + max_y);
  model.frame_shape.resize(size_t(n));
  for (int i = 0; i < n; ++i)
    model.frame_shape[size_t(i)] = {scale * mean[i] + off_x, scale * mean[n + i] + off_y};
  rebuild_warp_tables(model);

  // Raw shape-free patches.
  const int count = int(inputs.size());
  std::vector<Eigen::VectorXd> raw{size_t(count)};
  for (int i = 0; i < count; ++i)
    raw[size_t(i)] = warp_to_mean(inputs[size_t(i)].image, inputs[size_t(i)].landmarks, model);

  // Photometric alignment reference: iterate normalization against the
  // running mean until it is stable (zero mean, unit variance throughout).
  const long dim = raw[0].size();
  auto unit_var = [dim](Eigen::VectorXd v) {
    v.array() -= v.mean();
    double sd = std::sqrt(v.squaredNorm() / double(dim));
    if (sd < 1e-12) raise_numeric("aam texture: constant patch, cannot normalize");
    return Eigen::VectorXd(v / sd);
  };
  Eigen::VectorXd ref = raw[0];
  ref = unit_var(ref);
  std::vector<Eigen::VectorXd> patches{size_t(count)};
  for (int iter = 0; iter < 30; ++iter) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < count; ++i) {
      patches[size_t(i)] = normalize_texture(raw[size_t(i)], ref);
      acc += patches[size_t(i)];
    }
    Eigen::VectorXd new_ref = unit_var(acc / double(count));
    double moved = (new_ref - ref).norm();
    ref = new_ref;
    if (moved < 1e-12) break;
  }
  for (int i = 0; i < count; ++i) patches[size_t(i)] = normalize_texture(raw[size_t(i)], ref);

  TextureModel frame_info = model.texture;
  frame_info.norm_reference = ref;
  TextureModel texture = build_texture_model(patches, variance_keep, frame_info);

  // Per-image model parameters.
  Eigen::MatrixXd bs(shape.eigenvectors.cols(), count);
  Eigen::MatrixXd bg(texture.eigenvectors.cols(), count);
  for (int i = 0; i < count; ++i) {
    bs.col(i) = shape.eigenvectors.transpose() * (aligned.shapes.col(i) - shape.mean_shape);
    bg.col(i) = texture.eigenvectors.transpose() * (patches[size_t(i)] - texture.mean_texture);
  }

  AppearanceModel combined = build_combined_model(shape, texture, bs, bg, variance_keep);
  combined.frame_shape = model.frame_shape;
  combined.triangles = model.triangles;
  combined.tri_of_pixel = model.tri_of_pixel;
  combined.barycentric = model.barycentric;
  combined.texture.texture_rows = texture_size;
  combined.texture.texture_cols = texture_size;
  combined.texture.patch_mask = model.texture.patch_mask;

  AamBuildResult result;
  result.model = std::move(combined);
  result.training_params.resize(result.model.q.cols(), count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd bsg(bs.rows() + bg.rows());
    bsg.head(bs.rows()) = result.model.w_s * bs.col(i);
    bsg.tail(bg.rows()) = bg.col(i);
    result.training_params.col(i) = result.model.q.transpose() * (bsg - result.model.mean_bsg);
  }
  return result;
}

FeatureVector appearance_params(const ImageMatrix& img, const LandmarkSet& landmarks,
                                const AppearanceModel& model) {
  if (int(landmarks.points.size()) != model.shape.n_points)
    raise_data("appearance_params: landmark count mismatch (expected " +
               std::to_string(model.shape.n_points) + ", actual " +
               std::to_string(landmarks.points.size()) + ")");
  Eigen::VectorXd aligned = procrustes_align(to_shape_vector(landmarks), model.shape.mean_shape);
  Eigen::VectorXd bs = model.shape.eigenvectors.transpose() * (aligned - model.shape.mean_shape);
  Eigen::VectorXd raw = warp_to_mean(img, landmarks, model);
  Eigen::VectorXd patch = normalize_texture(raw, model.texture.norm_reference);
  Eigen::VectorXd bg =
      model.texture.eigenvectors.transpose() * (patch - model.texture.mean_texture);
  Eigen::VectorXd bsg(bs.size() + bg.size());
  bsg.head(bs.size()) = model.w_s * bs;
  bsg.tail(bg.size()) = bg;
  Eigen::VectorXd c = model.q.transpose() * (bsg - model.mean_bsg);
  FeatureVector fv;
  fv.source = FeatureSource::Aam;
  fv.values.assign(c.data(), c.data() + c.size());
  return fv;
}

std::vector<ModeRender> synthesize_modes(const AppearanceModel& model, int mode_index,
                                         const std::vector<double>& multiples) {
  if (mode_index < 0 || mode_index >= model.n_appearance_params())
    raise_usage("synthesize_modes: mode index out of range (model has " +
                std::to_string(model.n_appearance_params()) + " modes)");
  const int ks = int(model.shape.eigenvectors.cols());
  const int kg = int(model.texture.eigenvectors.cols());
  const int n = model.shape.n_points;
  const int rows = model.texture.texture_rows, cols = model.texture.texture_cols;

  // Frame transform of the mean shape (same rule as in training).
  const Eigen::VectorXd& mean = model.shape.mean_shape;
  double min_x = mean.head(n).minCoeff(), max_x = mean.head(n).maxCoeff();
  double min_y = mean.tail(n).minCoeff(), max_y = mean.tail(n).maxCoeff();
  double usable = 0.9 * double(cols);
  double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
  double scale = usable / span;
  double off_x = 0.5 * cols - scale * 0.5 * (min_x + max_x);
  double off_y = 0.5 * rows - scale * 0.5 * (min_y + max_y);

  std::vector<ModeRender> out;
  for (double k : multiples) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(model.n_appearance_params());
    c[mode_index] = k * std::sqrt(std::max(0.0, model.eigenvalues[mode_index]));
    Eigen::VectorXd bsg = model.mean_bsg + model.q * c;
    Eigen::VectorXd bs = bsg.head(ks) / model.w_s;
    Eigen::VectorXd bg = bsg.tail(kg);
    Eigen::VectorXd shape = model.shape.mean_shape + model.shape.eigenvectors * bs;
    Eigen::VectorXd tex = model.texture.mean_texture + model.texture.eigenvectors * bg;

    ModeRender render;
    render.multiple = k;
    render.shape_points.resize(size_t(n));
    for (int i = 0; i < n; ++i)
      render.shape_points[size_t(i)] = {scale * shape[i] + off_x, scale * shape[n + i] + off_y};
    render.texture = ImageMatrix(rows, cols, 0.0);
    long pi = 0;
    for (int r = 0; r < rows; ++r) {
      for (int col = 0; col < cols; ++col) {
        if (!model.texture.patch_mask[size_t(r) * cols + size_t(col)]) continue;
        double v = 128.0 + 48.0 * tex[pi++];
        render.texture.at(r, col) = std::clamp(v, 0.0, 255.0);
      }
    }
    out.push_back(std::move(render));
  }
  return out;
}

}  // namespace fp
