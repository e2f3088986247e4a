#include "faceprobe/pipeline.hpp"
#include "faceprobe/serialize.hpp"

namespace fp {

namespace {

void write_extractor(FieldWriter& w, const ExtractorConfig& e) {
  w.begin_group("extractor");
  w.add_str("kind", extractor_token(e.kind));
  w.add_i64("pre_rows", e.pre.out_rows);
  w.add_i64("pre_cols", e.pre.out_cols);
  w.add_i64("equalize", e.pre.equalize ? 1 : 0);
  w.add_f64("gabor_sigma", e.gabor.sigma);
  w.add_f64("gabor_k_max", e.gabor.k_max);
  w.add_f64("gabor_f", e.gabor.f);
  w.add_i64("gabor_scales", e.gabor.n_scales);
  w.add_i64("gabor_orients", e.gabor.n_orients);
  w.add_i64("gabor_kernel_size", e.gabor.kernel_size);
  w.add_i64("grid_step", e.grid_step);
  w.add_i64("blocks_rows", e.blocks_rows);
  w.add_i64("blocks_cols", e.blocks_cols);
  w.add_i64("wavelet_levels", e.wavelet_levels);
  w.add_i64("texture_size", e.texture_size);
  w.add_f64("variance_keep", e.variance_keep);
  w.add_str("scheme", landmark_scheme_token(e.scheme, e.scheme_custom_n));
  w.end_group();
}

ExtractorConfig read_extractor(const FieldNode& g) {
  ExtractorConfig e;
  e.kind = parse_extractor_token(g.get_str("kind"));
  e.pre.out_rows = int(g.get_i64("pre_rows"));
  e.pre.out_cols = int(g.get_i64("pre_cols"));
  e.pre.equalize = g.get_i64("equalize") != 0;
  e.gabor.sigma = g.get_f64("gabor_sigma");
  e.gabor.k_max = g.get_f64("gabor_k_max");
  e.gabor.f = g.get_f64("gabor_f");
  e.gabor.n_scales = int(g.get_i64("gabor_scales"));
  e.gabor.n_orients = int(g.get_i64("gabor_orients"));
  e.gabor.kernel_size = int(g.get_i64("gabor_kernel_size"));
  e.grid_step = int(g.get_i64("grid_step"));
  e.blocks_rows = int(g.get_i64("blocks_rows"));
  e.blocks_cols = int(g.get_i64("blocks_cols"));
  e.wavelet_levels = int(g.get_i64("wavelet_levels"));
  e.texture_size = int(g.get_i64("texture_size"));
  e.variance_keep = g.get_f64("variance_keep");
  parse_landmark_scheme(g.get_str("scheme"), e.scheme, e.scheme_custom_n);
  return e;
}

void write_mlp(FieldWriter& w, const MlpModel& m) {
  w.begin_group("mlp");
  w.add_matrix("w1", m.w1);
  w.add_vector("b1", m.b1);
  w.add_matrix("w2", m.w2);
  w.add_vector("b2", m.b2);
  w.add_vector("scale_mean", m.scale_mean);
  w.add_vector("scale_std", m.scale_std);
  w.add_str("target_scheme", m.target_scheme == TargetScheme::PlusMinusOne ? "pm1" : "01");
  w.end_group();
}

MlpModel read_mlp(const FieldNode& g) {
  MlpModel m;
  m.w1 = g.get_matrix("w1");
  m.b1 = g.get_vector("b1");
  m.w2 = g.get_matrix("w2");
  m.b2 = g.get_vector("b2");
  m.scale_mean = g.get_vector("scale_mean");
  m.scale_std = g.get_vector("scale_std");
  const std::string& scheme = g.get_str("target_scheme");
  if (scheme == "pm1")
    m.target_scheme = TargetScheme::PlusMinusOne;
  else if (scheme == "01")
    m.target_scheme = TargetScheme::ZeroOne;
  else
    raise_data("model bundle: unknown target scheme '" + scheme + "'");
  return m;
}

void write_pca(FieldWriter& w, const PcaModel& p) {
  w.begin_group("pca");
  w.add_vector("mean", p.mean);
  w.add_matrix("components", p.components);
  w.add_vector("eigenvalues", p.eigenvalues);
  w.end_group();
}

PcaModel read_pca(const FieldNode& g) {
  PcaModel p;
  p.mean = g.get_vector("mean");
  p.components = g.get_matrix("components");
  p.eigenvalues = g.get_vector("eigenvalues");
  return p;
}

void write_aam(FieldWriter& w, const AppearanceModel& m) {
  w.begin_group("aam");
  w.add_i64("n_points", m.shape.n_points);
  w.add_vector("shape_mean", m.shape.mean_shape);
  w.add_matrix("shape_vectors", m.shape.eigenvectors);
  w.add_vector("shape_values", m.shape.eigenvalues);
  w.add_vector("texture_mean", m.texture.mean_texture);
  w.add_matrix("texture_vectors", m.texture.eigenvectors);
  w.add_vector("texture_values", m.texture.eigenvalues);
  w.add_vector("norm_reference", m.texture.norm_reference);
  w.add_i64("texture_rows", m.texture.texture_rows);
  w.add_i64("texture_cols", m.texture.texture_cols);
  w.add_f64("w_s", m.w_s);
  w.add_matrix("q", m.q);
  w.add_vector("lambda_sg", m.eigenvalues);
  w.add_vector("mean_bsg", m.mean_bsg);
  Eigen::VectorXd frame(2 * m.frame_shape.size());
  for (size_t i = 0; i < m.frame_shape.size(); ++i) {
    frame[long(i)] = m.frame_shape[i].x;
    frame[long(m.frame_shape.size() + i)] = m.frame_shape[i].y;
  }
  w.add_vector("frame_shape", frame);
  w.end_group();
}

AppearanceModel read_aam(const FieldNode& g) {
  AppearanceModel m;
  m.shape.n_points = int(g.get_i64("n_points"));
  m.shape.mean_shape = g.get_vector("shape_mean");
  m.shape.eigenvectors = g.get_matrix("shape_vectors");
  m.shape.eigenvalues = g.get_vector("shape_values");
  m.texture.mean_texture = g.get_vector("texture_mean");
  m.texture.eigenvectors = g.get_matrix("texture_vectors");
  m.texture.eigenvalues = g.get_vector("texture_values");
  m.texture.norm_reference = g.get_vector("norm_reference");
  m.texture.texture_rows = int(g.get_i64("texture_rows"));
  m.texture.texture_cols = int(g.get_i64("texture_cols"));
  m.w_s = g.get_f64("w_s");
  m.q = g.get_matrix("q");
  m.eigenvalues = g.get_vector("lambda_sg");
  m.mean_bsg = g.get_vector("mean_bsg");
  Eigen::VectorXd frame = g.get_vector("frame_shape");
  size_t n = size_t(frame.size()) / 2;
  m.frame_shape.resize(n);
  for (size_t i = 0; i < n; ++i)
    m.frame_shape[i] = {frame[long(i)], frame[long(n + i)]};
  rebuild_warp_tables(m);
  return m;
}

}  // namespace

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  FieldWriter w;
  w.add_i64("head_count", int64_t(bundle.heads.size()));
  for (const auto& [name, head] : bundle.heads) {
    w.begin_group("head");
    w.add_str("name", name);
    w.add_str("task", task_token(head.task));
    for (const auto& label : head.labels) w.add_str("label", label);
    write_extractor(w, head.extractor);
    write_mlp(w, head.mlp);
    if (head.pca) write_pca(w, *head.pca);
    if (head.aam) write_aam(w, *head.aam);
    w.end_group();
  }
  write_file_atomic(path, w.finish());
}

ModelBundle load_bundle(const std::string& path) {
  FieldNode root = parse_bundle_bytes(read_file(path));
  ModelBundle bundle;
  int64_t expected = root.get_i64("head_count");
  for (const FieldNode* hg : root.all("head")) {
    TaskModel head;
    std::string name = hg->get_str("name");
    head.task = parse_task_token(hg->get_str("task"));
    if (task_token(head.task) != name)
      raise_data("model bundle: task mismatch, head stored as '" + name + "' but trained for '" +
                 task_token(head.task) + "'");
    for (const FieldNode* l : hg->all("label")) head.labels.push_back(l->str);
    if (head.labels.empty()) raise_data("model bundle: head '" + name + "' has no labels");
    head.extractor = read_extractor(hg->child("extractor"));
    head.mlp = read_mlp(hg->child("mlp"));
    if (const FieldNode* p = hg->find("pca")) head.pca = read_pca(*p);
    if (const FieldNode* a = hg->find("aam")) head.aam = read_aam(*a);
    if (head.extractor.kind == ExtractorKind::Aam && !head.aam)
      raise_data("model bundle: AAM head '" + name + "' is missing the appearance model");
    if (head.extractor.kind != ExtractorKind::Aam && !head.pca)
      raise_data("model bundle: head '" + name + "' is missing the PCA stage");
    if (int(head.labels.size()) != head.mlp.n_out())
      raise_data("model bundle: head '" + name + "' label count does not match network outputs");
    bundle.heads.emplace(name, std::move(head));
  }
  if (int64_t(bundle.heads.size()) != expected)
    raise_data("model bundle: head count mismatch (truncated or corrupt file)");
  return bundle;
}

}  // namespace fp
