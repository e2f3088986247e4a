#include "faceprobe/pca.hpp"

#include <algorithm>
#include <numeric>

namespace fp {

namespace {

// Descending eigenpairs of a symmetric PSD matrix, tiny negatives clamped.
void symmetric_eigs_desc(const Eigen::MatrixXd& m, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) raise_numeric("pca: eigendecomposition failed to converge");
  values = solver.eigenvalues().reverse();
  vectors = solver.eigenvectors().rowwise().reverse();
  for (int i = 0; i < values.size(); ++i)
    if (values[i] < 0.0) values[i] = 0.0;
}

void fix_sign(Eigen::MatrixXd& components) {
  for (int k = 0; k < components.cols(); ++k) {
    int idx = 0;
    components.col(k).cwiseAbs().maxCoeff(&idx);
    if (components(idx, k) < 0.0) components.col(k) = -components.col(k);
  }
}

}  // namespace

PcaModel fit_pca(const Eigen::MatrixXd& samples, PcaRetention retention) {
  const int dim = int(samples.rows());
  const int m = int(samples.cols());
  if (m < 2) raise_data("fit_pca: need at least 2 samples");

  PcaModel model;
  model.mean = samples.rowwise().mean();
  Eigen::MatrixXd dev = samples.colwise() - model.mean;
  if (dev.norm() <= 1e-12 * (1.0 + samples.norm()))
    raise_data("fit_pca: training vectors have zero variance (all samples identical)");

  Eigen::VectorXd values;
  Eigen::MatrixXd basis;
  if (dim > m) {
    // Gram trick: eigenvectors of the M x M inner-product matrix mapped back.
    Eigen::MatrixXd gram = (dev.transpose() * dev) / double(m);
    Eigen::VectorXd gvals;
    Eigen::MatrixXd gvecs;
    symmetric_eigs_desc(gram, gvals, gvecs);
    basis.resize(dim, m);
    values.resize(m);
    int kept = 0;
    for (int k = 0; k < m; ++k) {
      Eigen::VectorXd u = dev * gvecs.col(k);
      double norm = u.norm();
      if (norm <= 1e-150 || gvals[k] <= 0.0) continue;
      basis.col(kept) = u / norm;
      values[kept] = gvals[k];
      ++kept;
    }
    basis.conservativeResize(dim, kept);
    values.conservativeResize(kept);
  } else {
    Eigen::MatrixXd cov = (dev * dev.transpose()) / double(m);
    symmetric_eigs_desc(cov, values, basis);
  }

  double max_val = values.size() > 0 ? values[0] : 0.0;
  if (max_val <= 0.0) raise_data("fit_pca: training vectors have zero variance");

  // Drop numerically null directions.
  int nonzero = 0;
  while (nonzero < values.size() && values[nonzero] > 1e-12 * max_val) ++nonzero;
  int limit = std::min(nonzero, m - 1);

  int keep = limit;
  if (retention.mode == PcaRetention::Mode::Count) {
    if (retention.count < 1) raise_usage("fit_pca: component count must be >= 1");
    keep = std::min(limit, retention.count);
  } else if (retention.mode == PcaRetention::Mode::Fraction) {
    if (retention.fraction <= 0.0 || retention.fraction > 1.0)
      raise_usage("fit_pca: variance fraction must be in (0, 1]");
    double total = values.head(limit).sum();
    double acc = 0.0;
    keep = limit;
    for (int k = 0; k < limit; ++k) {
      acc += values[k];
      if (acc >= retention.fraction * total) {
        keep = k + 1;
        break;
      }
    }
  }

  model.components = basis.leftCols(keep);
  model.eigenvalues = values.head(keep);
  fix_sign(model.components);
  return model;
}

PcaModel fit_pca(const std::vector<FeatureVector>& vectors, PcaRetention retention) {
  if (vectors.size() < 2) raise_data("fit_pca: need at least 2 samples");
  const size_t dim = vectors[0].values.size();
  for (const auto& v : vectors)
    if (v.values.size() != dim) raise_data("fit_pca: feature dimensions differ across samples");
  Eigen::MatrixXd samples(long(dim), long(vectors.size()));
  for (size_t i = 0; i < vectors.size(); ++i)
    samples.col(long(i)) = Eigen::Map<const Eigen::VectorXd>(vectors[i].values.data(), long(dim));
  return fit_pca(samples, retention);
}

Eigen::VectorXd pca_project(const PcaModel& model, const Eigen::VectorXd& v) {
  if (v.size() != model.mean.size())
    raise_data("pca_project: dimension mismatch (vector " + std::to_string(v.size()) +
               ", model " + std::to_string(model.mean.size()) + ")");
  return model.components.transpose() * (v - model.mean);
}

FeatureVector pca_project(const PcaModel& model, const FeatureVector& v) {
  Eigen::Map<const Eigen::VectorXd> mapped(v.values.data(), long(v.values.size()));
  Eigen::VectorXd w = pca_project(model, Eigen::VectorXd(mapped));
  FeatureVector out;
  out.source = FeatureSource::Pca;
  out.values.assign(w.data(), w.data() + w.size());
  return out;
}

}  // namespace fp
