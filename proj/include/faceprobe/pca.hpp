#pragma once

#include <Eigen/Dense>

#include "faceprobe/core.hpp"

namespace fp {

// Eigenface-style reduction. Covariance is scaled by 1/M; component signs
// are fixed so the largest-magnitude entry of each component is positive.
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;   // dim x k, orthonormal columns, descending eigenvalue order
  Eigen::VectorXd eigenvalues;  // descending, >= 0

  int n_components() const { return int(components.cols()); }
  int dim() const { return int(mean.size()); }
};

// Either a fixed component count or the smallest count reaching a variance
// fraction. Default: all numerically nonzero components (up to M - 1).
struct PcaRetention {
  enum class Mode { All, Count, Fraction } mode = Mode::All;
  int count = 0;
  double fraction = 0.0;

  static PcaRetention all() { return {}; }
  static PcaRetention by_count(int n) { return {Mode::Count, n, 0.0}; }
  static PcaRetention by_fraction(double f) { return {Mode::Fraction, 0, f}; }
};

// samples: one column per observation (dim x M). When dim > M the M x M Gram
// matrix is eigen-decomposed and mapped back through the deviation matrix.
PcaModel fit_pca(const Eigen::MatrixXd& samples, PcaRetention retention = PcaRetention::all());
PcaModel fit_pca(const std::vector<FeatureVector>& vectors, PcaRetention retention = PcaRetention::all());

Eigen::VectorXd pca_project(const PcaModel& model, const Eigen::VectorXd& v);
FeatureVector pca_project(const PcaModel& model, const FeatureVector& v);

}  // namespace fp
