#pragma once

#include <Eigen/Dense>
#include <array>

#include "faceprobe/dataset.hpp"
#include "faceprobe/pca.hpp"

namespace fp {

// Shape vectors are flat 2n reals, x coordinates then y coordinates.

struct ShapeModel {
  Eigen::VectorXd mean_shape;
  Eigen::MatrixXd eigenvectors;  // 2n x ks, orthonormal columns
  Eigen::VectorXd eigenvalues;   // descending, >= 0
  int n_points = 0;
};

struct TextureModel {
  Eigen::VectorXd mean_texture;    // masked flat vector
  Eigen::MatrixXd eigenvectors;    // dim x kg
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd norm_reference;  // photometric alignment reference (zero mean, unit variance)
  int texture_rows = 0, texture_cols = 0;
  std::vector<uint8_t> patch_mask;  // texture_rows x texture_cols, 1 inside the mean-shape hull
};

struct AppearanceModel {
  ShapeModel shape;
  TextureModel texture;
  double w_s = 1.0;                 // scalar weight, W_s = w_s * I
  Eigen::MatrixXd q;                // (ks + kg) x kc, orthonormal columns
  Eigen::VectorXd eigenvalues;      // lambda_sg
  Eigen::VectorXd mean_bsg;
  std::vector<Point2> frame_shape;  // mean shape scaled into the texture frame
  // derived, rebuilt after deserialization:
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> tri_of_pixel;    // -1 outside the hull
  std::vector<std::array<double, 3>> barycentric;

  int n_appearance_params() const { return int(q.cols()); }
};

struct AlignedShapes {
  Eigen::MatrixXd shapes;  // 2n x N
  Eigen::VectorXd mean;    // arithmetic mean of the aligned shapes
  int iterations = 0;
};

// Generalized Procrustes: translate to centroid origin, scale to unit norm,
// rotate to the running mean; iterate until the mean moves < 1e-10.
AlignedShapes align_shapes(const std::vector<LandmarkSet>& shapes);

// Centers, unit-scales and rotates one shape onto a reference.
Eigen::VectorXd procrustes_align(const Eigen::VectorXd& shape, const Eigen::VectorXd& reference);

ShapeModel build_shape_model(const AlignedShapes& aligned, double variance_keep = 0.98);

// PCA over photometrically normalized shape-free patches.
TextureModel build_texture_model(const std::vector<Eigen::VectorXd>& patches, double variance_keep,
                                 const TextureModel& frame_info);

AppearanceModel build_combined_model(const ShapeModel& shape, const TextureModel& texture,
                                     const Eigen::MatrixXd& bs, const Eigen::MatrixXd& bg,
                                     double variance_keep = 0.98);

// Aligns raw texture against the reference: zero-mean, then scaled so the
// projection onto the reference is 1.
Eigen::VectorXd normalize_texture(const Eigen::VectorXd& raw, const Eigen::VectorXd& reference);

// Shape-free patch of img under the model's piecewise-affine warp.
Eigen::VectorXd warp_to_mean(const ImageMatrix& img, const LandmarkSet& landmarks,
                             const AppearanceModel& model);

struct AamTrainInput {
  ImageMatrix image;
  LandmarkSet landmarks;
};

struct AamBuildResult {
  AppearanceModel model;
  Eigen::MatrixXd training_params;  // kc x N, appearance parameters of the training images
};

AamBuildResult build_appearance_model(const std::vector<AamTrainInput>& inputs, int texture_size,
                                      double variance_keep = 0.98);

// Appearance parameters c of an annotated image.
FeatureVector appearance_params(const ImageMatrix& img, const LandmarkSet& landmarks,
                                const AppearanceModel& model);

struct ModeRender {
  double multiple = 0.0;            // in units of sqrt(lambda_sg[mode])
  std::vector<Point2> shape_points; // texture-frame coordinates
  ImageMatrix texture;              // rendered patch, gray 128 + 48 * t
};

std::vector<ModeRender> synthesize_modes(const AppearanceModel& model, int mode_index,
                                         const std::vector<double>& multiples);

// Rebuilds triangulation and the pixel->triangle warp plan from frame_shape.
void rebuild_warp_tables(AppearanceModel& model);

}  // namespace fp
