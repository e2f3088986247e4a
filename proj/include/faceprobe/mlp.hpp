#pragma once

#include <Eigen/Dense>

#include "faceprobe/core.hpp"

namespace fp {

enum class TargetScheme { PlusMinusOne, ZeroOne };

// Three-layer feedforward net, tanh on both the hidden and output layer.
// Inputs are z-scored with training statistics stored in the model.
struct MlpModel {
  Eigen::MatrixXd w1;  // n_hidden x n_in
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // n_out x n_hidden
  Eigen::VectorXd b2;
  Eigen::VectorXd scale_mean;  // per input dimension
  Eigen::VectorXd scale_std;
  TargetScheme target_scheme = TargetScheme::ZeroOne;

  int n_in() const { return int(w1.cols()); }
  int n_hidden() const { return int(w1.rows()); }
  int n_out() const { return int(w2.rows()); }
};

struct TrainConfig {
  int n_hidden = 16;
  int n_iterations = 1000;
  double learning_rate = 0.01;
  double goal_mse = 1e-4;
  uint64_t seed = 0;
};

struct TrainResult {
  MlpModel model;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  int iterations_run = 0;
};

// Full-batch gradient descent on mean squared error (mean over samples and
// output units). X: N x d, T: N x k. Stops at n_iterations or when
// MSE <= goal_mse.
TrainResult train_mlp(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                      const TrainConfig& cfg);

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::VectorXd& v);

struct ClassDecision {
  int index = 0;
  std::vector<double> scores;
};

// argmax over outputs, ties to the lowest index.
ClassDecision classify(const MlpModel& model, const Eigen::VectorXd& v, int n_labels);

// One-hot rows: PlusMinusOne in {-1,+1}, ZeroOne in {0,1}.
Eigen::MatrixXd encode_targets(const std::vector<int>& class_indices, int n_classes,
                               TargetScheme scheme);

// Analytic full-batch MSE gradients on ALREADY-SCALED inputs; shared by the
// training loop and the finite-difference tests.
struct MlpGradients {
  Eigen::MatrixXd w1, w2;
  Eigen::VectorXd b1, b2;
};
MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& scaled_inputs,
                           const Eigen::MatrixXd& targets);
double mlp_mse(const MlpModel& model, const Eigen::MatrixXd& scaled_inputs,
               const Eigen::MatrixXd& targets);

}  // namespace fp
