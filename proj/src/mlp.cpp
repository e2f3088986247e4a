#include "faceprobe/mlp.hpp"

namespace fp {

namespace {

Eigen::MatrixXd forward_hidden(const MlpModel& m, const Eigen::MatrixXd& x) {
  return ((x * m.w1.transpose()).rowwise() + m.b1.transpose()).array().tanh();
}

Eigen::MatrixXd forward_out(const MlpModel& m, const Eigen::MatrixXd& h) {
  return ((h * m.w2.transpose()).rowwise() + m.b2.transpose()).array().tanh();
}

}  // namespace

double mlp_mse(const MlpModel& model, const Eigen::MatrixXd& scaled_inputs,
               const Eigen::MatrixXd& targets) {
  Eigen::MatrixXd y = forward_out(model, forward_hidden(model, scaled_inputs));
  return (y - targets).squaredNorm() / double(y.rows() * y.cols());
}

MlpGradients mlp_gradients(const MlpModel& model, const Eigen::MatrixXd& scaled_inputs,
                           const Eigen::MatrixXd& targets) {
  const double n = double(scaled_inputs.rows()) * double(targets.cols());
  Eigen::MatrixXd h = forward_hidden(model, scaled_inputs);
  Eigen::MatrixXd y = forward_out(model, h);
  Eigen::MatrixXd dy =
      (2.0 / n) * (y - targets).array() * (1.0 - y.array().square());
  Eigen::MatrixXd dh = (dy * model.w2).array() * (1.0 - h.array().square());
  MlpGradients g;
  g.w2 = dy.transpose() * h;
  g.b2 = dy.colwise().sum();
  g.w1 = dh.transpose() * scaled_inputs;
  g.b1 = dh.colwise().sum();
  return g;
}

TrainResult train_mlp(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                      const TrainConfig& cfg) {
  const long n = inputs.rows();
  const long d = inputs.cols();
  const long k = targets.cols();
  if (n < 1) raise_data("train_mlp: empty training set");
  if (targets.rows() != n)
    raise_data("train_mlp: sample/target count mismatch (" + std::to_string(n) + " vs " +
               std::to_string(targets.rows()) + ")");
  if (cfg.n_hidden < 1) raise_usage("train_mlp: n_hidden must be >= 1");
  if (cfg.n_iterations < 1) raise_usage("train_mlp: n_iterations must be >= 1");
  if (cfg.learning_rate < 0.0 || !std::isfinite(cfg.learning_rate))
    raise_usage("train_mlp: learning_rate must be non-negative");
  if (cfg.goal_mse <= 0.0) raise_usage("train_mlp: goal_mse must be positive");

  MlpModel m;
  m.scale_mean = inputs.colwise().mean();
  Eigen::MatrixXd centered = inputs.rowwise() - m.scale_mean.transpose();
  m.scale_std = (centered.array().square().colwise().mean()).sqrt();
  for (long j = 0; j < d; ++j)
    if (m.scale_std[j] < 1e-12) m.scale_std[j] = 1.0;
  Eigen::MatrixXd x = centered.array().rowwise() / m.scale_std.transpose().array();

  Rng rng(cfg.seed);
  auto init = [&rng](double) { return rng.uniform(-0.5, 0.5); };
  m.w1.resize(cfg.n_hidden, d);
  for (long r = 0; r < m.w1.rows(); ++r)
    for (long c = 0; c < m.w1.cols(); ++c) m.w1(r, c) = init(0);
  m.b1.resize(cfg.n_hidden);
  for (long r = 0; r < m.b1.size(); ++r) m.b1[r] = init(0);
  m.w2.resize(k, cfg.n_hidden);
  for (long r = 0; r < m.w2.rows(); ++r)
    for (long c = 0; c < m.w2.cols(); ++c) m.w2(r, c) = init(0);
  m.b2.resize(k);
  for (long r = 0; r < m.b2.size(); ++r) m.b2[r] = init(0);

  TrainResult result;
  result.initial_mse = mlp_mse(m, x, targets);
  double mse = result.initial_mse;
  int it = 0;
  while (it < cfg.n_iterations && mse > cfg.goal_mse) {
    MlpGradients g = mlp_gradients(m, x, targets);
    m.w1 -= cfg.learning_rate * g.w1;
    m.b1 -= cfg.learning_rate * g.b1;
    m.w2 -= cfg.learning_rate * g.w2;
    m.b2 -= cfg.learning_rate * g.b2;
    ++it;
    mse = mlp_mse(m, x, targets);
    if (!std::isfinite(mse))
      raise_numeric("train_mlp: loss diverged after " + std::to_string(it) +
                    " iterations; try a smaller learning_rate");
  }
  result.model = std::move(m);
  result.final_mse = mse;
  result.iterations_run = it;
  return result;
}

Eigen::VectorXd mlp_forward(const MlpModel& model, const Eigen::VectorXd& v) {
  if (v.size() != model.w1.cols())
    raise_data("mlp_forward: input dimension mismatch (" + std::to_string(v.size()) + " vs " +
               std::to_string(model.w1.cols()) + ")");
  Eigen::VectorXd x = (v - model.scale_mean).array() / model.scale_std.array();
  Eigen::VectorXd h = (model.w1 * x + model.b1).array().tanh();
  return (model.w2 * h + model.b2).array().tanh();
}

ClassDecision classify(const MlpModel& model, const Eigen::VectorXd& v, int n_labels) {
  if (n_labels != model.n_out())
    raise_data("classify: label count " + std::to_string(n_labels) +
               " does not match network outputs " + std::to_string(model.n_out()));
  Eigen::VectorXd y = mlp_forward(model, v);
  ClassDecision d;
  d.scores.assign(y.data(), y.data() + y.size());
  for (int i = 1; i < n_labels; ++i)
    if (d.scores[size_t(i)] > d.scores[size_t(d.index)]) d.index = i;
  return d;
}

Eigen::MatrixXd encode_targets(const std::vector<int>& class_indices, int n_classes,
                               TargetScheme scheme) {
  if (n_classes < 1) raise_usage("encode_targets: need at least one class");
  double lo = scheme == TargetScheme::PlusMinusOne ? -1.0 : 0.0;
  Eigen::MatrixXd t(long(class_indices.size()), n_classes);
  t.setConstant(lo);
  for (size_t i = 0; i < class_indices.size(); ++i) {
    int c = class_indices[i];
    if (c < 0 || c >= n_classes) raise_data("encode_targets: class index out of range");
    t(long(i), c) = 1.0;
  }
  return t;
}

}  // namespace fp
