#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bubble {

struct SvmConfig {
  double lambda = 1e-4;  // L2 regularization strength
  int epochs = 200;
  std::uint64_t seed = 1;
};

/// Linear max-margin classifier: decision is sign(w.x + b).
class LinearSvm {
 public:
  LinearSvm() = default;
  LinearSvm(Eigen::VectorXd weights, double bias) : weights_(std::move(weights)), bias_(bias), trained_(true) {}

  /// Regularized hinge loss minimized by stochastic subgradient descent
  /// (Pegasos schedule, step 1/(lambda t)); the bias is trained as a
  /// weight on a constant feature. Rows of `x` are samples, labels are +-1.
  /// Throws PreconditionError on empty input or a single class.
  static LinearSvm train(const Eigen::MatrixXd& x, const std::vector<int>& labels, const SvmConfig& config);

  double decision(const Eigen::Ref<const Eigen::VectorXd>& features) const {
    return weights_.dot(features) + bias_;
  }
  bool predict(const Eigen::Ref<const Eigen::VectorXd>& features) const { return decision(features) > 0.0; }

  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }
  bool trained() const { return trained_; }

  std::string to_json() const;
  static LinearSvm from_json(const std::string& text);

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
  bool trained_ = false;
};

}  // namespace bubble
