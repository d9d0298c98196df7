#include "bubble/svm.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <json.hpp>

#include "bubble/error.hpp"

namespace bubble {

LinearSvm LinearSvm::train(const Eigen::MatrixXd& x, const std::vector<int>& labels, const SvmConfig& config) {
  const auto n = x.rows();
  if (n == 0) throw PreconditionError("empty training set");
  if (static_cast<std::size_t>(n) != labels.size()) throw PreconditionError("feature/label count mismatch");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == -1) neg = true;
    else throw PreconditionError("labels must be +1 or -1");
  }
  if (!pos || !neg) throw PreconditionError("training set contains a single class");
  if (!(config.lambda > 0.0) || config.epochs <= 0) throw PreconditionError("bad SVM config");

  const auto d = x.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);  // last entry is the bias weight
  Eigen::VectorXd xi(d + 1);

  std::mt19937_64 rng(config.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  long long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      ++step;
      xi.head(d) = x.row(i).transpose();
      xi(d) = 1.0;
      const double eta = 1.0 / (config.lambda * static_cast<double>(step));
      const double margin = labels[static_cast<std::size_t>(i)] * w.dot(xi);
      w *= (1.0 - eta * config.lambda);
      if (margin < 1.0) w += eta * labels[static_cast<std::size_t>(i)] * xi;
      // projection onto the ball of radius 1/sqrt(lambda)
      const double norm = w.norm();
      const double radius = 1.0 / std::sqrt(config.lambda);
      if (norm > radius) w *= radius / norm;
    }
  }
  return LinearSvm(w.head(d), w(d));
}

std::string LinearSvm::to_json() const {
  nlohmann::json j;
  j["kind"] = "linear_svm";
  j["weights"] = std::vector<double>(weights_.data(), weights_.data() + weights_.size());
  j["bias"] = bias_;
  return j.dump(2) + "\n";
}

LinearSvm LinearSvm::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("classifier model is not valid JSON: ") + e.what());
  }
  if (!j.contains("weights") || !j.contains("bias")) throw IoError("classifier model lacks weights/bias");
  auto w = j["weights"].get<std::vector<double>>();
  return LinearSvm(Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())), j["bias"].get<double>());
}

}  // namespace bubble
