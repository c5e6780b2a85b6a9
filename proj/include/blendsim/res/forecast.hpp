#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "blendsim/res/thermal.hpp"

namespace blendsim::res {

// Supervised pairs (temperature, load) -> temperature one monitor period
// later, built from consecutive rows of a monitoring trace.
struct TrainingSet {
  Eigen::MatrixXd x;  // n x 2
  Eigen::VectorXd y;  // n
};

TrainingSet make_training_pairs(const std::vector<ResourceSample>& history);

// Least-squares fit of the next temperature on [1, T, load]. The thermal
// model is linear in both, so this is the reference the network must match.
class LinearBaseline {
 public:
  static LinearBaseline fit(const TrainingSet& ts);
  double predict(double temperature, double load) const;

 private:
  Eigen::Vector3d coef_ = Eigen::Vector3d::Zero();
};

// Fixed topology 2 -> 20 -> 40 -> 1 with tanh hidden units and a linear
// output. Trained by per-sample gradient descent with momentum 0.9 for the
// configured number of epochs; inputs and target are standardized to
// zero-mean/unit-variance over the training set.
class MlpForecaster {
 public:
  static constexpr int kHidden1 = 20;
  static constexpr int kHidden2 = 40;

  static MlpForecaster train(const TrainingSet& ts, double lr = 1e-3,
                             int epochs = 200, std::uint64_t seed = 1);
  double predict(double temperature, double load) const;

 private:
  Eigen::MatrixXd w1_, w2_;
  Eigen::VectorXd b1_, b2_, w3_;
  double b3_ = 0.0;
  Eigen::Vector2d x_mean_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d x_sd_ = Eigen::Vector2d::Ones();
  double y_mean_ = 0.0;
  double y_sd_ = 1.0;
};

// Convenience wrapper enforcing the minimum history before training.
MlpForecaster train_forecaster(const std::vector<ResourceSample>& history,
                               double lr = 1e-3, int epochs = 200,
                               std::uint64_t seed = 1);

// Mean absolute percentage error of one-step predictions along a trace.
double mape(const std::function<double(double, double)>& model,
            const std::vector<ResourceSample>& trace);

}  // namespace blendsim::res
