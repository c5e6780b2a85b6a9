#include "blendsim/res/forecast.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "blendsim/util/rng.hpp"

namespace blendsim::res {

TrainingSet make_training_pairs(const std::vector<ResourceSample>& history) {
  if (history.size() < 2) {
    throw std::invalid_argument("need at least two samples to form pairs");
  }
  int n = static_cast<int>(history.size()) - 1;
  TrainingSet ts;
  ts.x.resize(n, 2);
  ts.y.resize(n);
  for (int i = 0; i < n; ++i) {
    ts.x(i, 0) = history[i].temperature;
    ts.x(i, 1) = history[i].cpu_load;
    ts.y(i) = history[i + 1].temperature;
  }
  return ts;
}

LinearBaseline LinearBaseline::fit(const TrainingSet& ts) {
  Eigen::MatrixXd a(ts.x.rows(), 3);
  a.col(0).setOnes();
  a.col(1) = ts.x.col(0);
  a.col(2) = ts.x.col(1);
  LinearBaseline m;
  m.coef_ = a.colPivHouseholderQr().solve(ts.y);
  return m;
}

double LinearBaseline::predict(double temperature, double load) const {
  return coef_(0) + coef_(1) * temperature + coef_(2) * load;
}

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, util::Rng& rng) {
  double sd = 1.0 / std::sqrt(static_cast<double>(cols));
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian(0.0, sd);
  return m;
}

}  // namespace

MlpForecaster MlpForecaster::train(const TrainingSet& ts, double lr,
                                   int epochs, std::uint64_t seed) {
  if (ts.x.rows() < 2) throw std::invalid_argument("training set too small");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  int n = static_cast<int>(ts.x.rows());

  MlpForecaster m;
  m.x_mean_ = ts.x.colwise().mean();
  for (int c = 0; c < 2; ++c) {
    double var = (ts.x.col(c).array() - m.x_mean_(c)).square().mean();
    m.x_sd_(c) = std::max(std::sqrt(var), 1e-9);
  }
  m.y_mean_ = ts.y.mean();
  m.y_sd_ = std::max(std::sqrt((ts.y.array() - m.y_mean_).square().mean()), 1e-9);

  Eigen::MatrixXd xn(n, 2);
  for (int c = 0; c < 2; ++c) {
    xn.col(c) = (ts.x.col(c).array() - m.x_mean_(c)) / m.x_sd_(c);
  }
  Eigen::VectorXd yn = (ts.y.array() - m.y_mean_) / m.y_sd_;

  util::Rng rng(util::derive_seed(seed, 3));
  m.w1_ = random_matrix(kHidden1, 2, rng);
  m.w2_ = random_matrix(kHidden2, kHidden1, rng);
  m.w3_ = random_matrix(1, kHidden2, rng).transpose();
  m.b1_ = Eigen::VectorXd::Zero(kHidden1);
  m.b2_ = Eigen::VectorXd::Zero(kHidden2);
  m.b3_ = 0.0;

  const double momentum = 0.9;
  Eigen::MatrixXd vw1 = Eigen::MatrixXd::Zero(kHidden1, 2);
  Eigen::MatrixXd vw2 = Eigen::MatrixXd::Zero(kHidden2, kHidden1);
  Eigen::VectorXd vw3 = Eigen::VectorXd::Zero(kHidden2);
  Eigen::VectorXd vb1 = Eigen::VectorXd::Zero(kHidden1);
  Eigen::VectorXd vb2 = Eigen::VectorXd::Zero(kHidden2);
  double vb3 = 0.0;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.uniform_int(0, i)]);
    }
    for (int idx : order) {
      Eigen::Vector2d x = xn.row(idx).transpose();
      double t = yn(idx);

      Eigen::VectorXd h1 = (m.w1_ * x + m.b1_).array().tanh();
      Eigen::VectorXd h2 = (m.w2_ * h1 + m.b2_).array().tanh();
      double y = m.w3_.dot(h2) + m.b3_;

      double dy = 2.0 * (y - t);
      Eigen::VectorXd dz2 =
          (m.w3_ * dy).cwiseProduct((1.0 - h2.array().square()).matrix());
      Eigen::VectorXd dz1 = (m.w2_.transpose() * dz2)
                                .cwiseProduct((1.0 - h1.array().square()).matrix());

      vw3 = momentum * vw3 - lr * dy * h2;
      vb3 = momentum * vb3 - lr * dy;
      vw2 = momentum * vw2 - lr * dz2 * h1.transpose();
      vb2 = momentum * vb2 - lr * dz2;
      vw1 = momentum * vw1 - lr * dz1 * x.transpose();
      vb1 = momentum * vb1 - lr * dz1;

      m.w3_ += vw3;
      m.b3_ += vb3;
      m.w2_ += vw2;
      m.b2_ += vb2;
      m.w1_ += vw1;
      m.b1_ += vb1;
    }
  }
  return m;
}

double MlpForecaster::predict(double temperature, double load) const {
  Eigen::Vector2d x((temperature - x_mean_(0)) / x_sd_(0),
                    (load - x_mean_(1)) / x_sd_(1));
  Eigen::VectorXd h1 = (w1_ * x + b1_).array().tanh();
  Eigen::VectorXd h2 = (w2_ * h1 + b2_).array().tanh();
  return (w3_.dot(h2) + b3_) * y_sd_ + y_mean_;
}

MlpForecaster train_forecaster(const std::vector<ResourceSample>& history,
                               double lr, int epochs, std::uint64_t seed) {
  if (history.size() < 100) {
    throw std::invalid_argument("forecaster needs at least 100 monitor samples");
  }
  return MlpForecaster::train(make_training_pairs(history), lr, epochs, seed);
}

double mape(const std::function<double(double, double)>& model,
            const std::vector<ResourceSample>& trace) {
  if (trace.size() < 2) throw std::invalid_argument("trace too short");
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    double actual = trace[i + 1].temperature;
    if (std::abs(actual) < 1e-9) continue;
    double pred = model(trace[i].temperature, trace[i].cpu_load);
    sum += std::abs(pred - actual) / std::abs(actual);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("no usable prediction targets");
  return 100.0 * sum / static_cast<double>(n);
}

}  // namespace blendsim::res
