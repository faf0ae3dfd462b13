#pragma once

// Exact Gaussian-process regression with independent outputs and a shared
// squared-exponential kernel. Hyperparameters are fixed at construction.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uamdp/forecaster.hpp"
#include "uamdp/kernels.hpp"

namespace uamdp {

class IllConditioned : public std::runtime_error {
 public:
  explicit IllConditioned(const std::string& what) : std::runtime_error(what) {}
};

struct SeKernel {
  std::vector<double> length_scales;
  double signal_variance = 1.0;
};

struct GPModel {
  Eigen::MatrixXd inputs;   // n x p
  Eigen::MatrixXd targets;  // n x d
  SeKernel kernel;
  std::vector<double> noise_variance;  // per output
  std::vector<double> mean;            // constant mean per output
};

class GaussianProcess {
 public:
  explicit GaussianProcess(GPModel model, Exec exec = Exec::serial);

  PredictiveDist predict(std::span<const double> z) const;

  std::size_t input_dim() const { return static_cast<std::size_t>(model_.inputs.cols()); }
  std::size_t output_dim() const { return model_.noise_variance.size(); }
  std::size_t train_size() const { return static_cast<std::size_t>(model_.inputs.rows()); }
  const GPModel& model() const { return model_; }
  // Jitter added to the Gram diagonal for each output.
  const std::vector<double>& jitter() const { return jitter_; }

 private:
  GPModel model_;
  Exec exec_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol_;
  std::vector<Eigen::VectorXd> alpha_;
  std::vector<double> jitter_;
  std::vector<double> row_major_inputs_;
};

// Reads a training table with header z_1..z_p,y_1..y_d.
struct TrainingTable {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
};
TrainingTable load_training_csv(const std::string& path);
void save_training_csv(const std::string& path, const TrainingTable& table);

// theta encodings for the augmented GP input.
std::vector<double> one_hot(std::size_t index, std::size_t size);

// GP forecaster over z = concat(features, eta(theta)) with eta the one-hot of
// theta's position in `support` (matched by id).
class GpForecaster final : public Forecaster {
 public:
  GpForecaster(GaussianProcess gp, std::vector<LatentParam> support);
  PredictiveDist predict(const ForecastInput& in, const LatentParam& theta) const override;
  std::string name() const override { return "gp"; }
  const GaussianProcess& gp() const { return gp_; }

 private:
  GaussianProcess gp_;
  std::vector<LatentParam> support_;
};

}  // namespace uamdp
