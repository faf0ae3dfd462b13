#pragma once

// One-step probabilistic forecasters and their predictive distributions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uamdp/belief.hpp"
#include "uamdp/rng.hpp"

namespace uamdp {

using Observation = std::vector<double>;

enum class DistKind { diagonal_gaussian, empirical };

// Per-dimension Gaussian, or an empirical sample matrix (rows are draws).
// For the empirical kind `means`/`variances` hold the sample moments
// (variance floored at 1e-12).
class PredictiveDist {
 public:
  static PredictiveDist gaussian(std::vector<double> means, std::vector<double> variances);
  static PredictiveDist empirical(std::vector<std::vector<double>> samples);

  DistKind kind() const { return kind_; }
  std::size_t dim() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& variances() const { return variances_; }
  const std::vector<std::vector<double>>& samples() const { return samples_; }

 private:
  DistKind kind_ = DistKind::diagonal_gaussian;
  std::vector<double> means_;
  std::vector<double> variances_;
  std::vector<std::vector<double>> samples_;
};

// Σ_j log N(x_j; mean_j, var_j) for the Gaussian kind; product-kernel Gaussian
// KDE with Silverman bandwidths for the empirical kind.
double log_likelihood(const PredictiveDist& p, std::span<const double> x);

Observation sample_next(const PredictiveDist& p, std::uint64_t rng_seed);
Observation sample_next(const PredictiveDist& p, Rng& rng);

double gaussian_log_pdf(double x, double mean, double var);

nlohmann::json to_json(const PredictiveDist& p);
PredictiveDist predictive_from_json(const nlohmann::json& j);

// Conjugate Normal model for a scalar latent mean with known observation noise.
struct ScalarGaussianBelief {
  double mu = 0.0;
  double var = 1.0;
  double noise_var = 1.0;
};

ScalarGaussianBelief conjugate_update(const ScalarGaussianBelief& s, double r_obs);

// Predictive for the next observation: N(mu, var + noise_var).
PredictiveDist conjugate_predictive(const ScalarGaussianBelief& s);

// mean = last observation; variance = per-dimension sample variance (n-1) of
// the trailing window, floored at 1e-12.
PredictiveDist persistence_forecast(std::span<const Observation> history,
                                    std::size_t var_window);

inline constexpr double kVarianceFloor = 1e-12;

// What a forecaster sees at decision time.
struct ForecastInput {
  std::span<const Observation> history;
  std::span<const double> features;
  std::size_t action = 0;
};

// p_phi(x_{t+1} | s_t, a_t, theta). Parameters are frozen after construction.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual PredictiveDist predict(const ForecastInput& in, const LatentParam& theta) const = 0;
  virtual std::string name() const = 0;
};

// Gaussian whose per-dimension mean and variance are read directly from
// theta.params at the given offsets.
class ParametricGaussianForecaster final : public Forecaster {
 public:
  ParametricGaussianForecaster(std::vector<std::size_t> mean_index,
                               std::vector<std::size_t> sd_index);
  PredictiveDist predict(const ForecastInput& in, const LatentParam& theta) const override;
  std::string name() const override { return "conjugate"; }

 private:
  std::vector<std::size_t> mean_index_;
  std::vector<std::size_t> sd_index_;
};

class PersistenceForecaster final : public Forecaster {
 public:
  explicit PersistenceForecaster(std::size_t var_window) : var_window_(var_window) {}
  PredictiveDist predict(const ForecastInput& in, const LatentParam& theta) const override;
  std::string name() const override { return "persistence"; }

 private:
  std::size_t var_window_;
};

}  // namespace uamdp
