#include "uamdp/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uamdp/rng.hpp"

namespace uamdp {

namespace {

void check_variances(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("predictive variances must be positive and finite");
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

PredictiveDist PredictiveDist::gaussian(std::vector<double> means, std::vector<double> variances) {
  if (means.size() != variances.size() || means.empty())
    throw std::invalid_argument("gaussian predictive: means/variances length mismatch");
  check_variances(variances);
  PredictiveDist p;
  p.kind_ = DistKind::diagonal_gaussian;
  p.means_ = std::move(means);
  p.variances_ = std::move(variances);
  return p;
}

PredictiveDist PredictiveDist::empirical(std::vector<std::vector<double>> samples) {
  if (samples.empty() || samples.front().empty())
    throw std::invalid_argument("empirical predictive needs at least one sample row");
  const std::size_t d = samples.front().size();
  for (const auto& row : samples)
    if (row.size() != d) throw std::invalid_argument("empirical predictive: ragged samples");
  const double n = static_cast<double>(samples.size());
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const auto& row : samples)
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j] / n;
  if (samples.size() > 1)
    for (const auto& row : samples)
      for (std::size_t j = 0; j < d; ++j) var[j] += (row[j] - mean[j]) * (row[j] - mean[j]) / (n - 1.0);
  for (double& v : var) v = std::max(v, kVarianceFloor);
  PredictiveDist p;
  p.kind_ = DistKind::empirical;
  p.means_ = std::move(mean);
  p.variances_ = std::move(var);
  p.samples_ = std::move(samples);
  return p;
}

double gaussian_log_pdf(double x, double mean, double var) {
  const double z = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + z * z / var);
}

double log_likelihood(const PredictiveDist& p, std::span<const double> x) {
  if (x.size() != p.dim()) throw std::invalid_argument("log_likelihood: dimension mismatch");
  if (p.kind() == DistKind::diagonal_gaussian) {
    double ll = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) ll += gaussian_log_pdf(x[j], p.means()[j], p.variances()[j]);
    return ll;
  }
  // Product Gaussian kernel, Silverman's rule per dimension.
  const auto& rows = p.samples();
  const double n = static_cast<double>(rows.size());
  const double d = static_cast<double>(p.dim());
  const double factor = std::pow(4.0 / ((d + 2.0) * n), 1.0 / (d + 4.0));
  std::vector<double> h2(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) {
    const double sd = std::sqrt(p.variances()[j]);
    const double h = sd * factor;
    h2[j] = std::max(h * h, kVarianceFloor);
  }
  std::vector<double> terms(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double t = 0.0;
    for (std::size_t j = 0; j < p.dim(); ++j) t += gaussian_log_pdf(x[j], rows[i][j], h2[j]);
    terms[i] = t;
  }
  return log_sum_exp(terms) - std::log(n);
}

Observation sample_next(const PredictiveDist& p, Rng& rng) {
  if (p.kind() == DistKind::empirical) {
    const auto i = std::uniform_int_distribution<std::size_t>(0, p.samples().size() - 1)(rng);
    return p.samples()[i];
  }
  std::normal_distribution<double> z(0.0, 1.0);
  Observation x(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) x[j] = p.means()[j] + std::sqrt(p.variances()[j]) * z(rng);
  return x;
}

Observation sample_next(const PredictiveDist& p, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_next(p, rng);
}

nlohmann::json to_json(const PredictiveDist& p) {
  nlohmann::json j{{"kind", p.kind() == DistKind::empirical ? "empirical" : "diagonal-gaussian"},
                   {"means", p.means()},
                   {"variances", p.variances()}};
  if (p.kind() == DistKind::empirical) j["samples"] = p.samples();
  return j;
}

PredictiveDist predictive_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "empirical")
    return PredictiveDist::empirical(j.at("samples").get<std::vector<std::vector<double>>>());
  if (kind != "diagonal-gaussian") throw std::invalid_argument("unknown predictive kind: " + kind);
  return PredictiveDist::gaussian(j.at("means").get<std::vector<double>>(),
                                  j.at("variances").get<std::vector<double>>());
}

ScalarGaussianBelief conjugate_update(const ScalarGaussianBelief& s, double r_obs) {
  if (!(s.var > 0.0) || !(s.noise_var > 0.0))
    throw std::invalid_argument("conjugate_update: variances must be positive");
  const double gain = s.var / (s.var + s.noise_var);
  ScalarGaussianBelief out = s;
  out.mu = s.mu + gain * (r_obs - s.mu);
  out.var = s.var * s.noise_var / (s.var + s.noise_var);
  return out;
}

PredictiveDist conjugate_predictive(const ScalarGaussianBelief& s) {
  return PredictiveDist::gaussian({s.mu}, {s.var + s.noise_var});
}

PredictiveDist persistence_forecast(std::span<const Observation> history, std::size_t var_window) {
  if (history.empty()) throw std::invalid_argument("persistence_forecast: empty history");
  if (var_window < 1) throw std::invalid_argument("persistence_forecast: window must be >= 1");
  const std::size_t d = history.back().size();
  const std::size_t w = std::min(var_window, history.size());
  const auto window = history.subspan(history.size() - w);
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const auto& x : window)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j] / static_cast<double>(w);
  if (w > 1)
    for (const auto& x : window)
      for (std::size_t j = 0; j < d; ++j)
        var[j] += (x[j] - mean[j]) * (x[j] - mean[j]) / static_cast<double>(w - 1);
  for (double& v : var) v = std::max(v, kVarianceFloor);
  return PredictiveDist::gaussian(history.back(), std::move(var));
}

ParametricGaussianForecaster::ParametricGaussianForecaster(std::vector<std::size_t> mean_index,
                                                           std::vector<std::size_t> sd_index)
    : mean_index_(std::move(mean_index)), sd_index_(std::move(sd_index)) {
  if (mean_index_.size() != sd_index_.size() || mean_index_.empty())
    throw std::invalid_argument("parametric forecaster: index lists must match");
}

PredictiveDist ParametricGaussianForecaster::predict(const ForecastInput&,
                                                     const LatentParam& theta) const {
  std::vector<double> m(mean_index_.size()), v(sd_index_.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    m[j] = theta.params.at(mean_index_[j]);
    const double sd = theta.params.at(sd_index_[j]);
    v[j] = std::max(sd * sd, kVarianceFloor);
  }
  return PredictiveDist::gaussian(std::move(m), std::move(v));
}

PredictiveDist PersistenceForecaster::predict(const ForecastInput& in, const LatentParam&) const {
  return persistence_forecast(in.history, var_window_);
}

}  // namespace uamdp
