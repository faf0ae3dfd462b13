#pragma once

// Risk functionals over sampled H-step discounted returns. Larger returns are
// better; CVaR averages the lower tail.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace uamdp {

class ReturnDistribution {
 public:
  explicit ReturnDistribution(std::vector<double> samples);
  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double mean() const;

 private:
  std::vector<double> samples_;
};

// Axis-aligned box [lower, upper] in observation space.
struct SafeBox {
  std::vector<double> lower;
  std::vector<double> upper;
  bool contains(std::span<const double> x) const;
};

struct RiskConfig {
  double alpha = 0.05;
  double eta = 0.7;
  double delta = 0.05;
  std::optional<SafeBox> safe_set;  // nullopt: chance constraints inactive

  void validate() const;
};

// Number of tail samples used by cvar: ceil(alpha * m), at least 1.
std::size_t cvar_tail_size(std::size_t m, double alpha);

double cvar(const ReturnDistribution& z, double alpha);
double cvar(std::span<const double> samples, double alpha);

// (1 - eta) * mean + eta * cvar_alpha.
double blended_objective(const ReturnDistribution& z, const RiskConfig& cfg);
double blended_objective(std::span<const double> samples, const RiskConfig& cfg);

// Sampled future observations indexed (sample, horizon step, dim).
struct ObservationPaths {
  std::size_t n_samples = 0;
  std::size_t horizon = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // row-major

  ObservationPaths(std::size_t samples, std::size_t steps, std::size_t d)
      : n_samples(samples), horizon(steps), dim(d), data(samples * steps * d, 0.0) {}
  std::span<double> at(std::size_t s, std::size_t h) {
    return {data.data() + (s * horizon + h) * dim, dim};
  }
  std::span<const double> at(std::size_t s, std::size_t h) const {
    return {data.data() + (s * horizon + h) * dim, dim};
  }
};

// Fraction of samples inside the safe set at each horizon step.
std::vector<double> safe_fraction(const ObservationPaths& paths, const SafeBox& box);

// Per horizon step: fraction inside the box >= 1 - delta. Requires cfg.safe_set.
std::vector<bool> chance_constraint_ok(const ObservationPaths& paths, const RiskConfig& cfg);

}  // namespace uamdp
