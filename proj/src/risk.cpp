#include "uamdp/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uamdp {

ReturnDistribution::ReturnDistribution(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("return distribution must be non-empty");
  for (double v : samples_)
    if (!std::isfinite(v)) throw std::invalid_argument("return samples must be finite");
}

double ReturnDistribution::mean() const {
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
}

bool SafeBox::contains(std::span<const double> x) const {
  if (x.size() != lower.size() || x.size() != upper.size())
    throw std::invalid_argument("safe set dimension mismatch");
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < lower[j] || x[j] > upper[j]) return false;
  return true;
}

void RiskConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("risk alpha must lie in (0,1)");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("risk eta must lie in [0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("risk delta must lie in (0,1)");
  if (safe_set && safe_set->lower.size() != safe_set->upper.size())
    throw std::invalid_argument("safe set bounds dimension mismatch");
}

std::size_t cvar_tail_size(std::size_t m, double alpha) {
  const auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(m) - 1e-12));
  return std::clamp<std::size_t>(k, 1, m);
}

double cvar(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw std::invalid_argument("cvar: empty sample set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cvar: alpha must lie in (0,1)");
  const std::size_t k = cvar_tail_size(samples.size(), alpha);
  std::vector<double> s(samples.begin(), samples.end());
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k - 1), s.end());
  std::sort(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += s[i];
  return sum / static_cast<double>(k);
}

double cvar(const ReturnDistribution& z, double alpha) { return cvar(z.samples(), alpha); }

double blended_objective(std::span<const double> samples, const RiskConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("blended_objective: empty sample set");
  const double mean =
      std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  if (cfg.eta == 0.0) return mean;
  return (1.0 - cfg.eta) * mean + cfg.eta * cvar(samples, cfg.alpha);
}

double blended_objective(const ReturnDistribution& z, const RiskConfig& cfg) {
  return blended_objective(z.samples(), cfg);
}

std::vector<double> safe_fraction(const ObservationPaths& paths, const SafeBox& box) {
  if (paths.n_samples == 0) throw std::invalid_argument("chance constraint: no sample paths");
  std::vector<double> frac(paths.horizon, 0.0);
  for (std::size_t h = 0; h < paths.horizon; ++h) {
    std::size_t inside = 0;
    for (std::size_t s = 0; s < paths.n_samples; ++s)
      if (box.contains(paths.at(s, h))) ++inside;
    frac[h] = static_cast<double>(inside) / static_cast<double>(paths.n_samples);
  }
  return frac;
}

std::vector<bool> chance_constraint_ok(const ObservationPaths& paths, const RiskConfig& cfg) {
  if (!cfg.safe_set) throw std::invalid_argument("chance_constraint_ok called without a safe set");
  const auto frac = safe_fraction(paths, *cfg.safe_set);
  std::vector<bool> ok(frac.size());
  for (std::size_t h = 0; h < frac.size(); ++h) ok[h] = frac[h] >= 1.0 - cfg.delta - 1e-12;
  return ok;
}

}  // namespace uamdp
