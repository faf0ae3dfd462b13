#pragma once

// Feature vectors for the trading and inventory environments. Layouts are
// fixed; names are listed by *_feature_names() and in schemas/features.json.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uamdp {

class WarmupInsufficient : public std::runtime_error {
 public:
  WarmupInsufficient(std::size_t t, std::size_t need)
      : std::runtime_error("feature warm-up: t=" + std::to_string(t) + " < " + std::to_string(need)) {}
};

inline constexpr std::size_t kTradingWarmup = 60;
inline constexpr std::size_t kInventoryWarmup = 27;

double log_return(double p_prev, double p);
double true_range(double high, double low, double p_prev);
// Recursive EMA with alpha = 2 / (span + 1), seeded by the first value.
std::vector<double> ema(std::span<const double> x, std::size_t span);

const std::vector<std::string>& trading_feature_names();
// Uses prices/highs/lows/volumes up to and including index t.
std::vector<double> features_trading(std::span<const double> prices, std::span<const double> highs,
                                     std::span<const double> lows, std::span<const double> volumes,
                                     std::size_t t);

const std::vector<std::string>& inventory_feature_names();
std::vector<double> features_inventory(std::span<const double> demand, std::span<const double> prices,
                                       std::span<const double> backorders, std::size_t t);

// Column-wise z-scoring with statistics from a training window. Columns with
// zero spread are centred only.
class ZScoreScaler {
 public:
  void fit(const std::vector<std::vector<double>>& rows);
  std::vector<double> transform(std::span<const double> row) const;
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace uamdp
