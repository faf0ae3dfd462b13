#include "uamdp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace uamdp {

std::string_view to_string(Exec e) { return e == Exec::parallel ? "parallel" : "serial"; }

Exec parse_exec(std::string_view s) {
  if (s == "serial") return Exec::serial;
  if (s == "parallel") return Exec::parallel;
  throw std::invalid_argument("unknown execution mode: " + std::string(s));
}

namespace kernels {

double shifted_log_posterior(std::span<const double> log_weights,
                             std::span<const double> log_likelihoods,
                             std::span<double> out, Exec exec) {
  const std::size_t n = log_weights.size();
  if (log_likelihoods.size() != n || out.size() != n)
    throw std::invalid_argument("shifted_log_posterior: length mismatch");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();

  for_each_index(n, exec, [&](std::size_t i) {
    const double lw = log_weights[i];
    const double ll = log_likelihoods[i];
    out[i] = (lw == neg_inf || ll == neg_inf) ? neg_inf : lw + ll;
  });

  double shift = neg_inf;
  for (double v : out) shift = std::max(shift, v);
  if (shift == neg_inf) return shift;

  for_each_index(n, exec, [&](std::size_t i) {
    if (out[i] != neg_inf) out[i] -= shift;
  });
  return shift;
}

void se_gram(std::span<const double> x, std::size_t n, std::size_t dim,
             std::span<const double> length_scales, double sf2, std::span<double> out,
             Exec exec) {
  if (x.size() != n * dim || out.size() != n * n || length_scales.size() != dim)
    throw std::invalid_argument("se_gram: shape mismatch");
  for_each_index(n, exec, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double u = (x[i * dim + d] - x[j * dim + d]) / length_scales[d];
        r2 += u * u;
      }
      out[i * n + j] = sf2 * std::exp(-0.5 * r2);
    }
  });
}

void se_cross(std::span<const double> q, std::size_t m, std::span<const double> x,
              std::size_t n, std::size_t dim, std::span<const double> length_scales,
              double sf2, std::span<double> out, Exec exec) {
  if (q.size() != m * dim || x.size() != n * dim || out.size() != m * n ||
      length_scales.size() != dim)
    throw std::invalid_argument("se_cross: shape mismatch");
  for_each_index(m, exec, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double u = (q[i * dim + d] - x[j * dim + d]) / length_scales[d];
        r2 += u * u;
      }
      out[i * n + j] = sf2 * std::exp(-0.5 * r2);
    }
  });
}

}  // namespace kernels
}  // namespace uamdp
