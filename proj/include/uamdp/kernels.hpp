#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path and an
// OpenMP path; both write results by index and reduce in a fixed order, so the
// two paths are bit-identical for the same inputs.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace uamdp {

enum class Exec { serial, parallel };

std::string_view to_string(Exec e);
Exec parse_exec(std::string_view s);

namespace kernels {

// Calls fn(i) for i in [0, n). fn must only write to slot i of its outputs.
template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::parallel) {
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

// Fills out[i] = fn(i) and returns out.
template <class T, class Fn>
std::vector<T> map_index(std::size_t n, Exec exec, Fn&& fn) {
  std::vector<T> out(n);
  for_each_index(n, exec, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

// log w_i + log l_i, shifted by the max finite value. Entries with -inf stay -inf.
// Returns the shift applied (or -inf if every entry is -inf).
double shifted_log_posterior(std::span<const double> log_weights,
                             std::span<const double> log_likelihoods,
                             std::span<double> out, Exec exec);

// Squared-exponential Gram matrix K(i,j) = sf2 * exp(-0.5 * sum_d ((x_i-x_j)/l_d)^2),
// rows of `x` are points (row-major, n x dim). Writes n*n entries row-major.
void se_gram(std::span<const double> x, std::size_t n, std::size_t dim,
             std::span<const double> length_scales, double sf2, std::span<double> out,
             Exec exec);

// Cross-covariance between m query rows `q` and n training rows `x`.
void se_cross(std::span<const double> q, std::size_t m, std::span<const double> x,
              std::size_t n, std::size_t dim, std::span<const double> length_scales,
              double sf2, std::span<double> out, Exec exec);

}  // namespace kernels
}  // namespace uamdp
