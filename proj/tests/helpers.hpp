#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sigregime/streams.hpp"

namespace testing_util {

// random walk stream with n knots in d channels, unit-ish steps scaled by `step`
inline sigregime::Stream random_stream(std::mt19937_64& g, std::size_t n, std::size_t d,
                                       double step = 0.3, double start = 0.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> t(n), v(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t c = 0; c < d; ++c)
      v[i * d + c] = i == 0 ? start : v[(i - 1) * d + c] + step * z(g);
  }
  return sigregime::Stream(t, v, d);
}

inline sigregime::Stream positive_stream(std::mt19937_64& g, std::size_t n, std::size_t d) {
  std::normal_distribution<double> z(0.0, 0.05);
  std::vector<double> t(n), v(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = 0.1 * static_cast<double>(i) + 0.37;
    for (std::size_t c = 0; c < d; ++c)
      v[i * d + c] = i == 0 ? 1.0 + 0.5 * c : v[(i - 1) * d + c] * std::exp(z(g));
  }
  return sigregime::Stream(t, v, d);
}

inline sigregime::Stream line_1d(double a, std::size_t n = 2) {
  std::vector<double> t(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = a * t[i];
  }
  return sigregime::Stream(t, v, 1);
}

inline sigregime::Stream constant_stream(std::size_t n, std::size_t d, double c = 1.0) {
  std::vector<double> t(n), v(n * d, c);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i);
  return sigregime::Stream(t, v, d);
}

// sum_k a^(2k) / (k!)^2 for the kernel of two straight 1-D lines 0 -> a
inline double line_kernel_series(double a, int terms = 30) {
  double s = 0.0, term = 1.0;
  for (int k = 0; k < terms; ++k) {
    s += term;
    term *= a * a / ((k + 1.0) * (k + 1.0));
  }
  return s;
}

}  // namespace testing_util
