#include "qtraj/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtraj/errors.hpp"

namespace qtraj {

GridDomain::GridDomain(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw InvalidArgument("grid domain requires finite x_min < x_max");
  }
  if (n_points < kMinGridPoints) {
    throw InvalidArgument("grid domain requires at least " + std::to_string(kMinGridPoints) +
                          " points, got " + std::to_string(n_points));
  }
}

double GridDomain::node(std::size_t i) const {
  if (i + 1 >= n_points_) return x_max_;
  return x_min_ + static_cast<double>(i) * spacing();
}

std::vector<double> GridDomain::nodes() const {
  std::vector<double> out(n_points_);
  for (std::size_t i = 0; i < n_points_; ++i) out[i] = node(i);
  return out;
}

std::size_t GridDomain::cell(double x) const {
  const double s = (x - x_min_) / spacing();
  if (!(s > 0.0)) return 0;
  const auto k = static_cast<std::size_t>(s);
  return std::min(k, n_points_ - 2);
}

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);

  const std::size_t odd_n = (n % 2 == 1) ? n : n - 1;
  double ends = f[0] + f[odd_n - 1];
  double odds = 0.0;
  double evens = 0.0;
  for (std::size_t i = 1; i + 1 < odd_n; ++i) {
    if (i % 2 == 1) {
      odds += f[i];
    } else {
      evens += f[i];
    }
  }
  double sum = h / 3.0 * (ends + 4.0 * odds + 2.0 * evens);
  if (odd_n != n) {
    sum += h / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
  }
  return sum;
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  if (n == 2) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const std::size_t odd_n = (n % 2 == 1) ? n : n - 1;
  for (std::size_t i = 0; i < odd_n; ++i) {
    const double c = (i == 0 || i + 1 == odd_n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * h / 3.0;
  }
  if (odd_n != n) {
    w[n - 3] -= h / 12.0;
    w[n - 2] += 8.0 * h / 12.0;
    w[n - 1] += 5.0 * h / 12.0;
  }
  return w;
}

std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0) {
      out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    } else if (i + 1 < n) {
      out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    } else {
      out[i] = out[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
    }
  }
  return out;
}

double sin_pi(double y) {
  double r = std::remainder(y, 2.0);  // r in [-1, 1]
  if (r == 0.0 || std::fabs(r) == 1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == -0.5) return -1.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

double cos_pi(double y) {
  double r = std::fabs(std::remainder(y, 2.0));  // r in [0, 1]
  if (r == 0.5) return 0.0;
  if (r == 0.0) return 1.0;
  if (r == 1.0) return -1.0;
  // cos(pi r) = sin(pi (1/2 - r)) keeps the small-argument branch accurate.
  return sin_pi(0.5 - r);
}

}  // namespace qtraj
