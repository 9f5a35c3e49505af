#include "qtraj/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "qtraj/errors.hpp"

namespace qtraj {

namespace {

// One-sided three-point slope at an end knot, limited so it cannot
// introduce an overshoot (same rule as the classic PCHIP end condition).
double end_slope(double h0, double h1, double del0, double del1) {
  double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
  if (std::signbit(d) != std::signbit(del0) || d == 0.0) {
    d = 0.0;
  } else if (std::signbit(del0) != std::signbit(del1) && std::fabs(d) > std::fabs(3.0 * del0)) {
    d = 3.0 * del0;
  }
  return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  check_knots();
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1);
  std::vector<double> del(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    del[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = del[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double a = del[k - 1];
    const double b = del[k];
    if (a == 0.0 || b == 0.0 || std::signbit(a) != std::signbit(b)) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d_[k] = (w1 + w2) / (w1 / a + w2 / b);
  }
  d_[0] = end_slope(h[0], h[1], del[0], del[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y,
                             std::vector<double> slopes)
    : x_(std::move(x)), y_(std::move(y)), d_(std::move(slopes)) {
  check_knots();
  if (d_.size() != x_.size()) throw InvalidArgument("slope count must match knot count");
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    const double del = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
    if (del == 0.0) {
      d_[k] = 0.0;
      d_[k + 1] = 0.0;
      continue;
    }
    const double alpha = d_[k] / del;
    const double beta = d_[k + 1] / del;
    if (alpha < 0.0) d_[k] = 0.0;
    if (beta < 0.0) d_[k + 1] = 0.0;
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      d_[k] = tau * alpha * del;
      d_[k + 1] = tau * beta * del;
    }
  }
}

void MonotoneCubic::check_knots() const {
  if (x_.size() < 2 || x_.size() != y_.size()) {
    throw InvalidArgument("interpolant needs at least two knots and matching value count");
  }
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    if (!(x_[k + 1] > x_[k])) throw InvalidArgument("interpolation knots must be strictly increasing");
  }
}

std::size_t MonotoneCubic::cell(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.begin()) return 0;
  const auto k = static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(k, x_.size() - 2);
}

double MonotoneCubic::eval_in_cell(std::size_t k, double x) const {
  const double h = x_[k + 1] - x_[k];
  const double s = (x - x_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

double MonotoneCubic::operator()(double x) const { return eval_in_cell(cell(x), x); }

double MonotoneCubic::derivative(double x) const {
  const std::size_t k = cell(x);
  const double h = x_[k + 1] - x_[k];
  const double s = (x - x_[k]) / h;
  const double s2 = s * s;
  const double dh00 = (6.0 * s2 - 6.0 * s) / h;
  const double dh10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double dh01 = (-6.0 * s2 + 6.0 * s) / h;
  const double dh11 = 3.0 * s2 - 2.0 * s;
  return dh00 * y_[k] + dh10 * d_[k] + dh01 * y_[k + 1] + dh11 * d_[k + 1];
}

}  // namespace qtraj
