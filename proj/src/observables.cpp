#include "qtraj/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qtraj/errors.hpp"

namespace qtraj {

namespace {

constexpr double kMassCapture = 0.999;
constexpr double kTangentTolerance = 1e-9;

struct Moments {
  double mean;
  double spread;
};

Moments moments(std::span<const double> weight, std::span<const double> at, double h) {
  std::vector<double> f0(weight.size());
  std::vector<double> f1(weight.size());
  std::vector<double> f2(weight.size());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    f0[i] = weight[i];
    f1[i] = weight[i] * at[i];
    f2[i] = weight[i] * at[i] * at[i];
  }
  const double m0 = simpson(f0, h);
  const double mean = simpson(f1, h) / m0;
  const double second = simpson(f2, h) / m0;
  return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

// sum_j a[j] * exp(i * omega * (x0 + j h)). The phase factor advances by
// complex multiplication and is re-seeded every 256 terms to bound drift.
Complex phased_sum(std::span<const Complex> a, double omega, double x0, double h) {
  constexpr std::size_t kReseed = 256;
  const Complex step = std::polar(1.0, omega * h);
  Complex sum{0.0, 0.0};
  Complex cur{1.0, 0.0};
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (j % kReseed == 0) cur = std::polar(1.0, omega * (x0 + static_cast<double>(j) * h));
    sum += a[j] * cur;
    cur *= step;
  }
  return sum;
}

}  // namespace

MomentumAmplitude momentum_amplitude(const WaveFunction& wf, std::size_t n_mu, double mu_max, double hbar) {
  if (n_mu < 64) throw InvalidArgument("momentum grid needs at least 64 points");
  if (!(mu_max > 0.0) || !(hbar > 0.0)) throw InvalidArgument("mu_max and hbar must be positive");

  const GridDomain& dom = wf.domain();
  const auto psi = wf.amplitude_nodes();
  const auto w = simpson_weights(dom.size(), dom.spacing());
  std::vector<Complex> weighted(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) weighted[j] = w[j] * psi[j];

  MomentumAmplitude out;
  out.hbar = hbar;
  out.mu.resize(n_mu);
  out.values.resize(n_mu);
  const double denom = static_cast<double>(n_mu - 1);
  const double prefactor = 1.0 / std::sqrt(2.0 * std::numbers::pi * hbar);
  for (std::size_t k = 0; k < n_mu; ++k) {
    const double mu = mu_max * (2.0 * static_cast<double>(k) - denom) / denom;
    out.mu[k] = mu;
    out.values[k] = prefactor * phased_sum(weighted, -mu / hbar, dom.x_min(), dom.spacing());
  }

  std::vector<double> mass(n_mu);
  for (std::size_t k = 0; k < n_mu; ++k) mass[k] = std::norm(out.values[k]);
  out.captured_mass = simpson(mass, out.spacing());
  out.truncated = out.captured_mass < kMassCapture;
  const double scale = 1.0 / std::sqrt(out.captured_mass);
  for (auto& v : out.values) v *= scale;
  return out;
}

Uncertainty uncertainty_product(const WaveFunction& wf, const MomentumAmplitude& phi) {
  if (phi.mu.size() < 2 || phi.mu.size() != phi.values.size()) {
    throw InvalidArgument("momentum amplitude grid is inconsistent");
  }
  const GridDomain& dom = wf.domain();
  const auto xs = dom.nodes();
  const Moments mx = moments(wf.density_nodes(), xs, dom.spacing());

  std::vector<double> mass(phi.values.size());
  for (std::size_t k = 0; k < mass.size(); ++k) mass[k] = std::norm(phi.values[k]);
  const Moments mm = moments(mass, phi.mu, phi.spacing());
  return {mx.spread, mm.spread, mx.spread * mm.spread};
}

double momentum_spread_operator(const WaveFunction& wf, double hbar) {
  const GridDomain& dom = wf.domain();
  std::vector<double> first(dom.size());
  std::vector<double> second(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double x = dom.node(i);
    const Complex psi = wf.amplitude(x);
    const Complex dpsi = wf.derivative(x);
    first[i] = (std::conj(psi) * dpsi).imag();
    second[i] = std::norm(dpsi);
  }
  const double mean = hbar * simpson(first, dom.spacing());
  const double mean_sq = hbar * hbar * simpson(second, dom.spacing());
  return std::sqrt(std::max(0.0, mean_sq - mean * mean));
}

VelocityPdf classical_velocity_pdf(const WaveFunction& wf, double v, const PhysicalParams& params) {
  params.validate();
  VelocityPdf out;
  if (v == 0.0) {
    out.flag = PdfFlag::singular;
    return out;
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    out.flag = PdfFlag::no_preimage;
    return out;
  }

  const double target = 1.0 / (params.T * v);
  const GridDomain& dom = wf.domain();
  const auto nodes = wf.density_nodes();
  const std::size_t n = nodes.size();
  const double tol = kTangentTolerance * target;

  // A preimage where the density only touches the target level is a
  // stationary point of |psi|: the Jacobian vanishes there.
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = (i == 0) || nodes[i - 1] <= nodes[i];
    const bool right_ok = (i + 1 == n) || nodes[i + 1] <= nodes[i];
    const bool left_lo = (i == 0) || nodes[i - 1] >= nodes[i];
    const bool right_lo = (i + 1 == n) || nodes[i + 1] >= nodes[i];
    const bool extremum = (left_ok && right_ok) || (left_lo && right_lo);
    if (extremum && i > 0 && i + 1 < n && std::fabs(nodes[i] - target) <= tol) {
      out.flag = PdfFlag::singular;
      out.preimages.push_back(dom.node(i));
      return out;
    }
  }

  auto f = [&](double x) { return wf.density(x) - target; };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double fa = nodes[i] - target;
    const double fb = nodes[i + 1] - target;
    if (fa == 0.0) {
      out.preimages.push_back(dom.node(i));
      continue;
    }
    if ((fa < 0.0) == (fb < 0.0) || fb == 0.0) continue;
    double a = dom.node(i);
    double b = dom.node(i + 1);
    const bool rising = fa < 0.0;
    for (int iter = 0; iter < 100 && b - a > 1e-15 * (1.0 + std::fabs(a)); ++iter) {
      const double mid = 0.5 * (a + b);
      if ((f(mid) < 0.0) == rising) {
        a = mid;
      } else {
        b = mid;
      }
    }
    out.preimages.push_back(0.5 * (a + b));
  }
  if (nodes.back() == target) out.preimages.push_back(dom.x_max());

  if (out.preimages.empty()) {
    out.flag = PdfFlag::no_preimage;
    return out;
  }
  for (double x : out.preimages) {
    const Complex psi = wf.amplitude(x);
    const double modulus = std::abs(psi);
    const double dmod = (std::conj(psi) * wf.derivative(x)).real() / modulus;
    if (std::fabs(dmod) <= kTangentTolerance * modulus / dom.length()) {
      out.flag = PdfFlag::singular;
      out.value = 0.0;
      return out;
    }
    out.value += modulus * modulus * modulus / (2.0 * std::fabs(v * dmod));
  }
  return out;
}

bool EffectivePotentialTable::bounded(std::size_t i) const { return std::isfinite(values[i]); }

double effective_potential_value(double density, const PhysicalParams& params) {
  return -params.m / (2.0 * params.T * params.T) / (density * density);
}

namespace {

EffectivePotentialTable potential_table(const GridDomain& dom, std::span<const double> density,
                                        const PhysicalParams& params, double cutoff) {
  params.validate();
  if (!(cutoff > 0.0)) throw InvalidArgument("density cutoff must be positive");
  EffectivePotentialTable out{dom, std::vector<double>(density.size()), cutoff};
  for (std::size_t i = 0; i < density.size(); ++i) {
    out.values[i] = density[i] >= cutoff ? effective_potential_value(density[i], params)
                                         : -std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace

EffectivePotentialTable effective_potential(const WaveFunction& wf, const PhysicalParams& params,
                                            double cutoff_density) {
  return potential_table(wf.domain(), wf.density_nodes(), params, cutoff_density);
}

EffectivePotentialTable effective_potential_marginal(const MarginalDensity& p, const PhysicalParams& params,
                                                     double cutoff_density) {
  return potential_table(p.domain, p.values, params, cutoff_density);
}

double NewtonResidual::relative() const {
  const double scale = std::max(std::fabs(force), std::fabs(mass_accel));
  return scale > 0.0 ? residual / scale : residual;
}

NewtonResidual newton_residual(const WaveFunction& wf, const PhysicalParams& params, double x, double h,
                               double cutoff_density) {
  params.validate();
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  NewtonResidual out;
  const GridDomain& dom = wf.domain();
  if (!dom.contains(x - h) || !dom.contains(x + h)) return out;
  const double p_lo = wf.density(x - h);
  const double p_hi = wf.density(x + h);
  const double p = wf.density(x);
  if (p_lo < cutoff_density || p_hi < cutoff_density || p < cutoff_density) return out;

  out.evaluable = true;
  out.force = -(effective_potential_value(p_hi, params) - effective_potential_value(p_lo, params)) / (2.0 * h);

  // m dv/dt with v = 1/(T |psi|^2) and dv/dt = -2/(T |psi|^3) d|psi|/dx * v.
  const Complex psi = wf.amplitude(x);
  const double modulus = std::sqrt(p);
  const double dmod = (std::conj(psi) * wf.derivative(x)).real() / modulus;
  const double v = 1.0 / (params.T * p);
  out.mass_accel = -params.m * 2.0 / (params.T * p * modulus) * dmod * v;
  out.residual = std::fabs(out.force - out.mass_accel);
  return out;
}

std::vector<Complex> inverse_momentum_transform(const MomentumAmplitude& phi, const GridDomain& domain) {
  const auto w = simpson_weights(phi.mu.size(), phi.spacing());
  std::vector<Complex> weighted(phi.values.size());
  for (std::size_t k = 0; k < weighted.size(); ++k) weighted[k] = w[k] * phi.values[k];
  const double prefactor = 1.0 / std::sqrt(2.0 * std::numbers::pi * phi.hbar);
  std::vector<Complex> out(domain.size());
  for (std::size_t j = 0; j < domain.size(); ++j) {
    const double x = domain.node(j);
    out[j] = prefactor * phased_sum(weighted, x / phi.hbar, phi.mu.front(), phi.spacing());
  }
  return out;
}

double phase_roundtrip(const WaveFunction& wf, const MomentumAmplitude& phi) {
  const auto back = inverse_momentum_transform(phi, wf.domain());
  const auto psi = wf.amplitude_nodes();
  Complex align{0.0, 0.0};
  for (std::size_t j = 0; j < psi.size(); ++j) align += std::conj(back[j]) * psi[j];
  const Complex rot = std::abs(align) > 0.0 ? align / std::abs(align) : Complex{1.0, 0.0};
  double worst = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) worst = std::max(worst, std::abs(rot * back[j] - psi[j]));
  return worst;
}

}  // namespace qtraj
