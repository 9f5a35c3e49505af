#include "qtraj/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qtraj/errors.hpp"
#include "qtraj/interpolation.hpp"

namespace qtraj {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kOrthoTolerance = 1e-6;

std::string fmt_x(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

void PhysicalParams::validate() const {
  if (!(m > 0.0) || !(hbar > 0.0) || !(T > 0.0) || !(c > 0.0)) {
    throw InvalidArgument("physical parameters m, hbar, T, c must all be strictly positive");
  }
}

struct WaveFunction::Model {
  GridDomain domain;
  Amplitude amplitude;
  Amplitude derivative;
  std::string label;
  DerivativeKind kind;
  double scale = 1.0;
  std::vector<double> density_nodes;
};

WaveFunction::WaveFunction(GridDomain domain, Amplitude amplitude, Amplitude derivative,
                           std::string label, DerivativeKind kind) {
  if (!amplitude || !derivative) throw InvalidArgument("wavefunction needs amplitude and derivative");
  auto model = std::make_shared<Model>(Model{domain, std::move(amplitude), std::move(derivative),
                                             std::move(label), kind, 1.0, {}});
  std::vector<double> raw(domain.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Complex a = model->amplitude(domain.node(i));
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InvalidArgument("amplitude is not finite at x = " + fmt_x(domain.node(i)));
    }
    raw[i] = std::norm(a);
  }
  const double norm = simpson(raw, domain.spacing());
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("wavefunction '" + model->label + "' has zero or non-finite norm");
  }
  model->scale = 1.0 / std::sqrt(norm);
  const double s2 = model->scale * model->scale;
  model->density_nodes.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    model->density_nodes[i] = s2 * std::norm(model->amplitude(domain.node(i)));
  }
  model_ = std::move(model);
}

WaveFunction::WaveFunction(std::shared_ptr<const Model> model, Complex phase)
    : model_(std::move(model)), phase_(phase) {}

const GridDomain& WaveFunction::domain() const { return model_->domain; }
const std::string& WaveFunction::label() const { return model_->label; }
WaveFunction::DerivativeKind WaveFunction::derivative_kind() const { return model_->kind; }

void WaveFunction::check(double x) const {
  if (!model_->domain.contains(x)) {
    throw OutOfDomain("x = " + fmt_x(x) + " outside [" + fmt_x(model_->domain.x_min()) + ", " +
                      fmt_x(model_->domain.x_max()) + "] for state '" + model_->label + "'");
  }
}

Complex WaveFunction::amplitude(double x) const {
  check(x);
  return phase_ * (model_->scale * model_->amplitude(x));
}

Complex WaveFunction::derivative(double x) const {
  check(x);
  return phase_ * (model_->scale * model_->derivative(x));
}

double WaveFunction::density(double x) const {
  check(x);
  return model_->scale * model_->scale * std::norm(model_->amplitude(x));
}

std::span<const double> WaveFunction::density_nodes() const { return model_->density_nodes; }

std::vector<Complex> WaveFunction::amplitude_nodes() const {
  std::vector<Complex> out(domain().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = amplitude(domain().node(i));
  return out;
}

WaveFunction WaveFunction::with_global_phase(double theta) const {
  return WaveFunction(model_, phase_ * std::polar(1.0, theta));
}

Density::Density(GridDomain domain, std::function<double(double)> evaluate,
                 std::vector<double> nodes, std::string label)
    : domain_(domain),
      evaluate_(std::move(evaluate)),
      nodes_(std::make_shared<const std::vector<double>>(std::move(nodes))),
      label_(std::move(label)) {
  if (nodes_->size() != domain_.size()) throw InvalidArgument("density node table does not match grid");
  for (double p : *nodes_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("density must be finite and non-negative");
  }
}

Density::Density(const WaveFunction& wf)
    : Density(
          wf.domain(), [wf](double x) { return wf.density(x); },
          std::vector<double>(wf.density_nodes().begin(), wf.density_nodes().end()), wf.label()) {}

double Density::operator()(double x) const {
  if (!domain_.contains(x)) {
    throw OutOfDomain("x = " + fmt_x(x) + " outside density domain '" + label_ + "'");
  }
  return evaluate_(x);
}

TimeDependentWaveFunction::TimeDependentWaveFunction(std::vector<Component> components, double hbar)
    : components_(std::move(components)), hbar_(hbar) {
  if (components_.empty()) throw InvalidArgument("superposition needs at least one component");
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
}

Complex TimeDependentWaveFunction::amplitude(double x, double t) const {
  Complex sum{0.0, 0.0};
  for (const auto& c : components_) {
    sum += c.coefficient * c.state.amplitude(x) * std::polar(1.0, -c.energy * t / hbar_);
  }
  return sum;
}

Complex TimeDependentWaveFunction::derivative(double x, double t) const {
  Complex sum{0.0, 0.0};
  for (const auto& c : components_) {
    sum += c.coefficient * c.state.derivative(x) * std::polar(1.0, -c.energy * t / hbar_);
  }
  return sum;
}

double TimeDependentWaveFunction::density(double x, double t) const {
  return std::norm(amplitude(x, t));
}

WaveFunction box_eigenstate(int n, double L, BoxConvention convention, std::size_t n_points) {
  if (n < 1) throw InvalidArgument("box eigenstate index must be >= 1, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("box length must be positive");

  const double amp = std::sqrt(2.0 / L);
  const double k = static_cast<double>(n) * std::numbers::pi / L;
  const double nd = static_cast<double>(n);
  std::string label = "box n=" + std::to_string(n);

  if (convention == BoxConvention::wall) {
    auto psi = [=](double x) { return Complex{amp * sin_pi(nd * x / L), 0.0}; };
    auto dpsi = [=](double x) { return Complex{amp * k * cos_pi(nd * x / L), 0.0}; };
    return WaveFunction(GridDomain(0.0, L, n_points), psi, dpsi, label + " wall");
  }

  const GridDomain domain(-0.5 * L, 0.5 * L, n_points);
  label += " centered";
  if (n % 2 == 1) {
    auto psi = [=](double x) { return Complex{amp * cos_pi(nd * x / L), 0.0}; };
    auto dpsi = [=](double x) { return Complex{-amp * k * sin_pi(nd * x / L), 0.0}; };
    return WaveFunction(domain, psi, dpsi, label);
  }
  auto psi = [=](double x) { return Complex{amp * sin_pi(nd * x / L), 0.0}; };
  auto dpsi = [=](double x) { return Complex{amp * k * cos_pi(nd * x / L), 0.0}; };
  return WaveFunction(domain, psi, dpsi, label);
}

double box_energy(int n, double L, const PhysicalParams& params) {
  const double nd = static_cast<double>(n);
  return nd * nd * std::numbers::pi * std::numbers::pi * params.hbar * params.hbar /
         (2.0 * params.m * L * L);
}

WaveFunction plane_wave(double k, double L, std::size_t n_points) {
  if (!(L > 0.0)) throw InvalidArgument("plane wave box length must be positive");
  const double amp = 1.0 / std::sqrt(L);
  auto psi = [=](double x) { return std::polar(amp, k * x); };
  auto dpsi = [=](double x) { return Complex{0.0, k} * std::polar(amp, k * x); };
  std::ostringstream label;
  label << "plane wave k=" << k;
  return WaveFunction(GridDomain(0.0, L, n_points), psi, dpsi, label.str());
}

Complex overlap(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.domain() == b.domain())) throw InvalidArgument("overlap requires a shared grid domain");
  const auto pa = a.amplitude_nodes();
  const auto pb = b.amplitude_nodes();
  std::vector<double> re(pa.size());
  std::vector<double> im(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const Complex z = std::conj(pa[i]) * pb[i];
    re[i] = z.real();
    im[i] = z.imag();
  }
  const double h = a.domain().spacing();
  return {simpson(re, h), simpson(im, h)};
}

TimeDependentWaveFunction superposition(std::vector<WaveFunction> states, std::vector<Complex> coeffs,
                                        std::vector<double> energies, double hbar) {
  if (states.empty() || states.size() != coeffs.size() || states.size() != energies.size()) {
    throw InvalidArgument("superposition needs equal, non-zero numbers of states, coefficients and energies");
  }
  double weight = 0.0;
  for (const auto& c : coeffs) weight += std::norm(c);
  if (std::fabs(weight - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os.precision(12);
    os << "superposition coefficients must satisfy sum |c|^2 = 1, got " << weight;
    throw InvalidArgument(os.str());
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!std::isfinite(energies[i])) throw InvalidArgument("component energy must be finite");
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      if (!(states[i].domain() == states[j].domain())) {
        throw InvalidArgument("superposition components must share one grid domain");
      }
      if (std::abs(overlap(states[i], states[j])) > kOrthoTolerance) {
        throw InvalidArgument("superposition components " + std::to_string(i) + " and " +
                              std::to_string(j) + " are not orthogonal");
      }
    }
  }
  std::vector<Component> components;
  components.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    components.push_back({std::move(states[i]), coeffs[i], energies[i]});
  }
  return TimeDependentWaveFunction(std::move(components), hbar);
}

WaveFunction tabulated(std::vector<double> x, std::vector<Complex> values, std::string label) {
  if (x.size() != values.size()) throw InvalidArgument("tabulated state: position and value counts differ");
  if (x.size() < kMinGridPoints) {
    throw InvalidArgument("tabulated state needs at least " + std::to_string(kMinGridPoints) +
                          " samples, got " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i + 1] > x[i])) {
      throw InvalidArgument("tabulated positions must be strictly increasing (sample " +
                            std::to_string(i + 1) + ")");
    }
  }
  bool any = false;
  std::vector<double> re(values.size());
  std::vector<double> im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
    if (!std::isfinite(re[i]) || !std::isfinite(im[i])) throw InvalidArgument("tabulated value is not finite");
    any = any || values[i] != Complex{};
  }
  if (!any) throw InvalidArgument("tabulated state is identically zero");

  const GridDomain domain(x.front(), x.back(), x.size());
  auto re_fit = std::make_shared<const MonotoneCubic>(x, std::move(re));
  auto im_fit = std::make_shared<const MonotoneCubic>(std::move(x), std::move(im));
  auto psi = [re_fit, im_fit](double at) { return Complex{(*re_fit)(at), (*im_fit)(at)}; };
  auto dpsi = [re_fit, im_fit](double at) {
    return Complex{re_fit->derivative(at), im_fit->derivative(at)};
  };
  return WaveFunction(domain, psi, dpsi, std::move(label), WaveFunction::DerivativeKind::interpolated);
}

double density(const WaveFunction& wf, double x) { return wf.density(x); }

}  // namespace qtraj
