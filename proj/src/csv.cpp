#include "qtraj/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "qtraj/errors.hpp"

namespace qtraj::csv {

std::string number(double v) {
  if (std::isnan(v)) return "singular";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_trajectory(std::ostream& os, const Trajectory& traj, int member_id, bool header) {
  if (header) os << "t,x,v,member_id\n";
  for (const auto& s : traj.samples) {
    os << number(s.t) << ',' << number(s.x) << ',' << number(s.v) << ',' << member_id << '\n';
  }
}

void write_ensemble(std::ostream& os, const Ensemble& ens) {
  os << "t,x,v,member_id\n";
  for (std::size_t i = 0; i < ens.members.size(); ++i) {
    write_trajectory(os, ens.members[i], static_cast<int>(i), false);
  }
}

void write_t0(std::ostream& os, const Ensemble& ens) {
  os << "member_id,t0\n";
  for (std::size_t i = 0; i < ens.t0.size(); ++i) os << i << ',' << number(ens.t0[i]) << '\n';
}

void write_marginal(std::ostream& os, const MarginalDensity& p) {
  os << "x,p\n";
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    os << number(p.domain.node(i)) << ',' << number(p.values[i]) << '\n';
  }
}

void write_momentum(std::ostream& os, const MomentumAmplitude& phi) {
  os << "mu,re,im,abs2\n";
  for (std::size_t k = 0; k < phi.mu.size(); ++k) {
    const Complex z = phi.values[k];
    os << number(phi.mu[k]) << ',' << number(z.real()) << ',' << number(z.imag()) << ',' << number(std::norm(z))
       << '\n';
  }
}

void write_potential(std::ostream& os, const EffectivePotentialTable& vbar) {
  os << "x,vbar\n";
  for (std::size_t i = 0; i < vbar.values.size(); ++i) {
    os << number(vbar.domain.node(i)) << ',' << number(vbar.values[i]) << '\n';
  }
}

void write_comparison(std::ostream& os, const DivergenceReport& report) {
  os << "t,x_classical,x_bohm,gap\n";
  for (const auto& r : report.rows) {
    os << number(r.t) << ',' << number(r.x_classical) << ',' << number(r.x_bohm) << ',' << number(r.gap) << '\n';
  }
}

void write_histogram(std::ostream& os, const Histogram& h, const DensityFunction& target) {
  os << "bin_lo,bin_hi,count,density,target\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    os << number(h.edges[i]) << ',' << number(h.edges[i + 1]) << ',' << h.counts[i] << ',' << number(h.density(i))
       << ',' << number(target(h.center(i))) << '\n';
  }
}

Samples read_state_samples(std::istream& is, const std::string& source) {
  Samples out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream fields(line);
    double x = 0.0;
    double re = 0.0;
    double im = 0.0;
    if (!(fields >> x)) {
      if (out.x.empty()) continue;  // header row
      throw InvalidArgument(source + ":" + std::to_string(line_no) + ": expected numeric columns x, re, im");
    }
    if (!(fields >> re >> im)) {
      throw InvalidArgument(source + ":" + std::to_string(line_no) + ": expected three columns x, re, im");
    }
    out.x.push_back(x);
    out.values.emplace_back(re, im);
  }
  return out;
}

}  // namespace qtraj::csv
