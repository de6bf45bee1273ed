#include "nlwlab/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace nlwlab {

namespace {

int small_integer_power(double p) {
  const double n = std::round(p);
  if (std::abs(p - n) < 1e-15 && n >= 1.0 && n <= 9.0) return static_cast<int>(n);
  return 0;
}

double ipow(double x, int n) {
  double y = x;
  for (int k = 1; k < n; ++k) y *= x;
  return y;
}

// Geometric coefficients of the flux-form Laplacian for one grid.
struct Stencil {
  std::vector<double> a;      // r^{d-1} at half nodes i+1/2, i = 0..N-1
  std::vector<double> w;      // cell volume / dr at nodes 0..N
  std::vector<double> inv_w;  // 1 / (dr^2 w_i)

  Stencil(std::size_t nodes, double dr, int d) : a(nodes - 1), w(nodes), inv_w(nodes) {
    for (std::size_t i = 0; i + 1 < nodes; ++i) a[i] = std::pow((i + 0.5) * dr, d - 1);
    w[0] = std::pow(0.5 * dr, d) / (d * dr);
    for (std::size_t i = 1; i < nodes; ++i) {
      const double r = static_cast<double>(i) * dr;
      w[i] = (std::pow(r + 0.5 * dr, d) - std::pow(r - 0.5 * dr, d)) / (d * dr);
    }
    for (std::size_t i = 0; i < nodes; ++i) inv_w[i] = 1.0 / (dr * dr * w[i]);
  }
};

class Integrator {
 public:
  Integrator(std::size_t nodes, double dr, const ModelParams& m, bool nonlinear)
      : st_(nodes, dr, m.d), m_(m), nonlinear_(nonlinear), ip_(small_integer_power(m.p)),
        k_phi_(4, std::vector<double>(nodes)), k_pi_(4, std::vector<double>(nodes)),
        tmp_phi_(nodes), tmp_pi_(nodes) {}

  void rates(const std::vector<double>& phi, const std::vector<double>& pi, std::vector<double>& dphi,
             std::vector<double>& dpi) const {
    const std::size_t n = phi.size();
    const std::size_t last = n - 1;
    double flux_lo = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
      const double flux_hi = st_.a[i] * (phi[i + 1] - phi[i]);
      double acc = (flux_hi - flux_lo) * st_.inv_w[i];
      if (nonlinear_) acc -= force(phi[i]);
      dpi[i] = acc;
      dphi[i] = pi[i];
      flux_lo = flux_hi;
    }
    dphi[last] = 0.0;
    dpi[last] = 0.0;
  }

  void step(std::vector<double>& phi, std::vector<double>& pi, double dt) {
    const std::size_t n = phi.size();
    rates(phi, pi, k_phi_[0], k_pi_[0]);
    for (int s = 1; s < 4; ++s) {
      const double c = (s == 3 ? 1.0 : 0.5) * dt;
      for (std::size_t i = 0; i < n; ++i) {
        tmp_phi_[i] = phi[i] + c * k_phi_[s - 1][i];
        tmp_pi_[i] = pi[i] + c * k_pi_[s - 1][i];
      }
      rates(tmp_phi_, tmp_pi_, k_phi_[s], k_pi_[s]);
    }
    const double h6 = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      phi[i] += h6 * (k_phi_[0][i] + 2.0 * k_phi_[1][i] + 2.0 * k_phi_[2][i] + k_phi_[3][i]);
      pi[i] += h6 * (k_pi_[0][i] + 2.0 * k_pi_[1][i] + 2.0 * k_pi_[2][i] + k_pi_[3][i]);
    }
  }

  const Stencil& stencil() const { return st_; }

 private:
  double force(double x) const {
    if (ip_ > 0) {
      const double y = ipow(std::abs(x), ip_);
      return x < 0 ? -y : y;
    }
    return nonlinearity(x, m_.p);
  }

  Stencil st_;
  ModelParams m_;
  bool nonlinear_;
  int ip_;
  std::vector<std::vector<double>> k_phi_, k_pi_;
  std::vector<double> tmp_phi_, tmp_pi_;
};

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_cfl(double dt, double dr, int d) {
  const double c = std::abs(dt) / dr;
  if (!(c > 0.0) || c > max_cfl(d) * (1.0 + 1e-12))
    throw InvalidArgument(fmt::format(
        "evolve: |dt|/dr = {} violates the CFL bound 0 < |dt|/dr <= {} (d = {})", c, max_cfl(d), d));
}

}  // namespace

double nonlinearity(double x, double p) {
  if (x == 0.0) return 0.0;
  const double y = std::exp(p * std::log(std::abs(x)));
  return x < 0 ? -y : y;
}

double potential(double x, double p) {
  if (x == 0.0) return 0.0;
  return std::exp((p + 1.0) * std::log(std::abs(x))) / (p + 1.0);
}

double max_cfl(int d) { return std::min(0.5, 1.4 / std::sqrt(static_cast<double>(d))); }

StateRates rhs(const SolverState& s, const ModelParams& m, bool nonlinear) {
  s.check();
  Integrator in(s.nodes(), s.dr, m, nonlinear);
  StateRates out{std::vector<double>(s.nodes()), std::vector<double>(s.nodes())};
  in.rates(s.phi, s.pi, out.dphi, out.dpi);
  return out;
}

double discrete_energy(const SolverState& s, const ModelParams& m, bool nonlinear) {
  s.check();
  const Stencil st(s.nodes(), s.dr, m.d);
  const std::size_t last = s.nodes() - 1;
  double e = 0.0;
  for (std::size_t i = 0; i < last; ++i) {
    double v = s.pi[i] * s.pi[i];
    if (nonlinear) v += 2.0 * potential(s.phi[i], m.p);
    e += st.w[i] * s.dr * v;
    const double g = (s.phi[i + 1] - s.phi[i]) / s.dr;
    e += st.a[i] * s.dr * g * g;
  }
  return sphere_area(m.d) * e;
}

std::vector<double> scheme_residual(const SolverState& s, const ModelParams& m) {
  s.check();
  const std::size_t n = s.nodes();
  std::vector<double> out(n, 0.0);
  if (n < 5) return out;
  const Stencil st(n, s.dr, m.d);
  const double h = s.dr, d = m.d;
  const auto& f = s.phi;
  auto at = [&](long i) { return f[static_cast<std::size_t>(std::labs(i))]; };  // even extension
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const double lo = i > 0 ? st.a[i - 1] * (f[i] - f[i - 1]) : 0.0;
    const double flux = (st.a[i] * (f[i + 1] - f[i]) - lo) * st.inv_w[i];
    const long k = static_cast<long>(i);
    const double frr = (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * at(k) + 16.0 * at(k - 1) - at(k - 2)) / (12.0 * h * h);
    double lap = d * frr;
    if (i > 0) lap = frr + (d - 1) / s.r(i) * (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h);
    out[i] = flux - lap;
  }
  return out;
}

double support_radius(const SolverState& s, double rel) {
  double peak = 0.0;
  for (std::size_t i = 0; i < s.nodes(); ++i)
    peak = std::max({peak, std::abs(s.phi[i]), std::abs(s.pi[i])});
  if (peak == 0.0) return 0.0;
  const double cut = rel * peak;
  for (std::size_t i = s.nodes(); i-- > 0;)
    if (std::abs(s.phi[i]) > cut || std::abs(s.pi[i]) > cut) return s.r(i);
  return 0.0;
}

std::vector<double> radial_derivative(const SolverState& s) {
  const std::size_t n = s.nodes();
  const double h12 = 12.0 * s.dr;
  const auto& f = s.phi;
  std::vector<double> g(n, 0.0);
  if (n < 5) {
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * s.dr);
    if (n >= 2) g[n - 1] = (f[n - 1] - f[n - 2]) / s.dr;
    return g;
  }
  // even extension f(-r) = f(r) at the origin
  g[1] = (-f[3] + 8.0 * f[2] - 8.0 * f[0] + f[1]) / h12;
  for (std::size_t i = 2; i + 2 < n; ++i) g[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / h12;
  const std::size_t k = n - 1;
  g[k - 1] = (3.0 * f[k] + 10.0 * f[k - 1] - 18.0 * f[k - 2] + 6.0 * f[k - 3] - f[k - 4]) / h12;
  g[k] = (25.0 * f[k] - 48.0 * f[k - 1] + 36.0 * f[k - 2] - 16.0 * f[k - 3] + 3.0 * f[k - 4]) / h12;
  return g;
}

SolverState advance(SolverState s, const ModelParams& m, double dt, std::size_t n_steps,
                    bool nonlinear) {
  s.check();
  if (n_steps == 0) return s;
  check_cfl(dt, s.dr, m.d);
  Integrator in(s.nodes(), s.dr, m, nonlinear);
  for (std::size_t k = 0; k < n_steps; ++k) {
    in.step(s.phi, s.pi, dt);
    if ((k + 1) % 16 == 0 && !all_finite(s.phi))
      throw BlowUpError(fmt::format("non-finite field at t = {}", s.t + (k + 1) * dt), s.t + (k + 1) * dt);
  }
  s.t += static_cast<double>(n_steps) * dt;
  if (!all_finite(s.phi) || !all_finite(s.pi))
    throw BlowUpError(fmt::format("non-finite field at t = {}", s.t), s.t);
  return s;
}

EvolveResult evolve(const SolverState& initial, const ModelParams& m, const EvolveOptions& opt) {
  initial.check();
  if (m.d < 3) throw InvalidArgument("evolve: d must be >= 3");
  check_cfl(opt.dt, initial.dr, m.d);
  if (opt.record_every == 0 || opt.record_stride == 0)
    throw InvalidArgument("evolve: record_every and record_stride must be positive");
  if (opt.keep_record && opt.n_steps % opt.record_every != 0)
    throw InvalidArgument(fmt::format("evolve: n_steps = {} is not a multiple of record_every = {}",
                                      opt.n_steps, opt.record_every));

  SolverState s = initial;
  const std::size_t n = s.nodes();
  Integrator in(n, s.dr, m, opt.nonlinear);

  EvolveResult res;
  SpacetimeRecord& rec = res.record;
  rec.model = m;
  rec.nonlinear = opt.nonlinear;
  rec.t0 = s.t;
  rec.dr_solver = s.dr;
  rec.dt_solver = opt.dt;
  rec.r_max = s.r_max;
  rec.record_every = opt.record_every;
  rec.record_stride = opt.record_stride;
  rec.dt_rec = opt.dt * static_cast<double>(opt.record_every);
  rec.dr_rec = s.dr * static_cast<double>(opt.record_stride);
  rec.nr = (n - 1) / opt.record_stride + 1;
  rec.support_radius = support_radius(s);
  rec.causal_margin = opt.causal_margin >= 0.0 ? opt.causal_margin : std::max(1.0, 20.0 * s.dr);

  auto push = [&]() {
    const auto g = radial_derivative(s);
    const auto res = scheme_residual(s, m);
    for (std::size_t i = 0; i < rec.nr; ++i) {
      const std::size_t k = i * opt.record_stride;
      rec.phi.push_back(s.phi[k]);
      rec.dphi_dt.push_back(s.pi[k]);
      rec.dphi_dr.push_back(g[k]);
      rec.residual.push_back(res[k]);
    }
    ++rec.nt;
  };

  std::vector<bool> taken(opt.snapshot_times.size(), false);
  auto snap = [&](std::size_t step) {
    for (std::size_t q = 0; q < opt.snapshot_times.size(); ++q) {
      if (taken[q]) continue;
      const double target = opt.snapshot_times[q];
      const double tn = initial.t + static_cast<double>(step) * opt.dt;
      if (std::abs(tn - target) <= 0.5 * std::abs(opt.dt) * (1.0 + 1e-9)) {
        rec.snapshots.push_back(s);
        taken[q] = true;
      }
    }
  };

  if (opt.keep_record) {
    const std::size_t frames = opt.n_steps / opt.record_every + 1;
    rec.phi.reserve(frames * rec.nr);
    rec.dphi_dt.reserve(frames * rec.nr);
    rec.dphi_dr.reserve(frames * rec.nr);
    rec.residual.reserve(frames * rec.nr);
    push();
  }
  snap(0);
  for (std::size_t k = 1; k <= opt.n_steps; ++k) {
    in.step(s.phi, s.pi, opt.dt);
    s.t = initial.t + static_cast<double>(k) * opt.dt;
    const bool frame = opt.keep_record && k % opt.record_every == 0;
    if ((frame || k % 16 == 0 || k == opt.n_steps) && !(all_finite(s.phi) && all_finite(s.pi)))
      throw BlowUpError(fmt::format("non-finite field at t = {}", s.t), s.t);
    if (frame) push();
    snap(k);
  }
  if (!opt.keep_record) {
    rec.nt = 0;
  }
  res.state = std::move(s);
  return res;
}

}  // namespace nlwlab
