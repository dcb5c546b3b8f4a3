#include "dynamics.hpp"

#include <cmath>
#include <limits>

namespace koop {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

FlowSpec FlowSpec::torus(double a1, double a2) {
  FlowSpec f;
  f.kind = FlowKind::TorusRotation;
  f.alpha1 = a1;
  f.alpha2 = a2;
  return f;
}

FlowSpec FlowSpec::lorenz63(double s, double r, double b) {
  FlowSpec f;
  f.kind = FlowKind::Lorenz63;
  f.sigma = s;
  f.rho = r;
  f.beta = b;
  return f;
}

FlowSpec FlowSpec::product(double a, double c) {
  FlowSpec f;
  f.kind = FlowKind::ProductL63Rotation;
  f.alpha = a;
  f.c = c;
  return f;
}

FlowSpec FlowSpec::from_name(const std::string& name) {
  if (name == "torus") return torus();
  if (name == "l63" || name == "lorenz63") return lorenz63();
  if (name == "product") return product();
  throw std::invalid_argument("unknown flow kind: " + name);
}

int FlowSpec::state_dim() const {
  switch (kind) {
    case FlowKind::TorusRotation: return 2;
    case FlowKind::Lorenz63: return 3;
    case FlowKind::ProductL63Rotation: return 4;
  }
  return 0;
}

int FlowSpec::obs_dim() const {
  switch (kind) {
    case FlowKind::TorusRotation: return 1;
    case FlowKind::Lorenz63: return 3;
    case FlowKind::ProductL63Rotation: return 3;
  }
  return 0;
}

Vec FlowSpec::default_x0() const {
  Vec x(state_dim());
  switch (kind) {
    case FlowKind::TorusRotation: x << 0.0, 0.0; break;
    case FlowKind::Lorenz63: x << 0.0, 1.0, 1.05; break;
    case FlowKind::ProductL63Rotation: x << 0.0, 1.0, 1.05, 0.0; break;
  }
  return x;
}

double FlowSpec::default_spinup() const {
  return kind == FlowKind::TorusRotation ? 0.0 : 4000.0;
}

int FlowSpec::default_delays() const {
  switch (kind) {
    case FlowKind::TorusRotation: return 5;
    case FlowKind::Lorenz63: return 2;
    case FlowKind::ProductL63Rotation: return 10;
  }
  return 1;
}

Vec flow_torus(const Vec& theta, double t, double alpha1, double alpha2) {
  Vec out(2);
  out[0] = wrap_angle(theta[0] + alpha1 * t);
  out[1] = wrap_angle(theta[1] + alpha2 * t);
  return out;
}

Vec l63_vector_field(const Vec& x, double sigma, double rho, double beta) {
  Vec v(3);
  v[0] = sigma * (x[1] - x[0]);
  v[1] = x[0] * (rho - x[2]) - x[1];
  v[2] = x[0] * x[1] - beta * x[2];
  return v;
}

namespace {

// Dormand-Prince 5(4) embedded pair.
Vec dopri5(const FlowSpec& flow, Vec x, double t_final, double rtol, double atol) {
  if (t_final == 0.0) return x;
  const double sigma = flow.sigma, rho = flow.rho, beta = flow.beta;
  auto f = [&](const Vec& y) { return l63_vector_field(y, sigma, rho, beta); };

  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = 0.0;
  double h = std::min(1e-3, t_final);
  Vec k1 = f(x);
  int steps = 0;
  const int max_steps = 100000000;
  while (t < t_final) {
    if (++steps > max_steps)
      throw IntegrationError("integration failure: step limit exceeded");
    if (t + h > t_final) h = t_final - t;
    Vec k2 = f(x + h * (a21 * k1));
    Vec k3 = f(x + h * (a31 * k1 + a32 * k2));
    Vec k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec k7 = f(xn);  // FSAL
    Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double errnorm = 0.0;
    for (int i = 0; i < 3; ++i) {
      double sc = atol + rtol * std::max(std::abs(x[i]), std::abs(xn[i]));
      errnorm = std::max(errnorm, std::abs(err[i]) / sc);
    }
    if (errnorm <= 1.0) {
      t += h;
      x = xn;
      k1 = k7;
      if (!x.allFinite())
        throw IntegrationError("integration failure: non-finite state");
    }
    double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
    h *= std::min(5.0, std::max(0.2, fac));
    if (h < 1e-14 * std::max(1.0, t))
      throw IntegrationError("integration failure: step size underflow");
  }
  return x;
}

}  // namespace

Vec integrate(const FlowSpec& flow, const Vec& x0, double t, double rtol, double atol) {
  switch (flow.kind) {
    case FlowKind::TorusRotation:
      return flow_torus(x0, t, flow.alpha1, flow.alpha2);
    case FlowKind::Lorenz63:
      return dopri5(flow, x0, t, rtol, atol);
    case FlowKind::ProductL63Rotation: {
      Vec out(4);
      out.head(3) = dopri5(FlowSpec::lorenz63(flow.sigma, flow.rho, flow.beta),
                           x0.head(3), t, rtol, atol);
      out[3] = wrap_angle(x0[3] + flow.alpha * t);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec observe(const FlowSpec& flow, const Vec& x) {
  switch (flow.kind) {
    case FlowKind::TorusRotation: {
      Vec y(1);
      y[0] = std::sin(x[0]) * std::cos(x[1]);
      return y;
    }
    case FlowKind::Lorenz63:
      return x;
    case FlowKind::ProductL63Rotation: {
      Vec y(3);
      double th = x[3];
      y[0] = x[0] + flow.c * std::sin(th);
      y[1] = x[1] + flow.c * std::cos(2.0 * th);
      y[2] = x[2] + flow.c * std::sin(2.0 * th);
      return y;
    }
  }
  throw std::logic_error("unreachable");
}

Trajectory generate_trajectory(const FlowSpec& flow, const TrajectoryConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("trajectory length must be >= 2");
  if (cfg.dt <= 0.0) throw std::invalid_argument("dt must be positive");
  double spinup = cfg.spinup < 0.0 ? flow.default_spinup() : cfg.spinup;
  Vec x = cfg.x0.size() > 0 ? cfg.x0 : flow.default_x0();
  if (x.size() != flow.state_dim())
    throw std::invalid_argument("initial state dimension mismatch");

  if (spinup > 0.0) {
    // Spinup in chunks keeps the adaptive integrator state well-scaled
    // and re-wraps angular coordinates along the way.
    double remaining = spinup;
    const double chunk = 100.0;
    while (remaining > 0.0) {
      double step = std::min(chunk, remaining);
      x = integrate(flow, x, step);
      remaining -= step;
    }
  }

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.states.resize(flow.state_dim(), cfg.n);
  traj.series.resize(flow.obs_dim(), cfg.n);
  traj.states.col(0) = x;
  traj.series.col(0) = observe(flow, x);
  for (int i = 1; i < cfg.n; ++i) {
    x = integrate(flow, x, cfg.dt);
    traj.states.col(i) = x;
    traj.series.col(i) = observe(flow, x);
  }
  return traj;
}

}  // namespace koop
