#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace koop {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class FlowKind { TorusRotation, Lorenz63, ProductL63Rotation };

struct FlowSpec {
  FlowKind kind = FlowKind::TorusRotation;
  // torus rotation
  double alpha1 = 1.0;
  double alpha2 = std::sqrt(2.0);
  // Lorenz 63
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  // product system: circle speed and observation mixing constant
  double alpha = 1.0;
  double c = 0.2;

  static FlowSpec torus(double a1 = 1.0, double a2 = std::sqrt(2.0));
  static FlowSpec lorenz63(double s = 10.0, double r = 28.0, double b = 8.0 / 3.0);
  static FlowSpec product(double a = 1.0, double c = 0.2);
  static FlowSpec from_name(const std::string& name);

  int state_dim() const;
  int obs_dim() const;
  Vec default_x0() const;
  double default_spinup() const;
  int default_delays() const;
};

struct TrajectoryConfig {
  int n = 0;            // sample count
  double dt = 0.01;     // sampling interval
  Vec x0;               // initial state (empty -> flow default)
  double spinup = -1.0; // time units discarded before sampling (<0 -> flow default)
};

struct Trajectory {
  Mat states;  // state_dim x N
  Mat series;  // obs_dim x N
  double dt = 0.0;
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double wrap_angle(double theta);  // reduce to [0, 2*pi)

Vec flow_torus(const Vec& theta, double t, double alpha1, double alpha2);
Vec l63_vector_field(const Vec& x, double sigma, double rho, double beta);

// Flow image Phi^t(x0). Analytic factors (torus, circle) are advanced
// exactly; the L63 factor is integrated with an adaptive embedded
// Runge-Kutta pair with per-step local error below tol.
Vec integrate(const FlowSpec& flow, const Vec& x0, double t,
              double rtol = 1e-9, double atol = 1e-12);

Vec observe(const FlowSpec& flow, const Vec& x);

Trajectory generate_trajectory(const FlowSpec& flow, const TrajectoryConfig& cfg);

}  // namespace koop
