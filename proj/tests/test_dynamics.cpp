#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dynamics.hpp"

using namespace koop;

namespace {

// Classic fixed-step RK4, used as an independent oracle for the adaptive
// integrator.
Vec rk4_l63(const FlowSpec& flow, Vec x, double t_final, double h) {
  auto f = [&](const Vec& y) {
    return l63_vector_field(y, flow.sigma, flow.rho, flow.beta);
  };
  const int steps = static_cast<int>(std::llround(t_final / h));
  for (int s = 0; s < steps; ++s) {
    Vec k1 = f(x);
    Vec k2 = f(x + 0.5 * h * k1);
    Vec k3 = f(x + 0.5 * h * k2);
    Vec k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST_CASE("wrap_angle reduces to [0, 2pi)") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(2.0 * M_PI) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(wrap_angle(-0.5) == doctest::Approx(2.0 * M_PI - 0.5));
  CHECK(wrap_angle(7.0 * M_PI) == doctest::Approx(M_PI));
  for (double t : {-100.0, -1.0, 0.3, 9.99, 1234.5}) {
    const double w = wrap_angle(t);
    CHECK(w >= 0.0);
    CHECK(w < 2.0 * M_PI);
    CHECK(std::abs(std::sin(w) - std::sin(t)) < 1e-10);
  }
}

TEST_CASE("torus rotation advances angles linearly") {
  const FlowSpec flow = FlowSpec::torus();
  Vec x0(2);
  x0 << 0.3, 1.2;
  const Vec x1 = integrate(flow, x0, 2.5);
  CHECK(x1[0] == doctest::Approx(wrap_angle(0.3 + 2.5)).epsilon(1e-14));
  CHECK(x1[1] == doctest::Approx(wrap_angle(1.2 + std::sqrt(2.0) * 2.5)).epsilon(1e-14));
}

TEST_CASE("torus flow satisfies the group property") {
  const FlowSpec flow = FlowSpec::torus();
  Vec x0(2);
  x0 << 5.1, 0.7;
  const Vec a = integrate(flow, integrate(flow, x0, 1.7), 3.9);
  const Vec b = integrate(flow, x0, 1.7 + 3.9);
  CHECK((a - b).norm() < 1e-12);
}

TEST_CASE("torus observable matches the closed form") {
  const FlowSpec flow = FlowSpec::torus();
  TrajectoryConfig cfg;
  cfg.n = 100;
  cfg.dt = 0.01;
  const Trajectory traj = generate_trajectory(flow, cfg);
  for (int i = 0; i < cfg.n; ++i) {
    const double t = i * cfg.dt;
    CHECK(traj.series(0, i) ==
          doctest::Approx(std::sin(t) * std::cos(std::sqrt(2.0) * t)).epsilon(1e-12));
  }
}

TEST_CASE("adaptive L63 integration matches a fine fixed-step RK4 oracle") {
  const FlowSpec flow = FlowSpec::lorenz63();
  Vec x0(3);
  x0 << 1.0, 1.0, 1.0;
  const Vec adaptive = integrate(flow, x0, 0.5);
  const Vec oracle = rk4_l63(flow, x0, 0.5, 1e-5);
  CHECK((adaptive - oracle).norm() / oracle.norm() < 1e-8);
}

TEST_CASE("L63 trajectory stays on the attractor after spinup") {
  const FlowSpec flow = FlowSpec::lorenz63();
  TrajectoryConfig cfg;
  cfg.n = 500;
  cfg.dt = 0.01;
  cfg.spinup = 50.0;
  const Trajectory traj = generate_trajectory(flow, cfg);
  CHECK(traj.states.row(0).cwiseAbs().maxCoeff() < 25.0);
  CHECK(traj.states.row(1).cwiseAbs().maxCoeff() < 35.0);
  CHECK(traj.states.row(2).minCoeff() > 0.0);
  CHECK(traj.states.row(2).maxCoeff() < 55.0);
}

TEST_CASE("product system couples an exact circle factor to L63") {
  const FlowSpec flow = FlowSpec::product();
  Vec x0(4);
  x0 << 1.0, 1.0, 1.0, 0.25;
  const Vec x1 = integrate(flow, x0, 0.3);
  CHECK(x1[3] == doctest::Approx(wrap_angle(0.25 + 0.3)).epsilon(1e-14));
  const Vec l63_only =
      integrate(FlowSpec::lorenz63(), Vec(x0.head(3)), 0.3);
  CHECK((x1.head(3) - l63_only).norm() < 1e-12);

  const Vec y = observe(flow, x1);
  const double th = x1[3];
  CHECK(y[0] == doctest::Approx(x1[0] + 0.2 * std::sin(th)).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(x1[1] + 0.2 * std::cos(2.0 * th)).epsilon(1e-14));
  CHECK(y[2] == doctest::Approx(x1[2] + 0.2 * std::sin(2.0 * th)).epsilon(1e-14));
}

TEST_CASE("trajectory generation is deterministic") {
  const FlowSpec flow = FlowSpec::lorenz63();
  TrajectoryConfig cfg;
  cfg.n = 200;
  cfg.dt = 0.01;
  cfg.spinup = 10.0;
  const Trajectory a = generate_trajectory(flow, cfg);
  const Trajectory b = generate_trajectory(flow, cfg);
  CHECK((a.series - b.series).norm() == 0.0);
}

TEST_CASE("longer runs share the same orbit prefix") {
  const FlowSpec flow = FlowSpec::lorenz63();
  TrajectoryConfig small, large;
  small.n = 100;
  large.n = 300;
  small.dt = large.dt = 0.01;
  small.spinup = large.spinup = 5.0;
  const Trajectory a = generate_trajectory(flow, small);
  const Trajectory b = generate_trajectory(flow, large);
  CHECK((a.series - b.series.leftCols(100)).norm() == 0.0);
}

TEST_CASE("invalid trajectory configs are rejected") {
  const FlowSpec flow = FlowSpec::torus();
  TrajectoryConfig cfg;
  cfg.n = 1;
  CHECK_THROWS_AS(generate_trajectory(flow, cfg), std::invalid_argument);
  cfg.n = 10;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(generate_trajectory(flow, cfg), std::invalid_argument);
  cfg.dt = 0.01;
  cfg.x0 = Vec::Zero(3);  // wrong dimension for the torus
  CHECK_THROWS_AS(generate_trajectory(flow, cfg), std::invalid_argument);
  CHECK_THROWS_AS(FlowSpec::from_name("pendulum"), std::invalid_argument);
}
