#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gcnet/common/error.hpp"
#include "gcnet/dynamics/closed_loop.hpp"
#include "gcnet/dynamics/rk4.hpp"
#include "gcnet/dynamics/rotation.hpp"

using namespace gcnet;
using namespace gcnet::dyn;

namespace {

constexpr double kPi = std::numbers::pi;

class ConstantPolicy : public ControlPolicy {
 public:
  explicit ConstantPolicy(Eigen::VectorXd u) : u_(std::move(u)) {}
  Eigen::VectorXd control(double, const Eigen::VectorXd&) const override { return u_; }

 private:
  Eigen::VectorXd u_;
};

DroneParams test_drone() {
  DroneParams p;
  p.inertia = {0.01, 0.012, 0.02};
  p.k_x = 1e-5;
  p.k_y = 2e-5;
  p.k_omega = 1e-6;
  p.k_z = 3e-5;
  p.k_h = 0.04;
  p.k_p = 2e-7;
  p.k_pv = 0.01;
  p.k_q = 3e-7;
  p.k_qv = 0.02;
  p.k_r1 = 1e-4;
  p.k_r2 = 2e-5;
  p.k_rr = 5e-3;
  p.tau = 0.05;
  p.omega_min = 150.0;
  p.omega_max = 3000.0;
  return p;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("body-to-world rotation") {
  CHECK(max_abs(rotation_body_to_world({0, 0, 0}) - Eigen::Matrix3d::Identity()) == 0.0);

  const Eigen::Vector3d x_world = rotation_body_to_world({0, 0, kPi / 2}) * Eigen::Vector3d::UnitX();
  CHECK(max_abs(x_world - Eigen::Vector3d::UnitY()) < 1e-15);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  double worst_orth = 0.0, worst_det = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Eigen::Matrix3d r = rotation_body_to_world({u(rng), u(rng), u(rng)});
    worst_orth = std::max(worst_orth, max_abs(r.transpose() * r - Eigen::Matrix3d::Identity()));
    worst_det = std::max(worst_det, std::abs(r.determinant() - 1.0));
  }
  CHECK(worst_orth < 1e-12);
  CHECK(worst_det < 1e-12);
}

TEST_CASE("euler rate matrix") {
  for (double psi : {0.0, 1.0, -2.5})
    CHECK(max_abs(euler_rate_matrix({0, 0, psi}) - Eigen::Matrix3d::Identity()) == 0.0);

  Eigen::Matrix3d expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(max_abs(euler_rate_matrix({kPi / 2, 0, 0}) - expected) < 1e-15);

  CHECK_THROWS_AS(euler_rate_matrix({0.1, kPi / 2, 0.0}), NumericalError);
  CHECK_THROWS_AS(euler_rate_matrix({0.1, -kPi / 2, 0.0}), NumericalError);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-kPi, kPi), pitch(-1.4, 1.4);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector3d e{ang(rng), pitch(rng), ang(rng)};
    CHECK(max_abs(euler_rate_matrix(e) * body_rate_matrix(e) - Eigen::Matrix3d::Identity()) < 1e-10);
  }
}

TEST_CASE("drone force model") {
  const DroneParams p = test_drone();
  DroneState x = DroneState::Zero();
  x.segment<3>(drone_index::velocity) = Eigen::Vector3d(1, 1, 0);
  const Eigen::Vector3d f0 = drone_forces(x, p);
  CHECK(f0.x() == 0.0);
  CHECK(f0.y() == 0.0);
  CHECK(f0.z() == doctest::Approx(-2.0 * p.k_h));

  x.setZero();
  x.segment<4>(drone_index::rotor).setConstant(1200.0);
  const Eigen::Vector3d f1 = drone_forces(x, p);
  CHECK(f1.head<2>().norm() == 0.0);
  CHECK(f1.z() == doctest::Approx(-4.0 * p.k_omega * 1200.0 * 1200.0));

  x.segment<4>(drone_index::rotor).setConstant(hover_rotor_speed(p));
  CHECK(drone_forces(x, p).z() == doctest::Approx(-p.mass * p.g).epsilon(1e-14));

  DroneParams ref;
  ref.k_omega = 9.81 / (4.0 * 1575.0 * 1575.0);
  CHECK(hover_rotor_speed(ref) == doctest::Approx(1575.0).epsilon(1e-14));
}

TEST_CASE("drone moment model") {
  const DroneParams p = test_drone();
  DroneState x = DroneState::Zero();
  x.segment<4>(drone_index::rotor).setConstant(900.0);
  CHECK(drone_moments(x, Eigen::Vector4d::Zero(), p).norm() == 0.0);

  const double w = 800.0;
  x.segment<4>(drone_index::rotor) = Eigen::Vector4d(w, 0, 0, 0);
  const Eigen::Vector3d m = drone_moments(x, Eigen::Vector4d::Zero(), p);
  CHECK(m.x() == doctest::Approx(p.k_p * w * w));
  CHECK(m.y() == doctest::Approx(p.k_q * w * w));
  CHECK(m.z() == doctest::Approx(-p.k_r1 * w));

  x.setZero();
  x[drone_index::body_rate + 2] = 0.7;
  CHECK(drone_moments(x, Eigen::Vector4d::Zero(), p).z() == doctest::Approx(-p.k_rr * 0.7));
  CHECK(drone_moments(x, Eigen::Vector4d::Zero(), p).z() < 0.0);
}

TEST_CASE("drone derivative") {
  const DroneParams p = test_drone();
  DroneState x = DroneState::Zero();
  x.segment<4>(drone_index::rotor).setConstant(p.omega_min);
  const DroneState d0 = drone_derivative(x, DroneControl::Zero(), p);
  CHECK(d0.segment<4>(drone_index::rotor).norm() == 0.0);
  const DroneState d1 = drone_derivative(x, DroneControl::Ones(), p);
  for (int i = 0; i < 4; ++i)
    CHECK(d1[drone_index::rotor + i] == doctest::Approx((p.omega_max - p.omega_min) / p.tau));

  DroneParams bare = p;
  bare.k_omega = bare.k_x = bare.k_y = bare.k_z = bare.k_h = 0.0;
  x.setZero();
  const DroneState dg = drone_derivative(x, DroneControl::Zero(), bare);
  CHECK(dg.segment<3>(drone_index::velocity).isApprox(Eigen::Vector3d(0, 0, bare.g)));

  x.segment<3>(drone_index::euler) = Eigen::Vector3d(0.0, kPi / 2, 0.0);
  CHECK_THROWS_AS(drone_derivative(x, DroneControl::Zero(), p), NumericalError);

  SUBCASE("mass divides the force") {
    DroneParams heavy = p;
    heavy.mass = 2.0;
    DroneState s = DroneState::Zero();
    s.segment<4>(drone_index::rotor).setConstant(1000.0);
    const double az1 = drone_derivative(s, DroneControl::Zero(), p)[drone_index::velocity + 2] - p.g;
    const double az2 = drone_derivative(s, DroneControl::Zero(), heavy)[drone_index::velocity + 2] - p.g;
    CHECK(az2 == doctest::Approx(0.5 * az1));
  }
}

TEST_CASE("landing dynamics") {
  LandingParams p;
  p.mu = 1.0;
  p.omega = 0.4;
  p.c1 = 2.0;
  p.isp = 10.0;
  p.g0 = 1.0;
  LandingState x;
  x << 1.3, 0.2, 0.1, 0.01, -0.02, 0.03, 0.9;
  CHECK(landing_derivative(x, 1.0, Eigen::Vector3d::UnitX(), p)[6] == doctest::Approx(-p.c1 / (p.isp * p.g0)));
  CHECK(landing_derivative(x, 0.0, Eigen::Vector3d::UnitX(), p)[6] == 0.0);

  const double rs = synchronous_radius(p.mu, p.omega);
  CHECK(rs == doctest::Approx(1.8420157493201932).epsilon(1e-14));
  LandingState eq = LandingState::Zero();
  eq[0] = rs;
  eq[6] = 1.0;
  CHECK(landing_derivative(eq, 0.0, Eigen::Vector3d::UnitZ(), p).norm() < 1e-14);

  LandingState mirrored = x;
  mirrored[2] = -x[2];
  mirrored[5] = -x[5];
  const Vector7d a = landing_derivative(x, 0.0, Eigen::Vector3d::UnitX(), p);
  const Vector7d b = landing_derivative(mirrored, 0.0, Eigen::Vector3d::UnitX(), p);
  CHECK(b[5] == doctest::Approx(-a[5]));
  CHECK(b[3] == doctest::Approx(a[3]));
  CHECK(b[4] == doctest::Approx(a[4]));

  LandingState bad = x;
  bad[6] = 0.0;
  CHECK_THROWS_AS(landing_derivative(bad, 1.0, Eigen::Vector3d::UnitX(), p), NumericalError);
  bad = LandingState::Zero();
  bad[6] = 1.0;
  CHECK_THROWS_AS(landing_derivative(bad, 1.0, Eigen::Vector3d::UnitX(), p), NumericalError);
}

TEST_CASE("transfer dynamics") {
  TransferParams p;
  p.gamma = 0.0;
  const TransferState target = p.target_state();
  CHECK(transfer_derivative(target, Eigen::Vector3d::UnitX(), p).norm() < 1e-14);
  p.gamma = 0.1;
  const Vector6d d = transfer_derivative(target, Eigen::Vector3d::UnitX(), p);
  CHECK(d.head<3>().norm() < 1e-14);
  CHECK(d[3] == doctest::Approx(0.1));
  CHECK(std::abs(d[4]) < 1e-14);
  CHECK(std::abs(d[5]) < 1e-14);

  CHECK_THROWS_AS(transfer_derivative(TransferState::Zero(), Eigen::Vector3d::UnitX(), p), NumericalError);
}

TEST_CASE("a circular orbit is a fixed point of the rotating frame") {
  TransferParams p;
  p.gamma = 0.0;
  p.radius = 1.3;
  const double period = 2.0 * kPi / p.rotation_rate();
  auto f = [&](double, const TransferState& x) { return transfer_derivative(x, Eigen::Vector3d::UnitX(), p); };
  const auto traj = rk4_integrate(f, p.target_state(), 0.0, period, 1e-4 * period);
  CHECK((traj.final_state().head<3>() - p.target_state().head<3>()).norm() < 1e-9 * p.radius);
}

TEST_CASE("unpowered motion conserves the jacobi constant") {
  SUBCASE("transfer frame") {
    TransferParams p;
    p.gamma = 0.0;
    TransferState x0;
    x0 << -0.6242202548207136, 1.3639461402385225, 0.05, 0.6215079001889743, 0.2844377856160826, 0.0;
    const double period = 2.0 * kPi / p.rotation_rate();
    ControlledSystem sys;
    sys.kind = Problem::Transfer;
    sys.transfer = p;
    ClosedLoopOptions opt;
    opt.steps = 10000;
    const auto res = propagate_closed_loop(sys, ConstantPolicy(Eigen::Vector3d(0, 1, 0)), x0, period, opt);
    const double rate = p.rotation_rate();
    const double c0 = jacobi_constant(x0.head<3>(), x0.tail<3>(), p.mu, rate);
    const Eigen::VectorXd& xf = res.final_state();
    const double c1 = jacobi_constant(xf.head<3>(), xf.tail<3>(), p.mu, rate);
    CHECK(std::abs(c1 - c0) / std::abs(c0) < 1e-8);
    CHECK((xf - x0).norm() > 1e-3);
  }
  SUBCASE("landing frame") {
    LandingParams p;
    p.omega = 0.4;
    p.c1 = 2.0;
    p.isp = 10.0;
    LandingState x0;
    x0 << 1.3, 0.2, 0.1, 0.0, 0.0, 0.0, 1.0;
    const double period = 2.0 * kPi / p.omega;
    auto f = [&](double, const LandingState& x) { return landing_derivative(x, 0.0, Eigen::Vector3d::UnitX(), p); };
    const auto traj = rk4_integrate(f, x0, 0.0, period, 1e-4 * period);
    const LandingState& xf = traj.final_state();
    const double c0 = jacobi_constant(x0.head<3>(), x0.segment<3>(3), p.mu, p.omega);
    const double c1 = jacobi_constant(xf.head<3>(), xf.segment<3>(3), p.mu, p.omega);
    CHECK(std::abs(c1 - c0) / std::abs(c0) < 1e-8);
    CHECK(xf[6] == 1.0);
  }
}

TEST_CASE("landing and transfer acceleration fields agree under the thrust substitution") {
  TransferParams tp;
  tp.radius = 1.2;
  tp.gamma = 0.08;
  LandingParams lp;
  lp.mu = tp.mu;
  lp.omega = tp.rotation_rate();
  lp.c1 = 0.2;
  const double mass = lp.c1 / tp.gamma;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 200; ++k) {
    TransferState xt;
    for (int i = 0; i < 6; ++i) xt[i] = u(rng);
    if (xt.head<3>().norm() < 0.2) continue;
    const Eigen::Vector3d dir = Eigen::Vector3d(u(rng), u(rng), u(rng)).normalized();
    LandingState xl;
    xl << xt, mass;
    const Vector6d a = transfer_derivative(xt, dir, tp);
    const Vector7d b = landing_derivative(xl, 1.0, dir, lp);
    CHECK((a - b.head<6>()).norm() < 1e-13 * (1.0 + a.norm()));
  }
}

TEST_CASE("rk4 on the exponential") {
  auto f = [](double, const Eigen::Matrix<double, 1, 1>& x) -> Eigen::Matrix<double, 1, 1> { return -x; };
  const Eigen::Matrix<double, 1, 1> one = Eigen::Matrix<double, 1, 1>::Ones();
  const double exact = 0.36787944117144233;
  const double x1 = rk4_integrate(f, one, 0.0, 1.0, 1e-3).final_state()[0];
  CHECK(std::abs(x1 - exact) < 1e-10);

  const double e1 = std::abs(rk4_integrate(f, one, 0.0, 1.0, 0.1).final_state()[0] - exact);
  const double e2 = std::abs(rk4_integrate(f, one, 0.0, 1.0, 0.05).final_state()[0] - exact);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.05));

  auto zero = [](double, const Eigen::Vector2d&) -> Eigen::Vector2d { return Eigen::Vector2d::Zero(); };
  const auto flat = rk4_integrate(zero, Eigen::Vector2d(1.5, -2.0), 0.0, 3.0, 0.7);
  for (const auto& s : flat.states) CHECK(s == Eigen::Vector2d(1.5, -2.0));
  CHECK(flat.times.back() == 3.0);
  CHECK(flat.times.size() == 6);
}

TEST_CASE("rk4 convergence order on a nonlinear problem") {
  // x' = 1 + x^2, x(0) = 0 has the solution tan(t).
  auto f = [](double, const Eigen::Matrix<double, 1, 1>& x) -> Eigen::Matrix<double, 1, 1> {
    return Eigen::Matrix<double, 1, 1>::Constant(1.0 + x[0] * x[0]);
  };
  const Eigen::Matrix<double, 1, 1> x0 = Eigen::Matrix<double, 1, 1>::Zero();
  const double exact = std::tan(1.0);
  const double e1 = std::abs(rk4_uniform(f, x0, 0.0, 1.0, 100)[0] - exact);
  const double e2 = std::abs(rk4_uniform(f, x0, 0.0, 1.0, 200)[0] - exact);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.8);
  CHECK(order <= 4.2);
}

TEST_CASE("rk4 errors") {
  auto f = [](double, const Eigen::Matrix<double, 1, 1>& x) -> Eigen::Matrix<double, 1, 1> {
    return Eigen::Matrix<double, 1, 1>::Constant(x[0] * x[0]);
  };
  const Eigen::Matrix<double, 1, 1> x0 = Eigen::Matrix<double, 1, 1>::Ones();
  CHECK_THROWS_AS(rk4_integrate(f, x0, 0.0, 5.0, 0.1), NumericalError);
  CHECK_THROWS_AS(rk4_integrate(f, x0, 0.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(rk4_integrate(f, x0, 1.0, 0.0, 0.1), ConfigError);
  const auto grid = rk4_time_grid(0.0, 1.0, 0.3);
  CHECK(grid.size() == 5);
  CHECK(grid.back() == 1.0);
}

TEST_CASE("closed-loop propagation") {
  ControlledSystem sys;
  sys.kind = Problem::Transfer;
  Eigen::VectorXd x0(6);
  x0 << 1.1, 0.2, 0.0, 0.0, 0.9, 0.05;
  const ConstantPolicy policy(Eigen::Vector3d(0.0, 2.0, 0.0));

  const auto still = propagate_closed_loop(sys, policy, x0, 0.0);
  CHECK(still.states.size() == 1);
  CHECK(still.final_state() == x0);

  ClosedLoopOptions cont;
  cont.steps = 200;
  ClosedLoopOptions zoh = cont;
  zoh.mode = FeedbackMode::ZeroOrderHold;
  const auto a = propagate_closed_loop(sys, policy, x0, 2.0, cont);
  const auto b = propagate_closed_loop(sys, policy, x0, 2.0, zoh);
  CHECK(a.times.back() == 2.0);
  CHECK(a.states.size() == 201);
  CHECK(a.controls.size() == 201);
  CHECK((a.final_state() - b.final_state()).norm() < 1e-14);
  CHECK(a.controls[0].norm() == doctest::Approx(1.0));

  CHECK_THROWS_AS(propagate_closed_loop(sys, ConstantPolicy(Eigen::Vector3d(0, 0, 0)), x0, 1.0), NumericalError);
  CHECK_THROWS_AS(propagate_closed_loop(sys, ConstantPolicy(Eigen::Vector3d(0, std::nan(""), 0)), x0, 1.0),
                  NumericalError);
  CHECK_THROWS_AS(propagate_closed_loop(sys, policy, x0, -1.0), ConfigError);
}

TEST_CASE("control sanitation") {
  ControlledSystem drone;
  drone.kind = Problem::Drone;
  Eigen::VectorXd u(4);
  u << -0.2, 0.5, 1.7, 1.0;
  CHECK(drone.sanitize(u) == Eigen::Vector4d(0.0, 0.5, 1.0, 1.0));

  ControlledSystem landing;
  landing.kind = Problem::Landing;
  Eigen::VectorXd ul(4);
  ul << 1.4, 0.0, 3.0, 4.0;
  const Eigen::VectorXd sl = landing.sanitize(ul);
  CHECK(sl[0] == 1.0);
  CHECK(sl[2] == doctest::Approx(0.6));
  CHECK(sl[3] == doctest::Approx(0.8));
  CHECK_THROWS_AS(landing.sanitize(Eigen::Vector3d(1, 0, 0)), ConfigError);
}

TEST_CASE("drone cost") {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> ones, zeros;
  for (int k = 0; k <= 20; ++k) {
    t.push_back(0.1 * k);
    ones.push_back(Eigen::Vector4d::Ones());
    zeros.push_back(Eigen::Vector4d::Zero());
  }
  CHECK(drone_cost(t, ones, 0.0) == doctest::Approx(2.0));
  CHECK(drone_cost(t, ones, 1.0) == doctest::Approx(8.0));
  for (double& v : t) v *= 5.0;
  CHECK(drone_cost(t, zeros, 0.5) == doctest::Approx(5.0));
  CHECK_THROWS_AS(drone_cost(t, zeros, 1.5), ConfigError);
}

}  // TEST_SUITE
