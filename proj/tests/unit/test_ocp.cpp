#include <doctest.h>

#include <cmath>
#include <random>

#include <omp.h>

#include "gcnet/common/error.hpp"
#include "gcnet/ocp/bundle.hpp"
#include "gcnet/ocp/newton.hpp"
#include "gcnet/ocp/playback.hpp"

using namespace gcnet;
using namespace gcnet::ocp;

namespace {

const std::vector<double> kLandingHomotopy{1.0, 0.5, 0.2, 0.1, 0.05, 0.01, 0.005, 0.002, 0.001};

SpaceProblem transfer_problem() {
  SpaceProblem p;
  p.kind = Problem::Transfer;
  p.transfer.params.mu = 1.0;
  p.transfer.params.radius = 1.0;
  p.transfer.params.gamma = 0.1;
  return p;
}

SpaceProblem landing_problem() {
  SpaceProblem p;
  p.kind = Problem::Landing;
  auto& lp = p.landing.params;
  lp.mu = 1.0;
  lp.omega = 0.4;
  lp.c1 = 2.0;
  lp.isp = 10.0;
  lp.g0 = 1.0;
  p.landing.target_position = {1.0, 0.0, 0.0};
  return p;
}

Eigen::VectorXd transfer_x0() {
  Eigen::VectorXd x(6);
  x << -0.6242202548207136, 1.3639461402385225, 0.05, 0.6215079001889743, 0.2844377856160826, 0.0;
  return x;
}

Eigen::VectorXd landing_x0() {
  Eigen::VectorXd x(7);
  x << 1.3, 0.2, 0.1, 0.0, 0.0, 0.0, 1.0;
  return x;
}

ShootingOptions transfer_options() {
  ShootingOptions o;
  o.steps = 990;
  o.newton.tolerance = 1e-10;
  o.restarts = 8;
  return o;
}

ShootingOptions landing_options() {
  ShootingOptions o;
  o.steps = 990;
  o.newton.tolerance = 1e-10;
  o.homotopy = kLandingHomotopy;
  o.restarts = 16;
  return o;
}

const ShootingSolution& transfer_nominal() {
  static const ShootingSolution sol = solve_nominal(transfer_problem(), transfer_x0(), transfer_options());
  return sol;
}

const ShootingSolution& landing_nominal() {
  static const ShootingSolution sol = solve_nominal(landing_problem(), landing_x0(), landing_options());
  return sol;
}

Vector12d transfer_node(const ShootingSolution& s, std::size_t k) {
  Vector12d y;
  y << s.states[k], s.costates[k];
  return y;
}

// Central differences of H with respect to the full augmented vector.
template <class Vec, class H>
Vec hamiltonian_gradient(const Vec& y, H&& hamiltonian) {
  Vec g;
  for (int i = 0; i < y.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(y[i]));
    Vec yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    g[i] = (hamiltonian(yp) - hamiltonian(ym)) / (yp[i] - ym[i]);
  }
  return g;
}

double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& ref) {
  return (a - ref).lpNorm<Eigen::Infinity>() / std::max(ref.lpNorm<Eigen::Infinity>(), 1e-12);
}

}  // namespace

TEST_SUITE("ocp") {

TEST_CASE("primer direction") {
  CHECK(primer_direction({1, 0, 0}) == Eigen::Vector3d(-1, 0, 0));
  CHECK(primer_direction({0, 3, 4}).isApprox(Eigen::Vector3d(0, -0.6, -0.8)));
  CHECK_THROWS_AS(primer_direction({0, 0, 0}), NumericalError);
}

TEST_CASE("transfer costate equations match finite differences of H") {
  const auto p = transfer_problem().transfer.params;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst_state = 0.0, worst_costate = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vector12d y;
    for (int i = 0; i < 12; ++i) y[i] = u(rng);
    if (y.head<3>().norm() < 0.3 || y.tail<3>().norm() < 0.1) {
      --k;
      continue;
    }
    const Vector12d f = transfer_augmented_derivative(y, p);
    const Vector12d g = hamiltonian_gradient(y, [&](const Vector12d& z) { return transfer_hamiltonian(z, p); });
    worst_state = std::max(worst_state, relative_error(f.head<6>(), g.tail<6>()));
    worst_costate = std::max(worst_costate, relative_error(f.tail<6>(), -g.head<6>()));
  }
  CHECK(worst_state < 1e-6);
  CHECK(worst_costate < 1e-6);
}

TEST_CASE("landing costate equations match finite differences of H") {
  const auto p = landing_problem().landing.params;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (double eps : {1.0, 0.1, 0.01}) {
    CAPTURE(eps);
    double worst_state = 0.0, worst_costate = 0.0;
    for (int k = 0; k < 100; ++k) {
      Vector14d y;
      for (int i = 0; i < 14; ++i) y[i] = u(rng);
      y[6] = 0.5 + 0.5 * std::abs(y[6]);
      if (y.head<3>().norm() < 0.3 || y.segment<3>(10).norm() < 0.1) {
        --k;
        continue;
      }
      const Vector14d f = landing_augmented_derivative(y, eps, p);
      const Vector14d g =
          hamiltonian_gradient(y, [&](const Vector14d& z) { return landing_hamiltonian(z, eps, p); });
      worst_state = std::max(worst_state, relative_error(f.head<7>(), g.tail<7>()));
      worst_costate = std::max(worst_costate, relative_error(f.tail<7>(), -g.head<7>()));
    }
    CHECK(worst_state < 1e-6);
    CHECK(worst_costate < 1e-6);
  }
  Vector14d dead = Vector14d::Ones();
  dead[6] = 0.0;
  CHECK_THROWS_AS(landing_augmented_derivative(dead, 0.1, p), NumericalError);
}

TEST_CASE("switching limits") {
  for (double eps : {1.0, 0.01, 0.0}) {
    CHECK(landing_throttle(1e3, eps) == 0.0);
    CHECK(landing_throttle(-1e3, eps) == 1.0);
  }
  CHECK(landing_throttle(0.0, 0.5) == doctest::Approx(0.5));
  CHECK(landing_throttle(0.3, 0.0) == 0.0);
  CHECK(landing_throttle(-0.3, 0.0) == 1.0);
}

TEST_CASE("target start is the degenerate zero-time solution") {
  const SpaceProblem prob = transfer_problem();
  const auto sol = solve_transfer(prob.transfer, prob.transfer.target(), std::nullopt, transfer_options());
  CHECK(sol.converged);
  CHECK(sol.tf == 0.0);
}

TEST_CASE("transfer nominal extremal") {
  const ShootingSolution& sol = transfer_nominal();
  REQUIRE(sol.converged);
  CHECK(sol.residual_norm < 1e-10);
  CHECK(sol.tf > 0.0);
  const auto p = transfer_problem().transfer.params;

  double worst_h = 0.0;
  for (double h : sol.hamiltonian) worst_h = std::max(worst_h, std::abs(h));
  CHECK(worst_h < 1e-8);
  for (const auto& u : sol.controls) CHECK(std::abs(u.norm() - 1.0) < 1e-12);

  SUBCASE("pointwise minimality of H") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::size_t> node(0, sol.times.size() - 1);
    std::normal_distribution<double> n01;
    for (int k = 0; k < 100; ++k) {
      const Vector12d y = transfer_node(sol, node(rng));
      const double best = transfer_hamiltonian(y, primer_direction(y.tail<3>()), p);
      for (int j = 0; j < 100; ++j) {
        const Eigen::Vector3d d = Eigen::Vector3d(n01(rng), n01(rng), n01(rng)).normalized();
        REQUIRE(best < transfer_hamiltonian(y, d, p));
      }
    }
  }

  SUBCASE("refined re-integration keeps the terminal residual") {
    const ShootingOptions opt = transfer_options();
    const auto r = transfer_residual(transfer_problem().transfer, transfer_x0(), sol.unknowns, opt.steps * 10);
    CHECK(r.lpNorm<Eigen::Infinity>() < 10.0 * 1e-10);
  }

  SUBCASE("finite-difference jacobian is stable under step halving") {
    const auto prob = transfer_problem().transfer;
    const int steps = transfer_options().steps;
    const ResidualFn f = [&](const Eigen::VectorXd& z) { return transfer_residual(prob, transfer_x0(), z, steps); };
    const Eigen::MatrixXd j1 = fd_jacobian(f, sol.unknowns, 1e-6);
    const Eigen::MatrixXd j2 = fd_jacobian(f, sol.unknowns, 5e-7);
    for (Eigen::Index c = 0; c < j1.cols(); ++c) CHECK((j1.col(c) - j2.col(c)).norm() < 0.01 * j1.col(c).norm());
  }
}

TEST_CASE("landing nominal extremal") {
  const ShootingSolution& sol = landing_nominal();
  REQUIRE(sol.converged);
  CHECK(sol.residual_norm < 1e-10);
  CHECK(sol.homotopy == kLandingHomotopy.back());
  CHECK(sol.stage_final_mass.size() == kLandingHomotopy.size());

  CHECK(std::abs(sol.costates.back()[6]) < 1e-10);
  double worst_h = 0.0;
  for (double h : sol.hamiltonian) worst_h = std::max(worst_h, std::abs(h));
  CHECK(worst_h < 1e-8);

  std::size_t extreme = 0;
  double on_time = 0.0;
  for (std::size_t k = 0; k < sol.controls.size(); ++k) {
    const double u = sol.controls[k][0];
    if (u < 0.01 || u > 0.99) ++extreme;
    if (k > 0) on_time += u * (sol.times[k] - sol.times[k - 1]);
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
    CHECK(std::abs(sol.controls[k].tail<3>().norm() - 1.0) < 1e-12);
  }
  CHECK(static_cast<double>(extreme) >= 0.99 * static_cast<double>(sol.controls.size()));
  REQUIRE(on_time > 0.0);
  CHECK(sol.states.back()[6] < landing_x0()[6]);
  for (std::size_t k = 1; k < sol.states.size(); ++k) CHECK(sol.states[k][6] <= sol.states[k - 1][6]);

  const auto r = landing_residual(landing_problem().landing, landing_x0(), sol.unknowns, sol.homotopy,
                                  landing_options().steps * 10);
  CHECK(r.lpNorm<Eigen::Infinity>() < 10.0 * 1e-10);

}

TEST_CASE("bundle generation") {
  const SpaceProblem prob = transfer_problem();
  const ShootingSolution& nominal = transfer_nominal();
  REQUIRE(nominal.converged);

  SUBCASE("zero perturbation copies the nominal") {
    BundleConfig cfg;
    cfg.trajectories = 3;
    cfg.samples = 100;
    const Bundle b = generate_bundle(prob, nominal, cfg, transfer_options());
    REQUIRE(b.dataset.trajectory_count() == 3);
    const std::size_t n = cfg.samples;
    for (std::size_t t = 1; t < 3; ++t) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = k, c = t * n + k;
        CHECK(b.dataset.times[a] == b.dataset.times[c]);
        for (std::size_t i = 0; i < 6; ++i) CHECK(b.dataset.states[a * 6 + i] == b.dataset.states[c * 6 + i]);
        for (std::size_t i = 0; i < 3; ++i)
          CHECK(b.dataset.controls[a * 3 + i] == b.dataset.controls[c * 3 + i]);
      }
    }
    CHECK(b.dataset.final_times[0] == doctest::Approx(nominal.tf).epsilon(1e-9));
  }

  SUBCASE("perturbed bundle") {
    BundleConfig cfg;
    cfg.trajectories = 6;
    cfg.samples = 12;
    cfg.seed = 99;
    cfg.perturbation.absolute = {0.05, 0.05, 0.05, 0.02, 0.02, 0.02};
    cfg.threads = 1;
    const Bundle serial = generate_bundle(prob, nominal, cfg, transfer_options());
    cfg.threads = 3;
    const Bundle parallel = generate_bundle(prob, nominal, cfg, transfer_options());
    CHECK(serial.dataset == parallel.dataset);
    cfg.threads = 1;
    CHECK(generate_bundle(prob, nominal, cfg, transfer_options()).dataset == serial.dataset);

    const auto& ds = serial.dataset;
    CHECK(ds.trajectory_count() == serial.report.produced);
    CHECK(serial.report.produced >= 5);
    CHECK_NOTHROW(ds.validate());
    for (std::size_t r = 0; r < ds.record_count(); ++r) {
      const auto u = ds.control(r);
      CHECK(std::abs(std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) - 1.0) < 1e-9);
    }
    const auto target = prob.transfer.target();
    for (std::size_t t = 0; t < ds.trajectory_count(); ++t) {
      const auto last = ds.state(ds.first_record(t) + ds.samples_per_trajectory - 1);
      for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(last[i] - target[static_cast<Eigen::Index>(i)]) < 1e-9);
      CHECK(ds.times[ds.first_record(t) + ds.samples_per_trajectory - 1] == ds.final_times[ds.first_record(t)]);
    }
    CHECK(serial.report.to_text().find("requested trajectories: 6") != std::string::npos);

    // The auxiliary block ends with the step count each extremal was solved on.
    REQUIRE(ds.aux_dim == 9);
    const int base = sampling_steps(transfer_options().steps, cfg.samples);
    for (std::size_t t = 0; t < ds.trajectory_count(); ++t) {
      const double steps = ds.trajectory_aux(t)[8];
      CHECK(steps >= base);
      CHECK(static_cast<int>(steps) % base == 0);
      const auto sol = transfer_extremal(prob.transfer, ExtremalPlayback::from_dataset(prob, ds, t).initial_state(),
                                         Eigen::Map<const Eigen::VectorXd>(ds.trajectory_aux(t).data(), 7),
                                         static_cast<int>(steps));
      for (double h : sol.hamiltonian) CHECK(std::abs(h) <= cfg.hamiltonian_tolerance);
    }

    SUBCASE("a tighter hamiltonian tolerance refines or rejects") {
      BundleConfig strict = cfg;
      strict.hamiltonian_tolerance = 0.5 * serial.report.max_abs_hamiltonian;
      strict.max_refinements = 2;
      strict.max_retries = 0;
      const Bundle b = generate_bundle(prob, nominal, strict, transfer_options());
      CHECK(b.report.max_abs_hamiltonian <= strict.hamiltonian_tolerance);
      CHECK((b.report.refined > 0 || b.report.produced < serial.report.produced));
      for (std::size_t t = 0; t < b.dataset.trajectory_count(); ++t)
        CHECK(b.dataset.trajectory_aux(t)[8] <= 4 * base);
    }
  }

  SUBCASE("unconverged nominal is refused") {
    ShootingSolution bad = nominal;
    bad.converged = false;
    CHECK_THROWS_AS(generate_bundle(prob, bad, BundleConfig{}, transfer_options()), ConfigError);
  }
}

TEST_CASE("sampling grid") {
  CHECK(sampling_steps(3960, 100) == 3960);
  CHECK(sampling_steps(1000, 100) == 1089);
  CHECK(sampling_steps(1, 12) == 11);
  CHECK_THROWS_AS(sampling_steps(100, 1), ConfigError);
}

TEST_CASE("newton solver") {
  const ResidualFn f = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(2);
    r << x[0] * x[0] - 2.0, x[0] * x[1] - 1.0;
    return r;
  };
  NewtonOptions opt;
  opt.tolerance = 1e-12;
  const NewtonResult res = newton_solve(f, Eigen::Vector2d(1.0, 1.0), opt);
  CHECK(res.converged);
  CHECK(res.solution[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(res.solution[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  const ResidualFn none = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(1);
    r << x[0] * x[0] + 1.0;
    return r;
  };
  const NewtonResult fail = newton_solve(none, Eigen::VectorXd::Constant(1, 0.5), opt);
  CHECK_FALSE(fail.converged);
  CHECK_FALSE(fail.message.empty());
}

TEST_CASE("extremal playback reproduces the terminal state") {
  const SpaceProblem prob = transfer_problem();
  const ShootingSolution& nominal = transfer_nominal();
  REQUIRE(nominal.converged);
  const ExtremalPlayback play(prob, nominal.initial_state, nominal.unknowns, 0.0, transfer_options().steps);
  dyn::ControlledSystem sys;
  sys.kind = Problem::Transfer;
  sys.transfer = prob.transfer.params;
  dyn::ClosedLoopOptions opt;
  opt.steps = transfer_options().steps;
  const auto res = dyn::propagate_closed_loop(sys, play, nominal.initial_state, play.final_time(), opt);
  CHECK((res.final_state() - prob.transfer.target()).norm() < 1e-6);
  CHECK((play.final_state() - nominal.states.back()).norm() < 1e-12);
}

}  // TEST_SUITE
