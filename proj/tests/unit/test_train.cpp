#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <omp.h>

#include "gcnet/common/error.hpp"
#include "gcnet/common/rng.hpp"
#include "gcnet/nn/init.hpp"
#include "gcnet/train/training.hpp"

using namespace gcnet;
using namespace gcnet::train;

namespace {

// Trajectories with random states and controls produced by `control`.
template <class ControlFn>
data::TrajectoryDataset make_dataset(Problem p, std::size_t trajectories, std::size_t samples, std::uint64_t seed,
                                     ControlFn&& control) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto ds = data::TrajectoryDataset::empty_for(p, samples);
  for (std::size_t t = 0; t < trajectories; ++t) {
    std::vector<double> times, states, controls;
    for (std::size_t k = 0; k < samples; ++k) {
      times.push_back(static_cast<double>(k));
      std::vector<double> s(ds.state_dim);
      for (double& v : s) v = u(rng);
      const std::vector<double> c = control(s);
      states.insert(states.end(), s.begin(), s.end());
      controls.insert(controls.end(), c.begin(), c.end());
    }
    ds.append_trajectory(t, times, states, controls, static_cast<double>(samples - 1));
  }
  return ds;
}

ExperimentConfig experiment(Problem p, nn::Activation act, std::vector<std::size_t> hidden = {16, 16}) {
  ExperimentConfig c;
  c.problem = p;
  c.network = network_spec_for(p, std::move(hidden), act);
  c.loss = loss_for(p);
  c.train.batch_size = 32;
  c.train.epochs = 5;
  c.train.learning_rate = 1e-3;
  c.train.seed = 11;
  c.split = {0.8, 5};
  c.label = "test";
  return c;
}

const std::vector<double> kDirection{0.6, 0.0, 0.8};

}  // namespace

TEST_SUITE("train") {

TEST_CASE("per-problem heads and losses") {
  CHECK(loss_for(Problem::Drone) == nn::LossKind::MSE);
  CHECK(loss_for(Problem::Landing) == nn::LossKind::ThrottleAndDirection);
  CHECK(loss_for(Problem::Transfer) == nn::LossKind::Cosine);
  const auto heads = output_heads_for(Problem::Landing);
  REQUIRE(heads.size() == 4);
  CHECK(heads[0] == nn::ActivationKind::Sigmoid);
  CHECK(heads[1] == nn::ActivationKind::Linear);
  for (auto h : output_heads_for(Problem::Drone)) CHECK(h == nn::ActivationKind::Sigmoid);

  auto c = experiment(Problem::Transfer, nn::Activation::sine());
  CHECK_NOTHROW(c.validate());
  c.loss = nn::LossKind::MSE;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("a dataset the initial network already fits") {
  const auto cfg = experiment(Problem::Drone, nn::Activation::softplus());
  auto states_only = make_dataset(Problem::Drone, 10, 8, 1, [](const std::vector<double>&) {
    return std::vector<double>{0.5, 0.5, 0.5, 0.5};
  });
  const auto probe = data::split(states_only, cfg.split);
  const auto scaler = data::fit_scaler(probe.train);
  nn::Network init(cfg.network);
  nn::init_for_activation(init, derive_seed(cfg.train.seed, 1));

  auto ds = make_dataset(Problem::Drone, 10, 8, 1, [&](const std::vector<double>& s) {
    return init.forward(scaler.apply(s));
  });
  const auto sp = data::split(ds, cfg.split);
  REQUIRE(data::fit_scaler(sp.train) == scaler);

  auto one = cfg;
  one.train.epochs = 1;
  const TrainResult r = train::train(one, sp);
  CHECK(r.curve.train_loss[0] < 1e-20);
  CHECK(r.curve.val_loss[0] < 1e-12);
  const auto a = init.flatten(), b = r.final_network.flatten();
  double moved = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) moved = std::max(moved, std::abs(a[i] - b[i]));
  CHECK(moved < 1e-6);
}

TEST_CASE("training is deterministic and independent of the thread count") {
  auto ds = make_dataset(Problem::Transfer, 12, 10, 3, [](const std::vector<double>& s) {
    const double n = std::sqrt(s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
    return std::vector<double>{-s[3] / n, -s[4] / n, -s[5] / n};
  });
  const auto sp = data::split(ds, {0.8, 2});
  const auto cfg = experiment(Problem::Transfer, nn::Activation::sine());
  omp_set_num_threads(1);
  const TrainResult a = train::train(cfg, sp);
  omp_set_num_threads(4);
  const TrainResult b = train::train(cfg, sp);
  omp_set_num_threads(omp_get_num_procs());
  CHECK(a.curve.train_loss == b.curve.train_loss);
  CHECK(a.curve.val_loss == b.curve.val_loss);
  CHECK(a.final_network == b.final_network);
  CHECK(a.curve.to_csv() == b.curve.to_csv());
  CHECK(a.curve.epochs() == cfg.train.epochs);
  CHECK(a.best_epoch >= 1);
  CHECK(a.best_val_loss == *std::min_element(a.curve.val_loss.begin(), a.curve.val_loss.end()));

  auto other = cfg;
  other.train.seed = 12;
  CHECK(train::train(other, sp).curve.train_loss != a.curve.train_loss);

  SUBCASE("validation passes leave the weights alone") {
    const auto hash = a.final_network.weight_hash();
    const double v1 = dataset_loss(a.final_network, sp.validation, a.scaler, nn::LossKind::Cosine);
    const double v2 = dataset_loss(a.final_network, sp.validation, a.scaler, nn::LossKind::Cosine);
    CHECK(a.final_network.weight_hash() == hash);
    CHECK(v1 == v2);
    CHECK(v1 == doctest::Approx(a.curve.val_loss.back()).epsilon(1e-12));
  }
}

TEST_CASE("constant targets are learned by every activation") {
  // At the default learning rate ReLU and Softplus are still descending after 200 epochs.
  auto ds = make_dataset(Problem::Drone, 10, 10, 4, [](const std::vector<double>&) {
    return std::vector<double>{0.3, 0.3, 0.3, 0.3};
  });
  const auto sp = data::split(ds, {0.8, 1});
  for (auto act : {nn::Activation::sine(), nn::Activation::relu(), nn::Activation::softplus()}) {
    CAPTURE(nn::to_string(act.kind));
    auto cfg = experiment(Problem::Drone, act);
    cfg.train.epochs = 200;
    cfg.train.batch_size = 4;
    cfg.train.learning_rate = 0.05;
    const TrainResult r = train::train(cfg, sp);
    CHECK(*std::min_element(r.curve.train_loss.begin(), r.curve.train_loss.end()) < 1e-6);
  }
}

TEST_CASE("learning-rate curve drops by the scheduler factor") {
  // Targets are noise, so the training loss stalls and the scheduler has to act.
  std::mt19937_64 noise(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto ds = make_dataset(Problem::Drone, 6, 6, 5, [&](const std::vector<double>&) {
    return std::vector<double>{unit(noise), unit(noise), unit(noise), unit(noise)};
  });
  const auto sp = data::split(ds, {0.8, 1});
  auto cfg = experiment(Problem::Drone, nn::Activation::relu(), {4});
  cfg.train.epochs = 60;
  cfg.train.learning_rate = 0.05;
  cfg.train.scheduler_patience = 1;
  cfg.train.batch_size = 4;
  const TrainResult r = train::train(cfg, sp);
  const auto& lr = r.curve.learning_rate;
  CHECK(lr.front() == 0.05);
  int drops = 0;
  for (std::size_t k = 1; k < lr.size(); ++k) {
    CHECK(lr[k] <= lr[k - 1]);
    if (lr[k] < lr[k - 1]) {
      ++drops;
      CHECK(lr[k] == doctest::Approx(0.9 * lr[k - 1]).epsilon(1e-15));
    }
  }
  CHECK(drops > 0);
}

TEST_CASE("invalid inputs") {
  auto ds = make_dataset(Problem::Transfer, 5, 4, 6, [](const std::vector<double>&) { return kDirection; });
  const auto sp = data::split(ds, {0.8, 1});
  auto cfg = experiment(Problem::Landing, nn::Activation::relu());
  CHECK_THROWS_AS(train::train(cfg, sp), ConfigError);
  cfg = experiment(Problem::Transfer, nn::Activation::relu());
  cfg.train.batch_size = 0;
  CHECK_THROWS_AS(train::train(cfg, sp), ConfigError);
  cfg = experiment(Problem::Transfer, nn::Activation::relu());
  cfg.train.learning_rate = 1e300;
  cfg.train.epochs = 3;
  CHECK_THROWS_AS(train::train(cfg, sp), NumericalError);
}

TEST_CASE("activation comparison") {
  auto ds = make_dataset(Problem::Transfer, 10, 6, 7, [](const std::vector<double>& s) {
    const double n = std::sqrt(s[0] * s[0] + s[1] * s[1]);
    return std::vector<double>{s[0] / n, s[1] / n, 0.0};
  });
  const auto sp = data::split(ds, {0.8, 1});
  const auto base = experiment(Problem::Transfer, nn::Activation::sine());

  const ComparisonReport single = compare_activations(base, {nn::Activation::sine()}, sp);
  REQUIRE(single.entries.size() == 1);
  CHECK(single.entries[0].label == "sine");
  CHECK(single.to_csv().rfind("epoch,sine_train_loss,sine_val_loss,sine_lr\n", 0) == 0);

  const ComparisonReport three = compare_activations(
      base, {nn::Activation::sine(), nn::Activation::relu(), nn::Activation::softplus()}, sp);
  REQUIRE(three.entries.size() == 3);
  // Same seed and schedule: the sine member equals a stand-alone run.
  const TrainResult alone = train::train(base, sp);
  CHECK(three.entries[0].result.curve.train_loss == alone.curve.train_loss);
  for (const auto& e : three.entries) CHECK(e.result.curve.epochs() == base.train.epochs);
  CHECK(three.to_svg("t").find("<svg") != std::string::npos);
  CHECK(three.summary().find("relu") != std::string::npos);
}

}  // TEST_SUITE
