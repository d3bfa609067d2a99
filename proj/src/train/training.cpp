#include "gcnet/train/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "gcnet/common/error.hpp"
#include "gcnet/common/rng.hpp"
#include "gcnet/common/svg.hpp"
#include "gcnet/nn/backprop.hpp"
#include "gcnet/nn/checkpoint.hpp"
#include "gcnet/nn/init.hpp"
#include "gcnet/nn/optim.hpp"

namespace gcnet::train {

namespace {

// Seed streams derived from TrainConfig::seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kEpochStream = 1000;

constexpr std::size_t kEvalChunk = 4096;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(scheduler_factor > 0.0 && scheduler_factor < 1.0)) throw ConfigError("scheduler_factor must lie in (0, 1)");
  if (scheduler_patience < 1) throw ConfigError("scheduler_patience must be >= 1");
  if (!(scheduler_threshold >= 0.0)) throw ConfigError("scheduler_threshold must be >= 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
}

std::vector<nn::ActivationKind> output_heads_for(Problem p) {
  using nn::ActivationKind;
  switch (p) {
    case Problem::Drone:
      return {ActivationKind::Sigmoid, ActivationKind::Sigmoid, ActivationKind::Sigmoid, ActivationKind::Sigmoid};
    case Problem::Landing:
      return {ActivationKind::Sigmoid, ActivationKind::Linear, ActivationKind::Linear, ActivationKind::Linear};
    case Problem::Transfer:
      return {ActivationKind::Linear, ActivationKind::Linear, ActivationKind::Linear};
  }
  throw ConfigError("unknown problem");
}

nn::LossKind loss_for(Problem p) {
  switch (p) {
    case Problem::Drone: return nn::LossKind::MSE;
    case Problem::Landing: return nn::LossKind::ThrottleAndDirection;
    case Problem::Transfer: return nn::LossKind::Cosine;
  }
  throw ConfigError("unknown problem");
}

nn::NetworkSpec network_spec_for(Problem p, std::vector<std::size_t> hidden_widths, nn::Activation hidden) {
  nn::NetworkSpec spec;
  spec.input_dim = state_dim(p);
  spec.hidden_widths = std::move(hidden_widths);
  spec.output_dim = control_dim(p);
  spec.hidden_activation = hidden;
  spec.output_heads = output_heads_for(p);
  spec.validate();
  return spec;
}

void ExperimentConfig::validate() const {
  network.validate();
  train.validate();
  if (network.input_dim != state_dim(problem) || network.output_dim != control_dim(problem))
    throw ConfigError(fmt::format("network {}->{} does not fit problem '{}' ({}->{})", network.input_dim,
                                  network.output_dim, to_string(problem), state_dim(problem), control_dim(problem)));
  if (network.output_heads != output_heads_for(problem))
    throw ConfigError(fmt::format("output heads do not match problem '{}'", to_string(problem)));
  if (loss != loss_for(problem))
    throw ConfigError(fmt::format("loss '{}' does not match problem '{}' (expected '{}')", nn::to_string(loss),
                                  to_string(problem), nn::to_string(loss_for(problem))));
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
    throw ConfigError("train fraction must lie in (0, 1)");
}

std::string LossCurve::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,lr\n";
  for (std::size_t e = 0; e < epochs(); ++e)
    out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", e + 1, train_loss[e], val_loss[e], learning_rate[e]);
  return out;
}

double dataset_loss(const nn::Network& net, const data::TrajectoryDataset& ds, const data::ScalingTransform& scaler,
                    nn::LossKind kind) {
  if (ds.record_count() == 0) throw ConfigError("loss over an empty split");
  nn::Workspace ws;
  nn::Matrix in, target;
  double sum = 0.0;
  for (std::size_t begin = 0; begin < ds.record_count(); begin += kEvalChunk) {
    const std::size_t n = std::min(kEvalChunk, ds.record_count() - begin);
    in.resize(n, ds.state_dim);
    target.resize(n, ds.control_dim);
    for (std::size_t i = 0; i < n; ++i) {
      scaler.apply(ds.state(begin + i), in.row_span(i));
      const auto u = ds.control(begin + i);
      std::copy(u.begin(), u.end(), target.row(i));
    }
    sum += nn::batch_loss(net, in, target, kind, ws) * static_cast<double>(n);
  }
  return sum / static_cast<double>(ds.record_count());
}

TrainResult train(const ExperimentConfig& config, const data::Split& split, const EpochCallback& on_epoch) {
  config.validate();
  for (const auto* side : {&split.train, &split.validation}) {
    if (side->problem != config.problem)
      throw ConfigError(fmt::format("dataset is for problem '{}', experiment for '{}'", to_string(side->problem),
                                    to_string(config.problem)));
    if (side->record_count() == 0) throw ConfigError("training needs non-empty training and validation splits");
  }
  const TrainConfig& tc = config.train;

  TrainResult result;
  result.scaler = data::fit_scaler(split.train);
  nn::Network net(config.network);
  nn::init_for_activation(net, derive_seed(tc.seed, kInitStream));

  nn::AdamConfig adam_cfg;
  adam_cfg.weight_decay = tc.weight_decay;
  nn::AdamState adam = nn::AdamState::for_network(net, adam_cfg);
  nn::PlateauScheduler scheduler(tc.learning_rate, tc.scheduler_factor, tc.scheduler_patience, tc.scheduler_threshold);
  nn::Gradients grads = nn::Gradients::zeros_like(net);
  nn::Workspace ws;
  data::Batch batch;

  result.best_val_loss = std::numeric_limits<double>::infinity();
  double lr = tc.learning_rate;
  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    data::BatchIterator it(split.train, result.scaler, tc.batch_size, derive_seed(tc.seed, kEpochStream + epoch));
    double loss_sum = 0.0;
    std::size_t seen = 0, batch_index = 0;
    while (it.next(batch)) {
      double loss = 0.0;
      try {
        loss = nn::backward(net, batch.inputs, batch.targets, config.loss, grads, ws);
      } catch (const NumericalError& e) {
        throw NumericalError(fmt::format("epoch {}, batch {}: {}", epoch, batch_index, e.what()));
      }
      if (!std::isfinite(loss))
        throw NumericalError(fmt::format("epoch {}, batch {}: non-finite training loss (lr {:.3e})", epoch,
                                         batch_index, lr));
      nn::adam_step(adam, net, grads, lr);
      loss_sum += loss * static_cast<double>(batch.inputs.rows);
      seen += batch.inputs.rows;
      ++batch_index;
    }
    const double train_loss = loss_sum / static_cast<double>(seen);
    const double val_loss = dataset_loss(net, split.validation, result.scaler, config.loss);
    if (!std::isfinite(val_loss)) throw NumericalError(fmt::format("epoch {}: non-finite validation loss", epoch));
    result.curve.train_loss.push_back(train_loss);
    result.curve.val_loss.push_back(val_loss);
    result.curve.learning_rate.push_back(lr);
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      result.best_network = net;
    }
    if (on_epoch) on_epoch(epoch, train_loss, val_loss, lr);
    lr = scheduler.step(tc.scheduler_monitor == MonitoredLoss::Training ? train_loss : val_loss);
  }
  result.final_network = std::move(net);
  return result;
}

void write_training_outputs(const std::filesystem::path& dir, const TrainResult& result) {
  std::filesystem::create_directories(dir);
  nn::save_checkpoint(dir / "checkpoint_final.gcnet", result.final_network);
  nn::save_checkpoint(dir / "checkpoint_best.gcnet", result.best_network);
  write_text(dir / "checkpoint_final.txt", nn::export_text(result.final_network));
  write_text(dir / "checkpoint_best.txt", nn::export_text(result.best_network));
  write_text(dir / "loss_curve.csv", result.curve.to_csv());
  data::save_scaler(dir / "scaler.txt", result.scaler);
}

std::string ComparisonReport::to_csv() const {
  std::string out = "epoch";
  for (const auto& e : entries) out += fmt::format(",{0}_train_loss,{0}_val_loss,{0}_lr", e.label);
  out += "\n";
  std::size_t epochs = 0;
  for (const auto& e : entries) epochs = std::max(epochs, e.result.curve.epochs());
  for (std::size_t k = 0; k < epochs; ++k) {
    out += fmt::format("{}", k + 1);
    for (const auto& e : entries) {
      const auto& c = e.result.curve;
      if (k < c.epochs())
        out += fmt::format(",{:.17g},{:.17g},{:.17g}", c.train_loss[k], c.val_loss[k], c.learning_rate[k]);
      else
        out += ",,,";
    }
    out += "\n";
  }
  return out;
}

std::string ComparisonReport::to_svg(const std::string& title) const {
  std::vector<svg::Series> series;
  for (const auto& e : entries) {
    svg::Series s;
    s.label = e.label + " train";
    for (std::size_t k = 0; k < e.result.curve.epochs(); ++k) {
      s.x.push_back(static_cast<double>(k + 1));
      s.y.push_back(e.result.curve.train_loss[k]);
    }
    series.push_back(std::move(s));
  }
  for (const auto& e : entries) {
    svg::Series s;
    s.label = e.label + " val";
    for (std::size_t k = 0; k < e.result.curve.epochs(); ++k) {
      s.x.push_back(static_cast<double>(k + 1));
      s.y.push_back(e.result.curve.val_loss[k]);
    }
    series.push_back(std::move(s));
  }
  return svg::line_plot(title, "epoch", "loss", series, true);
}

std::string ComparisonReport::summary() const {
  std::string out;
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto final_train = [&](std::size_t i) { return entries[i].result.curve.train_loss.back(); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return final_train(a) < final_train(b); });
  out += "final training loss ranking (lowest first):\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& e = entries[order[r]];
    out += fmt::format("  {}. {}: train {:.6e}, val {:.6e}, best val {:.6e} at epoch {}\n", r + 1, e.label,
                       e.result.curve.train_loss.back(), e.result.curve.val_loss.back(), e.result.best_val_loss,
                       e.result.best_epoch);
  }
  std::size_t epochs = entries.empty() ? 0 : entries.front().result.curve.epochs();
  for (const auto& e : entries) epochs = std::min(epochs, e.result.curve.epochs());
  std::vector<std::size_t> leads(entries.size(), 0);
  for (std::size_t k = 0; k < epochs; ++k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i)
      if (entries[i].result.curve.train_loss[k] < entries[best].result.curve.train_loss[k]) best = i;
    ++leads[best];
  }
  out += fmt::format("epochs with the lowest training loss (of {}):\n", epochs);
  for (std::size_t i = 0; i < entries.size(); ++i) out += fmt::format("  {}: {}\n", entries[i].label, leads[i]);
  return out;
}

ComparisonReport compare_activations(const ExperimentConfig& base, const std::vector<nn::Activation>& activations,
                                     const data::Split& split,
                                     const std::function<void(const std::string&, std::size_t, double, double, double)>&
                                         on_epoch) {
  if (activations.empty()) throw ConfigError("compare_activations: no activations given");
  ComparisonReport report;
  for (const auto& act : activations) {
    ExperimentConfig cfg = base;
    cfg.network.hidden_activation = act;
    const std::string label(nn::to_string(act.kind));
    EpochCallback cb;
    if (on_epoch) cb = [&](std::size_t e, double tl, double vl, double lr) { on_epoch(label, e, tl, vl, lr); };
    report.entries.push_back({label, train(cfg, split, cb)});
  }
  return report;
}

}  // namespace gcnet::train
