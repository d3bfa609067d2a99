#pragma once

#include <cstdint>
#include <vector>

#include "gcnet/nn/backprop.hpp"
#include "gcnet/nn/network.hpp"

namespace gcnet::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // L2 term added to the gradient
};

/// First and second moment buffers, shaped like the network parameters.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  Gradients m;
  Gradients v;

  static AdamState for_network(const Network& net, AdamConfig config = {});
};

/// One bias-corrected Adam update in place. Throws NumericalError on a non-finite gradient.
void adam_step(AdamState& state, Network& net, const Gradients& grads, double lr);

/// Multiplies the learning rate by `factor` after `patience` consecutive epochs
/// without an improvement of the monitored loss below the best seen so far.
class PlateauScheduler {
 public:
  PlateauScheduler(double initial_lr, double factor = 0.9, int patience = 10, double threshold = 0.0);

  /// Records one epoch's loss and returns the learning rate for the next epoch.
  double step(double epoch_loss);

  double learning_rate() const { return lr_; }
  double best() const { return best_; }
  int bad_epochs() const { return bad_epochs_; }
  int reductions() const { return reductions_; }

 private:
  double lr_;
  double factor_;
  int patience_;
  double threshold_;
  double best_;
  int bad_epochs_ = 0;
  int reductions_ = 0;
};

}  // namespace gcnet::nn
