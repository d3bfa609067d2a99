#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gcnet/common/error.hpp"

namespace gcnet::dyn {

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;

  const State& final_state() const { return states.back(); }
};

/// Step grid used by rk4_integrate: uniform steps of `dt` from t0, the last step
/// shortened so the grid ends exactly on tf.
inline std::vector<double> rk4_time_grid(double t0, double tf, double dt) {
  if (!(dt > 0.0)) throw ConfigError("rk4: dt must be > 0");
  if (!(tf >= t0)) throw ConfigError("rk4: tf must be >= t0");
  std::vector<double> grid{t0};
  if (tf == t0) return grid;
  const auto steps = static_cast<long>(std::ceil((tf - t0) / dt - 1e-9));
  for (long k = 1; k < steps; ++k) grid.push_back(t0 + static_cast<double>(k) * dt);
  grid.push_back(tf);
  return grid;
}

template <class State>
bool all_finite(const State& x) {
  return x.allFinite();
}

/// One classical Runge-Kutta step of size h for x' = f(t, x).
template <class State, class Fn>
State rk4_step(Fn& f, double t, const State& x, double h) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * h, State(x + 0.5 * h * k1));
  const State k3 = f(t + 0.5 * h, State(x + 0.5 * h * k2));
  const State k4 = f(t + h, State(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates x' = f(t, x) from t0 to tf and returns every step.
/// Throws NumericalError with the time stamp when the state becomes non-finite.
template <class State, class Fn>
Trajectory<State> rk4_integrate(Fn&& f, const State& x0, double t0, double tf, double dt) {
  const std::vector<double> grid = rk4_time_grid(t0, tf, dt);
  Trajectory<State> traj;
  traj.times = grid;
  traj.states.reserve(grid.size());
  traj.states.push_back(x0);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    State next = rk4_step(f, grid[k], traj.states.back(), grid[k + 1] - grid[k]);
    if (!all_finite(next)) throw NumericalError(fmt::format("rk4: non-finite state at t = {:.17g}", grid[k + 1]));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

/// `steps` equal steps over [t0, tf]; calls observe(k, t_k, x_k) for k = 0..steps.
/// The time of step k is t0 + k (tf - t0) / steps, exact at both ends.
template <class State, class Fn, class Observer>
State rk4_uniform(Fn&& f, const State& x0, double t0, double tf, int steps, Observer&& observe) {
  State x = x0;
  observe(0, t0, x);
  const double span = tf - t0;
  for (int k = 0; k < steps; ++k) {
    const double ta = t0 + span * static_cast<double>(k) / steps;
    const double tb = k + 1 == steps ? tf : t0 + span * static_cast<double>(k + 1) / steps;
    x = rk4_step(f, ta, x, tb - ta);
    if (!all_finite(x)) throw NumericalError(fmt::format("rk4: non-finite state at t = {:.17g}", tb));
    observe(k + 1, tb, x);
  }
  return x;
}

template <class State, class Fn>
State rk4_uniform(Fn&& f, const State& x0, double t0, double tf, int steps) {
  return rk4_uniform(std::forward<Fn>(f), x0, t0, tf, steps, [](int, double, const State&) {});
}


/// Like rk4_uniform, but any step across which one of the scalar `guards(x)` changes sign
/// is split at the crossing, so that a right-hand side with kinks on the guard surfaces
/// keeps its fourth-order accuracy. Grid times and the observer calls are unchanged.
/// Crossing times are appended to `crossings` when it is non-null.
template <class State, class Fn, class Guards, class Observer>
State rk4_uniform_guarded(Fn&& f, Guards&& guards, const State& x0, double t0, double tf, int steps,
                          Observer&& observe, std::vector<double>* crossings = nullptr) {
  State x = x0;
  observe(0, t0, x);
  const double span = tf - t0;
  for (int k = 0; k < steps; ++k) {
    const double ta = t0 + span * static_cast<double>(k) / steps;
    const double tb = k + 1 == steps ? tf : t0 + span * static_cast<double>(k + 1) / steps;
    double t = ta;
    // A smooth trajectory crosses each guard at most a handful of times per step.
    for (int pieces = 0; pieces < 16 && t < tb; ++pieces) {
      const double h = tb - t;
      const auto ga = guards(x);
      State xb = rk4_step(f, t, x, h);
      const auto gb = guards(xb);
      double first = h;
      for (std::size_t i = 0; i < ga.size(); ++i) {
        if ((ga[i] < 0.0) == (gb[i] < 0.0)) continue;
        // Illinois regula falsi on the step length; keep the bracket end past the crossing.
        double lo = 0.0, hi = h, glo = ga[i], ghi = gb[i];
        int side = 0;
        for (int it = 0; it < 60 && hi - lo > 1e-14 * (1.0 + std::abs(t)); ++it) {
          const double s = (lo * ghi - hi * glo) / (ghi - glo);
          const double mid = (s > lo && s < hi) ? s : 0.5 * (lo + hi);
          const double gm = guards(rk4_step(f, t, x, mid))[i];
          if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
            if (side == -1) ghi *= 0.5;
            side = -1;
          } else {
            hi = mid;
            ghi = gm;
            if (side == 1) glo *= 0.5;
            side = 1;
          }
        }
        first = std::min(first, hi);
      }
      if (first < h) {
        x = rk4_step(f, t, x, first);
        t += first;
        if (crossings) crossings->push_back(t);
      } else {
        x = std::move(xb);
        t = tb;
      }
      if (!all_finite(x)) throw NumericalError(fmt::format("rk4: non-finite state at t = {:.17g}", t));
    }
    if (t < tb) {
      x = rk4_step(f, t, x, tb - t);
      if (!all_finite(x)) throw NumericalError(fmt::format("rk4: non-finite state at t = {:.17g}", tb));
    }
    observe(k + 1, tb, x);
  }
  return x;
}

}  // namespace gcnet::dyn
