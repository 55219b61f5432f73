#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epinet/network.hpp"
#include "epinet/threshold.hpp"

namespace epinet {

enum class Method { RK4Fixed, RK45Adaptive };

struct SimConfig {
  double t_end = 600.0;
  double dt = 0.01;  ///< base step; also the recording grid unit
  Method method = Method::RK4Fixed;
  double rel_tol = 1e-8;  ///< RK45 error control
  double abs_tol = 1e-9;  ///< RK45 error control and orthant projection band
  int record_stride = 10;

  void validate() const;
};

struct PeakEvent {
  double time = 0.0;
  int component = -1;
  double value = 0.0;
};

struct ConvergenceEvent {
  double time = 0.0;  ///< entry time of the final in-tolerance stretch
  int component = -1;
  double target = 0.0;
};

/// Recorded solution samples plus derived observables. States are clamped to
/// the orthant on output; the pre-projection violation never exceeds the
/// integrator's absolute tolerance.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // one row per time
  std::vector<std::string> labels;

  std::vector<double> N;   ///< population total per sample
  std::vector<double> vU;  ///< partition observables; empty without partition
  std::vector<double> vL;

  std::vector<PeakEvent> peaks;
  std::vector<ConvergenceEvent> convergences;

  std::size_t samples() const { return times.size(); }
  double component(std::size_t row, int c) const { return states[row][c]; }
};

/// Integrates the network from x0 under the broadcast input signal. The
/// recording grid is t_k = k * dt * record_stride; piecewise-constant input
/// breakpoints force exact step alignment. Deterministic: identical inputs
/// produce bit-identical trajectories on the same platform.
Trajectory integrate(const BalancedNetwork& net, std::span<const double> x0,
                     const InputSignal& input, const SimConfig& cfg,
                     const Partition* partition = nullptr);

/// First interior local maximum of one component that strictly exceeds both
/// ends of its rise/fall window; nullopt for monotone or constant traces.
std::optional<PeakEvent> detect_peak(const Trajectory& traj, int component);

struct ConvergenceResult {
  bool converged = false;
  double time = 0.0;  ///< earliest time after which all stay in tolerance
};

/// True iff every listed component stays within atol of its target over the
/// trailing `window` time units of the trajectory.
ConvergenceResult detect_convergence(const Trajectory& traj,
                                     std::span<const int> components,
                                     std::span<const double> targets,
                                     double atol, double window);

/// CSV export: header `t,<labels...>,N,V_U,V_L`, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);

/// Optional monitor log(1 + sum of the listed components) along the
/// trajectory.
std::vector<double> log_monitor(const Trajectory& traj,
                                std::span<const int> components);

/// Parses an `[input]` table: either `B = <number>` or
/// `B = [[t0, v0], [t1, v1], ...]`.
InputSignal input_from_config(const toml::Table& input_table,
                              const std::string& path_prefix = "input");

/// Parses a `[sim]` table with optional keys t_end, dt, method
/// ("rk4"|"rk45"), rel_tol, abs_tol, record_stride.
SimConfig sim_config_from_config(const toml::Table& sim_table,
                                 const std::string& path_prefix = "sim");

}  // namespace epinet
