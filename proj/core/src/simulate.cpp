#include "epinet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace epinet {

void SimConfig::validate() const {
  if (!(t_end > 0.0)) throw Error("t_end must be positive");
  if (!(dt > 0.0) || dt > t_end) throw Error("dt must lie in (0, t_end]");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw Error("tolerances must be positive");
  if (record_stride < 1) throw Error("record_stride must be >= 1");
}

namespace {

using State = std::vector<double>;

struct FieldEval {
  const BalancedNetwork& net;
  const InputSignal& input;
  std::vector<double> w;  // broadcast buffer
  // Piecewise-constant inputs are frozen per breakpoint segment so that a
  // stage landing exactly on a breakpoint still reads the segment's value.
  std::optional<double> frozen;

  State operator()(double t, const State& x) {
    const double b = frozen ? *frozen : input.value(t);
    std::fill(w.begin(), w.end(), b);
    return net.vector_field(x, w);
  }
};

void axpy(State& y, double a, const State& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool finite(const State& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// Worst orthant violation of a candidate state (0 when inside).
double orthant_violation(const State& x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  return worst;
}

void project_orthant(State& x) {
  for (double& v : x) v = std::max(v, 0.0);
}

State rk4_step(FieldEval& f, double t, const State& x, double h) {
  State k1 = f(t, x);
  State x2 = x;
  axpy(x2, 0.5 * h, k1);
  State k2 = f(t + 0.5 * h, x2);
  State x3 = x;
  axpy(x3, 0.5 * h, k2);
  State k3 = f(t + 0.5 * h, x3);
  State x4 = x;
  axpy(x4, h, k3);
  State k4 = f(t + h, x4);
  State out = x;
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Dormand-Prince 5(4) pair; returns the 5th-order solution and the embedded
// error estimate.
std::pair<State, double> dopri_step(FieldEval& f, double t, const State& x,
                                    double h, double rel_tol, double abs_tol) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const std::size_t n = x.size();
  State k1 = f(t, x);
  State y = x;
  axpy(y, h * a21, k1);
  State k2 = f(t + h / 5.0, y);
  y = x;
  axpy(y, h * a31, k1);
  axpy(y, h * a32, k2);
  State k3 = f(t + 3.0 * h / 10.0, y);
  y = x;
  axpy(y, h * a41, k1);
  axpy(y, h * a42, k2);
  axpy(y, h * a43, k3);
  State k4 = f(t + 4.0 * h / 5.0, y);
  y = x;
  axpy(y, h * a51, k1);
  axpy(y, h * a52, k2);
  axpy(y, h * a53, k3);
  axpy(y, h * a54, k4);
  State k5 = f(t + 8.0 * h / 9.0, y);
  y = x;
  axpy(y, h * a61, k1);
  axpy(y, h * a62, k2);
  axpy(y, h * a63, k3);
  axpy(y, h * a64, k4);
  axpy(y, h * a65, k5);
  State k6 = f(t + h, y);

  State out = x;
  for (std::size_t i = 0; i < n; ++i)
    out[i] += h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                   b6 * k6[i]);
  State k7 = f(t + h, out);

  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                          e6 * k6[i] + e7 * k7[i]);
    const double scale =
        abs_tol + rel_tol * std::max(std::abs(x[i]), std::abs(out[i]));
    err = std::max(err, std::abs(e) / scale);
  }
  return {std::move(out), err};
}

// Advances from t0 to t1 (one recording cell boundary to the next), splitting
// at input breakpoints and halving on orthant violations beyond the
// projection band. `h_adaptive` persists the RK45 step between calls.
void advance_cell(FieldEval& f, const SimConfig& cfg, double t0, double t1,
                  State& x, double& h_adaptive) {
  const double min_step = 1e-12 * cfg.t_end;
  std::vector<double> stops = f.input.breakpoints_in(t0, t1);
  stops.push_back(t1);

  double t = t0;
  double projected_mass = 0.0;
  for (double stop : stops) {
    if (f.input.kind() == InputSignal::Kind::PiecewiseConstant)
      f.frozen = f.input.value(0.5 * (t + stop));
    while (t < stop - 1e-15 * std::max(1.0, std::abs(stop))) {
      const bool adaptive = cfg.method == Method::RK45Adaptive;
      double h = std::min(adaptive ? h_adaptive : cfg.dt, stop - t);
      bool accepted = false;
      while (!accepted) {
        if (h < min_step)
          throw IntegrationError(
              "step size underflow at t = " + std::to_string(t) +
              "; the state is being driven outside the nonnegative orthant");
        State candidate;
        bool ok;
        if (!adaptive) {
          candidate = rk4_step(f, t, x, h);
          ok = orthant_violation(candidate) <= cfg.abs_tol;
        } else {
          auto [cand, err] =
              dopri_step(f, t, x, h, cfg.rel_tol, cfg.abs_tol);
          candidate = std::move(cand);
          ok = std::isfinite(err) && err <= 1.0 &&
               orthant_violation(candidate) <= cfg.abs_tol;
          if (ok) {
            const double grow =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2,
                           5.0);
            h_adaptive = std::clamp(h * grow, min_step, t1 - t0);
          }
        }
        if (!finite(candidate))
          throw IntegrationError("state became non-finite at t = " +
                                 std::to_string(t));
        if (ok) {
          // Projection absorbs discretization error only; a field that keeps
          // pushing outward would otherwise creep along the facet in
          // vanishing steps.
          projected_mass += orthant_violation(candidate);
          if (projected_mass > 10.0 * cfg.abs_tol)
            throw IntegrationError(
                "the vector field keeps driving the state outside the "
                "nonnegative orthant near t = " + std::to_string(t));
          project_orthant(candidate);
          x = std::move(candidate);
          t += h;
          accepted = true;
        } else {
          h *= 0.5;
        }
      }
    }
    t = stop;
  }
}

}  // namespace

Trajectory integrate(const BalancedNetwork& net, std::span<const double> x0,
                     const InputSignal& input, const SimConfig& cfg,
                     const Partition* partition) {
  cfg.validate();
  if (static_cast<int>(x0.size()) != net.size())
    throw DimensionError("initial state has " + std::to_string(x0.size()) +
                         " components, network has " +
                         std::to_string(net.size()));
  for (double v : x0)
    if (v < 0.0) throw Error("initial state must be in the nonnegative orthant");

  FieldEval f{net, input, std::vector<double>(net.size(), 0.0),
              std::nullopt};

  const double record_dt = cfg.dt * cfg.record_stride;
  const auto cells = static_cast<std::size_t>(
      std::ceil(cfg.t_end / record_dt - 1e-9));

  Trajectory traj;
  traj.labels = net.labels();
  traj.times.reserve(cells + 1);
  traj.states.reserve(cells + 1);
  traj.N.reserve(cells + 1);

  State x(x0.begin(), x0.end());
  const auto record = [&](double t, const State& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    double total = 0.0;
    for (double v : s) total += v;
    traj.N.push_back(total);
    if (partition) {
      traj.vU.push_back(partition->vU(s));
      traj.vL.push_back(partition->vL(s));
    }
  };
  record(0.0, x);

  double h_adaptive = cfg.dt;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const double t0 = cell * record_dt;
    const double t1 = std::min((cell + 1) * record_dt, cfg.t_end);
    advance_cell(f, cfg, t0, t1, x, h_adaptive);
    record(t1, x);
  }
  return traj;
}

std::optional<PeakEvent> detect_peak(const Trajectory& traj, int component) {
  const auto m = traj.samples();
  if (m < 3) return std::nullopt;
  const auto y = [&](std::size_t k) { return traj.component(k, component); };

  // Descend to the first local minimum, ride the ascent (plateaus included),
  // and report the first maximum that is followed by a strict fall.
  std::size_t i = 0;
  while (i + 1 < m && y(i + 1) <= y(i)) ++i;
  if (i + 1 >= m) return std::nullopt;  // never rises

  std::size_t peak = i + 1;
  std::size_t j = i + 1;
  while (j + 1 < m && y(j + 1) >= y(j)) {
    ++j;
    if (y(j) > y(peak)) peak = j;
  }
  if (j + 1 >= m) return std::nullopt;  // rises to the end, no fall
  return PeakEvent{traj.times[peak], component, y(peak)};
}

ConvergenceResult detect_convergence(const Trajectory& traj,
                                     std::span<const int> components,
                                     std::span<const double> targets,
                                     double atol, double window) {
  if (components.size() != targets.size())
    throw DimensionError("component and target lists differ in length");
  if (!(atol > 0.0)) throw Error("atol must be positive");
  const auto m = traj.samples();
  if (m == 0) return {false, 0.0};

  const double t_end = traj.times.back();
  const double t_from = std::max(0.0, t_end - window);

  // Earliest time after which every component stays within tolerance.
  double enter = 0.0;
  bool inside = false;
  for (std::size_t k = 0; k < m; ++k) {
    bool ok = true;
    for (std::size_t c = 0; c < components.size(); ++c) {
      if (std::abs(traj.component(k, components[c]) - targets[c]) > atol) {
        ok = false;
        break;
      }
    }
    if (ok && !inside) {
      inside = true;
      enter = traj.times[k];
    } else if (!ok) {
      inside = false;
    }
  }
  const bool converged = inside && enter <= t_from + 1e-12;
  return {converged, converged ? enter : 0.0};
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  os << "t";
  for (const auto& label : traj.labels) os << "," << label;
  os << ",N,V_U,V_L\n";
  std::ostringstream line;
  line.precision(17);
  for (std::size_t k = 0; k < traj.samples(); ++k) {
    line.str("");
    line << traj.times[k];
    for (double v : traj.states[k]) line << "," << v;
    line << "," << traj.N[k];
    line << "," << (traj.vU.empty() ? 0.0 : traj.vU[k]);
    line << "," << (traj.vL.empty() ? 0.0 : traj.vL[k]);
    os << line.str() << "\n";
  }
}

std::vector<double> log_monitor(const Trajectory& traj,
                                std::span<const int> components) {
  std::vector<double> out;
  out.reserve(traj.samples());
  for (std::size_t k = 0; k < traj.samples(); ++k) {
    double s = 0.0;
    for (int c : components) s += traj.component(k, c);
    out.push_back(std::log1p(s));
  }
  return out;
}

InputSignal input_from_config(const toml::Table& t, const std::string& path) {
  toml::reject_unknown_keys(t, {"B"}, path);
  const toml::Value* v = toml::find(t, "B");
  if (!v) throw ConfigError(path + ".B", "missing required field");
  if (v->is_number()) return InputSignal::constant(v->as_number());
  if (v->is_array()) {
    std::vector<std::pair<double, double>> steps;
    for (const auto& entry : v->as_array()) {
      if (!entry.is_array() || entry.as_array().size() != 2 ||
          !entry.as_array()[0].is_number() || !entry.as_array()[1].is_number())
        throw ConfigError(path + ".B",
                          "piecewise input must be [[t0, v0], [t1, v1], ...]");
      steps.emplace_back(entry.as_array()[0].as_number(),
                         entry.as_array()[1].as_number());
    }
    try {
      return InputSignal::piecewise_constant(std::move(steps));
    } catch (const Error& e) {
      throw ConfigError(path + ".B", e.what());
    }
  }
  throw ConfigError(path + ".B", "expected a number or an array of steps");
}

SimConfig sim_config_from_config(const toml::Table& t,
                                 const std::string& path) {
  toml::reject_unknown_keys(
      t, {"t_end", "dt", "method", "rel_tol", "abs_tol", "record_stride"},
      path);
  SimConfig cfg;
  if (toml::find(t, "t_end")) cfg.t_end = toml::get_number(t, "t_end", path);
  if (toml::find(t, "dt")) cfg.dt = toml::get_number(t, "dt", path);
  if (toml::find(t, "method")) {
    const std::string m = toml::get_string(t, "method", path);
    if (m == "rk4")
      cfg.method = Method::RK4Fixed;
    else if (m == "rk45")
      cfg.method = Method::RK45Adaptive;
    else
      throw ConfigError(path + ".method", "expected \"rk4\" or \"rk45\"");
  }
  if (toml::find(t, "rel_tol")) cfg.rel_tol = toml::get_number(t, "rel_tol", path);
  if (toml::find(t, "abs_tol")) cfg.abs_tol = toml::get_number(t, "abs_tol", path);
  if (toml::find(t, "record_stride"))
    cfg.record_stride =
        static_cast<int>(toml::get_int(t, "record_stride", path));
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return cfg;
}

}  // namespace epinet
