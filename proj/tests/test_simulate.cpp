#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "epinet/simulate.hpp"
#include "oracles.hpp"

using namespace epinet;

namespace {

SimConfig quick(double t_end, Method m = Method::RK4Fixed) {
  SimConfig cfg;
  cfg.t_end = t_end;
  cfg.method = m;
  return cfg;
}

}  // namespace

TEST_CASE("the origin is an equilibrium") {
  const auto net = oracles::figure_sir().lower();
  const std::vector<double> x0{0.0, 0.0, 0.0};
  const auto traj =
      integrate(net, x0, InputSignal::constant(0.0), quick(50.0));
  for (const auto& row : traj.states)
    for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("SIR with high inflow settles at the endemic equilibrium") {
  const auto model = oracles::figure_sir();
  const auto part = partition_UL(model);
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto traj = integrate(model.lower(), x0, InputSignal::constant(12.0),
                              quick(600.0), &part);
  // endemic values from the closed form
  const double r0 = 12.0 / 3.525;
  const std::vector<double> xe{235.0, 0.015 * (r0 - 1.0) / 2e-4,
                               0.032 * (r0 - 1.0) / 2e-4};
  const auto& last = traj.states.back();
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(last[i] - xe[i]) / xe[i] < 0.01);
  // observables recorded alongside
  CHECK(traj.vU.back() == doctest::Approx(last[0] + last[1]));
  CHECK(traj.vL.back() == doctest::Approx(last[1]));
}

TEST_CASE("SIR with low inflow eradicates the infection") {
  const auto model = oracles::figure_sir();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto traj =
      integrate(model.lower(), x0, InputSignal::constant(3.0), quick(2000.0));
  CHECK(traj.states.back()[1] < 1e-3);
  CHECK(traj.N.back() == doctest::Approx(200.0).epsilon(0.005));

  const auto peak = detect_peak(traj, 1);
  REQUIRE(peak.has_value());
  CHECK(peak->time > 0.0);
  CHECK(peak->value > 200.0);  // grows beyond I(0) while S > H

  const int comps[1] = {1};
  const double targets[1] = {0.0};
  const auto conv = detect_convergence(traj, comps, targets, 1e-3, 100.0);
  CHECK(conv.converged);
}

TEST_CASE("recorded N follows the closed-form population decay") {
  for (const auto& model : oracles::full_catalog()) {
    const auto net = model.lower();
    double inflow_gain = 0.0;
    for (int i = 0; i < net.size(); ++i) inflow_gain += net.kappa(i).coeff();
    const double B = 9.0;
    const double mu = model.params.mu;
    std::vector<double> x0(net.size(), 0.0);
    x0[0] = 500.0;
    x0[1] = 120.0;
    const double n0 = 620.0;
    const auto traj =
        integrate(net, x0, InputSignal::constant(B), quick(400.0));
    const double n_inf = inflow_gain * B / mu;
    for (std::size_t k = 0; k < traj.samples(); ++k) {
      const double expect =
          n_inf + (n0 - n_inf) * std::exp(-mu * traj.times[k]);
      CHECK(std::abs(traj.N[k] - expect) / expect < 1e-6);
    }
  }
}

TEST_CASE("population is nonincreasing without input") {
  std::mt19937_64 g = oracles::rng(211);
  for (const auto& model : oracles::full_catalog()) {
    const auto net = model.lower();
    const auto x0 = oracles::random_box_state(g, net.size(), 900.0);
    const auto traj =
        integrate(net, x0, InputSignal::constant(0.0), quick(300.0));
    for (std::size_t k = 1; k < traj.samples(); ++k)
      CHECK(traj.N[k] <= traj.N[k - 1] + 1e-12);
  }
}

TEST_CASE("piecewise input keeps the asymptotic population gain") {
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto B = InputSignal::piecewise_constant({{0.0, 12.0}, {300.0, 3.0}});
  const auto traj = integrate(net, x0, B, quick(1500.0));
  // limsup N <= sup B / mu once the transient passed
  const double bound = 12.0 / 0.015;
  double trailing_max = 0.0;
  for (std::size_t k = 0; k < traj.samples(); ++k)
    if (traj.times[k] >= 750.0) trailing_max = std::max(trailing_max, traj.N[k]);
  CHECK(trailing_max <= bound * (1.0 + 1e-9));
}

TEST_CASE("piecewise steps stay exact across unaligned breakpoints") {
  // N follows a piecewise exponential; the breakpoint does not sit on the
  // recording grid, so the integrator must split the step there.
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const double t_b = 100.0055;
  const auto B = InputSignal::piecewise_constant({{0.0, 12.0}, {t_b, 3.0}});
  const auto traj = integrate(net, x0, B, quick(200.0));
  const double mu = 0.015;
  for (std::size_t k = 0; k < traj.samples(); ++k) {
    const double t = traj.times[k];
    double expect;
    if (t <= t_b) {
      expect = 800.0 + (970.0 - 800.0) * std::exp(-mu * t);
    } else {
      const double n_b = 800.0 + 170.0 * std::exp(-mu * t_b);
      expect = 200.0 + (n_b - 200.0) * std::exp(-mu * (t - t_b));
    }
    CHECK(std::abs(traj.N[k] - expect) / expect < 1e-6);
  }
}

TEST_CASE("callback inputs are evaluated at the stage times") {
  // dN/dt = -mu*N + B(t) with B(t) = 12*exp(-r*t) has the closed form
  // N(t) = N0*exp(-mu*t) + 12*(exp(-r*t) - exp(-mu*t))/(mu - r).
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const double r = 0.01;
  const auto B =
      InputSignal::callback([r](double t) { return 12.0 * std::exp(-r * t); });
  const auto traj = integrate(net, x0, B, quick(400.0));
  const double mu = 0.015;
  for (std::size_t k = 0; k < traj.samples(); ++k) {
    const double t = traj.times[k];
    const double expect = 970.0 * std::exp(-mu * t) +
                          12.0 * (std::exp(-r * t) - std::exp(-mu * t)) /
                              (mu - r);
    CHECK(std::abs(traj.N[k] - expect) / expect < 1e-6);
  }
}

TEST_CASE("the adaptive integrator agrees with the fixed one") {
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto a = integrate(net, x0, InputSignal::constant(12.0), quick(600.0));
  const auto b = integrate(net, x0, InputSignal::constant(12.0),
                           quick(600.0, Method::RK45Adaptive));
  REQUIRE(a.samples() == b.samples());
  for (std::size_t k = 0; k < a.samples(); ++k)
    for (int i = 0; i < 3; ++i)
      CHECK(a.states[k][i] ==
            doctest::Approx(b.states[k][i]).epsilon(1e-6));
}

TEST_CASE("identical inputs give bit-identical trajectories") {
  const auto model = oracles::figure_seis();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto a = integrate(net, x0, InputSignal::constant(12.0), quick(200.0));
  const auto b = integrate(net, x0, InputSignal::constant(12.0), quick(200.0));
  REQUIRE(a.samples() == b.samples());
  for (std::size_t k = 0; k < a.samples(); ++k)
    for (int i = 0; i < 3; ++i)
      CHECK(a.states[k][i] == b.states[k][i]);  // exact equality
}

TEST_CASE("steep callback rates stay inside the orthant") {
  NetworkBuilder b(2);
  b.transfer_down(0, RateFunction::callback([](std::span<const double> x) {
                    return x[0] / (0.01 + x[0]);
                  }),
                  RateFunction::zero(), 0.0);
  b.dissipation(0, ScalarFn::linear(0.1));
  const auto net = b.build();
  const std::vector<double> x0{1.0, 0.0};
  SimConfig cfg;
  cfg.t_end = 5.0;
  cfg.dt = 0.5;  // coarse on purpose
  cfg.record_stride = 1;
  const auto traj = integrate(net, x0, InputSignal::constant(0.0), cfg);
  for (const auto& row : traj.states)
    for (double v : row) CHECK(v >= 0.0);
}

TEST_CASE("a rate violating facet invariance aborts with a diagnostic") {
  NetworkBuilder b(2);
  b.transfer_down(0, RateFunction::callback([](std::span<const double>) {
                    return 0.5;  // keeps consuming at the facet
                  }),
                  RateFunction::zero(), 0.0);
  const auto net = b.build();
  const std::vector<double> x0{0.1, 0.0};
  CHECK_THROWS_AS(
      (void)integrate(net, x0, InputSignal::constant(0.0), quick(10.0)),
      IntegrationError);
}

TEST_CASE("peak detection classifies the trace shapes") {
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  {
    // S(0) < H with no inflow: I decays monotonically
    const std::vector<double> x0{100.0, 50.0, 0.0};
    const auto traj =
        integrate(net, x0, InputSignal::constant(0.0), quick(400.0));
    CHECK_FALSE(detect_peak(traj, 1).has_value());
  }
  {
    // constant trajectory
    const std::vector<double> x0{0.0, 0.0, 0.0};
    const auto traj =
        integrate(net, x0, InputSignal::constant(0.0), quick(50.0));
    CHECK_FALSE(detect_peak(traj, 1).has_value());
  }
}

TEST_CASE("smaller inflow peaks no later") {
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  double prev_time = 0.0;
  for (double B : {0.5, 1.75, 3.0}) {
    const auto traj =
        integrate(net, x0, InputSignal::constant(B), quick(200.0));
    const auto peak = detect_peak(traj, 1);
    REQUIRE(peak.has_value());
    CHECK(peak->time >= prev_time);
    prev_time = peak->time;
  }
}

TEST_CASE("convergence detector handles targets and windows") {
  const auto model = oracles::figure_sir();
  const auto part = partition_UL(model);
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto traj = integrate(model.lower(), x0, InputSignal::constant(12.0),
                              quick(1200.0), &part);
  const int comps[1] = {1};
  {
    const double targets[1] = {0.0};
    CHECK_FALSE(detect_convergence(traj, comps, targets, 1e-3, 100.0)
                    .converged);
  }
  {
    const double endemic_i = 180.31914893617022;
    const double targets[1] = {endemic_i};
    const auto conv =
        detect_convergence(traj, comps, targets, 0.01 * endemic_i, 100.0);
    CHECK(conv.converged);
    CHECK(conv.time < 1100.0);
  }
}

TEST_CASE("zero trajectories converge immediately") {
  const auto net = oracles::figure_sir().lower();
  const std::vector<double> x0{0.0, 0.0, 0.0};
  const auto traj =
      integrate(net, x0, InputSignal::constant(0.0), quick(50.0));
  const int comps[3] = {0, 1, 2};
  const double targets[3] = {0.0, 0.0, 0.0};
  const auto conv = detect_convergence(traj, comps, targets, 1e-9, 10.0);
  CHECK(conv.converged);
  CHECK(conv.time == 0.0);
}

TEST_CASE("csv export carries labels, observables and full precision") {
  const auto model = oracles::figure_sir();
  const auto part = partition_UL(model);
  const std::vector<double> x0{700.0, 200.0, 70.0};
  SimConfig cfg = quick(1.0);
  cfg.record_stride = 10;
  const auto traj =
      integrate(model.lower(), x0, InputSignal::constant(12.0), cfg, &part);
  std::ostringstream os;
  write_csv(traj, os);
  const std::string text = os.str();
  CHECK(text.rfind("t,S,I,R,N,V_U,V_L\n", 0) == 0);
  // first data row carries the initial condition exactly
  std::istringstream is(text);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(row == "0,700,200,70,970,900,200");
  // a later row keeps 17 significant digits
  std::getline(is, row);
  CHECK(row.find('.') != std::string::npos);
}

TEST_CASE("the log monitor tracks the infected aggregate") {
  const auto model = oracles::figure_seis();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto traj =
      integrate(net, x0, InputSignal::constant(3.0), quick(500.0));
  const int comps[2] = {1, 2};
  const auto mon = log_monitor(traj, comps);
  REQUIRE(mon.size() == traj.samples());
  for (std::size_t k = 0; k < mon.size(); ++k) {
    CHECK(mon[k] ==
          doctest::Approx(std::log1p(traj.states[k][1] + traj.states[k][2])));
  }
}

TEST_CASE("fixed-step results agree with a fine Euler oracle") {
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  const auto traj =
      integrate(net, x0, InputSignal::constant(12.0), quick(600.0));
  const auto euler =
      oracles::euler_raw(model, x0, 12.0, 0.0, 600.0, 1e-4);
  const auto& last = traj.states.back();
  for (int i = 0; i < 3; ++i) {
    const double denom = std::max({std::abs(last[i]), std::abs(euler[i]), 1.0});
    CHECK(std::abs(last[i] - euler[i]) / denom < 1e-3);
  }
}

TEST_CASE("sim configs parse with defaults and reject bad values") {
  {
    const auto t = toml::parse("[sim]\nt_end = 600.0\n");
    const auto cfg = sim_config_from_config(toml::get_table(t, "sim", ""));
    CHECK(cfg.t_end == 600.0);
    CHECK(cfg.dt == 0.01);
    CHECK(cfg.record_stride == 10);
    CHECK(cfg.method == Method::RK4Fixed);
  }
  {
    const auto t = toml::parse(
        "[sim]\nt_end = 10.0\ndt = 0.5\nmethod = \"rk45\"\nrecord_stride = 2\n");
    const auto cfg = sim_config_from_config(toml::get_table(t, "sim", ""));
    CHECK(cfg.method == Method::RK45Adaptive);
    CHECK(cfg.dt == 0.5);
  }
  {
    const auto t = toml::parse("[sim]\nt_end = 10.0\nmethod = \"euler\"\n");
    CHECK_THROWS_AS((void)sim_config_from_config(
                        toml::get_table(t, "sim", "")),
                    ConfigError);
  }
  {
    const auto t = toml::parse("[sim]\nt_end = -5.0\n");
    CHECK_THROWS_AS((void)sim_config_from_config(
                        toml::get_table(t, "sim", "")),
                    ConfigError);
  }
}

TEST_CASE("input configs accept constants and step lists") {
  {
    const auto t = toml::parse("[input]\nB = 12.0\n");
    const auto sig = input_from_config(toml::get_table(t, "input", ""));
    CHECK(sig.kind() == InputSignal::Kind::Constant);
    CHECK(sig.value(5.0) == 12.0);
  }
  {
    const auto t = toml::parse("[input]\nB = [[0.0, 12.0], [300.0, 3.0]]\n");
    const auto sig = input_from_config(toml::get_table(t, "input", ""));
    CHECK(sig.kind() == InputSignal::Kind::PiecewiseConstant);
    CHECK(sig.value(299.0) == 12.0);
    CHECK(sig.value(301.0) == 3.0);
  }
  {
    const auto t = toml::parse("[input]\nB = [[0.0, 12.0], [300.0]]\n");
    CHECK_THROWS_AS((void)input_from_config(toml::get_table(t, "input", "")),
                    ConfigError);
  }
  {
    const auto t = toml::parse("[input]\nC = 1.0\n");
    CHECK_THROWS_AS((void)input_from_config(toml::get_table(t, "input", "")),
                    ConfigError);
  }
}
