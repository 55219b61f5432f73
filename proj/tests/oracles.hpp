// Test-side oracles, independent of the library's network assembly: the raw
// model right-hand sides coded directly from the equations, brute-force
// minimizers, and a scalar bisection root-finder. Used to compute expected
// values that the implementation must reproduce.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "epinet/models.hpp"
#include "epinet/network.hpp"

namespace oracles {

using epinet::EpidemicModel;
using epinet::EpidemicParams;
using epinet::Family;

// Raw ODE right-hand side per family, written out compartment by compartment.
inline std::vector<double> raw_rhs(const EpidemicModel& m,
                                   std::span<const double> x, double B) {
  const auto& p = m.params;
  switch (m.family) {
    case Family::SIR: {
      const double S = x[0], I = x[1], R = x[2];
      return {B - p.mu * S - p.beta * I * S,
              p.beta * I * S - p.gamma * I - p.mu * I,
              p.gamma * I - p.mu * R};
    }
    case Family::SEIS: {
      const double S = x[0], E = x[1], I = x[2];
      const double eps = *p.epsilon;
      return {B - p.mu * S - p.beta * I * S + p.gamma * I,
              p.beta * I * S - eps * E - p.mu * E,
              eps * E - p.gamma * I - p.mu * I};
    }
    case Family::MSIR: {
      const double M = x[0], S = x[1], I = x[2], R = x[3];
      const double d = *p.delta;
      return {B - d * M - p.mu * M,
              d * M - p.mu * S - p.beta * I * S,
              p.beta * I * S - p.gamma * I - p.mu * I,
              p.gamma * I - p.mu * R};
    }
    case Family::SEIR: {
      const double S = x[0], E = x[1], I = x[2], R = x[3];
      const double eps = *p.epsilon;
      return {B - p.mu * S - p.beta * I * S,
              p.beta * I * S - eps * E - p.mu * E,
              eps * E - p.gamma * I - p.mu * I,
              p.gamma * I - p.mu * R};
    }
    case Family::SIR_VACC_A: {
      const double S = x[0], I = x[1], R = x[2], A = x[3];
      const double P = *p.P;
      return {B * (1.0 - P) - p.mu * S - p.beta * I * S,
              p.beta * I * S - p.gamma * I - p.mu * I,
              p.gamma * I - p.mu * R,
              B * P - p.mu * A};
    }
    case Family::SIR_VACC_R: {
      const double S = x[0], I = x[1], R = x[2];
      const double P = *p.P;
      return {B * (1.0 - P) - p.mu * S - p.beta * I * S,
              p.beta * I * S - p.gamma * I - p.mu * I,
              p.gamma * I - p.mu * R + B * P};
    }
    case Family::SIR_VACC_S: {
      const double S = x[0], I = x[1], R = x[2], A = x[3];
      const double r = *p.rho;
      return {B - r * S - p.mu * S - p.beta * I * S,
              p.beta * I * S - p.gamma * I - p.mu * I,
              p.gamma * I - p.mu * R,
              r * S - p.mu * A};
    }
  }
  throw std::logic_error("unknown family");
}

// Forward Euler on the raw right-hand side (the cross-check integrator).
inline std::vector<double> euler_raw(const EpidemicModel& m,
                                     std::vector<double> x, double B,
                                     double t0, double t1, double dt) {
  double t = t0;
  while (t < t1 - 1e-12) {
    const double h = std::min(dt, t1 - t);
    const auto f = raw_rhs(m, x, B);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = std::max(x[i] + h * f[i], 0.0);
    t += h;
  }
  return x;
}

// Scalar bisection for increasing f on [lo, hi] with f(lo) < target < f(hi).
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double target, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Brute-force minimum of sum theta_i over the level set
// {x >= 0 : sum lambda_i x_i = s} on a fine composition grid.
inline double brute_level_set_min(
    const std::vector<std::function<double(double)>>& theta,
    const std::vector<double>& lambda, double s, int resolution) {
  const int n = static_cast<int>(theta.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> counts(n, 0);
  auto visit = [&](auto&& self, int idx, int remaining) -> void {
    if (idx == n - 1) {
      counts[idx] = remaining;
      double value = 0.0;
      for (int i = 0; i < n; ++i)
        value += theta[i](s * counts[i] / (resolution * lambda[i]));
      best = std::min(best, value);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[idx] = c;
      self(self, idx + 1, remaining - c);
    }
  };
  visit(visit, 0, resolution);
  return best;
}

// The reference parameter set used throughout the tests.
inline EpidemicParams figure_params() {
  EpidemicParams p;
  p.beta = 2e-4;
  p.gamma = 0.032;
  p.mu = 0.015;
  return p;
}

inline EpidemicModel figure_sir() {
  return epinet::make_model(Family::SIR, figure_params());
}

// epsilon derived by inverting the incubation-family bifurcation formula
// H = (gamma+mu)(eps+mu)/(beta*eps) at a given H.
inline double epsilon_for_H(const EpidemicParams& p, double H) {
  return p.mu * (p.gamma + p.mu) / (H * p.beta - p.gamma - p.mu);
}

inline EpidemicModel figure_seis(double H = 455.3) {
  EpidemicParams p = figure_params();
  p.epsilon = epsilon_for_H(p, H);
  return epinet::make_model(Family::SEIS, p);
}

// The two-node incubation subsystem (E, I) with the susceptible level frozen
// at s_sharp and the split parameter a in (0,1).
inline epinet::BalancedNetwork ei_subsystem(const EpidemicParams& p,
                                            double s_sharp, double a) {
  using epinet::RateFunction;
  using epinet::ScalarFn;
  const double eps = *p.epsilon;
  epinet::NetworkBuilder b(2);
  b.label(0, "E").label(1, "I");
  b.transfer_down(0, RateFunction::linear(a * (eps + p.mu)),
                  RateFunction::linear(eps), eps / (a * (eps + p.mu)));
  b.transfer_down(1, RateFunction::linear(a * (p.gamma + p.mu)),
                  RateFunction::linear(p.beta * s_sharp),
                  p.beta * s_sharp / (a * (p.gamma + p.mu)));
  b.dissipation(0, ScalarFn::linear((1.0 - a) * (eps + p.mu)));
  b.dissipation(1, ScalarFn::linear((1.0 - a) * (p.gamma + p.mu)));
  return b.build();
}

inline std::mt19937_64 rng(unsigned seed = 0xfeed) {
  return std::mt19937_64(seed);
}

inline std::vector<double> random_box_state(std::mt19937_64& g, int n,
                                            double hi) {
  std::uniform_real_distribution<double> d(0.0, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = d(g);
  return x;
}

inline std::vector<EpidemicModel> full_catalog() {
  using epinet::make_model;
  std::vector<EpidemicModel> models;
  models.push_back(figure_sir());
  models.push_back(figure_seis());
  {
    EpidemicParams p = figure_params();
    p.delta = 0.05;
    models.push_back(make_model(Family::MSIR, p));
  }
  {
    EpidemicParams p = figure_params();
    p.epsilon = 0.016;
    models.push_back(make_model(Family::SEIR, p));
  }
  {
    EpidemicParams p = figure_params();
    p.P = 0.8;
    models.push_back(make_model(Family::SIR_VACC_A, p));
  }
  {
    EpidemicParams p = figure_params();
    p.P = 0.8;
    models.push_back(make_model(Family::SIR_VACC_R, p));
  }
  {
    EpidemicParams p = figure_params();
    p.rho = 0.05;
    models.push_back(make_model(Family::SIR_VACC_S, p));
  }
  return models;
}

}  // namespace oracles
