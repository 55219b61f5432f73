#include "epinet/propcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace epinet {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

double effective_sup(const EpidemicModel& model, const InputSignal& B,
                     double t_end) {
  const Partition part = partition_UL(model);
  return B.supremum(0.0, t_end) * part.effective_input_factor;
}

bool in_boundary_band(double b_eff, double Q, double band) {
  return std::abs(b_eff - Q) / Q < band;
}

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

// V_L weights for the drift-sign check. `s_sharp` is the susceptible
// reference level the weights are tuned to; for the instability side it is
// the held susceptible value itself.
std::vector<double> drift_weights(const EpidemicModel& model, double s_sharp,
                                  bool instability_side) {
  const auto& p = model.params;
  const int n = model.dim();
  std::vector<double> w(n, 0.0);
  switch (model.family) {
    case Family::SIR:
    case Family::SIR_VACC_A:
    case Family::SIR_VACC_R:
    case Family::SIR_VACC_S:
      w[1] = 1.0;
      break;
    case Family::MSIR:
      w[2] = 1.0;
      break;
    case Family::SEIS: {
      const double eps = *p.epsilon;
      w[1] = 1.0;
      w[2] = std::sqrt(p.beta * s_sharp * (eps + p.mu) /
                       ((p.gamma + p.mu) * eps));
      break;
    }
    case Family::SEIR: {
      const double eps = *p.epsilon;
      const double H = bifurcation_point(model);
      const double lambda_i = std::sqrt(p.beta * s_sharp * (eps + p.mu) /
                                        ((p.gamma + p.mu) * eps));
      w[1] = 1.0;
      w[2] = lambda_i;
      if (instability_side) {
        // any positive weight works on the R = 0 facet
        w[3] = lambda_i;
      } else {
        const double margin = p.beta * (std::sqrt(s_sharp * H) - s_sharp);
        w[3] = margin / (2.0 * p.gamma);
      }
      break;
    }
  }
  return w;
}

int susceptible_index(const EpidemicModel& model) {
  return model.family == Family::MSIR ? 1 : 0;
}

}  // namespace

VerdictReport check_input_threshold_dichotomy(const EpidemicModel& model,
                                 const InputSignal& B,
                                 std::span<const double> x0,
                                 const PropcheckConfig& cfg) {
  model.validate();
  const Partition part = partition_UL(model);
  const double Q = input_threshold(model);
  const double b_eff = effective_sup(model, B, cfg.sim.t_end);

  VerdictReport rep;
  rep.inputs["sup_effective_input"] = b_eff;
  rep.inputs["t_end"] = cfg.sim.t_end;
  rep.measured["Q"] = Q;
  rep.tolerances["boundary_band"] = cfg.boundary_band;

  if (in_boundary_band(b_eff, Q, cfg.boundary_band)) {
    rep.claim = "input-threshold-dichotomy";
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "effective input supremum lies within the boundary band "
                 "around Q; no verdict near the threshold";
    return rep;
  }

  const Trajectory traj = integrate(model.lower(), x0, B, cfg.sim, &part);
  const auto targets = zeros(part.L.size());

  if (b_eff < Q) {
    rep.claim = "eradication-below-input-threshold";
    rep.tolerances["atol_zero"] = cfg.atol_zero;
    const auto conv = detect_convergence(traj, part.L, targets, cfg.atol_zero,
                                         cfg.window);
    rep.measured["convergence_time"] = conv.time;
    rep.measured["vL_final"] = traj.vL.back();
    if (conv.converged) {
      rep.verdict = Verdict::Pass;
    } else if (traj.vL.back() < traj.vL[traj.samples() / 2]) {
      rep.verdict = Verdict::Inconclusive;
      rep.reason = "infected compartments are still decaying at the horizon; "
                   "extend t_end";
    } else {
      rep.verdict = Verdict::Fail;
      rep.reason = "infected compartments did not converge to zero below the "
                   "input threshold";
    }
    return rep;
  }

  rep.claim = "endemic-persistence-above-input-threshold";
  double l_initial = 0.0;
  for (int c : part.L) l_initial += x0[c];
  if (l_initial <= 0.0) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "the persistence claim needs an infected initial condition";
    return rep;
  }

  const auto conv = detect_convergence(traj, part.L, targets, cfg.atol_zero,
                                       cfg.window);
  if (conv.converged) {
    rep.verdict = Verdict::Fail;
    rep.reason = "infected compartments converged to zero although the input "
                 "exceeds the threshold";
    return rep;
  }

  if (model.family == Family::SIR && B.kind() == InputSignal::Kind::Constant) {
    // Revisit check: exponentially spaced samples must approach the endemic
    // infected level.
    const auto [free_eq, endemic] = equilibria(model, B.value(0.0));
    if (endemic) {
      const double target = (*endemic)[1];
      rep.measured["endemic_I"] = target;
      rep.tolerances["endemic_rel"] = 0.02;
      double t_i = 1.0;
      std::vector<double> probes;
      while (t_i <= traj.times.back()) {
        const auto idx = static_cast<std::size_t>(
            std::llround(t_i / (traj.times[1] - traj.times[0])));
        probes.push_back(
            traj.component(std::min(idx, traj.samples() - 1), 1));
        t_i *= 2.0;
      }
      if (probes.size() >= 2) {
        const double last = probes[probes.size() - 1];
        const double prev = probes[probes.size() - 2];
        rep.measured["I_at_last_probe"] = last;
        if (std::abs(last - target) > 0.02 * target ||
            std::abs(prev - target) > 0.02 * target) {
          rep.verdict = Verdict::Fail;
          rep.reason = "exponentially spaced samples do not approach the "
                       "endemic infected level";
          return rep;
        }
      }
    }
  }
  rep.verdict = Verdict::Pass;
  return rep;
}

VerdictReport check_V_U_ultimate_bound(const EpidemicModel& model,
                                       const InputSignal& B,
                                       std::span<const double> x0,
                                       const PropcheckConfig& cfg) {
  model.validate();
  const Partition part = partition_UL(model);
  const double Q = input_threshold(model);
  const double H = bifurcation_point(model);
  const double b_eff = effective_sup(model, B, cfg.sim.t_end);

  VerdictReport rep;
  rep.claim = "ultimate-bound-on-aggregate";
  rep.inputs["sup_effective_input"] = b_eff;
  rep.inputs["t_end"] = cfg.sim.t_end;
  rep.measured["Q"] = Q;
  rep.measured["H"] = H;

  if (b_eff >= Q * (1.0 - cfg.boundary_band)) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "precondition sup of the effective input < Q not met; "
                 "check skipped";
    return rep;
  }

  const Trajectory traj = integrate(model.lower(), x0, B, cfg.sim, &part);
  const auto m = traj.samples();
  // suffix maxima of V_U
  std::vector<double> suffix(m);
  double run = -1.0;
  for (std::size_t k = m; k-- > 0;) {
    run = std::max(run, traj.vU[k]);
    suffix[k] = run;
  }
  std::size_t entry = m;
  for (std::size_t k = 0; k < m; ++k)
    if (suffix[k] < H) {
      entry = k;
      break;
    }
  if (entry == m) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "V_U never dropped below H within the horizon; extend t_end";
    return rep;
  }
  const std::size_t tail = m - (m - entry) / 4 - 1;
  rep.verdict = Verdict::Pass;
  rep.measured["T"] = traj.times[entry];
  rep.measured["eps_at_T"] = H - suffix[entry];
  rep.measured["eps_trailing"] = H - suffix[tail];
  return rep;
}

VerdictReport check_VL_decrease_in_region(const EpidemicModel& model, double a,
                                          const PropcheckConfig& cfg) {
  model.validate();
  if (!(a > 0.0 && a < 1.0)) throw Error("region parameter a must lie in (0,1)");
  const Partition part = partition_UL(model, a);
  const double H = bifurcation_point(model);
  const double Q = input_threshold(model);
  const int n = model.dim();
  const BalancedNetwork net = model.lower();

  VerdictReport rep;
  rep.claim = "infected-drift-sign-analysis";
  rep.inputs["a"] = a;
  rep.inputs["samples"] = cfg.samples;
  rep.measured["H"] = H;
  rep.tolerances["facet_tol"] = 1e-12;

  // Weights with headroom: tuned to the midpoint between the sampled region
  // edge a*H and the bifurcation level H, so the drift stays strictly
  // negative up to the region boundary.
  const double c = 0.5 * (1.0 + a);
  const auto w_dec = drift_weights(model, c * c * H, false);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int s_idx = susceptible_index(model);

  const auto drift = [&](const std::vector<double>& x, double b,
                         const std::vector<double>& wts) {
    const std::vector<double> w(n, b);
    const auto f = net.vector_field(x, w);
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += wts[i] * f[i];
    return d;
  };

  // Decrease side: V_U <= a*H.
  for (int s = 0; s < cfg.samples; ++s) {
    std::vector<double> x(n, 0.0);
    double vu = 0.0;
    do {
      vu = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] = part.vU_weights[i] > 0.0
                   ? unit(rng) * a * H / part.vU_weights[i]
                   : unit(rng) * a * H;
        vu += part.vU_weights[i] * x[i];
      }
    } while (vu > a * H);
    const double b = unit(rng) * 2.0 * Q;

    double l_norm = 0.0;
    for (int cidx : part.L) l_norm += x[cidx];
    const double d = drift(x, b, w_dec);
    if (l_norm == 0.0 ? std::abs(d) > 1e-12 : d >= 0.0) {
      rep.verdict = Verdict::Fail;
      std::ostringstream os;
      os << "V_L drift " << d << " has the wrong sign inside the region at "
            "sample " << s;
      rep.reason = os.str();
      return rep;
    }
  }

  // Facet: x_L = 0 exactly.
  for (int s = 0; s < 64; ++s) {
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i) x[i] = unit(rng) * a * H;
    for (int cidx : part.L) x[cidx] = 0.0;
    double vu = part.vU(x);
    if (vu > a * H) continue;
    const double d = drift(x, unit(rng) * Q, w_dec);
    if (std::abs(d) > 1e-12) {
      rep.verdict = Verdict::Fail;
      rep.reason = "V_L drift does not vanish on the x_L = 0 facet";
      return rep;
    }
  }

  // Instability side: susceptible level held above H.
  const double s_high = 1.1 * H;
  const auto w_inc = drift_weights(model, s_high, true);
  for (int s = 0; s < cfg.samples; ++s) {
    std::vector<double> x(n, 0.0);
    for (int cidx : part.L) x[cidx] = unit(rng) * H;
    x[s_idx] = s_high;
    if (model.family == Family::SEIR) x[3] = 0.0;  // drift sign needs R = 0
    double l_norm = 0.0;
    for (int cidx : part.L) l_norm += x[cidx];
    if (l_norm == 0.0) continue;
    const double d = drift(x, unit(rng) * 2.0 * Q, w_inc);
    if (d <= 0.0) {
      rep.verdict = Verdict::Fail;
      std::ostringstream os;
      os << "V_L drift " << d << " is not positive at held susceptible level "
         << s_high;
      rep.reason = os.str();
      return rep;
    }
  }

  rep.verdict = Verdict::Pass;
  return rep;
}

VerdictReport check_disease_free_limit(const EpidemicModel& model, double B,
                                       std::span<const double> x0,
                                       const PropcheckConfig& cfg) {
  model.validate();
  const Partition part = partition_UL(model);
  const double Q = input_threshold(model);
  const double b_eff = B * part.effective_input_factor;

  VerdictReport rep;
  rep.claim = "disease-free-limit";
  rep.inputs["B"] = B;
  rep.inputs["effective_input"] = b_eff;
  rep.inputs["t_end"] = cfg.sim.t_end;
  rep.measured["Q"] = Q;
  rep.tolerances["rel_nonzero"] = cfg.rel_nonzero;
  rep.tolerances["atol_zero"] = cfg.atol_zero;

  if (b_eff >= Q * (1.0 - cfg.boundary_band)) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "input is not below the family threshold; check skipped";
    return rep;
  }

  const auto [target, endemic] = equilibria(model, B);
  const Trajectory traj =
      integrate(model.lower(), x0, InputSignal::constant(B), cfg.sim, &part);

  bool all_converged = true;
  bool still_moving = false;
  double worst_rel = 0.0;
  for (int cdx = 0; cdx < model.dim(); ++cdx) {
    const double tol = target[cdx] > 0.0 ? cfg.rel_nonzero * target[cdx]
                                         : cfg.atol_zero;
    const int comps[1] = {cdx};
    const double tgts[1] = {target[cdx]};
    const auto conv = detect_convergence(traj, comps, tgts, tol, cfg.window);
    const double final_err =
        std::abs(traj.component(traj.samples() - 1, cdx) - target[cdx]);
    const double mid_err =
        std::abs(traj.component(traj.samples() / 2, cdx) - target[cdx]);
    worst_rel = std::max(worst_rel,
                         final_err / std::max(target[cdx], 1.0));
    if (!conv.converged) {
      all_converged = false;
      if (final_err < mid_err) still_moving = true;
    }
  }
  rep.measured["worst_relative_error"] = worst_rel;
  if (all_converged) {
    rep.verdict = Verdict::Pass;
  } else if (still_moving) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "state still approaching the disease-free equilibrium at the "
                 "horizon; extend t_end";
  } else {
    rep.verdict = Verdict::Fail;
    rep.reason = "state did not settle at the disease-free equilibrium";
  }
  return rep;
}

}  // namespace epinet
