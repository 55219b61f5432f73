#pragma once

#include <map>
#include <span>
#include <string>

#include "epinet/models.hpp"
#include "epinet/simulate.hpp"
#include "epinet/threshold.hpp"

namespace epinet {

/// Three-valued outcome of a trajectory-level check.
enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);

struct VerdictReport {
  std::string claim;  ///< stable claim identifier, e.g. "eradication-below-threshold"
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;  ///< explanation, mainly for Fail/Inconclusive
  std::map<std::string, double> inputs;  ///< what the check was run with
  std::map<std::string, double> measured;
  std::map<std::string, double> tolerances;
};

struct PropcheckConfig {
  SimConfig sim{.t_end = 2000.0, .dt = 0.01, .record_stride = 10};
  double atol_zero = 1e-3;      ///< absolute tolerance for convergence to 0
  double rel_nonzero = 0.01;    ///< relative tolerance for nonzero targets
  double boundary_band = 0.01;  ///< |B_eff - Q|/Q band declared inconclusive
  double window = 100.0;        ///< trailing window for convergence checks
  int samples = 2000;           ///< sample count for region checks
  unsigned seed = 0x5eed;
};

/// Input-threshold dichotomy: below Q the L compartments converge to zero;
/// above Q (constant input) they do not, and for the SIR family the infected
/// trace revisits the endemic level along exponentially spaced times.
VerdictReport check_input_threshold_dichotomy(const EpidemicModel& model,
                                 const InputSignal& B,
                                 std::span<const double> x0,
                                 const PropcheckConfig& cfg = {});

/// Below Q, V_U(x_U(t)) eventually stays at or below H - eps for some
/// empirically found eps > 0; reports the entry time and the margin.
VerdictReport check_V_U_ultimate_bound(const EpidemicModel& model,
                                       const InputSignal& B,
                                       std::span<const double> x0,
                                       const PropcheckConfig& cfg = {});

/// Sampled sign check of the V_L drift: nonpositive (strictly negative off
/// x_L = 0) wherever V_U <= a*H, and strictly positive off the origin when
/// the susceptible level is held above H.
VerdictReport check_VL_decrease_in_region(const EpidemicModel& model, double a,
                                          const PropcheckConfig& cfg = {});

/// Below the family threshold the full state converges to the disease-free
/// equilibrium.
VerdictReport check_disease_free_limit(const EpidemicModel& model, double B,
                                       std::span<const double> x0,
                                       const PropcheckConfig& cfg = {});

}  // namespace epinet
