#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "epinet/models.hpp"
#include "epinet/network.hpp"

namespace epinet {

/// A class-K function handle for the supply-rate algebra. Linear functions
/// are inverted exactly; callbacks are handled by bisection.
class MonotoneFn {
 public:
  static MonotoneFn linear(double coeff);
  static MonotoneFn callback(std::function<double(double)> fn);

  double operator()(double s) const;
  bool is_linear() const { return linear_; }
  double coeff() const { return coeff_; }

 private:
  MonotoneFn() = default;
  bool linear_ = true;
  double coeff_ = 1.0;
  std::function<double(double)> fn_;
};

/// Pseudo-inverse eta^-(s) = sup { tau >= 0 : s >= eta(tau) }. Returns
/// +infinity when s is at or above the supremum of eta. Throws Error when the
/// sampled callback is not increasing.
double ominus(const MonotoneFn& eta, double s);

/// The U/L split of a catalog model: U carries the aggregate V_U with its
/// supply rates alpha_U, sigma_U; L collects the compartments whose
/// convergence to zero is concluded below the input threshold.
struct Partition {
  std::vector<int> U;  ///< 0-based component indices
  std::vector<int> L;
  std::vector<double> vU_weights;  ///< full-length, zero off U
  std::vector<double> vL_weights;  ///< full-length, zero off L
  MonotoneFn alpha_U = MonotoneFn::linear(1.0);
  MonotoneFn sigma_U = MonotoneFn::linear(1.0);
  /// Multiplier turning the raw input B into the effective input compared
  /// against Q (1-P for the newborn-vaccination families, 1 otherwise).
  double effective_input_factor = 1.0;

  double vU(std::span<const double> x) const;
  double vL(std::span<const double> x) const;
};

/// `a` in (0,1) fixes the reference susceptible level S# = a^2 H used for the
/// weighted V_L of the incubation models; any value in (0,1) certifies.
Partition partition_UL(const EpidemicModel& model, double a = 0.95);

struct ThresholdReport {
  double H = 0.0;   ///< bifurcation point, population units
  double Q = 0.0;   ///< input threshold (against the effective input)
  double R0 = 0.0;  ///< basic reproduction number for the given constant B
  std::vector<double> disease_free;
  std::optional<std::vector<double>> endemic;  ///< present iff R0 >= 1
  bool endemic_solver_converged = true;
  std::vector<int> U;  ///< 0-based
  std::vector<int> L;
  Family family = Family::SIR;
  EpidemicParams params;
  double B = 0.0;
};

/// H = (gamma+mu)/beta for the SIR-type families and
/// (gamma+mu)(epsilon+mu)/(beta epsilon) for the incubation families.
double bifurcation_point(const EpidemicModel& model);

/// Q = mu*H, except (rho+mu)*H for the continuous-vaccination family.
double input_threshold(const EpidemicModel& model);

/// R0 = B_eff / Q with B_eff = B(1-P) for the newborn-vaccination families
/// and B otherwise.
double reproduction_number(const EpidemicModel& model, double B);

/// Disease-free equilibrium (closed form per family) and, when R0 >= 1, the
/// endemic equilibrium: closed form for the SIR-type families, damped Newton
/// on the vector field for the incubation/maternal families.
std::pair<std::vector<double>, std::optional<std::vector<double>>> equilibria(
    const EpidemicModel& model, double B);

/// Full report for a constant input B.
ThresholdReport analyze_thresholds(const EpidemicModel& model, double B);

}  // namespace epinet
