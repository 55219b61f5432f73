#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epinet/network.hpp"

namespace epinet {

/// Stability classes, ordered from weakest to strongest certified property.
enum class StabilityClass { NotCertified, iISS, StrongiISS, ISS };

const char* to_string(StabilityClass c);

/// Scalar supply-rate handle. `linear_coeff` is set when fn(s) == c*s, which
/// is the case for all catalog models.
struct SupplyRate {
  std::function<double(double)> fn;
  std::optional<double> linear_coeff;

  double operator()(double s) const { return fn(s); }
};

/// Result of the small-gain certification: the per-edge loop-gain checks, the
/// whole-cycle check with every admissible anchor, the synthesized weight
/// vector, and the supply rates of the weighted-sum Lyapunov function
/// V(x) = sum_i lambda_i x_i. Immutable value object.
struct StabilityCertificate {
  StabilityClass cls = StabilityClass::NotCertified;

  /// Positive weights, one per node; empty when NotCertified.
  std::vector<double> lambda;
  /// 0-based anchor node used for the weight synthesis (smallest admissible);
  /// -1 when NotCertified.
  int anchor_k = -1;
  /// Every 0-based k admissible for the whole-cycle condition.
  std::vector<int> admissible_k;

  /// Per-edge condition ell_{i,i+1} * ell_{i+1,i} <= 1.
  std::vector<bool> cond_cyc1;
  /// Whole-cycle condition (existence of an admissible anchor).
  bool cond_cycn = false;

  /// Notes about zero gain bounds replaced by a small positive value during
  /// the cycle-product evaluation.
  std::vector<std::string> substitutions;
  /// Which hypothesis failed, empty when certified.
  std::string failure;

  /// Supply decay alpha (class P) and input supply sigma; present only when
  /// certified.
  std::optional<SupplyRate> alpha;
  std::optional<SupplyRate> sigma_supply;

  bool certified() const { return cls != StabilityClass::NotCertified; }
};

struct CertifyOptions {
  /// Grid resolution per dimension for the level-set minimization used when
  /// some dissipation term is not linear. 0 picks a default from n.
  int grid_resolution = 0;
};

/// Checks the loop-gain conditions, synthesizes the weights and supply rates,
/// and classifies the network. Requires every gain bound to be declared;
/// throws Error if one is missing or if more than one declared bound is zero
/// (a single zero is replaced by 1e-9 and flagged in `substitutions`).
StabilityCertificate check_smallgain(const BalancedNetwork& net,
                                     const CertifyOptions& opts = {});

/// Weight vector for a given 0-based anchor k: lambda_{k+1} = 1 and
/// lambda_i = prod_{j=k+2..i} sqrt(ell_{j-1,j} / ell_{j,j-1}) over the
/// circular range. Throws Error when a bound inside the product is zero.
std::vector<double> synthesize_lambda(const BalancedNetwork& net, int anchor_k);

/// V(x) = sum_i lambda_i x_i.
double lyapunov_value(std::span<const double> lambda,
                      std::span<const double> x);

/// Supply rates of V: alpha(s) = min over the level set
/// {x >= 0 : sum lambda_i x_i = s} of sum_i theta_i(x_i), and
/// sigma(s) = sum_i kappa_i(s). For all-linear theta the minimum has the
/// closed form min_i (c_i / lambda_i) * s; otherwise it is evaluated by grid
/// search over the level-set simplex (n <= 6). Throws Error when some theta
/// is not positive definite.
std::pair<SupplyRate, SupplyRate> synthesize_supply_rates(
    const BalancedNetwork& net, std::span<const double> lambda,
    int grid_resolution = 0);

}  // namespace epinet
