#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epinet/errors.hpp"

namespace epinet {

/// 1-based circular index: maps any integer k to ((k-1) mod n) + 1 with the
/// nonnegative remainder convention, so 0 -> n and n+1 -> 1.
int circular_index(long long k, int n);

/// A nonnegative rate r(x) on the nonnegative orthant, attached to a transfer
/// between two nodes. The structural descriptor lets validators and the
/// certificate check linear/bilinear rates exactly; arbitrary callbacks fall
/// back to sampling.
class RateFunction {
 public:
  enum class Kind { Zero, Linear, Bilinear, Callback };

  /// Identically zero.
  static RateFunction zero();
  /// coeff * x[source], coeff >= 0.
  static RateFunction linear(double coeff);
  /// coeff * x[source] * x[partner], coeff >= 0. `partner` is a 0-based
  /// component index.
  static RateFunction bilinear(double coeff, int partner);
  /// Arbitrary rate. The caller is responsible for nonnegativity and local
  /// Lipschitz continuity on the orthant.
  static RateFunction callback(std::function<double(std::span<const double>)> fn);

  /// Evaluates the rate at state x; `source` is the 0-based index of the node
  /// the transfer consumes.
  double eval(std::span<const double> x, int source) const;

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  double coeff() const { return coeff_; }
  int partner() const { return partner_; }

 private:
  RateFunction() = default;
  Kind kind_ = Kind::Zero;
  double coeff_ = 0.0;
  int partner_ = -1;
  std::function<double(std::span<const double>)> fn_;
};

/// A scalar comparison function s >= 0 -> value >= 0 with a structural
/// descriptor that fixes its comparison class:
///   linear(c)      c*s            class K-infinity
///   saturating(c)  c*s/(1+s)      class K, bounded by c
///   callback       user-supplied  assumed class P only (cannot be classified)
///   zero           0              not positive definite
class ScalarFn {
 public:
  enum class Kind { Zero, Linear, Saturating, Callback };
  enum class FnClass { None, P, K, Kinf };

  static ScalarFn zero();
  static ScalarFn linear(double coeff);
  static ScalarFn saturating(double coeff);
  static ScalarFn callback(std::function<double(double)> fn);

  double operator()(double s) const;
  Kind kind() const { return kind_; }
  double coeff() const { return coeff_; }
  FnClass fn_class() const;
  bool is_zero() const { return kind_ == Kind::Zero; }

 private:
  ScalarFn() = default;
  Kind kind_ = Kind::Zero;
  double coeff_ = 0.0;
  std::function<double(double)> fn_;
};

/// One directed mass transfer between ring neighbors: the source node is
/// consumed at rate eta(x) and the destination node is produced at rate
/// sigma(x), with the declared bound sigma(x) <= ell * eta(x) on the orthant.
struct Transfer {
  RateFunction eta = RateFunction::zero();
  RateFunction sigma = RateFunction::zero();
  std::optional<double> ell;  ///< declared gain bound, dimensionless
};

/// Per-coordinate sampling box [0, hi_i] used by the validators. The certified
/// conditions quantify over the whole orthant, which is not checkable
/// numerically; the box should dominate the reachable set (for the catalog
/// models, N <= sup B / mu).
struct SampleBox {
  std::vector<double> hi;  ///< empty => 1000 per coordinate

  /// Box [0, factor * max(x0_i, 1)] per coordinate.
  static SampleBox around(std::span<const double> x0, double factor = 10.0);
  double upper(int i) const;
};

/// Outcome of a sampling validator. `passed` means no violation was found in
/// `samples` draws; it is a falsification check, not a proof.
struct ValidationReport {
  bool passed = true;
  int samples = 0;
  std::string detail;  ///< description of the first violation, if any
  std::optional<std::vector<double>> violation_state;
};

class NetworkBuilder;

/// A positive balancing-kinetics network on a ring of n nodes:
///
///   dx_i/dt = -eta_up_i(x) + sigma_up_i(x) - eta_down_i(x) + sigma_down_i(x)
///             - theta_i(x_i) + kappa_i(w_i)
///
/// where eta_up_i / eta_down_i consume node i toward its ring neighbors,
/// sigma_up_i / sigma_down_i are the productions node i receives from them,
/// theta_i is the local dissipation and kappa_i gates the input channel.
/// Immutable after construction and safe to share across threads.
class BalancedNetwork {
 public:
  int size() const { return n_; }

  /// Evaluates the vector field at (x, w). Both spans must have length n.
  std::vector<double> vector_field(std::span<const double> x,
                                   std::span<const double> w) const;

  /// Transfer from node i to its downstream neighbor i+1 (0-based i).
  const Transfer& down(int i) const { return down_[i]; }
  /// Transfer from node i to its upstream neighbor i-1. Unused when n == 2
  /// (the two directions coincide; transfers live on the downstream side).
  const Transfer& up(int i) const { return up_[i]; }

  const ScalarFn& theta(int i) const { return theta_[i]; }
  const ScalarFn& kappa(int i) const { return kappa_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Declared gain bound ell_{dest,src} for adjacent nodes (0-based). Throws
  /// Error if the bound was never declared.
  double ell(int dest, int src) const;
  bool ell_declared(int dest, int src) const;

  /// The unique transfer src -> dest for adjacent nodes.
  const Transfer& transfer_between(int dest, int src) const {
    return transfer_for_pair(dest, src);
  }

  /// Copy of the network with one declared bound replaced.
  BalancedNetwork with_ell(int dest, int src, double value) const;

  int next(int i) const { return (i + 1) % n_; }
  int prev(int i) const { return (i + n_ - 1) % n_; }

 private:
  friend class NetworkBuilder;
  BalancedNetwork() = default;
  const Transfer& transfer_for_pair(int dest, int src) const;
  Transfer& transfer_for_pair(int dest, int src);

  int n_ = 0;
  std::vector<Transfer> down_;  // down_[i]: i -> i+1
  std::vector<Transfer> up_;    // up_[i]:   i -> i-1
  std::vector<ScalarFn> theta_;
  std::vector<ScalarFn> kappa_;
  std::vector<std::string> labels_;
};

/// Builder for BalancedNetwork. Untouched transfers stay structurally zero
/// with no declared bound; untouched theta/kappa stay zero.
class NetworkBuilder {
 public:
  explicit NetworkBuilder(int n);

  /// Transfer src -> src+1 (consumes src, produces src+1).
  NetworkBuilder& transfer_down(int src, RateFunction eta, RateFunction sigma,
                                double ell);
  /// Transfer src -> src-1. Rejected for n == 2: declare the single transfer
  /// per ordered pair on the downstream side instead.
  NetworkBuilder& transfer_up(int src, RateFunction eta, RateFunction sigma,
                              double ell);
  NetworkBuilder& dissipation(int i, ScalarFn theta);
  NetworkBuilder& input(int i, ScalarFn kappa);
  NetworkBuilder& label(int i, std::string name);

  BalancedNetwork build();

 private:
  BalancedNetwork net_;
  bool built_ = false;
};

/// Samples each eta on the facet x_i = 0 and checks it vanishes there
/// (the condition that keeps the orthant forward invariant).
ValidationReport validate_positivity(const BalancedNetwork& net, int samples,
                                     const SampleBox& box = {},
                                     unsigned seed = 0x5eed);

/// Random-samples the box and checks sigma_{i,j}(x) <= ell_{i,j} eta_{i,j}(x)
/// + 1e-12 for every declared ordered pair.
ValidationReport validate_gain_bounds(const BalancedNetwork& net, int samples,
                                      const SampleBox& box = {},
                                      unsigned seed = 0x5eed);

/// Scalar input signal t -> B(t) >= 0, broadcast to every input channel of a
/// network during integration (the per-node kappa gates pick out the active
/// channels).
class InputSignal {
 public:
  enum class Kind { Constant, PiecewiseConstant, Callback };

  static InputSignal constant(double value);
  /// Steps (t_k, v_k): value v_k holds on [t_k, t_{k+1}). Times must start at
  /// 0 and be strictly increasing; values must be >= 0.
  static InputSignal piecewise_constant(
      std::vector<std::pair<double, double>> steps);
  static InputSignal callback(std::function<double(double)> fn);

  double value(double t) const;
  Kind kind() const { return kind_; }

  /// Exact supremum on [t0, t1] for constant/piecewise signals; sampled on a
  /// grid for callbacks.
  double supremum(double t0, double t1) const;

  /// Breakpoints strictly inside (t0, t1), sorted. Empty for constant and
  /// callback signals.
  std::vector<double> breakpoints_in(double t0, double t1) const;

 private:
  InputSignal() = default;
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  std::vector<std::pair<double, double>> steps_;
  std::function<double(double)> fn_;
};

}  // namespace epinet
