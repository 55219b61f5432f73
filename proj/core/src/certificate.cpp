#include "epinet/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace epinet {

namespace {

constexpr double kEllSubstitute = 1e-9;

// Gain bounds arranged by ordered pair for the cycle conditions:
// fwd[i] = ell_{i,i+1} (node i receiving from its downstream neighbor),
// bwd[i] = ell_{i+1,i} (the downstream neighbor receiving from node i).
struct EllTable {
  std::vector<double> fwd;
  std::vector<double> bwd;
};

EllTable collect_ell(const BalancedNetwork& net) {
  const int n = net.size();
  EllTable t;
  t.fwd.resize(n);
  t.bwd.resize(n);
  for (int i = 0; i < n; ++i) {
    t.fwd[i] = net.ell(i, net.next(i));
    t.bwd[i] = net.ell(net.next(i), i);
  }
  return t;
}

ScalarFn::FnClass weakest_theta_class(const BalancedNetwork& net) {
  auto cls = ScalarFn::FnClass::Kinf;
  for (int i = 0; i < net.size(); ++i) {
    const auto c = net.theta(i).fn_class();
    if (c < cls) cls = c;
  }
  return cls;
}

int default_grid_resolution(int n) {
  if (n <= 4) return 200;
  if (n == 5) return 40;
  return 20;
}

// Minimum of sum_i theta_i(x_i) over the level-set simplex
// {x >= 0 : sum lambda_i x_i = s}, by enumerating barycentric grid points.
double level_set_min(const BalancedNetwork& net,
                     std::span<const double> lambda, double s,
                     int resolution) {
  const int n = net.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> counts(n, 0);
  // Recursive composition enumeration: counts sum to `resolution`.
  auto visit = [&](auto&& self, int idx, int remaining) -> void {
    if (idx == n - 1) {
      counts[idx] = remaining;
      double value = 0.0;
      for (int i = 0; i < n; ++i) {
        const double xi = s * counts[i] / (resolution * lambda[i]);
        value += net.theta(i)(xi);
      }
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

}  // namespace

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::NotCertified:
      return "NotCertified";
    case StabilityClass::iISS:
      return "iISS";
    case StabilityClass::StrongiISS:
      return "StrongiISS";
    case StabilityClass::ISS:
      return "ISS";
  }
  return "NotCertified";
}

std::vector<double> synthesize_lambda(const BalancedNetwork& net,
                                      int anchor_k) {
  const int n = net.size();
  if (anchor_k < 0 || anchor_k >= n) throw Error("anchor index out of range");
  std::vector<double> lambda(n, 0.0);
  int node = (anchor_k + 1) % n;  // the anchor's successor carries weight 1
  double acc = 1.0;
  lambda[node] = acc;
  for (int step = 1; step < n; ++step) {
    const int j = (node + 1) % n;  // circular j runs k+2, ..., k+n
    const double num = net.ell(node, j);  // ell_{j-1,j}
    const double den = net.ell(j, node);  // ell_{j,j-1}
    if (den == 0.0 || num == 0.0)
      throw Error(
          "a zero gain bound appears inside the weight product; substitute a "
          "sufficiently small positive bound for the zero edge and retry");
    acc *= std::sqrt(num / den);
    lambda[j] = acc;
    node = j;
  }
  return lambda;
}

double lyapunov_value(std::span<const double> lambda,
                      std::span<const double> x) {
  if (lambda.size() != x.size())
    throw DimensionError("weight vector and state sizes differ");
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += lambda[i] * x[i];
  return v;
}

std::pair<SupplyRate, SupplyRate> synthesize_supply_rates(
    const BalancedNetwork& net, std::span<const double> lambda,
    int grid_resolution) {
  const int n = net.size();
  if (static_cast<int>(lambda.size()) != n)
    throw DimensionError("weight vector size differs from network size");

  bool all_linear = true;
  for (int i = 0; i < n; ++i) {
    if (net.theta(i).fn_class() == ScalarFn::FnClass::None)
      throw Error("dissipation of node " + std::to_string(i + 1) +
                  " is not positive definite");
    if (net.theta(i).kind() != ScalarFn::Kind::Linear) all_linear = false;
  }

  SupplyRate alpha;
  if (all_linear) {
    double c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      c = std::min(c, net.theta(i).coeff() / lambda[i]);
    alpha.linear_coeff = c;
    alpha.fn = [c](double s) { return c * s; };
  } else {
    if (n > 6)
      throw Error(
          "level-set minimization by grid search is limited to networks with "
          "at most six nodes");
    const int res =
        grid_resolution > 0 ? grid_resolution : default_grid_resolution(n);
    // Copies keep the handle self-contained.
    BalancedNetwork net_copy = net;
    std::vector<double> lam(lambda.begin(), lambda.end());
    alpha.fn = [net_copy, lam, res](double s) {
      if (s <= 0.0) return 0.0;
      return level_set_min(net_copy, lam, s, res);
    };
  }

  SupplyRate sigma;
  bool kappa_all_linear = true;
  double csum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (net.kappa(i).kind() == ScalarFn::Kind::Linear ||
        net.kappa(i).kind() == ScalarFn::Kind::Zero)
      csum += net.kappa(i).coeff();
    else
      kappa_all_linear = false;
  }
  if (kappa_all_linear) {
    sigma.linear_coeff = csum;
    sigma.fn = [csum](double s) { return csum * s; };
  } else {
    BalancedNetwork net_copy = net;
    sigma.fn = [net_copy, n](double s) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += net_copy.kappa(i)(s);
      return v;
    };
  }
  return {std::move(alpha), std::move(sigma)};
}

StabilityCertificate check_smallgain(const BalancedNetwork& net,
                                     const CertifyOptions& opts) {
  const int n = net.size();
  StabilityCertificate cert;

  // ell must be declared on every ordered pair.
  for (int i = 0; i < n; ++i) {
    if (!net.ell_declared(i, net.next(i)) || !net.ell_declared(net.next(i), i))
      throw Error("gain bounds must be declared for every ordered neighbor "
                  "pair before certification");
  }
  EllTable ell = collect_ell(net);

  // Per-edge loop-gain condition; evaluated on the declared values.
  cert.cond_cyc1.resize(n);
  bool cyc1_ok = true;
  for (int i = 0; i < n; ++i) {
    cert.cond_cyc1[i] = ell.fwd[i] * ell.bwd[i] <= 1.0;
    cyc1_ok = cyc1_ok && cert.cond_cyc1[i];
  }

  // A single zero bound is replaced by a small positive value inside the
  // cycle product and the weight synthesis; several zeros are rejected.
  int zero_count = 0;
  BalancedNetwork effective = net;
  for (int i = 0; i < n; ++i) {
    const auto substitute = [&](int dest, int src, double value) {
      if (value != 0.0) return;
      ++zero_count;
      if (zero_count > 1) return;
      effective = effective.with_ell(dest, src, kEllSubstitute);
      std::ostringstream os;
      os << "ell_{" << dest + 1 << "," << src + 1
         << "} = 0 replaced by " << kEllSubstitute
         << " in the cycle product and weight synthesis";
      cert.substitutions.push_back(os.str());
    };
    substitute(i, net.next(i), ell.fwd[i]);
    if (n > 2) substitute(net.next(i), i, ell.bwd[i]);
  }
  if (zero_count > 1)
    throw Error("more than one declared gain bound is zero; the cycle "
                "product is not evaluable — declare small positive bounds "
                "explicitly");
  EllTable eff = collect_ell(effective);

  double cycle_product = 1.0;
  for (int i = 0; i < n; ++i) cycle_product *= eff.fwd[i] / eff.bwd[i];

  for (int k = 0; k < n; ++k) {
    const double loop = eff.fwd[k] * eff.bwd[k];
    if (loop <= cycle_product && cycle_product * loop <= 1.0)
      cert.admissible_k.push_back(k);
  }
  cert.cond_cycn = !cert.admissible_k.empty();

  const auto theta_class = weakest_theta_class(net);

  if (!cyc1_ok) {
    cert.failure = "per-edge loop-gain condition violated";
    return cert;
  }
  if (!cert.cond_cycn) {
    cert.failure = "whole-cycle gain condition violated (no admissible anchor)";
    return cert;
  }
  if (theta_class == ScalarFn::FnClass::None) {
    cert.failure = "some dissipation term is not positive definite";
    return cert;
  }

  cert.anchor_k = cert.admissible_k.front();
  cert.lambda = synthesize_lambda(effective, cert.anchor_k);
  switch (theta_class) {
    case ScalarFn::FnClass::Kinf:
      cert.cls = StabilityClass::ISS;
      break;
    case ScalarFn::FnClass::K:
      cert.cls = StabilityClass::StrongiISS;
      break;
    default:
      cert.cls = StabilityClass::iISS;
      break;
  }

  auto [alpha, sigma] =
      synthesize_supply_rates(net, cert.lambda, opts.grid_resolution);
  cert.alpha = std::move(alpha);
  cert.sigma_supply = std::move(sigma);
  return cert;
}

}  // namespace epinet
