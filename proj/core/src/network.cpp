#include "epinet/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace epinet {

int circular_index(long long k, int n) {
  long long r = (k - 1) % n;
  if (r < 0) r += n;
  return static_cast<int>(r) + 1;
}

// ---------------------------------------------------------------------------
// RateFunction

RateFunction RateFunction::zero() { return RateFunction{}; }

RateFunction RateFunction::linear(double coeff) {
  if (coeff < 0.0) throw Error("rate coefficient must be nonnegative");
  RateFunction r;
  r.kind_ = Kind::Linear;
  r.coeff_ = coeff;
  return r;
}

RateFunction RateFunction::bilinear(double coeff, int partner) {
  if (coeff < 0.0) throw Error("rate coefficient must be nonnegative");
  if (partner < 0) throw Error("bilinear partner index must be nonnegative");
  RateFunction r;
  r.kind_ = Kind::Bilinear;
  r.coeff_ = coeff;
  r.partner_ = partner;
  return r;
}

RateFunction RateFunction::callback(
    std::function<double(std::span<const double>)> fn) {
  if (!fn) throw Error("rate callback must not be empty");
  RateFunction r;
  r.kind_ = Kind::Callback;
  r.fn_ = std::move(fn);
  return r;
}

double RateFunction::eval(std::span<const double> x, int source) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Linear:
      return coeff_ * x[source];
    case Kind::Bilinear:
      return coeff_ * x[source] * x[partner_];
    case Kind::Callback:
      return fn_(x);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// ScalarFn

ScalarFn ScalarFn::zero() { return ScalarFn{}; }

ScalarFn ScalarFn::linear(double coeff) {
  if (coeff < 0.0) throw Error("scalar-function coefficient must be nonnegative");
  ScalarFn f;
  f.kind_ = coeff == 0.0 ? Kind::Zero : Kind::Linear;
  f.coeff_ = coeff;
  return f;
}

ScalarFn ScalarFn::saturating(double coeff) {
  if (coeff <= 0.0) throw Error("saturating coefficient must be positive");
  ScalarFn f;
  f.kind_ = Kind::Saturating;
  f.coeff_ = coeff;
  return f;
}

ScalarFn ScalarFn::callback(std::function<double(double)> fn) {
  if (!fn) throw Error("scalar callback must not be empty");
  ScalarFn f;
  f.kind_ = Kind::Callback;
  f.fn_ = std::move(fn);
  return f;
}

double ScalarFn::operator()(double s) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Linear:
      return coeff_ * s;
    case Kind::Saturating:
      return coeff_ * s / (1.0 + s);
    case Kind::Callback:
      return fn_(s);
  }
  return 0.0;
}

ScalarFn::FnClass ScalarFn::fn_class() const {
  switch (kind_) {
    case Kind::Zero:
      return FnClass::None;
    case Kind::Linear:
      return FnClass::Kinf;
    case Kind::Saturating:
      return FnClass::K;
    case Kind::Callback:
      return FnClass::P;  // callbacks cannot be classified further
  }
  return FnClass::None;
}

// ---------------------------------------------------------------------------
// SampleBox

SampleBox SampleBox::around(std::span<const double> x0, double factor) {
  SampleBox box;
  box.hi.reserve(x0.size());
  for (double v : x0) box.hi.push_back(factor * std::max(v, 1.0));
  return box;
}

double SampleBox::upper(int i) const {
  if (hi.empty()) return 1000.0;
  return hi[static_cast<std::size_t>(i) % hi.size()];
}

// ---------------------------------------------------------------------------
// BalancedNetwork

NetworkBuilder::NetworkBuilder(int n) {
  if (n < 2) throw Error("network needs at least two nodes");
  net_.n_ = n;
  net_.down_.resize(n);
  net_.up_.resize(n);
  net_.theta_.assign(n, ScalarFn::zero());
  net_.kappa_.assign(n, ScalarFn::zero());
  net_.labels_.resize(n);
  for (int i = 0; i < n; ++i) net_.labels_[i] = "x" + std::to_string(i + 1);
}

NetworkBuilder& NetworkBuilder::transfer_down(int src, RateFunction eta,
                                              RateFunction sigma, double ell) {
  if (ell < 0.0) throw Error("gain bound must be nonnegative");
  Transfer& t = net_.down_.at(src);
  t.eta = std::move(eta);
  t.sigma = std::move(sigma);
  t.ell = ell;
  return *this;
}

NetworkBuilder& NetworkBuilder::transfer_up(int src, RateFunction eta,
                                            RateFunction sigma, double ell) {
  if (net_.n_ == 2)
    throw Error(
        "for a two-node ring the directions coincide; declare the transfer "
        "for each ordered pair on the downstream side");
  if (ell < 0.0) throw Error("gain bound must be nonnegative");
  Transfer& t = net_.up_.at(src);
  t.eta = std::move(eta);
  t.sigma = std::move(sigma);
  t.ell = ell;
  return *this;
}

NetworkBuilder& NetworkBuilder::dissipation(int i, ScalarFn theta) {
  net_.theta_.at(i) = std::move(theta);
  return *this;
}

NetworkBuilder& NetworkBuilder::input(int i, ScalarFn kappa) {
  net_.kappa_.at(i) = std::move(kappa);
  return *this;
}

NetworkBuilder& NetworkBuilder::label(int i, std::string name) {
  net_.labels_.at(i) = std::move(name);
  return *this;
}

BalancedNetwork NetworkBuilder::build() {
  if (built_) throw Error("builder already consumed");
  built_ = true;
  return std::move(net_);
}

const Transfer& BalancedNetwork::transfer_for_pair(int dest, int src) const {
  // For n == 2 both directions name the same ordered pair and the transfer
  // lives on the downstream side, which is checked first.
  if (dest == next(src)) return down_[src];
  if (dest == prev(src)) return up_[src];
  throw Error("nodes " + std::to_string(dest + 1) + " and " +
              std::to_string(src + 1) + " are not ring neighbors");
}

Transfer& BalancedNetwork::transfer_for_pair(int dest, int src) {
  return const_cast<Transfer&>(
      static_cast<const BalancedNetwork*>(this)->transfer_for_pair(dest, src));
}

double BalancedNetwork::ell(int dest, int src) const {
  const Transfer& t = transfer_for_pair(dest, src);
  if (!t.ell)
    throw Error("gain bound ell_{" + std::to_string(dest + 1) + "," +
                std::to_string(src + 1) + "} was not declared");
  return *t.ell;
}

bool BalancedNetwork::ell_declared(int dest, int src) const {
  return transfer_for_pair(dest, src).ell.has_value();
}

BalancedNetwork BalancedNetwork::with_ell(int dest, int src,
                                          double value) const {
  if (value < 0.0) throw Error("gain bound must be nonnegative");
  BalancedNetwork copy = *this;
  copy.transfer_for_pair(dest, src).ell = value;
  return copy;
}

std::vector<double> BalancedNetwork::vector_field(
    std::span<const double> x, std::span<const double> w) const {
  if (static_cast<int>(x.size()) != n_)
    throw DimensionError("state has " + std::to_string(x.size()) +
                         " components, network has " + std::to_string(n_));
  if (static_cast<int>(w.size()) != n_)
    throw DimensionError("input has " + std::to_string(w.size()) +
                         " components, network has " + std::to_string(n_));

  std::vector<double> f(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double v = -up_[i].eta.eval(x, i) - down_[i].eta.eval(x, i);
    // production received from the upstream neighbor (its downstream transfer)
    v += down_[prev(i)].sigma.eval(x, prev(i));
    // production received from the downstream neighbor (its upstream transfer)
    v += up_[next(i)].sigma.eval(x, next(i));
    v -= theta_[i](x[i]);
    v += kappa_[i](w[i]);
    f[i] = v;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Validators

namespace {

std::vector<double> random_state(std::mt19937_64& rng, int n,
                                 const SampleBox& box) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    std::uniform_real_distribution<double> dist(0.0, box.upper(i));
    x[i] = dist(rng);
  }
  return x;
}

std::string describe_state(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

ValidationReport validate_positivity(const BalancedNetwork& net, int samples,
                                     const SampleBox& box, unsigned seed) {
  if (samples < 1) throw Error("samples must be >= 1");
  constexpr double kTol = 1e-12;
  ValidationReport report;
  report.samples = samples;
  std::mt19937_64 rng(seed);
  const int n = net.size();
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < samples; ++s) {
      std::vector<double> x = random_state(rng, n, box);
      x[i] = 0.0;
      const double eu = net.up(i).eta.eval(x, i);
      const double ed = net.down(i).eta.eval(x, i);
      if (std::abs(eu) > kTol || std::abs(ed) > kTol) {
        report.passed = false;
        report.detail = "consumption of node " + std::to_string(i + 1) +
                        " does not vanish on its zero facet at x = " +
                        describe_state(x);
        report.violation_state = std::move(x);
        return report;
      }
    }
  }
  return report;
}

namespace {

// Transfers whose rates share a structural tag are decided by coefficient
// algebra (exact for every x); anything else falls back to value sampling.
enum class BoundCheck { ExactOk, ExactViolated, NeedsSampling };

BoundCheck structural_bound_check(const Transfer& t) {
  constexpr double kTol = 1e-12;
  if (t.sigma.is_zero()) return BoundCheck::ExactOk;
  const auto sk = t.sigma.kind();
  const auto ek = t.eta.kind();
  if (sk == RateFunction::Kind::Linear && ek == RateFunction::Kind::Linear)
    return t.sigma.coeff() <= *t.ell * t.eta.coeff() + kTol
               ? BoundCheck::ExactOk
               : BoundCheck::ExactViolated;
  if (sk == RateFunction::Kind::Bilinear &&
      ek == RateFunction::Kind::Bilinear &&
      t.sigma.partner() == t.eta.partner())
    return t.sigma.coeff() <= *t.ell * t.eta.coeff() + kTol
               ? BoundCheck::ExactOk
               : BoundCheck::ExactViolated;
  return BoundCheck::NeedsSampling;
}

}  // namespace

ValidationReport validate_gain_bounds(const BalancedNetwork& net, int samples,
                                      const SampleBox& box, unsigned seed) {
  if (samples < 1) throw Error("samples must be >= 1");
  constexpr double kTol = 1e-12;
  ValidationReport report;
  report.samples = samples;
  std::mt19937_64 rng(seed);
  const int n = net.size();

  const auto record_violation = [&](int dest, int src, std::vector<double> x,
                                    double sigma, double eta_bound) {
    report.passed = false;
    std::ostringstream os;
    os << "sigma_{" << dest + 1 << "," << src + 1 << "}(x) = " << sigma
       << " exceeds ell * eta = " << eta_bound << " at x = "
       << describe_state(x);
    report.detail = os.str();
    report.violation_state = std::move(x);
  };

  // structural pass first
  std::vector<std::pair<int, int>> sampled_pairs;  // (src, dest) to sample
  for (int src = 0; src < n; ++src) {
    const auto classify = [&](const Transfer& t, int dest) -> bool {
      if (!t.ell) return true;  // undeclared bounds are not checked here
      switch (structural_bound_check(t)) {
        case BoundCheck::ExactOk:
          return true;
        case BoundCheck::ExactViolated: {
          // witness state: all coordinates at the box midpoint
          std::vector<double> x(n);
          for (int i = 0; i < n; ++i) x[i] = 0.5 * box.upper(i);
          record_violation(dest, src, std::move(x), t.sigma.coeff(),
                           *t.ell * t.eta.coeff());
          return false;
        }
        case BoundCheck::NeedsSampling:
          sampled_pairs.emplace_back(src, dest);
          return true;
      }
      return true;
    };
    if (!classify(net.down(src), net.next(src))) return report;
    if (n > 2 && !classify(net.up(src), net.prev(src))) return report;
  }

  for (int s = 0; s < samples && !sampled_pairs.empty(); ++s) {
    std::vector<double> x = random_state(rng, n, box);
    for (const auto& [src, dest] : sampled_pairs) {
      const Transfer& t = net.transfer_between(dest, src);
      const double sigma = t.sigma.eval(x, src);
      const double eta = t.eta.eval(x, src);
      if (sigma > *t.ell * eta + kTol) {
        record_violation(dest, src, x, sigma, *t.ell * eta);
        return report;
      }
    }
  }
  report.detail = "no violation found in " + std::to_string(samples) +
                  " samples";
  return report;
}

// ---------------------------------------------------------------------------
// InputSignal

InputSignal InputSignal::constant(double value) {
  if (value < 0.0 || !std::isfinite(value))
    throw Error("input signal must be nonnegative and finite");
  InputSignal s;
  s.kind_ = Kind::Constant;
  s.value_ = value;
  return s;
}

InputSignal InputSignal::piecewise_constant(
    std::vector<std::pair<double, double>> steps) {
  if (steps.empty()) throw Error("piecewise signal needs at least one step");
  if (steps.front().first != 0.0)
    throw Error("piecewise signal must start at t = 0");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].second < 0.0 || !std::isfinite(steps[i].second))
      throw Error("input signal must be nonnegative and finite");
    if (i > 0 && steps[i].first <= steps[i - 1].first)
      throw Error("piecewise breakpoints must be strictly increasing");
  }
  InputSignal s;
  s.kind_ = Kind::PiecewiseConstant;
  s.steps_ = std::move(steps);
  return s;
}

InputSignal InputSignal::callback(std::function<double(double)> fn) {
  if (!fn) throw Error("input callback must not be empty");
  InputSignal s;
  s.kind_ = Kind::Callback;
  s.fn_ = std::move(fn);
  return s;
}

double InputSignal::value(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::PiecewiseConstant: {
      // last step with time <= t
      auto it = std::upper_bound(
          steps_.begin(), steps_.end(), t,
          [](double tt, const auto& step) { return tt < step.first; });
      if (it == steps_.begin()) return steps_.front().second;
      return std::prev(it)->second;
    }
    case Kind::Callback:
      return fn_(t);
  }
  return 0.0;
}

double InputSignal::supremum(double t0, double t1) const {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::PiecewiseConstant: {
      double sup = value(t0);
      for (const auto& [t, v] : steps_)
        if (t > t0 && t <= t1) sup = std::max(sup, v);
      return sup;
    }
    case Kind::Callback: {
      double sup = 0.0;
      const int kGrid = 4096;
      for (int i = 0; i <= kGrid; ++i) {
        const double t = t0 + (t1 - t0) * i / kGrid;
        sup = std::max(sup, fn_(t));
      }
      return sup;
    }
  }
  return 0.0;
}

std::vector<double> InputSignal::breakpoints_in(double t0, double t1) const {
  std::vector<double> out;
  if (kind_ != Kind::PiecewiseConstant) return out;
  for (const auto& [t, v] : steps_)
    if (t > t0 && t < t1) out.push_back(t);
  return out;
}

}  // namespace epinet
