#include "epinet/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epinet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// MonotoneFn / ominus

MonotoneFn MonotoneFn::linear(double coeff) {
  if (coeff <= 0.0) throw Error("monotone gain coefficient must be positive");
  MonotoneFn f;
  f.linear_ = true;
  f.coeff_ = coeff;
  return f;
}

MonotoneFn MonotoneFn::callback(std::function<double(double)> fn) {
  if (!fn) throw Error("monotone callback must not be empty");
  MonotoneFn f;
  f.linear_ = false;
  f.fn_ = std::move(fn);
  return f;
}

double MonotoneFn::operator()(double s) const {
  return linear_ ? coeff_ * s : fn_(s);
}

double ominus(const MonotoneFn& eta, double s) {
  if (s < 0.0) throw Error("ominus argument must be nonnegative");
  if (eta.is_linear()) return s / eta.coeff();
  if (s == 0.0) return 0.0;

  if (std::abs(eta(0.0)) > 1e-12)
    throw Error("monotone callback must vanish at zero");

  // Double tau until eta(tau) reaches s; give up at the overflow sentinel,
  // which means s is at or above the supremum of eta.
  double hi = 1.0;
  double prev = eta(hi);
  while (prev < s) {
    hi *= 2.0;
    if (hi > 1e150) return kInf;
    const double v = eta(hi);
    if (v < prev - 1e-12)
      throw Error("callback is not increasing on the sampled grid");
    prev = v;
  }
  if (prev == s) {
    // The crossing may be a saturation plateau that merely rounds to s; a
    // strictly increasing eta must exceed s further out.
    if (eta(hi * 4.0) <= s && eta(hi * 64.0) <= s) return kInf;
  }
  // Spot-check monotonicity on a grid of [0, hi].
  double last = 0.0;
  for (int k = 1; k <= 32; ++k) {
    const double v = eta(hi * k / 32.0);
    if (v < last - 1e-12)
      throw Error("callback is not increasing on the sampled grid");
    last = v;
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eta(mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Partition

double Partition::vU(std::span<const double> x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += vU_weights[i] * x[i];
  return v;
}

double Partition::vL(std::span<const double> x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += vL_weights[i] * x[i];
  return v;
}

Partition partition_UL(const EpidemicModel& model, double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error("partition parameter a must lie in (0,1)");
  model.validate();
  const auto& p = model.params;
  const int n = model.dim();
  const double H = bifurcation_point(model);

  Partition part;
  part.vU_weights.assign(n, 0.0);
  part.vL_weights.assign(n, 0.0);
  part.alpha_U = MonotoneFn::linear(p.mu);
  part.sigma_U = MonotoneFn::linear(1.0);

  switch (model.family) {
    case Family::SIR:
      part.U = {0, 1};  // the S+I subsystem is ISS from B
      part.L = {1};
      part.vU_weights[0] = part.vU_weights[1] = 1.0;
      part.vL_weights[1] = 1.0;
      break;
    case Family::SEIS: {
      part.U = {0, 1, 2};
      part.L = {1, 2};
      std::fill(part.vU_weights.begin(), part.vU_weights.end(), 1.0);
      const double s_sharp = a * a * H;
      const double eps = *p.epsilon;
      const double lambda2 = std::sqrt(p.beta * s_sharp * (eps + p.mu) /
                                       ((p.gamma + p.mu) * eps));
      part.vL_weights[1] = 1.0;
      part.vL_weights[2] = lambda2;
      break;
    }
    case Family::MSIR:
      part.U = {0, 1, 2, 3};
      part.L = {2};
      std::fill(part.vU_weights.begin(), part.vU_weights.end(), 1.0);
      part.vL_weights[2] = 1.0;
      // Only the fraction delta/(delta+mu) of the inflow survives the
      // maternal-immunity compartment into S.
      part.effective_input_factor = *p.delta / (*p.delta + p.mu);
      break;
    case Family::SEIR: {
      part.U = {0, 1, 2, 3};
      part.L = {1, 2, 3};
      std::fill(part.vU_weights.begin(), part.vU_weights.end(), 1.0);
      const double s_sharp = a * a * H;
      const double eps = *p.epsilon;
      const double lambda_i = std::sqrt(p.beta * s_sharp * (eps + p.mu) /
                                        ((p.gamma + p.mu) * eps));
      // lambda_i*(gamma+mu) = beta*sqrt(s_sharp*H); half the slack keeps the
      // recovered term from flipping the drift sign inside the region.
      const double margin = p.beta * (std::sqrt(s_sharp * H) - s_sharp);
      part.vL_weights[1] = 1.0;
      part.vL_weights[2] = lambda_i;
      part.vL_weights[3] = margin / (2.0 * p.gamma);
      break;
    }
    case Family::SIR_VACC_A:
      part.U = {0};
      part.L = {1};
      part.vU_weights[0] = 1.0;
      part.vL_weights[1] = 1.0;
      part.sigma_U = MonotoneFn::linear(1.0 - *p.P);
      part.effective_input_factor = 1.0 - *p.P;
      break;
    case Family::SIR_VACC_R:
      part.U = {0};
      part.L = {1};
      part.vU_weights[0] = 1.0;
      part.vL_weights[1] = 1.0;
      part.sigma_U = MonotoneFn::linear(1.0 - *p.P);
      part.effective_input_factor = 1.0 - *p.P;
      break;
    case Family::SIR_VACC_S:
      part.U = {0};
      part.L = {1};
      part.vU_weights[0] = 1.0;
      part.vL_weights[1] = 1.0;
      part.alpha_U = MonotoneFn::linear(*p.rho + p.mu);
      break;
  }
  return part;
}

// ---------------------------------------------------------------------------
// Thresholds

double bifurcation_point(const EpidemicModel& model) {
  model.validate();
  const auto& p = model.params;
  switch (model.family) {
    case Family::SIR:
    case Family::MSIR:
    case Family::SIR_VACC_A:
    case Family::SIR_VACC_R:
    case Family::SIR_VACC_S:
      return (p.gamma + p.mu) / p.beta;
    case Family::SEIS:
    case Family::SEIR:
      return (p.gamma + p.mu) * (*p.epsilon + p.mu) / (p.beta * *p.epsilon);
  }
  throw Error("unsupported model family");
}

double input_threshold(const EpidemicModel& model) {
  const double H = bifurcation_point(model);
  if (model.family == Family::SIR_VACC_S)
    return (*model.params.rho + model.params.mu) * H;
  return model.params.mu * H;
}

double reproduction_number(const EpidemicModel& model, double B) {
  if (B < 0.0) throw Error("constant input B must be nonnegative");
  const Partition part = partition_UL(model);
  return B * part.effective_input_factor / input_threshold(model);
}

// ---------------------------------------------------------------------------
// Equilibria

namespace {

// Gaussian elimination with partial pivoting; a is row-major n x n.
bool solve_dense(std::vector<double> a, std::vector<double> b, int n,
                 std::vector<double>& out) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  out.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * out[c];
    out[r] = s / a[r * n + r];
  }
  return true;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Coarse fixed-step relaxation of the dynamics under constant B. The endemic
// equilibrium is the attractor for R0 > 1, so this lands inside the Newton
// basin without any closed-form knowledge of the root.
void relax_toward_attractor(const BalancedNetwork& net, double B,
                            std::vector<double>& x, double t_total,
                            double h) {
  const int n = net.size();
  const std::vector<double> w(n, B);
  const auto steps = static_cast<long>(t_total / h);
  std::vector<double> k1(n), x2(n);
  for (long s = 0; s < steps; ++s) {
    k1 = net.vector_field(x, w);
    for (int i = 0; i < n; ++i) x2[i] = std::max(x[i] + 0.5 * h * k1[i], 0.0);
    const auto k2 = net.vector_field(x2, w);
    for (int i = 0; i < n; ++i) x2[i] = std::max(x[i] + 0.5 * h * k2[i], 0.0);
    const auto k3 = net.vector_field(x2, w);
    for (int i = 0; i < n; ++i) x2[i] = std::max(x[i] + h * k3[i], 0.0);
    const auto k4 = net.vector_field(x2, w);
    for (int i = 0; i < n; ++i)
      x[i] = std::max(
          x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]), 0.0);
  }
}

// Damped Newton iteration on the vector field with a finite-difference
// Jacobian. Returns true when the residual max-norm drops below tol.
bool newton_equilibrium(const BalancedNetwork& net, double B,
                        std::vector<double>& x, double tol, int max_iter) {
  const int n = net.size();
  const std::vector<double> w(n, B);
  auto residual = [&](const std::vector<double>& y) {
    return net.vector_field(y, w);
  };
  std::vector<double> f = residual(x);
  for (int it = 0; it < max_iter; ++it) {
    if (max_abs(f) <= tol) return true;
    // central differences
    std::vector<double> jac(n * n, 0.0);
    for (int c = 0; c < n; ++c) {
      const double h = 1e-6 * std::max(std::abs(x[c]), 1.0);
      std::vector<double> xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      const auto fp = residual(xp);
      const auto fm = residual(xm);
      for (int r = 0; r < n; ++r) jac[r * n + c] = (fp[r] - fm[r]) / (2.0 * h);
    }
    std::vector<double> rhs(n);
    for (int r = 0; r < n; ++r) rhs[r] = -f[r];
    std::vector<double> step;
    if (!solve_dense(jac, rhs, n, step)) return false;

    const double f0 = max_abs(f);
    double damping = 1.0;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> cand = x;
      for (int i = 0; i < n; ++i) cand[i] += damping * step[i];
      const auto fc = residual(cand);
      if (max_abs(fc) < f0) {
        x = std::move(cand);
        f = fc;
        break;
      }
      damping *= 0.5;
      if (half == 29) return false;
    }
  }
  return max_abs(f) <= tol;
}

}  // namespace

std::pair<std::vector<double>, std::optional<std::vector<double>>> equilibria(
    const EpidemicModel& model, double B) {
  model.validate();
  if (B < 0.0) throw Error("constant input B must be nonnegative");
  const auto& p = model.params;
  const double H = bifurcation_point(model);
  const double R0 = reproduction_number(model, B);

  std::vector<double> free_eq;
  switch (model.family) {
    case Family::SIR:
      free_eq = {B / p.mu, 0.0, 0.0};
      break;
    case Family::SEIS:
      free_eq = {B / p.mu, 0.0, 0.0};
      break;
    case Family::MSIR: {
      const double d = *p.delta;
      free_eq = {B / (d + p.mu), d * B / (p.mu * (d + p.mu)), 0.0, 0.0};
      break;
    }
    case Family::SEIR:
      free_eq = {B / p.mu, 0.0, 0.0, 0.0};
      break;
    case Family::SIR_VACC_A:
      free_eq = {B * (1.0 - *p.P) / p.mu, 0.0, 0.0, B * *p.P / p.mu};
      break;
    case Family::SIR_VACC_R:
      free_eq = {B * (1.0 - *p.P) / p.mu, 0.0, B * *p.P / p.mu};
      break;
    case Family::SIR_VACC_S: {
      const double r = *p.rho;
      free_eq = {B / (r + p.mu), 0.0, 0.0, r * B / (p.mu * (r + p.mu))};
      break;
    }
  }

  if (R0 < 1.0) return {std::move(free_eq), std::nullopt};

  std::optional<std::vector<double>> endemic;
  switch (model.family) {
    case Family::SIR: {
      const double I = p.mu * (R0 - 1.0) / p.beta;
      endemic = std::vector<double>{H, I, p.gamma * I / p.mu};
      break;
    }
    case Family::SIR_VACC_A: {
      const double I = p.mu * (R0 - 1.0) / p.beta;
      endemic =
          std::vector<double>{H, I, p.gamma * I / p.mu, B * *p.P / p.mu};
      break;
    }
    case Family::SIR_VACC_R: {
      const double I = p.mu * (R0 - 1.0) / p.beta;
      endemic =
          std::vector<double>{H, I, (p.gamma * I + B * *p.P) / p.mu};
      break;
    }
    case Family::SIR_VACC_S: {
      const double I = (*p.rho + p.mu) * (R0 - 1.0) / p.beta;
      endemic = std::vector<double>{H, I, p.gamma * I / p.mu,
                                    *p.rho * H / p.mu};
      break;
    }
    case Family::SEIS:
    case Family::SEIR:
    case Family::MSIR: {
      // The first infected coordinate indexes E for the incubation models
      // and I for the maternal-immunity model.
      const int infected = model.family == Family::MSIR ? 2 : 1;
      std::vector<int> infected_set;
      if (model.family == Family::MSIR)
        infected_set = {2, 3};
      else if (model.family == Family::SEIS)
        infected_set = {1, 2};
      else
        infected_set = {1, 2, 3};
      const BalancedNetwork net = model.lower();
      const double scale = std::max(1.0, B / p.mu);
      // The disease-free point is itself a root sitting next to the seed, and
      // plain damped Newton falls into its basin. Relax along the dynamics
      // first (the endemic point is the attractor for R0 >= 1), then polish.
      const double fast_rate = p.beta * scale + p.gamma + p.mu +
                               p.epsilon.value_or(0.0) + p.delta.value_or(0.0);
      const double h = std::min(1.0, 0.5 / fast_rate);
      for (const double horizon : {4000.0, 16000.0}) {
        std::vector<double> x = free_eq;
        x[infected] += 1.0;
        relax_toward_attractor(net, B, x, horizon, h);
        if (!newton_equilibrium(net, B, x, 1e-10, 200)) continue;
        bool nonneg = true;
        for (double v : x)
          if (v < -1e-9) nonneg = false;
        if (!nonneg) continue;
        double infected_mass = 0.0;
        for (int c : infected_set) infected_mass = std::max(infected_mass, x[c]);
        if (infected_mass <= 1e-7 * scale && R0 > 1.0 + 1e-9)
          continue;  // polished into the disease-free root instead
        for (double& v : x) v = std::max(v, 0.0);
        endemic = std::move(x);
        break;
      }
      break;
    }
  }

  return {std::move(free_eq), std::move(endemic)};
}

ThresholdReport analyze_thresholds(const EpidemicModel& model, double B) {
  ThresholdReport rep;
  rep.H = bifurcation_point(model);
  rep.Q = input_threshold(model);
  rep.R0 = reproduction_number(model, B);
  auto [free_eq, endemic] = equilibria(model, B);
  rep.disease_free = std::move(free_eq);
  rep.endemic_solver_converged = !(rep.R0 >= 1.0 && !endemic.has_value());
  rep.endemic = std::move(endemic);
  const Partition part = partition_UL(model);
  rep.U = part.U;
  rep.L = part.L;
  rep.family = model.family;
  rep.params = model.params;
  rep.B = B;
  return rep;
}

}  // namespace epinet
