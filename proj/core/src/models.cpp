#include "epinet/models.hpp"

#include <algorithm>
#include <cmath>

namespace epinet {

const char* to_string(Family f) {
  switch (f) {
    case Family::SIR: return "SIR";
    case Family::SEIS: return "SEIS";
    case Family::MSIR: return "MSIR";
    case Family::SEIR: return "SEIR";
    case Family::SIR_VACC_A: return "SIR_VACC_A";
    case Family::SIR_VACC_R: return "SIR_VACC_R";
    case Family::SIR_VACC_S: return "SIR_VACC_S";
  }
  return "SIR";
}

Family family_from_string(const std::string& name) {
  if (name == "SIR") return Family::SIR;
  if (name == "SEIS") return Family::SEIS;
  if (name == "MSIR") return Family::MSIR;
  if (name == "SEIR") return Family::SEIR;
  if (name == "SIR_VACC_A") return Family::SIR_VACC_A;
  if (name == "SIR_VACC_R") return Family::SIR_VACC_R;
  if (name == "SIR_VACC_S") return Family::SIR_VACC_S;
  throw ConfigError("model.family", "unknown model family '" + name + "'");
}

int EpidemicModel::dim() const {
  switch (family) {
    case Family::SIR:
    case Family::SEIS:
    case Family::SIR_VACC_R:
      return 3;
    default:
      return 4;
  }
}

std::vector<std::string> EpidemicModel::state_labels() const {
  switch (family) {
    case Family::SIR: return {"S", "I", "R"};
    case Family::SEIS: return {"S", "E", "I"};
    case Family::MSIR: return {"M", "S", "I", "R"};
    case Family::SEIR: return {"S", "E", "I", "R"};
    case Family::SIR_VACC_A: return {"S", "I", "R", "A"};
    case Family::SIR_VACC_R: return {"S", "I", "R"};
    case Family::SIR_VACC_S: return {"S", "I", "R", "A"};
  }
  return {};
}

void EpidemicModel::validate() const {
  const auto need = [&](const std::optional<double>& v, const char* name,
                        bool required) {
    const std::string path = std::string("model.") + name;
    if (required && !v)
      throw ConfigError(path, std::string("required for family ") +
                                  to_string(family));
    if (!required && v)
      throw ConfigError(path, std::string("not a parameter of family ") +
                                  to_string(family));
  };
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("model.") + name, "must be positive");
  };
  positive(params.beta, "beta");
  positive(params.gamma, "gamma");
  positive(params.mu, "mu");

  const bool incubation = family == Family::SEIS || family == Family::SEIR;
  need(params.epsilon, "epsilon", incubation);
  if (params.epsilon) positive(*params.epsilon, "epsilon");

  need(params.delta, "delta", family == Family::MSIR);
  if (params.delta) positive(*params.delta, "delta");

  const bool newborn_vacc =
      family == Family::SIR_VACC_A || family == Family::SIR_VACC_R;
  need(params.P, "P", newborn_vacc);
  if (params.P && !(*params.P >= 0.0 && *params.P < 1.0))
    throw ConfigError("model.P", "must lie in [0, 1)");

  need(params.rho, "rho", family == Family::SIR_VACC_S);
  if (params.rho) positive(*params.rho, "rho");
}

EpidemicModel make_model(Family family, const EpidemicParams& params) {
  EpidemicModel m{family, params};
  m.validate();
  return m;
}

namespace {

// Ring decomposition shared by the catalog: every nonzero transfer has
// sigma == eta, so the declared bounds are all 1; dissipation is mu*s on
// every node.
BalancedNetwork build_ring(const EpidemicModel& model) {
  const auto& p = model.params;
  const int n = model.dim();
  NetworkBuilder b(n);
  const auto labels = model.state_labels();
  for (int i = 0; i < n; ++i) {
    b.label(i, labels[i]);
    b.dissipation(i, ScalarFn::linear(p.mu));
    // Zero transfers still carry the declared unit bound of the family.
    b.transfer_down(i, RateFunction::zero(), RateFunction::zero(), 1.0);
    if (n > 2) b.transfer_up(i, RateFunction::zero(), RateFunction::zero(), 1.0);
  }
  const auto pair_down = [&](int src, RateFunction rate) {
    RateFunction copy = rate;
    b.transfer_down(src, std::move(rate), std::move(copy), 1.0);
  };

  switch (model.family) {
    case Family::SIR:
      // order (S, I, R): infection S->I, recovery I->R
      pair_down(0, RateFunction::bilinear(p.beta, 1));
      pair_down(1, RateFunction::linear(p.gamma));
      b.input(0, ScalarFn::linear(1.0));
      break;
    case Family::SEIS:
      // order (S, E, I): infection S->E, incubation E->I, and the
      // short-immunity return I->S closes the length-3 cycle
      pair_down(0, RateFunction::bilinear(p.beta, 2));
      pair_down(1, RateFunction::linear(*p.epsilon));
      pair_down(2, RateFunction::linear(p.gamma));
      b.input(0, ScalarFn::linear(1.0));
      break;
    case Family::MSIR:
      // order (M, S, I, R)
      pair_down(0, RateFunction::linear(*p.delta));
      pair_down(1, RateFunction::bilinear(p.beta, 2));
      pair_down(2, RateFunction::linear(p.gamma));
      b.input(0, ScalarFn::linear(1.0));
      break;
    case Family::SEIR:
      // order (S, E, I, R)
      pair_down(0, RateFunction::bilinear(p.beta, 2));
      pair_down(1, RateFunction::linear(*p.epsilon));
      pair_down(2, RateFunction::linear(p.gamma));
      b.input(0, ScalarFn::linear(1.0));
      break;
    case Family::SIR_VACC_A:
      // order (S, I, R, A); the input splits across the S and A channels
      pair_down(0, RateFunction::bilinear(p.beta, 1));
      pair_down(1, RateFunction::linear(p.gamma));
      b.input(0, ScalarFn::linear(1.0 - *p.P));
      b.input(3, ScalarFn::linear(*p.P));
      break;
    case Family::SIR_VACC_R:
      pair_down(0, RateFunction::bilinear(p.beta, 1));
      pair_down(1, RateFunction::linear(p.gamma));
      b.input(0, ScalarFn::linear(1.0 - *p.P));
      b.input(2, ScalarFn::linear(*p.P));
      break;
    case Family::SIR_VACC_S: {
      // order (S, I, R, A); continuous vaccination is the upstream transfer
      // S -> A on the wrap edge
      pair_down(0, RateFunction::bilinear(p.beta, 1));
      pair_down(1, RateFunction::linear(p.gamma));
      RateFunction vacc = RateFunction::linear(*p.rho);
      RateFunction vacc_sigma = vacc;
      b.transfer_up(0, std::move(vacc), std::move(vacc_sigma), 1.0);
      b.input(0, ScalarFn::linear(1.0));
      break;
    }
  }
  return b.build();
}

}  // namespace

BalancedNetwork EpidemicModel::lower() const {
  validate();
  return build_ring(*this);
}

// ---------------------------------------------------------------------------
// Config parsing

EpidemicModel model_from_config(const toml::Table& t,
                                const std::string& path) {
  const std::string family_name = toml::get_string(t, "family", path);
  const Family family = family_from_string(family_name);

  std::vector<std::string> allowed = {"family", "beta", "gamma", "mu"};
  const bool incubation = family == Family::SEIS || family == Family::SEIR;
  if (incubation) allowed.push_back("epsilon");
  if (family == Family::MSIR) allowed.push_back("delta");
  if (family == Family::SIR_VACC_A || family == Family::SIR_VACC_R)
    allowed.push_back("P");
  if (family == Family::SIR_VACC_S) allowed.push_back("rho");
  toml::reject_unknown_keys(t, allowed, path);

  EpidemicParams p;
  p.beta = toml::get_number(t, "beta", path);
  p.gamma = toml::get_number(t, "gamma", path);
  p.mu = toml::get_number(t, "mu", path);
  if (toml::find(t, "epsilon")) p.epsilon = toml::get_number(t, "epsilon", path);
  if (toml::find(t, "delta")) p.delta = toml::get_number(t, "delta", path);
  if (toml::find(t, "P")) p.P = toml::get_number(t, "P", path);
  if (toml::find(t, "rho")) p.rho = toml::get_number(t, "rho", path);

  return make_model(family, p);
}

std::vector<double> initial_state_from_config(const EpidemicModel& model,
                                              const toml::Table& t,
                                              const std::string& path) {
  const auto labels = model.state_labels();
  toml::reject_unknown_keys(t, labels, path);
  std::vector<double> x0(labels.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!toml::find(t, labels[i]))
      throw ConfigError(path + "." + labels[i], "missing initial value");
    x0[i] = toml::get_number(t, labels[i], path);
    if (x0[i] < 0.0)
      throw ConfigError(path + "." + labels[i], "must be nonnegative");
  }
  return x0;
}

}  // namespace epinet
