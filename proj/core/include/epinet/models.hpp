#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epinet/config.hpp"
#include "epinet/network.hpp"

namespace epinet {

/// The model catalog. SIR_VACC_A vaccinates newborns into a separate
/// compartment, SIR_VACC_R folds them into the recovered compartment, and
/// SIR_VACC_S continuously vaccinates susceptibles at rate rho.
enum class Family {
  SIR,
  SEIS,
  MSIR,
  SEIR,
  SIR_VACC_A,
  SIR_VACC_R,
  SIR_VACC_S,
};

const char* to_string(Family f);
Family family_from_string(const std::string& name);

struct EpidemicParams {
  double beta = 0.0;   ///< contact rate, 1/(population * time)
  double gamma = 0.0;  ///< recovery rate, 1/time
  double mu = 0.0;     ///< death rate, 1/time
  std::optional<double> epsilon;  ///< incubation transition rate (SEIS/SEIR)
  std::optional<double> delta;    ///< maternal-immunity loss rate (MSIR)
  std::optional<double> P;        ///< vaccination fraction in [0,1)
  std::optional<double> rho;      ///< vaccination rate (SIR_VACC_S)
};

/// A parameterized catalog entry. `lower()` produces the balancing-kinetics
/// decomposition with the family's declared gain bounds (all 1) and
/// dissipation theta_i(s) = mu*s on every node.
struct EpidemicModel {
  Family family = Family::SIR;
  EpidemicParams params;

  int dim() const;
  std::vector<std::string> state_labels() const;

  /// Throws ConfigError naming the offending parameter.
  void validate() const;

  BalancedNetwork lower() const;
};

EpidemicModel make_model(Family family, const EpidemicParams& params);

/// Parses a `[model]` table: `family` plus the family's parameters. Unknown
/// or missing fields are rejected with the field path.
EpidemicModel model_from_config(const toml::Table& model_table,
                                const std::string& path_prefix = "model");

/// Initial state from an `[initial]` table keyed by the model's state labels.
std::vector<double> initial_state_from_config(const EpidemicModel& model,
                                              const toml::Table& initial_table,
                                              const std::string& path_prefix =
                                                  "initial");

}  // namespace epinet
