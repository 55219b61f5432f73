#include "epinet/json_out.hpp"

#include <json.hpp>

namespace epinet {

namespace {

using nlohmann::json;

json one_based(const std::vector<int>& idx) {
  json arr = json::array();
  for (int i : idx) arr.push_back(i + 1);
  return arr;
}

json params_json(Family family, const EpidemicParams& p) {
  json j;
  j["family"] = to_string(family);
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["mu"] = p.mu;
  if (p.epsilon) j["epsilon"] = *p.epsilon;
  if (p.delta) j["delta"] = *p.delta;
  if (p.P) j["P"] = *p.P;
  if (p.rho) j["rho"] = *p.rho;
  return j;
}

json supply_json(const std::optional<SupplyRate>& s) {
  json j;
  if (s && s->linear_coeff) {
    j["form"] = "linear";
    j["coefficient"] = *s->linear_coeff;
  } else if (s) {
    j["form"] = "numeric";
  }
  return j;
}

}  // namespace

std::string to_json(const StabilityCertificate& cert, int indent) {
  json j;
  j["class"] = to_string(cert.cls);
  j["certified"] = cert.certified();
  j["cond_cyc1"] = cert.cond_cyc1;
  j["cond_cycn"] = cert.cond_cycn;
  j["lambda"] = cert.lambda;
  j["anchor_k"] = cert.anchor_k >= 0 ? json(cert.anchor_k + 1) : json();
  j["admissible_k"] = one_based(cert.admissible_k);
  j["substitutions"] = cert.substitutions;
  if (!cert.failure.empty()) j["failure"] = cert.failure;
  if (cert.alpha) j["alpha"] = supply_json(cert.alpha);
  if (cert.sigma_supply) j["sigma"] = supply_json(cert.sigma_supply);
  return j.dump(indent);
}

std::string to_json(const ThresholdReport& rep, int indent) {
  json j;
  j["H"] = rep.H;
  j["Q"] = rep.Q;
  j["R0"] = rep.R0;
  j["B"] = rep.B;
  j["disease_free_equilibrium"] = rep.disease_free;
  if (rep.endemic)
    j["endemic_equilibrium"] = *rep.endemic;
  else
    j["endemic_equilibrium"] = nullptr;
  j["endemic_solver_converged"] = rep.endemic_solver_converged;
  j["U"] = one_based(rep.U);
  j["L"] = one_based(rep.L);
  j["model"] = params_json(rep.family, rep.params);
  return j.dump(indent);
}

std::string to_json(const VerdictReport& rep, int indent) {
  json j;
  j["claim"] = rep.claim;
  j["verdict"] = to_string(rep.verdict);
  if (!rep.reason.empty()) j["reason"] = rep.reason;
  j["inputs"] = rep.inputs;
  j["measured"] = rep.measured;
  j["tolerances"] = rep.tolerances;
  return j.dump(indent);
}

}  // namespace epinet
