#include <doctest.h>

#include <cmath>

#include "epinet/propcheck.hpp"
#include "oracles.hpp"

using namespace epinet;

namespace {

PropcheckConfig grid_cfg(double t_end = 2000.0) {
  PropcheckConfig cfg;
  cfg.sim.t_end = t_end;
  return cfg;
}

const std::vector<double> kSirX0{700.0, 200.0, 70.0};

}  // namespace

TEST_CASE("low inflow eradicates, high inflow persists") {
  const auto sir = oracles::figure_sir();
  {
    const auto rep = check_input_threshold_dichotomy(sir, InputSignal::constant(3.0),
                                        kSirX0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.claim == "eradication-below-input-threshold");
    CHECK(rep.measured.at("convergence_time") > 0.0);
  }
  {
    const auto rep = check_input_threshold_dichotomy(sir, InputSignal::constant(12.0),
                                        kSirX0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.claim == "endemic-persistence-above-input-threshold");
    // the revisit probe tracked the endemic infected level
    CHECK(rep.measured.at("endemic_I") ==
          doctest::Approx(180.3191).epsilon(1e-4));
    CHECK(std::abs(rep.measured.at("I_at_last_probe") -
                   rep.measured.at("endemic_I")) <
          0.02 * rep.measured.at("endemic_I"));
  }
}

TEST_CASE("SEIS eradication below its threshold") {
  const auto seis = oracles::figure_seis();
  const auto rep = check_input_threshold_dichotomy(seis, InputSignal::constant(3.0),
                                      kSirX0, grid_cfg());
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.claim == "eradication-below-input-threshold");
}

TEST_CASE("inputs near the threshold give no verdict") {
  const auto sir = oracles::figure_sir();
  const auto rep = check_input_threshold_dichotomy(
      sir, InputSignal::constant(3.525 * 1.005), kSirX0, grid_cfg());
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("the endemic claim needs infected initial mass") {
  const auto sir = oracles::figure_sir();
  const std::vector<double> x0{700.0, 0.0, 0.0};
  const auto rep = check_input_threshold_dichotomy(sir, InputSignal::constant(12.0), x0,
                                      grid_cfg());
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("ultimate bound on the aggregate holds below the threshold") {
  const auto sir = oracles::figure_sir();
  {
    const auto rep = check_V_U_ultimate_bound(sir, InputSignal::constant(3.0),
                                              kSirX0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
    // S + I settles near B/mu = 200, leaving a margin of about H - 200 = 35
    CHECK(rep.measured.at("eps_trailing") ==
          doctest::Approx(35.0).epsilon(0.15));
  }
  {
    const auto rep = check_V_U_ultimate_bound(sir, InputSignal::constant(12.0),
                                              kSirX0, grid_cfg());
    CHECK(rep.verdict == Verdict::Inconclusive);  // precondition fails
  }
}

TEST_CASE("vaccinated newborns push the aggregate below the threshold") {
  auto p = oracles::figure_params();
  p.P = 0.8;
  const auto model = make_model(Family::SIR_VACC_A, p);
  const std::vector<double> x0{700.0, 200.0, 70.0, 0.0};
  {
    const auto rep = check_V_U_ultimate_bound(
        model, InputSignal::constant(12.0), x0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
    // V_U = S -> B(1-P)/mu = 160, margin about 235 - 160 = 75
    CHECK(rep.measured.at("eps_trailing") ==
          doctest::Approx(75.0).epsilon(0.15));
  }
  {
    const auto rep = check_input_threshold_dichotomy(model, InputSignal::constant(12.0),
                                        x0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.claim == "eradication-below-input-threshold");
  }
}

TEST_CASE("disease-free limits match the family equilibria") {
  {
    const auto sir = oracles::figure_sir();
    const auto rep = check_disease_free_limit(sir, 3.0, kSirX0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.measured.at("worst_relative_error") < 0.005);
  }
  {
    auto p = oracles::figure_params();
    p.P = 0.8;
    const auto model = make_model(Family::SIR_VACC_A, p);
    const std::vector<double> x0{700.0, 200.0, 70.0, 0.0};
    // limit [160, 0, 0, 640]
    const auto rep = check_disease_free_limit(model, 12.0, x0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
  }
  {
    auto p = oracles::figure_params();
    p.P = 0.8;
    const auto model = make_model(Family::SIR_VACC_R, p);
    const std::vector<double> x0{700.0, 200.0, 70.0};
    // limit [160, 0, 640]
    const auto rep = check_disease_free_limit(model, 12.0, x0, grid_cfg());
    CHECK(rep.verdict == Verdict::Pass);
  }
  {
    const auto sir = oracles::figure_sir();
    const auto rep = check_disease_free_limit(sir, 12.0, kSirX0, grid_cfg());
    CHECK(rep.verdict == Verdict::Inconclusive);  // above the threshold
  }
}

TEST_CASE("short horizons are reported as inconclusive, not failures") {
  const auto sir = oracles::figure_sir();
  const auto rep =
      check_disease_free_limit(sir, 3.0, kSirX0, grid_cfg(300.0));
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("drift signs split at the bifurcation level") {
  for (const auto& model : oracles::full_catalog()) {
    const auto rep = check_VL_decrease_in_region(model, 0.95);
    INFO("family ", to_string(model.family));
    CHECK(rep.verdict == Verdict::Pass);
  }
}

TEST_CASE("eradication is monotone in the inflow") {
  const auto sir = oracles::figure_sir();
  double prev_time = 1e30;
  for (double B : {3.0, 2.0, 1.0}) {  // decreasing below Q
    const auto rep = check_input_threshold_dichotomy(sir, InputSignal::constant(B), kSirX0,
                                        grid_cfg());
    REQUIRE(rep.verdict == Verdict::Pass);
    const double t = rep.measured.at("convergence_time");
    CHECK(t <= prev_time + 1e-9);
    prev_time = t;
  }
}
