#include <doctest.h>

#include <cmath>
#include <random>

#include "epinet/certificate.hpp"
#include "epinet/models.hpp"
#include "epinet/network.hpp"
#include "oracles.hpp"

using namespace epinet;

TEST_CASE("circular_index matches the wrap convention") {
  CHECK(circular_index(4, 3) == 1);
  CHECK(circular_index(0, 3) == 3);
  CHECK(circular_index(2, 3) == 2);
  CHECK(circular_index(-1, 3) == 2);
  CHECK(circular_index(7, 3) == 1);
}

TEST_CASE("circular_index is periodic") {
  std::mt19937_64 g = oracles::rng();
  std::uniform_int_distribution<int> nk(1, 12);
  std::uniform_int_distribution<long long> kk(-1000, 1000);
  for (int i = 0; i < 500; ++i) {
    const int n = nk(g);
    const long long k = kk(g);
    CHECK(circular_index(k + n, n) == circular_index(k, n));
    const int v = circular_index(k, n);
    CHECK(v >= 1);
    CHECK(v <= n);
  }
}

TEST_CASE("SIR vector field reproduces direct arithmetic") {
  const auto model = oracles::figure_sir();
  const auto net = model.lower();
  const std::vector<double> x{700.0, 200.0, 70.0};
  const std::vector<double> w{12.0, 12.0, 12.0};
  const auto f = net.vector_field(x, w);
  // dS = 12 - 0.015*700 - 0.0002*200*700, dI = 28 - 0.047*200, dR = 6.4 - 1.05
  CHECK(f[0] == doctest::Approx(-26.5).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(18.6).epsilon(1e-12));
  CHECK(f[2] == doctest::Approx(5.35).epsilon(1e-12));
}

TEST_CASE("field vanishes at the origin with zero input") {
  for (const auto& model : oracles::full_catalog()) {
    const auto net = model.lower();
    const std::vector<double> zero(net.size(), 0.0);
    const auto f = net.vector_field(zero, zero);
    for (double v : f) CHECK(v == 0.0);
  }
}

TEST_CASE("field is nonnegative on every zero facet") {
  std::mt19937_64 g = oracles::rng(17);
  for (const auto& model : oracles::full_catalog()) {
    const auto net = model.lower();
    const int n = net.size();
    for (int i = 0; i < n; ++i) {
      for (int s = 0; s < 200; ++s) {
        auto x = oracles::random_box_state(g, n, 1000.0);
        x[i] = 0.0;
        auto w = oracles::random_box_state(g, n, 20.0);
        const auto f = net.vector_field(x, w);
        CHECK(f[i] >= -1e-12);
      }
    }
  }
}

TEST_CASE("vector_field rejects dimension mismatches") {
  const auto net = oracles::figure_sir().lower();
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> w{0.0, 0.0, 0.0};
  CHECK_THROWS_AS((void)net.vector_field(x, w), DimensionError);
  const std::vector<double> x3{1.0, 2.0, 3.0};
  const std::vector<double> w2{0.0, 0.0};
  CHECK_THROWS_AS((void)net.vector_field(x3, w2), DimensionError);
}

TEST_CASE("validate_positivity accepts the catalog lowerings") {
  for (const auto& model : oracles::full_catalog()) {
    const auto net = model.lower();
    const auto rep = validate_positivity(net, 200);
    CHECK(rep.passed);
  }
}

TEST_CASE("validate_positivity flags a constant consumption rate") {
  NetworkBuilder b(3);
  b.transfer_down(0, RateFunction::callback([](std::span<const double>) {
                    return 1.0;  // does not vanish at x_1 = 0
                  }),
                  RateFunction::zero(), 1.0);
  const auto net = b.build();
  const auto rep = validate_positivity(net, 50);
  CHECK_FALSE(rep.passed);
  CHECK(rep.violation_state.has_value());
  CHECK((*rep.violation_state)[0] == 0.0);
}

TEST_CASE("validate_gain_bounds finds no violation at the declared bounds") {
  for (const auto& model : oracles::full_catalog()) {
    const auto net = model.lower();
    const auto rep = validate_gain_bounds(net, 500);
    CHECK(rep.passed);
    CHECK(rep.detail == "no violation found in 500 samples");
  }
}

TEST_CASE("validate_gain_bounds flags a bound below equality") {
  const auto model = oracles::figure_sir();
  // sigma_{2,1} = eta_{2,1} = beta*I*S but the bound is halved
  const auto net = model.lower().with_ell(1, 0, 0.5);
  const auto rep = validate_gain_bounds(net, 500);
  CHECK_FALSE(rep.passed);
  CHECK(rep.violation_state.has_value());
}

TEST_CASE("EI subsystem satisfies its declared bounds") {
  auto p = oracles::figure_params();
  p.epsilon = oracles::epsilon_for_H(p, 455.3);
  const auto net = oracles::ei_subsystem(p, 300.0, 0.5);
  CHECK(validate_positivity(net, 200).passed);
  CHECK(validate_gain_bounds(net, 500).passed);
}

TEST_CASE("exact declared bounds on linear and bilinear rates never violate") {
  std::mt19937_64 g = oracles::rng(23);
  std::uniform_real_distribution<double> coeff(0.01, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    NetworkBuilder b(4);
    for (int i = 0; i < 4; ++i) {
      const double ce = coeff(g);
      const double cs = coeff(g);
      // sigma = (cs/ce) * eta exactly, declared bound cs/ce
      b.transfer_down(i, RateFunction::linear(ce), RateFunction::linear(cs),
                      cs / ce);
      const double be = coeff(g);
      const double bs = coeff(g);
      b.transfer_up(i, RateFunction::bilinear(be, (i + 2) % 4),
                    RateFunction::bilinear(bs, (i + 2) % 4), bs / be);
      b.dissipation(i, ScalarFn::linear(coeff(g)));
    }
    const auto net = b.build();
    CHECK(validate_gain_bounds(net, 200).passed);
  }
}

TEST_CASE("sample box scales from an initial state") {
  const std::vector<double> x0{700.0, 0.2, 70.0};
  const auto box = SampleBox::around(x0);
  CHECK(box.upper(0) == doctest::Approx(7000.0));
  CHECK(box.upper(1) == doctest::Approx(10.0));  // max(x0, 1) * 10
  CHECK(box.upper(2) == doctest::Approx(700.0));
}

TEST_CASE("input signals evaluate and validate") {
  const auto c = InputSignal::constant(12.0);
  CHECK(c.value(0.0) == 12.0);
  CHECK(c.value(1e6) == 12.0);
  CHECK(c.supremum(0.0, 100.0) == 12.0);
  CHECK(c.breakpoints_in(0.0, 100.0).empty());

  const auto pw = InputSignal::piecewise_constant({{0.0, 12.0}, {300.0, 3.0}});
  CHECK(pw.value(0.0) == 12.0);
  CHECK(pw.value(299.999) == 12.0);
  CHECK(pw.value(300.0) == 3.0);
  CHECK(pw.value(1000.0) == 3.0);
  CHECK(pw.supremum(0.0, 1000.0) == 12.0);
  CHECK(pw.supremum(300.0, 1000.0) == 3.0);
  const auto bps = pw.breakpoints_in(0.0, 1000.0);
  REQUIRE(bps.size() == 1);
  CHECK(bps[0] == 300.0);

  CHECK_THROWS_AS(InputSignal::constant(-1.0), Error);
  CHECK_THROWS_AS(InputSignal::piecewise_constant({{0.0, 1.0}, {0.0, 2.0}}),
                  Error);
  CHECK_THROWS_AS(InputSignal::piecewise_constant({{1.0, 1.0}}), Error);
  CHECK_THROWS_AS(InputSignal::piecewise_constant({{0.0, -1.0}}), Error);
}

TEST_CASE("two-node ring keeps one transfer per ordered pair") {
  auto p = oracles::figure_params();
  p.epsilon = 0.016;
  const auto net = oracles::ei_subsystem(p, 300.0, 0.5);
  const double s_sharp = 300.0;
  const double a = 0.5;
  // ell_{1,2} couples I's consumption to E's production
  CHECK(net.ell(0, 1) ==
        doctest::Approx(p.beta * s_sharp / (a * (p.gamma + p.mu))));
  CHECK(net.ell(1, 0) ==
        doctest::Approx(*p.epsilon / (a * (*p.epsilon + p.mu))));
  // field: dE = beta*s#*I - (eps+mu)E, dI = eps*E - (gamma+mu)I
  const std::vector<double> x{10.0, 4.0};
  const std::vector<double> w{0.0, 0.0};
  const auto f = net.vector_field(x, w);
  CHECK(f[0] == doctest::Approx(p.beta * s_sharp * 4.0 -
                                (*p.epsilon + p.mu) * 10.0));
  CHECK(f[1] == doctest::Approx(*p.epsilon * 10.0 - (p.gamma + p.mu) * 4.0));
  // a two-node builder rejects upstream declarations
  NetworkBuilder b(2);
  CHECK_THROWS_AS(b.transfer_up(0, RateFunction::zero(), RateFunction::zero(),
                                1.0),
                  Error);
}
