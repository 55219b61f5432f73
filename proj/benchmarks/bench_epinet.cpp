#include <benchmark/benchmark.h>

#include "epinet/certificate.hpp"
#include "epinet/models.hpp"
#include "epinet/simulate.hpp"
#include "epinet/threshold.hpp"

using namespace epinet;

namespace {

EpidemicModel sir_model() {
  EpidemicParams p;
  p.beta = 2e-4;
  p.gamma = 0.032;
  p.mu = 0.015;
  return make_model(Family::SIR, p);
}

EpidemicModel seir_model() {
  EpidemicParams p;
  p.beta = 2e-4;
  p.gamma = 0.032;
  p.mu = 0.015;
  p.epsilon = 0.016;
  return make_model(Family::SEIR, p);
}

void BM_VectorField(benchmark::State& state) {
  const auto net = sir_model().lower();
  const std::vector<double> x{700.0, 200.0, 70.0};
  const std::vector<double> w{12.0, 12.0, 12.0};
  for (auto _ : state) {
    auto f = net.vector_field(x, w);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_VectorField);

void BM_Certify(benchmark::State& state) {
  const auto net = seir_model().lower();
  for (auto _ : state) {
    auto cert = check_smallgain(net);
    benchmark::DoNotOptimize(cert);
  }
}
BENCHMARK(BM_Certify);

void BM_Thresholds(benchmark::State& state) {
  const auto model = seir_model();
  for (auto _ : state) {
    auto rep = analyze_thresholds(model, 12.0);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_Thresholds);

void BM_IntegrateRK4(benchmark::State& state) {
  const auto model = sir_model();
  const auto net = model.lower();
  const std::vector<double> x0{700.0, 200.0, 70.0};
  SimConfig cfg;
  cfg.t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto traj = integrate(net, x0, InputSignal::constant(12.0), cfg);
    benchmark::DoNotOptimize(traj);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(cfg.t_end / cfg.dt));
}
BENCHMARK(BM_IntegrateRK4)->Arg(100)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
