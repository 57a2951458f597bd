#include <benchmark/benchmark.h>

#include "ymlab/driver.hpp"

using namespace ymlab;

namespace {

ExperimentConfig cfg_su2(int genus, const std::string& strategy) {
  ExperimentConfig cfg;
  cfg.tol = ExperimentConfig::default_tolerances();
  cfg.group = GroupId::su2;
  cfg.genus = genus;
  cfg.strategy = strategy_from_name(strategy);
  cfg.seed = 1;
  return cfg;
}

void BM_FindRepRandomPolish(benchmark::State& state) {
  auto cfg = cfg_su2(static_cast<int>(state.range(0)), "random-polish");
  for (auto _ : state) {
    cfg.seed += 1;
    CentralRep rep = find_central_rep(cfg);
    benchmark::DoNotOptimize(rep.defect);
  }
}
BENCHMARK(BM_FindRepRandomPolish)->Arg(1)->Arg(2)->Arg(3);

void BM_BuildComplex(benchmark::State& state) {
  CentralRep rep = find_central_rep(cfg_su2(static_cast<int>(state.range(0)), "random-polish"));
  for (auto _ : state) {
    auto cx = TwistedComplex::build(rep);
    benchmark::DoNotOptimize(cx->d1d0_norm());
  }
}
BENCHMARK(BM_BuildComplex)->Arg(1)->Arg(2)->Arg(3);

void BM_BuildPackage(benchmark::State& state) {
  auto cx = TwistedComplex::build(
      find_central_rep(cfg_su2(static_cast<int>(state.range(0)), "random-polish")));
  for (auto _ : state) {
    auto pkg = KaehlerHodgePackage::build(cx);
    benchmark::DoNotOptimize(pkg->dim_h1());
  }
}
BENCHMARK(BM_BuildPackage)->Arg(1)->Arg(2)->Arg(3);

void BM_KuranishiInverse(benchmark::State& state) {
  auto bundle = build_chart_bundle(cfg_su2(2, "random-polish"));
  RngStream rng(3);
  Eigen::VectorXd xi =
      bundle.package->harm1_embed(rng.gaussian_vector(bundle.package->dim_h1()));
  xi *= 0.9 * bundle.chart->ball_radius() / bundle.package->space_c1().norm(xi);
  for (auto _ : state) {
    auto inv = bundle.chart->kuranishi_inverse(xi);
    benchmark::DoNotOptimize(inv.eta);
  }
}
BENCHMARK(BM_KuranishiInverse);

void BM_ReducedSample(benchmark::State& state) {
  auto bundle = build_chart_bundle(cfg_su2(2, "trivial"));
  for (auto _ : state) {
    auto report = bundle.chart->reduced_sample(static_cast<int>(state.range(0)), 0);
    benchmark::DoNotOptimize(report.kept_count);
  }
}
BENCHMARK(BM_ReducedSample)->Arg(20)->Arg(100);

void BM_VerifySuite(benchmark::State& state) {
  auto cfg = cfg_su2(2, "random-polish");
  auto bundle = build_chart_bundle(cfg);
  for (auto _ : state) {
    auto results = run_invariant_suite(bundle, cfg);
    benchmark::DoNotOptimize(results.size());
  }
}
BENCHMARK(BM_VerifySuite);

}  // namespace

BENCHMARK_MAIN();
