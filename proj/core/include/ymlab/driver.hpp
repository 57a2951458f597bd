#pragma once

#include "ymlab/config.hpp"
#include "ymlab/kuranishi.hpp"
#include "ymlab/report.hpp"

namespace ymlab {

// Produces a representation per the configured strategy. Throws Infeasible
// when the group/genus/target combination admits no solution, NoConvergence
// when random-polish fails, NotCentral for defective from-file input.
CentralRep find_central_rep(const ExperimentConfig& cfg);

struct ChartBundle {
  TwistedComplexPtr complex;
  HodgePackagePtr package;
  KuranishiChartPtr chart;
};

ChartBundle build_chart_bundle(const ExperimentConfig& cfg);
ChartBundle build_chart_bundle(const ExperimentConfig& cfg, CentralRep rep);

// Runs every named invariant of the complex, package and chart once; the
// list and quantifications are fixed (see docs/conventions.md).
std::vector<InvariantResult> run_invariant_suite(const ChartBundle& bundle,
                                                 const ExperimentConfig& cfg);

// Exit codes: 0 all pass, 1 invariant failure, 2 construction/config error.
struct RunResult {
  Report report;
  int exit_code = 0;
};

RunResult run_verify(const ExperimentConfig& cfg);
RunResult run_chart(const ExperimentConfig& cfg);
std::vector<RunResult> run_sweep(const ExperimentConfig& cfg);

}  // namespace ymlab
