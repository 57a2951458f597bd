#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ymlab/driver.hpp"
#include "ymlab/errors.hpp"
#include "ymlab/rep_io.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file (key = value)");
  cmd->add_option("--out", args.out_path, "output path");
  cmd->add_option("--override", args.overrides, "config override key=value")
      ->take_all();
  cmd->add_option("--seed", args.seed, "root seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
}

ymlab::ExperimentConfig load_config(const CommonArgs& args) {
  ymlab::ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    cfg = ymlab::ExperimentConfig::from_file(args.config_path);
  } else {
    cfg.tol = ymlab::ExperimentConfig::default_tolerances();
  }
  for (const auto& ov : args.overrides) cfg.apply_override(ov);
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.out_path.empty()) cfg.out_path = args.out_path;
  return cfg;
}

int report_exit(const ymlab::RunResult& rr, bool quiet = false) {
  if (!quiet) {
    if (rr.exit_code == 2) {
      const auto& doc = rr.report.doc();
      std::cerr << "error: " << doc["error"]["kind"].get<std::string>() << ": "
                << doc["error"]["message"].get<std::string>() << "\n";
    } else {
      std::cout << rr.report.pretty();
    }
  }
  return rr.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moduli: local models of moduli of central surface-group representations"};
  app.require_subcommand(1);

  CommonArgs find_args, verify_args, chart_args, sweep_args;
  std::string report_path;

  CLI::App* cmd_find =
      app.add_subcommand("find-rep", "find a central representation and write it out");
  add_common(cmd_find, find_args);

  CLI::App* cmd_verify =
      app.add_subcommand("verify", "run the full invariant suite on one representation");
  add_common(cmd_verify, verify_args);

  CLI::App* cmd_chart = app.add_subcommand(
      "chart", "build a Kuranishi chart and sample the reduced space");
  add_common(cmd_chart, chart_args);

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "repeat chart over a range of derived seeds");
  add_common(cmd_sweep, sweep_args);

  CLI::App* cmd_report = app.add_subcommand("report", "pretty-print a report file");
  cmd_report->add_option("path", report_path, "report file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_find->parsed()) {
      auto cfg = load_config(find_args);
      try {
        ymlab::CentralRep rep = ymlab::find_central_rep(cfg);
        if (cfg.out_path.empty()) {
          std::cout << ymlab::rep_to_string(rep);
        } else {
          ymlab::write_rep_file(rep, cfg.out_path);
          std::cout << "wrote " << cfg.out_path << " (defect " << rep.defect << ")\n";
        }
        return 0;
      } catch (const ymlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
    if (cmd_verify->parsed()) {
      auto cfg = load_config(verify_args);
      auto t0 = std::chrono::steady_clock::now();
      auto rr = ymlab::run_verify(cfg);
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0).count();
      std::cerr << "verify completed in " << ms << " ms\n";
      return report_exit(rr);
    }
    if (cmd_chart->parsed()) {
      auto cfg = load_config(chart_args);
      if (cfg.sample_count <= 0) cfg.sample_count = 100;
      auto t0 = std::chrono::steady_clock::now();
      auto rr = ymlab::run_chart(cfg);
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0).count();
      std::cerr << "chart completed in " << ms << " ms\n";
      return report_exit(rr);
    }
    if (cmd_sweep->parsed()) {
      auto cfg = load_config(sweep_args);
      if (cfg.sample_count <= 0) cfg.sample_count = 100;
      auto results = ymlab::run_sweep(cfg);
      int worst = 0;
      for (std::size_t k = 0; k < results.size(); ++k) {
        std::cout << "seed " << (cfg.seed + k) << ": exit " << results[k].exit_code << "\n";
        worst = std::max(worst, results[k].exit_code);
      }
      return worst;
    }
    if (cmd_report->parsed()) {
      auto rep = ymlab::Report::from_file(report_path);
      std::cout << rep.pretty();
      return 0;
    }
  } catch (const ymlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
