#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ymlab/lie.hpp"

namespace ymlab {

enum class RepStrategy { trivial, diagonal, pauli_genus1, random_polish, from_file };

std::string strategy_name(RepStrategy s);
RepStrategy strategy_from_name(const std::string& name);

// Flat key = value configuration for one experiment run. Arrays use
// bracketed comma lists; named tolerances live under tol.*.
struct ExperimentConfig {
  GroupId group = GroupId::su2;
  int genus = 2;
  std::vector<double> central_target;  // coordinates against the centre basis
  int central_twist = 1;               // -1 selects the discrete twisted sector (su2)
  RepStrategy strategy = RepStrategy::trivial;
  std::uint64_t seed = 0;
  int sample_count = 0;
  int sweep_count = 4;
  std::string out_path;
  std::string rep_file;
  double metric_jitter = 0.0;
  bool dump_operators = false;
  std::map<std::string, double> tol;

  static std::map<std::string, double> default_tolerances();

  double tolerance(const std::string& name) const;

  // Validates invariants (genus >= 1, sample_count >= 0, tolerances > 0).
  void validate() const;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text);
  void apply_override(const std::string& key_equals_value);

  // Canonical flat rendering (stable key order), echoed into reports.
  std::string to_string() const;
};

}  // namespace ymlab
