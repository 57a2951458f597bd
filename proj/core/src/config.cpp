#include "ymlab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ymlab/errors.hpp"

namespace ymlab {

std::string strategy_name(RepStrategy s) {
  switch (s) {
    case RepStrategy::trivial: return "trivial";
    case RepStrategy::diagonal: return "diagonal";
    case RepStrategy::pauli_genus1: return "pauli-genus1";
    case RepStrategy::random_polish: return "random-polish";
    case RepStrategy::from_file: return "from-file";
  }
  return "?";
}

RepStrategy strategy_from_name(const std::string& name) {
  if (name == "trivial") return RepStrategy::trivial;
  if (name == "diagonal") return RepStrategy::diagonal;
  if (name == "pauli-genus1") return RepStrategy::pauli_genus1;
  if (name == "random-polish") return RepStrategy::random_polish;
  if (name == "from-file") return RepStrategy::from_file;
  throw ConfigError("unknown rep strategy: " + name);
}

std::map<std::string, double> ExperimentConfig::default_tolerances() {
  return {
      {"defect_admit", 1e-10},   // relator defect admission
      {"rank_rel", 1e-8},        // relative singular-value cutoff
      {"identity", 1e-10},       // chain/package identity residuals
      {"chart", 1e-9},           // kuranishi chart residuals
      {"slice", 1e-8},           // slice-variety / transverse membership
      {"cone", 1e-8},            // cone membership
      {"cocycle", 1e-8},         // kappa admission
      {"branch", 1e-8},          // principal-log branch guard
      {"fd_rel", 1e-5},          // finite-difference relative error
      {"fd_step", 1e-5},         // finite-difference step
      {"fd_first_order", 1e-6},  // relative error of the relator first derivative
      {"polish_target", 1e-10},  // Newton polish target defect
      {"polish_accept", 1e-8},   // Newton polish acceptance defect
      {"taylor_slope", 2.7},     // log-log slope floor
      {"sample_scale", 1e-3},    // reduced-sample draw scale
      {"cluster_radius", 1e-4},  // orbit clustering radius
      {"cluster_separation", 10.0},
      {"stabilizer_samples", 32},
      {"witness_theta", 1e-3},
  };
}

double ExperimentConfig::tolerance(const std::string& name) const {
  auto it = tol.find(name);
  if (it == tol.end()) {
    auto defaults = default_tolerances();
    auto dit = defaults.find(name);
    if (dit == defaults.end()) throw ConfigError("unknown tolerance: " + name);
    return dit->second;
  }
  return it->second;
}

void ExperimentConfig::validate() const {
  if (genus < 1) throw ConfigError("genus must be >= 1");
  if (sample_count < 0) throw ConfigError("sample_count must be >= 0");
  if (sweep_count < 1) throw ConfigError("sweep_count must be >= 1");
  if (central_twist != 1 && central_twist != -1) {
    throw ConfigError("central_twist must be +1 or -1");
  }
  if (metric_jitter < 0.0) throw ConfigError("metric_jitter must be >= 0");
  for (const auto& [name, value] : tol) {
    if (value <= 0.0) throw ConfigError("tolerance " + name + " must be positive");
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  std::size_t e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_array(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty() || s.front() != '[' || s.back() != ']') {
    throw ConfigError("expected bracketed array, got: " + raw);
  }
  s = s.substr(1, s.size() - 2);
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string render_array(const std::vector<double>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os.precision(17);
    os << v[i];
  }
  os << "]";
  return os.str();
}

}  // namespace

void ExperimentConfig::apply_override(const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
  std::string key = trim(kv.substr(0, eq));
  std::string value = trim(kv.substr(eq + 1));
  if (key.empty()) throw ConfigError("override has empty key: " + kv);

  if (key == "group") {
    group = group_id_from_name(value);
  } else if (key == "genus") {
    genus = std::stoi(value);
  } else if (key == "central_target") {
    central_target = parse_array(value);
  } else if (key == "central_twist") {
    central_twist = std::stoi(value);
  } else if (key == "strategy") {
    strategy = strategy_from_name(value);
  } else if (key == "seed") {
    seed = std::stoull(value);
  } else if (key == "sample_count") {
    sample_count = std::stoi(value);
  } else if (key == "sweep_count") {
    sweep_count = std::stoi(value);
  } else if (key == "out") {
    out_path = value;
  } else if (key == "rep_file") {
    rep_file = value;
  } else if (key == "metric_jitter") {
    metric_jitter = std::stod(value);
  } else if (key == "dump_operators") {
    dump_operators = (value == "true" || value == "1");
  } else if (key.rfind("tol.", 0) == 0) {
    std::string name = key.substr(4);
    if (default_tolerances().count(name) == 0) {
      throw ConfigError("unknown tolerance key: " + key);
    }
    tol[name] = std::stod(value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  cfg.tol = default_tolerances();
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      cfg.apply_override(line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

std::string ExperimentConfig::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "group = " << group_id_name(group) << "\n";
  os << "genus = " << genus << "\n";
  os << "central_target = " << render_array(central_target) << "\n";
  os << "central_twist = " << central_twist << "\n";
  os << "strategy = " << strategy_name(strategy) << "\n";
  os << "seed = " << seed << "\n";
  os << "sample_count = " << sample_count << "\n";
  os << "sweep_count = " << sweep_count << "\n";
  os << "out = " << out_path << "\n";
  os << "rep_file = " << rep_file << "\n";
  os << "metric_jitter = " << metric_jitter << "\n";
  os << "dump_operators = " << (dump_operators ? "true" : "false") << "\n";
  for (const auto& [name, value] : tol) {
    os << "tol." << name << " = " << value << "\n";
  }
  return os.str();
}

}  // namespace ymlab
