#include "ymlab/report.hpp"

#include <fstream>
#include <sstream>

#include "ymlab/errors.hpp"

namespace ymlab {

using ordered_json = nlohmann::ordered_json;

Report::Report() {
  doc_["format"] = "ymlab-report";
  doc_["version"] = kVersion;
}

void Report::set_invariants(const std::vector<InvariantResult>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    ordered_json item;
    item["name"] = r.name;
    item["residual"] = r.residual;
    item["tolerance"] = r.tolerance;
    item["pass"] = r.pass;
    arr.push_back(item);
  }
  doc_["invariants"] = arr;
}

std::vector<InvariantResult> Report::invariants() const {
  std::vector<InvariantResult> out;
  if (!doc_.contains("invariants")) return out;
  for (const auto& item : doc_["invariants"]) {
    out.push_back({item.at("name").get<std::string>(), item.at("residual").get<double>(),
                   item.at("tolerance").get<double>(), item.at("pass").get<bool>()});
  }
  return out;
}

bool Report::all_pass() const {
  for (const auto& r : invariants()) {
    if (!r.pass) return false;
  }
  if (doc_.contains("samples") && doc_["samples"].contains("contradictions")) {
    if (doc_["samples"]["contradictions"].get<int>() != 0) return false;
  }
  return true;
}

std::string Report::to_bytes() const { return doc_.dump(2) + "\n"; }

Report Report::from_bytes(const std::string& bytes) {
  Report r;
  try {
    r.doc_ = ordered_json::parse(bytes);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("report: parse error: ") + e.what());
  }
  if (!r.doc_.contains("version")) throw SchemaError("report: missing version field");
  if (r.doc_["version"].get<int>() != kVersion) {
    throw SchemaError("report: unsupported version");
  }
  if (!r.doc_.contains("format") || r.doc_["format"] != "ymlab-report") {
    throw SchemaError("report: missing or wrong format field");
  }
  return r;
}

void Report::to_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << to_bytes();
}

Report Report::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_bytes(ss.str());
}

std::string Report::pretty() const {
  std::ostringstream os;
  os << "ymlab report (version " << doc_["version"].get<int>() << ")\n";
  if (doc_.contains("seed")) os << "seed: " << doc_["seed"] << "\n";
  if (doc_.contains("rep")) {
    const auto& rep = doc_["rep"];
    os << "rep: " << rep.value("group", std::string("?")) << " genus "
       << rep.value("genus", 0) << ", strategy " << rep.value("strategy", std::string("?"))
       << "\n";
    os << "  defect: " << rep.value("defect", 0.0)
       << "  stabilizer dim: " << rep.value("stabilizer_dim", -1) << "\n";
    if (rep.contains("betti")) {
      os << "  betti: [" << rep["betti"][0] << ", " << rep["betti"][1] << ", "
         << rep["betti"][2] << "]\n";
    }
  }
  if (doc_.contains("chart")) {
    const auto& ch = doc_["chart"];
    os << "chart: dim H1 = " << ch.value("dim_h1", -1)
       << ", dim z_A = " << ch.value("dim_za", -1)
       << ", ball radius = " << ch.value("ball_radius", 0.0)
       << ", nonsingular = " << (ch.value("nonsingular", false) ? "true" : "false") << "\n";
  }
  if (doc_.contains("invariants")) {
    int passed = 0, total = 0;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& r : invariants()) {
      ++total;
      if (r.pass) ++passed;
      double margin = r.tolerance > 0 ? r.residual / r.tolerance : r.residual;
      if (margin > worst) {
        worst = margin;
        worst_name = r.name;
      }
    }
    os << "invariants: " << passed << "/" << total << " passed";
    if (!worst_name.empty()) {
      os << " (tightest: " << worst_name << ", residual/tolerance = " << worst << ")";
    }
    os << "\n";
    for (const auto& r : invariants()) {
      os << "  [" << (r.pass ? "pass" : "FAIL") << "] " << r.name
         << "  residual=" << r.residual << " tol=" << r.tolerance << "\n";
    }
  }
  if (doc_.contains("samples")) {
    const auto& s = doc_["samples"];
    os << "samples: " << s.value("count", 0) << " drawn, " << s.value("kept", 0)
       << " kept, " << s.value("orbits", 0)
       << " orbits, contradictions: " << s.value("contradictions", 0) << "\n";
  }
  return os.str();
}

}  // namespace ymlab
