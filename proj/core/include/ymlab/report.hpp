#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ymlab {

struct InvariantResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// A run report: structured single-object text document with an explicit
// version field, canonical key order and round-trip double formatting, so
// equal runs serialize to identical bytes.
class Report {
 public:
  static constexpr int kVersion = 1;

  Report();

  nlohmann::ordered_json& doc() { return doc_; }
  const nlohmann::ordered_json& doc() const { return doc_; }

  void set_invariants(const std::vector<InvariantResult>& results);
  std::vector<InvariantResult> invariants() const;
  bool all_pass() const;

  std::string to_bytes() const;
  static Report from_bytes(const std::string& bytes);

  void to_file(const std::string& path) const;
  static Report from_file(const std::string& path);

  // Human summary for the report subcommand.
  std::string pretty() const;

 private:
  nlohmann::ordered_json doc_;
};

}  // namespace ymlab
