#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hartree::cli {

struct Check {
  std::string name;
  std::string anchor;  ///< short statement of what is being checked
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  /// value <= tolerance.
  void at_most(std::string name, std::string anchor, double value, double tolerance);
  /// Boolean check; value is recorded as 1 or 0 against tolerance 1.
  void require(std::string name, std::string anchor, bool ok);
  void add(Check c) { checks_.push_back(std::move(c)); }

  /// Free-form measured quantities written next to the checks.
  nlohmann::ordered_json& data() { return data_; }

  const std::vector<Check>& checks() const { return checks_; }
  bool passed() const;
  nlohmann::ordered_json to_json() const;
  void write(const std::filesystem::path& file) const;

 private:
  std::string command_;
  std::vector<Check> checks_;
  nlohmann::ordered_json data_ = nlohmann::ordered_json::object();
};

}  // namespace hartree::cli
