#include "hartree/cli/report.hpp"

#include <cmath>
#include <fstream>

namespace hartree::cli {

void Report::at_most(std::string name, std::string anchor, double value, double tolerance) {
  // NaN never passes
  checks_.push_back({std::move(name), std::move(anchor), value, tolerance, value <= tolerance});
}

void Report::require(std::string name, std::string anchor, bool ok) {
  checks_.push_back({std::move(name), std::move(anchor), ok ? 1.0 : 0.0, 1.0, ok});
}

bool Report::passed() const {
  for (const auto& c : checks_) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

nlohmann::ordered_json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["status"] = passed() ? "pass" : "fail";
  nlohmann::ordered_json checks = nlohmann::ordered_json::object();
  for (const auto& c : checks_) {
    checks[c.name] = {{"anchor", c.anchor},
                      {"value", finite_or_string(c.value)},
                      {"tol", finite_or_string(c.tolerance)},
                      {"pass", c.pass}};
  }
  j["checks"] = std::move(checks);
  j["data"] = data_;
  return j;
}

void Report::write(const std::filesystem::path& file) const {
  std::ofstream out(file);
  out << to_json().dump(2) << '\n';
}

}  // namespace hartree::cli
