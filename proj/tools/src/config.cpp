#include "hartree/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hartree/errors.hpp"

namespace hartree::cli {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& what)
    : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

double ExperimentConfig::tolerance(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it == tolerances.end()) throw ConfigError("tolerances." + name, "missing tolerance");
  return it->second;
}

Ensemble ExperimentConfig::ensemble() const {
  std::vector<Member> ms;
  for (const auto& m : members) ms.push_back({m.weight, gaussian(grid, m.profile)});
  return Ensemble(std::move(ms), radial);
}

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

const json& field(const json& obj, const std::string& base, const std::string& key) {
  if (!obj.is_object()) throw ConfigError(base, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(base, key), "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

double number_or(const json& obj, const std::string& base, const std::string& key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), join(base, key)) : fallback;
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected a list of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

Point point_of(const json& j, const std::string& path, int dim) {
  const auto v = number_list(j, path);
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError(path, "expected " + std::to_string(dim) + " components");
  }
  Point p{};
  for (int i = 0; i < dim; ++i) p[i] = v[i];
  return p;
}

GridSpec parse_grid(const json& root) {
  const json& g = field(root, "", "grid");
  const int dim = integer(field(g, "grid", "dim"), "grid.dim");
  const int n = integer(field(g, "grid", "n"), "grid.n");
  const double L = number(field(g, "grid", "length"), "grid.length");
  try {
    return GridSpec::make(dim, n, L);
  } catch (const InvalidArgument& e) {
    throw ConfigError("grid", e.what());
  }
}

Potential parse_potential(const json& root) {
  const json& p = field(root, "", "potential");
  const json& fam = field(p, "potential", "family");
  if (!fam.is_string()) throw ConfigError("potential.family", "expected a string");
  const std::string family = fam.get<std::string>();
  try {
    if (family == "zero") return Potential::zero();
    if (family == "power") {
      return Potential::power(number(field(p, "potential", "exponent"), "potential.exponent"),
                              number_or(p, "potential", "strength", 1.0));
    }
    if (family == "table") {
      const double dr = number(field(p, "potential", "dr"), "potential.dr");
      if (p.contains("samples")) return Potential::table(number_list(p.at("samples"), "potential.samples"), dr);
      // generated table: strength / (1 + r^2) on [0, extent]
      const json& prof = field(p, "potential", "profile");
      if (prof != "lorentzian") throw ConfigError("potential.profile", "unknown profile (expected \"lorentzian\")");
      const double extent = number(field(p, "potential", "extent"), "potential.extent");
      const double c = number_or(p, "potential", "strength", 1.0);
      if (!(dr > 0.0) || !(extent > dr)) throw ConfigError("potential.extent", "need extent > dr > 0");
      std::vector<double> s;
      const int count = static_cast<int>(std::floor(extent / dr)) + 1;
      for (int k = 0; k < count; ++k) s.push_back(c / (1.0 + (k * dr) * (k * dr)));
      return Potential::table(std::move(s), dr);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError("potential", e.what());
  }
  throw ConfigError("potential.family", "unknown family \"" + family + "\" (zero, power, table)");
}

void parse_ensemble(const json& root, ExperimentConfig& c) {
  const json& e = field(root, "", "ensemble");
  if (e.contains("radial")) {
    if (!e.at("radial").is_boolean()) throw ConfigError("ensemble.radial", "expected true or false");
    c.radial = e.at("radial").get<bool>();
  }
  const json& ms = field(e, "ensemble", "members");
  if (!ms.is_array() || ms.empty()) throw ConfigError("ensemble.members", "expected a non-empty list");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string base = "ensemble.members[" + std::to_string(i) + "]";
    const json& m = ms[i];
    MemberSpec spec;
    spec.weight = number_or(m, base, "weight", 1.0);
    spec.profile.width = number(field(m, base, "width"), base + ".width");
    if (!(spec.profile.width > 0.0)) throw ConfigError(base + ".width", "must be positive");
    if (m.contains("center")) spec.profile.center = point_of(m.at("center"), base + ".center", c.grid.dim);
    if (m.contains("momentum")) spec.profile.momentum = point_of(m.at("momentum"), base + ".momentum", c.grid.dim);
    c.members.push_back(spec);
  }
}

void parse_propagator(const json& root, ExperimentConfig& c) {
  const json& p = field(root, "", "propagator");
  auto& pc = c.propagator;
  pc.dt = number(field(p, "propagator", "dt"), "propagator.dt");
  pc.t_end = number(field(p, "propagator", "t_end"), "propagator.t_end");
  pc.mu = integer(field(p, "propagator", "mu"), "propagator.mu");
  if (p.contains("record_every")) pc.record_every = integer(p.at("record_every"), "propagator.record_every");
  pc.dt_floor = number_or(p, "propagator", "dt_floor", pc.dt_floor);
  if (p.contains("blowup_gradient_threshold")) {
    pc.blowup_gradient_threshold = number(p.at("blowup_gradient_threshold"), "propagator.blowup_gradient_threshold");
  }
  if (p.contains("blowup_gradient_factor")) {
    c.blowup_gradient_factor = number(p.at("blowup_gradient_factor"), "propagator.blowup_gradient_factor");
    if (!(*c.blowup_gradient_factor > 1.0)) {
      throw ConfigError("propagator.blowup_gradient_factor", "must exceed 1");
    }
  }
  try {
    pc.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("propagator", e.what());
  }
}

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--override", "expected key=value, got \"" + spec + "\"");
  const std::string key = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError(key, "empty path component");
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(parts[i]);
      } catch (const std::exception&) {
        throw ConfigError(key, "expected a list index at \"" + parts[i] + "\"");
      }
      if (idx >= node->size()) throw ConfigError(key, "list index out of range");
      node = &(*node)[idx];
    } else {
      if (!node->is_object() && !node->is_null()) throw ConfigError(key, "cannot descend into a scalar");
      node = &(*node)[parts[i]];
    }
  }
  *node = std::move(value);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json root = json::parse(text, nullptr, false, true);
  if (root.is_discarded()) throw ConfigError("<document>", "not valid JSON");
  if (!root.is_object()) throw ConfigError("<document>", "expected an object at top level");
  for (const auto& o : overrides) apply_override(root, o);

  ExperimentConfig c;
  c.grid = parse_grid(root);
  c.potential = parse_potential(root);
  parse_ensemble(root, c);
  parse_propagator(root, c);
  if (root.contains("cutoff_R_list")) c.cutoff_R_list = number_list(root.at("cutoff_R_list"), "cutoff_R_list");
  for (std::size_t i = 0; i < c.cutoff_R_list.size(); ++i) {
    if (!(c.cutoff_R_list[i] > 0.0)) throw ConfigError("cutoff_R_list[" + std::to_string(i) + "]", "must be positive");
  }
  if (root.contains("hypothesis_R_list")) {
    c.hypothesis_R_list = number_list(root.at("hypothesis_R_list"), "hypothesis_R_list");
  }
  if (root.contains("weight_derivatives")) {
    const json& w = root.at("weight_derivatives");
    if (w == "analytic") {
      c.weight_derivatives = WeightDerivatives::analytic;
    } else if (w == "spectral") {
      c.weight_derivatives = WeightDerivatives::spectral;
    } else {
      throw ConfigError("weight_derivatives", "expected \"analytic\" or \"spectral\"");
    }
  }
  if (root.contains("tolerances")) {
    const json& t = root.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances", "expected an object");
    for (const auto& [k, v] : t.items()) c.tolerances[k] = number(v, "tolerances." + k);
  }
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (root.contains("output_dir")) {
    if (!root.at("output_dir").is_string()) throw ConfigError("output_dir", "expected a string");
    c.output_dir = root.at("output_dir").get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace hartree::cli
