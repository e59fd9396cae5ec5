// hartree-lab: experiment driver for the Hartree flow and its virial checks.
#include <cstdio>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "hartree/cli/commands.hpp"
#include "hartree/errors.hpp"

namespace cli = hartree::cli;

namespace {

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config, "experiment config (JSON)")->required();
  sub->add_option("--override", o.overrides, "key.path=value, applied before parsing")->take_all();
  sub->add_option("-o,--output-dir", o.output_dir, "where report.json and series.csv go");
  sub->add_option("--seed", o.seed, "sampler seed");
}

int execute(const Options& o, const std::function<cli::RunOutput(const cli::ExperimentConfig&)>& command) {
  try {
    auto c = cli::load_config(o.config, o.overrides);
    if (!o.output_dir.empty()) c.output_dir = o.output_dir;
    if (o.seed) c.seed = *o.seed;
    const auto out = command(c);
    cli::write_outputs(c, out);
    for (const auto& ch : out.report.checks()) {
      std::printf("%-4s %-48s %.6g (tol %.3g)\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.value, ch.tolerance);
    }
    std::printf("report: %s\n", (c.output_dir / "report.json").string().c_str());
    return out.report.passed() ? cli::kPass : cli::kCheckFailure;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const cli::PositiveEnergyError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const hartree::Error& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return cli::kRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hartree-lab: Hartree NLS simulations, virial identities and blowup diagnostics"};
  app.require_subcommand(1);
  Options o;
  std::function<cli::RunOutput(const cli::ExperimentConfig&)> command;

  const std::pair<const char*, cli::RunOutput (*)(const cli::ExperimentConfig&)> subs[] = {
      {"simulate", &cli::simulate},
      {"blowup", &cli::blowup},
      {"check-identities", &cli::check_identities},
      {"check-potential", &cli::check_potential},
      {"check-cutoff", &cli::check_cutoff},
  };
  const char* help[] = {
      "evolve the configured ensemble and check conservation and virial identities",
      "focusing run with negative energy: envelope, detection and localized bound",
      "static algebraic identities, bilaplacian identity and cutoff properties",
      "tabulate the blowup hypotheses on the potential",
      "cutoff properties and the pair bound only",
  };
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    auto* sub = app.add_subcommand(subs[i].first, help[i]);
    add_common(sub, o);
    auto fn = subs[i].second;
    sub->callback([&command, fn] { command = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }
  return execute(o, command);
}
