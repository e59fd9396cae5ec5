#include "hartree/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "hartree/cutoff.hpp"
#include "hartree/errors.hpp"

namespace hartree::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string R_tag(double R) { return "R=" + ObservableSeries::format_R(R); }

Ensemble build_ensemble(const ExperimentConfig& c) {
  try {
    return c.ensemble();
  } catch (const NonRadialError& e) {
    throw ConfigError("ensemble.radial", e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError("ensemble", e.what());
  }
}

ObservableRecorder build_recorder(const ExperimentConfig& c, ObservableRecorder::Options o) {
  try {
    return ObservableRecorder(c.potential, c.grid, std::move(o));
  } catch (const SingularOriginError& e) {
    throw ConfigError("potential", e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError("cutoff_R_list", e.what());
  }
}

struct Trajectory {
  ObservableSeries series;
  EvolutionResult result;
};

Trajectory run(const Ensemble& e, const ObservableRecorder& rec, const PropagatorConfig& pc,
               const std::vector<double>& R_list) {
  ObservableSeries series(pc.record_interval(), R_list);
  auto result = evolve(e, rec.kernels().value, pc, [&](double t, const Ensemble& s) { series.push(rec.record(t, s)); });
  return {std::move(series), std::move(result)};
}

// max over entries where the second difference exists
template <class F>
double max_over_interior(const std::vector<double>& fd2, F&& value_at) {
  double worst = -kInf;
  bool any = false;
  for (std::size_t i = 0; i < fd2.size(); ++i) {
    if (std::isnan(fd2[i])) continue;
    worst = std::max(worst, value_at(i));
    any = true;
  }
  return any ? worst : std::numeric_limits<double>::quiet_NaN();
}

ordered_json run_data(const Trajectory& tr) {
  ordered_json d;
  d["status"] = to_string(tr.result.outcome.status);
  d["final_time"] = tr.result.outcome.time;
  d["records"] = tr.series.records().size();
  d["max_dt_halvings"] = tr.result.outcome.max_halvings;
  return d;
}

}  // namespace

RunOutput simulate(const ExperimentConfig& c) {
  const Ensemble e = build_ensemble(c);
  ObservableRecorder::Options o;
  o.mu = c.propagator.mu;
  o.R_list = c.cutoff_R_list;
  o.weight_mode = c.weight_derivatives;
  const auto rec = build_recorder(c, o);
  const double tol_mass = c.tolerance("mass");
  const double tol_energy = c.tolerance("energy");
  const double tol_virial = c.tolerance("virial");
  const double tol_local = c.cutoff_R_list.empty() ? 0.0 : c.tolerance("localized");

  const Trajectory tr = run(e, rec, c.propagator, c.cutoff_R_list);
  const auto& recs = tr.series.records();

  Report rep("simulate");
  rep.data()["run"] = run_data(tr);
  rep.data()["E1_0"] = recs.front().E1;
  rep.require("run_completed", "propagation reached t_end", tr.result.outcome.status == StepStatus::ok);

  double dm = 0.0, dE = 0.0;
  const double E0 = recs.front().E1;
  for (const auto& r : recs) {
    dm = std::max(dm, std::abs(r.mass - recs.front().mass));
    dE = std::max(dE, std::abs(r.E1 - E0));
  }
  rep.at_most("mass_conservation", "max |mass(t) - mass(0)|", dm, tol_mass);
  rep.at_most("energy_conservation", "max |E1(t) - E1(0)| / |E1(0)|", E0 != 0.0 ? dE / std::abs(E0) : dE,
              tol_energy);

  const auto fd2 = tr.series.FD2_V1();
  rep.at_most("virial_identity", "max |FD2[V1] - virial rhs|",
              max_over_interior(fd2, [&](std::size_t i) { return std::abs(fd2[i] - recs[i].virial_rhs); }), tol_virial);
  for (std::size_t k = 0; k < c.cutoff_R_list.size(); ++k) {
    const auto fk = tr.series.FD2_trunc_V(k);
    rep.at_most("localized_virial_identity " + R_tag(c.cutoff_R_list[k]), "max |FD2[Tr(psi_R gamma)] - localized rhs|",
                max_over_interior(fk, [&](std::size_t i) { return std::abs(fk[i] - recs[i].localized[k].locrhs); }),
                tol_local);
  }
  return {std::move(rep), tr.series};
}

RunOutput blowup(const ExperimentConfig& c) {
  if (c.propagator.mu != -1) throw ConfigError("propagator.mu", "blowup requires the focusing sign -1");
  const Ensemble e = build_ensemble(c);
  const bool terms = c.radial && !c.cutoff_R_list.empty();

  ObservableRecorder::Options o;
  o.mu = -1;
  o.R_list = c.cutoff_R_list;
  o.localized_terms = terms;
  o.weight_mode = c.weight_derivatives;
  ordered_json constants = ordered_json::object();
  for (double R : c.cutoff_R_list) {
    if (R < 1.0) continue;
    const auto tc = truncation_bound_check(make_profile(), R, 10000, c.seed, c.grid.dim);
    constants[R_tag(R)] = tc.max_ratio;
    o.truncation_constant = std::max(o.truncation_constant, tc.max_ratio);
  }
  const auto rec = build_recorder(c, o);

  const double E1_0 = energy_E1(e, rec.kernels().value, -1);
  if (!(E1_0 < 0.0)) {
    throw PositiveEnergyError(E1_0, "blowup: initial energy E1(0) = " + std::to_string(E1_0) +
                                        " is not negative; the concavity argument does not apply");
  }
  const double tol_virial = c.tolerance("virial_bound");
  const double tol_env = c.tolerance("envelope");
  const double tol_local = terms ? c.tolerance("localized_bound") : 0.0;

  PropagatorConfig pc = c.propagator;
  double grad0 = 0.0;
  for (const auto& m : e.members()) grad0 = std::max(grad0, gradient_norm(m.field));
  if (!std::isfinite(pc.blowup_gradient_threshold)) {
    pc.blowup_gradient_threshold = c.blowup_gradient_factor.value_or(2.0) * grad0;
  }

  const double V1_0 = variance(e);
  const double V1_dot_0 = variance_rate(e);
  const GlasseyEnvelope env = glassey_envelope(V1_0, V1_dot_0, E1_0);

  const Trajectory tr = run(e, rec, pc, c.cutoff_R_list);
  const auto& recs = tr.series.records();
  const auto& out = tr.result.outcome;

  Report rep("blowup");
  auto& d = rep.data();
  d["run"] = run_data(tr);
  d["E1_0"] = E1_0;
  d["V1_0"] = V1_0;
  d["V1_dot_0"] = V1_dot_0;
  d["initial_gradient_norm"] = grad0;
  d["gradient_threshold"] = pc.blowup_gradient_threshold;
  d["envelope_root"] = env.root ? ordered_json(*env.root) : ordered_json(nullptr);
  d["detection_time"] = out.status == StepStatus::blowup_detected ? ordered_json(out.time) : ordered_json(nullptr);
  if (terms) d["truncation_constants"] = constants;

  rep.at_most("negative_energy", "E1(0) < 0", E1_0, 0.0);
  const auto fd2 = tr.series.FD2_V1();
  rep.at_most("virial_bound", "max FD2[V1] - 16 E1(0)",
              max_over_interior(fd2, [&](std::size_t i) { return fd2[i] - 16.0 * E1_0; }), tol_virial);
  double env_excess = -kInf;
  for (const auto& r : recs) env_excess = std::max(env_excess, r.V1 - env(r.t));
  rep.at_most("envelope_domination", "max V1(t) - (V1(0) + V1'(0) t + 8 E1 t^2)", env_excess, tol_env);
  double ratio = kInf;
  if (out.status == StepStatus::blowup_detected && env.root) ratio = out.time / *env.root;
  rep.at_most("detection_before_envelope_root", "detection time / envelope root", ratio, kBlowupSlack);

  if (terms) {
    ordered_json table = ordered_json::object();
    for (std::size_t k = 0; k < c.cutoff_R_list.size(); ++k) {
      const double R = c.cutoff_R_list[k];
      const auto fk = tr.series.FD2_trunc_V(k);
      ordered_json rows = ordered_json::array();
      double worst_II = -kInf;
      for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& l = recs[i].localized[k];
        const auto& b = *l.terms;
        worst_II = std::max(worst_II, b.II);
        rows.push_back({{"t", recs[i].t},
                        {"FD2_truncV", std::isnan(fk[i]) ? ordered_json(nullptr) : ordered_json(fk[i])},
                        {"locrhs", l.locrhs},
                        {"sixteen_E1", b.sixteen_E1},
                        {"II", b.II},
                        {"IIIa", b.IIIa},
                        {"IIIb", b.IIIb},
                        {"IV", b.IV},
                        {"bound", b.bound},
                        {"defect", b.defect}});
      }
      table[R_tag(R)] = std::move(rows);
      rep.at_most("localized_bound " + R_tag(R), "max FD2[Tr(psi_R gamma)] - (16 E1 + II + IIIa + IIIb + IV)",
                  max_over_interior(fk, [&](std::size_t i) { return fk[i] - recs[i].localized[k].terms->bound; }),
                  tol_local);
      rep.at_most("II_nonpositive " + R_tag(R), "max over t of II", worst_II, 0.0);
    }
    d["localized_terms"] = std::move(table);
  }
  return {std::move(rep), tr.series};
}

namespace {

SpectralField random_band_limited(const GridSpec& g, int kmax, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ComplexField spec(g.size(), Complex{});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    bool inside = true;
    for (int a = 0; a < g.dim; ++a) {
      int k = idx[a];
      if (k >= g.n / 2) k -= g.n;
      if (std::abs(k) > kmax) inside = false;
    }
    if (inside) spec[i] = Complex(nd(rng), nd(rng));
  }
  const auto f = SpectralField::from_spectrum(g, std::move(spec));
  return f.scaled(1.0 / std::sqrt(integrate(g, density(f))));
}

void cutoff_checks(const ExperimentConfig& c, Report& rep) {
  const double tol = c.tolerance("cutoff");
  const auto& p = make_profile();
  double lin = 0.0, flat = 0.0, second = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double x = k / 1000.0;
    lin = std::max(lin, std::abs(p.psi(x) - x));
    flat = std::max(flat, std::abs(p.psi(3.0 + 47.0 * x) - 2.0));
  }
  for (int k = 0; k <= 10000; ++k) {
    const double x = 6.0 * k / 10000.0;
    second = std::max(second, std::abs(p.psi_derivative(2, x) + p.rho(x)));
  }
  rep.at_most("psi_linear_near_origin", "max |psi(x) - x| on [0, 1]", lin, tol);
  rep.at_most("psi_constant_far", "max |psi(x) - 2| on [3, 50]", flat, tol);
  rep.at_most("psi_second_derivative", "max |psi'' + rho| on [0, 6]", second, tol);

  bool range_ok = true;
  for (double R : {1.0, 10.0, 100.0}) {
    double prev = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double r = 2.0 * std::sqrt(R) * k / 2000.0;
      const double F = cumulative_weight(p, r, R);
      if (F < 0.0 || F > 1.0 || F < prev) range_ok = false;
      prev = F;
    }
  }
  rep.require("cumulative_weight_monotone", "F_R in [0, 1] and nondecreasing", range_ok);

  ordered_json constants = ordered_json::object();
  for (double R : {1.0, 10.0, 100.0}) {
    const auto t = truncation_bound_check(p, R, 10000, c.seed, 3);
    constants[R_tag(R)] = t.max_ratio;
    rep.at_most("pair_bound_violations " + R_tag(R), "pairs with zero bracket but |a| > 1e-12",
                static_cast<double>(t.violations), 0.0);
    rep.require("pair_bound_constant_finite " + R_tag(R), "finite |a| / (bracket |x - y|)",
                std::isfinite(t.max_ratio) && t.evaluated > 0);
  }
  rep.data()["pair_bound_constants"] = std::move(constants);
}

}  // namespace

RunOutput check_cutoff(const ExperimentConfig& c) {
  Report rep("check-cutoff");
  cutoff_checks(c, rep);
  return {std::move(rep), std::nullopt};
}

RunOutput check_identities(const ExperimentConfig& c) {
  const double tol_id = c.tolerance("identity");
  const double tol_herm = c.tolerance("hermitian");
  const double tol_l40 = c.cutoff_R_list.empty() ? 0.0 : c.tolerance("lemma40");
  Report rep("check-identities");
  const GridSpec& g = c.grid;
  std::mt19937_64 rng(c.seed);

  // band-limited kernels are exact on a coarse grid of the same box
  const GridSpec coarse = GridSpec::make(g.dim, 16, g.length);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto a = random_band_limited(coarse, 3, rng);
    const auto b = random_band_limited(coarse, 3, rng);
    const auto t = check_trace_identity(a, b);
    worst = std::max(worst, t.max_disagreement() / std::max(1.0, std::abs(t.unprimed)));
  }
  rep.at_most("trace_identities", "three trace forms of 100 random rank-one kernels", worst, tol_id);

  const Ensemble e = build_ensemble(c);
  std::vector<std::size_t> pts;
  for (int k = 0; k < 20; ++k) pts.push_back(rng() % g.size());
  rep.at_most("hermitian_derivatives", "diagonal Hermitian derivative identities", check_hermitian_derivs(e, pts).max(),
              tol_herm);
  rep.at_most("partial_trace_consistency", "int gamma2(x,y,x,y) dy - gamma1(x,x)", admissibility_residual(e, pts),
              tol_id);
  const std::size_t stride = std::max<std::size_t>(1, (g.size() + 4095) / 4096);
  rep.at_most("pair_density_nonnegative", "-min gamma2(x,y,x,y)", -min_pair_density(e, stride), 0.0);

  for (double R : c.cutoff_R_list) {
    BilaplacianIdentity id;
    try {
      id = lemma40_check(e, make_profile(), R, c.weight_derivatives);
    } catch (const InvalidArgument& err) {
      throw ConfigError("cutoff_R_list", err.what());
    }
    rep.at_most("bilaplacian_identity " + R_tag(R), "weighted Hessian traces vs int Delta^2 psi_R gamma",
                id.residual(), tol_l40);
  }
  rep.data()["weight_derivatives"] =
      c.weight_derivatives == WeightDerivatives::spectral ? "spectral" : "analytic";

  cutoff_checks(c, rep);
  return {std::move(rep), std::nullopt};
}

RunOutput check_potential(const ExperimentConfig& c) {
  const double tol = c.tolerance("closed_form");
  const int d = c.grid.dim;
  HypothesisReport h;
  try {
    h = check_hypotheses(c.potential, d, c.hypothesis_R_list);
  } catch (const InvalidArgument& e) {
    throw ConfigError("hypothesis_R_list", e.what());
  }
  Report rep("check-potential");
  double worst_defect = -kInf;
  ordered_json rows = ordered_json::array();
  const auto tail = [](const TailValue& t) { return t.finite ? ordered_json(t.value) : ordered_json("divergent"); };
  for (const auto& r : h.rows) {
    worst_defect = std::max(worst_defect, r.max_defect);
    rows.push_back({{"R", r.R},
                    {"max_defect", r.max_defect},
                    {"sup_tail", r.sup_tail},
                    {"outer_tail", tail(r.outer)},
                    {"inner_tail", tail(r.inner)}});
  }
  rep.data()["potential"] = c.potential.describe();
  rep.data()["dim"] = d;
  rep.data()["rows"] = std::move(rows);
  rep.at_most("defect_nonpositive", "max of V + x.grad V / 2", worst_defect, 0.0);
  rep.require("sup_tail_decays", "sup_{|x| >= R} |x||grad V| strictly decreasing", h.sup_tail_decays);
  rep.require("outer_tail_decays", "L1(|x| >= sqrt R) ratio finite and strictly decreasing", h.outer_decays);
  rep.require("inner_tail_decays", "L1(|x| <= sqrt R) ratio finite and strictly decreasing", h.inner_decays);

  if (c.potential.family() == Potential::Family::power) {
    double err = 0.0;
    for (const auto& r : h.rows) {
      for (auto [region, got] : {std::pair{TailRegion::outer, r.outer}, std::pair{TailRegion::inner, r.inner}}) {
        const auto exact = power_tail_ratio_exact(c.potential.exponent(), c.potential.strength(), d, r.R, region);
        if (exact.finite != got.finite) {
          err = kInf;
        } else if (exact.finite) {
          err = std::max(err, std::abs(got.value - exact.value) / std::abs(exact.value));
        }
      }
    }
    rep.at_most("tails_match_closed_form", "relative error of quadrature vs closed-form radial integrals", err, tol);
  }
  return {std::move(rep), std::nullopt};
}

void write_outputs(const ExperimentConfig& c, const RunOutput& out) {
  std::filesystem::create_directories(c.output_dir);
  out.report.write(c.output_dir / "report.json");
  if (out.series) {
    std::ofstream csv(c.output_dir / "series.csv");
    out.series->write_csv(csv);
  }
}

}  // namespace hartree::cli
