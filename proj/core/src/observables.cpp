#include "hartree/observables.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hartree/errors.hpp"

namespace hartree {

ObservableSeries::ObservableSeries(double tau, std::vector<double> R_list) : tau_(tau), R_list_(std::move(R_list)) {}

std::vector<double> ObservableSeries::times() const {
  std::vector<double> v;
  for (const auto& r : records_) v.push_back(r.t);
  return v;
}

std::vector<double> ObservableSeries::V1() const {
  std::vector<double> v;
  for (const auto& r : records_) v.push_back(r.V1);
  return v;
}

std::vector<double> ObservableSeries::FD2_V1() const { return second_difference(V1(), tau_); }

std::vector<double> ObservableSeries::trunc_V(std::size_t k) const {
  std::vector<double> v;
  for (const auto& r : records_) v.push_back(r.localized.at(k).trunc_V);
  return v;
}

std::vector<double> ObservableSeries::FD2_trunc_V(std::size_t k) const {
  return second_difference(trunc_V(k), tau_);
}

std::string ObservableSeries::format_R(double R) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", R);
  return buf;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ObservableSeries::write_csv(std::ostream& os) const {
  os << "t,mass,E1,kinetic,interaction,V1,V1_dot,FD2_V1,virial_rhs";
  for (double R : R_list_) {
    const std::string s = format_R(R);
    for (const char* name : {"truncV_", "FD2_truncV_", "locrhs_", "II_", "IIIa_", "IIIb_", "IV_", "bound_"}) {
      os << ',' << name << s;
    }
  }
  os << '\n';
  const auto fd2 = FD2_V1();
  std::vector<std::vector<double>> fd2_loc;
  for (std::size_t k = 0; k < R_list_.size(); ++k) fd2_loc.push_back(FD2_trunc_V(k));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    os << num(r.t) << ',' << num(r.mass) << ',' << num(r.E1) << ',' << num(r.kinetic) << ','
       << num(r.interaction) << ',' << num(r.V1) << ',' << num(r.V1_dot) << ',' << num(fd2[i]) << ','
       << num(r.virial_rhs);
    for (std::size_t k = 0; k < R_list_.size(); ++k) {
      const auto& l = r.localized[k];
      os << ',' << num(l.trunc_V) << ',' << num(fd2_loc[k][i]) << ',' << num(l.locrhs);
      if (l.terms) {
        os << ',' << num(l.terms->II) << ',' << num(l.terms->IIIa) << ',' << num(l.terms->IIIb) << ','
           << num(l.terms->IV) << ',' << num(l.terms->bound);
      } else {
        for (int c = 0; c < 5; ++c) os << ',' << num(nan);
      }
    }
    os << '\n';
  }
}

ObservableRecorder::ObservableRecorder(const Potential& V, const GridSpec& grid, Options options)
    : options_(std::move(options)), kernels_(InteractionKernels::build(V, grid)) {
  for (double R : options_.R_list) {
    if (!(R > 0.0)) throw InvalidArgument("observables: R must be positive");
    weights_.push_back(weight_fields(grid, make_profile(), R, options_.weight_mode));
    if (options_.localized_terms) splits_.push_back(SplitKernels::build(V, grid, R));
  }
}

ObservableRecord ObservableRecorder::record(double t, const Ensemble& e) const {
  const bool need_hessian = !weights_.empty();
  const MixtureAnalysis a = analyze(e, kernels_.value, need_hessian);
  ObservableRecord r;
  r.t = t;
  r.mass = mass(e);
  for (const auto& m : a.members) {
    r.kinetic += m.weight * gradient_norm_squared(*m.field);
    double s = 0.0;
    for (std::size_t x = 0; x < m.rho.size(); ++x) s += m.W[x] * m.rho[x];
    r.interaction += m.weight * s * a.grid.cell_volume();
  }
  r.E1 = 0.5 * r.kinetic + 0.25 * options_.mu * r.interaction;
  r.V1 = variance(e);
  r.V1_dot = variance_rate(e);
  r.virial_rhs = virial_rhs(a, options_.mu);
  const RealField rho = diagonal_density(e);
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const WeightFields& w = weights_[k];
    LocalizedRecord l;
    l.R = w.R;
    double s = 0.0;
    for (std::size_t x = 0; x < rho.size(); ++x) s += w.value[x] * rho[x];
    l.trunc_V = s * a.grid.cell_volume();
    l.locrhs = localized_virial_rhs(a, w, options_.mu);
    l.lemma40_residual = lemma40_check(a, w).residual();
    if (options_.localized_terms) {
      l.terms = lemma43_terms(e, a, w, splits_[k], make_profile(), options_.mu, options_.truncation_constant);
    }
    r.localized.push_back(std::move(l));
  }
  return r;
}

}  // namespace hartree
