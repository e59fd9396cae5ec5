#include "hartree/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hartree/errors.hpp"
#include "hartree/fft.hpp"

namespace hartree {

void PropagatorConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("propagator: dt must be positive");
  if (!(t_end > 0.0)) throw InvalidArgument("propagator: t_end must be positive");
  if (mu != -1 && mu != 1) throw InvalidArgument("propagator: mu must be -1 or +1");
  if (!(dt_floor > 0.0) || !(dt_floor < dt)) {
    throw InvalidArgument("propagator: dt_floor must satisfy 0 < dt_floor < dt");
  }
  if (record_every < 1) throw InvalidArgument("propagator: record_every must be >= 1");
  if (!(blowup_gradient_threshold > 0.0)) {
    throw InvalidArgument("propagator: blowup_gradient_threshold must be positive");
  }
  const double blocks = t_end / record_interval();
  if (std::abs(blocks - std::round(blocks)) > 1e-9 * std::max(1.0, blocks)) {
    throw InvalidArgument("propagator: t_end must be a multiple of dt * record_every");
  }
}

long PropagatorConfig::record_count() const { return std::lround(t_end / record_interval()); }

const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::ok: return "ok";
    case StepStatus::blowup_detected: return "blowup_detected";
    case StepStatus::dt_underflow: return "dt_underflow";
  }
  return "unknown";
}

namespace {

class Stepper {
 public:
  Stepper(const ConvolutionKernel& kernel, double dt, int mu)
      : grid_(kernel.grid()), kernel_(kernel), dt_(dt), mu_(mu), half_(grid_.size()) {
    for (std::size_t i = 0; i < half_.size(); ++i) {
      half_[i] = std::polar(1.0, -0.5 * dt * norm_squared(grid_.wavevector(i)));
    }
  }

  void step(ComplexField& psi) const {
    kinetic(psi);
    RealField rho(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
    const RealField W = kernel_.apply(rho);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, -mu_ * W[i] * dt_);
    kinetic(psi);
    for (const auto& z : psi) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw NonFiniteError("strang_step: non-finite sample");
      }
    }
  }

 private:
  void kinetic(ComplexField& psi) const {
    forward_transform(grid_, psi, psi);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_[i];
    inverse_transform(grid_, psi, psi);
  }

  GridSpec grid_;
  const ConvolutionKernel& kernel_;
  double dt_;
  int mu_;
  ComplexField half_;
};

double mass_of(const GridSpec& grid, std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s * grid.cell_volume();
}

void require_normalized(const GridSpec& grid, std::span<const Complex> v, const char* where) {
  const double m = std::sqrt(mass_of(grid, v));
  if (std::abs(m - 1.0) > 1e-6) {
    throw InvalidArgument(std::string(where) + ": field norm " + std::to_string(m) +
                          " is not 1 within 1e-6");
  }
}

double gradient_norm_of(const GridSpec& grid, const ComplexField& v) {
  ComplexField spec(v.size());
  forward_transform(grid, v, spec);
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) s += norm_squared(grid.wavevector(i)) * std::norm(spec[i]);
  return std::sqrt(s * grid.cell_volume() / static_cast<double>(grid.size()));
}

}  // namespace

SpectralField strang_step(const SpectralField& phi, const ConvolutionKernel& kernel, double dt, int mu) {
  if (!(phi.grid() == kernel.grid())) throw InvalidArgument("strang_step: kernel grid mismatch");
  require_normalized(phi.grid(), phi.values(), "strang_step");
  ComplexField psi(phi.values().begin(), phi.values().end());
  Stepper(kernel, dt, mu).step(psi);
  return SpectralField(phi.grid(), std::move(psi));
}

double gradient_norm(const SpectralField& phi) { return std::sqrt(gradient_norm_squared(phi)); }

PropagationResult propagate_ensemble(std::vector<SpectralField> fields, const ConvolutionKernel& kernel,
                                     const PropagatorConfig& config, const EnsembleObserver& observer) {
  config.validate();
  if (fields.empty()) throw InvalidArgument("propagate: no fields");
  const GridSpec grid = kernel.grid();
  std::vector<ComplexField> state;
  for (const auto& f : fields) {
    if (!(f.grid() == grid)) throw InvalidArgument("propagate: field grid does not match kernel grid");
    require_normalized(grid, f.values(), "propagate");
    state.emplace_back(f.values().begin(), f.values().end());
  }

  auto max_gradient = [&](const std::vector<ComplexField>& s) {
    double g = 0.0;
    for (const auto& v : s) g = std::max(g, gradient_norm_of(grid, v));
    return g;
  };
  auto snapshot = [&](const std::vector<ComplexField>& s) {
    std::vector<SpectralField> out;
    out.reserve(s.size());
    for (const auto& v : s) out.emplace_back(grid, v);
    return out;
  };

  PropagationResult result;
  double g0 = max_gradient(state);
  if (!(g0 < config.blowup_gradient_threshold)) {
    throw InvalidArgument("propagate: initial gradient norm is not below the blowup threshold");
  }
  result.records.push_back({0.0, g0});
  if (observer) observer(0.0, snapshot(state));

  const double tau = config.record_interval();
  const long blocks = config.record_count();
  result.outcome = {StepStatus::ok, 0.0, g0, 0};

  for (long b = 0; b < blocks; ++b) {
    const double t_checkpoint = static_cast<double>(b) * tau;
    int level = 0;
    for (;;) {
      const long substeps = static_cast<long>(config.record_every) << level;
      const double h = tau / static_cast<double>(substeps);
      if (h < config.dt_floor) {
        result.outcome.time = t_checkpoint;
        result.final_fields = snapshot(state);
        return result;
      }
      std::vector<ComplexField> trial = state;
      bool accepted = true;
      try {
        const Stepper stepper(kernel, h, config.mu);
        for (long s = 0; s < substeps; ++s)
          for (auto& v : trial) stepper.step(v);
      } catch (const NonFiniteError&) {
        accepted = false;
        result.outcome.status = StepStatus::dt_underflow;
      }
      double g = 0.0;
      if (accepted) {
        g = max_gradient(trial);
        if (!(g < config.blowup_gradient_threshold)) {
          accepted = false;
          result.outcome.status = StepStatus::blowup_detected;
          result.outcome.gradient_norm = g;
        }
      }
      if (accepted) {
        state = std::move(trial);
        result.outcome.status = StepStatus::ok;
        result.outcome.gradient_norm = g;
        result.outcome.max_halvings = std::max(result.outcome.max_halvings, level);
        break;
      }
      ++level;
    }
    const double t = static_cast<double>(b + 1) * tau;
    result.outcome.time = t;
    result.records.push_back({t, result.outcome.gradient_norm});
    if (observer) observer(t, snapshot(state));
  }
  result.final_fields = snapshot(state);
  return result;
}

PropagationResult propagate(const SpectralField& phi0, const ConvolutionKernel& kernel,
                            const PropagatorConfig& config, const Observer& observer) {
  EnsembleObserver wrapped;
  if (observer) {
    wrapped = [&observer](double t, std::span<const SpectralField> fields) { observer(t, fields.front()); };
  }
  return propagate_ensemble({phi0}, kernel, config, wrapped);
}

}  // namespace hartree
