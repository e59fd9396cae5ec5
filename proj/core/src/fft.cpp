#include "hartree/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "hartree/errors.hpp"
#include "hartree/grid.hpp"

namespace hartree {
namespace {

struct PlanKey {
  int dim;
  int n;
  int sign;
  bool in_place;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanRegistry {
 public:
  static PlanRegistry& instance() {
    static PlanRegistry registry;
    return registry;
  }

  fftw_plan get(const PlanKey& key) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = 1;
    int dims[kMaxDim];
    for (int a = 0; a < key.dim; ++a) {
      dims[a] = key.n;
      total *= static_cast<std::size_t>(key.n);
    }
    auto* in = fftw_alloc_complex(total);
    auto* out = key.in_place ? in : fftw_alloc_complex(total);
    // ESTIMATE keeps plan selection (and therefore roundoff) deterministic.
    fftw_plan plan = fftw_plan_dft(key.dim, dims, in, out, key.sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (out != in) fftw_free(out);
    fftw_free(in);
    if (plan == nullptr) throw Error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanRegistry() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::shared_mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

}  // namespace

void transform(const GridSpec& grid, std::span<const Complex> in, std::span<Complex> out,
               TransformSign sign) {
  if (in.size() != grid.size() || out.size() != grid.size()) {
    throw InvalidArgument("transform: buffer size does not match grid");
  }
  const bool in_place = static_cast<const void*>(in.data()) == static_cast<void*>(out.data());
  const PlanKey key{grid.dim, grid.n, sign == TransformSign::negative ? FFTW_FORWARD : FFTW_BACKWARD,
                    in_place};
  fftw_plan plan = PlanRegistry::instance().get(key);
  // new-array execute is thread safe; fftw does not write to `in` for
  // out-of-place complex transforms.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void forward_transform(const GridSpec& grid, std::span<const Complex> in, std::span<Complex> out) {
  transform(grid, in, out, TransformSign::negative);
}

void inverse_transform(const GridSpec& grid, std::span<const Complex> in, std::span<Complex> out) {
  transform(grid, in, out, TransformSign::positive);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : out) v *= scale;
}

}  // namespace hartree
