#include "densctl/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "densctl/error.hpp"

namespace densctl {
namespace {

// FFTW planning is not thread-safe, execution with the new-array API is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t total = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    fftw_complex* in = fftw_alloc_complex(total);
    fftw_complex* out = fftw_alloc_complex(total);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dim == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags)
                              : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    fftw_free(in);
    fftw_free(out);
    if (!plan) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const PeriodicMesh& mesh, int sign, std::vector<Complex>& in, std::vector<Complex>& out) {
  fftw_plan plan = PlanCache::instance().get(mesh.dim(), mesh.points_per_axis(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

std::vector<Complex> fft_forward(const PeriodicMesh& mesh, std::span<const double> values) {
  if (values.size() != mesh.num_nodes()) throw InvalidArgument("fft_forward: size mismatch");
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out(in.size());
  execute(mesh, FFTW_FORWARD, in, out);
  return out;
}

std::vector<double> fft_inverse_real(const PeriodicMesh& mesh, std::span<const Complex> spectrum) {
  if (spectrum.size() != mesh.num_nodes()) throw InvalidArgument("fft_inverse_real: size mismatch");
  std::vector<Complex> in(spectrum.begin(), spectrum.end());
  std::vector<Complex> out(in.size());
  execute(mesh, FFTW_BACKWARD, in, out);
  std::vector<double> result(out.size());
  const double scale = 1.0 / static_cast<double>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) result[i] = out[i].real() * scale;
  return result;
}

int wavenumber(int j, int n) { return 2 * j < n ? j : j - n; }

std::array<int, 2> wavevector(const PeriodicMesh& mesh, std::size_t index) {
  const int n = mesh.points_per_axis();
  if (mesh.dim() == 1) return {wavenumber(static_cast<int>(index), n), 0};
  return {wavenumber(static_cast<int>(index / n), n), wavenumber(static_cast<int>(index % n), n)};
}

bool is_nyquist(const PeriodicMesh& mesh, std::size_t index) {
  const int n = mesh.points_per_axis();
  if (n % 2 != 0) return false;
  if (mesh.dim() == 1) return static_cast<int>(index) == n / 2;
  return static_cast<int>(index / n) == n / 2 || static_cast<int>(index % n) == n / 2;
}

std::vector<double> displacement_ordered(const PeriodicMesh& mesh, std::span<const double> kernel) {
  const int n = mesh.points_per_axis();
  if (n % 2 != 0) throw InvalidArgument("circular convolution requires an even number of points per axis");
  if (kernel.size() != mesh.num_nodes()) throw InvalidArgument("displacement_ordered: size mismatch");
  std::vector<double> out(kernel.size());
  const int half = n / 2;
  if (mesh.dim() == 1) {
    for (int m = 0; m < n; ++m) out[m] = kernel[(m + half) % n];
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out[static_cast<std::size_t>(a) * n + b] =
            kernel[static_cast<std::size_t>((a + half) % n) * n + (b + half) % n];
  }
  return out;
}

KernelConvolver::KernelConvolver(const GridFunction& kernel) : mesh_(kernel.mesh()) {
  const double w = mesh_.cell_volume();
  for (int c = 0; c < kernel.components(); ++c) {
    auto spec = fft_forward(mesh_, displacement_ordered(mesh_, kernel.component(c)));
    for (auto& z : spec) z *= w;
    spectra_.push_back(std::move(spec));
  }
}

GridFunction KernelConvolver::apply(const GridFunction& density) const {
  if (!(density.mesh() == mesh_)) throw InvalidArgument("circular_convolve: mesh mismatch");
  if (!density.is_scalar()) throw InvalidArgument("circular_convolve: density must be scalar");
  auto rho_hat = fft_forward(mesh_, density.values());
  GridFunction out(mesh_, components());
  std::vector<Complex> prod(rho_hat.size());
  for (int c = 0; c < components(); ++c) {
    const auto& k = spectra_[c];
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = k[i] * rho_hat[i];
    auto vals = fft_inverse_real(mesh_, prod);
    std::copy(vals.begin(), vals.end(), out.component(c).begin());
  }
  return out;
}

}  // namespace densctl
