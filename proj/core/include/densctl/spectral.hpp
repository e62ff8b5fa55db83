#pragma once

// Thin FFT layer over FFTW3. Plans are cached per mesh shape and executed
// through the new-array interface, so every function here is thread-safe.

#include <complex>
#include <span>
#include <vector>

#include "densctl/grid.hpp"

namespace densctl {

using Complex = std::complex<double>;

/// Unnormalized forward DFT of real samples on `mesh` (full complex spectrum).
std::vector<Complex> fft_forward(const PeriodicMesh& mesh, std::span<const double> values);

/// Inverse DFT including the 1/N factor; returns the real part.
std::vector<double> fft_inverse_real(const PeriodicMesh& mesh, std::span<const Complex> spectrum);

/// Signed integer wavenumber of DFT index j on an n-point axis. The Nyquist
/// index n/2 maps to -n/2.
int wavenumber(int j, int n);

/// Wavenumbers (k0, k1) of a flat spectrum index.
std::array<int, 2> wavevector(const PeriodicMesh& mesh, std::size_t index);

/// True when any axis index of the flat spectrum index is the Nyquist index.
bool is_nyquist(const PeriodicMesh& mesh, std::size_t index);

/// Kernel table re-indexed by displacement: entry m holds the kernel at
/// displacement m*h wrapped into [-pi, pi). Requires even n.
std::vector<double> displacement_ordered(const PeriodicMesh& mesh, std::span<const double> kernel);

/// Caches the spectrum of a (possibly vector) kernel so repeated
/// convolutions with changing densities cost one forward and one inverse
/// transform per component.
class KernelConvolver {
 public:
  KernelConvolver() = default;
  explicit KernelConvolver(const GridFunction& kernel);

  bool empty() const { return spectra_.empty(); }
  const PeriodicMesh& mesh() const { return mesh_; }
  int components() const { return static_cast<int>(spectra_.size()); }
  /// Spectrum of component c, already scaled by the cell volume.
  const std::vector<Complex>& spectrum(int c) const { return spectra_[c]; }

  GridFunction apply(const GridFunction& density) const;

 private:
  PeriodicMesh mesh_;
  std::vector<std::vector<Complex>> spectra_;
};

}  // namespace densctl
