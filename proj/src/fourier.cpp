#include "trigshape/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "trigshape/errors.hpp"

namespace trigshape::fourier {
namespace {

// The FFTW planner is not reentrant; plans are created once per size under a
// lock and executed with the new-array interface on fftw_malloc'd buffers.
// FFTW_ESTIMATE keeps the chosen algorithm, and hence every bit of the
// output, independent of timing.
struct PlanCache {
  std::mutex mu;
  std::map<std::size_t, fftw_plan> c2r;
  std::map<std::size_t, fftw_plan> r2c;

  ~PlanCache() {
    for (auto& [n, p] : c2r) fftw_destroy_plan(p);
    for (auto& [n, p] : r2c) fftw_destroy_plan(p);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

fftw_plan c2r_plan(std::size_t n) {
  auto& c = cache();
  std::lock_guard lock(c.mu);
  auto it = c.c2r.find(n);
  if (it != c.c2r.end()) return it->second;
  auto in = fftw_alloc<fftw_complex>(n / 2 + 1);
  auto out = fftw_alloc<double>(n);
  fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  c.c2r.emplace(n, p);
  return p;
}

fftw_plan r2c_plan(std::size_t n) {
  auto& c = cache();
  std::lock_guard lock(c.mu);
  auto it = c.r2c.find(n);
  if (it != c.r2c.end()) return it->second;
  auto in = fftw_alloc<double>(n);
  auto out = fftw_alloc<fftw_complex>(n / 2 + 1);
  fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  c.r2c.emplace(n, p);
  return p;
}

}  // namespace

std::vector<double> evaluate_grid_fft(const TrigPoly& p, std::size_t n, double x0) {
  const int deg = p.degree();
  if (n < static_cast<std::size_t>(2 * deg + 1)) {
    throw DomainError("evaluate_grid_fft: grid too coarse for the degree");
  }
  // Even n with deg == n/2 would need a Nyquist bin; excluded above only for
  // odd n, so guard it explicitly.
  if (n % 2 == 0 && static_cast<std::size_t>(deg) >= n / 2) {
    throw DomainError("evaluate_grid_fft: grid too coarse for the degree");
  }
  const std::size_t nc = n / 2 + 1;
  auto in = fftw_alloc<fftw_complex>(nc);
  auto out = fftw_alloc<double>(n);
  for (std::size_t j = 0; j < nc; ++j) {
    in[j][0] = 0.0;
    in[j][1] = 0.0;
  }
  in[0][0] = p.a(0);
  for (int j = 1; j <= deg; ++j) {
    // (a_j - i b_j) e^{i j x0} / 2
    const double c = std::cos(j * x0);
    const double s = std::sin(j * x0);
    const double re = p.a(j) * c + p.b(j) * s;
    const double im = p.a(j) * s - p.b(j) * c;
    in[static_cast<std::size_t>(j)][0] = 0.5 * re;
    in[static_cast<std::size_t>(j)][1] = 0.5 * im;
  }
  fftw_execute_dft_c2r(c2r_plan(n), in.get(), out.get());
  return std::vector<double>(out.get(), out.get() + n);
}

std::vector<double> evaluate_grid_serial(const TrigPoly& p, std::size_t n, double x0) {
  std::vector<double> values(n);
  const double step = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = p(x0 + step * static_cast<double>(k));
  return values;
}

std::vector<double> evaluate_grid_parallel(const TrigPoly& p, std::size_t n, double x0) {
  std::vector<double> values(n);
  const double step = kTwoPi / static_cast<double>(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < count; ++k) {
    values[static_cast<std::size_t>(k)] = p(x0 + step * static_cast<double>(k));
  }
  return values;
}

std::vector<double> evaluate_grid(const TrigPoly& p, std::size_t n, double x0) {
  const auto deg = static_cast<std::size_t>(p.degree());
  if (n > 2 * deg + 1 && deg > 8) return evaluate_grid_fft(p, n, x0);
  return evaluate_grid_parallel(p, n, x0);
}

TrigPoly interpolate(std::span<const double> samples, int degree, double x0) {
  const std::size_t n = samples.size();
  if (degree < 0 || n < static_cast<std::size_t>(2 * degree + 1)) {
    throw DomainError("interpolate: need at least 2*degree+1 samples");
  }
  if (n % 2 == 0 && static_cast<std::size_t>(degree) >= n / 2) {
    throw DomainError("interpolate: need at least 2*degree+1 samples");
  }
  auto in = fftw_alloc<double>(n);
  auto out = fftw_alloc<fftw_complex>(n / 2 + 1);
  for (std::size_t k = 0; k < n; ++k) in[k] = samples[k];
  fftw_execute_dft_r2c(r2c_plan(n), in.get(), out.get());
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> a(static_cast<std::size_t>(degree) + 1, 0.0);
  std::vector<double> b(static_cast<std::size_t>(degree), 0.0);
  a[0] = out[0][0] * inv_n;
  for (int j = 1; j <= degree; ++j) {
    // C_j = 2 V_j / n, (a_j - i b_j) = C_j e^{-i j x0}
    const double re = 2.0 * out[j][0] * inv_n;
    const double im = 2.0 * out[j][1] * inv_n;
    const double c = std::cos(j * x0);
    const double s = std::sin(j * x0);
    const double rr = re * c + im * s;
    const double ri = im * c - re * s;
    a[static_cast<std::size_t>(j)] = rr;
    b[static_cast<std::size_t>(j) - 1] = -ri;
  }
  return TrigPoly(std::move(a), std::move(b));
}

}  // namespace trigshape::fourier
